"""Hardness-reduction gadgets: SAT, exact cover and perfect matchings as (D, W) pairs.

Input formats read by the CLI:

* DIMACS CNF for SAT (``p cnf <vars> <clauses>``, clauses end with ``0``);
* exact cover: one set per line, elements separated by whitespace, plus an
  optional ``universe: v1 v2 ...`` line (default: the union of the sets);
* bipartite graphs: a line ``n`` followed by ``i j`` lines (1-based), one
  per edge from left vertex ``i`` to right vertex ``j``.

Lines starting with ``c`` (DIMACS) or ``#`` (other formats) are comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .matching import BipartiteGraph
from .model import (
    Conj,
    Event,
    Kind,
    Lit,
    MieAtom,
    PDocument,
    PEdge,
    PNode,
    XDocument,
    det,
    node,
    xnode,
)

TOP = "⊤"
BOTTOM = "⊥"
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class CnfFormula:
    """Clauses are tuples of nonzero ints: ``i`` is x_i, ``-i`` is not x_i."""

    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if not c:
                raise ValueError("clauses must be nonempty")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} references an undeclared variable")

    def satisfied_by(self, assignment) -> bool:
        """``assignment[i-1]`` is the value of x_i."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)


@dataclass(frozen=True)
class ExactCoverInstance:
    universe: tuple[str, ...]
    sets: tuple[tuple[str, ...], ...]

    @classmethod
    def from_sets(cls, sets, universe=()) -> "ExactCoverInstance":
        """The universe defaults to the union of the sets, in first-seen order."""
        universe = list(universe)
        for s in sets:
            for x in s:
                if x not in universe:
                    universe.append(x)
        return cls(tuple(universe), tuple(tuple(s) for s in sets))

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "sets", tuple(tuple(dict.fromkeys(s)) for s in self.sets))
        if any(not s for s in self.sets):
            raise ValueError("sets must be nonempty")
        if len(set(self.universe)) != len(self.universe):
            raise ValueError("universe elements must be distinct")
        covered = {x for s in self.sets for x in s}
        if not covered <= set(self.universe):
            raise ValueError("sets may only use universe elements")


def _var(i: int) -> str:
    return f"x{i}"


def _clause_label(j: int) -> str:
    return f"l{j}"


# ---------------------------------------------------------------------------
# SAT


def gen_sat_cie(f: CnfFormula, ordered: bool = False) -> tuple[PDocument, XDocument]:
    """W is a lone root; each clause becomes a child that survives iff the clause is false."""
    events = [Event.bool(_var(i), HALF) for i in range(1, f.n_vars + 1)]
    edges = []
    for clause in f.clauses:
        conj = Conj(tuple(Lit(_var(abs(l)), l < 0) for l in clause))
        edges.append(PEdge(node(BOTTOM), conj))
    root = node(TOP, PNode(Kind.CIE, None, tuple(edges)))
    return PDocument(root, events, ordered), XDocument(xnode(TOP), ordered)


def gen_sat_muxind(f: CnfFormula) -> tuple[PDocument, XDocument]:
    """One mux per variable choosing between its positive and negative clause sets."""
    muxes = []
    for i in range(1, f.n_vars + 1):
        pos = [_clause_label(j) for j, c in enumerate(f.clauses, 1) if i in c]
        neg = [_clause_label(j) for j, c in enumerate(f.clauses, 1) if -i in c]
        branches = []
        for labels in (pos, neg):
            ind_node = PNode(Kind.IND, None, tuple(PEdge(node(l), HALF) for l in labels))
            branches.append(PEdge(ind_node, HALF))
        muxes.append(PNode(Kind.MUX, None, tuple(branches)))
    d = PDocument(node(TOP, *muxes), (), ordered=False)
    w = XDocument(xnode(TOP, *(xnode(_clause_label(j)) for j in range(1, len(f.clauses) + 1))), False)
    return d, w


# ---------------------------------------------------------------------------
# Exact cover


def _xc_local(inst: ExactCoverInstance, kind: Kind) -> tuple[PDocument, XDocument]:
    kids = []
    for s in inst.sets:
        holder = det(*(node(x) for x in s))
        kids.append(PNode(kind, None, (PEdge(holder, HALF),)))
    d = PDocument(node(TOP, *kids), (), ordered=False)
    w = XDocument(xnode(TOP, *(xnode(v) for v in inst.universe)), False)
    return d, w


def gen_xc_inddet(inst: ExactCoverInstance) -> tuple[PDocument, XDocument]:
    return _xc_local(inst, Kind.IND)


def gen_xc_muxdet(inst: ExactCoverInstance) -> tuple[PDocument, XDocument]:
    return _xc_local(inst, Kind.MUX)


def gen_xc_mie(inst: ExactCoverInstance, ordered: bool = False) -> tuple[PDocument, XDocument]:
    """One Boolean event per set; mie children are grouped in universe order."""
    events = [Event.bool(f"e{i}", HALF) for i in range(1, len(inst.sets) + 1)]
    edges = []
    for v in inst.universe:
        for i, s in enumerate(inst.sets, 1):
            if v in s:
                edges.append(PEdge(node(v), MieAtom(f"e{i}", "t")))
    d = PDocument(node(TOP, PNode(Kind.MIE, None, tuple(edges))), events, ordered)
    w = XDocument(xnode(TOP, *(xnode(v) for v in inst.universe)), ordered)
    return d, w


# ---------------------------------------------------------------------------
# Perfect matchings


def _pm(g: BipartiteGraph, kind: Kind) -> tuple[PDocument, XDocument]:
    if g.n_left != g.n_right:
        raise ValueError("both parts must have the same size")
    n = g.n_left
    kids = []
    for i in range(n):
        choices = [
            PNode(kind, None, (PEdge(node(_clause_label(j + 1)), HALF),))
            for j in range(n)
            if (i, j) in g.edges
        ]
        kids.append(node(BOTTOM, *choices))
    d = PDocument(node(TOP, *kids), (), ordered=False)
    w = XDocument(xnode(TOP, *(xnode(BOTTOM, xnode(_clause_label(j + 1))) for j in range(n))), False)
    return d, w


def gen_pm_ind(g: BipartiteGraph) -> tuple[PDocument, XDocument]:
    return _pm(g, Kind.IND)


def gen_pm_mux(g: BipartiteGraph) -> tuple[PDocument, XDocument]:
    return _pm(g, Kind.MUX)


GENERATORS = {
    "sat-cie": ("cnf", gen_sat_cie),
    "sat-muxind": ("cnf", gen_sat_muxind),
    "xc-inddet": ("sets", gen_xc_inddet),
    "xc-muxdet": ("sets", gen_xc_muxdet),
    "xc-mie": ("sets", gen_xc_mie),
    "pm-ind": ("graph", gen_pm_ind),
    "pm-mux": ("graph", gen_pm_mux),
}


# ---------------------------------------------------------------------------
# Input formats


def parse_dimacs(text: str) -> CnfFormula:
    n_vars = None
    declared = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            n_vars, declared = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n_vars is None:
        n_vars = max((abs(l) for c in clauses for l in c), default=0)
    if declared is not None and declared != len(clauses):
        raise ValueError(f"header declares {declared} clauses, found {len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def format_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.n_vars} {len(f.clauses)}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def _content_lines(text: str):
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line


def parse_sets(text: str) -> ExactCoverInstance:
    sets = []
    universe: list[str] = []
    for line in _content_lines(text):
        words = line.split()
        if words[0] == "universe:":
            universe.extend(words[1:])
        else:
            sets.append(words)
    return ExactCoverInstance.from_sets(sets, universe)


def format_sets(inst: ExactCoverInstance) -> str:
    head = "universe: " + " ".join(inst.universe) + "\n"
    return head + "".join(" ".join(s) + "\n" for s in inst.sets)


def parse_edge_list(text: str) -> BipartiteGraph:
    lines = list(_content_lines(text))
    if not lines:
        raise ValueError("empty graph file")
    n = int(lines[0])
    edges = []
    for line in lines[1:]:
        i, j = (int(t) for t in line.split())
        edges.append((i - 1, j - 1))
    return BipartiteGraph(n, n, edges)


def format_edge_list(g: BipartiteGraph) -> str:
    lines = [str(g.n_left)]
    lines.extend(f"{i + 1} {j + 1}" for i, j in sorted(g.edges))
    return "\n".join(lines) + "\n"


INPUT_PARSERS = {"cnf": parse_dimacs, "sets": parse_sets, "graph": parse_edge_list}
