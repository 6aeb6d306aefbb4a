"""Deterministic and probabilistic XML trees, event tables and validation.

Documents are immutable. Every node carries an integer ``id``; documents
built without ids get preorder ids assigned on construction, which is what
match files and violation reports refer to.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Union

from .errors import InvalidDocument

TRUE = "t"
FALSE = "f"

# Labels starting with this prefix are reserved for synthetic relabelings.
SYNTHETIC_PREFIX = "#"


def rational(value) -> Fraction:
    """Coerce ints, strings such as ``"9/10"`` or ``"0.9"`` and Fractions."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    return Fraction(value)


# ---------------------------------------------------------------------------
# Events


@dataclass(frozen=True)
class Event:
    name: str
    outcomes: tuple[tuple[str, Fraction], ...]
    boolean: bool = False

    @classmethod
    def bool(cls, name: str, p_true) -> "Event":
        p = rational(p_true)
        outcomes = tuple((v, q) for v, q in ((TRUE, p), (FALSE, 1 - p)) if q != 0)
        return cls(name, outcomes, boolean=True)

    @classmethod
    def enum(cls, name: str, pairs) -> "Event":
        return cls(name, tuple((v, rational(q)) for v, q in pairs))

    @property
    def values(self) -> tuple[str, ...]:
        """All declared outcome values, including zero-probability Boolean ones."""
        if self.boolean:
            return (TRUE, FALSE)
        return tuple(v for v, _ in self.outcomes)

    @property
    def p_true(self) -> Fraction:
        return self.probability(TRUE)

    def probability(self, value: str) -> Fraction:
        for v, q in self.outcomes:
            if v == value:
                return q
        return Fraction(0)


class EventTable:
    """Ordered, immutable map from event name to :class:`Event`."""

    def __init__(self, events=()):
        self._events = tuple(events)
        self._by_name = {e.name: e for e in self._events}

    def __getitem__(self, name: str) -> Event:
        return self._by_name[name]

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __eq__(self, other) -> bool:
        return isinstance(other, EventTable) and self._events == other._events

    def __hash__(self) -> int:
        return hash(self._events)

    def __repr__(self) -> str:
        return f"EventTable({list(self._events)!r})"

    @property
    def names(self) -> list[str]:
        return [e.name for e in self._events]


# ---------------------------------------------------------------------------
# Edge annotations


@dataclass(frozen=True)
class Lit:
    event: str
    positive: bool = True


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Not:
    item: object


Formula = Union[Lit, And, Or, Not]


@dataclass(frozen=True)
class Conj:
    """Conjunction of event literals (cie edges)."""

    literals: tuple[Lit, ...] = ()


@dataclass(frozen=True)
class MieAtom:
    event: str
    value: str


def formula_events(formula) -> set[str]:
    if isinstance(formula, Lit):
        return {formula.event}
    if isinstance(formula, Conj):
        return {lit.event for lit in formula.literals}
    if isinstance(formula, (And, Or)):
        out = set()
        for item in formula.items:
            out |= formula_events(item)
        return out
    if isinstance(formula, Not):
        return formula_events(formula.item)
    raise TypeError(f"not a formula: {formula!r}")


def evaluate_formula(formula, valuation) -> bool:
    if isinstance(formula, Lit):
        return (valuation[formula.event] == TRUE) == formula.positive
    if isinstance(formula, Conj):
        return all(evaluate_formula(lit, valuation) for lit in formula.literals)
    if isinstance(formula, And):
        return all(evaluate_formula(f, valuation) for f in formula.items)
    if isinstance(formula, Or):
        return any(evaluate_formula(f, valuation) for f in formula.items)
    if isinstance(formula, Not):
        return not evaluate_formula(formula.item, valuation)
    raise TypeError(f"not a formula: {formula!r}")


# ---------------------------------------------------------------------------
# Probabilistic trees


class Kind(str, enum.Enum):
    REGULAR = "node"
    DET = "det"
    IND = "ind"
    MUX = "mux"
    CIE = "cie"
    FIE = "fie"
    MIE = "mie"

    @property
    def probabilistic(self) -> bool:
        return self is not Kind.REGULAR


PROBABILISTIC_KINDS = ("det", "ind", "mux", "cie", "fie", "mie")
LOCAL_KINDS = frozenset({"mux", "ind", "det"})


@dataclass(frozen=True)
class PEdge:
    child: "PNode"
    annotation: object = None


@dataclass(frozen=True)
class PNode:
    kind: Kind
    label: str | None = None
    edges: tuple[PEdge, ...] = ()
    id: int = field(default=-1, compare=False)

    @property
    def children(self) -> tuple["PNode", ...]:
        return tuple(e.child for e in self.edges)

    @property
    def is_regular(self) -> bool:
        return self.kind is Kind.REGULAR

    def __repr__(self) -> str:
        head = repr(self.label) if self.is_regular else self.kind.value
        return f"PNode({head}#{self.id}, {len(self.edges)} edges)"


def iter_preorder(root):
    """Preorder over a PNode or XNode tree (iterative)."""
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def _renumber_pnode(node: PNode, counter: list[int]) -> PNode:
    nid = counter[0]
    counter[0] += 1
    edges = tuple(PEdge(_renumber_pnode(e.child, counter), e.annotation) for e in node.edges)
    return PNode(node.kind, node.label, edges, nid)


def renumber(root: PNode) -> PNode:
    return _renumber_pnode(root, [0])


@dataclass(frozen=True)
class PDocument:
    root: PNode
    events: EventTable = field(default_factory=EventTable)
    ordered: bool = False

    def __post_init__(self):
        if not isinstance(self.events, EventTable):
            object.__setattr__(self, "events", EventTable(self.events))
        if any(n.id < 0 for n in iter_preorder(self.root)):
            object.__setattr__(self, "root", renumber(self.root))

    def nodes(self) -> Iterator[PNode]:
        return iter_preorder(self.root)

    @cached_property
    def by_id(self) -> dict[int, PNode]:
        return {n.id: n for n in self.nodes()}

    @cached_property
    def parent_of(self) -> dict[int, PNode]:
        return {e.child.id: n for n in self.nodes() for e in n.edges}

    @cached_property
    def preorder_rank(self) -> dict[int, int]:
        return {n.id: i for i, n in enumerate(self.nodes())}

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def height(self) -> int:
        return _height(self.root)


def _height(node) -> int:
    best = 0
    stack = [(node, 1)]
    while stack:
        n, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in n.children)
    return best


# ---------------------------------------------------------------------------
# Deterministic trees


@dataclass(frozen=True)
class XNode:
    label: str
    children: tuple["XNode", ...] = ()
    id: int = field(default=-1, compare=False)

    def __repr__(self) -> str:
        if not self.children:
            return self.label
        return f"{self.label}({', '.join(map(repr, self.children))})"


def _renumber_xnode(node: XNode, counter: list[int]) -> XNode:
    nid = counter[0]
    counter[0] += 1
    return XNode(node.label, tuple(_renumber_xnode(c, counter) for c in node.children), nid)


@dataclass(frozen=True)
class XDocument:
    root: XNode
    ordered: bool = False

    def __post_init__(self):
        if any(n.id < 0 for n in iter_preorder(self.root)):
            object.__setattr__(self, "root", _renumber_xnode(self.root, [0]))

    def nodes(self) -> Iterator[XNode]:
        return iter_preorder(self.root)

    @cached_property
    def by_id(self) -> dict[int, XNode]:
        return {n.id: n for n in self.nodes()}

    @cached_property
    def parent_of(self) -> dict[int, XNode]:
        return {c.id: n for n in self.nodes() for c in n.children}

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def height(self) -> int:
        return _height(self.root)


# ---------------------------------------------------------------------------
# Terse constructors, mostly for tests and generators


def node(label: str, *children: PNode) -> PNode:
    return PNode(Kind.REGULAR, label, tuple(PEdge(c) for c in children))


def det(*children: PNode) -> PNode:
    return PNode(Kind.DET, None, tuple(PEdge(c) for c in children))


def ind(*pairs) -> PNode:
    return PNode(Kind.IND, None, tuple(PEdge(c, rational(p)) for p, c in pairs))


def mux(*pairs) -> PNode:
    return PNode(Kind.MUX, None, tuple(PEdge(c, rational(p)) for p, c in pairs))


def cie(*pairs) -> PNode:
    edges = []
    for conj, c in pairs:
        if not isinstance(conj, Conj):
            conj = Conj(tuple(_as_lit(x) for x in conj))
        edges.append(PEdge(c, conj))
    return PNode(Kind.CIE, None, tuple(edges))


def fie(*pairs) -> PNode:
    return PNode(Kind.FIE, None, tuple(PEdge(c, f) for f, c in pairs))


def mie(*pairs) -> PNode:
    edges = []
    for atom, c in pairs:
        if not isinstance(atom, MieAtom):
            atom = MieAtom(*atom)
        edges.append(PEdge(c, atom))
    return PNode(Kind.MIE, None, tuple(edges))


def _as_lit(x) -> Lit:
    if isinstance(x, Lit):
        return x
    if isinstance(x, str) and x.startswith("~"):
        return Lit(x[1:], False)
    return Lit(x, True)


def xnode(label: str, *children: XNode) -> XNode:
    return XNode(label, tuple(children))


# ---------------------------------------------------------------------------
# Validation and classification


@dataclass(frozen=True)
class Violation:
    node_id: int | None
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        where = "document" if self.node_id is None else f"node {self.node_id}"
        return f"{self.rule} at {where}" + (f": {self.detail}" if self.detail else "")


_EXPECTED_ANNOTATION = {
    Kind.REGULAR: "none",
    Kind.DET: "none",
    Kind.IND: "probability",
    Kind.MUX: "probability",
    Kind.CIE: "conjunction",
    Kind.FIE: "formula",
    Kind.MIE: "atom",
}


def _annotation_ok(kind: Kind, ann) -> bool:
    expected = _EXPECTED_ANNOTATION[kind]
    if expected == "none":
        return ann is None
    if expected == "probability":
        return isinstance(ann, Fraction) or isinstance(ann, int)
    if expected == "conjunction":
        return isinstance(ann, Conj)
    if expected == "formula":
        return isinstance(ann, (Lit, And, Or, Not))
    return isinstance(ann, MieAtom)


def _validate_events(events: EventTable) -> list[Violation]:
    out = []
    seen = set()
    for ev in events:
        if ev.name in seen:
            out.append(Violation(None, "DuplicateEvent", ev.name))
        seen.add(ev.name)
        values = [v for v, _ in ev.outcomes]
        if not ev.outcomes:
            out.append(Violation(None, "InvalidEventDistribution", f"{ev.name} has no outcomes"))
            continue
        if len(set(values)) != len(values):
            out.append(Violation(None, "InvalidEventDistribution", f"{ev.name} repeats an outcome"))
        if any(not (0 < q <= 1) for _, q in ev.outcomes):
            out.append(Violation(None, "InvalidEventDistribution", f"{ev.name} has a probability outside (0,1]"))
        if sum(q for _, q in ev.outcomes) != 1:
            out.append(Violation(None, "InvalidEventDistribution", f"{ev.name} does not sum to 1"))
        if ev.boolean and not set(values) <= {TRUE, FALSE}:
            out.append(Violation(None, "InvalidEventDistribution", f"{ev.name} is Boolean with non t/f outcomes"))
    return out


def validate(doc: PDocument) -> list[Violation]:
    """Return every broken invariant of ``doc``; an empty list means valid."""
    out = _validate_events(doc.events)
    root = doc.root
    if not root.is_regular:
        out.append(Violation(root.id, "RootNotRegular"))
    # (node, nearest probabilistic ancestor chain contains a mie node)
    stack = [(root, False)]
    while stack:
        n, under_mie = stack.pop()
        if n.is_regular:
            if not n.label:
                out.append(Violation(n.id, "EmptyLabel"))
        elif n.label is not None:
            out.append(Violation(n.id, "LabelOnProbabilisticNode"))
        if n.kind is Kind.MIE and under_mie:
            out.append(Violation(n.id, "MieUnderMie"))
        for idx, e in enumerate(n.edges):
            ann = e.annotation
            if not _annotation_ok(n.kind, ann):
                out.append(Violation(n.id, "BadAnnotation",
                                     f"edge {idx} of a {n.kind.value} node needs {_EXPECTED_ANNOTATION[n.kind]}"))
                continue
            if n.kind in (Kind.IND, Kind.MUX) and not (0 < ann < 1):
                out.append(Violation(n.id, "EdgeProbNotOpenInterval", f"edge {idx} has {ann}"))
            elif n.kind in (Kind.CIE, Kind.FIE):
                for name in sorted(formula_events(ann)):
                    if name not in doc.events:
                        out.append(Violation(n.id, "UnknownEvent", name))
                    elif not doc.events[name].boolean:
                        out.append(Violation(n.id, "NonBooleanEventInFormula", name))
            elif n.kind is Kind.MIE:
                if ann.event not in doc.events:
                    out.append(Violation(n.id, "UnknownEvent", ann.event))
                elif ann.value not in doc.events[ann.event].values:
                    out.append(Violation(n.id, "UnknownOutcome", f"{ann.event}={ann.value}"))
        if n.kind is Kind.MUX and all(_annotation_ok(n.kind, e.annotation) for e in n.edges):
            total = sum((e.annotation for e in n.edges), Fraction(0))
            if total > 1:
                out.append(Violation(n.id, "MuxSumExceedsOne", f"sum is {total}"))
        # a mie node below another mie node through probabilistic nodes only
        child_under = (under_mie or n.kind is Kind.MIE) and not n.is_regular
        for e in n.edges:
            stack.append((e.child, child_under))
    return out


def require_valid(doc: PDocument) -> None:
    violations = validate(doc)
    if violations:
        raise InvalidDocument(violations)


@dataclass(frozen=True)
class ClassProfile:
    used: frozenset[str]
    no_ind_under_mux: bool
    no_mux_hierarchy: bool

    def within(self, kinds) -> bool:
        return self.used <= frozenset(kinds)


def classify(doc: PDocument) -> ClassProfile:
    require_valid(doc)
    used = set()
    no_ind_under_mux = True
    no_mux_hierarchy = True
    for n in doc.nodes():
        if n.kind.probabilistic:
            used.add(n.kind.value)
        if n.kind is Kind.MUX:
            for c in n.children:
                if c.kind is Kind.IND:
                    no_ind_under_mux = False
                if c.kind is Kind.MUX:
                    no_mux_hierarchy = False
    return ClassProfile(frozenset(used), no_ind_under_mux, no_mux_hierarchy)


def _strip(n: PNode) -> PNode | None:
    edges = []
    for e in n.edges:
        c = _strip(e.child)
        if c is not None:
            edges.append(replace(e, child=c))
    if n.kind.probabilistic and not edges:
        return None
    return PNode(n.kind, n.label, tuple(edges))


def strip_probabilistic_leaves(doc: PDocument) -> PDocument:
    """Remove probabilistic nodes without children, until none are left.

    Such nodes contribute nothing to any world, so the distribution is
    unchanged. A mux branch removed this way folds into the residual.
    """
    root = _strip(doc.root)
    if root is None:  # only possible for an invalid, probabilistic root
        return doc
    return PDocument(root, doc.events, doc.ordered)
