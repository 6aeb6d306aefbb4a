"""Distribution-preserving rewritings: mux flattening, mux to mie, mie to cie."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidDistribution, UnsupportedClass
from .model import (
    Conj,
    Event,
    EventTable,
    Kind,
    Lit,
    MieAtom,
    PDocument,
    PEdge,
    PNode,
    classify,
)

RESIDUAL_VALUE = "vnone"


def _require(d: PDocument, kinds, what: str) -> None:
    if not classify(d).within(kinds):
        raise UnsupportedClass(f"{what} expects a document using only {sorted(kinds)}")


# ---------------------------------------------------------------------------
# mux hierarchies


def _flatten(n: PNode) -> PNode:
    edges = [PEdge(_flatten(e.child), e.annotation) for e in n.edges]
    if n.kind is Kind.MUX:
        absorbed = []
        for e in edges:
            if e.child.kind is Kind.MUX:
                absorbed.extend(PEdge(g.child, e.annotation * g.annotation) for g in e.child.edges)
            else:
                absorbed.append(e)
        edges = absorbed
    return PNode(n.kind, n.label, tuple(edges))


def flatten_mux(d: PDocument) -> PDocument:
    """Merge every mux child of a mux node into its parent, keeping branch order."""
    _require(d, {"mux"}, "flatten_mux")
    return PDocument(_flatten(d.root), d.events, d.ordered)


def mux_to_mie(d: PDocument) -> PDocument:
    """One fresh multivalued event per (flattened) mux node."""
    d = flatten_mux(d)
    events: list[Event] = []

    def walk(n: PNode) -> PNode:
        edges = tuple(PEdge(walk(e.child), e.annotation) for e in n.edges)
        if n.kind is not Kind.MUX:
            return PNode(n.kind, n.label, edges)
        name = f"mux{len(events) + 1}"
        outcomes = [(f"v{i + 1}", e.annotation) for i, e in enumerate(edges)]
        residual = 1 - sum((e.annotation for e in edges), Fraction(0))
        if residual > 0:
            outcomes.append((RESIDUAL_VALUE, residual))
        events.append(Event(name, tuple(outcomes)))
        mie_edges = tuple(PEdge(e.child, MieAtom(name, f"v{i + 1}")) for i, e in enumerate(edges))
        return PNode(Kind.MIE, None, mie_edges)

    root = walk(d.root)
    return PDocument(root, EventTable(events), d.ordered)


# ---------------------------------------------------------------------------
# Multivalued events as Boolean decision trees


@dataclass(frozen=True)
class Leaf:
    value: str
    probability: Fraction


@dataclass(frozen=True)
class Split:
    """Boolean event ``event`` is true (probability ``p_true``) on the left branch."""

    event: str
    p_true: Fraction
    left: "Leaf | Split"
    right: "Leaf | Split"


DecisionTree = "Leaf | Split"


def event_decision_tree(outcomes, prefix: str = "b") -> "Leaf | Split":
    """Count-balanced binary decision tree over ``outcomes``.

    Internal nodes are numbered in preorder and named ``{prefix}{k}``.
    """
    outcomes = [(v, Fraction(q)) for v, q in outcomes]
    if not outcomes:
        raise InvalidDistribution("an event needs at least one outcome")
    if any(not (0 < q <= 1) for _, q in outcomes) or sum(q for _, q in outcomes) != 1:
        raise InvalidDistribution("outcome probabilities must lie in (0,1] and sum to 1")
    counter = [0]

    def build(items) -> "Leaf | Split":
        if len(items) == 1:
            return Leaf(*items[0])
        counter[0] += 1
        name = f"{prefix}{counter[0]}"
        mid = len(items) // 2
        left_mass = sum(q for _, q in items[:mid])
        total = sum(q for _, q in items)
        return Split(name, left_mass / total, build(items[:mid]), build(items[mid:]))

    return build(outcomes)


def decision_paths(tree) -> dict[str, tuple[Lit, ...]]:
    """Outcome value -> conjunction of literals selecting its leaf."""
    out: dict[str, tuple[Lit, ...]] = {}
    stack = [(tree, ())]
    while stack:
        t, path = stack.pop()
        if isinstance(t, Leaf):
            out[t.value] = path
        else:
            stack.append((t.right, path + (Lit(t.event, False),)))
            stack.append((t.left, path + (Lit(t.event, True),)))
    return out


def decision_events(tree) -> list[Split]:
    out = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Split):
            out.append(t)
            stack.append(t.right)
            stack.append(t.left)
    return out


def leaf_probabilities(tree) -> dict[str, Fraction]:
    out = {}
    stack = [(tree, Fraction(1))]
    while stack:
        t, p = stack.pop()
        if isinstance(t, Leaf):
            out[t.value] = p
        else:
            stack.append((t.left, p * t.p_true))
            stack.append((t.right, p * (1 - t.p_true)))
    return out


def mie_to_cie(d: PDocument) -> PDocument:
    """Encode each multivalued event with fresh Boolean events ``{event}.bK``.

    Boolean events that keep both outcomes are reused as they are.
    """
    _require(d, {"mie"}, "mie_to_cie")
    encodings: dict[str, dict[str, tuple[Lit, ...]]] = {}
    new_events: list[Event] = []
    for ev in d.events:
        if ev.boolean and len(ev.outcomes) == 2:
            encodings[ev.name] = {"t": (Lit(ev.name, True),), "f": (Lit(ev.name, False),)}
            new_events.append(ev)
            continue
        tree = event_decision_tree(ev.outcomes, prefix=f"{ev.name}.b")
        encodings[ev.name] = decision_paths(tree)
        new_events.extend(Event.bool(s.event, s.p_true) for s in decision_events(tree))
    names = [e.name for e in new_events]
    if len(set(names)) != len(names):
        raise InvalidDistribution(f"fresh event names collide: {sorted(names)}")

    def walk(n: PNode) -> PNode:
        kids = [walk(e.child) for e in n.edges]
        if n.kind is not Kind.MIE:
            return PNode(n.kind, n.label, tuple(PEdge(k, e.annotation) for k, e in zip(kids, n.edges)))
        edges = []
        for k, e in zip(kids, n.edges):
            lits = encodings[e.annotation.event].get(e.annotation.value)
            if lits is None:
                continue  # zero-probability outcome: the edge never fires
            edges.append(PEdge(k, Conj(lits)))
        return PNode(Kind.CIE, None, tuple(edges))

    return PDocument(walk(d.root), EventTable(new_events), d.ordered)
