"""Random small documents and candidate worlds for oracle-equivalence checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .model import (
    And,
    Conj,
    Event,
    Kind,
    Lit,
    MieAtom,
    Not,
    Or,
    PDocument,
    PEdge,
    PNode,
    XDocument,
    XNode,
)
from .oracle import count_configurations

IND_PROBS = [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4), Fraction(3, 4)]
MUX_PIECES = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 6)]
EVENT_PROBS = [Fraction(1, 2), Fraction(1, 3), Fraction(9, 10)]


def _mux_probs(rng: random.Random, k: int) -> list[Fraction]:
    while True:
        probs = [rng.choice(MUX_PIECES) for _ in range(k)]
        if k and rng.random() < 0.3:
            rest = 1 - sum(probs[:-1])
            if 0 < rest < 1:
                probs[-1] = rest
        if sum(probs) <= 1:
            return probs


def _random_events(rng: random.Random, kinds, max_events: int) -> list[Event]:
    if not kinds & {"cie", "fie", "mie"}:
        return []
    events = []
    for i in range(rng.randint(1, max_events)):
        if "mie" in kinds and rng.random() < 0.5:
            k = rng.randint(2, 3)
            weights = [rng.randint(1, 3) for _ in range(k)]
            total = sum(weights)
            events.append(Event.enum(f"m{i}", [(f"v{j}", Fraction(wt, total)) for j, wt in enumerate(weights)]))
        else:
            events.append(Event.bool(f"e{i}", rng.choice(EVENT_PROBS)))
    return events


def _random_formula(rng, bool_events, depth=0):
    if depth >= 2 or rng.random() < 0.4:
        return Lit(rng.choice(bool_events), rng.random() < 0.6)
    op = rng.choice(["and", "or", "not"])
    if op == "not":
        inner = _random_formula(rng, bool_events, depth + 1)
        return inner if isinstance(inner, Lit) else Not(inner)
    items = tuple(_random_formula(rng, bool_events, depth + 1) for _ in range(rng.randint(1, 2)))
    return And(items) if op == "and" else Or(items)


def random_pdoc(
    rng: random.Random,
    kinds=("mux", "ind", "det"),
    *,
    ordered: bool = False,
    max_prob_nodes: int = 8,
    max_events: int = 3,
    labels: str = "abc",
    max_depth: int = 4,
    max_children: int = 3,
    no_ind_under_mux: bool = False,
    max_configs: int = 512,
) -> PDocument:
    """Random valid document whose probabilistic nodes are drawn from ``kinds``."""
    kinds = frozenset(kinds)
    while True:
        events = _random_events(rng, kinds, max_events)
        bool_events = [e.name for e in events if e.boolean]
        allowed = set(kinds)
        if not bool_events:
            allowed -= {"cie", "fie"}
        budget = [max_prob_nodes]

        def annotation(kind):
            if kind == "cie":
                return Conj(tuple(Lit(rng.choice(bool_events), rng.random() < 0.6) for _ in range(rng.randint(0, 2))))
            if kind == "fie":
                return _random_formula(rng, bool_events)
            if kind == "mie":
                ev = rng.choice(events)
                return MieAtom(ev.name, rng.choice(ev.values))
            return None

        def make(depth: int, parent: str, under_mie: bool) -> PNode:
            options = set(allowed)
            if under_mie:
                options.discard("mie")
            if no_ind_under_mux and parent == "mux":
                options.discard("ind")
            probabilistic = (
                depth < max_depth - 1 and budget[0] > 0 and options and rng.random() < 0.45
            )
            if not probabilistic:
                n_kids = 0 if depth >= max_depth - 1 else rng.randint(0, max_children)
                kids = tuple(PEdge(make(depth + 1, "node", False)) for _ in range(n_kids))
                return PNode(Kind.REGULAR, rng.choice(labels), kids)
            kind = rng.choice(sorted(options))
            budget[0] -= 1
            k = rng.randint(1, max_children)
            child_under = under_mie or kind == "mie"
            kids = [make(depth + 1, kind, child_under) for _ in range(k)]
            if kind == "ind":
                anns = [rng.choice(IND_PROBS) for _ in kids]
            elif kind == "mux":
                anns = _mux_probs(rng, k)
            else:
                anns = [annotation(kind) for _ in kids]
            return PNode(Kind(kind), None, tuple(PEdge(c, a) for c, a in zip(kids, anns)))

        n_kids = rng.randint(1, max_children)
        root = PNode(Kind.REGULAR, rng.choice(labels),
                     tuple(PEdge(make(1, "node", False)) for _ in range(n_kids)))
        doc = PDocument(root, events, ordered)
        if count_configurations(doc) <= max_configs:
            return doc


def random_xtree(rng: random.Random, labels: str = "abc", max_depth: int = 3, max_children: int = 3) -> XNode:
    def make(depth):
        n = 0 if depth >= max_depth - 1 else rng.randint(0, max_children)
        return XNode(rng.choice(labels), tuple(make(depth + 1) for _ in range(n)))

    return make(0)


def _nodes_with_paths(root: XNode):
    out = []
    stack = [(root, ())]
    while stack:
        n, path = stack.pop()
        out.append((n, path))
        stack.extend((c, path + (i,)) for i, c in enumerate(n.children))
    return out


def _replace_at(root: XNode, path, new: XNode | None) -> XNode:
    if not path:
        return new
    i = path[0]
    kids = list(root.children)
    sub = _replace_at(kids[i], path[1:], new)
    if sub is None:
        del kids[i]
    else:
        kids[i] = sub
    return XNode(root.label, tuple(kids))


def perturb(rng: random.Random, tree: XNode, labels: str = "abc") -> XNode:
    """A small random edit: relabel, add a leaf, drop a subtree, duplicate or swap siblings."""
    nodes = _nodes_with_paths(tree)
    n, path = rng.choice(nodes)
    op = rng.choice(["relabel", "add", "drop", "dup", "swap"])
    if op == "relabel":
        return _replace_at(tree, path, XNode(rng.choice(labels), n.children))
    if op == "add":
        kids = list(n.children)
        kids.insert(rng.randint(0, len(kids)), XNode(rng.choice(labels)))
        return _replace_at(tree, path, XNode(n.label, tuple(kids)))
    if op == "drop" and path:
        return _replace_at(tree, path, None)
    if op == "dup" and n.children:
        kids = list(n.children)
        kids.append(rng.choice(kids))
        return _replace_at(tree, path, XNode(n.label, tuple(kids)))
    if len(n.children) >= 2:
        kids = list(n.children)
        i, j = rng.sample(range(len(kids)), 2)
        kids[i], kids[j] = kids[j], kids[i]
        return _replace_at(tree, path, XNode(n.label, tuple(kids)))
    kids = n.children + (XNode(rng.choice(labels)),)
    return _replace_at(tree, path, XNode(n.label, kids))


def candidate_worlds(rng: random.Random, doc: PDocument, dist, k: int = 5) -> list[XDocument]:
    """``k`` worlds mixing support members of ``dist`` and perturbations of them."""
    support = [w.root for w in dist.worlds.values()]
    out = []
    for i in range(k):
        base = rng.choice(support)
        tree = base if i % 2 == 0 else perturb(rng, base)
        out.append(XDocument(tree, doc.ordered))
    return out
