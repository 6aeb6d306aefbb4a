"""Polynomial algorithms for local models (mux, ind, det).

``prob_ordered_local`` computes D(W) exactly on ordered documents with a
dynamic program over (D-node, W-subtree class, span of W-siblings).
``poss_unordered_single`` decides D(W) > 0 on unordered documents with mux
and ind nodes, provided no ind node hangs directly below a mux node, by
bottom-up perfect-matching tests.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionViolated, UnsupportedClass
from .matching import BipartiteGraph, bipartite_perfect_matching
from .model import (
    LOCAL_KINDS,
    Kind,
    PDocument,
    PNode,
    XDocument,
    XNode,
    classify,
    strip_probabilistic_leaves,
)

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Isomorphism classes of an ordered tree


@dataclass(frozen=True)
class IsoClasses:
    class_of: dict[int, int]
    classes: list[tuple[str, tuple[int, ...]]]
    accepting: int

    def __len__(self) -> int:
        return len(self.classes)


def iso_classes(w: XDocument) -> IsoClasses:
    """Hash-cons the subtrees of ``w``: equal ordered subtrees share a class id."""
    table: dict[tuple[str, tuple[int, ...]], int] = {}
    classes: list[tuple[str, tuple[int, ...]]] = []
    class_of: dict[int, int] = {}
    # postorder via reversed preorder of (node, children-first) traversal
    order = []
    stack = [(w.root, False)]
    while stack:
        n, done = stack.pop()
        if done:
            order.append(n)
            continue
        stack.append((n, True))
        stack.extend((c, False) for c in reversed(n.children))
    for n in order:
        key = (n.label, tuple(class_of[c.id] for c in n.children))
        if key not in table:
            table[key] = len(classes)
            classes.append(key)
        class_of[n.id] = table[key]
    return IsoClasses(class_of, classes, class_of[w.root.id])


# ---------------------------------------------------------------------------
# Ordered counting


class _OrderedDP:
    """F(n, c, i) = {j: P(n yields exactly children i..j-1 of class c)}."""

    def __init__(self, classes: IsoClasses):
        self.classes = classes.classes
        self.rows: dict[tuple[int, int, int], dict[int, Fraction]] = {}
        self.trees: dict[tuple[int, int], Fraction] = {}

    def tree(self, n: PNode, cls: int) -> Fraction:
        """Probability that regular node ``n`` yields exactly a tree of class ``cls``."""
        key = (n.id, cls)
        hit = self.trees.get(key)
        if hit is not None:
            return hit
        label, kids = self.classes[cls]
        if label != n.label:
            value = ZERO
        else:
            value = self.sequence([(e.child, None) for e in n.edges], cls, 0).get(len(kids), ZERO)
        self.trees[key] = value
        return value

    def sequence(self, parts, cls: int, start: int) -> dict[int, Fraction]:
        """Compose D-siblings left to right; ``parts`` holds (node, keep prob or None)."""
        cur = {start: ONE}
        for child, p in parts:
            nxt: dict[int, Fraction] = defaultdict(Fraction)
            for a, va in cur.items():
                if p is not None:
                    nxt[a] += va * (1 - p)
                    scale = va * p
                else:
                    scale = va
                for b, vb in self.row(child, cls, a).items():
                    nxt[b] += scale * vb
            cur = {k: v for k, v in nxt.items() if v}
            if not cur:
                break
        return cur

    def row(self, n: PNode, cls: int, i: int) -> dict[int, Fraction]:
        key = (n.id, cls, i)
        hit = self.rows.get(key)
        if hit is not None:
            return hit
        kids = self.classes[cls][1]
        kind = n.kind
        if kind is Kind.REGULAR:
            out = {}
            if i < len(kids):
                t = self.tree(n, kids[i])
                if t:
                    out[i + 1] = t
        elif kind is Kind.DET:
            out = self.sequence([(e.child, None) for e in n.edges], cls, i)
        elif kind is Kind.IND:
            out = self.sequence([(e.child, e.annotation) for e in n.edges], cls, i)
        elif kind is Kind.MUX:
            acc: dict[int, Fraction] = defaultdict(Fraction)
            residual = ONE
            for e in n.edges:
                residual -= e.annotation
                for j, v in self.row(e.child, cls, i).items():
                    acc[j] += e.annotation * v
            if residual:
                acc[i] += residual
            out = {k: v for k, v in acc.items() if v}
        else:
            raise UnsupportedClass(f"{kind.value} nodes are not local")
        self.rows[key] = out
        return out


def _require_local(doc: PDocument) -> None:
    profile = classify(doc)
    if not profile.within(LOCAL_KINDS):
        extra = ", ".join(sorted(profile.used - LOCAL_KINDS))
        raise UnsupportedClass(f"ordered local algorithm cannot handle {extra}")


def prob_ordered_local(d: PDocument, w: XDocument) -> Fraction:
    """Exact D(W) for ordered documents using only mux, ind and det nodes."""
    _require_local(d)
    if not (d.ordered and w.ordered):
        raise PreconditionViolated("prob_ordered_local needs ordered D and W")
    classes = iso_classes(w)
    return _OrderedDP(classes).tree(d.root, classes.accepting)


# ---------------------------------------------------------------------------
# Unordered decision


def empty_table(d: PDocument) -> dict[int, bool]:
    """e(n) for every non-ind node: can the subtree at ``n`` produce nothing?"""
    e: dict[int, bool] = {}

    def visit(n: PNode) -> None:
        for c in n.children:
            visit(c)
        if n.kind is Kind.REGULAR:
            e[n.id] = False
        elif n.kind is Kind.MUX:
            total = sum((x.annotation for x in n.edges), ZERO)
            e[n.id] = total < 1 or any(e.get(c.id, False) for c in n.children)

    visit(d.root)
    return e


def _frontier(n: PNode):
    """Topmost non-ind descendants of ``n``, with whether an ind node was crossed."""
    out = []
    stack = [(e.child, False) for e in reversed(n.edges)]
    while stack:
        x, via_ind = stack.pop()
        if x.kind is Kind.IND:
            stack.extend((e.child, True) for e in reversed(x.edges))
        else:
            out.append((x, via_ind))
    return out


class _UnorderedDecision:
    def __init__(self, d: PDocument):
        self.empty = empty_table(d)
        self.memo: dict[tuple[int, int], bool] = {}

    def can_match(self, n: PNode, w: XNode) -> bool:
        """c(n, w): is the subtree of W at ``w`` a possible world of the subtree at ``n``?"""
        key = (n.id, w.id)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if n.kind is Kind.MUX:
            value = any(self.can_match(c, w) for c in n.children)
        elif n.label != w.label:
            value = False
        else:
            value = self._children_match(n, w)
        self.memo[key] = value
        return value

    def _children_match(self, n: PNode, w: XNode) -> bool:
        front = _frontier(n)
        targets = w.children
        if len(front) < len(targets):
            return False
        optional = [via_ind or self.empty[x.id] for x, via_ind in front]
        n_dummies = len(front) - len(targets)
        edges = []
        for u, (x, _) in enumerate(front):
            for v, t in enumerate(targets):
                if self.can_match(x, t):
                    edges.append((u, v))
            if optional[u]:
                edges.extend((u, len(targets) + k) for k in range(n_dummies))
        g = BipartiteGraph(len(front), len(front), edges)
        return bipartite_perfect_matching(g)


def poss_unordered_single(d: PDocument, w: XDocument, relaxed: bool = False) -> bool:
    """Decide whether ``w`` is a possible world of an unordered ind-only or mux-only ``d``.

    With ``relaxed=True`` any mix of mux and ind nodes is accepted as long as
    no ind node is a child of a mux node.
    """
    if d.ordered or w.ordered:
        raise PreconditionViolated("unordered decision needs unordered D and W")
    profile = classify(d)
    if relaxed:
        if not profile.within({"mux", "ind"}):
            raise UnsupportedClass("unordered decision handles mux and ind nodes only")
        if not profile.no_ind_under_mux:
            raise PreconditionViolated("an ind node is a child of a mux node")
    elif not (profile.within({"ind"}) or profile.within({"mux"})):
        raise UnsupportedClass("unordered decision needs an ind-only or mux-only document (see relaxed)")
    d = strip_probabilistic_leaves(d)
    return _UnorderedDecision(d).can_match(d.root, w.root)
