"""Exponential ground truth: enumerate every joint outcome of a document.

A configuration fixes the value of every global event, the keep/drop choice
on every ind edge and the branch taken by every mux node. Its probability is
the product of those independent choices. Everything here is exact.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import IncompleteConfiguration, TooManyConfigurations
from .model import (
    Kind,
    PDocument,
    XDocument,
    XNode,
    evaluate_formula,
    require_valid,
)

DEFAULT_CAP = 2**24


def default_cap() -> int:
    env = os.environ.get("PRXML_CAP")
    return int(env) if env else DEFAULT_CAP


@dataclass(frozen=True)
class Configuration:
    valuation: dict[str, str]
    ind_choices: dict[tuple[int, int], bool] = field(default_factory=dict)
    mux_choices: dict[int, int | None] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Tree comparison


def canonical(tree, ordered: bool) -> str:
    """Canonical string of an XNode tree; sibling order is erased when unordered."""
    if isinstance(tree, XDocument):
        tree = tree.root
    kids = [canonical(c, ordered) for c in tree.children]
    if not ordered:
        kids.sort()
    return json.dumps(tree.label, ensure_ascii=False) + "(" + ",".join(kids) + ")"


def _same_ordered(a: XNode, b: XNode) -> bool:
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x.label != y.label or len(x.children) != len(y.children):
            return False
        stack.extend(zip(x.children, y.children))
    return True


def trees_equal(a, b, ordered: bool) -> bool:
    if isinstance(a, XDocument):
        a = a.root
    if isinstance(b, XDocument):
        b = b.root
    if ordered:
        return _same_ordered(a, b)
    return canonical(a, False) == canonical(b, False)


# ---------------------------------------------------------------------------
# Configurations


def _choice_points(doc: PDocument):
    ind_edges = []
    mux_nodes = []
    for n in doc.nodes():
        if n.kind is Kind.IND:
            ind_edges.extend((n.id, i) for i in range(len(n.edges)))
        elif n.kind is Kind.MUX:
            mux_nodes.append(n)
    return ind_edges, mux_nodes


def _mux_branches(n):
    """(choice, probability) pairs of a mux node, residual last as ``None``."""
    branches = [(i, e.annotation) for i, e in enumerate(n.edges)]
    residual = 1 - sum((e.annotation for e in n.edges), Fraction(0))
    if residual > 0:
        branches.append((None, residual))
    return branches


def count_configurations(doc: PDocument) -> int:
    ind_edges, mux_nodes = _choice_points(doc)
    count = 2 ** len(ind_edges)
    for ev in doc.events:
        count *= len(ev.outcomes)
    for n in mux_nodes:
        count *= len(_mux_branches(n))
    return count


def enumerate_configurations(doc: PDocument, cap: int | None = None) -> Iterator[tuple[Configuration, Fraction]]:
    """Yield every configuration with its probability (all strictly positive)."""
    require_valid(doc)
    cap = default_cap() if cap is None else cap
    count = count_configurations(doc)
    if count > cap:
        raise TooManyConfigurations(count, cap)
    ind_edges, mux_nodes = _choice_points(doc)
    by_id = doc.by_id
    ind_probs = [by_id[nid].edges[i].annotation for nid, i in ind_edges]
    events = list(doc.events)
    event_axes = [ev.outcomes for ev in events]
    mux_axes = [_mux_branches(n) for n in mux_nodes]
    for vals in itertools.product(*event_axes):
        p_val = Fraction(1)
        for _, q in vals:
            p_val *= q
        valuation = {ev.name: v for ev, (v, _) in zip(events, vals)}
        for branches in itertools.product(*mux_axes):
            p_mux = p_val
            for _, q in branches:
                p_mux *= q
            mux_choices = {n.id: c for n, (c, _) in zip(mux_nodes, branches)}
            for keeps in itertools.product((True, False), repeat=len(ind_edges)):
                p = p_mux
                for keep, q in zip(keeps, ind_probs):
                    p *= q if keep else 1 - q
                yield Configuration(valuation, dict(zip(ind_edges, keeps)), mux_choices), p


def configuration_probability(doc: PDocument, cfg: Configuration) -> Fraction:
    p = Fraction(1)
    for ev in doc.events:
        p *= ev.probability(cfg.valuation[ev.name])
    for n in doc.nodes():
        if n.kind is Kind.IND:
            for i, e in enumerate(n.edges):
                p *= e.annotation if cfg.ind_choices[(n.id, i)] else 1 - e.annotation
        elif n.kind is Kind.MUX:
            choice = cfg.mux_choices[n.id]
            p *= dict(_mux_branches(n)).get(choice, Fraction(0))
    return p


# ---------------------------------------------------------------------------
# Evaluation


def _keeps(n, i, e, cfg: Configuration) -> bool:
    kind = n.kind
    if kind is Kind.REGULAR or kind is Kind.DET:
        return True
    try:
        if kind is Kind.IND:
            return cfg.ind_choices[(n.id, i)]
        if kind is Kind.MUX:
            return cfg.mux_choices[n.id] == i
        if kind is Kind.MIE:
            return cfg.valuation[e.annotation.event] == e.annotation.value
        return evaluate_formula(e.annotation, cfg.valuation)
    except KeyError as missing:
        raise IncompleteConfiguration(f"configuration does not cover {missing}") from None


def _evaluate(n, cfg: Configuration) -> list[XNode]:
    """Forest produced by node ``n`` under ``cfg``."""
    kept = []
    for i, e in enumerate(n.edges):
        if _keeps(n, i, e, cfg):
            kept.extend(_evaluate(e.child, cfg))
    if n.kind is Kind.REGULAR:
        return [XNode(n.label, tuple(kept))]
    return kept


def apply_configuration(doc: PDocument, cfg: Configuration) -> XDocument:
    missing = [ev.name for ev in doc.events if ev.name not in cfg.valuation]
    if missing:
        raise IncompleteConfiguration(f"no value for events {missing}")
    (root,) = _evaluate(doc.root, cfg)
    return XDocument(root, doc.ordered)


def check_configuration_yields(doc: PDocument, cfg: Configuration, w: XDocument) -> bool:
    """Polynomial-time certificate check: does ``cfg`` produce exactly ``w``?"""
    return trees_equal(apply_configuration(doc, cfg), w, doc.ordered)


# ---------------------------------------------------------------------------
# Distributions


class WorldDistribution:
    """Exact distribution over canonical trees, with a representative tree per key."""

    def __init__(self, ordered: bool):
        self.ordered = ordered
        self.probs: dict[str, Fraction] = {}
        self.worlds: dict[str, XDocument] = {}

    def add(self, world: XDocument, p: Fraction) -> None:
        key = canonical(world.root, self.ordered)
        if key not in self.probs:
            self.probs[key] = Fraction(0)
            self.worlds[key] = world
        self.probs[key] += p

    def probability(self, world) -> Fraction:
        return self.probs.get(canonical(world, self.ordered), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def items(self):
        return self.probs.items()

    def __getitem__(self, key: str) -> Fraction:
        return self.probs[key]

    def __contains__(self, key) -> bool:
        return key in self.probs

    def __len__(self) -> int:
        return len(self.probs)

    def __eq__(self, other) -> bool:
        return isinstance(other, WorldDistribution) and self.ordered == other.ordered and self.probs == other.probs


def enumerate_worlds(doc: PDocument, cap: int | None = None) -> WorldDistribution:
    dist = WorldDistribution(doc.ordered)
    for cfg, p in enumerate_configurations(doc, cap):
        dist.add(apply_configuration(doc, cfg), p)
    return dist


def world_probability_bf(doc: PDocument, w: XDocument, cap: int | None = None) -> Fraction:
    target = canonical(w, doc.ordered)
    total = Fraction(0)
    for cfg, p in enumerate_configurations(doc, cap):
        if canonical(apply_configuration(doc, cfg).root, doc.ordered) == target:
            total += p
    return total


def find_witness(doc: PDocument, w: XDocument, cap: int | None = None) -> Configuration | None:
    """A configuration yielding ``w``, or None when ``w`` is not a possible world."""
    for cfg, _ in enumerate_configurations(doc, cap):
        if check_configuration_yields(doc, cfg, w):
            return cfg
    return None
