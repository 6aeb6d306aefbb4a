"""Candidate matches of W in D and the explicit-matches probability algorithms.

A candidate match maps every W-node to a regular D-node with the same label,
roots to roots, such that each W-edge becomes a descending D-path through
probabilistic nodes only. A match is *realized* when the regular nodes kept
in D are exactly its image. Two matches with the same image describe the
same realization, so the probability sums below count each image once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .algorithms import prob_ordered_local
from .errors import TooManyMatches, UnsupportedClass
from .model import (
    LOCAL_KINDS,
    SYNTHETIC_PREFIX,
    Kind,
    PDocument,
    PEdge,
    PNode,
    XDocument,
    XNode,
    classify,
    evaluate_formula,
)

CandidateMatch = dict  # W-node id -> D-node id

DEFAULT_MATCH_CAP = 100_000


def regular_frontier(n: PNode) -> list[PNode]:
    """Regular descendants of ``n`` reachable through probabilistic nodes only."""
    out = []
    stack = list(reversed(n.children))
    while stack:
        x = stack.pop()
        if x.is_regular:
            out.append(x)
        else:
            stack.extend(reversed(x.children))
    return out


def enumerate_matches(d: PDocument, w: XDocument, cap: int = DEFAULT_MATCH_CAP) -> list[CandidateMatch]:
    """All candidate matches, by backtracking over W in preorder."""
    if d.root.label != w.root.label:
        return []
    frontier_cache: dict[int, list[PNode]] = {}

    def frontier(n: PNode) -> list[PNode]:
        if n.id not in frontier_cache:
            frontier_cache[n.id] = regular_frontier(n)
        return frontier_cache[n.id]

    order = list(w.nodes())[1:]
    parent = w.parent_of
    results: list[CandidateMatch] = []
    f = {w.root.id: d.root}
    used = {d.root.id}

    def extend(k: int) -> None:
        if k == len(order):
            if len(results) >= cap:
                raise TooManyMatches(cap)
            results.append({wid: dn.id for wid, dn in f.items()})
            return
        wn = order[k]
        for cand in frontier(f[parent[wn.id].id]):
            if cand.id in used or cand.label != wn.label:
                continue
            if len(frontier(cand)) < len(wn.children):
                continue
            f[wn.id] = cand
            used.add(cand.id)
            extend(k + 1)
            used.discard(cand.id)
            del f[wn.id]

    extend(0)
    return results


def is_candidate_match(d: PDocument, w: XDocument, f: CandidateMatch) -> bool:
    if set(f) != set(w.by_id) or len(set(f.values())) != len(f):
        return False
    if f[w.root.id] != d.root.id:
        return False
    for wn in w.nodes():
        dn = d.by_id.get(f[wn.id])
        if dn is None or not dn.is_regular or dn.label != wn.label:
            return False
        reach = {x.id for x in regular_frontier(dn)}
        if any(f[c.id] not in reach for c in wn.children):
            return False
    return True


def filter_matches_order(d: PDocument, w: XDocument, ms):
    """Drop matches that send W-siblings to D-nodes out of document order."""
    if not (d.ordered and w.ordered):
        return list(ms)
    rank = d.preorder_rank
    kept = []
    for f in ms:
        ok = all(
            rank[f[a.id]] < rank[f[b.id]]
            for wn in w.nodes()
            for a, b in zip(wn.children, wn.children[1:])
        )
        if ok:
            kept.append(f)
    return kept


def _distinct_images(ms):
    seen = set()
    for f in ms:
        image = frozenset(f.values())
        if image not in seen:
            seen.add(image)
            yield f


# ---------------------------------------------------------------------------
# Local models


def _relabel(n: PNode, names: dict[int, str]) -> PNode:
    label = names.get(n.id, n.label) if n.is_regular else None
    edges = tuple(PEdge(_relabel(e.child, names), e.annotation) for e in n.edges)
    return PNode(n.kind, label, edges)


def _match_probability_local(d: PDocument, w: XDocument, f: CandidateMatch) -> Fraction:
    names = {did: f"{SYNTHETIC_PREFIX}{wid}" for wid, did in f.items()}
    d2 = PDocument(_relabel(d.root, names), d.events, ordered=True)
    rank = d.preorder_rank

    def build(wn: XNode) -> XNode:
        kids = wn.children
        if not w.ordered:
            kids = sorted(kids, key=lambda c: rank[f[c.id]])
        return XNode(f"{SYNTHETIC_PREFIX}{wn.id}", tuple(build(c) for c in kids))

    return prob_ordered_local(d2, XDocument(build(w.root), ordered=True))


def prob_explicit_local(d: PDocument, w: XDocument, ms) -> Fraction:
    """Sum over the supplied matches of the probability each one is realized."""
    profile = classify(d)
    if not profile.within(LOCAL_KINDS):
        raise UnsupportedClass("explicit-matches local algorithm needs mux/ind/det only")
    ms = filter_matches_order(d, w, ms)
    return sum((_match_probability_local(d, w, f) for f in _distinct_images(ms)), Fraction(0))


def condition_on_valuation(d: PDocument, valuation: dict[str, str]) -> PDocument:
    """Fix the global events: cie/fie/mie nodes become det nodes over the edges kept.

    Node ids of surviving nodes are preserved, so matches stay meaningful.
    """

    def walk(n: PNode) -> PNode:
        if n.kind in (Kind.CIE, Kind.FIE, Kind.MIE):
            edges = []
            for e in n.edges:
                if n.kind is Kind.MIE:
                    keep = valuation[e.annotation.event] == e.annotation.value
                else:
                    keep = evaluate_formula(e.annotation, valuation)
                if keep:
                    edges.append(PEdge(walk(e.child)))
            return PNode(Kind.DET, None, tuple(edges), n.id)
        return PNode(n.kind, n.label, tuple(PEdge(walk(e.child), e.annotation) for e in n.edges), n.id)

    return PDocument(walk(d.root), (), d.ordered)


def prob_explicit_conditioned(d: PDocument, w: XDocument, ms) -> Fraction:
    """Explicit-matches local algorithm for documents that also use global events.

    Sums over event valuations (exponential in the number of events only) the
    local explicit-matches probability of the conditioned document.
    """
    classify(d)
    events = list(d.events)
    total = Fraction(0)
    for vals in itertools.product(*(ev.outcomes for ev in events)):
        p = Fraction(1)
        for _, q in vals:
            p *= q
        valuation = {ev.name: v for ev, (v, _) in zip(events, vals)}
        dc = condition_on_valuation(d, valuation)
        alive = dc.by_id
        live = [f for f in ms if all(did in alive for did in f.values())]
        if live:
            total += p * prob_explicit_local(dc, w, live)
    return total


# ---------------------------------------------------------------------------
# mie


@dataclass(frozen=True)
class MatchConstraint:
    """Atoms (event, value, polarity) with polarity ``"eq"`` or ``"neq"``."""

    atoms: tuple[tuple[str, str, str], ...]
    infeasible: bool = False


def _require_mie(d: PDocument) -> None:
    if not classify(d).within({"mie"}):
        raise UnsupportedClass("mie algorithm needs a document with mie nodes only")


def match_constraint_mie(d: PDocument, f: CandidateMatch) -> MatchConstraint:
    """The conjunction of atoms that holds exactly when ``f`` is realized."""
    _require_mie(d)
    image = set(f.values())
    atoms: list[tuple[str, str, str]] = []
    if d.root.id not in image:
        return MatchConstraint((), True)
    stack = [d.root]
    while stack:
        n = stack.pop()
        for c in n.children:
            if c.is_regular:
                if c.id not in image:
                    # a kept regular parent always keeps its regular children
                    return MatchConstraint(tuple(atoms), True)
                stack.append(c)
                continue
            # mie child of a kept regular node; mie nodes never nest
            for e in c.edges:
                a = e.annotation
                if e.child.id in image:
                    atoms.append((a.event, a.value, "eq"))
                    stack.append(e.child)
                else:
                    atoms.append((a.event, a.value, "neq"))
    return MatchConstraint(tuple(atoms))


def constraint_probability(d: PDocument, c: MatchConstraint) -> Fraction:
    if c.infeasible:
        return Fraction(0)
    grouped: dict[str, list[tuple[str, str]]] = {}
    for event, value, pol in c.atoms:
        grouped.setdefault(event, []).append((value, pol))
    p = Fraction(1)
    for event, atoms in grouped.items():
        ok = Fraction(0)
        for value, q in d.events[event].outcomes:
            if all((value == x) == (pol == "eq") for x, pol in atoms):
                ok += q
        p *= ok
        if not p:
            break
    return p


def prob_explicit_mie(d: PDocument, w: XDocument, ms) -> Fraction:
    _require_mie(d)
    ms = filter_matches_order(d, w, ms)
    return sum(
        (constraint_probability(d, match_constraint_mie(d, f)) for f in _distinct_images(ms)),
        Fraction(0),
    )
