import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from prxml.algorithms import prob_ordered_local
from prxml.errors import TooManyMatches, UnsupportedClass
from prxml.gen import CnfFormula, ExactCoverInstance, gen_sat_cie, gen_xc_mie
from prxml.matches import (
    MatchConstraint,
    constraint_probability,
    enumerate_matches,
    filter_matches_order,
    is_candidate_match,
    match_constraint_mie,
    prob_explicit_conditioned,
    prob_explicit_local,
    prob_explicit_mie,
)
from prxml.model import Event, PDocument, XDocument, ind, mie, node, xnode
from prxml.oracle import enumerate_worlds, world_probability_bf
from prxml.randomdocs import candidate_worlds, random_pdoc


def two_b(ordered=False):
    d = PDocument(node("a", ind(("1/2", node("b")), ("1/2", node("b")))), ordered=ordered)
    return d, XDocument(xnode("a", xnode("b")), ordered)


def b_then_c(ordered=True):
    return PDocument(node("a", ind(("1/2", node("b")), ("1/2", node("c")))), ordered=ordered)


class TestEnumerate:
    def test_fig1_single_match(self, fig1, fig1_w1):
        ms = enumerate_matches(fig1, fig1_w1)
        assert len(ms) == 1
        assert is_candidate_match(fig1, fig1_w1, ms[0])

    def test_symmetric_images(self):
        d, w = two_b()
        ms = enumerate_matches(d, w)
        assert len(ms) == 2
        assert {m[1] for m in ms} == {n.id for n in d.nodes() if n.label == "b"}

    def test_sat_gadget_trivial_match(self):
        d, w = gen_sat_cie(CnfFormula(2, [(1, 2), (-1,)]))
        assert enumerate_matches(d, w) == [{0: 0}]

    def test_root_label_mismatch(self):
        d, _ = two_b()
        assert enumerate_matches(d, XDocument(xnode("z"))) == []

    def test_cap(self):
        d = PDocument(node("a", *(ind(("1/2", node("b"))) for _ in range(6))))
        w = XDocument(xnode("a", xnode("b"), xnode("b"), xnode("b")))
        assert len(enumerate_matches(d, w)) == 6 * 5 * 4
        with pytest.raises(TooManyMatches):
            enumerate_matches(d, w, cap=10)

    def test_labels_must_agree(self):
        d = PDocument(node("a", ind(("1/2", node("b")))))
        w = XDocument(xnode("a", xnode("c")))
        b_id = next(n.id for n in d.nodes() if n.label == "b")
        assert not is_candidate_match(d, w, {0: 0, 1: b_id})
        assert enumerate_matches(d, w) == []
        assert prob_explicit_local(d, w, enumerate_matches(d, w)) == 0

    def test_is_candidate_match_rejects(self):
        d, w = two_b()
        (f, _) = enumerate_matches(d, w)
        assert not is_candidate_match(d, w, {0: 0})
        ind_id = next(n.id for n in d.nodes() if not n.is_regular)
        assert not is_candidate_match(d, w, {0: 0, 1: ind_id})
        assert is_candidate_match(d, w, f)


class TestOrderFilter:
    def test_unordered_unchanged(self):
        d = b_then_c(ordered=False)
        w = XDocument(xnode("a", xnode("c"), xnode("b")), False)
        ms = enumerate_matches(d, w)
        assert filter_matches_order(d, w, ms) == ms

    def test_crossing_match_removed(self):
        d = b_then_c()
        w = XDocument(xnode("a", xnode("c"), xnode("b")), True)
        assert len(enumerate_matches(d, w)) == 1
        assert filter_matches_order(d, w, enumerate_matches(d, w)) == []

    def test_order_respecting_match_kept(self):
        d = b_then_c()
        w = XDocument(xnode("a", xnode("b"), xnode("c")), True)
        ms = enumerate_matches(d, w)
        assert filter_matches_order(d, w, ms) == ms


class TestExplicitLocal:
    def test_two_matches(self):
        d, w = two_b()
        assert prob_explicit_local(d, w, enumerate_matches(d, w)) == Fraction(1, 2)

    def test_single_match_equals_ordered_dp(self):
        d = b_then_c()
        w = XDocument(xnode("a", xnode("b"), xnode("c")), True)
        assert prob_explicit_local(d, w, enumerate_matches(d, w)) == prob_ordered_local(d, w) == Fraction(1, 4)

    def test_no_matches(self):
        d, w = two_b()
        assert prob_explicit_local(d, w, []) == 0

    def test_shared_image_counted_once(self):
        d = PDocument(node("a", node("b"), node("b")))
        w = XDocument(xnode("a", xnode("b"), xnode("b")))
        ms = enumerate_matches(d, w)
        assert len(ms) == 2
        assert prob_explicit_local(d, w, ms) == 1

    def test_rejects_global_events(self, fig1, fig1_w1):
        with pytest.raises(UnsupportedClass):
            prob_explicit_local(fig1, fig1_w1, enumerate_matches(fig1, fig1_w1))

    def test_fig1_by_conditioning(self, fig1, fig1_w1, fig1_root):
        assert prob_explicit_conditioned(fig1, fig1_w1, enumerate_matches(fig1, fig1_w1)) == Fraction(567, 1250)
        assert prob_explicit_conditioned(fig1, fig1_root, enumerate_matches(fig1, fig1_root)) == Fraction(3, 50)


class TestMie:
    def xc(self, sets, universe=()):
        return gen_xc_mie(ExactCoverInstance.from_sets(sets, universe))

    def test_constraint_for_first_copy(self):
        d, w = self.xc([["a"], ["a"]])
        first = min(n.id for n in d.nodes() if n.label == "a")
        c = match_constraint_mie(d, {0: 0, 1: first})
        assert sorted(c.atoms) == [("e1", "t", "eq"), ("e2", "t", "neq")]
        assert constraint_probability(d, c) == Fraction(1, 4)

    def test_omitted_regular_child_is_infeasible(self):
        d = PDocument(node("a", node("b"), mie((("e", "t"), node("c")))), [Event.bool("e", "1/2")])
        c = match_constraint_mie(d, {0: 0})
        assert c.infeasible
        assert constraint_probability(d, c) == 0

    def test_full_image_has_no_negative_atoms(self):
        d = PDocument(node("a", mie((("e", "t"), node("b")), (("e", "t"), node("c")))), [Event.bool("e", "1/2")])
        w = XDocument(xnode("a", xnode("b"), xnode("c")))
        (f,) = enumerate_matches(d, w)
        c = match_constraint_mie(d, f)
        assert all(pol == "eq" for _, _, pol in c.atoms)

    def test_two_singletons(self):
        d, w = self.xc([["a"], ["a"]])
        assert prob_explicit_mie(d, w, enumerate_matches(d, w)) == Fraction(1, 2)
        assert prob_explicit_mie(d, w, []) == 0

    def test_conflicting_atoms(self):
        d = PDocument(node("r"), [Event.enum("m", [("x", "1/2"), ("y", "1/2")])])
        c = MatchConstraint((("m", "x", "eq"), ("m", "y", "eq")))
        assert constraint_probability(d, c) == 0

    def test_rejects_other_kinds(self):
        d, w = two_b()
        with pytest.raises(UnsupportedClass):
            prob_explicit_mie(d, w, enumerate_matches(d, w))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_explicit_local_matches_oracle(seed):
    rng = random.Random(seed)
    d = random_pdoc(rng, ("mux", "ind", "det"), ordered=rng.random() < 0.5)
    dist = enumerate_worlds(d)
    for w in candidate_worlds(rng, d, dist):
        assert prob_explicit_local(d, w, enumerate_matches(d, w)) == dist.probability(w)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_explicit_mie_matches_oracle(seed):
    rng = random.Random(seed)
    d = random_pdoc(rng, ("mie",), ordered=rng.random() < 0.5)
    dist = enumerate_worlds(d)
    for w in candidate_worlds(rng, d, dist):
        assert prob_explicit_mie(d, w, enumerate_matches(d, w)) == dist.probability(w)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_conditioned_matches_oracle(seed):
    rng = random.Random(seed)
    d = random_pdoc(rng, ("mux", "ind", "det", "cie", "fie", "mie"), ordered=rng.random() < 0.5)
    dist = enumerate_worlds(d)
    for w in candidate_worlds(rng, d, dist, k=3):
        assert prob_explicit_conditioned(d, w, enumerate_matches(d, w)) == world_probability_bf(d, w)


def kept_regular_ids(d, cfg):
    """Ids of the regular nodes that survive configuration ``cfg``."""
    from prxml.model import Kind, evaluate_formula

    kept = set()

    def walk(n):
        if n.is_regular:
            kept.add(n.id)
        for i, e in enumerate(n.edges):
            if n.kind is Kind.IND:
                go = cfg.ind_choices[(n.id, i)]
            elif n.kind is Kind.MUX:
                go = cfg.mux_choices[n.id] == i
            elif n.kind is Kind.MIE:
                go = cfg.valuation[e.annotation.event] == e.annotation.value
            elif n.kind in (Kind.CIE, Kind.FIE):
                go = evaluate_formula(e.annotation, cfg.valuation)
            else:
                go = True
            if go:
                walk(e.child)

    walk(d.root)
    return frozenset(kept)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_enumeration_covers_every_realization(seed):
    from prxml.oracle import check_configuration_yields, enumerate_configurations

    rng = random.Random(seed)
    d = random_pdoc(rng, ("mux", "ind", "det", "cie", "mie"), ordered=rng.random() < 0.5, max_configs=256)
    dist = enumerate_worlds(d)
    for w in candidate_worlds(rng, d, dist, k=3):
        images = {frozenset(f.values()) for f in filter_matches_order(d, w, enumerate_matches(d, w))}
        for cfg, _ in enumerate_configurations(d):
            assert check_configuration_yields(d, cfg, w) == (kept_regular_ids(d, cfg) in images)
