import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from prxml.algorithms import empty_table, iso_classes, poss_unordered_single, prob_ordered_local
from prxml.errors import PreconditionViolated, UnsupportedClass
from prxml.gen import gen_pm_ind
from prxml.matching import BipartiteGraph, bipartite_perfect_matching, hopcroft_karp, max_matching_size
from prxml.model import PDocument, XDocument, det, ind, mux, node, xnode
from prxml.oracle import enumerate_worlds, trees_equal
from prxml.randomdocs import candidate_worlds, random_pdoc, random_xtree


def odoc(root):
    return PDocument(root, ordered=True)


def oworld(root):
    return XDocument(root, ordered=True)


class TestIsoClasses:
    def test_repeated_leaf(self):
        c = iso_classes(oworld(xnode("a", xnode("b"), xnode("b"))))
        assert len(c.classes) == 2
        b, a = c.class_of[1], c.class_of[0]
        assert c.class_of[2] == b
        assert c.classes[a] == ("a", (b, b))
        assert c.accepting == a

    def test_distinct_leaves(self):
        assert len(iso_classes(oworld(xnode("a", xnode("b"), xnode("c")))).classes) == 3

    def test_shared_subtrees(self):
        w = oworld(xnode("a", xnode("a", xnode("b")), xnode("a", xnode("b"))))
        assert len(iso_classes(w).classes) == 3


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_classes_agree_with_isomorphism(seed):
    rng = random.Random(seed)
    w = oworld(random_xtree(rng, max_depth=4))
    c = iso_classes(w)
    nodes = list(w.nodes())
    for x in nodes:
        for y in nodes:
            assert (c.class_of[x.id] == c.class_of[y.id]) == trees_equal(x, y, ordered=True)


class TestOrderedDP:
    def test_single_bernoulli(self):
        assert prob_ordered_local(odoc(node("a", ind(("1/2", node("b"))))), oworld(xnode("a", xnode("b")))) == Fraction(1, 2)

    def test_det_splice(self):
        d = odoc(node("a", det(node("b"), node("c"))))
        assert prob_ordered_local(d, oworld(xnode("a", xnode("b"), xnode("c")))) == 1
        assert prob_ordered_local(d, oworld(xnode("a", xnode("c"), xnode("b")))) == 0

    def test_mux_branch(self):
        d = odoc(node("a", mux(("1/3", node("b")), ("1/3", node("c")))))
        assert prob_ordered_local(d, oworld(xnode("a", xnode("c")))) == Fraction(1, 3)
        assert prob_ordered_local(d, oworld(xnode("a"))) == Fraction(1, 3)

    def test_interleaved_ind_children(self):
        # either of two b's can produce the lone b
        d = odoc(node("a", ind(("1/2", node("b")), ("1/2", node("b")))))
        assert prob_ordered_local(d, oworld(xnode("a", xnode("b")))) == Fraction(1, 2)

    def test_root_label_mismatch(self):
        assert prob_ordered_local(odoc(node("a")), oworld(xnode("b"))) == 0

    def test_rejects_unordered(self):
        with pytest.raises(PreconditionViolated):
            prob_ordered_local(PDocument(node("a")), XDocument(xnode("a")))

    def test_rejects_global_events(self, fig1):
        d = PDocument(fig1.root, fig1.events, ordered=True)
        with pytest.raises(UnsupportedClass):
            prob_ordered_local(d, oworld(xnode("conferences")))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_ordered_dp_matches_oracle(seed):
    rng = random.Random(seed)
    d = random_pdoc(rng, ("mux", "ind", "det"), ordered=True)
    dist = enumerate_worlds(d)
    for w in candidate_worlds(rng, d, dist):
        assert prob_ordered_local(d, w) == dist.probability(w)


class TestEmptyTable:
    def test_kinds(self):
        d = PDocument(node("a", mux(("1/2", node("b"))), mux(("1/2", node("b")), ("1/2", node("c")))))
        e = empty_table(d)
        m1, m2 = (n.id for n in d.nodes() if not n.is_regular)
        assert e[m1] and not e[m2]
        assert not e[d.root.id]


class TestUnorderedSingle:
    def test_pm_gadget(self):
        d, w = gen_pm_ind(BipartiteGraph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]))
        assert poss_unordered_single(d, w)

    def test_bounded_multiplicity(self):
        d = PDocument(node("a", ind(("1/2", node("b")), ("1/2", node("b")), ("1/2", node("b")))))
        assert poss_unordered_single(d, XDocument(xnode("a", xnode("b"), xnode("b"))))
        assert not poss_unordered_single(d, XDocument(xnode("a", *[xnode("b")] * 4)))

    def test_mux_residual(self):
        d = PDocument(node("a", mux(("1/2", node("b")))))
        assert poss_unordered_single(d, XDocument(xnode("a")))

    def test_mandatory_child_missing(self):
        d = PDocument(node("a", node("c"), mux(("1/2", node("b")))))
        assert not poss_unordered_single(d, XDocument(xnode("a", xnode("b"))))

    def test_mixed_requires_relaxed(self):
        d = PDocument(node("a", mux(("1/2", node("b"))), ind(("1/2", node("c")))))
        with pytest.raises(UnsupportedClass):
            poss_unordered_single(d, XDocument(xnode("a")))
        assert poss_unordered_single(d, XDocument(xnode("a", xnode("c"))), relaxed=True)

    def test_relaxed_rejects_ind_under_mux(self):
        d = PDocument(node("a", mux(("1/2", ind(("1/2", node("b")))))))
        with pytest.raises(PreconditionViolated):
            poss_unordered_single(d, XDocument(xnode("a")), relaxed=True)

    def test_rejects_ordered(self):
        with pytest.raises(PreconditionViolated):
            poss_unordered_single(odoc(node("a")), oworld(xnode("a")))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(("ind",), False), (("mux",), False), (("mux", "ind"), True)]))
def test_unordered_decision_matches_oracle(seed, setup):
    kinds, relaxed = setup
    rng = random.Random(seed)
    d = random_pdoc(rng, kinds, no_ind_under_mux=True)
    dist = enumerate_worlds(d)
    for w in candidate_worlds(rng, d, dist):
        assert poss_unordered_single(d, w, relaxed=relaxed) == (dist.probability(w) > 0)


class TestMatching:
    def test_complete(self):
        assert bipartite_perfect_matching(BipartiteGraph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]))

    def test_unequal_parts(self):
        assert not bipartite_perfect_matching(BipartiteGraph(2, 1, [(0, 0)]))

    def test_shared_right_vertex(self):
        assert not bipartite_perfect_matching(BipartiteGraph(2, 2, [(0, 0), (1, 0)]))

    def test_matching_is_valid(self):
        g = BipartiteGraph(3, 3, [(0, 0), (0, 1), (1, 0), (2, 2), (2, 1)])
        match = hopcroft_karp(g.adjacency(), 3)
        pairs = [(i, j) for i, j in enumerate(match) if j is not None]
        assert len(pairs) == 3 and all(p in g.edges for p in pairs)
        assert len({j for _, j in pairs}) == 3


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_max_matching_matches_brute_force(n_left, n_right, data):
    import itertools

    all_edges = [(i, j) for i in range(n_left) for j in range(n_right)]
    edges = data.draw(st.sets(st.sampled_from(all_edges)))
    g = BipartiteGraph(n_left, n_right, edges)
    best = 0
    for r in range(min(n_left, n_right), 0, -1):
        for lefts in itertools.combinations(range(n_left), r):
            for rights in itertools.permutations(range(n_right), r):
                if all(e in g.edges for e in zip(lefts, rights)):
                    best = r
                    break
            if best:
                break
        if best:
            break
    assert max_matching_size(g) == best
