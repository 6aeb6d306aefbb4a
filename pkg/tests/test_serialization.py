import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from prxml.model import Kind, PDocument, XDocument, node, xnode
from prxml.randomdocs import random_pdoc, random_xtree
from prxml.serialization import (
    PrxmlSyntaxError,
    PrxmlValidationError,
    UnknownEventError,
    format_rational,
    parse_matches,
    parse_prxml,
    parse_xdoc,
    serialize_matches,
    serialize_prxml,
    serialize_xdoc,
)
from conftest import CORPUS


def test_minimal_cie_document():
    d = parse_prxml('(prxml (events (e bool 9/10)) (ordered true) (node "a" (cie ((and e) (node "b")))))')
    assert d.ordered
    assert [n.label for n in d.nodes() if n.is_regular] == ["a", "b"]
    (cie_node,) = [n for n in d.nodes() if n.kind is Kind.CIE]
    assert len(cie_node.edges) == 1
    assert d.events["e"].p_true == Fraction(9, 10)


def test_fig1_structure(fig1):
    kinds = [n.kind.value for n in fig1.nodes() if n.kind.probabilistic]
    assert sorted(kinds) == ["cie", "cie", "det", "det", "ind", "mux"]


def test_probabilistic_root_rejected():
    with pytest.raises(PrxmlSyntaxError, match="root must be a regular node"):
        parse_prxml("(prxml (events) (ordered true) (ind ...))")


class TestXdoc:
    def test_unordered_bag(self):
        w = parse_xdoc('(xml (ordered false) (node "a" (node "b") (node "b")))')
        assert not w.ordered
        assert w.root == xnode("a", xnode("b"), xnode("b"))

    def test_single_node(self):
        w = parse_xdoc('(xml (ordered true) (node "t"))')
        assert w.root == xnode("t") and w.ordered

    def test_probabilistic_keyword_rejected(self):
        with pytest.raises(PrxmlSyntaxError):
            parse_xdoc('(xml (ordered true) (node "t" (det (node "u"))))')


class TestSerialize:
    def test_canonical_fixpoint_on_corpus(self):
        for path in CORPUS.glob("*.prxml"):
            text = path.read_text(encoding="utf-8")
            once = serialize_prxml(parse_prxml(text))
            assert serialize_prxml(parse_prxml(once)) == once
        for path in CORPUS.glob("*.xml.sexp"):
            once = serialize_xdoc(parse_xdoc(path.read_text(encoding="utf-8")))
            assert serialize_xdoc(parse_xdoc(once)) == once

    def test_rational_lowest_terms(self):
        assert format_rational(Fraction(4536, 10000)) == "567/1250"
        assert format_rational(Fraction(3)) == "3"

    def test_decimal_input_is_normalized(self):
        d = parse_prxml('(prxml (events) (ordered false) (node "a" (ind (0.4536 (node "b")))))')
        assert "(567/1250 (node \"b\"))" in serialize_prxml(d)

    def test_unordered_header(self):
        assert "(ordered false)" in serialize_prxml(PDocument(node("a")))
        assert "(ordered false)" in serialize_xdoc(XDocument(xnode("a")))

    def test_layout(self):
        text = serialize_prxml(parse_prxml(
            '(prxml (events (e bool 1/2)) (ordered true) (node "a" (cie ((and e (not e)) (node "b")))))'))
        assert text == (
            "(prxml\n"
            "  (events\n"
            "    (e bool 1/2))\n"
            "  (ordered true)\n"
            '  (node "a"\n'
            "    (cie\n"
            '      ((and e (not e)) (node "b")))))\n'
        )

    def test_label_escaping(self):
        d = PDocument(node('quote " and \\ back', node("ünïcode")))
        assert parse_prxml(serialize_prxml(d)) == d


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_round_trip_random_documents(seed):
    rng = random.Random(seed)
    kinds = ("mux", "ind", "det", "cie", "fie", "mie")
    d = random_pdoc(rng, rng.sample(kinds, rng.randint(1, 6)), ordered=rng.random() < 0.5, max_configs=10**6)
    assert parse_prxml(serialize_prxml(d)) == d
    w = XDocument(random_xtree(rng), rng.random() < 0.5)
    assert parse_xdoc(serialize_xdoc(w)) == w


BAD_INPUTS = [
    "",
    "(prxml",
    "(prxml (events) (ordered true) (node \"a\")))",
    '(prxml (events) (ordered maybe) (node "a"))',
    '(prxml (events (e bool 3/2)) (ordered true) (node "a"))',
    '(prxml (events) (ordered true) (node a))',
    '(prxml (events) (ordered true) (node "a" (ind (x (node "b")))))',
    '(prxml (events) (ordered true) (node "a" (foo)))',
    '(prxml (events) (ordered true) (node "#1"))',
    '(prxml (events) (ordered true) (node "a" (cie (e (node "b")))))',
    '(prxml (events) (ordered true) (node "unterminated))',
]


@pytest.mark.parametrize("text", BAD_INPUTS)
def test_syntax_errors_carry_spans(text):
    with pytest.raises(PrxmlSyntaxError) as info:
        parse_prxml(text)
    span = info.value.span
    assert span is not None
    assert 0 <= span.start <= span.end <= len(text)


def test_validation_error_span_points_at_node():
    text = '(prxml (events) (ordered true) (node "a" (mux (1/2 (node "b")) (2/3 (node "c")))))'
    with pytest.raises(PrxmlValidationError) as info:
        parse_prxml(text)
    assert info.value.violations[0].rule == "MuxSumExceedsOne"
    assert text[info.value.span.start:].startswith("(mux")


def test_unknown_event():
    with pytest.raises(UnknownEventError):
        parse_prxml('(prxml (events) (ordered true) (node "a" (cie ((and e) (node "b")))))')


def test_enum_events_and_formulas():
    text = (
        '(prxml (events (m enum (x 1/3) (y 2/3)) (e bool 1/2)) (ordered false)'
        ' (node "a" (mie ((m x) (node "b"))) (fie ((or e (and (not e) (not (or e e)))) (node "c")))))'
    )
    d = parse_prxml(text)
    assert parse_prxml(serialize_prxml(d)) == d
    assert d.events["m"].outcomes == (("x", Fraction(1, 3)), ("y", Fraction(2, 3)))


def test_matches_round_trip():
    ms = [{0: 0, 1: 2}, {0: 0, 1: 4}]
    text = serialize_matches(ms)
    assert text == "(matches\n  ((0 0) (1 2))\n  ((0 0) (1 4)))\n"
    assert parse_matches(text) == ms
    assert parse_matches(serialize_matches([])) == []


def test_matches_reject_duplicates():
    with pytest.raises(PrxmlSyntaxError):
        parse_matches("(matches ((0 0) (0 1)))")
