"""Textual s-expression format for PrXML documents, XML trees and match files.

Grammar (whitespace-insensitive)::

    DOC    := (prxml EVENTS ORDERED TREE)
    EVENTS := (events EVT*)
    EVT    := (id bool RAT) | (id enum (VAL RAT)+)
    ORDERED:= (ordered true|false)
    TREE   := (node "LABEL" TREE*) | (det TREE*) | (ind (RAT TREE)*)
            | (mux (RAT TREE)*) | (cie (CONJ TREE)*) | (fie (FORM TREE)*)
            | (mie ((id VAL) TREE)*)
    CONJ   := (and LIT*)
    LIT    := id | (not id)
    FORM   := LIT | (and FORM*) | (or FORM*) | (not FORM)
    XDOC   := (xml ORDERED XTREE),  XTREE := (node "LABEL" XTREE*)
    MATCHES:= (matches ((w-id d-id)*)*)

Serialization is canonical: one tree node per line, two-space indentation,
rationals in lowest terms.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import PrxmlError
from .model import (
    SYNTHETIC_PREFIX,
    And,
    Conj,
    Event,
    EventTable,
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
    validate,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")
RAT_RE = re.compile(r"-?\d+(/\d+|\.\d+)?\Z")


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


class FormatError(PrxmlError, ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.span = span
        self.message = message
        super().__init__(f"{span}: {message}" if span else message)


class PrxmlSyntaxError(FormatError):
    pass


class PrxmlValidationError(FormatError):
    def __init__(self, message, span=None, violations=()):
        super().__init__(message, span)
        self.violations = list(violations)


class UnknownEventError(PrxmlValidationError):
    pass


# ---------------------------------------------------------------------------
# Reader


@dataclass
class Atom:
    text: str
    quoted: bool
    span: SourceSpan


@dataclass
class SList:
    items: list
    span: SourceSpan


_TOKEN_RE = re.compile(r'\s+|;[^\n]*|\(|\)|"(?:[^"\\]|\\.)*"|[^\s()";]+')


def _span(text: str, start: int, end: int) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(start, end, line, col)


def read_sexp(text: str):
    """Read exactly one s-expression from ``text``."""
    pos = 0
    stack: list[tuple[list, int]] = []
    result = None
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PrxmlSyntaxError("unterminated string", _span(text, pos, n))
        tok = m.group(0)
        start, pos = pos, m.end()
        if tok[0].isspace() or tok[0] == ";":
            continue
        if result is not None:
            raise PrxmlSyntaxError("trailing input after expression", _span(text, start, pos))
        if tok == "(":
            stack.append(([], start))
            continue
        if tok == ")":
            if not stack:
                raise PrxmlSyntaxError("unbalanced ')'", _span(text, start, pos))
            items, open_at = stack.pop()
            value = SList(items, _span(text, open_at, pos))
        elif tok[0] == '"':
            if len(tok) < 2 or tok[-1] != '"':
                raise PrxmlSyntaxError("unterminated string", _span(text, start, pos))
            try:
                value = Atom(json.loads(tok), True, _span(text, start, pos))
            except json.JSONDecodeError:
                raise PrxmlSyntaxError("bad string escape", _span(text, start, pos)) from None
        else:
            value = Atom(tok, False, _span(text, start, pos))
        if stack:
            stack[-1][0].append(value)
        else:
            result = value
    if stack:
        raise PrxmlSyntaxError("unbalanced '('", _span(text, stack[-1][1], n))
    if result is None:
        raise PrxmlSyntaxError("empty input", _span(text, 0, n))
    return result


def _head(x, *names):
    """Return the head symbol of list ``x`` if it is one of ``names``."""
    if isinstance(x, SList) and x.items and isinstance(x.items[0], Atom) and not x.items[0].quoted:
        if not names or x.items[0].text in names:
            return x.items[0].text
    return None


def _expect_list(x, what):
    if not isinstance(x, SList):
        raise PrxmlSyntaxError(f"expected {what}", x.span)
    return x


def _ident(x, what="identifier") -> str:
    if not isinstance(x, Atom) or x.quoted or not IDENT_RE.match(x.text):
        raise PrxmlSyntaxError(f"expected {what}", x.span)
    return x.text


def _rat(x) -> Fraction:
    if not isinstance(x, Atom) or x.quoted or not RAT_RE.match(x.text):
        raise PrxmlSyntaxError("expected a rational number", x.span)
    try:
        return Fraction(x.text)
    except ZeroDivisionError:
        raise PrxmlSyntaxError("zero denominator", x.span) from None


def _label(x) -> str:
    if not isinstance(x, Atom) or not x.quoted:
        raise PrxmlSyntaxError("expected a quoted label", x.span)
    if not x.text:
        raise PrxmlSyntaxError("labels must be nonempty", x.span)
    if x.text.startswith(SYNTHETIC_PREFIX):
        raise PrxmlSyntaxError(f"labels starting with {SYNTHETIC_PREFIX!r} are reserved", x.span)
    return x.text


def _ordered(x) -> bool:
    if _head(x, "ordered") is None or len(x.items) != 2:
        raise PrxmlSyntaxError("expected (ordered true|false)", x.span)
    flag = x.items[1]
    if not isinstance(flag, Atom) or flag.text not in ("true", "false"):
        raise PrxmlSyntaxError("expected true or false", flag.span)
    return flag.text == "true"


def _event(x) -> Event:
    x = _expect_list(x, "an event declaration")
    if len(x.items) < 3:
        raise PrxmlSyntaxError("malformed event declaration", x.span)
    name = _ident(x.items[0], "event name")
    kind = x.items[1]
    if isinstance(kind, Atom) and kind.text == "bool":
        if len(x.items) != 3:
            raise PrxmlSyntaxError("(id bool RAT) takes one probability", x.span)
        p = _rat(x.items[2])
        if not 0 <= p <= 1:
            raise PrxmlSyntaxError("event probability must lie in [0,1]", x.items[2].span)
        return Event.bool(name, p)
    if isinstance(kind, Atom) and kind.text == "enum":
        pairs = []
        for item in x.items[2:]:
            item = _expect_list(item, "(VALUE RAT)")
            if len(item.items) != 2:
                raise PrxmlSyntaxError("expected (VALUE RAT)", item.span)
            pairs.append((_ident(item.items[0], "outcome value"), _rat(item.items[1])))
        return Event.enum(name, pairs)
    raise PrxmlSyntaxError("event kind must be bool or enum", kind.span)


def _literal(x) -> Lit:
    if isinstance(x, Atom):
        return Lit(_ident(x, "event"), True)
    if _head(x, "not") and len(x.items) == 2 and isinstance(x.items[1], Atom):
        return Lit(_ident(x.items[1], "event"), False)
    raise PrxmlSyntaxError("expected a literal: id or (not id)", x.span)


def _formula(x):
    if isinstance(x, Atom):
        return _literal(x)
    head = _head(x, "and", "or", "not")
    if head == "not":
        if len(x.items) != 2:
            raise PrxmlSyntaxError("(not FORM) takes one argument", x.span)
        if isinstance(x.items[1], Atom):
            return _literal(x)
        return Not(_formula(x.items[1]))
    if head == "and":
        return And(tuple(_formula(i) for i in x.items[1:]))
    if head == "or":
        return Or(tuple(_formula(i) for i in x.items[1:]))
    raise PrxmlSyntaxError("expected a formula", x.span)


def _conj(x) -> Conj:
    if _head(x, "and") is None:
        raise PrxmlSyntaxError("expected a conjunction (and LIT*)", x.span)
    return Conj(tuple(_literal(i) for i in x.items[1:]))


def _mie_atom(x) -> MieAtom:
    if not isinstance(x, SList) or len(x.items) != 2:
        raise PrxmlSyntaxError("expected (event value)", x.span)
    return MieAtom(_ident(x.items[0], "event"), _ident(x.items[1], "outcome value"))


_ANNOTATION_READERS = {
    "ind": _rat,
    "mux": _rat,
    "cie": _conj,
    "fie": _formula,
    "mie": _mie_atom,
}


def _tree(x, spans: list, xml_only=False) -> PNode:
    head = _head(x)
    if head is None:
        raise PrxmlSyntaxError("expected a tree node", x.span)
    spans.append(x.span)
    if head == "node":
        if len(x.items) < 2:
            raise PrxmlSyntaxError('expected (node "LABEL" ...)', x.span)
        label = _label(x.items[1])
        kids = [_tree(c, spans, xml_only) for c in x.items[2:]]
        return PNode(Kind.REGULAR, label, tuple(PEdge(k) for k in kids))
    if xml_only:
        raise PrxmlSyntaxError(f"'{head}' is not allowed in a deterministic document", x.span)
    if head == "det":
        kids = [_tree(c, spans) for c in x.items[1:]]
        return PNode(Kind.DET, None, tuple(PEdge(k) for k in kids))
    if head in _ANNOTATION_READERS:
        read = _ANNOTATION_READERS[head]
        edges = []
        for item in x.items[1:]:
            if not isinstance(item, SList) or len(item.items) != 2:
                raise PrxmlSyntaxError(f"expected ({'ANNOTATION'} TREE) under {head}", item.span)
            ann = read(item.items[0])
            edges.append(PEdge(_tree(item.items[1], spans), ann))
        return PNode(Kind(head), None, tuple(edges))
    raise PrxmlSyntaxError(f"unknown node kind '{head}'", x.items[0].span)


def parse_prxml(text: str) -> PDocument:
    top = read_sexp(text)
    if _head(top, "prxml") is None or len(top.items) != 4:
        raise PrxmlSyntaxError("expected (prxml (events ...) (ordered ...) TREE)", top.span)
    _, evs, ordered, tree = top.items
    if _head(evs, "events") is None:
        raise PrxmlSyntaxError("expected (events ...)", evs.span)
    events = EventTable(_event(e) for e in evs.items[1:])
    ordered_flag = _ordered(ordered)
    if _head(tree, "node") is None:
        raise PrxmlSyntaxError("root must be a regular node", tree.span)
    spans: list[SourceSpan] = []
    root = _tree(tree, spans)
    doc = PDocument(root, events, ordered_flag)
    violations = validate(doc)
    if violations:
        first = violations[0]
        span = spans[first.node_id] if first.node_id is not None else evs.span
        cls = UnknownEventError if first.rule == "UnknownEvent" else PrxmlValidationError
        raise cls("; ".join(map(str, violations)), span, violations)
    return doc


def _xnode(p: PNode) -> XNode:
    return XNode(p.label, tuple(_xnode(c) for c in p.children))


def parse_xdoc(text: str) -> XDocument:
    top = read_sexp(text)
    if _head(top, "xml") is None or len(top.items) != 3:
        raise PrxmlSyntaxError("expected (xml (ordered ...) TREE)", top.span)
    ordered_flag = _ordered(top.items[1])
    root = _tree(top.items[2], [], xml_only=True)
    return XDocument(_xnode(root), ordered_flag)


def parse_matches(text: str) -> list[dict[int, int]]:
    top = read_sexp(text)
    if _head(top, "matches") is None:
        raise PrxmlSyntaxError("expected (matches ...)", top.span)
    out = []
    for m in top.items[1:]:
        m = _expect_list(m, "a match ((w d) ...)")
        f = {}
        for pair in m.items:
            if not isinstance(pair, SList) or len(pair.items) != 2:
                raise PrxmlSyntaxError("expected (w-id d-id)", pair.span)
            w, d = pair.items
            if not (isinstance(w, Atom) and isinstance(d, Atom) and w.text.isdigit() and d.text.isdigit()):
                raise PrxmlSyntaxError("node ids must be nonnegative integers", pair.span)
            if int(w.text) in f:
                raise PrxmlSyntaxError(f"W-node {w.text} mapped twice", pair.span)
            f[int(w.text)] = int(d.text)
        out.append(f)
    return out


# ---------------------------------------------------------------------------
# Writer


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _quote(label: str) -> str:
    return json.dumps(label, ensure_ascii=False)


def format_literal(lit: Lit) -> str:
    return lit.event if lit.positive else f"(not {lit.event})"


def format_formula(f) -> str:
    if isinstance(f, Lit):
        return format_literal(f)
    if isinstance(f, Conj):
        return "(" + " ".join(["and", *map(format_literal, f.literals)]) + ")"
    if isinstance(f, And):
        return "(" + " ".join(["and", *map(format_formula, f.items)]) + ")"
    if isinstance(f, Or):
        return "(" + " ".join(["or", *map(format_formula, f.items)]) + ")"
    if isinstance(f, Not):
        return f"(not {format_formula(f.item)})"
    raise TypeError(f"not a formula: {f!r}")


def _format_annotation(kind: Kind, ann) -> str:
    if kind in (Kind.IND, Kind.MUX):
        return format_rational(ann)
    if kind is Kind.MIE:
        return f"({ann.event} {ann.value})"
    return format_formula(ann)


def _tree_lines(n, depth: int, prefix: str = "") -> list[str]:
    """Lines for node ``n``; ``prefix`` is text preceding the node's paren."""
    pad = "  " * depth
    if isinstance(n, XNode):
        head = f"(node {_quote(n.label)}"
        kids = [(None, c) for c in n.children]
    elif n.is_regular:
        head = f"(node {_quote(n.label)}"
        kids = [(None, e.child) for e in n.edges]
    else:
        head = f"({n.kind.value}"
        kids = [(e.annotation, e.child) for e in n.edges]
    lines = [pad + prefix + head]
    for ann, child in kids:
        if ann is None:
            lines.extend(_tree_lines(child, depth + 1))
        else:
            sub = _tree_lines(child, depth + 1, "(" + _format_annotation(n.kind, ann) + " ")
            sub[-1] += ")"
            lines.extend(sub)
    lines[-1] += ")"
    return lines


def _ordered_line(flag: bool) -> str:
    return f"  (ordered {'true' if flag else 'false'})"


def serialize_prxml(doc: PDocument) -> str:
    lines = ["(prxml"]
    if len(doc.events) == 0:
        lines.append("  (events)")
    else:
        lines.append("  (events")
        for ev in doc.events:
            if ev.boolean:
                lines.append(f"    ({ev.name} bool {format_rational(ev.p_true)})")
            else:
                pairs = " ".join(f"({v} {format_rational(q)})" for v, q in ev.outcomes)
                lines.append(f"    ({ev.name} enum {pairs})")
        lines[-1] += ")"
    lines.append(_ordered_line(doc.ordered))
    lines.extend(_tree_lines(doc.root, 1))
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def serialize_xdoc(doc: XDocument) -> str:
    lines = ["(xml", _ordered_line(doc.ordered)]
    lines.extend(_tree_lines(doc.root, 1))
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def serialize_matches(matches) -> str:
    if not matches:
        return "(matches)\n"
    lines = ["(matches"]
    for f in matches:
        pairs = " ".join(f"({w} {d})" for w, d in sorted(f.items()))
        lines.append(f"  ({pairs})")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"
