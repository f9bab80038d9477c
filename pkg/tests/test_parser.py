import pytest
from hypothesis import given, settings, strategies as st

from ergosess import arith as ar
from ergosess import syntax as sx
from ergosess.parser import (LexError, ParseError, lex, parse_process, parse_prop,
                             parse_signature, parse_type, render_diagnostic, render_process,
                             render_signature, render_type)

from conftest import ALL_FILES, signature


def kinds(src):
    return [(t.kind, t.text) for t in lex(src)][:-1]


def test_lex_potential_prefix():
    assert kinds("<{6}| nat -o queue{n+1}") == [
        ("op", "<"), ("op", "{"), ("num", "6"), ("op", "}"), ("op", "|"), ("id", "nat"),
        ("op", "-o"), ("id", "queue"), ("op", "{"), ("id", "n"), ("op", "+"), ("num", "1"),
        ("op", "}")]


def test_lex_empty_and_comments():
    assert kinds("") == []
    assert kinds("% only a comment\n  % another") == []


def test_lex_process_tokens():
    assert kinds("x.k ; close x") == [("id", "x"), ("op", "."), ("id", "k"), ("op", ";"),
                                      ("kw", "close"), ("id", "x")]


def test_lex_errors_carry_spans():
    with pytest.raises(LexError) as e:
        lex("x @ y")
    assert (e.value.span.line, e.value.span.col) == (1, 3)
    with pytest.raises(LexError, match="unterminated"):
        lex("type a = +{ l : 1")


def test_nil_declaration():
    sig = signature("list")
    d = sig.decls["nil"]
    assert d.potential == ar.Const(2)
    assert d.offered == ("l", sx.TName("list", (ar.Const(0), ar.Var("p"))))


def test_turnstile_without_potential():
    sig = parse_signature("decl f : . |- (x : 1)\nproc x <- f <- = close x")
    assert sig.decls["f"].potential == ar.Const(0)


def test_two_list_queue_potentials():
    q = signature("queue2").types["queue"].body
    branches = dict(q.branches)
    assert branches["enq"].pot == ar.Const(6)
    assert branches["deq"].pot == ar.Const(4)


def test_precedence():
    a, b, c = (sx.TName(n) for n in "abc")
    assert parse_type("a * b -o c") == sx.Lolli(sx.Tensor(a, b), c)
    assert parse_type("a -o b -o c") == sx.Lolli(a, sx.Lolli(b, c))
    assert parse_type("<{6}| a -o b") == sx.GetT(ar.Const(6), sx.Lolli(a, b))
    assert parse_type("(<{6}| a) -o b") == sx.Lolli(sx.GetT(ar.Const(6), a), b)


def test_tail_call_is_a_spawn_without_continuation():
    p = parse_process("l <- t")
    assert p == sx.Fwd("l", "t")
    p = parse_process("x <- f{n}{2} <- y z")
    assert p == sx.Spawn("x", "f", (ar.Var("n"), ar.Const(2)), ("y", "z"), None)


@pytest.mark.parametrize("name", ALL_FILES)
def test_round_trip(name):
    sig = signature(name)
    assert parse_signature(render_signature(sig)) == sig


def _within(inner, outer):
    return outer.start <= inner.start and inner.end <= outer.end


def _type_spans(a):
    for child in _type_children(a):
        assert child.span is not None and _within(child.span, a.span), (a, child)
        _type_spans(child)


def _type_children(a):
    match a:
        case sx.Plus(bs) | sx.With(bs):
            return [b for _, b in bs]
        case sx.Tensor(l, r) | sx.Lolli(l, r):
            return [l, r]
        case sx.AssertT() | sx.AssumeT() | sx.ExistsT() | sx.ForallT() | sx.PayT() | sx.GetT():
            return [a.cont]
    return []


@pytest.mark.parametrize("name", ALL_FILES)
def test_spans_nest(name):
    sig = signature(name)
    for td in sig.types.values():
        assert _within(td.body.span, td.span)
        _type_spans(td.body)
    for pd in sig.defs.values():
        assert _within(pd.body.span, pd.span)
        for p in sx.subprocesses(pd.body):
            assert _within(p.head, p.span)
            for child in sx.children(p):
                assert _within(child.span, p.span), (p, child)


def test_parse_error_at_end_of_input():
    src = "decl f : . |- (x : 1"
    with pytest.raises((ParseError, LexError)):
        parse_signature(src)
    src = "proc x <- f <- = x.k ;"
    with pytest.raises(ParseError) as e:
        parse_signature(src)
    text = render_diagnostic(e.value, src)
    assert "unexpected end of input" in text
    assert text.splitlines()[-1] == " " * len(src) + "^"


def test_parse_error_reports_expectation():
    with pytest.raises(ParseError) as e:
        parse_signature("type t = +{ a 1 }")
    assert e.value.expected and "':'" in e.value.message


# ---------------------------------------------------------------------------
# rendering and parsing are inverse on generated syntax

names = st.sampled_from(["n", "k", "m"])
leaves = st.one_of(st.integers(0, 9).map(ar.Const), names.map(ar.Var))
# the parser folds nested scalings, so only leaves are scaled
exps = st.recursive(
    st.one_of(leaves, st.builds(ar.Scale, st.integers(2, 4), leaves)),
    lambda sub: st.one_of(st.builds(ar.Add, sub, sub), st.builds(ar.Sub, sub, sub)),
    max_leaves=5)
atoms = st.builds(ar.Cmp, st.sampled_from(["=", ">", ">=", "<", "<="]), exps, exps)
props = st.recursive(
    st.one_of(atoms, st.just(ar.TRUE), st.just(ar.FALSE)),
    lambda sub: st.one_of(st.builds(ar.And, sub, sub), st.builds(ar.Or, sub, sub),
                          st.builds(ar.Not, sub)),
    max_leaves=4)
labels = st.sampled_from(["a", "b", "c"])
types = st.recursive(
    st.one_of(st.just(sx.One()), st.builds(sx.TName, st.sampled_from(["t", "u"]),
                                           st.lists(exps, max_size=2).map(tuple))),
    lambda sub: st.one_of(
        st.dictionaries(labels, sub, min_size=1, max_size=3).map(
            lambda d: sx.Plus(tuple(d.items()))),
        st.dictionaries(labels, sub, min_size=1, max_size=3).map(
            lambda d: sx.With(tuple(d.items()))),
        st.builds(sx.Tensor, sub, sub), st.builds(sx.Lolli, sub, sub),
        st.builds(sx.AssertT, props, sub), st.builds(sx.AssumeT, props, sub),
        st.builds(sx.ExistsT, names, sub), st.builds(sx.ForallT, names, sub),
        st.builds(sx.PayT, exps, sub), st.builds(sx.GetT, exps, sub)),
    max_leaves=6)


@settings(max_examples=150, deadline=None)
@given(props)
def test_prop_round_trip(phi):
    assert parse_prop(ar.render_prop(phi)) == phi


@settings(max_examples=150, deadline=None)
@given(types)
def test_type_round_trip(a):
    assert parse_type(render_type(a)) == a


def test_process_round_trip_on_corpus():
    for name in ALL_FILES:
        for pd in signature(name).defs.values():
            assert parse_process(render_process(pd.body)) == pd.body
