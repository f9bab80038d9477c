import random

import pytest

from ergosess import arith as ar
from ergosess import syntax as sx
from ergosess.parser import parse_process, parse_signature, parse_type, render_process
from ergosess.typeeq import bounded_bisim_oracle

from conftest import ALL_FILES, elaborated, signature

n = ar.Var("n")


def test_unfold_examples():
    sig = signature("queue")
    u = sx.unfold(sig, sx.TName("queue", (ar.Add(n, ar.Const(1)),)))
    assert isinstance(u, sx.With)
    ins = dict(u.branches)["ins"]
    assert ins.pot == ar.Scale(2, ar.Add(n, ar.Const(1)))
    assert sx.unfold(sig, sx.One()) == sx.One()

    nat = signature("indexed")
    u = sx.unfold(nat, sx.TName("nat", (ar.Const(3),)))
    zero, succ = dict(u.branches)["zero"], dict(u.branches)["succ"]
    assert zero.prop == ar.eq(ar.Const(3), ar.Const(0))
    assert succ.cont == sx.TName("nat", (ar.Const(2),))


def test_unfold_errors():
    sig = signature("indexed")
    with pytest.raises(sx.UnknownTypeName):
        sx.unfold(sig, sx.TName("nope"))
    with pytest.raises(sx.ArityMismatch):
        sx.unfold(sig, sx.TName("nat"))


def test_validity_examples():
    q = signature("queue")
    sx.check_type_valid(q, ["n"], ar.TRUE, sx.TName("queue", (n,)))
    b = signature("binary")
    with pytest.raises(sx.InvalidIndex):
        sx.check_type_valid(b, ["n"], ar.TRUE, sx.TName("bin", (ar.Sub(n, ar.Const(1)),)))
    ix = signature("indexed")
    sx.check_type_valid(ix, ["x", "y"], ar.TRUE, sx.TName("ctr", (ar.Var("x"), ar.Var("y"))))


@pytest.mark.parametrize("name", ALL_FILES)
def test_corpus_types_valid(name):
    sx.check_signature_wellformed(signature(name))


MUTATED_TYPES = [
    "type nat{n} = +{zero : ?{n = 0}. 1, succ : nat{n-1}}",
    "type q{n} = &{del : +{some : ?{n >= 0}. q{n-1}}}",
    "type l{n} = +{cons : ?{n > 1}. l{n-2}, nil : l{n-1}}",
    "type c{x}{y} = +{lt : ?{x < y}. c{x}{x-y}}",
    "type e = ?m. e2{m-1}\ntype e2{k} = 1",
]


@pytest.mark.parametrize("src", MUTATED_TYPES)
def test_mutated_types_rejected(src):
    with pytest.raises(sx.InvalidIndex) as e:
        sx.check_signature_wellformed(parse_signature(src))
    assert e.value.span is not None


def test_contractivity_and_arity():
    with pytest.raises(sx.SignatureError):
        sx.check_signature_wellformed(parse_signature("type a = b\ntype b = a"))
    with pytest.raises(sx.ArityMismatch):
        sx.check_signature_wellformed(parse_signature("type a{n} = +{x : a}"))


def test_elaboration_names_subterms():
    sig = elaborated("equality")
    assert sig.types["nat"].body == sx.Plus((("zero", sx.TName("%nat.1")),
                                             ("succ", sx.TName("nat"))))
    assert sig.types["%nat.1"].body == sx.One()
    q = elaborated("queue")
    generated = [t for t in q.types.values() if t.generated and t.name.startswith("%queue")]
    assert generated and all(t.params in ((), ("n",)) for t in generated)


def _structural_children(a):
    match a:
        case sx.Plus(bs) | sx.With(bs):
            return [b for _, b in bs]
        case sx.Tensor(l, r) | sx.Lolli(l, r):
            return [l, r]
        case sx.One() | sx.TName():
            return []
    return [a.cont]


@pytest.mark.parametrize("name", ALL_FILES)
def test_elaborated_children_are_names(name):
    for td in elaborated(name).types.values():
        assert all(isinstance(c, sx.TName) for c in _structural_children(td.body))


def test_elaboration_idempotent_up_to_generated_names():
    sig = elaborated("queue")
    again = sx.elaborate_internal_names(sig)
    assert again.types == sig.types


@pytest.mark.parametrize("name", ALL_FILES)
def test_elaboration_preserves_meaning(name):
    rng = random.Random(name)
    src, ela = signature(name), elaborated(name)
    for td in src.types.values():
        for _ in range(4):
            vals = {v: rng.randint(0, 6) for v in td.params}
            a = sx.TName(td.name, tuple(ar.Const(vals[v]) for v in td.params))
            # the source body against its elaborated form, both read in the elaborated signature
            assert bounded_bisim_oracle(ela, sx.unfold(src, a), sx.unfold(ela, a), 6)


def test_polarize_examples():
    sig = parse_signature("type q = <{2}| +{a : 1}\ntype bad = !{1 = 1}. ?{2 = 2}. 1")
    assert sx.polarize(sig, parse_type("?{n = 0}. 1")) is sx.Polarity.POSITIVE
    assert sx.polarize(sig, sx.TName("q")) is sx.Polarity.NEGATIVE
    assert sx.polarize(sig, sx.TName("bad")) is sx.Polarity.ILL
    assert sx.polarize(sig, parse_type("|{1}> <{1}| 1")) is sx.Polarity.ILL


@pytest.mark.parametrize("name", ALL_FILES)
def test_declarations_are_structural(name):
    sig = elaborated(name)
    for d in sig.decls.values():
        for _, a in d.context + (d.offered,):
            assert sx.polarize(sig, a) is sx.Polarity.NEUTRAL, (d.name, a)


def test_channel_substitution_avoids_capture():
    p = parse_process("y <- recv x ; send l y ; {n} <- recv x ; l <- f{n}{k} <- x y")
    q = sx.subst_process(p, {"x": "c1", "l": "y"}, {"k": ar.Const(3)})
    assert render_process(q).split("\n") == [
        "y' <- recv c1 ;", "send y y' ;", "{n} <- recv c1 ;", "y <- f{n}{3} <- c1 y'"]
    assert sx.free_channels(p) == ("x", "l")
