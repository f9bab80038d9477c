import random

import pytest
from hypothesis import given, settings, strategies as st

from ergosess.arith import (
    FALSE, TRUE, Add, And, Bot, Cmp, Const, Exists, Forall, NonlinearConstraint, Not, Or, Scale,
    Sub, Top, UnboundIndexVar, Underflow, Var, check_nat, entails, eq, eval_exp, eval_prop,
    ge, gt, mul, prop_vars, qe_cooper, render_prop, subst_idx,
)
from presburger_oracle import box_bound, gen_formula, truth_table

n, k, m, x, y, p = map(Var, ["n", "k", "m", "x", "y", "p"])


def c(i):
    return Const(i)


def test_eval_examples():
    assert eval_exp(Add(c(2), c(3))) == 5
    assert eval_exp(Sub(Add(n, c(1)), c(1)), {"n": 0}) == 0
    assert eval_exp(Add(Scale(2, k), c(1)), {"k": 3}) == 7
    assert entails([], TRUE, eq(Add(Scale(2, c(3)), c(1)), c(7)))


def test_eval_underflow():
    with pytest.raises(Underflow):
        eval_exp(Sub(c(1), c(2)))


def test_eval_prop_examples():
    assert eval_prop(eq(c(0), c(0)))
    assert not eval_prop(gt(c(1), c(1)))
    assert eval_prop(And(eq(c(2), c(2)), Not(gt(c(3), c(4)))))


def test_qe_examples():
    parity = Forall("n", Exists("k", Or(eq(n, Scale(2, k)), eq(n, Add(Scale(2, k), c(1))))))
    assert qe_cooper(parity) == TRUE
    assert qe_cooper(Exists("k", And(gt(k, c(5)), eq(k, c(3))))) == FALSE
    even = qe_cooper(Exists("k", eq(n, Scale(2, k))))
    assert [eval_prop(even, {"n": i}) for i in range(21)] == [i % 2 == 0 for i in range(21)]


def test_entails_examples():
    X, Y = Var("X"), Var("Y")
    phi = Exists("X", Exists("Y", And(And(eq(X, Add(x, c(1))), eq(Y, y)),
                                      And(eq(Add(X, c(1)), Add(x, c(2))), eq(Add(Y, c(1)), Add(y, c(1)))))))
    assert entails(["x", "y"], TRUE, phi)
    assert not entails(["n"], eq(n, c(0)), gt(n, c(0)))
    assert entails(["n"], And(gt(n, c(0)), eq(n, c(0))), FALSE)


def test_entails_rejects_unscoped_variables():
    with pytest.raises(UnboundIndexVar):
        entails(["n"], TRUE, gt(m, c(0)))


def test_check_nat_examples():
    assert check_nat(["n"], gt(n, c(0)), Sub(n, c(1)))
    assert not check_nat(["n"], TRUE, Sub(n, c(1)))
    assert check_nat([], TRUE, Sub(c(5), c(2)))
    # inner subtraction is checked before the outer one
    assert not check_nat(["n"], TRUE, Add(Sub(n, c(1)), c(1)))


def test_subst_examples():
    assert subst_idx(Add(n, c(1)), {"n": Scale(2, k)}) == Add(Scale(2, k), c(1))
    assert subst_idx(Exists("n", eq(n, m)), {"m": n}) == Exists("n'", eq(Var("n'"), n))
    closed = subst_idx(eq(n, Scale(2, k)), {"n": c(6), "k": c(3)})
    assert render_prop(closed) == "6 = 2*3" and eval_prop(closed)


def test_nonlinear_rejected():
    assert mul(c(4), n) == Scale(4, n)
    assert mul(Add(c(1), c(1)), n) == Scale(2, n)
    with pytest.raises(NonlinearConstraint):
        mul(Add(p, c(2)), n)


def test_rendering():
    assert render_prop(ge(Sub(Add(p, c(1)), c(1)), c(1))) == "p+1-1 >= 1"
    assert render_prop(gt(Scale(2, n), c(0))) == "2*n > 0"
    assert render_prop(And(Or(TRUE, FALSE), Not(eq(n, c(0))))) == "(true \\/ false) /\\ ~n = 0"
    assert render_prop(eq(Sub(n, Add(k, c(1))), Scale(2, Add(n, k)))) == "n-(k+1) = 2*(n+k)"


def _has_quantifier(p):
    match p:
        case Exists() | Forall():
            return True
        case And(a, b) | Or(a, b):
            return _has_quantifier(a) or _has_quantifier(b)
        case Not(a):
            return _has_quantifier(a)
    return False


@settings(deadline=None, max_examples=200)
@given(st.integers(0, 2**32))
def test_qe_matches_oracle(seed):
    phi, free = gen_formula(random.Random(seed))
    out = qe_cooper(phi)
    assert not _has_quantifier(out)
    assert set(prop_vars(out)) <= set(free)
    assert (truth_table(phi, free) == truth_table(out, free)).all(), render_prop(phi)


@settings(deadline=None, max_examples=60)
@given(st.integers(0, 2**32))
def test_qe_matches_oracle_on_coupled_quantifiers(seed):
    phi, free = gen_formula(random.Random(seed), coupled=True)
    want = truth_table(phi, free, box=box_bound(phi))
    assert (want == truth_table(phi, free, box=box_bound(phi, 3))).all()
    assert (want == truth_table(qe_cooper(phi), free)).all(), render_prop(phi)


@settings(deadline=None, max_examples=100)
@given(st.integers(0, 2**32))
def test_eval_prop_spot_checks_on_qe_output(seed):
    rng = random.Random(seed)
    phi, free = gen_formula(rng)
    out = qe_cooper(phi)
    table = truth_table(phi, free)
    for _ in range(5):
        env = {v: rng.randint(0, 12) for v in free}
        assert eval_prop(out, env) == bool(table[tuple(env[v] for v in free)])


closed_exps = st.recursive(
    st.integers(0, 20).map(Const),
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda t: Add(*t)),
        st.tuples(st.integers(0, 4), inner).map(lambda t: Scale(*t)),
    ),
    max_leaves=6,
)
atoms = st.tuples(closed_exps, closed_exps, st.sampled_from(["=", ">", ">=", "<", "<="]))
closed_props = st.recursive(
    st.one_of(st.just(TRUE), st.just(FALSE),
              atoms.map(lambda t: Cmp(t[2], t[0], t[1]))),
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda t: And(*t)),
        st.tuples(inner, inner).map(lambda t: Or(*t)),
        inner.map(Not),
    ),
    max_leaves=6,
)


@settings(deadline=None, max_examples=200)
@given(closed_props)
def test_entails_agrees_with_eval_on_closed_props(phi):
    assert entails([], TRUE, phi) == eval_prop(phi)


@settings(deadline=None, max_examples=100)
@given(st.integers(0, 2**32))
def test_entails_trivial_goals(seed):
    rng = random.Random(seed)
    ctx, free = gen_formula(rng)
    goal, free2 = gen_formula(rng)
    V = sorted(set(free) | set(free2))
    assert entails(V, ctx, TRUE)
    assert entails(V, And(ctx, Bot()), goal)
    assert entails(V, And(ctx, Top()), ctx)


open_exps = st.recursive(
    st.one_of(st.integers(0, 9).map(Const), st.sampled_from(["a", "b", "c"]).map(Var)),
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda t: Add(*t)),
        st.tuples(st.integers(0, 4), inner).map(lambda t: Scale(*t)),
    ),
    max_leaves=6,
)


@settings(deadline=None, max_examples=100)
@given(open_exps, st.fixed_dictionaries({v: st.integers(0, 20) for v in "abc"}))
def test_subst_commutes_with_eval(e, env):
    closed = subst_idx(e, {v: Const(i) for v, i in env.items()})
    assert eval_exp(closed) == eval_exp(e, env)
