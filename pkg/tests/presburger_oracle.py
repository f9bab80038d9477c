"""Random formula generator and a brute-force evaluator for the arithmetic tests.

The evaluator works on numpy grids.  Free variables range over 0..GRID-1;
each quantifier is decided by exhaustive search over 0..bound-1 where the
bound is the largest constant an atom on that variable can reach plus the
lcm of all coefficients and divisors.  Past that point every comparison on
the variable is constant, so the search is exact when no atom mixes two
bound variables.  Coupled closed formulas use a single quantifier kind and are searched
over a box, cross-checked by widening the box.
"""

from __future__ import annotations

import random
from functools import reduce
from math import gcd

import numpy as np

from ergosess.arith import (
    Add, And, Bot, Cmp, Const, Divides, Exists, Forall, Not, Or, Scale, Sub, Top, Var,
)

GRID = 13
FREE = ("a", "b", "c")
BOUND = ("x", "y")
OPS = ("=", ">", ">=", "<", "<=")


def _term(rng, scope):
    if scope and rng.random() < 0.8:
        v = Var(rng.choice(scope))
        k = rng.randint(1, 4)
        return v if k == 1 else Scale(k, v)
    return Const(rng.randint(0, 8))


def _exp(rng, scope, must=None):
    e = Var(must) if must else _term(rng, scope)
    if must and rng.random() < 0.4:
        e = Scale(rng.randint(2, 4), e)
    for _ in range(rng.randint(0, 2)):
        t = _term(rng, scope)
        e = Sub(e, t) if rng.random() < 0.25 else Add(e, t)
    return e


def _atom(rng, free, bvar):
    scope = free + ([bvar] if bvar else [])
    left = _exp(rng, scope, bvar)
    right = _exp(rng, free) if rng.random() < 0.6 else Const(rng.randint(0, 8))
    if rng.random() < 0.5:
        left, right = right, left
    return Cmp(rng.choice(OPS), left, right)


def _body(rng, free, bvars, depth):
    if depth == 0 or rng.random() < 0.35:
        return _atom(rng, free, rng.choice(bvars) if bvars else None)
    kind = rng.choice(("and", "or", "not"))
    if kind == "not":
        return Not(_body(rng, free, bvars, depth - 1))
    a = _body(rng, free, bvars, depth - 1)
    b = _body(rng, free, bvars, depth - 1)
    return And(a, b) if kind == "and" else Or(a, b)


def gen_formula(rng: random.Random, coupled: bool = False):
    """A formula with <=2 quantifiers, <=3 free variables, coefficients <=4, constants <=8.

    Unless `coupled`, every atom mentions at most one bound variable, which
    is what makes the per-variable search bound of `truth_table` exact.
    Coupled formulas are closed and use one kind of quantifier twice, so a
    joint search over a box decides them.
    """
    nq = rng.choice((0, 1, 1, 2, 2)) if not coupled else 2
    nfree = 0 if coupled else rng.randint(0, 3 if nq < 2 else 2)
    free = list(FREE[:nfree])
    bound = list(BOUND[:nq])

    def build(i):
        if i == len(bound):
            return _body(rng, free, bound, 2)
        v = bound[i]
        inner = build(i + 1)
        if coupled:
            inner = And(inner, _atom(rng, bound[: i + 1], v)) if rng.random() < 0.5 else Or(inner, _atom(rng, bound[: i + 1], v))
        elif rng.random() < 0.3:
            inner = (And if rng.random() < 0.5 else Or)(inner, _atom(rng, free, v))
        return quant(v, inner)

    quant = Exists if rng.random() < 0.5 else Forall
    if not coupled:
        def quant(v, body):
            return (Exists if rng.random() < 0.5 else Forall)(v, body)
    return build(0), tuple(free)


# ---------------------------------------------------------------------------
# Brute-force evaluation


def _atoms(p):
    match p:
        case Cmp() | Divides():
            yield p
        case And(a, b) | Or(a, b):
            yield from _atoms(a)
            yield from _atoms(b)
        case Not(a) | Exists(_, a) | Forall(_, a):
            yield from _atoms(a)


def _lin(e, acc, k=1):
    """Accumulate coefficients; the constant lives under key None."""
    match e:
        case Const(v):
            acc[None] = acc.get(None, 0) + k * v
        case Var(name):
            acc[name] = acc.get(name, 0) + k
        case Add(a, b):
            _lin(a, acc, k)
            _lin(b, acc, k)
        case Sub(a, b):
            _lin(a, acc, k)
            _lin(b, acc, -k)
        case Scale(m, a):
            _lin(a, acc, k * m)
    return acc


def _lcm_all(p):
    nums = []
    for a in _atoms(p):
        if isinstance(a, Divides):
            nums.append(a.divisor)
        terms = _lin(a.exp, {}) if isinstance(a, Divides) else _lin(Sub(a.left, a.right), {})
        nums += [abs(c) for k, c in terms.items() if k is not None and c]
    return reduce(lambda x, y: x * y // gcd(x, y), nums, 1)


def _reach(p, v, maxima):
    """Largest |constant part| of an atom mentioning v, other variables at their maxima."""
    best = 0
    for a in _atoms(p):
        if isinstance(a, Divides):
            continue
        terms = _lin(Sub(a.left, a.right), {})
        if not terms.get(v):
            continue
        c = abs(terms.get(None, 0))
        c += sum(abs(k) * maxima.get(u, 0) for u, k in terms.items() if u not in (None, v))
        best = max(best, c)
    return best


def search_bound(p, maxima, widen=1):
    """Values 0..bound-1 that must be tried for the variable bound by p."""
    v, body = p.var, p.body
    lcm = _lcm_all(body)
    return (_reach(body, v, maxima) + lcm + 1) * widen


def box_bound(p, widen=1):
    """Search box for closed formulas whose bound variables share atoms."""
    lcm = _lcm_all(p)
    return 2 * (_total_const(p) + lcm) * widen


def _total_const(p):
    return sum(abs(_lin(Sub(a.left, a.right), {}).get(None, 0)) for a in _atoms(p) if isinstance(a, Cmp))


def _np_exp(e, env):
    match e:
        case Const(v):
            return np.int64(v)
        case Var(name):
            return env[name]
        case Add(a, b):
            return _np_exp(a, env) + _np_exp(b, env)
        case Sub(a, b):
            return _np_exp(a, env) - _np_exp(b, env)
        case Scale(k, a):
            return k * _np_exp(a, env)
    raise TypeError(e)


def np_eval(p, env, ndim, maxima=None, widen=1):
    """Truth of `p` as a boolean array; quantifiers add and then reduce an axis."""
    match p:
        case Top():
            return np.bool_(True)
        case Bot():
            return np.bool_(False)
        case Cmp(op, a, b):
            x, y = _np_exp(a, env), _np_exp(b, env)
            return {"=": x == y, ">": x > y, ">=": x >= y, "<": x < y, "<=": x <= y}[op]
        case Divides(d, a):
            return _np_exp(a, env) % d == 0
        case And(a, b):
            return np_eval(a, env, ndim, maxima, widen) & np_eval(b, env, ndim, maxima, widen)
        case Or(a, b):
            return np_eval(a, env, ndim, maxima, widen) | np_eval(b, env, ndim, maxima, widen)
        case Not(a):
            return ~np_eval(a, env, ndim, maxima, widen)
        case Exists(v, a) | Forall(v, a):
            n = maxima["box"] if "box" in maxima else search_bound(p, maxima, widen)
            maxima = {**maxima, v: n - 1}
            shape = [1] * (ndim + 1)
            shape[ndim] = n
            inner = {k: np.asarray(a_)[..., None] for k, a_ in env.items()}
            inner[v] = np.arange(n, dtype=np.int64).reshape(shape)
            val = np.asarray(np_eval(a, inner, ndim + 1, maxima, widen))
            val = np.broadcast_to(val, np.broadcast_shapes(val.shape, tuple(shape)))
            red = val.any(axis=ndim) if isinstance(p, Exists) else val.all(axis=ndim)
            return red
    raise TypeError(p)


def truth_table(p, free, widen=1, box=None):
    """Boolean array over GRID**len(free) assignments of the free variables."""
    k = len(free)
    env = {}
    for i, v in enumerate(free):
        shape = [1] * k
        shape[i] = GRID
        env[v] = np.arange(GRID, dtype=np.int64).reshape(shape)
    val = np.asarray(np_eval(p, env, k, {v: GRID - 1 for v in free} | ({"box": box} if box else {}), widen))
    return np.broadcast_to(val, (GRID,) * k)
