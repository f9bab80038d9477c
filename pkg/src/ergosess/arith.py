"""Linear arithmetic over the natural numbers.

Index expressions and propositions, their evaluation, capture-avoiding
substitution, and a decision procedure based on Cooper's quantifier
elimination.  Every entailment the type checker needs is answered by
`entails`, which closes the query universally over the given variables,
eliminates all quantifiers and evaluates what is left.

Subtraction inside propositions is read as integer subtraction; keeping
it inside the naturals is the job of `check_nat`, which the checker calls
on every index expression it meets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Mapping, Union


class ArithError(Exception):
    pass


class Underflow(ArithError):
    """A natural-number subtraction went below zero."""


class NonlinearConstraint(ArithError):
    """A product of two non-constant expressions."""


class UnboundIndexVar(ArithError):
    """A proposition mentions a variable outside the declared context."""


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise Underflow(f"negative constant {self.value}")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Exp"
    right: "Exp"


@dataclass(frozen=True)
class Sub:
    left: "Exp"
    right: "Exp"


@dataclass(frozen=True)
class Scale:
    factor: int
    exp: "Exp"


Exp = Union[Const, Var, Add, Sub, Scale]


def mul(a: Exp, b: Exp) -> Scale:
    """Product of two expressions; one side must be closed."""
    if not exp_vars(a):
        return Scale(eval_exp(a), b)
    if not exp_vars(b):
        return Scale(eval_exp(b), a)
    raise NonlinearConstraint(f"nonlinear product ({render_exp(a)})*({render_exp(b)})")


# ---------------------------------------------------------------------------
# Propositions

COMPARISONS = ("=", ">", ">=", "<", "<=")


@dataclass(frozen=True)
class Cmp:
    """Comparison; `=` and `>` are primitive, the rest keep source shape."""

    op: str
    left: Exp
    right: Exp

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.op}")


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Prop"
    right: "Prop"


@dataclass(frozen=True)
class Or:
    left: "Prop"
    right: "Prop"


@dataclass(frozen=True)
class Not:
    body: "Prop"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Prop"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Prop"


@dataclass(frozen=True)
class Divides:
    """d divides e.  Only produced by elimination."""

    divisor: int
    exp: Exp


Prop = Union[Cmp, Top, Bot, And, Or, Not, Exists, Forall, Divides]

TRUE = Top()
FALSE = Bot()


def eq(a, b):
    return Cmp("=", a, b)


def gt(a, b):
    return Cmp(">", a, b)


def ge(a, b):
    return Cmp(">=", a, b)


def conj(*props: Prop) -> Prop:
    """Conjunction that drops `true` operands."""
    out: Prop | None = None
    for p in props:
        if isinstance(p, Top):
            continue
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(*props: Prop) -> Prop:
    out: Prop | None = None
    for p in props:
        if isinstance(p, Bot):
            continue
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def iff(a: Prop, b: Prop) -> Prop:
    return And(Or(Not(a), b), Or(Not(b), a))


# ---------------------------------------------------------------------------
# Free variables and substitution


def exp_vars(e: Exp) -> tuple[str, ...]:
    """Variables of `e` in first-occurrence order."""
    out: dict[str, None] = {}
    _exp_vars(e, out)
    return tuple(out)


def _exp_vars(e, out):
    match e:
        case Var(name):
            out.setdefault(name)
        case Add(a, b) | Sub(a, b):
            _exp_vars(a, out)
            _exp_vars(b, out)
        case Scale(_, a):
            _exp_vars(a, out)


def prop_vars(p: Prop) -> tuple[str, ...]:
    """Free variables of `p` in first-occurrence order."""
    out: dict[str, None] = {}
    _prop_vars(p, frozenset(), out)
    return tuple(out)


def _prop_vars(p, bound, out):
    match p:
        case Cmp(_, a, b):
            for v in exp_vars(a) + exp_vars(b):
                if v not in bound:
                    out.setdefault(v)
        case Divides(_, a):
            for v in exp_vars(a):
                if v not in bound:
                    out.setdefault(v)
        case And(a, b) | Or(a, b):
            _prop_vars(a, bound, out)
            _prop_vars(b, bound, out)
        case Not(a):
            _prop_vars(a, bound, out)
        case Exists(v, a) | Forall(v, a):
            _prop_vars(a, bound | {v}, out)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst_exp(e: Exp, sigma: Mapping[str, Exp]) -> Exp:
    match e:
        case Var(name):
            return sigma.get(name, e)
        case Add(a, b):
            return Add(subst_exp(a, sigma), subst_exp(b, sigma))
        case Sub(a, b):
            return Sub(subst_exp(a, sigma), subst_exp(b, sigma))
        case Scale(k, a):
            return Scale(k, subst_exp(a, sigma))
    return e


def subst_prop(p: Prop, sigma: Mapping[str, Exp]) -> Prop:
    if not sigma:
        return p
    match p:
        case Cmp(op, a, b):
            return Cmp(op, subst_exp(a, sigma), subst_exp(b, sigma))
        case Divides(d, a):
            return Divides(d, subst_exp(a, sigma))
        case And(a, b):
            return And(subst_prop(a, sigma), subst_prop(b, sigma))
        case Or(a, b):
            return Or(subst_prop(a, sigma), subst_prop(b, sigma))
        case Not(a):
            return Not(subst_prop(a, sigma))
        case Exists(v, a) | Forall(v, a):
            inner = {k: e for k, e in sigma.items() if k != v}
            if not inner:
                return p
            incoming = {x for k, e in inner.items() if k in prop_vars(a) for x in exp_vars(e)}
            if v in incoming:
                w = fresh_name(v, incoming | set(prop_vars(a)) | set(inner))
                a = subst_prop(a, {v: Var(w)})
                v = w
            return type(p)(v, subst_prop(a, inner))
    return p


def subst_idx(target, bindings: Mapping[str, Exp]):
    """Simultaneous capture-avoiding substitution into an expression or proposition."""
    if isinstance(target, (Const, Var, Add, Sub, Scale)):
        return subst_exp(target, bindings)
    return subst_prop(target, bindings)


# ---------------------------------------------------------------------------
# Evaluation


def eval_exp(e: Exp, env: Mapping[str, int] | None = None) -> int:
    match e:
        case Const(v):
            return v
        case Var(name):
            if env is None or name not in env:
                raise UnboundIndexVar(f"unbound index variable {name}")
            return env[name]
        case Add(a, b):
            return eval_exp(a, env) + eval_exp(b, env)
        case Sub(a, b):
            x, y = eval_exp(a, env), eval_exp(b, env)
            if x < y:
                raise Underflow(f"{render_exp(e)} is negative")
            return x - y
        case Scale(k, a):
            return k * eval_exp(a, env)
    raise TypeError(f"not an expression: {e!r}")


_CMP = {
    "=": lambda x, y: x == y,
    ">": lambda x, y: x > y,
    ">=": lambda x, y: x >= y,
    "<": lambda x, y: x < y,
    "<=": lambda x, y: x <= y,
}


def eval_prop(p: Prop, env: Mapping[str, int] | None = None) -> bool:
    match p:
        case Top():
            return True
        case Bot():
            return False
        case Cmp(op, a, b):
            return _CMP[op](eval_exp(a, env), eval_exp(b, env))
        case Divides(d, a):
            return eval_exp(a, env) % d == 0
        case And(a, b):
            return eval_prop(a, env) and eval_prop(b, env)
        case Or(a, b):
            return eval_prop(a, env) or eval_prop(b, env)
        case Not(a):
            return not eval_prop(a, env)
    raise ValueError(f"cannot evaluate quantified proposition {render_prop(p)}")


def fold_closed(e: Exp) -> Exp:
    """Replace a closed, non-negative expression by its value."""
    if isinstance(e, Const) or exp_vars(e):
        return e
    try:
        return Const(eval_exp(e))
    except Underflow:
        return e


# ---------------------------------------------------------------------------
# Rendering

def render_exp(e: Exp, prec: int = 0) -> str:
    match e:
        case Const(v):
            return str(v)
        case Var(name):
            return name
        case Add(a, b) | Sub(a, b):
            op = "+" if isinstance(e, Add) else "-"
            s = f"{render_exp(a, 1)}{op}{render_exp(b, 2)}"
            return f"({s})" if prec > 1 else s
        case Scale(k, a):
            s = f"{k}*{render_exp(a, 2)}"
            return f"({s})" if prec > 2 else s
    raise TypeError(f"not an expression: {e!r}")


def render_prop(p: Prop, prec: int = 0) -> str:
    match p:
        case Top():
            return "true"
        case Bot():
            return "false"
        case Cmp(op, a, b):
            return f"{render_exp(a)} {op} {render_exp(b)}"
        case Divides(d, a):
            return f"{d} | {render_exp(a)}"
        case Or(a, b):
            s = f"{render_prop(a, 1)} \\/ {render_prop(b, 2)}"
            return f"({s})" if prec > 1 else s
        case And(a, b):
            s = f"{render_prop(a, 2)} /\\ {render_prop(b, 3)}"
            return f"({s})" if prec > 2 else s
        case Not(a):
            return f"~{render_prop(a, 3)}"
        case Exists(v, a) | Forall(v, a):
            q = "exists" if isinstance(p, Exists) else "forall"
            s = f"{q} {v}. {render_prop(a)}"
            return f"({s})" if prec > 0 else s
    raise TypeError(f"not a proposition: {p!r}")


# ---------------------------------------------------------------------------
# Internal quantifier-free forms
#
# A linear term is (const, ((var, coeff), ...)) with sorted, nonzero coeffs.
# Formulas are tuples: ("T",), ("F",), ("and", parts), ("or", parts),
# ("gt", t) for t > 0, ("eq", t) for t = 0, ("dvd", d, t), ("ndvd", d, t).

T = ("T",)
F = ("F",)


def _lin(const: int, coeffs: Mapping[str, int]):
    return (const, tuple(sorted((v, c) for v, c in coeffs.items() if c)))


def _lin_of(e: Exp):
    acc: dict[str, int] = {}

    def go(e, k):
        match e:
            case Const(v):
                return k * v
            case Var(name):
                acc[name] = acc.get(name, 0) + k
                return 0
            case Add(a, b):
                return go(a, k) + go(b, k)
            case Sub(a, b):
                return go(a, k) + go(b, -k)
            case Scale(m, a):
                return go(a, k * m)
        raise TypeError(f"not an expression: {e!r}")

    c = go(e, 1)
    return _lin(c, acc)


def _lin_add(s, t, ks=1, kt=1):
    acc = {v: ks * c for v, c in s[1]}
    for v, c in t[1]:
        acc[v] = acc.get(v, 0) + kt * c
    return _lin(ks * s[0] + kt * t[0], acc)


def _lin_scale(t, k):
    return (k * t[0], tuple((v, k * c) for v, c in t[1]))


def _coeff(t, x):
    for v, c in t[1]:
        if v == x:
            return c
    return 0


def _drop(t, x):
    return (t[0], tuple((v, c) for v, c in t[1] if v != x))


def _ceil_div(a, b):
    return -((-a) // b)


def _mk_gt(t):
    c, cs = t
    if not cs:
        return T if c > 0 else F
    g = reduce(gcd, (abs(k) for _, k in cs))
    if g > 1:
        cs = tuple((v, k // g) for v, k in cs)
        c = _ceil_div(c, g)
    # all variables range over the naturals
    if c > 0 and all(k > 0 for _, k in cs):
        return T
    if c <= 0 and all(k < 0 for _, k in cs):
        return F
    return ("gt", (c, cs))


def _mk_eq(t):
    c, cs = t
    if not cs:
        return T if c == 0 else F
    g = reduce(gcd, (abs(k) for _, k in cs))
    if c % g:
        return F
    if g > 1:
        cs = tuple((v, k // g) for v, k in cs)
        c //= g
    if cs[0][1] < 0:
        c, cs = -c, tuple((v, -k) for v, k in cs)
    if all(k > 0 for _, k in cs) and c > 0:
        return F
    if all(k < 0 for _, k in cs) and c < 0:
        return F
    return ("eq", (c, cs))


def _mk_dvd(d, t, negated=False):
    c, cs = t
    cs = tuple((v, k % d) for v, k in cs if k % d)
    c %= d
    if not cs:
        holds = c == 0
        return (F if holds else T) if negated else (T if holds else F)
    g = reduce(gcd, (k for _, k in cs), gcd(d, c))
    if g > 1:
        d, c = d // g, c // g
        cs = tuple((v, k // g) for v, k in cs)
    if d == 1:
        return F if negated else T
    return ("ndvd" if negated else "dvd", d, (c, cs))


def _mk_and(parts):
    out = []
    for p in parts:
        if p == F:
            return F
        if p == T:
            continue
        for q in p[1] if p[0] == "and" else (p,):
            if q not in out:
                out.append(q)
    if not out:
        return T
    if len(out) == 1:
        return out[0]
    for q in out:
        if q[0] == "gt" and ("gt", _neg_gt_term(q[1])) in out:
            return F
    return ("and", tuple(out))


def _mk_or(parts):
    out = []
    for p in parts:
        if p == T:
            return T
        if p == F:
            continue
        for q in p[1] if p[0] == "or" else (p,):
            if q not in out:
                out.append(q)
    if not out:
        return F
    if len(out) == 1:
        return out[0]
    for q in out:
        if q[0] == "gt" and ("gt", _neg_gt_term(q[1])) in out:
            return T
    return ("or", tuple(out))


def _neg_gt_term(t):
    # not (t > 0)  <=>  -t + 1 > 0
    return (-t[0] + 1, tuple((v, -k) for v, k in t[1]))


def _neg(f):
    tag = f[0]
    if tag == "T":
        return F
    if tag == "F":
        return T
    if tag == "and":
        return _mk_or([_neg(p) for p in f[1]])
    if tag == "or":
        return _mk_and([_neg(p) for p in f[1]])
    if tag == "gt":
        return _mk_gt(_neg_gt_term(f[1]))
    if tag == "eq":
        t = f[1]
        return _mk_or([_mk_gt(t), _mk_gt(_lin_scale(t, -1))])
    if tag == "dvd":
        return _mk_dvd(f[1], f[2], negated=True)
    if tag == "ndvd":
        return _mk_dvd(f[1], f[2])
    raise ValueError(tag)


def _atom(op, a, b):
    d = _lin_add(_lin_of(a), _lin_of(b), 1, -1)  # a - b
    if op == "=":
        return _mk_eq(d)
    if op == ">":
        return _mk_gt(d)
    if op == ">=":
        return _mk_gt(_lin_add(d, (1, ())))
    if op == "<":
        return _mk_gt(_lin_scale(d, -1))
    return _mk_gt(_lin_add(_lin_scale(d, -1), (1, ())))


def _internal(p: Prop):
    """Translate to internal form, eliminating quantifiers innermost first."""
    match p:
        case Top():
            return T
        case Bot():
            return F
        case Cmp(op, a, b):
            return _atom(op, a, b)
        case Divides(d, a):
            return _mk_dvd(d, _lin_of(a))
        case And(a, b):
            return _mk_and([_internal(a), _internal(b)])
        case Or(a, b):
            return _mk_or([_internal(a), _internal(b)])
        case Not(a):
            return _neg(_internal(a))
        case Exists(v, a):
            return _exists(v, _internal(a))
        case Forall(v, a):
            return _neg(_exists(v, _neg(_internal(a))))
    raise TypeError(f"not a proposition: {p!r}")


def _mentions(f, x):
    tag = f[0]
    if tag in ("and", "or"):
        return any(_mentions(p, x) for p in f[1])
    if tag in ("gt", "eq"):
        return _coeff(f[1], x) != 0
    if tag in ("dvd", "ndvd"):
        return _coeff(f[2], x) != 0
    return False


def _subst(f, x, num, den=1):
    """Replace x by num/den (den > 0 divides num) and re-simplify."""
    tag = f[0]
    if tag == "and":
        return _mk_and([_subst(p, x, num, den) for p in f[1]])
    if tag == "or":
        return _mk_or([_subst(p, x, num, den) for p in f[1]])
    if tag in ("T", "F"):
        return f
    t = f[1] if tag in ("gt", "eq") else f[2]
    c = _coeff(t, x)
    if not c:
        return f
    new = _lin_add(_lin_scale(_drop(t, x), den), num, 1, c)
    if tag == "gt":
        return _mk_gt(new)
    if tag == "eq":
        return _mk_eq(new)
    return _mk_dvd(f[1] * den, new, negated=tag == "ndvd")


def _exists(x, f):
    """Eliminate `exists x` (x ranging over the naturals) from a q-free formula."""
    if not _mentions(f, x):
        return f
    if f[0] == "or":
        return _mk_or([_exists(x, p) for p in f[1]])
    parts = f[1] if f[0] == "and" else (f,)
    outside = [p for p in parts if not _mentions(p, x)]
    inside = [p for p in parts if _mentions(p, x)]
    body = _mk_and(inside)
    return _mk_and(outside + [_eliminate(x, body)])


def _eliminate(x, f):
    parts = f[1] if f[0] == "and" else (f,)
    # equality substitution: x = num/den with the smallest coefficient
    eqs = [p for p in parts if p[0] == "eq" and _coeff(p[1], x)]
    if eqs:
        best = min(eqs, key=lambda p: abs(_coeff(p[1], x)))
        a = _coeff(best[1], x)
        rest = _drop(best[1], x)
        num = _lin_scale(rest, -1) if a > 0 else rest
        den = abs(a)
        guards = [_mk_gt(_lin_add(num, (1, ())))]
        if den > 1:
            guards.append(_mk_dvd(den, num))
        return _mk_and(guards + [_subst(f, x, num, den)])
    return _cooper(x, f)


def _cooper(x, f):
    coeffs = []

    def collect(g):
        if g[0] in ("and", "or"):
            for p in g[1]:
                collect(p)
        elif g[0] in ("gt", "eq"):
            c = _coeff(g[1], x)
            if c:
                coeffs.append(abs(c))
        elif g[0] in ("dvd", "ndvd"):
            c = _coeff(g[2], x)
            if c:
                coeffs.append(abs(c))

    collect(f)
    m = reduce(_lcm, coeffs, 1)

    # scale each atom so the coefficient of x becomes +-1 (x now stands for m*x)
    def unit(g):
        tag = g[0]
        if tag in ("and", "or"):
            return (tag, tuple(unit(p) for p in g[1]))
        if tag in ("T", "F"):
            return g
        t = g[1] if tag in ("gt", "eq") else g[2]
        c = _coeff(t, x)
        if not c:
            return g
        k = m // abs(c)
        rest = _lin_scale(_drop(t, x), k)
        t2 = _lin_add(rest, (0, ((x, 1 if c > 0 else -1),)))
        if tag in ("gt", "eq"):
            return (tag, t2)
        return (tag, g[1] * k, t2)

    g = unit(f)
    extra = [("gt", (1, ((x, 1),)))]  # x >= 0
    if m > 1:
        extra.append(("dvd", m, (0, ((x, 1),))))
    g = ("and", tuple(extra) + ((g,) if g[0] != "and" else g[1]))

    bounds = []
    mods = []

    def scan(h):
        tag = h[0]
        if tag in ("and", "or"):
            for p in h[1]:
                scan(p)
        elif tag == "gt":
            c = _coeff(h[1], x)
            if c == 1:
                bounds.append(_lin_scale(_drop(h[1], x), -1))
        elif tag == "eq":
            c = _coeff(h[1], x)
            if c:
                b = _lin_scale(_drop(h[1], x), -c)
                bounds.append(_lin_add(b, (-1, ())))
        elif tag in ("dvd", "ndvd"):
            if _coeff(h[2], x):
                mods.append(h[1])

    scan(g)
    delta = reduce(_lcm, mods, 1)
    seen = []
    for b in bounds:
        if b not in seen:
            seen.append(b)
    out = []
    for b in seen:
        for j in range(1, delta + 1):
            r = _subst(g, x, _lin_add(b, (j, ())))
            if r == T:
                return T
            out.append(r)
    return _mk_or(out)


def _lcm(a, b):
    return a * b // gcd(a, b)


def _external(f) -> Prop:
    tag = f[0]
    if tag == "T":
        return TRUE
    if tag == "F":
        return FALSE
    if tag in ("and", "or"):
        ps = [_external(p) for p in f[1]]
        return reduce(And if tag == "and" else Or, ps)
    if tag in ("gt", "eq"):
        c, cs = f[1]
        lhs = _exp_from([(v, k) for v, k in cs if k > 0], max(c, 0))
        rhs = _exp_from([(v, -k) for v, k in cs if k < 0], max(-c, 0))
        return Cmp(">" if tag == "gt" else "=", lhs, rhs)
    d, (c, cs) = f[1], f[2]
    e = _exp_from([(v, k % d) for v, k in cs], c % d)
    return Divides(d, e) if tag == "dvd" else Not(Divides(d, e))


def _exp_from(terms, const) -> Exp:
    parts: list[Exp] = []
    for v, k in terms:
        if k:
            parts.append(Var(v) if k == 1 else Scale(k, Var(v)))
    if const or not parts:
        parts.append(Const(const))
    return reduce(Add, parts)


def normalize_exp(e: Exp) -> Exp:
    """Collect like terms, reading `-` as integer subtraction.

    Agrees with `e` whenever no subtraction in `e` underflows.
    """
    c, cs = _lin_of(e)
    pos = _exp_from([(v, k) for v, k in cs if k > 0], max(c, 0))
    neg = [(v, -k) for v, k in cs if k < 0]
    if neg or c < 0:
        return Sub(pos, _exp_from(neg, max(-c, 0)))
    return pos


def qe_cooper(p: Prop) -> Prop:
    """An equivalent quantifier-free proposition over the same free variables."""
    return _external(_internal(p))


# ---------------------------------------------------------------------------
# Entailment


def _check_scope(V, *props):
    allowed = set(V)
    for p in props:
        extra = [v for v in prop_vars(p) if v not in allowed]
        if extra:
            raise UnboundIndexVar(f"variables {', '.join(extra)} not in context")


@lru_cache(maxsize=200_000)
def _valid_closure(vs: tuple[str, ...], premise: Prop, goal: Prop) -> bool:
    f = _mk_and([_internal(premise), _neg(_internal(goal))])
    pending = list(vs)
    while pending and f not in (T, F):
        x = _pick_var(f, pending)
        pending.remove(x)
        f = _exists(x, f)
    # any remaining variable is unconstrained
    for x in pending:
        f = _exists(x, f)
    return f == F


def _pick_var(f, pending):
    parts = f[1] if f[0] == "and" else (f,)
    for p in parts:
        if p[0] == "eq":
            for v, c in p[1][1]:
                if v in pending and abs(c) == 1:
                    return v
    counts = {v: 0 for v in pending}

    def go(g):
        if g[0] in ("and", "or"):
            for p in g[1]:
                go(p)
        elif g[0] in ("gt", "eq", "dvd", "ndvd"):
            t = g[1] if g[0] in ("gt", "eq") else g[2]
            for v, _ in t[1]:
                if v in counts:
                    counts[v] += 1

    go(f)
    return min(pending, key=lambda v: (counts[v], pending.index(v)))


def entails(V: Iterable[str], C: Prop, phi: Prop) -> bool:
    """Whether C implies phi for all natural values of the variables V."""
    V = tuple(V)
    _check_scope(V, C, phi)
    used = set(prop_vars(C)) | set(prop_vars(phi))
    return _valid_closure(tuple(v for v in V if v in used), C, phi)


def satisfiable(V: Iterable[str], C: Prop) -> bool:
    return not entails(V, C, FALSE)


def first_underflow(V: Iterable[str], C: Prop, e: Exp) -> Sub | None:
    """The innermost subtraction of `e` not provably non-negative under C."""
    V = tuple(V)
    match e:
        case Add(a, b):
            return first_underflow(V, C, a) or first_underflow(V, C, b)
        case Scale(_, a):
            return first_underflow(V, C, a)
        case Sub(a, b):
            bad = first_underflow(V, C, a) or first_underflow(V, C, b)
            if bad:
                return bad
            return None if entails(V, C, ge(a, b)) else e
    return None


def check_nat(V: Iterable[str], C: Prop, e: Exp) -> bool:
    return first_underflow(V, C, e) is None
