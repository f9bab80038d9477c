"""Coinductive type equality over indexed, equirecursive session types.

The algorithm builds a bisimulation without backtracking.  Name/name goals
try, in order: an unsatisfiable constraint, reflexivity, an assumption
already in the context (instantiated through an existential), and finally
expansion of both names, which records the goal as a new assumption.
Choice types may differ in labels whose branches are dead, i.e. start
with a constraint refuted under the current assumptions.
Expansion is blocked once the same unordered pair of names is already
assumed, which keeps the search finite.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import arith as ar
from . import syntax as sx
from .syntax import Type


class Verdict(enum.Enum):
    EQUAL = "equal"
    NOT_EQUAL = "not-equal"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class EqResult:
    verdict: Verdict
    path: tuple[str, ...] = ()
    reason: str = ""

    @property
    def equal(self) -> bool:
        return self.verdict is Verdict.EQUAL

    def __bool__(self):
        return self.equal


@dataclass(frozen=True)
class Assumption:
    """forall vars. constraint => left{left_args} == right{right_args}"""
    vars: tuple[str, ...]
    constraint: ar.Prop
    left: str
    left_args: tuple[ar.Exp, ...]
    right: str
    right_args: tuple[ar.Exp, ...]


EQUAL = EqResult(Verdict.EQUAL)


class _Equality:
    def __init__(self, sig: sx.Signature):
        self.sig = sig
        self.counter = 0

    def fresh(self, avoid, base="k") -> str:
        while True:
            self.counter += 1
            name = f"{base}#{self.counter}"
            if name not in avoid:
                return name

    def unsat(self, V, C) -> bool:
        return ar.entails(V, C, ar.FALSE)

    def differ(self, V, C, path, reason) -> EqResult:
        if self.unsat(V, C):
            return EQUAL
        return EqResult(Verdict.NOT_EQUAL, path, reason)

    def eq(self, V, C, gamma, a: Type, b: Type, path) -> EqResult:
        if isinstance(a, sx.TName) and isinstance(b, sx.TName):
            return self.names(V, C, gamma, a, b, path)
        if isinstance(a, sx.TName):
            return self.eq(V, C, gamma, sx.unfold(self.sig, a), b, path)
        if isinstance(b, sx.TName):
            return self.eq(V, C, gamma, a, sx.unfold(self.sig, b), path)
        return self.structural(V, C, gamma, a, b, path)

    def names(self, V, C, gamma, a: sx.TName, b: sx.TName, path) -> EqResult:
        if self.unsat(V, C):
            return EQUAL
        if a.name == b.name and len(a.args) == len(b.args):
            if ar.entails(V, C, ar.conj(*(ar.eq(x, y) for x, y in zip(a.args, b.args)))):
                return EQUAL
        for g in gamma:
            if self.instance_of(V, C, g, a, b):
                return EQUAL
        pair = {a.name, b.name}
        if any({g.left, g.right} == pair for g in gamma):
            return EqResult(Verdict.UNKNOWN, path,
                            f"cannot relate {a.name} and {b.name} by an earlier assumption")
        g = self.assume(V, C, a, b)
        return self.eq(V, C, gamma + (g,), sx.unfold(self.sig, a), sx.unfold(self.sig, b), path)

    def assume(self, V, C, a, b) -> Assumption:
        # rename apart so the assumption can be instantiated under any context
        ren = {v: ar.Var(f"{v}@{self.counter + 1}") for v in V}
        self.counter += 1
        return Assumption(tuple(r.name for r in ren.values()), ar.subst_prop(C, ren),
                          a.name, tuple(ar.subst_exp(e, ren) for e in a.args),
                          b.name, tuple(ar.subst_exp(e, ren) for e in b.args))

    def instance_of(self, V, C, g: Assumption, a, b) -> bool:
        if (g.left, g.right) == (a.name, b.name):
            lhs, rhs = a.args, b.args
        elif (g.left, g.right) == (b.name, a.name):
            lhs, rhs = b.args, a.args
        else:
            return False
        if len(lhs) != len(g.left_args) or len(rhs) != len(g.right_args):
            return False
        body = ar.conj(g.constraint,
                       *(ar.eq(E, e) for E, e in zip(g.left_args, lhs)),
                       *(ar.eq(E, e) for E, e in zip(g.right_args, rhs)))
        for v in reversed(g.vars):
            body = ar.Exists(v, body)
        return ar.entails(V, C, body)

    def dead(self, V, C, t: Type, guard) -> bool:
        """A branch nobody can take: it starts with a refuted constraint."""
        t = sx.unfold(self.sig, t)
        return isinstance(t, guard) and ar.entails(V, C, ar.Not(t.prop))

    def structural(self, V, C, gamma, a: Type, b: Type, path) -> EqResult:
        if type(a) is not type(b):
            return self.differ(V, C, path, f"{_ctor(a)} vs {_ctor(b)}")
        match a:
            case sx.Plus(bs) | sx.With(bs):
                la, lb = [l for l, _ in bs], [l for l, _ in b.branches]
                guard = sx.AssertT if isinstance(a, sx.Plus) else sx.AssumeT
                one_sided = [(l, t) for l, t in bs if l not in lb] + \
                            [(l, t) for l, t in b.branches if l not in la]
                live = [l for l, t in one_sided if not self.dead(V, C, t, guard)]
                if live:
                    return self.differ(V, C, path + (live[0],),
                                       f"labels {{{', '.join(la)}}} vs {{{', '.join(lb)}}}")
                other = dict(b.branches)
                for label, t in bs:
                    if label not in other:
                        continue
                    r = self.eq(V, C, gamma, t, other[label], path + (label,))
                    if not r.equal:
                        return r
                return EQUAL
            case sx.Tensor(l, r) | sx.Lolli(l, r):
                sym = _ctor(a)
                first = self.eq(V, C, gamma, l, b.left, path + (f"{sym}1",))
                if not first.equal:
                    return first
                return self.eq(V, C, gamma, r, b.right, path + (f"{sym}2",))
            case sx.One():
                return EQUAL
            case sx.AssertT(phi, t) | sx.AssumeT(phi, t):
                if not ar.entails(V, C, ar.iff(phi, b.prop)):
                    return self.differ(V, C, path, f"constraints {ar.render_prop(phi)} "
                                                   f"and {ar.render_prop(b.prop)} differ")
                return self.eq(V, ar.conj(C, phi), gamma, t, b.cont, path + (_ctor(a),))
            case sx.ExistsT(m, t) | sx.ForallT(m, t):
                k = self.fresh(set(V))
                ta = sx.subst_type(t, {m: ar.Var(k)})
                tb = sx.subst_type(b.cont, {b.var: ar.Var(k)})
                return self.eq(tuple(V) + (k,), C, gamma, ta, tb, path + (_ctor(a),))
            case sx.PayT(r, t) | sx.GetT(r, t):
                if not ar.entails(V, C, ar.eq(r, b.pot)):
                    return self.differ(V, C, path, f"potentials {ar.render_exp(r)} "
                                                   f"and {ar.render_exp(b.pot)} differ")
                return self.eq(V, C, gamma, t, b.cont, path + (_ctor(a),))
        raise TypeError(f"not a type: {a!r}")


def _ctor(a: Type) -> str:
    return {
        sx.Plus: "+", sx.With: "&", sx.Tensor: "*", sx.Lolli: "-o", sx.One: "1",
        sx.TName: "name", sx.AssertT: "?{}", sx.AssumeT: "!{}", sx.ExistsT: "?n",
        sx.ForallT: "!n", sx.PayT: "|>", sx.GetT: "<|",
    }[type(a)]


def type_equal(sig: sx.Signature, V, C: ar.Prop, a: Type, b: Type) -> EqResult:
    """Decide V ; C |- a == b.  `sig` should be elaborated for termination."""
    V = tuple(V)
    eng = _Equality(sig)
    if eng.unsat(V, C):
        return EQUAL
    return eng.eq(V, C, (), a, b, ())


# ---------------------------------------------------------------------------
# Bounded bisimulation on ground types


QUANTIFIER_SAMPLES = (0, 1, 2, 5)


def bounded_bisim_oracle(sig: sx.Signature, a: Type, b: Type, depth: int) -> bool:
    """Check the bisimulation clauses on closed types up to `depth` constructors."""
    try:
        return _bisim(sig, a, b, depth)
    except ar.Underflow:
        return False


def _bisim(sig, a, b, depth) -> bool:
    if depth <= 0:
        return True
    a, b = sx.unfold(sig, a), sx.unfold(sig, b)
    if type(a) is not type(b):
        return False
    match a:
        case sx.Plus(bs) | sx.With(bs):
            other = dict(b.branches)
            guard = sx.AssertT if isinstance(a, sx.Plus) else sx.AssumeT
            for l, t in list(bs) + list(b.branches):
                if (l not in other or l not in dict(bs)) and not _dead(sig, t, guard):
                    return False
            return all(_bisim(sig, t, other[l], depth - 1) for l, t in bs if l in other)
        case sx.Tensor(l, r) | sx.Lolli(l, r):
            return _bisim(sig, l, b.left, depth - 1) and _bisim(sig, r, b.right, depth - 1)
        case sx.One():
            return True
        case sx.AssertT(phi, t) | sx.AssumeT(phi, t):
            pa, pb = _truth(phi), _truth(b.prop)
            if pa != pb:
                return False
            return not pa or _bisim(sig, t, b.cont, depth - 1)
        case sx.ExistsT(m, t) | sx.ForallT(m, t):
            return all(_bisim(sig, sx.subst_type(t, {m: ar.Const(i)}),
                              sx.subst_type(b.cont, {b.var: ar.Const(i)}), depth - 1)
                       for i in QUANTIFIER_SAMPLES)
        case sx.PayT(r, t) | sx.GetT(r, t):
            if ar.eval_exp(r) != ar.eval_exp(b.pot):
                return False
            return _bisim(sig, t, b.cont, depth - 1)
    raise TypeError(f"not a type: {a!r}")


def _truth(phi: ar.Prop) -> bool:
    try:
        return ar.eval_prop(phi)
    except ValueError:  # quantified
        return ar.entails((), ar.TRUE, phi)


def _dead(sig, t, guard) -> bool:
    t = sx.unfold(sig, t)
    return isinstance(t, guard) and not _truth(t.prop)
