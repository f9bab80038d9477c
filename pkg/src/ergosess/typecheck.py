"""Syntax-directed checking of explicit processes.

A process is explicit when every constraint, potential transfer and unit of
work is written out.  The checker walks the body once, keeping the index
variables, the constraint, the linear context and the remaining potential;
all arithmetic side conditions go through `arith.entails`.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

from . import arith as ar
from . import syntax as sx
from .parser import render_head, render_type
from .syntax import Span, Type
from .typeeq import type_equal

CATEGORIES = (
    "label mismatch", "assertion not entailed", "insufficient potential", "channel misuse",
    "leftover context", "type mismatch", "unknown name", "not impossible",
)


class CheckError(Exception):
    def __init__(self, category: str, message: str, span: Span | None = None,
                 entailment: str = "", definition: str = ""):
        assert category in CATEGORIES, category
        super().__init__(f"{category}: {message}")
        self.category = category
        self.message = message
        self.span = span
        self.entailment = entailment
        self.definition = definition


def render_failure(C: ar.Prop, goal: ar.Prop) -> str:
    return f"{ar.render_prop(C)} |/= {ar.render_prop(goal)}"


@dataclass(frozen=True)
class Sequent:
    """V ; C ; ctx |{q}- P :: (x : A)"""
    V: tuple[str, ...]
    C: ar.Prop
    ctx: tuple[tuple[str, Type], ...]
    q: ar.Exp
    P: sx.Process
    offered: tuple[str, Type]


class _Checker:
    def __init__(self, sig: sx.Signature):
        self.sig = sig

    # -- side conditions ------------------------------------------------------

    def entail(self, s: Sequent, goal: ar.Prop, category: str, node):
        if not ar.entails(s.V, s.C, goal):
            msg = render_failure(s.C, goal)
            raise CheckError(category, msg, node.head, msg)

    def nat(self, s: Sequent, e: ar.Exp, node):
        extra = [v for v in ar.exp_vars(e) if v not in s.V]
        if extra:
            raise CheckError("unknown name", f"unbound index variable {extra[0]}", node.head)
        bad = ar.first_underflow(s.V, s.C, e)
        if bad is not None:
            self.entail(s, ar.ge(bad.left, bad.right), "assertion not entailed", node)

    def props_in_scope(self, s: Sequent, phi: ar.Prop, node):
        extra = [v for v in ar.prop_vars(phi) if v not in s.V]
        if extra:
            raise CheckError("unknown name", f"unbound index variable {extra[0]}", node.head)

    def equal(self, s: Sequent, a: Type, b: Type, what: str, node):
        r = type_equal(self.sig, s.V, s.C, a, b)
        if not r.equal:
            where = ".".join(r.path)
            raise CheckError(
                "type mismatch",
                f"{what}: {render_type(a, self.sig)} is not equal to {render_type(b, self.sig)}"
                + (f" (at {where}: {r.reason})" if r.path else f" ({r.reason})"),
                node.head)

    def shape(self, a: Type, want, chan: str, node) -> Type:
        u = sx.unfold(self.sig, a)
        if not isinstance(u, want):
            raise CheckError("type mismatch",
                             f"{render_head(node)} expects {chan} to have a different type "
                             f"than {render_type(a, self.sig)}", node.head)
        return u

    # -- context --------------------------------------------------------------

    def lookup(self, s: Sequent, x: str, node) -> Type:
        for y, a in s.ctx:
            if y == x:
                return a
        raise CheckError("channel misuse", f"channel {x} is not available", node.head)

    def side(self, s: Sequent, x: str, node) -> str:
        if x == s.offered[0]:
            return "R"
        self.lookup(s, x, node)
        return "L"

    def fresh(self, s: Sequent, y: str, node):
        if y == s.offered[0] or any(y == z for z, _ in s.ctx):
            raise CheckError("channel misuse", f"channel {y} is already in use", node.head)

    @staticmethod
    def without(ctx, x):
        return tuple((y, a) for y, a in ctx if y != x)

    @staticmethod
    def update(ctx, x, a):
        return tuple((y, a if y == x else b) for y, b in ctx)

    def empty_besides(self, s: Sequent, keep, node):
        rest = [y for y, _ in s.ctx if y not in keep]
        if rest:
            raise CheckError("leftover context",
                             f"channels {', '.join(rest)} are not consumed", node.head)

    # -- rules ----------------------------------------------------------------

    def check(self, s: Sequent):
        while s is not None:
            s = self.step(s)

    def step(self, s: Sequent) -> Sequent | None:
        """Apply the rule for the head of s.P; returns the next sequent or None."""
        P = s.P
        z, A = s.offered
        nxt = lambda **kw: Sequent(**{**s.__dict__, **kw})  # noqa: E731
        match P:
            case sx.Fwd(x, y):
                if x != z:
                    raise CheckError("channel misuse", f"{x} is not the offered channel", P.head)
                B = self.lookup(s, y, P)
                self.empty_besides(s, {y}, P)
                self.entail(s, ar.eq(s.q, ar.Const(0)), "insufficient potential", P)
                self.equal(s, B, A, f"forwarding {y} to {x}", P)
                return None

            case sx.Spawn():
                return self.spawn(s, P)

            case sx.SendLabel(x, k, cont):
                if self.side(s, x, P) == "R":
                    u = self.shape(A, sx.Plus, x, P)
                    t = self.branch(u, k, x, P)
                    return nxt(P=cont, offered=(z, t))
                u = self.shape(self.lookup(s, x, P), sx.With, x, P)
                t = self.branch(u, k, x, P)
                return nxt(P=cont, ctx=self.update(s.ctx, x, t))

            case sx.Case(x, bs):
                right = self.side(s, x, P) == "R"
                u = self.shape(A if right else self.lookup(s, x, P),
                               sx.With if right else sx.Plus, x, P)
                have = [l for l, _ in bs]
                want = [l for l, _ in u.branches]
                extra = [l for l in have if l not in want]
                missing = [l for l in want if l not in have]
                if extra or missing or len(set(have)) != len(have):
                    what = (f"unexpected label {extra[0]}" if extra else
                            f"missing branch {missing[0]}" if missing else "duplicate branch")
                    raise CheckError("label mismatch", f"case {x}: {what}", P.head)
                types = dict(u.branches)
                for l, body in bs:
                    if right:
                        self.check(nxt(P=body, offered=(z, types[l])))
                    else:
                        self.check(nxt(P=body, ctx=self.update(s.ctx, x, types[l])))
                return None

            case sx.SendChan(x, w, cont):
                if w == x:
                    raise CheckError("channel misuse", f"cannot send {x} along itself", P.head)
                W = self.lookup(s, w, P)
                if self.side(s, x, P) == "R":
                    u = self.shape(A, sx.Tensor, x, P)
                    self.equal(s, W, u.left, f"sending {w} on {x}", P)
                    return nxt(P=cont, ctx=self.without(s.ctx, w), offered=(z, u.right))
                u = self.shape(self.lookup(s, x, P), sx.Lolli, x, P)
                self.equal(s, W, u.left, f"sending {w} on {x}", P)
                return nxt(P=cont, ctx=self.update(self.without(s.ctx, w), x, u.right))

            case sx.RecvChan(x, y, cont):
                right = self.side(s, x, P) == "R"
                self.fresh(s, y, P)
                if right:
                    u = self.shape(A, sx.Lolli, x, P)
                    return nxt(P=cont, ctx=s.ctx + ((y, u.left),), offered=(z, u.right))
                u = self.shape(self.lookup(s, x, P), sx.Tensor, x, P)
                return nxt(P=cont, ctx=self.update(s.ctx, x, u.right) + ((y, u.left),))

            case sx.Close(x):
                if x != z:
                    raise CheckError("channel misuse", f"{x} is not the offered channel", P.head)
                self.shape(A, sx.One, x, P)
                self.empty_besides(s, set(), P)
                self.entail(s, ar.eq(s.q, ar.Const(0)), "insufficient potential", P)
                return None

            case sx.Wait(x, cont):
                if self.side(s, x, P) == "R":
                    raise CheckError("channel misuse", f"cannot wait on the offered channel {x}",
                                     P.head)
                self.shape(self.lookup(s, x, P), sx.One, x, P)
                return nxt(P=cont, ctx=self.without(s.ctx, x))

            case sx.SendIdx(x, e, cont):
                self.nat(s, e, P)
                if self.side(s, x, P) == "R":
                    u = self.shape(A, sx.ExistsT, x, P)
                    return nxt(P=cont, offered=(z, sx.subst_type(u.cont, {u.var: e})))
                u = self.shape(self.lookup(s, x, P), sx.ForallT, x, P)
                return nxt(P=cont, ctx=self.update(s.ctx, x, sx.subst_type(u.cont, {u.var: e})))

            case sx.RecvIdx(x, n, cont):
                if n in s.V:
                    raise CheckError("channel misuse", f"index variable {n} is already bound",
                                     P.head)
                V = s.V + (n,)
                if self.side(s, x, P) == "R":
                    u = self.shape(A, sx.ForallT, x, P)
                    t = sx.subst_type(u.cont, {u.var: ar.Var(n)})
                    return nxt(V=V, P=cont, offered=(z, t))
                u = self.shape(self.lookup(s, x, P), sx.ExistsT, x, P)
                t = sx.subst_type(u.cont, {u.var: ar.Var(n)})
                return nxt(V=V, P=cont, ctx=self.update(s.ctx, x, t))

            case sx.AssertP(x, phi, cont):
                self.props_in_scope(s, phi, P)
                right = self.side(s, x, P) == "R"
                u = self.shape(A if right else self.lookup(s, x, P),
                               sx.AssertT if right else sx.AssumeT, x, P)
                self.entail(s, phi, "assertion not entailed", P)
                self.entail(s, u.prop, "assertion not entailed", P)
                if right:
                    return nxt(P=cont, offered=(z, u.cont))
                return nxt(P=cont, ctx=self.update(s.ctx, x, u.cont))

            case sx.AssumeP(x, phi, cont):
                self.props_in_scope(s, phi, P)
                right = self.side(s, x, P) == "R"
                u = self.shape(A if right else self.lookup(s, x, P),
                               sx.AssumeT if right else sx.AssertT, x, P)
                if not ar.entails(s.V, ar.conj(s.C, u.prop), phi):
                    msg = render_failure(ar.conj(s.C, u.prop), phi)
                    raise CheckError("assertion not entailed", msg, P.head, msg)
                C = ar.conj(s.C, phi)
                if right:
                    return nxt(C=C, P=cont, offered=(z, u.cont))
                return nxt(C=C, P=cont, ctx=self.update(s.ctx, x, u.cont))

            case sx.Pay(x, r, cont):
                self.nat(s, r, P)
                right = self.side(s, x, P) == "R"
                u = self.shape(A if right else self.lookup(s, x, P),
                               sx.PayT if right else sx.GetT, x, P)
                self.entail(s, ar.ge(s.q, r), "insufficient potential", P)
                self.entail(s, ar.eq(r, u.pot), "type mismatch", P)
                q = ar.Sub(s.q, r)
                if right:
                    return nxt(P=cont, q=q, offered=(z, u.cont))
                return nxt(P=cont, q=q, ctx=self.update(s.ctx, x, u.cont))

            case sx.Get(x, r, cont):
                self.nat(s, r, P)
                right = self.side(s, x, P) == "R"
                u = self.shape(A if right else self.lookup(s, x, P),
                               sx.GetT if right else sx.PayT, x, P)
                self.entail(s, ar.eq(r, u.pot), "type mismatch", P)
                q = ar.Add(s.q, r)
                if right:
                    return nxt(P=cont, q=q, offered=(z, u.cont))
                return nxt(P=cont, q=q, ctx=self.update(s.ctx, x, u.cont))

            case sx.Work(r, cont):
                self.nat(s, r, P)
                self.entail(s, ar.ge(s.q, r), "insufficient potential", P)
                return nxt(P=cont, q=ar.Sub(s.q, r))

            case sx.Impossible():
                if not ar.entails(s.V, s.C, ar.FALSE):
                    raise CheckError("not impossible",
                                     f"{ar.render_prop(s.C)} is satisfiable", P.head,
                                     render_failure(s.C, ar.FALSE))
                return None
        raise TypeError(f"not a process: {P!r}")

    def branch(self, u, k, x, node) -> Type:
        for l, t in u.branches:
            if l == k:
                return t
        labels = ", ".join(l for l, _ in u.branches)
        raise CheckError("label mismatch", f"label {k} not in {{{labels}}} on {x}", node.head)

    def spawn(self, s: Sequent, P: sx.Spawn) -> Sequent | None:
        d = self.sig.decls.get(P.proc)
        if d is None:
            raise CheckError("unknown name", f"unknown process {P.proc}", P.head)
        if len(P.idx) != len(d.params) or len(P.args) != len(d.context):
            raise CheckError("type mismatch",
                             f"{P.proc} expects {len(d.params)} indices and "
                             f"{len(d.context)} channels", P.head)
        for e in P.idx:
            self.nat(s, e, P)
        sigma = dict(zip(d.params, P.idx))
        self.entail(s, ar.subst_prop(d.constraint, sigma), "assertion not entailed", P)
        cost = ar.subst_exp(d.potential, sigma)
        self.entail(s, ar.ge(s.q, cost), "insufficient potential", P)
        if len(set(P.args)) != len(P.args):
            raise CheckError("channel misuse", "a channel is passed twice", P.head)
        ctx = s.ctx
        for y, (_, want) in zip(P.args, d.context):
            if y == s.offered[0]:
                raise CheckError("channel misuse", f"cannot pass the offered channel {y}", P.head)
            have = self.lookup(s, y, P)
            self.equal(s, have, sx.subst_type(want, sigma), f"argument {y} of {P.proc}", P)
            ctx = self.without(ctx, y)
        result = sx.subst_type(d.offered[1], sigma)
        q = ar.Sub(s.q, cost)
        z, A = s.offered
        if P.cont is None:
            if P.x != z:
                raise CheckError("channel misuse", f"{P.x} is not the offered channel", P.head)
            rest = Sequent(s.V, s.C, ctx, q, P, s.offered)
            self.empty_besides(rest, set(), P)
            self.entail(rest, ar.eq(q, ar.Const(0)), "insufficient potential", P)
            self.equal(rest, result, A, f"result of {P.proc}", P)
            return None
        after = Sequent(s.V, s.C, ctx, q, P.cont, s.offered)
        self.fresh(after, P.x, P)
        return Sequent(s.V, s.C, ctx + ((P.x, result),), q, P.cont, s.offered)


# ---------------------------------------------------------------------------
# Entry points


def check_process(seq: Sequent, sig: sx.Signature) -> None:
    """Raise CheckError unless `seq` is derivable; `sig` must be elaborated."""
    _Checker(sig).check(seq)


def initial_sequent(sig: sx.Signature, name: str, body: sx.Process | None = None) -> Sequent:
    """The sequent a definition must satisfy, in the definition's own names."""
    d, pd = sig.decls[name], sig.defs[name]
    sigma = {v: ar.Var(w) for v, w in zip(d.params, pd.params)}
    ctx = tuple((y, sx.subst_type(a, sigma)) for y, (_, a) in zip(pd.args, d.context))
    offered = (pd.offered, sx.subst_type(d.offered[1], sigma))
    return Sequent(tuple(pd.params), ar.subst_prop(d.constraint, sigma), ctx,
                   ar.subst_exp(d.potential, sigma), pd.body if body is None else body, offered)


def check_definition(sig: sx.Signature, name: str) -> None:
    try:
        check_process(initial_sequent(sig, name), sig)
    except CheckError as e:
        e.definition = name
        raise


@dataclass
class Verdict:
    name: str
    ok: bool
    ms: float
    error: Exception | None = None

    def line(self) -> str:
        if self.ok:
            return f"{self.name}: ok ({self.ms:.1f} ms)"
        e = self.error
        return f"{self.name}: error:{getattr(e, 'category', 'error')}: {getattr(e, 'message', e)}"

    def json(self) -> str:
        out = {"name": self.name, "verdict": "ok" if self.ok else "error", "ms": round(self.ms, 3)}
        if not self.ok:
            out["category"] = getattr(self.error, "category", "error")
            out["message"] = getattr(self.error, "message", str(self.error))
        return json.dumps(out)


@dataclass
class Report:
    verdicts: list[Verdict] = field(default_factory=list)
    recon_ms: float = 0.0
    signature: sx.Signature | None = None  # the explicit signature that was checked
    error: Exception | None = None  # a failure before per-definition checking

    @property
    def ok(self) -> bool:
        return self.error is None and all(v.ok for v in self.verdicts)

    def errors(self) -> dict[str, Exception]:
        return {v.name: v.error for v in self.verdicts if not v.ok}

    def lines(self) -> list[str]:
        return [v.line() for v in self.verdicts]


def check_signature(sig: sx.Signature, mode: str = "explicit", cost=None) -> Report:
    """Validate types, elaborate, optionally reconstruct, then check every definition."""
    report = Report()
    try:
        sx.check_signature_wellformed(sig)
        if mode == "implicit":
            from .recon import reconstruct
            t0 = time.perf_counter()
            sig = reconstruct(sig, cost)
            report.recon_ms = (time.perf_counter() - t0) * 1000
        elif mode != "explicit":
            raise ValueError(f"unknown mode {mode}")
    except (sx.SignatureError, ar.ArithError) as e:
        report.error = e
        return report
    report.signature = sig
    esig = sx.elaborate_internal_names(sig)
    for name in sig.defs:
        t0 = time.perf_counter()
        try:
            check_definition(esig, name)
            err = None
        except (CheckError, sx.SignatureError, ar.ArithError) as e:
            err = e
        report.verdicts.append(Verdict(name, err is None, (time.perf_counter() - t0) * 1000, err))
    return report


# ---------------------------------------------------------------------------
# Erasure


def erase(p: sx.Process) -> sx.Process:
    """Drop the constructs implicit syntax leaves out, and impossible branches."""
    while isinstance(p, sx.IMPLICIT_NODES):
        p = p.cont
    match p:
        case sx.Case(x, bs):
            bodies = ((l, erase(b)) for l, b in bs)
            kept = tuple((l, b) for l, b in bodies if not isinstance(b, sx.Impossible))
            return replace(p, branches=kept)
        case sx.Spawn(cont=None) | sx.Fwd() | sx.Close() | sx.Impossible():
            return p
        case _:
            return replace(p, cont=erase(p.cont))


def erase_signature(sig: sx.Signature) -> sx.Signature:
    return sig.with_defs({n: replace(pd, body=erase(pd.body)) for n, pd in sig.defs.items()})
