"""Reconstruction of explicit processes from implicit ones.

Three passes per definition: missing case branches become `impossible`,
then constraint and potential constructs are placed by a polarized walk,
then work is inserted according to a cost model.

The walk keeps every channel type stable.  Assumptions and incoming
potential (`assume`, `get`) are taken as soon as a type exposes them;
assertions and outgoing potential (`assert`, `pay`) wait until the
channel is used for a real communication and are emitted right before
it.  Entailments are not decided here; the explicit checker run
afterwards does that and reports at the spans carried over from the
implicit source.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import arith as ar
from . import syntax as sx
from .parser import render_head, render_type
from .syntax import Type


class ReconError(Exception):
    def __init__(self, category: str, message: str, span=None, snapshot: str = ""):
        super().__init__(f"{category}: {message}")
        self.category = category
        self.message = message
        self.span = span
        self.snapshot = snapshot


class IllPolarized(ReconError):
    def __init__(self, message, span=None):
        super().__init__("ill-polarized type", message, span)


class ForcingFailed(ReconError):
    def __init__(self, message, span=None, snapshot=""):
        super().__init__("forcing failed", message, span, snapshot)


class WitnessMissing(ReconError):
    def __init__(self, message, span=None, snapshot=""):
        super().__init__("quantifier witness missing", message, span, snapshot)


class UnknownLabel(ReconError):
    def __init__(self, message, span=None, snapshot=""):
        super().__init__("unknown label", message, span, snapshot)


# ---------------------------------------------------------------------------
# Cost models


@dataclass(frozen=True)
class CostModel:
    """Which communications cost work, and how much each costs."""
    kind: str = "none"  # none | send | recv | flat
    amount: int = 1

    @staticmethod
    def parse(text: str) -> "CostModel":
        if text in ("none", "send", "recv"):
            return CostModel(text)
        if text.startswith("flat:"):
            return CostModel("flat", int(text[5:]))
        raise ValueError(f"unknown cost model {text!r}")

    def __str__(self):
        return f"flat:{self.amount}" if self.kind == "flat" else self.kind

    def cost(self, p: sx.Process) -> int:
        if self.kind in ("send", "flat"):
            charged = isinstance(p, (sx.SendLabel, sx.SendChan, sx.Close))
        elif self.kind == "recv":
            charged = isinstance(p, (sx.Case, sx.RecvChan, sx.Wait))
        else:
            charged = False
        return self.amount if charged else 0


NO_COST = CostModel()


# ---------------------------------------------------------------------------
# The polarized walk


@dataclass(frozen=True)
class _State:
    V: tuple[str, ...]
    ctx: tuple[tuple[str, Type], ...]
    offered: tuple[str, Type]

    def type_of(self, x):
        if x == self.offered[0]:
            return self.offered[1]
        for y, a in self.ctx:
            if y == x:
                return a
        return None

    def set(self, x, a) -> "_State":
        if x == self.offered[0]:
            return replace(self, offered=(x, a))
        return replace(self, ctx=tuple((y, a if y == x else b) for y, b in self.ctx))

    def drop(self, x) -> "_State":
        return replace(self, ctx=tuple((y, b) for y, b in self.ctx if y != x))

    def add(self, x, a) -> "_State":
        return replace(self, ctx=self.ctx + ((x, a),))


_MAX_PREFIX = 256


def _lead(node_type, x, payload, span):
    return node_type(x, payload, None, span=span, head=span)


def _chain(nodes, tail):
    for n in reversed(nodes):
        tail = replace(n, cont=tail)
    return tail


class _Walker:
    """Walks an implicit body along its typing; `insert=False` only adds branches."""

    def __init__(self, sig: sx.Signature, insert: bool = True):
        self.sig = sig
        self.insert = insert

    # -- diagnostics ----------------------------------------------------------

    def snapshot(self, st: _State, P) -> str:
        ctx = ", ".join(f"{y} : {render_type(a, self.sig)}" for y, a in st.ctx) or "."
        z, A = st.offered
        return (f"{', '.join(st.V) or '.'} ; {ctx} |- {render_head(P)} :: "
                f"({z} : {render_type(A, self.sig)})")

    def fail(self, st, P, msg, cls=ForcingFailed):
        raise cls(msg, P.head, self.snapshot(st, P))

    # -- invertible and lazy prefixes --------------------------------------------

    def peel(self, st, x, kinds, span):
        """Strip leading prefixes of the given kinds from x's type."""
        right = x == st.offered[0]
        a = st.type_of(x)
        out = []
        for _ in range(_MAX_PREFIX):
            u = sx.unfold(self.sig, a)
            if not isinstance(u, kinds):
                return out, st.set(x, a)
            match u:
                case sx.AssertT(phi, c) | sx.AssumeT(phi, c):
                    # assume on the side that receives the proof, assert on the other
                    receives = isinstance(u, sx.AssumeT) == right
                    out.append(_lead(sx.AssumeP if receives else sx.AssertP, x, phi, span))
                case sx.PayT(r, c) | sx.GetT(r, c):
                    receives = isinstance(u, sx.GetT) == right
                    out.append(_lead(sx.Get if receives else sx.Pay, x, r, span))
            a = c
        raise ForcingFailed(f"type of {x} has no structural form", span)

    def invert(self, st, xs, span):
        """Eager rules: offered channel first, then context entries right to left."""
        out = []
        z = st.offered[0]
        if z in xs:
            pre, st = self.peel(st, z, (sx.AssumeT, sx.GetT), span)
            out += pre
        for x in reversed(xs):
            if x != z:
                pre, st = self.peel(st, x, (sx.AssertT, sx.PayT), span)
                out += pre
        return (out if self.insert else []), st

    def force(self, st, x, span):
        kinds = (sx.AssertT, sx.PayT) if x == st.offered[0] else (sx.AssumeT, sx.GetT)
        pre, st = self.peel(st, x, kinds, span)
        return (pre if self.insert else []), st

    def structure(self, st, x, want, P):
        a = st.type_of(x)
        if a is None:
            self.fail(st, P, f"channel {x} is not available")
        u = sx.unfold(self.sig, a)
        if not isinstance(u, want):
            cls = WitnessMissing if isinstance(u, (sx.ExistsT, sx.ForallT)) else ForcingFailed
            self.fail(st, P, f"{render_head(P)} does not match {render_type(a, self.sig)}", cls)
        return u

    # -- main walk ---------------------------------------------------------------

    def start(self, V, ctx, offered, P):
        st = _State(tuple(V), tuple(ctx), offered)
        pre, st = self.invert(st, [offered[0]] + [y for y, _ in ctx], P.head)
        return _chain(pre, self.walk(st, P))

    def walk(self, st: _State, P: sx.Process) -> sx.Process:
        z = st.offered[0]
        right = lambda x: x == z  # noqa: E731
        match P:
            case sx.AssertP() | sx.AssumeP() | sx.Pay() | sx.Get() | sx.Work():
                self.fail(st, P, f"{render_head(P)} is not part of implicit syntax")

            case sx.Impossible():
                return P

            case sx.Fwd(x, y):
                pre1, st = self.force(st, x, P.head)
                pre2, st = self.force(st, y, P.head)
                return _chain(pre1 + pre2, P)

            case sx.Spawn():
                return self.spawn(st, P)

            case sx.SendLabel(x, k, cont):
                pre, st = self.force(st, x, P.head)
                u = self.structure(st, x, sx.Plus if right(x) else sx.With, P)
                t = dict(u.branches).get(k)
                if t is None:
                    self.fail(st, P, f"label {k} is not offered on {x}", UnknownLabel)
                post, st = self.invert(st.set(x, t), [x], P.head)
                return _chain(pre, replace(P, cont=_chain(post, self.walk(st, cont))))

            case sx.Case(x, bs):
                pre, st = self.force(st, x, P.head)
                u = self.structure(st, x, sx.With if right(x) else sx.Plus, P)
                types = dict(u.branches)
                for l, _ in bs:
                    if l not in types:
                        self.fail(st, P, f"case {x} has a branch {l} the type does not offer",
                                  UnknownLabel)
                have = {l for l, _ in bs}
                full = list(bs) + [(l, sx.Impossible(span=P.head, head=P.head))
                                   for l, _ in u.branches if l not in have]
                out = []
                for l, body in full:
                    post, bst = self.invert(st.set(x, types[l]), [x], body.head)
                    out.append((l, _chain(post, self.walk(bst, body))))
                return _chain(pre, replace(P, branches=tuple(out)))

            case sx.SendChan(x, w, cont):
                pre1, st = self.force(st, w, P.head)
                pre2, st = self.force(st, x, P.head)
                u = self.structure(st, x, sx.Tensor if right(x) else sx.Lolli, P)
                if st.type_of(w) is None:
                    self.fail(st, P, f"channel {w} is not available")
                st = st.drop(w).set(x, u.right)
                post, st = self.invert(st, [x], P.head)
                return _chain(pre1 + pre2, replace(P, cont=_chain(post, self.walk(st, cont))))

            case sx.RecvChan(x, y, cont):
                pre, st = self.force(st, x, P.head)
                u = self.structure(st, x, sx.Lolli if right(x) else sx.Tensor, P)
                st = st.set(x, u.right).add(y, u.left)
                post, st = self.invert(st, [x, y], P.head)
                return _chain(pre, replace(P, cont=_chain(post, self.walk(st, cont))))

            case sx.Close(x):
                pre, st = self.force(st, x, P.head)
                self.structure(st, x, sx.One, P)
                return _chain(pre, P)

            case sx.Wait(x, cont):
                pre, st = self.force(st, x, P.head)
                self.structure(st, x, sx.One, P)
                return _chain(pre, replace(P, cont=self.walk(st.drop(x), cont)))

            case sx.SendIdx(x, e, cont):
                pre, st = self.force(st, x, P.head)
                u = self.structure(st, x, sx.ExistsT if right(x) else sx.ForallT, P)
                st = st.set(x, sx.subst_type(u.cont, {u.var: e}))
                post, st = self.invert(st, [x], P.head)
                return _chain(pre, replace(P, cont=_chain(post, self.walk(st, cont))))

            case sx.RecvIdx(x, n, cont):
                pre, st = self.force(st, x, P.head)
                u = self.structure(st, x, sx.ForallT if right(x) else sx.ExistsT, P)
                st = replace(st.set(x, sx.subst_type(u.cont, {u.var: ar.Var(n)})), V=st.V + (n,))
                post, st = self.invert(st, [x], P.head)
                return _chain(pre, replace(P, cont=_chain(post, self.walk(st, cont))))
        raise TypeError(f"not a process: {P!r}")

    def spawn(self, st: _State, P: sx.Spawn) -> sx.Process:
        d = self.sig.decls.get(P.proc)
        if d is None:
            self.fail(st, P, f"unknown process {P.proc}")
        if len(P.idx) != len(d.params) or len(P.args) != len(d.context):
            self.fail(st, P, f"{P.proc} expects {len(d.params)} indices and "
                             f"{len(d.context)} channels")
        pre = []
        # the last argument is forced first, then force moves leftwards
        for y in reversed(P.args):
            if st.type_of(y) is None or y == st.offered[0]:
                self.fail(st, P, f"channel {y} is not available")
            more, st = self.force(st, y, P.head)
            pre += more
        for y in P.args:
            st = st.drop(y)
        result = sx.subst_type(d.offered[1], dict(zip(d.params, P.idx)))
        if P.cont is None:
            more, st = self.force(st, st.offered[0], P.head)
            return _chain(pre + more, P)
        post, st = self.invert(st.add(P.x, result), [P.x], P.head)
        return _chain(pre, replace(P, cont=_chain(post, self.walk(st, P.cont))))


# ---------------------------------------------------------------------------
# Passes


def _walk(esig: sx.Signature, name: str, P, insert: bool) -> sx.Process:
    from .typecheck import initial_sequent
    seq = initial_sequent(esig, name, P)
    return _Walker(esig, insert).start(seq.V, seq.ctx, seq.offered, seq.P)


def recon_branches(sig: sx.Signature, name: str, P: sx.Process | None = None) -> sx.Process:
    """Add `l => impossible` for every label a case leaves out."""
    return _walk(sx.elaborate_internal_names(sig), name, P, insert=False)


def recon_force(sig: sx.Signature, name: str, P: sx.Process | None = None) -> sx.Process:
    """Insert assume/assert/get/pay constructs (and missing branches)."""
    return _walk(sx.elaborate_internal_names(sig), name, P, insert=True)


def _charge(p: sx.Process, model: CostModel, skip: bool = False) -> sx.Process:
    """Put work before each charged communication, after asserts and before pays."""
    if isinstance(p, (sx.AssertP, sx.Pay)):
        run = []
        t = p
        while isinstance(t, (sx.AssertP, sx.Pay)):
            run.append(t)
            t = t.cont
        c = model.cost(t)
        nodes = list(run)
        if c:
            split = max((i + 1 for i, n in enumerate(run) if isinstance(n, sx.AssertP)), default=0)
            nodes.insert(split, sx.Work(ar.Const(c), None, span=t.head, head=t.head))
        return _chain(nodes, _charge(t, model, skip=bool(c)))
    c = 0 if skip else model.cost(p)
    match p:
        case sx.Case(_, bs):
            out = replace(p, branches=tuple((l, _charge(b, model)) for l, b in bs))
        case sx.Spawn(cont=None) | sx.Fwd() | sx.Close() | sx.Impossible():
            out = p
        case _:
            out = replace(p, cont=_charge(p.cont, model))
    if c:
        return sx.Work(ar.Const(c), out, span=p.head, head=p.head)
    return out


def _drain(sig, p: sx.Process, V, C, q) -> sx.Process:
    """Consume leftover potential right before each terminating construct."""
    match p:
        case sx.Case(_, bs):
            return replace(p, branches=tuple((l, _drain(sig, b, V, C, q)) for l, b in bs))
        case sx.Impossible():
            return p
        case sx.Fwd() | sx.Close() | sx.Spawn(cont=None):
            left = q
            if isinstance(p, sx.Spawn):
                left = ar.Sub(q, _spawn_cost(sig, p))
            try:
                zero = ar.entails(V, C, ar.eq(left, ar.Const(0)))
            except ar.ArithError:
                zero = True  # left for the checker to report
            if zero:
                return p
            return sx.Work(ar.normalize_exp(left), p, span=p.head, head=p.head)
        case sx.Work(r) | sx.Pay(_, r):
            q = ar.Sub(q, r)
        case sx.Get(_, r):
            q = ar.Add(q, r)
        case sx.AssumeP(_, phi):
            C = ar.conj(C, phi)
        case sx.RecvIdx(_, n):
            V = V + (n,)
        case sx.Spawn():
            q = ar.Sub(q, _spawn_cost(sig, p))
    return replace(p, cont=_drain(sig, p.cont, V, C, q))


def _spawn_cost(sig, p: sx.Spawn) -> ar.Exp:
    d = sig.decls[p.proc]
    return ar.subst_exp(d.potential, dict(zip(d.params, p.idx)))


def insert_work(sig: sx.Signature, name: str, P: sx.Process, model: CostModel = NO_COST):
    """Charge communications under `model`, then drain leftover potential at the leaves."""
    from .typecheck import initial_sequent
    seq = initial_sequent(sig, name, P)
    return _drain(sig, _charge(P, model), seq.V, seq.C, seq.q)


def reconstruct(sig: sx.Signature, model: CostModel | str | None = None) -> sx.Signature:
    """Turn every implicit definition of `sig` into an explicit one."""
    if model is None:
        model = NO_COST
    elif isinstance(model, str):
        model = CostModel.parse(model)
    esig = sx.elaborate_internal_names(sig)
    bad = sx.ill_polarized_types(esig)
    if bad:
        name = bad[0]
        td = esig.types[name]
        shown = render_type(sx.source_form(esig, td.body))
        raise IllPolarized(f"{shown} mixes assumptions and assertions", td.span)
    defs = {}
    for name, pd in sig.defs.items():
        body = _walk(esig, name, None, insert=True)
        body = insert_work(sig, name, body, model)
        defs[name] = replace(pd, body=body)
    return sig.with_defs(defs)
