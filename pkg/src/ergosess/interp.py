"""Asynchronous semantics as multiset rewriting, with work and potential meters.

A configuration holds `proc` objects (running processes) and `msg` objects
(messages in flight).  Every message carries its own continuation channel,
so sends never block.  Each object has a work counter `w` and a potential
counter `p`; no rule changes the sum of both over the whole configuration.

Scheduling is deterministic: each step scans the objects in creation order
and fires the first rule that applies.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from . import arith as ar
from . import syntax as sx
from .parser import render_head
from .syntax import Process, Type


class RuntimeFault(Exception):
    """A configuration that can neither step nor is poised."""


class BudgetExhausted(Exception):
    pass


class NonEmptyContext(Exception):
    pass


class ConstraintUnsatisfied(Exception):
    pass


@dataclass
class Obj:
    kind: str  # "proc" or "msg"
    chan: str  # the channel this object provides
    body: Process
    w: int = 0
    p: int = 0
    defn: str | None = None  # the definition a proc is executing

    def render(self) -> str:
        return f"{self.kind}({self.chan}, w={self.w}, p={self.p}, {render_head(self.body)})"


@dataclass(frozen=True)
class StepResult:
    kind: str  # "stepped" | "poised" | "stuck"
    rule: str = ""
    channels: tuple[str, ...] = ()
    reason: str = ""


POISED = StepResult("poised")


@dataclass
class Configuration:
    sig: sx.Signature  # elaborated and explicit
    objects: dict[int, Obj] = field(default_factory=dict)
    types: dict[str, Type] = field(default_factory=dict)
    root: str = "c"
    work_by_def: dict[str, int] = field(default_factory=lambda: defaultdict(int))
    debug: bool = True
    steps: int = 0
    _ids: itertools.count = field(default_factory=itertools.count)
    _chans: itertools.count = field(default_factory=lambda: itertools.count(1))

    # -- bookkeeping ----------------------------------------------------------

    def fresh(self) -> str:
        while True:
            c = f"c{next(self._chans)}"
            if c not in self.types:
                return c

    def add(self, obj: Obj) -> Obj:
        self.objects[next(self._ids)] = obj
        return obj

    def remove(self, obj: Obj):
        for k, o in self.objects.items():
            if o is obj:
                del self.objects[k]
                return

    def provider(self, c: str) -> Obj | None:
        for o in self.objects.values():
            if o.chan == c:
                return o
        return None

    def message_for(self, c: str) -> Obj | None:
        """A message sent by the client of c, waiting for c's provider."""
        for o in self.objects.values():
            if o.kind == "msg" and o.chan != c and _subject(o.body) == c:
                return o
        return None

    @property
    def total_work(self) -> int:
        return sum(o.w for o in self.objects.values())

    @property
    def total_potential(self) -> int:
        return sum(o.p for o in self.objects.values())

    @property
    def energy(self) -> int:
        return self.total_work + self.total_potential

    def totals_line(self) -> str:
        return f"work={self.total_work} potential={self.total_potential}"


def _subject(p: Process) -> str:
    return p.x


def _positive(m: Obj) -> bool:
    return _subject(m.body) == m.chan


# ---------------------------------------------------------------------------
# Setting up


def spawn_config(sig: sx.Signature, f: str, idx=(), debug: bool = True) -> Configuration:
    """A configuration running the closed process f{idx} on the external channel."""
    d = sig.decls.get(f)
    if d is None:
        raise KeyError(f"unknown process {f}")
    if d.context:
        raise NonEmptyContext(f"{f} needs channels {', '.join(x for x, _ in d.context)}")
    if len(idx) != len(d.params):
        raise ValueError(f"{f} expects {len(d.params)} indices")
    esig = sx.elaborate_internal_names(sig)
    values = {v: ar.Const(int(i)) for v, i in zip(d.params, idx)}
    if not ar.eval_prop(ar.subst_prop(d.constraint, values)):
        raise ConstraintUnsatisfied(
            f"{ar.render_prop(ar.subst_prop(d.constraint, values))} is false")
    cfg = Configuration(esig, debug=debug)
    d, pd = esig.decls[f], esig.defs[f]
    body = sx.subst_process(pd.body, {pd.offered: cfg.root},
                            {v: values[w] for w, v in zip(d.params, pd.params)})
    cfg.types[cfg.root] = sx.subst_type(d.offered[1], values)
    pot = ar.eval_exp(ar.subst_exp(d.potential, values))
    cfg.add(Obj("proc", cfg.root, body, 0, pot, f))
    return cfg


# ---------------------------------------------------------------------------
# Rewriting


class _Stuck(Exception):
    pass


def _value(e: ar.Exp) -> int:
    try:
        return ar.eval_exp(e)
    except ar.Underflow as exc:
        raise _Stuck(f"underflow in {ar.render_exp(e)}") from exc


def _holds(phi: ar.Prop) -> bool:
    try:
        return ar.eval_prop(phi)
    except ValueError:
        return ar.entails((), ar.TRUE, phi)


def _after(sig, a: Type, node: Process) -> Type:
    """The type of a channel once `node` has communicated along it."""
    u = sx.unfold(sig, a)
    match node:
        case sx.SendLabel(_, k):
            return dict(u.branches)[k]
        case sx.SendChan():
            return u.right
        case sx.SendIdx(_, e):
            return sx.subst_type(u.cont, {u.var: e})
        case sx.AssertP() | sx.Pay():
            return u.cont
    raise TypeError(node)


# a message form and the receiving construct that consumes it
_RECEIVER = {sx.SendLabel: sx.Case, sx.SendChan: sx.RecvChan, sx.Close: sx.Wait,
             sx.SendIdx: sx.RecvIdx, sx.AssertP: sx.AssumeP, sx.Pay: sx.Get}
_SENDS = (sx.SendLabel, sx.SendChan, sx.SendIdx, sx.AssertP, sx.Pay)
_RECEIVES = (sx.Case, sx.RecvChan, sx.Wait, sx.RecvIdx, sx.AssumeP, sx.Get)

_RULE_NAMES = {sx.SendLabel: ("+", "&"), sx.SendChan: ("*", "-o"), sx.SendIdx: ("?n", "!n"),
               sx.AssertP: ("?", "!"), sx.Pay: ("|>", "<|")}


def _receive(cfg: Configuration, o: Obj, m: Obj, cont_chan: str, subject: str):
    """Let proc o consume message m on `subject`; the channel continues as cont_chan."""
    P, M = o.body, m.body
    if not isinstance(P, _RECEIVER[type(M)]):
        raise _Stuck(f"{render_head(P)} cannot receive {render_head(M)}")
    o.w += m.w
    o.p += m.p
    cfg.remove(m)
    ren = {subject: cont_chan} if cont_chan else {}
    match P:
        case sx.Case(_, bs):
            body = dict(bs).get(M.label)
            if body is None:
                raise _Stuck(f"no branch for {M.label}")
            o.body = sx.subst_process(body, ren)
        case sx.RecvChan(_, y, cont):
            o.body = sx.subst_process(cont, {**ren, y: M.w})
        case sx.Wait(_, cont):
            o.body = cont
        case sx.RecvIdx(_, n, cont):
            o.body = sx.subst_process(cont, ren, {n: M.exp})
        case sx.AssumeP(_, _, cont) | sx.Get(_, _, cont):
            o.body = sx.subst_process(cont, ren)


def _try(cfg: Configuration, o: Obj) -> StepResult | None:
    P, c = o.body, o.chan
    sig = cfg.sig
    match P:
        case sx.Work(r, cont):
            v = _value(r)
            if v > o.p:
                raise _Stuck(f"work {v} exceeds potential {o.p}")
            o.p -= v
            o.w += v
            cfg.work_by_def[o.defn] += v
            o.body = cont
            return StepResult("stepped", "work", (c,))

        case sx.Impossible():
            raise _Stuck("impossible reached")

        case sx.Spawn(x, f, es, ys, cont):
            d, pd = sig.decls[f], sig.defs[f]
            values = {v: ar.Const(_value(e)) for v, e in zip(d.params, es)}
            if cfg.debug and not _holds(ar.subst_prop(d.constraint, values)):
                raise _Stuck(f"constraint of {f} is false")
            cost = _value(ar.subst_exp(d.potential, values))
            if cost > o.p:
                raise _Stuck(f"spawning {f} needs {cost}, has {o.p}")
            ren = dict(zip(pd.args, ys))
            sub = {v: values[w] for w, v in zip(d.params, pd.params)}
            if cont is None:
                o.body = sx.subst_process(pd.body, {**ren, pd.offered: c}, sub)
                o.defn = f
                return StepResult("stepped", "tail", (c,))
            a = cfg.fresh()
            cfg.types[a] = sx.subst_type(d.offered[1], values)
            o.p -= cost
            o.body = sx.subst_process(cont, {x: a})
            cfg.add(Obj("proc", a, sx.subst_process(pd.body, {**ren, pd.offered: a}, sub),
                        0, cost, f))
            return StepResult("stepped", "def", (c, a))

        case sx.Close(x) if x == c:
            o.kind = "msg"
            return StepResult("stepped", "1S", (c,))

        case _ if isinstance(P, _SENDS):
            x = P.x
            if isinstance(P, sx.AssertP) and cfg.debug and not _holds(P.prop):
                raise _Stuck(f"assertion {ar.render_prop(P.prop)} is false")
            paid = 0
            if isinstance(P, sx.Pay):
                paid = _value(P.pot)
                if paid > o.p:
                    raise _Stuck(f"paying {paid} exceeds potential {o.p}")
                o.p -= paid
            if isinstance(P, sx.SendIdx):
                P = sx.SendIdx(x, ar.Const(_value(P.exp)), P.cont, span=P.span, head=P.head)
            c2 = cfg.fresh()
            cfg.types[c2] = _after(sig, cfg.types[x], P)
            pos, neg = _RULE_NAMES[type(P)]
            if x == c:
                # the provider sends; it continues on c2
                cfg.add(Obj("msg", c, _message(P, sx.Fwd(c, c2)), 0, paid))
                o.chan = c2
                o.body = sx.subst_process(P.cont, {c: c2})
                return StepResult("stepped", pos + "S", (c, c2))
            cfg.add(Obj("msg", c2, _message(P, sx.Fwd(c2, x)), 0, paid))
            o.body = sx.subst_process(P.cont, {x: c2})
            return StepResult("stepped", neg + "S", (x, c2))

        case _ if isinstance(P, _RECEIVES):
            x = P.x
            if x != c:
                m = cfg.provider(x)
                if m is None or m.kind != "msg" or not _positive(m):
                    return None
                nxt = m.body.cont.y if not isinstance(m.body, sx.Close) else None
                _receive(cfg, o, m, nxt, x)
                return StepResult("stepped", "C", (x,))
            m = cfg.message_for(c)
            if m is None:
                return None
            c2 = m.chan
            o.chan = c2
            _receive(cfg, o, m, c2, c)
            return StepResult("stepped", "C", (c, c2))

        case sx.Fwd(_, d):
            m = cfg.provider(d)
            if m is not None and m.kind == "msg" and _positive(m):
                m.chan = c
                m.body = sx.subst_process(m.body, {d: c})
                m.w += o.w
                m.p += o.p
                cfg.remove(o)
                return StepResult("stepped", "id+", (c, d))
            m = cfg.message_for(c)
            if m is not None:
                m.body = sx.subst_process(m.body, {c: d})
                m.w += o.w
                m.p += o.p
                cfg.remove(o)
                return StepResult("stepped", "id-", (c, d))
            return None
    return None


def _message(P: Process, fwd: sx.Fwd) -> Process:
    """The message form of a send: the communication followed by its continuation link."""
    from dataclasses import replace
    return replace(P, cont=fwd)


def _poised(cfg: Configuration) -> bool:
    for o in cfg.objects.values():
        if o.kind == "msg":
            if not _positive(o):
                return False
        elif isinstance(o.body, _RECEIVES):
            if o.body.x != o.chan:
                return False
        elif not isinstance(o.body, sx.Fwd):
            return False
    return True


def external_trace(cfg: Configuration) -> list[str]:
    """The messages that have reached the outside, following the root channel."""
    out, c = [], cfg.root
    while True:
        m = cfg.provider(c)
        if m is None or m.kind != "msg" or not _positive(m):
            return out
        name = cfg.root
        match m.body:
            case sx.SendLabel(_, k):
                out.append(f"{name}.{k}")
            case sx.SendChan(_, w):
                out.append(f"send {name} {w}")
            case sx.SendIdx(_, e):
                out.append(f"send {name} {{{ar.render_exp(e)}}}")
            case sx.Close():
                out.append(f"close {name}")
                return out
        c = m.body.cont.y


def step(cfg: Configuration) -> StepResult:
    """Apply the first applicable rule; the configuration is updated in place."""
    for o in list(cfg.objects.values()):
        if o.kind != "proc":
            continue
        try:
            r = _try(cfg, o)
        except _Stuck as e:
            return StepResult("stuck", reason=f"{o.chan}: {e}")
        if r is not None:
            cfg.steps += 1
            return r
    return POISED if _poised(cfg) else StepResult("stuck", reason="deadlock")


@dataclass
class RunResult:
    config: Configuration
    steps: int
    trace: list[str]
    work: int
    potential: int

    def render(self) -> str:
        return "\n".join(self.trace + [f"work={self.work} potential={self.potential}"])


def run(cfg: Configuration, budget: int = 1_000_000, on_step=None) -> RunResult:
    """Step until poised; raises RuntimeFault when stuck and BudgetExhausted at the limit."""
    n = 0
    while True:
        r = step(cfg)
        if r.kind == "poised":
            break
        if r.kind == "stuck":
            raise RuntimeFault(r.reason)
        n += 1
        if on_step is not None:
            on_step(cfg, r)
        if n >= budget:
            raise BudgetExhausted(f"no poised configuration within {budget} steps")
    return RunResult(cfg, n, external_trace(cfg), cfg.total_work, cfg.total_potential)


# ---------------------------------------------------------------------------
# Configuration typing


def type_config(cfg: Configuration) -> None:
    """Check every object against the channel types; raises CheckError or RuntimeFault.

    Each object is checked with no index variables, since all indices are
    closed at runtime, and with its own potential.  Channels must be used
    linearly: one provider each and one client each, except the root.
    """
    from .typecheck import Sequent, check_process
    clients: dict[str, str] = {}
    providers: set[str] = set()
    for o in cfg.objects.values():
        if o.chan in providers:
            raise RuntimeFault(f"channel {o.chan} has two providers")
        providers.add(o.chan)
        used = [x for x in sx.free_channels(o.body) if x != o.chan]
        for x in used:
            if x in clients:
                raise RuntimeFault(f"channel {x} has two clients")
            clients[x] = o.chan
        ctx = tuple((x, cfg.types[x]) for x in used)
        check_process(Sequent((), ar.TRUE, ctx, ar.Const(o.p), o.body,
                              (o.chan, cfg.types[o.chan])), cfg.sig)
    for c in providers:
        if c not in clients and c != cfg.root:
            raise RuntimeFault(f"channel {c} has no client")
    for c in clients:
        if c not in providers:
            raise RuntimeFault(f"channel {c} has no provider")
