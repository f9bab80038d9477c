"""Abstract syntax of session types, processes and signatures.

Also holds the static well-formedness passes that only need the
signature: unfolding, type validity, internal naming of type
subexpressions and polarity classification.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Union

from . import arith as ar
from .arith import Exp, Prop


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int
    end_line: int
    end_col: int

    def cover(self, other: "Span | None") -> "Span":
        if other is None:
            return self
        a, b = (self, other) if self.start <= other.start else (other, self)
        last = self if self.end >= other.end else other
        return Span(a.start, last.end, a.line, a.col, last.end_line, last.end_col)

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


def _span():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Session types


@dataclass(frozen=True)
class Plus:
    branches: tuple[tuple[str, "Type"], ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class With:
    branches: tuple[tuple[str, "Type"], ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class Tensor:
    left: "Type"
    right: "Type"
    span: Span | None = _span()


@dataclass(frozen=True)
class Lolli:
    left: "Type"
    right: "Type"
    span: Span | None = _span()


@dataclass(frozen=True)
class One:
    span: Span | None = _span()


@dataclass(frozen=True)
class TName:
    name: str
    args: tuple[Exp, ...] = ()
    span: Span | None = _span()


@dataclass(frozen=True)
class AssertT:
    prop: Prop
    cont: "Type"
    span: Span | None = _span()


@dataclass(frozen=True)
class AssumeT:
    prop: Prop
    cont: "Type"
    span: Span | None = _span()


@dataclass(frozen=True)
class ExistsT:
    var: str
    cont: "Type"
    span: Span | None = _span()


@dataclass(frozen=True)
class ForallT:
    var: str
    cont: "Type"
    span: Span | None = _span()


@dataclass(frozen=True)
class PayT:
    pot: Exp
    cont: "Type"
    span: Span | None = _span()


@dataclass(frozen=True)
class GetT:
    pot: Exp
    cont: "Type"
    span: Span | None = _span()


Type = Union[Plus, With, Tensor, Lolli, One, TName, AssertT, AssumeT, ExistsT, ForallT, PayT, GetT]
STRUCTURAL = (Plus, With, Tensor, Lolli, One, ExistsT, ForallT)
PREFIXES = (AssertT, AssumeT, PayT, GetT)


# ---------------------------------------------------------------------------
# Processes


@dataclass(frozen=True)
class Fwd:
    x: str
    y: str
    span: Span | None = _span()
    head: Span | None = _span()  # the statement itself, for diagnostics


@dataclass(frozen=True)
class Spawn:
    """`x <- f{es} <- ys ; cont`; a missing continuation is a tail call."""

    x: str
    proc: str
    idx: tuple[Exp, ...]
    args: tuple[str, ...]
    cont: "Process | None"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class SendLabel:
    x: str
    label: str
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class Case:
    x: str
    branches: tuple[tuple[str, "Process"], ...]
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class SendChan:
    x: str
    w: str
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class RecvChan:
    x: str
    y: str
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class Close:
    x: str
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class Wait:
    x: str
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class SendIdx:
    x: str
    exp: Exp
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class RecvIdx:
    x: str
    var: str
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class AssertP:
    x: str
    prop: Prop
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class AssumeP:
    x: str
    prop: Prop
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class Pay:
    x: str
    pot: Exp
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class Get:
    x: str
    pot: Exp
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class Work:
    pot: Exp
    cont: "Process"
    span: Span | None = _span()
    head: Span | None = _span()


@dataclass(frozen=True)
class Impossible:
    span: Span | None = _span()
    head: Span | None = _span()


Process = Union[Fwd, Spawn, SendLabel, Case, SendChan, RecvChan, Close, Wait, SendIdx, RecvIdx,
                AssertP, AssumeP, Pay, Get, Work, Impossible]

# nodes whose only role is bookkeeping for refinements and potential
IMPLICIT_NODES = (AssertP, AssumeP, Pay, Get, Work)


def children(p: Process) -> list[Process]:
    match p:
        case Case(_, bs):
            return [b for _, b in bs]
        case Spawn(cont=None) | Fwd() | Close() | Impossible():
            return []
        case _:
            return [p.cont]


def subprocesses(p: Process):
    """Pre-order traversal."""
    yield p
    for c in children(p):
        yield from subprocesses(c)


def free_channels(p: Process) -> tuple[str, ...]:
    """Channels used but not bound by p, in first-occurrence order."""
    out: dict[str, None] = {}
    _free_channels(p, frozenset(), out)
    return tuple(out)


def _free_channels(p, bound, out):
    def use(*xs):
        for x in xs:
            if x not in bound:
                out.setdefault(x)

    match p:
        case Fwd(x, y):
            use(x, y)
        case Spawn(x, _, _, ys, cont):
            use(*ys)
            if cont is None:
                use(x)
            else:
                _free_channels(cont, bound | {x}, out)
        case Case(x, bs):
            use(x)
            for _, b in bs:
                _free_channels(b, bound, out)
        case SendChan(x, w, cont):
            use(x, w)
            _free_channels(cont, bound, out)
        case RecvChan(x, y, cont):
            use(x)
            _free_channels(cont, bound | {y}, out)
        case Close(x):
            use(x)
        case Work(_, cont):
            _free_channels(cont, bound, out)
        case Impossible():
            pass
        case _:
            use(p.x)
            _free_channels(p.cont, bound, out)


def subst_process(p: Process, chans: Mapping[str, str] | None = None,
                  idx: Mapping[str, Exp] | None = None) -> Process:
    """Rename free channels and substitute index variables, avoiding capture."""
    chans = dict(chans or {})
    idx = dict(idx or {})
    if not chans and not idx:
        return p
    ch = lambda x: chans.get(x, x)  # noqa: E731
    ex = lambda e: ar.fold_closed(ar.subst_exp(e, idx)) if idx else e  # noqa: E731
    pr = lambda phi: ar.subst_prop(phi, idx) if idx else phi  # noqa: E731

    def bind(y, cont):
        """Substitute under a channel binder y."""
        inner = {k: v for k, v in chans.items() if k != y}
        if y in inner.values():
            z = ar.fresh_name(y, set(inner.values()) | set(free_channels(cont)) | set(inner))
            inner[y] = z
            return z, subst_process(cont, inner, idx)
        return y, subst_process(cont, inner, idx)

    match p:
        case Fwd(x, y):
            return replace(p, x=ch(x), y=ch(y))
        case Spawn(x, f, es, ys, cont):
            es = tuple(ex(e) for e in es)
            ys = tuple(ch(y) for y in ys)
            if cont is None:
                return replace(p, x=ch(x), idx=es, args=ys)
            x, cont = bind(x, cont)
            return replace(p, x=x, idx=es, args=ys, cont=cont)
        case Case(x, bs):
            return replace(p, x=ch(x),
                           branches=tuple((l, subst_process(b, chans, idx)) for l, b in bs))
        case SendLabel(x, _, cont):
            return replace(p, x=ch(x), cont=subst_process(cont, chans, idx))
        case SendChan(x, w, cont):
            return replace(p, x=ch(x), w=ch(w), cont=subst_process(cont, chans, idx))
        case RecvChan(x, y, cont):
            y, cont = bind(y, cont)
            return replace(p, x=ch(x), y=y, cont=cont)
        case Close(x):
            return replace(p, x=ch(x))
        case Wait(x, cont):
            return replace(p, x=ch(x), cont=subst_process(cont, chans, idx))
        case SendIdx(x, e, cont):
            return replace(p, x=ch(x), exp=ex(e), cont=subst_process(cont, chans, idx))
        case RecvIdx(x, n, cont):
            inner = {k: v for k, v in idx.items() if k != n}
            incoming = {v for e in inner.values() for v in ar.exp_vars(e)}
            if n in incoming:
                m = ar.fresh_name(n, incoming | set(inner))
                cont = subst_process(cont, {}, {n: ar.Var(m)})
                n = m
            return replace(p, x=ch(x), var=n, cont=subst_process(cont, chans, inner))
        case AssertP(x, phi, cont) | AssumeP(x, phi, cont):
            return replace(p, x=ch(x), prop=pr(phi), cont=subst_process(cont, chans, idx))
        case Pay(x, r, cont) | Get(x, r, cont):
            return replace(p, x=ch(x), pot=ex(r), cont=subst_process(cont, chans, idx))
        case Work(r, cont):
            return replace(p, pot=ex(r), cont=subst_process(cont, chans, idx))
        case Impossible():
            return p
    raise TypeError(f"not a process: {p!r}")


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class TypeDef:
    name: str
    params: tuple[str, ...]
    body: Type
    span: Span | None = _span()
    generated: bool = False


@dataclass(frozen=True)
class ProcDecl:
    name: str
    params: tuple[str, ...]
    constraint: Prop
    context: tuple[tuple[str, Type], ...]
    potential: Exp
    offered: tuple[str, Type]
    span: Span | None = _span()


@dataclass(frozen=True)
class ProcDef:
    name: str
    offered: str
    params: tuple[str, ...]
    args: tuple[str, ...]
    body: Process
    span: Span | None = _span()


@dataclass(frozen=True)
class Signature:
    types: Mapping[str, TypeDef]
    decls: Mapping[str, ProcDecl]
    defs: Mapping[str, ProcDef]
    order: tuple[tuple[str, str], ...] = ()  # (kind, name) in source order

    def __eq__(self, other):
        return (isinstance(other, Signature) and dict(self.types) == dict(other.types)
                and dict(self.decls) == dict(other.decls) and dict(self.defs) == dict(other.defs))

    def __hash__(self):
        return id(self)

    def with_defs(self, defs: Mapping[str, ProcDef]) -> "Signature":
        return replace(self, defs=dict(defs))

    def source_types(self):
        return {k: t for k, t in self.types.items() if not t.generated}


# ---------------------------------------------------------------------------
# Errors


class SignatureError(Exception):
    def __init__(self, message: str, span: Span | None = None, category: str = "ill-formed signature"):
        super().__init__(message)
        self.message = message
        self.span = span
        self.category = category


class UnknownTypeName(SignatureError):
    def __init__(self, name, span=None):
        super().__init__(f"unknown type name {name}", span, "unknown name")


class ArityMismatch(SignatureError):
    def __init__(self, message, span=None):
        super().__init__(message, span, "arity mismatch")


class InvalidIndex(SignatureError):
    def __init__(self, message, span=None, path=()):
        super().__init__(message, span, "invalid index")
        self.path = tuple(path)


# ---------------------------------------------------------------------------
# Index variables and substitution in types


def type_vars(a: Type) -> tuple[str, ...]:
    """Free index variables in first-occurrence order."""
    out: dict[str, None] = {}
    _type_vars(a, frozenset(), out)
    return tuple(out)


def _type_vars(a, bound, out):
    def add(vs):
        for v in vs:
            if v not in bound:
                out.setdefault(v)

    match a:
        case Plus(bs) | With(bs):
            for _, b in bs:
                _type_vars(b, bound, out)
        case Tensor(l, r) | Lolli(l, r):
            _type_vars(l, bound, out)
            _type_vars(r, bound, out)
        case TName(_, args):
            for e in args:
                add(ar.exp_vars(e))
        case AssertT(p, c) | AssumeT(p, c):
            add(ar.prop_vars(p))
            _type_vars(c, bound, out)
        case PayT(e, c) | GetT(e, c):
            add(ar.exp_vars(e))
            _type_vars(c, bound, out)
        case ExistsT(v, c) | ForallT(v, c):
            _type_vars(c, bound | {v}, out)


def subst_type(a: Type, sigma: Mapping[str, Exp]) -> Type:
    """Capture-avoiding substitution of index expressions into a type."""
    if not sigma:
        return a
    match a:
        case Plus(bs):
            return Plus(tuple((l, subst_type(b, sigma)) for l, b in bs), a.span)
        case With(bs):
            return With(tuple((l, subst_type(b, sigma)) for l, b in bs), a.span)
        case Tensor(l, r):
            return Tensor(subst_type(l, sigma), subst_type(r, sigma), a.span)
        case Lolli(l, r):
            return Lolli(subst_type(l, sigma), subst_type(r, sigma), a.span)
        case One():
            return a
        case TName(n, args):
            return TName(n, tuple(ar.subst_exp(e, sigma) for e in args), a.span)
        case AssertT(p, c):
            return AssertT(ar.subst_prop(p, sigma), subst_type(c, sigma), a.span)
        case AssumeT(p, c):
            return AssumeT(ar.subst_prop(p, sigma), subst_type(c, sigma), a.span)
        case PayT(e, c):
            return PayT(ar.subst_exp(e, sigma), subst_type(c, sigma), a.span)
        case GetT(e, c):
            return GetT(ar.subst_exp(e, sigma), subst_type(c, sigma), a.span)
        case ExistsT(v, c) | ForallT(v, c):
            inner = {k: e for k, e in sigma.items() if k != v}
            if not inner:
                return a
            incoming = {x for e in inner.values() for x in ar.exp_vars(e)}
            if v in incoming:
                w = ar.fresh_name(v, incoming | set(type_vars(c)) | set(inner))
                c = subst_type(c, {v: ar.Var(w)})
                v = w
            return type(a)(v, subst_type(c, inner), a.span)
    raise TypeError(f"not a type: {a!r}")


def fold_type_indices(a: Type) -> Type:
    """Evaluate closed index arguments of the outermost name, if any."""
    if isinstance(a, TName):
        return TName(a.name, tuple(ar.fold_closed(e) for e in a.args), a.span)
    return a


# ---------------------------------------------------------------------------
# Unfolding


def lookup_type(sig: Signature, name: str, span=None) -> TypeDef:
    td = sig.types.get(name)
    if td is None:
        raise UnknownTypeName(name, span)
    return td


def expand_name(sig: Signature, a: TName) -> Type:
    td = lookup_type(sig, a.name, a.span)
    if len(td.params) != len(a.args):
        raise ArityMismatch(
            f"type {a.name} expects {len(td.params)} indices, got {len(a.args)}", a.span)
    sigma = {v: ar.fold_closed(e) for v, e in zip(td.params, a.args)}
    return _fold_closed_names(subst_type(td.body, sigma))


def _fold_closed_names(a: Type) -> Type:
    """Fold closed indices of the names in a, so ground unfoldings stay readable."""
    f = _fold_closed_names
    match a:
        case TName():
            return fold_type_indices(a)
        case Plus(bs) | With(bs):
            return type(a)(tuple((l, f(b)) for l, b in bs), a.span)
        case Tensor(l, r) | Lolli(l, r):
            return type(a)(f(l), f(r), a.span)
        case AssertT(p, c) | AssumeT(p, c):
            return type(a)(p, f(c), a.span)
        case PayT(e, c) | GetT(e, c):
            return type(a)(ar.fold_closed(e), f(c), a.span)
        case ExistsT(v, c) | ForallT(v, c):
            return type(a)(v, f(c), a.span)
    return a


def unfold(sig: Signature, a: Type) -> Type:
    """One-step definition expansion; identity on structural types."""
    if isinstance(a, TName):
        out = expand_name(sig, a)
        if isinstance(out, TName):
            raise SignatureError(f"type {a.name} is not contractive", a.span)
        return out
    return a


# ---------------------------------------------------------------------------
# Validity


def check_type_valid(sig: Signature, V: Iterable[str], C: Prop, a: Type, path=()) -> None:
    """Every index expression must denote a natural under the constraints on its path."""
    V = tuple(V)
    match a:
        case Plus(bs) | With(bs):
            labels = [l for l, _ in bs]
            if not labels:
                raise SignatureError("choice with no labels", a.span)
            if len(set(labels)) != len(labels):
                raise SignatureError("duplicate label in choice", a.span)
            for l, b in bs:
                check_type_valid(sig, V, C, b, path + (l,))
        case Tensor(l, r) | Lolli(l, r):
            op = "*" if isinstance(a, Tensor) else "-o"
            check_type_valid(sig, V, C, l, path + (op + "1",))
            check_type_valid(sig, V, C, r, path + (op + "2",))
        case One():
            pass
        case TName(n, args):
            td = lookup_type(sig, n, a.span)
            if len(td.params) != len(args):
                raise ArityMismatch(
                    f"type {n} expects {len(td.params)} indices, got {len(args)}", a.span)
            for e in args:
                _check_exp(V, C, e, a, path)
        case AssertT(p, c) | AssumeT(p, c):
            _check_prop(V, C, p, a, path)
            check_type_valid(sig, V, ar.conj(C, p), c, path + ("?{}" if isinstance(a, AssertT) else "!{}",))
        case PayT(e, c) | GetT(e, c):
            _check_exp(V, C, e, a, path)
            check_type_valid(sig, V, C, c, path + ("|>" if isinstance(a, PayT) else "<|",))
        case ExistsT(v, c) | ForallT(v, c):
            if v in V:
                # rename the binder apart from the context
                w = ar.fresh_name(v, V)
                c = subst_type(c, {v: ar.Var(w)})
                v = w
            check_type_valid(sig, V + (v,), C, c, path + (("?" if isinstance(a, ExistsT) else "!") + v,))
        case _:
            raise TypeError(f"not a type: {a!r}")


def _check_exp(V, C, e, node, path):
    extra = [v for v in ar.exp_vars(e) if v not in V]
    if extra:
        raise InvalidIndex(f"unbound index variable {extra[0]}", node.span, path)
    bad = ar.first_underflow(V, C, e)
    if bad is not None:
        raise InvalidIndex(
            f"{ar.render_prop(C)} |/= {ar.render_prop(ar.ge(bad.left, bad.right))}", node.span, path)


def _check_prop(V, C, p, node, path):
    extra = [v for v in ar.prop_vars(p) if v not in V]
    if extra:
        raise InvalidIndex(f"unbound index variable {extra[0]}", node.span, path)
    for e in _prop_exps(p, frozenset()):
        _check_exp(V, C, e, node, path)


def _prop_exps(p, bound):
    match p:
        case ar.Cmp(_, a, b):
            for e in (a, b):
                if not set(ar.exp_vars(e)) & bound:
                    yield e
        case ar.And(a, b) | ar.Or(a, b):
            yield from _prop_exps(a, bound)
            yield from _prop_exps(b, bound)
        case ar.Not(a):
            yield from _prop_exps(a, bound)
        case ar.Exists(v, a) | ar.Forall(v, a):
            yield from _prop_exps(a, bound | {v})


def check_signature_wellformed(sig: Signature) -> None:
    """Definitions match declarations, types are contractive and valid."""
    for name, td in sig.types.items():
        if isinstance(td.body, TName):
            raise SignatureError(f"type {name} is not contractive", td.span)
        if len(set(td.params)) != len(td.params):
            raise SignatureError(f"repeated index parameter in type {name}", td.span)
        check_type_valid(sig, td.params, ar.TRUE, td.body, (name,))
    for name, d in sig.decls.items():
        if name not in sig.defs:
            raise SignatureError(f"process {name} is declared but not defined", d.span)
        V = d.params
        extra = [v for v in ar.prop_vars(d.constraint) if v not in V]
        if extra:
            raise InvalidIndex(f"unbound index variable {extra[0]}", d.span)
        _check_exp(V, d.constraint, d.potential, d, (name,))
        chans = [c for c, _ in d.context] + [d.offered[0]]
        if len(set(chans)) != len(chans):
            raise SignatureError(f"repeated channel name in declaration of {name}", d.span)
        for c, t in d.context + (d.offered,):
            check_type_valid(sig, V, d.constraint, t, (name, c))
    for name, pd in sig.defs.items():
        d = sig.decls.get(name)
        if d is None:
            raise SignatureError(f"process {name} is defined but not declared", pd.span)
        if len(pd.params) != len(d.params) or len(pd.args) != len(d.context):
            raise ArityMismatch(f"definition of {name} does not match its declaration", pd.span)


# ---------------------------------------------------------------------------
# Internal names

GENERATED_MARK = "%"


def is_generated(name: str) -> bool:
    return name.startswith(GENERATED_MARK)


def elaborate_internal_names(sig: Signature) -> Signature:
    """Give every non-name subexpression of every type definition its own name.

    Generated names are `%V.i`, numbered in pre-order within the definition
    of V, and take the free index variables of the subexpression in order
    of first occurrence as parameters.
    """
    types: dict[str, TypeDef] = {}
    for name, td in sig.types.items():
        if td.generated:
            types[name] = td
            continue
        counter = [0]
        new: list[TypeDef] = []

        def name_of(sub: Type) -> Type:
            if isinstance(sub, TName):
                return sub
            counter[0] += 1
            gname = f"{GENERATED_MARK}{name}.{counter[0]}"
            params = tuple(v for v in type_vars(sub))
            slot = len(new)
            new.append(None)  # reserve pre-order position
            body = rebuild(sub)
            new[slot] = TypeDef(gname, params, body, sub.span, generated=True)
            return TName(gname, tuple(ar.Var(v) for v in params), sub.span)

        def rebuild(a: Type) -> Type:
            match a:
                case Plus(bs) | With(bs):
                    return type(a)(tuple((l, name_of(b)) for l, b in bs), a.span)
                case Tensor(l, r) | Lolli(l, r):
                    return type(a)(name_of(l), name_of(r), a.span)
                case AssertT(p, c) | AssumeT(p, c):
                    return type(a)(p, name_of(c), a.span)
                case PayT(e, c) | GetT(e, c):
                    return type(a)(e, name_of(c), a.span)
                case ExistsT(v, c) | ForallT(v, c):
                    return type(a)(v, name_of(c), a.span)
            return a

        body = rebuild(td.body)
        types[name] = replace(td, body=body)
        for g in new:
            types[g.name] = g
    return replace(sig, types=types)


def source_form(sig: Signature, a: Type) -> Type:
    """Replace generated names by the subexpressions they stand for."""
    match a:
        case TName(n, args) if is_generated(n) and n in sig.types:
            td = sig.types[n]
            return source_form(sig, subst_type(td.body, dict(zip(td.params, args))))
        case Plus(bs) | With(bs):
            return type(a)(tuple((l, source_form(sig, b)) for l, b in bs), a.span)
        case Tensor(l, r) | Lolli(l, r):
            return type(a)(source_form(sig, l), source_form(sig, r), a.span)
        case AssertT(p, c) | AssumeT(p, c):
            return type(a)(p, source_form(sig, c), a.span)
        case PayT(e, c) | GetT(e, c):
            return type(a)(e, source_form(sig, c), a.span)
        case ExistsT(v, c) | ForallT(v, c):
            return type(a)(v, source_form(sig, c), a.span)
    return a


# ---------------------------------------------------------------------------
# Polarity


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    ILL = "ill-polarized"


def polarize(sig: Signature, a: Type) -> Polarity:
    """Positive: ?{}/|{}> prefixes over a structural type; negative: !{}/<{}|; else neutral."""
    seen = set()
    pol = Polarity.NEUTRAL
    while True:
        if isinstance(a, TName):
            if a.name in seen:
                return pol
            seen.add(a.name)
            a = unfold(sig, a)
            continue
        if isinstance(a, (AssertT, PayT)):
            here = Polarity.POSITIVE
        elif isinstance(a, (AssumeT, GetT)):
            here = Polarity.NEGATIVE
        else:
            return pol
        if pol is not Polarity.NEUTRAL and pol is not here:
            return Polarity.ILL
        pol = here
        a = a.cont


def ill_polarized_types(sig: Signature) -> list[str]:
    """Type definitions whose body mixes positive and negative prefixes.

    Run on an elaborated signature so that every subexpression is covered.
    """
    return [name for name, td in sig.types.items()
            if polarize(sig, td.body) is Polarity.ILL]
