"""Lexer, parser, pretty-printer and diagnostic renderer for the surface syntax.

    type list{n}{p} = +{ cons : ?{n > 0}. |{p}> nat * list{n-1}{p},
                         nil : ?{n = 0}. 1 }
    decl nil{p} : . |{2}- (l : list{0}{p})
    proc l <- nil{p} <- = l.nil ; close l

`%` starts a comment that runs to the end of the line.  Prefix type
constructors (`?{..}.`, `!{..}.`, `?n.`, `!n.`, `|{..}>`, `<{..}|`) take
everything to their right, `*` groups tighter than `-o`, and both are
right associative.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import arith as ar
from . import syntax as sx
from .syntax import Span


class LexError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span
        self.category = "lexical error"


class ParseError(Exception):
    def __init__(self, message: str, span: Span, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected
        self.category = "parse error"


@dataclass(frozen=True)
class Token:
    kind: str  # id, num, kw, op, eof
    text: str
    span: Span


KEYWORDS = {
    "type", "decl", "proc", "case", "send", "recv", "close", "wait", "assert", "assume",
    "pay", "get", "work", "impossible", "true", "false", "exists", "forall",
}

# longest first
OPERATORS = ["-o", "<-", "=>", "|-", ">=", "<=", "/\\", "\\/",
             "(", ")", "{", "}", ":", ",", ".", ";", "=", "|", ">", "<", "+", "-", "*",
             "?", "!", "&", "~"]


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c in "_'"


def lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def span(start, sline, scol, end, eline, ecol):
        return Span(start, end, sline, scol, eline, ecol)

    while i < n:
        c = source[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c == "%":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start, sline, scol = i, line, col
        if c.isascii() and c.isalpha():
            j = i
            while j < n and source[j].isascii() and _is_ident_char(source[j]):
                j += 1
            text = source[i:j]
            kind = "kw" if text in KEYWORDS else "id"
        elif c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            text = source[i:j]
            kind = "num"
            if j < n and source[j].isascii() and source[j].isalpha():
                raise LexError(f"malformed number {source[i:j + 1]}", span(i, line, col, j + 1, line, col + j + 1 - i))
        else:
            for op in OPERATORS:
                if source.startswith(op, i):
                    if op == "-o" and i + 2 < n and _is_ident_char(source[i + 2]):
                        continue
                    text = op
                    break
            else:
                raise LexError(f"illegal character {c!r}", span(i, line, col, i + 1, line, col + 1))
            j = i + len(text)
            kind = "op"
        col += j - i
        i = j
        tokens.append(Token(kind, text, span(start, sline, scol, i, line, col)))
    tokens.append(Token("eof", "", Span(n, n, line, col, line, col)))
    _check_braces(tokens)
    return tokens


def _check_braces(tokens):
    stack = []
    pairs = {")": "(", "}": "{"}
    for t in tokens:
        if t.kind != "op":
            continue
        if t.text in "({":
            stack.append(t)
        elif t.text in ")}":
            if not stack or stack[-1].text != pairs[t.text]:
                raise LexError(f"unmatched {t.text}", t.span)
            stack.pop()
    if stack:
        raise LexError(f"unterminated group opened by {stack[-1].text}", stack[-1].span)


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind in ("op", "kw") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, expected: str):
        t = self.tok
        if t.kind == "eof":
            raise ParseError(f"unexpected end of input, expected {expected}", t.span, (expected,))
        raise ParseError(f"expected {expected}, found '{t.text}'", t.span, (expected,))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"'{text}'")
        return self.advance()

    def ident(self, what="identifier") -> Token:
        if self.tok.kind != "id":
            self.fail(what)
        return self.advance()

    def label(self) -> Token:
        # labels may coincide with keywords, e.g. true and false
        if self.tok.kind not in ("id", "kw"):
            self.fail("label")
        return self.advance()

    def last_end(self) -> Span:
        return self.toks[self.i - 1].span

    def span_from(self, start: Span) -> Span:
        end = self.last_end()
        return Span(start.start, end.end, start.line, start.col, end.end_line, end.end_col)

    # signatures
    def signature(self) -> sx.Signature:
        types, decls, defs, order = {}, {}, {}, []
        while self.tok.kind != "eof":
            if self.at("type"):
                td = self.typedef()
                if td.name in types:
                    raise ParseError(f"type {td.name} defined twice", td.span)
                types[td.name] = td
                order.append(("type", td.name))
            elif self.at("decl"):
                d = self.decl()
                if d.name in decls:
                    raise ParseError(f"process {d.name} declared twice", d.span)
                decls[d.name] = d
                order.append(("decl", d.name))
            elif self.at("proc"):
                p = self.procdef()
                if p.name in defs:
                    raise ParseError(f"process {p.name} defined twice", p.span)
                defs[p.name] = p
                order.append(("proc", p.name))
            else:
                self.fail("'type', 'decl' or 'proc'")
        return sx.Signature(types, decls, defs, tuple(order))

    def typedef(self) -> sx.TypeDef:
        start = self.expect("type").span
        name = self.ident("type name").text
        params = []
        while self.at("{"):
            self.advance()
            params.append(self.ident("index variable").text)
            self.expect("}")
        self.expect("=")
        body = self.type_()
        return sx.TypeDef(name, tuple(params), body, self.span_from(start))

    def decl(self) -> sx.ProcDecl:
        start = self.expect("decl").span
        name = self.ident("process name").text
        params, constraint = [], ar.TRUE
        while self.at("{"):
            self.advance()
            if not self.at("|"):
                params.append(self.ident("index variable").text)
            if self.at("|"):
                self.advance()
                constraint = ar.conj(constraint, self.prop())
            self.expect("}")
        self.expect(":")
        context = []
        if self.at("."):
            self.advance()
        else:
            while self.at("("):
                context.append(self.binding())
        pot = self.turnstile()
        offered = self.binding()
        return sx.ProcDecl(name, tuple(params), constraint, tuple(context), pot, offered,
                           self.span_from(start))

    def binding(self):
        self.expect("(")
        x = self.ident("channel name").text
        self.expect(":")
        a = self.type_()
        self.expect(")")
        return (x, a)

    def turnstile(self) -> ar.Exp:
        if self.at("|-"):
            self.advance()
            return ar.Const(0)
        if self.at("|") and self.at("{", 1):
            self.advance()
            self.advance()
            e = self.exp()
            self.expect("}")
            self.expect("-")
            return e
        self.fail("'|-' or '|{q}-'")

    def procdef(self) -> sx.ProcDef:
        start = self.expect("proc").span
        x = self.ident("channel name").text
        self.expect("<-")
        name = self.ident("process name").text
        params = []
        while self.at("{"):
            self.advance()
            params.append(self.ident("index variable").text)
            self.expect("}")
        self.expect("<-")
        args = []
        while self.tok.kind == "id":
            args.append(self.advance().text)
        self.expect("=")
        body = self.process()
        return sx.ProcDef(name, x, tuple(params), tuple(args), body, self.span_from(start))

    # types
    def type_(self) -> sx.Type:
        start = self.tok.span
        left = self.tensor()
        if self.at("-o"):
            self.advance()
            right = self.type_()
            return sx.Lolli(left, right, self.span_from(start))
        return left

    def tensor(self) -> sx.Type:
        start = self.tok.span
        left = self.unary()
        if self.at("*"):
            self.advance()
            right = self.tensor()
            return sx.Tensor(left, right, self.span_from(start))
        return left

    def unary(self) -> sx.Type:
        start = self.tok.span
        if self.at("?") or self.at("!"):
            sign = self.advance().text
            if self.at("{"):
                self.advance()
                phi = self.prop()
                self.expect("}")
                self.expect(".")
                body = self.type_()
                cls = sx.AssertT if sign == "?" else sx.AssumeT
                return cls(phi, body, self.span_from(start))
            v = self.ident("index variable or '{'").text
            self.expect(".")
            body = self.type_()
            cls = sx.ExistsT if sign == "?" else sx.ForallT
            return cls(v, body, self.span_from(start))
        if self.at("|") and self.at("{", 1):
            self.advance()
            self.advance()
            r = self.exp()
            self.expect("}")
            self.expect(">")
            return sx.PayT(r, self.type_(), self.span_from(start))
        if self.at("<") and self.at("{", 1):
            self.advance()
            self.advance()
            r = self.exp()
            self.expect("}")
            self.expect("|")
            return sx.GetT(r, self.type_(), self.span_from(start))
        return self.atom()

    def atom(self) -> sx.Type:
        start = self.tok.span
        if (self.at("+") or self.at("&")) and self.at("{", 1):
            plus = self.advance().text == "+"
            self.advance()
            branches = []
            seen = set()
            while True:
                lt = self.label()
                if lt.text in seen:
                    raise ParseError(f"duplicate label {lt.text}", lt.span)
                seen.add(lt.text)
                self.expect(":")
                branches.append((lt.text, self.type_()))
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect("}")
            cls = sx.Plus if plus else sx.With
            return cls(tuple(branches), self.span_from(start))
        if self.tok.kind == "num" and self.tok.text == "1":
            self.advance()
            return sx.One(start)
        if self.tok.kind == "id":
            name = self.advance().text
            args = []
            while self.at("{"):
                self.advance()
                args.append(self.exp())
                self.expect("}")
            return sx.TName(name, tuple(args), self.span_from(start))
        if self.at("("):
            self.advance()
            a = self.type_()
            self.expect(")")
            return a
        self.fail("a type")

    # arithmetic
    def exp(self) -> ar.Exp:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            r = self.term()
            e = ar.Add(e, r) if op == "+" else ar.Sub(e, r)
        return e

    def term(self) -> ar.Exp:
        e = self.factor()
        while self.at("*"):
            tok = self.advance()
            r = self.factor()
            try:
                e = ar.mul(e, r)
            except ar.NonlinearConstraint as err:
                raise ParseError(f"nonlinear constraint: {err}", tok.span)
        return e

    def factor(self) -> ar.Exp:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return ar.Const(int(t.text))
        if t.kind == "id":
            self.advance()
            return ar.Var(t.text)
        if self.at("("):
            self.advance()
            e = self.exp()
            self.expect(")")
            return e
        self.fail("an index expression")

    def prop(self) -> ar.Prop:
        p = self.conj()
        while self.at("\\/"):
            self.advance()
            p = ar.Or(p, self.conj())
        return p

    def conj(self) -> ar.Prop:
        p = self.prop_unary()
        while self.at("/\\"):
            self.advance()
            p = ar.And(p, self.prop_unary())
        return p

    def prop_unary(self) -> ar.Prop:
        if self.at("~"):
            self.advance()
            return ar.Not(self.prop_unary())
        if self.at("true"):
            self.advance()
            return ar.TRUE
        if self.at("false"):
            self.advance()
            return ar.FALSE
        if self.at("exists") or self.at("forall"):
            q = ar.Exists if self.advance().text == "exists" else ar.Forall
            v = self.ident("index variable").text
            self.expect(".")
            return q(v, self.prop())
        if self.at("("):
            save = self.i
            try:
                self.advance()
                p = self.prop()
                self.expect(")")
                if not self._at_comparison():
                    return p
            except ParseError:
                pass
            self.i = save
        left = self.exp()
        if not self._at_comparison():
            self.fail("a comparison")
        op = self.advance().text
        return ar.Cmp(op, left, self.exp())

    def _at_comparison(self):
        return self.tok.kind == "op" and self.tok.text in ar.COMPARISONS

    # processes
    def process(self) -> sx.Process:
        t = self.tok
        start = t.span

        def seq(make):
            head = self.span_from(start)
            self.expect(";")
            cont = self.process()
            node = make(cont)
            return _with_spans(node, self.span_from(start), head)

        def leaf(node):
            s = self.span_from(start)
            return _with_spans(node, s, s)

        if t.kind == "id" and self.at(".", 1):
            x = self.advance().text
            self.advance()
            k = self.label().text
            return seq(lambda c: sx.SendLabel(x, k, c))
        if t.kind == "id" and self.at("<-", 1):
            x = self.advance().text
            self.advance()
            if self.at("recv"):
                self.advance()
                y = self.ident("channel name").text
                return seq(lambda c: sx.RecvChan(y, x, c))
            f = self.ident("channel or process name").text
            if not (self.at("{") or self.at("<-")):
                return leaf(sx.Fwd(x, f))
            idx = []
            while self.at("{"):
                self.advance()
                idx.append(self.exp())
                self.expect("}")
            self.expect("<-")
            args = []
            while self.tok.kind == "id":
                args.append(self.advance().text)
            if self.at(";"):
                return seq(lambda c: sx.Spawn(x, f, tuple(idx), tuple(args), c))
            return leaf(sx.Spawn(x, f, tuple(idx), tuple(args), None))
        if self.at("{"):
            self.advance()
            v = self.ident("index variable").text
            self.expect("}")
            self.expect("<-")
            self.expect("recv")
            x = self.ident("channel name").text
            return seq(lambda c: sx.RecvIdx(x, v, c))
        if t.kind == "kw":
            kw = t.text
            if kw == "case":
                self.advance()
                x = self.ident("channel name").text
                head = self.span_from(start)
                self.expect("(")
                branches, seen = [], set()
                while True:
                    lt = self.label()
                    if lt.text in seen:
                        raise ParseError(f"duplicate branch {lt.text}", lt.span)
                    seen.add(lt.text)
                    self.expect("=>")
                    branches.append((lt.text, self.process()))
                    if self.at("|"):
                        self.advance()
                        continue
                    break
                self.expect(")")
                return _with_spans(sx.Case(x, tuple(branches)), self.span_from(start), head)
            if kw == "send":
                self.advance()
                x = self.ident("channel name").text
                if self.at("{"):
                    self.advance()
                    e = self.exp()
                    self.expect("}")
                    return seq(lambda c: sx.SendIdx(x, e, c))
                w = self.ident("channel name or '{'").text
                return seq(lambda c: sx.SendChan(x, w, c))
            if kw == "close":
                self.advance()
                return leaf(sx.Close(self.ident("channel name").text))
            if kw == "wait":
                self.advance()
                x = self.ident("channel name").text
                return seq(lambda c: sx.Wait(x, c))
            if kw in ("assert", "assume"):
                self.advance()
                x = self.ident("channel name").text
                self.expect("{")
                phi = self.prop()
                self.expect("}")
                cls = sx.AssertP if kw == "assert" else sx.AssumeP
                return seq(lambda c: cls(x, phi, c))
            if kw in ("pay", "get"):
                self.advance()
                x = self.ident("channel name").text
                self.expect("{")
                r = self.exp()
                self.expect("}")
                cls = sx.Pay if kw == "pay" else sx.Get
                return seq(lambda c: cls(x, r, c))
            if kw == "work":
                self.advance()
                r = ar.Const(1)
                if self.at("{"):
                    self.advance()
                    r = self.exp()
                    self.expect("}")
                return seq(lambda c: sx.Work(r, c))
            if kw == "impossible":
                self.advance()
                return leaf(sx.Impossible())
        if self.at("("):
            self.advance()
            p = self.process()
            self.expect(")")
            return p
        self.fail("a process")


def _with_spans(node, span, head):
    object.__setattr__(node, "span", span)
    object.__setattr__(node, "head", head)
    return node


def parse_signature(tokens_or_source) -> sx.Signature:
    tokens = lex(tokens_or_source) if isinstance(tokens_or_source, str) else tokens_or_source
    return _Parser(tokens).signature()


def _parse_entire(source: str, method: str):
    p = _Parser(lex(source))
    out = getattr(p, method)()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return out


def parse_type(source: str) -> sx.Type:
    return _parse_entire(source, "type_")


def parse_process(source: str) -> sx.Process:
    return _parse_entire(source, "process")


def parse_prop(source: str) -> ar.Prop:
    return _parse_entire(source, "prop")


def parse_exp(source: str) -> ar.Exp:
    return _parse_entire(source, "exp")


# ---------------------------------------------------------------------------
# Pretty-printing


def render_type(a: sx.Type, sig: sx.Signature | None = None, prec: int = 0) -> str:
    """Concrete syntax; with a signature, generated names print as their source form."""
    if sig is not None:
        a = sx.source_form(sig, a)
    match a:
        case sx.Plus(bs) | sx.With(bs):
            sign = "+" if isinstance(a, sx.Plus) else "&"
            inner = ", ".join(f"{l} : {render_type(b)}" for l, b in bs)
            return f"{sign}{{{inner}}}"
        case sx.Lolli(l, r):
            s = f"{render_type(l, prec=1)} -o {render_type(r)}"
            return f"({s})" if prec > 0 else s
        case sx.Tensor(l, r):
            s = f"{render_type(l, prec=2)} * {render_type(r, prec=1)}"
            return f"({s})" if prec > 1 else s
        case sx.One():
            return "1"
        case sx.TName(n, args):
            return n + "".join(f"{{{ar.render_exp(e)}}}" for e in args)
        case _:
            match a:
                case sx.AssertT(p, c):
                    head = f"?{{{ar.render_prop(p)}}}."
                case sx.AssumeT(p, c):
                    head = f"!{{{ar.render_prop(p)}}}."
                case sx.ExistsT(v, c):
                    head = f"?{v}."
                case sx.ForallT(v, c):
                    head = f"!{v}."
                case sx.PayT(e, c):
                    head = f"|{{{ar.render_exp(e)}}}>"
                case sx.GetT(e, c):
                    head = f"<{{{ar.render_exp(e)}}}|"
                case _:
                    raise TypeError(f"not a type: {a!r}")
            s = f"{head} {render_type(c)}"
            return f"({s})" if prec > 0 else s


def render_head(p: sx.Process) -> str:
    """The statement at the root of p, without its continuation."""
    match p:
        case sx.Fwd(x, y):
            return f"{x} <- {y}"
        case sx.Spawn(x, f, idx, args, _):
            ix = "".join(f"{{{ar.render_exp(e)}}}" for e in idx)
            return f"{x} <- {f}{ix} <-" + "".join(" " + a for a in args)
        case sx.SendLabel(x, k, _):
            return f"{x}.{k}"
        case sx.Case(x, _):
            return f"case {x}"
        case sx.SendChan(x, w, _):
            return f"send {x} {w}"
        case sx.RecvChan(x, y, _):
            return f"{y} <- recv {x}"
        case sx.Close(x):
            return f"close {x}"
        case sx.Wait(x, _):
            return f"wait {x}"
        case sx.SendIdx(x, e, _):
            return f"send {x} {{{ar.render_exp(e)}}}"
        case sx.RecvIdx(x, v, _):
            return f"{{{v}}} <- recv {x}"
        case sx.AssertP(x, phi, _):
            return f"assert {x} {{{ar.render_prop(phi)}}}"
        case sx.AssumeP(x, phi, _):
            return f"assume {x} {{{ar.render_prop(phi)}}}"
        case sx.Pay(x, r, _):
            return f"pay {x} {{{ar.render_exp(r)}}}"
        case sx.Get(x, r, _):
            return f"get {x} {{{ar.render_exp(r)}}}"
        case sx.Work(r, _):
            return "work" if r == ar.Const(1) else f"work{{{ar.render_exp(r)}}}"
        case sx.Impossible():
            return "impossible"
    raise TypeError(f"not a process: {p!r}")


def render_process(p: sx.Process, indent: int = 0) -> str:
    pad = " " * indent
    lines = []
    while True:
        if isinstance(p, sx.Case):
            lines.append(pad + f"case {p.x}")
            for i, (label, body) in enumerate(p.branches):
                opener = "( " if i == 0 else "| "
                inner = render_process(body, indent + 4).lstrip()
                lines.append(pad + f"  {opener}{label} =>")
                lines.append(" " * (indent + 4) + inner)
            lines[-1] += " )"
            break
        kids = sx.children(p)
        if not kids:
            lines.append(pad + render_head(p))
            break
        lines.append(pad + render_head(p) + " ;")
        p = kids[0]
    return "\n".join(lines)


def _render_binding(x, a):
    return f"({x} : {render_type(a)})"


def render_decl(d: sx.ProcDecl) -> str:
    params = [f"{{{v}}}" for v in d.params]
    if d.constraint != ar.TRUE:
        phi = ar.render_prop(d.constraint)
        if params:
            params[-1] = params[-1][:-1] + f"|{phi}}}"
        else:
            params.append(f"{{|{phi}}}")
    ctx = " ".join(_render_binding(x, a) for x, a in d.context) or "."
    turn = "|-" if d.potential == ar.Const(0) else f"|{{{ar.render_exp(d.potential)}}}-"
    return f"decl {d.name}{''.join(params)} : {ctx} {turn} {_render_binding(*d.offered)}"


def render_procdef(pd: sx.ProcDef) -> str:
    params = "".join(f"{{{v}}}" for v in pd.params)
    args = "".join(" " + a for a in pd.args)
    return f"proc {pd.offered} <- {pd.name}{params} <-{args} =\n{render_process(pd.body, 2)}"


def render_typedef(td: sx.TypeDef) -> str:
    params = "".join(f"{{{v}}}" for v in td.params)
    return f"type {td.name}{params} = {render_type(td.body)}"


def render_signature(sig: sx.Signature) -> str:
    order = list(sig.order) or (
        [("type", n) for n in sig.types] + [("decl", n) for n in sig.decls]
        + [("proc", n) for n in sig.defs])
    out = []
    for kind, name in order:
        if kind == "type":
            td = sig.types.get(name)
            if td is not None and not td.generated:
                out.append(render_typedef(td))
        elif kind == "decl":
            out.append(render_decl(sig.decls[name]))
        else:
            out.append(render_procdef(sig.defs[name]))
    return "\n\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Diagnostics


def render_diagnostic(err, source: str, filename: str = "<input>") -> str:
    """Category and message, then the offending line with the span underlined."""
    category = getattr(err, "category", "error")
    message = getattr(err, "message", str(err))
    span = getattr(err, "span", None)
    head = f"error:{category}: {message}"
    if span is None:
        return head
    lines = source.split("\n")
    lineno = min(max(span.line, 1), len(lines))
    text = lines[lineno - 1]
    col = span.col - 1
    if span.start >= len(source) or (span.start == span.end and category == "parse error"):
        width, mark = 1, "^"
    else:
        last = span.end_col - 1 if span.end_line == span.line else len(text)
        width, mark = max(last - col, 1), "~"
    return "\n".join([head, f"{filename}:{span.line}:{span.col}", text, " " * col + mark * width])
