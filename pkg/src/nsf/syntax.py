"""Concrete syntax: lexer, parsers and printers, and the corpus file format.

Grammar (ASCII)::

    formula  :=  implies
    implies  :=  or [ '->' implies ]
    or       :=  and [ '\\/' or ]
    and      :=  unary [ '/\\' and ]
    unary    :=  '~' unary | quantified | atom
    quantified := ('forall'|'exists') '^st'? binders '.' formula
                | ('forall'|'exists') IDENT '<=' term '.' formula
    binders  :=  IDENT ':' type (',' IDENT ':' type)*
    atom     :=  'st' '(' term ':' type ')'
              |  term '=' term  |  term 'in' term
              |  '(' formula ')'

    term     :=  '\\' IDENT ':' type '.' term  |  application
    application := primary+            (left associative; a leading bare 'S'
                                        not bound in scope is the successor)
    primary  :=  atom_t ('!' atom_t)*
    atom_t   :=  NUMERAL | 'rec' '[' type ']' | '<>' '[' type ']'
              |  'append' '(' term ',' term ')' | 'len' '(' term ')'
              |  IDENT [':' type_atom]  |  '(' term ')'

    type     :=  type_atom [ '->' type ]
    type_atom := ('0' | NUMERAL | '(' type ')') '*'*
                                       (a numeral n abbreviates the pure type
                                        of rank n: 1 is 0->0, 2 is 1->0, ...)

Comments run from '#' to end of line.  Free variables must carry a type
annotation at their first occurrence; later occurrences inherit it.

Corpus files hold one named formula per block, ``name: formula``, where the
name starts at column zero and continuation lines are indented.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .typesys import (
    App,
    Arrow,
    FiniteType,
    Lam,
    Nat,
    NumLit,
    Rec,
    Seq,
    SeqAppend,
    SeqEmpty,
    SeqIdx,
    SeqLen,
    Succ,
    Term,
    Var,
    Zero,
    pure_type,
)
from . import formula as F
from .formula import Formula


class FormulaSyntaxError(Exception):
    def __init__(self, line: int, col: int, expected: str):
        super().__init__(f"line {line}, col {col}: expected {expected}")
        self.line = line
        self.col = col
        self.expected = expected


class TypeAnnotationMissing(Exception):
    def __init__(self, name: str, line: int, col: int):
        super().__init__(
            f"line {line}, col {col}: free variable {name!r} needs a type annotation"
        )
        self.name = name


# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+)
    | (?P<comment>\#[^\n]*)
    | (?P<num>\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<op>->|<=|<>|/\\|\\/|[()\[\],.:!=~*\\^<>])
    """,
    re.VERBOSE,
)

KEYWORDS = {"forall", "exists", "st", "in", "len", "append", "rec"}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            col = pos - line_start + 1
            raise FormulaSyntaxError(line, col, f"a token (found {text[pos]!r})")
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "comment":
            pass
        elif kind == "ident" and value in KEYWORDS:
            tokens.append(Token(value, value, line, col))
        else:
            tokens.append(Token(kind if kind != "op" else value, value, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.scopes: list[dict[str, FiniteType]] = []
        self.free: dict[str, FiniteType] = {}

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(tok.line, tok.col, f"{kind!r} (found {tok.text!r})")
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def fail(self, expected: str):
        tok = self.peek()
        raise FormulaSyntaxError(tok.line, tok.col, f"{expected} (found {tok.text!r})")

    # -- scope

    def lookup(self, name: str) -> FiniteType | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return self.free.get(name)

    def push(self, name: str, ty: FiniteType) -> None:
        self.scopes.append({name: ty})

    def pop(self) -> None:
        self.scopes.pop()

    # -- types

    def parse_type(self) -> FiniteType:
        left = self.parse_type_atom()
        if self.at("->"):
            self.next()
            return Arrow(left, self.parse_type())
        return left

    def parse_type_atom(self) -> FiniteType:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            ty: FiniteType = pure_type(int(tok.text))
        elif tok.kind == "(":
            self.next()
            ty = self.parse_type()
            self.expect(")")
        else:
            self.fail("a type")
        while self.at("*"):
            self.next()
            ty = Seq(ty)
        return ty

    # -- terms

    def parse_term(self) -> Term:
        if self.at("\\"):
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            ty = self.parse_type()
            self.expect(".")
            self.push(name, ty)
            try:
                body = self.parse_term()
            finally:
                self.pop()
            return Lam(Var(name, ty), body)
        return self.parse_application()

    _TERM_START = {"num", "ident", "rec", "len", "append", "(", "<>", "\\"}

    def parse_application(self) -> Term:
        head_tok = self.peek()
        if (
            head_tok.kind == "ident"
            and head_tok.text == "S"
            and self.lookup("S") is None
        ):
            self.next()
            arg = self.parse_primary()
            term: Term = Succ(arg)
        else:
            term = self.parse_primary()
        while self.peek().kind in self._TERM_START:
            term = App(term, self.parse_primary())
        return term

    def parse_primary(self) -> Term:
        term = self.parse_term_atom()
        while self.at("!"):
            self.next()
            term = SeqIdx(term, self.parse_term_atom())
        return term

    def parse_term_atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            n = int(tok.text)
            return Zero() if n == 0 else NumLit(n)
        if tok.kind == "rec":
            self.next()
            self.expect("[")
            ty = self.parse_type()
            self.expect("]")
            return Rec(ty)
        if tok.kind == "<>":
            self.next()
            self.expect("[")
            ty = self.parse_type()
            self.expect("]")
            return SeqEmpty(ty)
        if tok.kind == "append":
            self.next()
            self.expect("(")
            s = self.parse_term()
            self.expect(",")
            x = self.parse_term()
            self.expect(")")
            return SeqAppend(s, x)
        if tok.kind == "len":
            self.next()
            self.expect("(")
            s = self.parse_term()
            self.expect(")")
            return SeqLen(s)
        if tok.kind == "(":
            self.next()
            t = self.parse_term()
            self.expect(")")
            return t
        if tok.kind == "ident":
            self.next()
            name = tok.text
            annot: FiniteType | None = None
            if self.at(":"):
                self.next()
                annot = self.parse_type_atom()
            known = self.lookup(name)
            if known is not None:
                if annot is not None and annot != known:
                    raise FormulaSyntaxError(
                        tok.line, tok.col, f"annotation on {name} to match its type"
                    )
                return Var(name, known)
            if annot is None:
                raise TypeAnnotationMissing(name, tok.line, tok.col)
            self.free[name] = annot
            return Var(name, annot)
        self.fail("a term")

    # -- formulas

    def parse_formula(self) -> Formula:
        return self.parse_implies()

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.at("->"):
            self.next()
            return F.Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        if self.at("\\/"):
            self.next()
            return F.Or(left, self.parse_or())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        if self.at("/\\"):
            self.next()
            return F.And(left, self.parse_and())
        return left

    def parse_unary(self) -> Formula:
        if self.at("~"):
            self.next()
            return F.Not(self.parse_unary())
        if self.at("forall") or self.at("exists"):
            return self.parse_quantified()
        return self.parse_atom_formula()

    def parse_quantified(self) -> Formula:
        kw = self.next()
        relativized = False
        if self.at("^"):
            self.next()
            st = self.expect("st")
            del st
            relativized = True
        first = self.expect("ident")
        if self.at("<="):
            if relativized:
                raise FormulaSyntaxError(
                    first.line, first.col, "bounded quantifiers carry no ^st"
                )
            self.next()
            bound = self.parse_term()
            self.expect(".")
            binder = Var(first.text, Nat())
            self.push(first.text, Nat())
            try:
                body = self.parse_formula()
            finally:
                self.pop()
            node = F.BForall if kw.kind == "forall" else F.BExists
            return node(binder, bound, body)
        self.expect(":")
        binders = [Var(first.text, self.parse_type())]
        while self.at(","):
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            binders.append(Var(name, self.parse_type()))
        self.expect(".")
        for v in binders:
            self.push(v.name, v.type)
        try:
            body = self.parse_formula()
        finally:
            for _ in binders:
                self.pop()
        if kw.kind == "forall":
            node = F.ForallSt if relativized else F.Forall
        else:
            node = F.ExistsSt if relativized else F.Exists
        result = body
        for v in reversed(binders):
            result = node(v, result)
        return result

    def parse_atom_formula(self) -> Formula:
        if self.at("st") and self.peek(1).kind == "(":
            self.next()
            self.expect("(")
            if self.peek().kind == "ident" and self.peek(1).kind == ":":
                tok = self.next()
                self.next()
                ty = self.parse_type()
                known = self.lookup(tok.text)
                if known is None:
                    self.free[tok.text] = ty
                elif known != ty:
                    raise FormulaSyntaxError(
                        tok.line, tok.col, f"annotation on {tok.text} to match its type"
                    )
                self.expect(")")
                return F.St(ty, Var(tok.text, ty))
            term = self.parse_term()
            self.expect(")")
            from .typesys import infer_type

            return F.St(infer_type(term), term)
        # A relational atom and a parenthesized formula both may start with
        # '('; try the relation first and fall back.
        state = (self.pos, dict(self.free))
        try:
            lhs = self.parse_term()
            if self.at("="):
                self.next()
                return F.AtomEq0(lhs, self.parse_term())
            if self.at("in"):
                self.next()
                return F.MemSeq(lhs, self.parse_term())
            self.fail("'=' or 'in'")
        except (FormulaSyntaxError, TypeAnnotationMissing) as exc:
            self.pos, self.free = state
            saved = exc
        if self.at("("):
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        raise saved


def parse_type(text: str) -> FiniteType:
    p = _Parser(tokenize(text))
    ty = p.parse_type()
    p.expect("eof")
    return ty


def parse_term(text: str, context: dict[str, FiniteType] | None = None) -> Term:
    p = _Parser(tokenize(text))
    p.free.update(context or {})
    t = p.parse_term()
    p.expect("eof")
    return t


def parse_formula(text: str, context: dict[str, FiniteType] | None = None) -> Formula:
    p = _Parser(tokenize(text))
    p.free.update(context or {})
    f = p.parse_formula()
    p.expect("eof")
    return f


# ---------------------------------------------------------------------------
# Printers


def print_type(ty: FiniteType) -> str:
    if isinstance(ty, Nat):
        return "0"
    if isinstance(ty, Seq):
        inner = print_type(ty.element)
        if isinstance(ty.element, Arrow):
            inner = f"({inner})"
        return f"{inner}*"
    assert isinstance(ty, Arrow)
    dom = print_type(ty.domain)
    if isinstance(ty.domain, Arrow):
        dom = f"({dom})"
    return f"{dom} -> {print_type(ty.codomain)}"


def _annot(ty: FiniteType) -> str:
    s = print_type(ty)
    return f"({s})" if isinstance(ty, Arrow) else s


_LAM, _APP, _POST, _ATOM = 1, 2, 3, 4


def print_term(t: Term, annotate: set[str] | None = None, prec: int = 1) -> str:
    """Render a term; names in ``annotate`` get a type annotation at their
    first occurrence and are then removed from the (shared, mutable) set."""
    pending = annotate if annotate is not None else set()

    def go(t: Term, prec: int) -> str:
        if isinstance(t, Var):
            if t.name in pending:
                pending.discard(t.name)
                return f"{t.name}:{_annot(t.type)}"
            return t.name
        if isinstance(t, Zero):
            return "0"
        if isinstance(t, NumLit):
            return str(t.n)
        if isinstance(t, Succ):
            s = f"S {go(t.arg, _POST)}"
            return f"({s})" if prec > _APP else s
        if isinstance(t, Rec):
            return f"rec[{print_type(t.result_type)}]"
        if isinstance(t, Lam):
            s = f"\\{t.binder.name}:{print_type(t.binder.type)}. {go(t.body, _LAM)}"
            return f"({s})" if prec > _LAM else s
        if isinstance(t, App):
            s = f"{go(t.fun, _APP)} {go(t.arg, _POST)}"
            return f"({s})" if prec > _APP else s
        if isinstance(t, SeqEmpty):
            return f"<>[{print_type(t.elem_type)}]"
        if isinstance(t, SeqAppend):
            return f"append({go(t.seq, _LAM)}, {go(t.elem, _LAM)})"
        if isinstance(t, SeqLen):
            return f"len({go(t.seq, _LAM)})"
        if isinstance(t, SeqIdx):
            s = f"{go(t.seq, _POST)}!{go(t.index, _ATOM)}"
            return f"({s})" if prec > _POST else s
        raise ValueError(f"unprintable term {t!r}")

    return go(t, prec)


_QUANT, _IMPL, _OR, _AND, _NOT, _FATOM = 1, 2, 3, 4, 5, 6


def print_formula(f: Formula) -> str:
    pending = {v.name for v in F.free_vars(f)}

    def term(t: Term, prec: int) -> str:
        return print_term(t, pending, prec)

    def go(f: Formula, prec: int) -> str:
        if isinstance(f, F.AtomEq0):
            return f"{term(f.lhs, _APP)} = {term(f.rhs, _APP)}"
        if isinstance(f, F.St):
            if isinstance(f.term, Var):
                pending.discard(f.term.name)
                return f"st({f.term.name}: {print_type(f.ty)})"
            return f"st({term(f.term, _LAM)})"
        if isinstance(f, F.MemSeq):
            return f"{term(f.elem, _APP)} in {term(f.seq, _APP)}"
        if isinstance(f, F.Not):
            s = f"~{go(f.body, _NOT)}"
            return f"({s})" if prec > _NOT else s
        if isinstance(f, F.And):
            s = f"{go(f.left, _AND + 1)} /\\ {go(f.right, _AND)}"
            return f"({s})" if prec > _AND else s
        if isinstance(f, F.Or):
            s = f"{go(f.left, _OR + 1)} \\/ {go(f.right, _OR)}"
            return f"({s})" if prec > _OR else s
        if isinstance(f, F.Implies):
            s = f"{go(f.left, _IMPL + 1)} -> {go(f.right, _IMPL)}"
            return f"({s})" if prec > _IMPL else s
        if isinstance(f, (F.BForall, F.BExists)):
            kw = "forall" if isinstance(f, F.BForall) else "exists"
            pending.discard(f.binder.name)
            s = f"{kw} {f.binder.name} <= {term(f.bound, _APP)}. {go(f.body, _QUANT)}"
            return f"({s})" if prec > _QUANT else s
        if isinstance(f, (F.Forall, F.Exists, F.ForallSt, F.ExistsSt)):
            node = type(f)
            kw = "forall" if node in (F.Forall, F.ForallSt) else "exists"
            if node in (F.ForallSt, F.ExistsSt):
                kw += "^st"
            binders = []
            body: Formula = f
            while isinstance(body, node):
                binders.append(body.binder)
                pending.discard(body.binder.name)
                body = body.body
            blist = ", ".join(f"{v.name}:{print_type(v.type)}" for v in binders)
            s = f"{kw} {blist}. {go(body, _QUANT)}"
            return f"({s})" if prec > _QUANT else s
        raise ValueError(f"unprintable formula {f!r}")

    return go(f, _QUANT)


# ---------------------------------------------------------------------------
# Corpus files


_HEADER_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)$")


def parse_corpus(text: str, source: str = "<corpus>") -> dict[str, Formula]:
    """Parse a corpus file of named formula blocks."""
    blocks: list[tuple[str, list[str], int]] = []
    current: tuple[str, list[str], int] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if not raw[0].isspace():
            m = _HEADER_RE.match(line)
            if not m:
                raise FormulaSyntaxError(lineno, 1, f"a 'name:' block header in {source}")
            current = (m.group(1), [m.group(2)], lineno)
            blocks.append(current)
        else:
            if current is None:
                raise FormulaSyntaxError(lineno, 1, f"a block header before text in {source}")
            current[1].append(line)
    out: dict[str, Formula] = {}
    for name, lines, lineno in blocks:
        if name in out:
            raise FormulaSyntaxError(lineno, 1, f"a fresh name ({name} repeats) in {source}")
        body = "\n".join(lines).strip()
        if not body:
            raise FormulaSyntaxError(lineno, 1, f"a formula body for {name} in {source}")
        out[name] = parse_formula(body)
    return out


def print_corpus(entries: dict[str, Formula]) -> str:
    chunks = [f"{name}:\n  {print_formula(f)}" for name, f in entries.items()]
    return "\n\n".join(chunks) + "\n"
