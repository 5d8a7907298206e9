"""Finite types and the primitive-recursive term language.

Types are generated from the base type ``0`` (naturals) by arrows and a
finite-sequence constructor ``ty*``.  Terms are the usual typed combinators:
zero, successor, the recursor at every result type, lambda abstraction,
application, and four sequence primitives (empty, append, length, index).

Evaluation is environment-based call-by-value with a step budget ("fuel").
Every well-typed closed term is total; out-of-range sequence indexing
returns the canonical default value of the element type instead of failing,
so terms like "max over a candidate sequence" need no side conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Nat:
    def __repr__(self) -> str:
        return "Nat"


@dataclass(frozen=True)
class Arrow:
    domain: "FiniteType"
    codomain: "FiniteType"

    def __repr__(self) -> str:
        return f"Arrow({self.domain!r}, {self.codomain!r})"


@dataclass(frozen=True)
class Seq:
    element: "FiniteType"

    def __repr__(self) -> str:
        return f"Seq({self.element!r})"


FiniteType = Union[Nat, Arrow, Seq]

NAT = Nat()


def arrow(*types: FiniteType) -> FiniteType:
    """Right-nested arrow type from a list of components."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Arrow(ty, result)
    return result


def pure_type(n: int) -> FiniteType:
    """The pure type n: 0 is Nat, n+1 is n -> 0."""
    ty: FiniteType = NAT
    for _ in range(n):
        ty = Arrow(ty, NAT)
    return ty


def type_components(ty: FiniteType) -> tuple[list[FiniteType], FiniteType]:
    """Split an arrow type into its argument list and final codomain."""
    args: list[FiniteType] = []
    while isinstance(ty, Arrow):
        args.append(ty.domain)
        ty = ty.codomain
    return args, ty


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str
    type: FiniteType


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    arg: "Term"


@dataclass(frozen=True)
class NumLit:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("numerals are naturals")


@dataclass(frozen=True)
class Rec:
    """The recursor constant at result type ``result_type``.

    Applied to base b, step s and a numeral n it satisfies
    Rec b s 0 = b and Rec b s (n+1) = s n (Rec b s n).
    """

    result_type: FiniteType


@dataclass(frozen=True)
class Lam:
    binder: Var
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class SeqEmpty:
    elem_type: FiniteType


@dataclass(frozen=True)
class SeqAppend:
    seq: "Term"
    elem: "Term"


@dataclass(frozen=True)
class SeqLen:
    seq: "Term"


@dataclass(frozen=True)
class SeqIdx:
    seq: "Term"
    index: "Term"


Term = Union[
    Var, Zero, Succ, NumLit, Rec, Lam, App, SeqEmpty, SeqAppend, SeqLen, SeqIdx
]


def app(fun: Term, *args: Term) -> Term:
    for a in args:
        fun = App(fun, a)
    return fun


def app_spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose nested applications into (head, [arg1, ..., argk])."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def numeral(n: int) -> Term:
    return Zero() if n == 0 else NumLit(n)


def seq_literal(elem_type: FiniteType, items: list[Term]) -> Term:
    t: Term = SeqEmpty(elem_type)
    for item in items:
        t = SeqAppend(t, item)
    return t


# ---------------------------------------------------------------------------
# Errors


class TermError(Exception):
    pass


class UnboundVariable(TermError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable: {name}")
        self.name = name


class TypeMismatch(TermError):
    def __init__(self, expected, found, location: str = ""):
        where = f" in {location}" if location else ""
        super().__init__(f"type mismatch{where}: expected {expected}, found {found}")
        self.expected = expected
        self.found = found
        self.location = location


class OutOfFuel(TermError):
    def __init__(self, steps: int):
        super().__init__(f"evaluation budget exhausted after {steps} steps")
        self.steps = steps


class IllTyped(TermError):
    """Evaluation reached a stuck state; indicates a typechecker bug."""


# ---------------------------------------------------------------------------
# Typing


class TypingContext:
    """Ordered variable typing with innermost-first shadowing."""

    def __init__(self, entries: list[tuple[str, FiniteType]] | None = None):
        self._entries: list[tuple[str, FiniteType]] = list(entries or [])

    def push(self, name: str, ty: FiniteType) -> "TypingContext":
        return TypingContext(self._entries + [(name, ty)])

    def lookup(self, name: str) -> FiniteType:
        for n, ty in reversed(self._entries):
            if n == name:
                return ty
        raise UnboundVariable(name)

    def names(self) -> list[str]:
        return [n for n, _ in self._entries]


EMPTY_CONTEXT = TypingContext()


def rec_type(result_type: FiniteType) -> FiniteType:
    step = Arrow(NAT, Arrow(result_type, result_type))
    return Arrow(result_type, Arrow(step, Arrow(NAT, result_type)))


def type_check(t: Term, ctx: TypingContext = EMPTY_CONTEXT) -> FiniteType:
    """Compute the unique type of ``t`` in ``ctx`` or raise."""
    if isinstance(t, Var):
        ty = ctx.lookup(t.name)
        if ty != t.type:
            raise TypeMismatch(ty, t.type, f"variable {t.name}")
        return ty
    if isinstance(t, (Zero, NumLit)):
        return NAT
    if isinstance(t, Succ):
        argty = type_check(t.arg, ctx)
        if argty != NAT:
            raise TypeMismatch(NAT, argty, "successor argument")
        return NAT
    if isinstance(t, Rec):
        return rec_type(t.result_type)
    if isinstance(t, Lam):
        body = type_check(t.body, ctx.push(t.binder.name, t.binder.type))
        return Arrow(t.binder.type, body)
    if isinstance(t, App):
        fun = type_check(t.fun, ctx)
        arg = type_check(t.arg, ctx)
        if not isinstance(fun, Arrow):
            raise TypeMismatch("an arrow type", fun, "application head")
        if fun.domain != arg:
            raise TypeMismatch(fun.domain, arg, "application argument")
        return fun.codomain
    if isinstance(t, SeqEmpty):
        return Seq(t.elem_type)
    if isinstance(t, SeqAppend):
        seqty = type_check(t.seq, ctx)
        elemty = type_check(t.elem, ctx)
        if not isinstance(seqty, Seq):
            raise TypeMismatch("a sequence type", seqty, "append")
        if seqty.element != elemty:
            raise TypeMismatch(seqty.element, elemty, "append element")
        return seqty
    if isinstance(t, SeqLen):
        seqty = type_check(t.seq, ctx)
        if not isinstance(seqty, Seq):
            raise TypeMismatch("a sequence type", seqty, "length")
        return NAT
    if isinstance(t, SeqIdx):
        seqty = type_check(t.seq, ctx)
        idxty = type_check(t.index, ctx)
        if not isinstance(seqty, Seq):
            raise TypeMismatch("a sequence type", seqty, "index")
        if idxty != NAT:
            raise TypeMismatch(NAT, idxty, "index")
        return seqty.element
    raise IllTyped(f"unknown term node {t!r}")


def infer_type(t: Term) -> FiniteType:
    """Type of a term from its own annotations, free variables included."""
    ctx = EMPTY_CONTEXT
    for v in free_term_vars(t):
        ctx = ctx.push(v.name, v.type)
    return type_check(t, ctx)


def free_term_vars(t: Term) -> list[Var]:
    """Free variables in first-occurrence order."""
    seen: dict[str, Var] = {}

    def walk(t: Term, bound: frozenset[str]) -> None:
        if isinstance(t, Var):
            if t.name not in bound and t.name not in seen:
                seen[t.name] = t
        elif isinstance(t, Succ):
            walk(t.arg, bound)
        elif isinstance(t, Lam):
            walk(t.body, bound | {t.binder.name})
        elif isinstance(t, App):
            walk(t.fun, bound)
            walk(t.arg, bound)
        elif isinstance(t, SeqAppend):
            walk(t.seq, bound)
            walk(t.elem, bound)
        elif isinstance(t, SeqLen):
            walk(t.seq, bound)
        elif isinstance(t, SeqIdx):
            walk(t.seq, bound)
            walk(t.index, bound)

    walk(t, frozenset())
    return list(seen.values())


def term_substitute(t: Term, var: Var, replacement: Term) -> Term:
    """Capture-avoiding substitution inside a term."""
    repl_free = {v.name for v in free_term_vars(replacement)}

    def walk(t: Term) -> Term:
        if isinstance(t, Var):
            return replacement if t.name == var.name else t
        if isinstance(t, Succ):
            return Succ(walk(t.arg))
        if isinstance(t, Lam):
            if t.binder.name == var.name:
                return t
            if t.binder.name in repl_free:
                fresh = _fresh_term_name(t.binder.name, repl_free | _names_in(t.body))
                nb = Var(fresh, t.binder.type)
                body = term_substitute(t.body, t.binder, nb)
                return Lam(nb, walk(body))
            return Lam(t.binder, walk(t.body))
        if isinstance(t, App):
            return App(walk(t.fun), walk(t.arg))
        if isinstance(t, SeqAppend):
            return SeqAppend(walk(t.seq), walk(t.elem))
        if isinstance(t, SeqLen):
            return SeqLen(walk(t.seq))
        if isinstance(t, SeqIdx):
            return SeqIdx(walk(t.seq), walk(t.index))
        return t

    return walk(t)


def _names_in(t: Term) -> set[str]:
    out: set[str] = set()

    def walk(t: Term) -> None:
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Succ):
            walk(t.arg)
        elif isinstance(t, Lam):
            out.add(t.binder.name)
            walk(t.body)
        elif isinstance(t, App):
            walk(t.fun)
            walk(t.arg)
        elif isinstance(t, SeqAppend):
            walk(t.seq)
            walk(t.elem)
        elif isinstance(t, SeqLen):
            walk(t.seq)
        elif isinstance(t, SeqIdx):
            walk(t.seq)
            walk(t.index)

    walk(t)
    return out


def _fresh_term_name(base: str, avoid: set[str]) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# Values and evaluation


@dataclass(frozen=True)
class Closure:
    binder: Var
    body: Term
    env: dict = field(compare=True, hash=False)


@dataclass(frozen=True)
class SeqValue:
    items: tuple
    elem_type: FiniteType


@dataclass(frozen=True)
class Native:
    """Partially applied built-in functional.

    kind 'rec': the recursor at result type ``ty``, saturated at 3 arguments.
    kind 'default': the constant function whose result is the default value
    of the codomain of ``ty``; absorbs one argument.
    """

    kind: str
    ty: FiniteType
    args: tuple = ()


Value = Union[int, Closure, SeqValue, Native]

DEFAULT_FUEL = 10**6


class _Fuel:
    def __init__(self, budget: int):
        self.budget = budget
        self.spent = 0

    def tick(self, n: int = 1) -> None:
        self.spent += n
        if self.spent > self.budget:
            raise OutOfFuel(self.budget)


def default_value(ty: FiniteType) -> Value:
    """Canonical inhabitant: 0, the empty sequence, or a constant function."""
    if isinstance(ty, Nat):
        return 0
    if isinstance(ty, Seq):
        return SeqValue((), ty.element)
    return Native("default", ty)


def evaluate(t: Term, fuel: int = DEFAULT_FUEL) -> Value:
    """Evaluate a closed well-typed term to its normal-form value."""
    gas = _Fuel(fuel)
    return _eval(t, {}, gas)


def _eval(t: Term, env: dict, gas: _Fuel) -> Value:
    gas.tick()
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(t.name)
        return env[t.name]
    if isinstance(t, Zero):
        return 0
    if isinstance(t, NumLit):
        return t.n
    if isinstance(t, Succ):
        v = _eval(t.arg, env, gas)
        if not isinstance(v, int):
            raise IllTyped("successor of a non-numeral")
        return v + 1
    if isinstance(t, Rec):
        return Native("rec", t.result_type)
    if isinstance(t, Lam):
        return Closure(t.binder, t.body, dict(env))
    if isinstance(t, App):
        fun = _eval(t.fun, env, gas)
        arg = _eval(t.arg, env, gas)
        return apply_value(fun, arg, gas)
    if isinstance(t, SeqEmpty):
        return SeqValue((), t.elem_type)
    if isinstance(t, SeqAppend):
        seq = _eval(t.seq, env, gas)
        elem = _eval(t.elem, env, gas)
        if not isinstance(seq, SeqValue):
            raise IllTyped("append to a non-sequence")
        return SeqValue(seq.items + (elem,), seq.elem_type)
    if isinstance(t, SeqLen):
        seq = _eval(t.seq, env, gas)
        if not isinstance(seq, SeqValue):
            raise IllTyped("length of a non-sequence")
        return len(seq.items)
    if isinstance(t, SeqIdx):
        seq = _eval(t.seq, env, gas)
        idx = _eval(t.index, env, gas)
        if not isinstance(seq, SeqValue) or not isinstance(idx, int):
            raise IllTyped("bad sequence indexing")
        if idx < len(seq.items):
            return seq.items[idx]
        return default_value(seq.elem_type)
    raise IllTyped(f"cannot evaluate {t!r}")


def apply_value(fun: Value, arg: Value, gas: _Fuel | None = None) -> Value:
    gas = gas or _Fuel(DEFAULT_FUEL)
    gas.tick()
    if isinstance(fun, Closure):
        env = dict(fun.env)
        env[fun.binder.name] = arg
        return _eval(fun.body, env, gas)
    if isinstance(fun, Native):
        if fun.kind == "default":
            if not isinstance(fun.ty, Arrow):
                raise IllTyped("default functional with non-arrow type")
            return default_value(fun.ty.codomain)
        if fun.kind == "rec":
            args = fun.args + (arg,)
            if len(args) < 3:
                return Native("rec", fun.ty, args)
            base, step, n = args
            if not isinstance(n, int):
                raise IllTyped("recursor numeral argument is not a natural")
            acc = base
            for k in range(n):
                gas.tick()
                acc = apply_value(apply_value(step, k, gas), acc, gas)
            return acc
    raise IllTyped(f"cannot apply {fun!r}")


# ---------------------------------------------------------------------------
# Library terms built from the recursor


def _v(name: str, ty: FiniteType) -> Var:
    return Var(name, ty)


def pred_term() -> Term:
    """pred n, with pred 0 = 0."""
    n = _v("n", NAT)
    k = _v("k", NAT)
    p = _v("p", NAT)
    return Lam(n, app(Rec(NAT), Zero(), Lam(k, Lam(p, k)), n))


def pred_of(t: Term) -> Term:
    """The term pred applied to ``t``, unfolded."""
    k = _v("k", NAT)
    p = _v("p", NAT)
    return app(Rec(NAT), Zero(), Lam(k, Lam(p, k)), t)


def add_term() -> Term:
    m = _v("m", NAT)
    n = _v("n", NAT)
    k = _v("k", NAT)
    p = _v("p", NAT)
    return Lam(m, Lam(n, app(Rec(NAT), m, Lam(k, Lam(p, Succ(p))), n)))


def mult_term() -> Term:
    # Accumulator first: add p m iterates m times, keeping the total cost
    # proportional to m*n rather than quadratic in the accumulator.
    m = _v("m", NAT)
    n = _v("n", NAT)
    k = _v("k", NAT)
    p = _v("p", NAT)
    step = Lam(k, Lam(p, app(add_term(), p, m)))
    return Lam(m, Lam(n, app(Rec(NAT), Zero(), step, n)))


def _pred_table(upto: Term) -> Term:
    """Sequence with entry i-1 at index i (0 at index 0), up to ``upto``.

    A single pass costing O(upto) recursor steps; indexing it is then the
    constant-cost predecessor, which keeps cut-off subtraction linear
    instead of quadratic.
    """
    j = _v("j", NAT)
    s = _v("s", Seq(NAT))
    base = SeqAppend(SeqEmpty(NAT), Zero())
    return app(Rec(Seq(NAT)), base, Lam(j, Lam(s, SeqAppend(s, j))), upto)


def monus_term() -> Term:
    """Cut-off subtraction: monus m n = max(m - n, 0)."""
    m = _v("m", NAT)
    n = _v("n", NAT)
    k = _v("k", NAT)
    p = _v("p", NAT)
    t = _v("t", Seq(NAT))
    loop = app(Rec(NAT), m, Lam(k, Lam(p, SeqIdx(t, p))), n)
    return Lam(m, Lam(n, App(Lam(t, loop), _pred_table(m))))


def max_term() -> Term:
    """max m n = (m monus n) + n."""
    m = _v("m", NAT)
    n = _v("n", NAT)
    return Lam(m, Lam(n, app(add_term(), app(monus_term(), m, n), n)))


def maxseq_term() -> Term:
    """Greatest entry of a sequence of naturals; 0 on the empty sequence."""
    s = _v("s", Seq(NAT))
    i = _v("i", NAT)
    acc = _v("acc", NAT)
    step = Lam(i, Lam(acc, app(max_term(), SeqIdx(s, i), acc)))
    return Lam(s, app(Rec(NAT), Zero(), step, SeqLen(s)))
