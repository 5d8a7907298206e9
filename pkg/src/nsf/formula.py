"""Formula language over the term layer.

Atoms are equalities between terms of base type and sequence membership.
On top of those: the unary standardness predicate ``st``, the classical
connectives, plain and st-relativized quantifiers, and bounded number
quantifiers (which relativization leaves untouched).  A formula is
*internal* when no ``st`` and no relativized quantifier occurs in it.

All constructors check the term-level types they depend on, so an AST that
exists is well-formed.  Formulas and terms are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .typesys import (
    NAT,
    App,
    Arrow,
    FiniteType,
    Nat,
    Seq,
    SeqIdx,
    SeqLen,
    Term,
    TypeMismatch,
    Var,
    Zero,
    NumLit,
    app,
    evaluate,
    free_term_vars,
    infer_type,
    pred_of,
    term_substitute,
)


class FormulaError(Exception):
    pass


class NotInternal(FormulaError):
    pass


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class AtomEq0:
    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        for side, label in ((self.lhs, "left"), (self.rhs, "right")):
            ty = infer_type(side)
            if not isinstance(ty, Nat):
                raise TypeMismatch(NAT, ty, f"{label} side of =")


@dataclass(frozen=True)
class St:
    ty: FiniteType
    term: Term

    def __post_init__(self) -> None:
        found = infer_type(self.term)
        if found != self.ty:
            raise TypeMismatch(self.ty, found, "st argument")


@dataclass(frozen=True)
class MemSeq:
    elem: Term
    seq: Term

    def __post_init__(self) -> None:
        seqty = infer_type(self.seq)
        elemty = infer_type(self.elem)
        if not isinstance(seqty, Seq):
            raise TypeMismatch("a sequence type", seqty, "membership")
        if seqty.element != elemty:
            raise TypeMismatch(seqty.element, elemty, "membership element")


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    binder: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    binder: Var
    body: "Formula"


@dataclass(frozen=True)
class ForallSt:
    binder: Var
    body: "Formula"


@dataclass(frozen=True)
class ExistsSt:
    binder: Var
    body: "Formula"


@dataclass(frozen=True)
class BForall:
    """Bounded number quantifier: for all binder <= bound."""

    binder: Var
    bound: Term
    body: "Formula"

    def __post_init__(self) -> None:
        _check_bounded(self.binder, self.bound)


@dataclass(frozen=True)
class BExists:
    binder: Var
    bound: Term
    body: "Formula"

    def __post_init__(self) -> None:
        _check_bounded(self.binder, self.bound)


def _check_bounded(binder: Var, bound: Term) -> None:
    if not isinstance(binder.type, Nat):
        raise TypeMismatch(NAT, binder.type, "bounded quantifier binder")
    ty = infer_type(bound)
    if not isinstance(ty, Nat):
        raise TypeMismatch(NAT, ty, "quantifier bound")


Formula = Union[
    AtomEq0, St, MemSeq, Not, Or, And, Implies,
    Forall, Exists, ForallSt, ExistsSt, BForall, BExists,
]

QUANTIFIERS = (Forall, Exists, ForallSt, ExistsSt)
BOUNDED = (BForall, BExists)

TRUE = AtomEq0(Zero(), Zero())
FALSE = AtomEq0(Zero(), NumLit(1))


@dataclass(frozen=True)
class BinderTuple:
    """An ordered tuple of typed variables with pairwise distinct names."""

    vars: tuple[Var, ...] = ()

    def __post_init__(self) -> None:
        names = [v.name for v in self.vars]
        if len(set(names)) != len(names):
            raise FormulaError(f"duplicate names in binder tuple: {names}")

    def __iter__(self) -> Iterator[Var]:
        return iter(self.vars)

    def __len__(self) -> int:
        return len(self.vars)

    def __bool__(self) -> bool:
        return bool(self.vars)

    def names(self) -> set[str]:
        return {v.name for v in self.vars}


# ---------------------------------------------------------------------------
# Structural helpers


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (Or, And, Implies)):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists, ForallSt, ExistsSt, BForall, BExists)):
        return (f.body,)
    return ()


def rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, Or):
        return Or(kids[0], kids[1])
    if isinstance(f, And):
        return And(kids[0], kids[1])
    if isinstance(f, Implies):
        return Implies(kids[0], kids[1])
    if isinstance(f, Forall):
        return Forall(f.binder, kids[0])
    if isinstance(f, Exists):
        return Exists(f.binder, kids[0])
    if isinstance(f, ForallSt):
        return ForallSt(f.binder, kids[0])
    if isinstance(f, ExistsSt):
        return ExistsSt(f.binder, kids[0])
    if isinstance(f, BForall):
        return BForall(f.binder, f.bound, kids[0])
    if isinstance(f, BExists):
        return BExists(f.binder, f.bound, kids[0])
    return f


def atom_terms(f: Formula) -> tuple[Term, ...]:
    if isinstance(f, AtomEq0):
        return (f.lhs, f.rhs)
    if isinstance(f, St):
        return (f.term,)
    if isinstance(f, MemSeq):
        return (f.elem, f.seq)
    if isinstance(f, (BForall, BExists)):
        return (f.bound,)
    return ()


def free_vars(f: Formula) -> list[Var]:
    """Free variables of a formula in first-occurrence order."""
    seen: dict[str, Var] = {}

    def note(t: Term, bound: frozenset[str]) -> None:
        for v in free_term_vars(t):
            if v.name not in bound and v.name not in seen:
                seen[v.name] = v

    def walk(f: Formula, bound: frozenset[str]) -> None:
        for t in atom_terms(f):
            note(t, bound)
        if isinstance(f, (Forall, Exists, ForallSt, ExistsSt, BForall, BExists)):
            walk(f.body, bound | {f.binder.name})
        else:
            for kid in children(f):
                walk(kid, bound)

    walk(f, frozenset())
    return list(seen.values())


def all_names(f: Formula) -> set[str]:
    """Every variable name occurring in the formula, free or bound."""
    out: set[str] = set()

    def walk(f: Formula) -> None:
        for t in atom_terms(f):
            out.update(v.name for v in free_term_vars(t))
            out.update(_term_binder_names(t))
        if isinstance(f, (Forall, Exists, ForallSt, ExistsSt, BForall, BExists)):
            out.add(f.binder.name)
        for kid in children(f):
            walk(kid)

    walk(f)
    return out


def _term_binder_names(t: Term) -> set[str]:
    from .typesys import Lam, Succ, SeqAppend

    out: set[str] = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Lam):
            out.add(cur.binder.name)
            stack.append(cur.body)
        elif isinstance(cur, App):
            stack.extend((cur.fun, cur.arg))
        elif isinstance(cur, Succ):
            stack.append(cur.arg)
        elif isinstance(cur, SeqAppend):
            stack.extend((cur.seq, cur.elem))
        elif isinstance(cur, (SeqLen,)):
            stack.append(cur.seq)
        elif isinstance(cur, SeqIdx):
            stack.extend((cur.seq, cur.index))
    return out


def is_internal(f: Formula) -> bool:
    """True when neither ``st`` nor a relativized quantifier occurs."""
    if isinstance(f, (St, ForallSt, ExistsSt)):
        return False
    return all(is_internal(kid) for kid in children(f))


# ---------------------------------------------------------------------------
# Alpha-equivalence


def alpha_equal(f: Formula, g: Formula) -> bool:
    return _alpha(f, g, {}, {})


def _alpha(f: Formula, g: Formula, fb: dict, gb: dict) -> bool:
    if type(f) is not type(g):
        return False
    if isinstance(f, AtomEq0):
        return _alpha_term(f.lhs, g.lhs, fb, gb) and _alpha_term(f.rhs, g.rhs, fb, gb)
    if isinstance(f, St):
        return f.ty == g.ty and _alpha_term(f.term, g.term, fb, gb)
    if isinstance(f, MemSeq):
        return _alpha_term(f.elem, g.elem, fb, gb) and _alpha_term(f.seq, g.seq, fb, gb)
    if isinstance(f, Not):
        return _alpha(f.body, g.body, fb, gb)
    if isinstance(f, (Or, And, Implies)):
        return _alpha(f.left, g.left, fb, gb) and _alpha(f.right, g.right, fb, gb)
    if isinstance(f, (Forall, Exists, ForallSt, ExistsSt)):
        if f.binder.type != g.binder.type:
            return False
        mark = len(fb)
        fb2 = dict(fb)
        gb2 = dict(gb)
        fb2[f.binder.name] = mark
        gb2[g.binder.name] = mark
        return _alpha(f.body, g.body, fb2, gb2)
    if isinstance(f, (BForall, BExists)):
        if not _alpha_term(f.bound, g.bound, fb, gb):
            return False
        mark = len(fb)
        fb2 = dict(fb)
        gb2 = dict(gb)
        fb2[f.binder.name] = mark
        gb2[g.binder.name] = mark
        return _alpha(f.body, g.body, fb2, gb2)
    return False


def _alpha_term(s: Term, t: Term, sb: dict, tb: dict) -> bool:
    from .typesys import Lam, Succ, SeqAppend, SeqEmpty, Rec

    if type(s) is not type(t):
        # NumLit and iterated successor are evaluation-equal but kept
        # syntactically distinct; alpha-equivalence is syntactic.
        return False
    if isinstance(s, Var):
        if s.type != t.type:
            return False
        sm = sb.get(s.name)
        tm = tb.get(t.name)
        if sm is None and tm is None:
            return s.name == t.name
        return sm is not None and sm == tm
    if isinstance(s, (Zero,)):
        return True
    if isinstance(s, NumLit):
        return s.n == t.n
    if isinstance(s, Succ):
        return _alpha_term(s.arg, t.arg, sb, tb)
    if isinstance(s, Rec):
        return s.result_type == t.result_type
    if isinstance(s, Lam):
        if s.binder.type != t.binder.type:
            return False
        mark = len(sb)
        sb2 = dict(sb)
        tb2 = dict(tb)
        sb2[s.binder.name] = mark
        tb2[t.binder.name] = mark
        return _alpha_term(s.body, t.body, sb2, tb2)
    if isinstance(s, App):
        return _alpha_term(s.fun, t.fun, sb, tb) and _alpha_term(s.arg, t.arg, sb, tb)
    if isinstance(s, SeqEmpty):
        return s.elem_type == t.elem_type
    if isinstance(s, SeqAppend):
        return _alpha_term(s.seq, t.seq, sb, tb) and _alpha_term(s.elem, t.elem, sb, tb)
    if isinstance(s, SeqLen):
        return _alpha_term(s.seq, t.seq, sb, tb)
    if isinstance(s, SeqIdx):
        return _alpha_term(s.seq, t.seq, sb, tb) and _alpha_term(s.index, t.index, sb, tb)
    return False


# ---------------------------------------------------------------------------
# Substitution


def substitute(f: Formula, var: Var, t: Term) -> Formula:
    """Capture-avoiding substitution of ``t`` for ``var`` in ``f``."""
    ty = infer_type(t)
    if ty != var.type:
        raise TypeMismatch(var.type, ty, f"substitution for {var.name}")
    repl_free = {v.name for v in free_term_vars(t)}

    def walk(f: Formula) -> Formula:
        if isinstance(f, AtomEq0):
            return AtomEq0(term_substitute(f.lhs, var, t), term_substitute(f.rhs, var, t))
        if isinstance(f, St):
            return St(f.ty, term_substitute(f.term, var, t))
        if isinstance(f, MemSeq):
            return MemSeq(term_substitute(f.elem, var, t), term_substitute(f.seq, var, t))
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, Or):
            return Or(walk(f.left), walk(f.right))
        if isinstance(f, And):
            return And(walk(f.left), walk(f.right))
        if isinstance(f, Implies):
            return Implies(walk(f.left), walk(f.right))
        if isinstance(f, (Forall, Exists, ForallSt, ExistsSt, BForall, BExists)):
            if f.binder.name == var.name:
                if isinstance(f, (BForall, BExists)):
                    # The bound is outside the binder's scope.
                    return rebuild_bounded(f, term_substitute(f.bound, var, t), f.body)
                return f
            binder = f.binder
            body = f.body
            if binder.name in repl_free:
                fresh = _fresh_formula_name(binder.name, repl_free | all_names(f) | {var.name})
                nb = Var(fresh, binder.type)
                body = substitute(body, binder, nb)
                binder = nb
            if isinstance(f, (BForall, BExists)):
                g = type(f)(binder, term_substitute(f.bound, var, t), walk(body))
                return g
            return type(f)(binder, walk(body))
        raise FormulaError(f"unknown node {f!r}")

    return walk(f)


def rebuild_bounded(f: Formula, bound: Term, body: Formula) -> Formula:
    if isinstance(f, BForall):
        return BForall(f.binder, bound, body)
    return BExists(f.binder, bound, body)


def _fresh_formula_name(base: str, avoid: set[str]) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def rename_binder(f, fresh_name: str):
    """Rename a quantifier's binder (used for deterministic display)."""
    nb = Var(fresh_name, f.binder.type)
    body = substitute(f.body, f.binder, nb)
    if isinstance(f, (BForall, BExists)):
        return type(f)(nb, f.bound, body)
    return type(f)(nb, body)


# ---------------------------------------------------------------------------
# Relativization and equality expansion


def relativize_st(f: Formula) -> Formula:
    """Append st to every unbounded quantifier of an internal formula."""
    if not is_internal(f):
        raise NotInternal("relativization applies to internal formulas only")

    def walk(f: Formula) -> Formula:
        if isinstance(f, Forall):
            return ForallSt(f.binder, walk(f.body))
        if isinstance(f, Exists):
            return ExistsSt(f.binder, walk(f.body))
        kids = tuple(walk(k) for k in children(f))
        return rebuild(f, kids)

    return walk(f)


def fully_relativized(f: Formula) -> bool:
    """True when every unbounded quantifier in ``f`` is st-relativized."""
    if isinstance(f, (Forall, Exists)):
        return False
    return all(fully_relativized(kid) for kid in children(f))


def expand_equality(x: Term, y: Term, approx: bool = False,
                    avoid: set[str] | None = None) -> Formula:
    """Pointwise equality of ``x`` and ``y`` at their common type.

    At base type this is the primitive equality; at arrow types fresh
    arguments are quantified over (st-relativized when ``approx`` is set,
    giving the approximate-equality reading); sequence types compare length
    and entries under a bounded quantifier.
    """
    tx = infer_type(x)
    ty = infer_type(y)
    if tx != ty:
        raise TypeMismatch(tx, ty, "equality operands")
    avoid = set(avoid or set())
    avoid |= {v.name for v in free_term_vars(x)} | {v.name for v in free_term_vars(y)}
    return _expand_eq(x, y, tx, approx, avoid)


def _expand_eq(x: Term, y: Term, ty: FiniteType, approx: bool, avoid: set[str]) -> Formula:
    if isinstance(ty, Nat):
        return AtomEq0(x, y)
    if isinstance(ty, Arrow):
        name = _fresh_formula_name("z", avoid)
        avoid.add(name)
        z = Var(name, ty.domain)
        body = _expand_eq(App(x, z), App(y, z), ty.codomain, approx, avoid)
        return ForallSt(z, body) if approx else Forall(z, body)
    if isinstance(ty, Seq):
        name = _fresh_formula_name("i", avoid)
        avoid.add(name)
        i = Var(name, NAT)
        lens = AtomEq0(SeqLen(x), SeqLen(y))
        entries = BForall(i, pred_of(SeqLen(x)),
                          _expand_eq(SeqIdx(x, i), SeqIdx(y, i), ty.element, approx, avoid))
        return And(lens, entries)
    raise TypeMismatch("a finite type", ty, "equality expansion")


# ---------------------------------------------------------------------------
# Membership desugaring and bounded-membership views


def desugar_membership(f: MemSeq) -> Formula:
    """Unfold ``x in s`` into a bounded search over the entries of ``s``.

    For a closed sequence the bound is evaluated; an empty closed sequence
    yields the canonical false atom.  For an open sequence the bound is the
    symbolic predecessor of its length (candidate sequences produced by
    choice are read as nonempty).
    """
    seqty = infer_type(f.seq)
    assert isinstance(seqty, Seq)
    closed = not free_term_vars(f.seq)
    if closed:
        n = evaluate(SeqLen(f.seq))
        assert isinstance(n, int)
        if n == 0:
            return FALSE
        from .typesys import numeral

        bound: Term = numeral(n - 1)
    else:
        bound = pred_of(SeqLen(f.seq))
    avoid = {v.name for v in free_term_vars(f.elem)} | {v.name for v in free_term_vars(f.seq)}
    name = _fresh_formula_name("i", avoid)
    i = Var(name, NAT)
    return BExists(i, bound, expand_equality(SeqIdx(f.seq, i), f.elem, avoid=avoid | {name}))


def forall_in(var: Var, seq: Term, body: Formula) -> Formula:
    """Quantification over the entries of a sequence: (forall var in seq)."""
    return Forall(var, Or(Not(MemSeq(var, seq)), body))


def exists_in(var: Var, seq: Term, body: Formula) -> Formula:
    return Exists(var, And(MemSeq(var, seq), body))


def match_forall_in(f: Formula) -> tuple[Var, Term, Formula] | None:
    """Recognize (forall v)(v not-in s \\/ body) with v not free in s."""
    if isinstance(f, Forall) and isinstance(f.body, Or):
        g = f.body.left
        if isinstance(g, Not) and isinstance(g.body, MemSeq):
            m = g.body
            if m.elem == f.binder and f.binder.name not in {v.name for v in free_term_vars(m.seq)}:
                return f.binder, m.seq, f.body.right
    return None


def match_exists_in(f: Formula) -> tuple[Var, Term, Formula] | None:
    """Recognize (exists v)(v in s /\\ body) with v not free in s."""
    if isinstance(f, Exists) and isinstance(f.body, And):
        g = f.body.left
        if isinstance(g, MemSeq):
            if g.elem == f.binder and f.binder.name not in {v.name for v in free_term_vars(g.seq)}:
                return f.binder, g.seq, f.body.right
    return None
