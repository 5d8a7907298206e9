"""Interpretation of external formulas as normal forms.

A *normal form* is (forall^st x-tuple)(exists^st y-tuple) matrix with an
internal matrix.  ``translate`` maps an arbitrary formula to one by
structural recursion over exactly five primitive cases: internal formulas,
the standardness predicate, negation, disjunction, and unbounded universal
quantification; everything else is first rewritten classically
(``desugar_classical``).  Intermediate results of the recursion are
simplified before they are combined, so candidate-sequence types never
nest; the final result of ``translate`` is left raw and ``simplify``
finishes the job.

``simplify`` applies six rewrite rules to a fixed point in a deterministic
order (R1 singleton membership, R2 equality-guard elimination, R3 vacuous
binders, R4 witness-sequence collapse, R5 bound-functional collapse, R6
matrix canonicalization and disjunct dedup).  R4 and R5 encode the
convention that entries of a standard finite sequence are standard; every
other rule is a plain classical equivalence.  Rewrites are logged so a
computation can be replayed step by step.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .typesys import (
    NAT,
    App,
    Arrow,
    FiniteType,
    Seq,
    SeqAppend,
    SeqEmpty,
    Term,
    Var,
    Zero,
    app,
    arrow,
    free_term_vars,
    monus_term,
)
from . import formula as F
from .formula import (
    AtomEq0,
    BExists,
    BForall,
    BinderTuple,
    Exists,
    ExistsSt,
    Forall,
    ForallSt,
    Formula,
    Implies,
    MemSeq,
    Not,
    Or,
    And,
    St,
    alpha_equal,
    all_names,
    children,
    exists_in,
    expand_equality,
    forall_in,
    free_vars,
    is_internal,
    match_exists_in,
    match_forall_in,
    rebuild,
    substitute,
)


class SstError(Exception):
    pass


class NotANormalForm(SstError):
    pass


class SimplifyLoopError(SstError):
    """The rewrite rules fired more than the pass bound allows."""


MAX_RULE_FIRES = 1000


# ---------------------------------------------------------------------------
# Fresh names


class NameSupply:
    """Session-scoped fresh-name source: base name plus a monotone counter.

    A translation session owns exactly one supply; this keeps generated
    names deterministic for golden output.
    """

    def __init__(self, avoid: set[str] | None = None):
        self.avoid: set[str] = set(avoid or set())
        self.counter = 0

    def fresh(self, base: str) -> str:
        base = re.sub(r"\d+$", "", base) or "w"
        while True:
            self.counter += 1
            cand = f"{base}{self.counter}"
            if cand not in self.avoid:
                self.avoid.add(cand)
                return cand


# ---------------------------------------------------------------------------
# Normal forms and traces


@dataclass(frozen=True)
class NormalForm:
    univ: BinderTuple
    exist: BinderTuple
    matrix: Formula
    params: BinderTuple = BinderTuple()

    def __post_init__(self) -> None:
        if not is_internal(self.matrix):
            raise NotANormalForm("matrix must be internal")
        overlap = self.univ.names() & self.exist.names()
        if overlap:
            raise NotANormalForm(f"tuple names overlap: {overlap}")

    def render(self) -> Formula:
        f = self.matrix
        for v in reversed(tuple(self.exist)):
            f = ExistsSt(v, f)
        for v in reversed(tuple(self.univ)):
            f = ForallSt(v, f)
        return f

    def tuple_names(self) -> set[str]:
        return self.univ.names() | self.exist.names() | self.params.names()


def make_nf(univ: tuple[Var, ...], exist: tuple[Var, ...], matrix: Formula) -> NormalForm:
    bound = {v.name for v in univ} | {v.name for v in exist}
    params = tuple(v for v in free_vars(matrix) if v.name not in bound)
    return NormalForm(BinderTuple(univ), BinderTuple(exist), matrix, BinderTuple(params))


@dataclass(frozen=True)
class TraceStep:
    rule: str
    before: Formula
    after: Formula


@dataclass
class RewriteTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def extend(self, steps: list[TraceStep]) -> None:
        self.steps.extend(steps)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def replay(start: Formula, trace: RewriteTrace) -> Formula:
    """Re-apply a trace by leftmost subtree replacement."""
    current = start
    for step in trace:
        current = _replace_first(current, step.before, step.after)
    return current


def _replace_first(f: Formula, target: Formula, replacement: Formula) -> Formula:
    done = False

    def walk(g: Formula) -> Formula:
        nonlocal done
        if done:
            return g
        if g == target:
            done = True
            return replacement
        kids = children(g)
        if not kids:
            return g
        return rebuild(g, tuple(walk(k) for k in kids))

    out = walk(f)
    if not done:
        raise SstError("trace step does not match any subformula")
    return out


def shape_split(f: Formula) -> NormalForm:
    """Split a formula of normal-form shape into its tuples and matrix."""
    univ: list[Var] = []
    exist: list[Var] = []
    seen: set[str] = set()
    g = f
    while isinstance(g, ForallSt):
        binder = g.binder
        if binder.name in seen:
            raise NotANormalForm(f"repeated binder {binder.name} in prefix")
        seen.add(binder.name)
        univ.append(binder)
        g = g.body
    while isinstance(g, ExistsSt):
        binder = g.binder
        if binder.name in seen:
            raise NotANormalForm(f"repeated binder {binder.name} in prefix")
        seen.add(binder.name)
        exist.append(binder)
        g = g.body
    if not is_internal(g):
        raise NotANormalForm("matrix is not internal")
    return make_nf(tuple(univ), tuple(exist), g)


# ---------------------------------------------------------------------------
# Classical desugaring


def _le_atom(a: Term, b: Term) -> Formula:
    return AtomEq0(app(monus_term(), a, b), Zero())


def desugar_classical(f: Formula, trace: RewriteTrace | None = None) -> Formula:
    """Rewrite to the primitive connective set {atom, st, ~, \\/, forall}.

    Bounded number quantifiers are primitive as long as their body is
    internal; over an external body they unfold to an unbounded quantifier
    with an arithmetic guard.
    """
    steps = trace if trace is not None else RewriteTrace()

    def emit(rule: str, before: Formula, after: Formula) -> Formula:
        steps.steps.append(TraceStep(rule, before, after))
        return after

    def walk(f: Formula) -> Formula:
        if isinstance(f, (AtomEq0, St, MemSeq)):
            return f
        if isinstance(f, Not):
            return rebuild(f, (walk(f.body),))
        if isinstance(f, Or):
            return Or(walk(f.left), walk(f.right))
        if isinstance(f, And):
            g = And(walk(f.left), walk(f.right))
            return emit("desugar_and", g, Not(Or(Not(g.left), Not(g.right))))
        if isinstance(f, Implies):
            g = Implies(walk(f.left), walk(f.right))
            return emit("desugar_implies", g, Or(Not(g.left), g.right))
        if isinstance(f, Forall):
            return Forall(f.binder, walk(f.body))
        if isinstance(f, Exists):
            g = Exists(f.binder, walk(f.body))
            return emit("desugar_exists", g, Not(Forall(g.binder, Not(g.body))))
        if isinstance(f, ForallSt):
            g = ForallSt(f.binder, walk(f.body))
            after = Forall(g.binder, Or(Not(St(g.binder.type, g.binder)), g.body))
            return emit("desugar_forall_st", g, after)
        if isinstance(f, ExistsSt):
            g = ExistsSt(f.binder, walk(f.body))
            after = Not(Forall(g.binder, Or(Not(St(g.binder.type, g.binder)), Not(g.body))))
            return emit("desugar_exists_st", g, after)
        if isinstance(f, (BForall, BExists)):
            body = walk(f.body)
            if is_internal(body):
                return F.rebuild_bounded(f, f.bound, body)
            guard = Not(_le_atom(f.binder, f.bound))
            if isinstance(f, BForall):
                g: Formula = BForall(f.binder, f.bound, body)
                after = Forall(f.binder, Or(guard, body))
            else:
                g = BExists(f.binder, f.bound, body)
                after = Not(Forall(f.binder, Or(guard, Not(body))))
            return emit("desugar_bounded", g, after)
        raise SstError(f"cannot desugar {f!r}")

    return walk(f)


# ---------------------------------------------------------------------------
# The interpretation


def translate(f: Formula, supply: NameSupply | None = None) -> tuple[NormalForm, RewriteTrace]:
    """Interpret ``f`` as a normal form, logging every rewrite."""
    supply = supply or NameSupply(avoid=all_names(f))
    trace = RewriteTrace()
    g = desugar_classical(f, trace)
    nf = _translate(g, supply, trace, simplify_root=False)
    return nf, trace


def _translate(f: Formula, supply: NameSupply, trace: RewriteTrace,
               simplify_root: bool) -> NormalForm:
    nf = _clause(f, supply, trace)
    if simplify_root:
        nf, steps = simplify(nf, supply)
        trace.extend(steps.steps)
    return nf


def _clause(f: Formula, supply: NameSupply, trace: RewriteTrace) -> NormalForm:
    def emit(rule: str, before: Formula, nf: NormalForm) -> NormalForm:
        trace.steps.append(TraceStep(rule, before, nf.render()))
        return nf

    # (i) internal formulas are their own interpretation.
    if is_internal(f):
        return emit("clause_i", f, make_nf((), (), f))

    # (ii) the standardness predicate.
    if isinstance(f, St):
        w = Var(supply.fresh("w"), f.ty)
        matrix = expand_equality(w, f.term, avoid=set(supply.avoid))
        return emit("clause_ii", f, make_nf((), (w,), matrix))

    # (iii) negation.
    if isinstance(f, Not):
        sub = _translate(f.body, supply, trace, simplify_root=True)
        before = Not(sub.render())
        xs = tuple(sub.univ)
        funcs: list[Var] = []
        matrix = Not(sub.matrix)
        for y in reversed(tuple(sub.exist)):
            fn_type: FiniteType = Seq(y.type)
            if xs:
                fn_type = arrow(*[x.type for x in xs], Seq(y.type))
            fn = Var(supply.fresh(y.name.upper()), fn_type)
            funcs.insert(0, fn)
            seq_term: Term = app(fn, *[Var(x.name, x.type) for x in xs])
            matrix = forall_in(y, seq_term, matrix)
        return emit("clause_iii", before, make_nf(tuple(funcs), xs, matrix))

    # (iv) disjunction.
    if isinstance(f, Or):
        left = _translate(f.left, supply, trace, simplify_root=True)
        right = _translate(f.right, supply, trace, simplify_root=True)
        before = Or(left.render(), right.render())
        nf = make_nf(
            tuple(left.univ) + tuple(right.univ),
            tuple(left.exist) + tuple(right.exist),
            Or(left.matrix, right.matrix),
        )
        return emit("clause_iv", before, nf)

    # (v) unbounded universal quantification.
    if isinstance(f, Forall):
        sub = _translate(f.body, supply, trace, simplify_root=True)
        before = Forall(f.binder, sub.render())
        if not sub.exist:
            nf = make_nf(tuple(sub.univ), (), Forall(f.binder, sub.matrix))
            return emit("clause_v", before, nf)
        seqs = [Var(supply.fresh(y.name), Seq(y.type)) for y in sub.exist]
        matrix = sub.matrix
        for y, s in zip(reversed(tuple(sub.exist)), reversed(seqs)):
            matrix = exists_in(y, Var(s.name, s.type), matrix)
        nf = make_nf(tuple(sub.univ), tuple(seqs), Forall(f.binder, matrix))
        return emit("clause_v", before, nf)

    raise SstError(f"no interpretation clause for {f!r}")


# ---------------------------------------------------------------------------
# Simplification


def simplify(nf: NormalForm, supply: NameSupply | None = None) -> tuple[NormalForm, RewriteTrace]:
    """Rewrite a normal form to a fixed point of rules R1..R6."""
    supply = supply or NameSupply(avoid=all_names(nf.render()))
    trace = RewriteTrace()
    fires = 0

    def canon_step(nf: NormalForm) -> NormalForm:
        new_matrix = _canon(nf.matrix)
        if new_matrix != nf.matrix:
            out = make_nf(tuple(nf.univ), tuple(nf.exist), new_matrix)
            trace.steps.append(TraceStep("R6", nf.render(), out.render()))
            return out
        return nf

    nf = canon_step(nf)
    rules = (_rule_r1, _rule_r2, _rule_r3, _rule_r4, _rule_r5, _rule_r6_dedup)
    while True:
        for rule in rules:
            result = rule(nf, supply)
            if result is not None:
                new_nf, rule_name = result
                trace.steps.append(TraceStep(rule_name, nf.render(), new_nf.render()))
                nf = canon_step(new_nf)
                fires += 1
                if fires > MAX_RULE_FIRES:
                    raise SimplifyLoopError(f"more than {MAX_RULE_FIRES} rule firings")
                break
        else:
            return nf, trace


# -- matrix canonicalization (R6): negation normal form, right-flattening


def _canon(f: Formula) -> Formula:
    return _flatten(_nnf(f))


def _nnf(f: Formula) -> Formula:
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right))
    if isinstance(f, Not):
        g = f.body
        if isinstance(g, Not):
            return _nnf(g.body)
        if isinstance(g, Or):
            return And(_nnf(Not(g.left)), _nnf(Not(g.right)))
        if isinstance(g, And):
            return Or(_nnf(Not(g.left)), _nnf(Not(g.right)))
        if isinstance(g, Implies):
            return And(_nnf(g.left), _nnf(Not(g.right)))
        if isinstance(g, Forall):
            return Exists(g.binder, _nnf(Not(g.body)))
        if isinstance(g, Exists):
            return Forall(g.binder, _nnf(Not(g.body)))
        if isinstance(g, BForall):
            return BExists(g.binder, g.bound, _nnf(Not(g.body)))
        if isinstance(g, BExists):
            return BForall(g.binder, g.bound, _nnf(Not(g.body)))
        return Not(_nnf(g))
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(_nnf(k) for k in kids))


def _spine(f: Formula, node) -> list[Formula]:
    if isinstance(f, node):
        return _spine(f.left, node) + _spine(f.right, node)
    return [f]


def _join(parts: list[Formula], node) -> Formula:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = node(p, out)
    return out


def _flatten(f: Formula) -> Formula:
    if isinstance(f, (Or, And)):
        node = type(f)
        parts = [_flatten(p) for p in _spine(f, node)]
        return _join(parts, node)
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(_flatten(k) for k in kids))


# -- generic innermost-first search over the matrix


def _find_innermost(f: Formula, matcher):
    """Depth-first, children before node; returns (path, replacement) or None."""

    def walk(g: Formula, path: tuple[int, ...]):
        for i, kid in enumerate(children(g)):
            hit = walk(kid, path + (i,))
            if hit is not None:
                return hit
        repl = matcher(g)
        if repl is not None:
            return path, repl
        return None

    return walk(f, ())


def _get_at(f: Formula, path: tuple[int, ...]) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def _replace_at(f: Formula, path: tuple[int, ...], replacement: Formula) -> Formula:
    if not path:
        return replacement
    kids = list(children(f))
    kids[path[0]] = _replace_at(kids[path[0]], path[1:], replacement)
    return rebuild(f, tuple(kids))


def _binders_on_path(f: Formula, path: tuple[int, ...]) -> list[Formula]:
    out = []
    for i in path:
        out.append(f)
        f = children(f)[i]
    return out


# -- R1: membership in a singleton sequence


def _singleton_elem(seq: Term) -> Term | None:
    if isinstance(seq, SeqAppend) and isinstance(seq.seq, SeqEmpty):
        return seq.elem
    return None


def _rule_r1(nf: NormalForm, supply: NameSupply):
    def matcher(g: Formula):
        hit = match_forall_in(g) or match_exists_in(g)
        if hit is None:
            return None
        var, seq, body = hit
        elem = _singleton_elem(seq)
        if elem is None:
            return None
        return substitute(body, var, elem)

    found = _find_innermost(nf.matrix, matcher)
    if found is None:
        return None
    path, repl = found
    matrix = _replace_at(nf.matrix, path, repl)
    return make_nf(tuple(nf.univ), tuple(nf.exist), matrix), "R1"


# -- R2: equality-guard elimination


def _match_var_spine(t: Term, head: Var, zs: list[Var]) -> bool:
    from .typesys import app_spine

    h, args = app_spine(t)
    if not (isinstance(h, Var) and h.name == head.name and len(args) == len(zs)):
        return False
    return all(isinstance(a, Var) and a.name == z.name for a, z in zip(args, zs))


def _strip_spine(t: Term, zs: list[Var]) -> Term | None:
    """If t has the form u z1 ... zk for the given zs, return u."""
    from .typesys import app_spine

    h, args = app_spine(t)
    if len(args) < len(zs):
        return None
    tail = args[len(args) - len(zs):]
    if not all(isinstance(a, Var) and a.name == z.name for a, z in zip(tail, zs)):
        return None
    u = h
    for a in args[: len(args) - len(zs)]:
        u = App(u, a)
    return u


def _ineq_guard(d: Formula, x: Var) -> Term | None:
    """Match d against the expanded form of x-differs-from-t; return t."""
    zs: list[Var] = []
    while isinstance(d, Exists):
        zs.append(d.binder)
        d = d.body
    if not (isinstance(d, Not) and isinstance(d.body, AtomEq0)):
        return None
    return _guard_sides(d.body, x, zs)


def _eq_guard(d: Formula, x: Var) -> Term | None:
    """Match d against the expanded form of x-equals-t; return t."""
    zs: list[Var] = []
    while isinstance(d, Forall):
        zs.append(d.binder)
        d = d.body
    if not isinstance(d, AtomEq0):
        return None
    return _guard_sides(d, x, zs)


def _guard_sides(atom: AtomEq0, x: Var, zs: list[Var]) -> Term | None:
    for a, b in ((atom.lhs, atom.rhs), (atom.rhs, atom.lhs)):
        if _match_var_spine(a, x, zs):
            t = _strip_spine(b, zs)
            if t is None:
                continue
            names = {v.name for v in free_term_vars(t)}
            if x.name in names or any(z.name in names for z in zs):
                continue
            from .typesys import infer_type

            if infer_type(t) != x.type:
                continue
            return t
    return None


def _peel_membership(g: Formula, kind) -> tuple[list[tuple[Var, Term]], Formula]:
    """Peel a prefix of membership quantifiers of the given matcher."""
    prefix: list[tuple[Var, Term]] = []
    while True:
        hit = kind(g)
        if hit is None:
            return prefix, g
        var, seq, body = hit
        prefix.append((var, seq))
        g = body


def _rule_r2(nf: NormalForm, supply: NameSupply):
    def matcher(g: Formula):
        # A membership quantifier is the business of R4/R5, not a guard.
        if isinstance(g, Forall) and match_forall_in(g) is None:
            hit = _try_guard(g.binder, g.body, match_exists_in, Or, _ineq_guard, exists_in)
            if hit is not None:
                return hit
        if isinstance(g, Exists) and match_exists_in(g) is None:
            hit = _try_guard(g.binder, g.body, match_forall_in, And, _eq_guard, forall_in)
            if hit is not None:
                return hit
        return None

    def _try_guard(x: Var, body: Formula, peeler, spine_node, guard, wrapper):
        prefix, core = _peel_membership(body, peeler)
        prefix_names = {v.name for v, _ in prefix}
        if x.name in prefix_names:
            return None
        parts = _spine(core, spine_node) if isinstance(core, spine_node) else [core]
        for i, part in enumerate(parts):
            t = guard(part, x)
            if t is None:
                continue
            tnames = {v.name for v in free_term_vars(t)}
            if tnames & prefix_names:
                continue
            rest = parts[:i] + parts[i + 1:]
            if not rest:
                return None
            new_core = _join(rest, spine_node)
            out = new_core
            for v, seq in reversed(prefix):
                out = wrapper(v, seq, out)
            return substitute(out, x, t)

    found = _find_innermost(nf.matrix, matcher)
    if found is None:
        return None
    path, repl = found
    matrix = _replace_at(nf.matrix, path, repl)
    return make_nf(tuple(nf.univ), tuple(nf.exist), matrix), "R2"


# -- R3: vacuous tuple binders


def _rule_r3(nf: NormalForm, supply: NameSupply):
    used = {v.name for v in free_vars(nf.matrix)}
    for side in ("univ", "exist"):
        tup = tuple(getattr(nf, side))
        for i, v in enumerate(tup):
            if v.name not in used:
                new = tup[:i] + tup[i + 1:]
                if side == "univ":
                    return make_nf(new, tuple(nf.exist), nf.matrix), "R3"
                return make_nf(tuple(nf.univ), new, nf.matrix), "R3"
    return None


# -- R4 / R5: collapse of candidate sequences bound by tuple functionals


def _seq_result_type(ty: FiniteType) -> FiniteType | None:
    while isinstance(ty, Arrow):
        ty = ty.codomain
    if isinstance(ty, Seq):
        return ty.element
    return None


def _occurrences(matrix: Formula, name: str) -> int:
    count = 0

    def count_term(t: Term) -> None:
        nonlocal count
        count += sum(1 for v in free_term_vars(t) if v.name == name)

    def walk(f: Formula, bound: frozenset[str]) -> None:
        nonlocal count
        if name in bound:
            return
        for t in F.atom_terms(f):
            for v in free_term_vars(t):
                if v.name == name and name not in bound:
                    count += 1
        if isinstance(f, (Forall, Exists, ForallSt, ExistsSt, BForall, BExists)):
            walk(f.body, bound | {f.binder.name})
        else:
            for kid in children(f):
                walk(kid, bound)

    walk(matrix, frozenset())
    return count


def _collapse_component(nf: NormalForm, supply: NameSupply, side: str,
                        member_matcher, forbidden_on_path) -> NormalForm | None:
    tup = tuple(getattr(nf, side))
    tuple_vars = nf.tuple_names()
    for i, w in enumerate(tup):
        elem = _seq_result_type(w.type)
        if elem is None:
            continue
        if _occurrences(nf.matrix, w.name) != 1:
            continue
        hit = _find_member_use(nf.matrix, w, member_matcher, tuple_vars)
        if hit is None:
            continue
        path, var, body = hit
        if any(isinstance(b, forbidden_on_path) for b in _binders_on_path(nf.matrix, path)):
            continue
        binder = var
        taken = tuple_vars | {v.name for v in free_vars(nf.matrix)}
        if binder.name in taken - {w.name} or binder.name in tuple_vars:
            fresh = Var(supply.fresh(binder.name), binder.type)
            body = substitute(body, binder, fresh)
            binder = fresh
        matrix = _replace_at(nf.matrix, path, body)
        new = tup[:i] + (binder,) + tup[i + 1:]
        if side == "univ":
            return make_nf(new, tuple(nf.exist), matrix)
        return make_nf(tuple(nf.univ), new, matrix)
    return None


def _find_member_use(matrix: Formula, w: Var, member_matcher, tuple_vars: set[str]):
    def matcher(g: Formula):
        hit = member_matcher(g)
        if hit is None:
            return None
        var, seq, body = hit
        from .typesys import app_spine

        head, args = app_spine(seq)
        if not (isinstance(head, Var) and head.name == w.name):
            return None
        for a in args:
            if not (isinstance(a, Var) and a.name in tuple_vars and a.name != w.name):
                return None
        return (var, body)

    def walk(g: Formula, path: tuple[int, ...]):
        repl = matcher(g)
        if repl is not None:
            return path, repl[0], repl[1]
        for i, kid in enumerate(children(g)):
            hit = walk(kid, path + (i,))
            if hit is not None:
                return hit
        return None

    return walk(matrix, ())


def _rule_r4(nf: NormalForm, supply: NameSupply):
    out = _collapse_component(nf, supply, "exist", match_exists_in, (Forall, BForall))
    if out is None:
        return None
    return out, "R4"


def _rule_r5(nf: NormalForm, supply: NameSupply):
    out = _collapse_component(nf, supply, "univ", match_forall_in, (Exists, BExists))
    if out is None:
        return None
    return out, "R5"


# -- R6 dedup: drop a disjunct that restates another one at a second binder


def _rule_r6_dedup(nf: NormalForm, supply: NameSupply):
    for side, forbidden in (("exist", (Forall, BForall)), ("univ", (Exists, BExists))):
        tup = tuple(getattr(nf, side))
        for i, xi in enumerate(tup):
            for j, xj in enumerate(tup):
                if i == j or xi.type != xj.type:
                    continue
                hit = _find_dup_disjunct(nf.matrix, xi, xj, forbidden)
                if hit is None:
                    continue
                path, repl = hit
                matrix = _replace_at(nf.matrix, path, repl)
                new = tup[:j] + tup[j + 1:]
                if side == "univ":
                    return make_nf(new, tuple(nf.exist), matrix), "R6"
                return make_nf(tuple(nf.univ), new, matrix), "R6"
    return None


def _find_dup_disjunct(matrix: Formula, xi: Var, xj: Var, forbidden):
    if _occurrences(matrix, xj.name) == 0:
        return None

    def matcher(g: Formula):
        if not isinstance(g, Or):
            return None
        parts = _spine(g, Or)
        for a in range(len(parts)):
            for b in range(len(parts)):
                if a == b:
                    continue
                if xj.name in {v.name for v in free_vars(parts[a])}:
                    continue
                if alpha_equal(substitute(parts[a], xi, xj), parts[b]):
                    rest = parts[:b] + parts[b + 1:]
                    return _join(rest, Or)
        return None

    def walk(g: Formula, path: tuple[int, ...]):
        repl = matcher(g)
        if repl is not None:
            # xj must occur nowhere outside the dropped disjunct.
            candidate = _replace_at(matrix, path, repl)
            if _occurrences(candidate, xj.name) == 0:
                return path, repl
        for i, kid in enumerate(children(g)):
            hit = walk(kid, path + (i,))
            if hit is not None:
                return hit
        return None

    hit = walk(matrix, ())
    if hit is None:
        return None
    path, repl = hit
    if any(isinstance(b, forbidden) for b in _binders_on_path(matrix, path)):
        return None
    return path, repl


# ---------------------------------------------------------------------------
# The invariance check


def fixed_point_check(f: Formula) -> bool:
    """True when interpreting a normal-form-shaped formula reproduces it."""
    nf = shape_split(f)
    lhs, _ = simplify(translate(f)[0])
    rhs, _ = simplify(nf)
    return alpha_equal(lhs.render(), rhs.render())


def merge_conjunction(nfs: list[NormalForm]) -> NormalForm:
    """Conjoin normal forms by concatenating tuples and matrices.

    Tuple names must be pairwise disjoint across the conjuncts.
    """
    univ: tuple[Var, ...] = ()
    exist: tuple[Var, ...] = ()
    matrix: Formula | None = None
    for nf in nfs:
        univ += tuple(nf.univ)
        exist += tuple(nf.exist)
        matrix = nf.matrix if matrix is None else And(matrix, nf.matrix)
    assert matrix is not None
    return make_nf(univ, exist, matrix)
