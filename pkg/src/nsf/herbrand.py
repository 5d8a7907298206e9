"""From implications between normal forms to term-extraction obligations.

An implication (ante -> cons) between normal forms is itself brought into
normal form in two ways.  Skolemizing the antecedent's existential tuple
into witness functionals and erasing the relativization of its universals
gives the *effective* form: the antecedent becomes an internal hypothesis
and only the consequent's tuples remain quantified.  Keeping the
relativization instead turns the antecedent's universals into additional
existential outputs: the *pointwise* form, whose outputs can then be
restricted to finite candidate sequences named by holes (the pointwise
Herbrandization).

An Obligation is the strip-and-bound reading of a normal form: universally
quantify everything, and let each existential output range over a finite
sequence produced by an (unknown) term applied to the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .typesys import FiniteType, Seq, Term, Var, app, arrow
from . import formula as F
from .formula import (
    And,
    BExists,
    BForall,
    BinderTuple,
    Exists,
    Forall,
    Formula,
    Implies,
    MemSeq,
    Not,
    Or,
    alpha_equal,
    all_names,
    exists_in,
    forall_in,
    free_vars,
    is_internal,
    substitute,
)
from .sst import NameSupply, NormalForm, make_nf, merge_conjunction, shape_split

TRUE_ATOM = F.TRUE


class HerbrandError(Exception):
    pass


class NotMonotone(HerbrandError):
    pass


class PartitionMismatch(HerbrandError):
    pass


# ---------------------------------------------------------------------------
# Implications between normal forms


def skolemize_antecedent(ante: NormalForm, supply: NameSupply,
                         witness_names: list[str] | None = None) -> tuple[NormalForm, list[Var]]:
    """Replace the existential tuple of ``ante`` by witness functionals.

    Each existential component v becomes a fresh functional applied to the
    universal tuple; the returned normal form has an empty existential
    tuple.
    """
    names = list(witness_names or [])
    xs = tuple(ante.univ)
    matrix = ante.matrix
    witnesses: list[Var] = []
    for v in ante.exist:
        if names:
            base = names.pop(0)
            if base in supply.avoid:
                base = supply.fresh(base)
            else:
                supply.avoid.add(base)
        else:
            base = supply.fresh(v.name.upper())
        ty: FiniteType = v.type
        if xs:
            ty = arrow(*[x.type for x in xs], v.type)
        w = Var(base, ty)
        witnesses.append(w)
        matrix = substitute(matrix, v, app(w, *xs))
    return make_nf(xs, (), matrix), witnesses


def implication_to_normal_form(
    ante: NormalForm | list[NormalForm],
    cons: NormalForm,
    drop_st: bool = True,
    witness_names: list[str] | None = None,
    supply: NameSupply | None = None,
) -> NormalForm:
    """Normal form of (ante -> cons).

    ``ante`` may be a list of conjunct normal forms; each conjunct's
    existential tuple is skolemized over that conjunct's own universals
    before anything is merged.  With ``drop_st`` the antecedent's
    universals become plain internal quantifiers; without it they move
    into the existential output tuple (the pointwise variant).
    """
    conjuncts = ante if isinstance(ante, list) else [ante]
    avoid: set[str] = set()
    for nf in conjuncts + [cons]:
        avoid |= all_names(nf.render())
    supply = supply or NameSupply(avoid=avoid)

    skolemized = []
    for nf in conjuncts:
        sk, _ = skolemize_antecedent(nf, supply, witness_names)
        skolemized.append(sk)

    witness_vars: list[Var] = []
    for sk, orig in zip(skolemized, conjuncts):
        for w in sk.params:
            if w.name not in orig.params.names():
                witness_vars.append(w)

    clash = (set().union(*[sk.univ.names() for sk in skolemized]) |
             {w.name for w in witness_vars}) & (cons.univ.names() | cons.exist.names())
    if clash:
        raise HerbrandError(f"antecedent and consequent share binder names: {clash}")

    if drop_st:
        hypothesis: Formula | None = None
        for sk in skolemized:
            block = sk.matrix
            for x in reversed(tuple(sk.univ)):
                block = Forall(x, block)
            hypothesis = block if hypothesis is None else And(hypothesis, block)
        matrix = cons.matrix if _is_true(hypothesis) else Implies(hypothesis, cons.matrix)
        univ = tuple(witness_vars) + tuple(cons.univ)
        return make_nf(univ, tuple(cons.exist), matrix)

    merged = merge_conjunction(skolemized) if skolemized else None
    if merged is None or (_is_true(merged.matrix) and not merged.univ):
        hypothesis = None
        matrix = cons.matrix
        extra: tuple[Var, ...] = ()
    else:
        matrix = (cons.matrix if _is_true(merged.matrix)
                  else Implies(merged.matrix, cons.matrix))
        extra = tuple(merged.univ)
    univ = tuple(witness_vars) + tuple(cons.univ)
    return make_nf(univ, extra + tuple(cons.exist), matrix)


def _is_true(f: Formula | None) -> bool:
    return f is not None and f == TRUE_ATOM


# ---------------------------------------------------------------------------
# Obligations


@dataclass(frozen=True)
class Obligation:
    """A term-extraction goal: (forall inputs)(exists outputs in holes) matrix.

    ``hole`` is the base name of the unknown term; with several outputs the
    per-component holes are named ``hole_<output>``.  ``collapsed`` maps an
    output name to the single-value hole that replaced its candidate
    sequence, with the recorded monotonicity justification.
    """

    name: str
    inputs: BinderTuple
    outputs: BinderTuple
    matrix: Formula
    hole: str
    collapsed: tuple[tuple[str, str], ...] = ()

    def hole_vars(self) -> list[Var]:
        input_types = [v.type for v in self.inputs]
        out = []
        for v in self.outputs:
            name = self.hole if len(self.outputs) == 1 else f"{self.hole}_{v.name}"
            ty: FiniteType = Seq(v.type)
            if input_types:
                ty = arrow(*input_types, Seq(v.type))
            out.append(Var(name, ty))
        return out

    def render(self) -> Formula:
        xs = tuple(self.inputs)
        body = self.matrix
        for v, hole in zip(reversed(tuple(self.outputs)), reversed(self.hole_vars())):
            body = exists_in(v, app(hole, *xs), body)
        for x in reversed(xs):
            body = Forall(x, body)
        return body


def extraction_obligation(nf: NormalForm, hole_name: str = "t",
                          name: str = "obligation") -> Obligation:
    """Strip relativization and bound each output by a hole application."""
    inputs = tuple(nf.params) + tuple(nf.univ)
    return Obligation(
        name=name,
        inputs=BinderTuple(inputs),
        outputs=BinderTuple(tuple(nf.exist)),
        matrix=nf.matrix,
        hole=hole_name,
    )


def obligation_to_normal_form(ob: Obligation, params: set[str]) -> NormalForm:
    """Inverse reading of an obligation (membership back to existentials).

    ``params`` names the inputs that were free parameters rather than
    universally quantified components.
    """
    univ = tuple(v for v in ob.inputs if v.name not in params)
    return make_nf(univ, tuple(ob.outputs), ob.matrix)


# ---------------------------------------------------------------------------
# Monotone witness collapse


def _bound_occurrences(f: Formula, name: str, positive: bool,
                       out: list[tuple[str, bool]]) -> None:
    """Record quantifier-bound occurrences of ``name`` with their polarity;
    any other occurrence is recorded as ('other', polarity)."""
    if isinstance(f, (BForall, BExists)):
        if isinstance(f.bound, Var) and f.bound.name == name:
            kind = "bexists" if isinstance(f, BExists) else "bforall"
            out.append((kind, positive))
        elif _occurs_term(f.bound, name):
            out.append(("other", positive))
        if f.binder.name != name:
            _bound_occurrences(f.body, name, positive, out)
        return
    for t in F.atom_terms(f):
        if _occurs_term(t, name):
            out.append(("other", positive))
    if isinstance(f, Not):
        _bound_occurrences(f.body, name, not positive, out)
    elif isinstance(f, Implies):
        _bound_occurrences(f.left, name, not positive, out)
        _bound_occurrences(f.right, name, positive, out)
    elif isinstance(f, (F.Or, And)):
        _bound_occurrences(f.left, name, positive, out)
        _bound_occurrences(f.right, name, positive, out)
    elif isinstance(f, (Forall, Exists, F.ForallSt, F.ExistsSt)):
        if f.binder.name != name:
            _bound_occurrences(f.body, name, positive, out)


def _occurs_term(t: Term, name: str) -> bool:
    from .typesys import free_term_vars

    return any(v.name == name for v in free_term_vars(t))


def check_upward_monotone(matrix: Formula, component: Var) -> None:
    """Syntactic monotonicity: every occurrence of the component is an
    upper bound whose loosening cannot falsify the matrix."""
    occs: list[tuple[str, bool]] = []
    _bound_occurrences(matrix, component.name, True, occs)
    for kind, positive in occs:
        ok = (kind == "bexists" and positive) or (kind == "bforall" and not positive)
        if not ok:
            raise NotMonotone(
                f"component {component.name} occurs as {kind} at "
                f"{'positive' if positive else 'negative'} position"
            )


def collapse_witnesses(ob: Obligation, component: str,
                       value_hole: str = "s") -> Obligation:
    """Replace a numeric output's candidate sequence by its maximum.

    The selected output must be of base type and occur only upward-monotonically
    (as a bound of a positive bounded-exists or a negated bounded-forall);
    then a single value (the maximum of the dropped sequence) suffices and
    the output component disappears into a direct hole application.
    """
    target = None
    for v in ob.outputs:
        if v.name == component:
            target = v
    if target is None:
        raise HerbrandError(f"no output component named {component}")
    from .typesys import Nat

    if not isinstance(target.type, Nat):
        raise NotMonotone(f"component {component} is not of base type")
    check_upward_monotone(ob.matrix, target)

    xs = tuple(ob.inputs)
    hole_ty: FiniteType = target.type
    if xs:
        hole_ty = arrow(*[x.type for x in xs], target.type)
    hole_var = Var(value_hole, hole_ty)
    matrix = substitute(ob.matrix, target, app(hole_var, *xs))
    outputs = tuple(v for v in ob.outputs if v.name != component)
    justification = (
        f"{component} bounds positive existentials only; replaced by "
        f"{value_hole} = max over the candidate entries"
    )
    return Obligation(
        name=ob.name,
        inputs=ob.inputs,
        outputs=BinderTuple(outputs),
        matrix=matrix,
        hole=ob.hole,
        collapsed=ob.collapsed + ((component, justification),),
    )


# ---------------------------------------------------------------------------
# Pointwise Herbrandization


def herbrandise_pointwise(
    nf_pointwise: NormalForm,
    partition: dict[str, int | str],
    input_hole: str = "i",
    output_hole: str = "o",
) -> tuple[Formula, dict[str, str]]:
    """Build the pointwise witness formula from the no-drop normal form.

    ``partition`` maps each existential output either to a numbered
    input-restriction slot or to the string 'o' for the conclusion
    witness.  Slot components become finite candidate sequences (one hole
    per component, named ``i<slot>_<var>``); the conclusion witness is a
    direct hole application.  The result is internal and carries no
    unbounded relativized quantifier.
    """
    outputs = list(nf_pointwise.exist)
    declared = set(partition)
    actual = {v.name for v in outputs}
    if declared != actual:
        raise PartitionMismatch(
            f"partition covers {sorted(declared)}, outputs are {sorted(actual)}"
        )
    o_vars = [v for v in outputs if partition[v.name] == "o"]
    if len(o_vars) != 1:
        raise PartitionMismatch("exactly one output must map to the 'o' slot")
    o_var = o_vars[0]
    slot_vars = [v for v in outputs if v is not o_var]

    matrix = nf_pointwise.matrix
    if isinstance(matrix, Implies):
        ante, cons = matrix.left, matrix.right
    else:
        ante, cons = None, matrix

    for v in slot_vars:
        where = "antecedent" if ante is not None and _occurs(ante, v.name) else None
        if where is None or _occurs(cons, v.name):
            raise PartitionMismatch(
                f"slot component {v.name} must occur in the antecedent only"
            )
    if ante is not None and _occurs(ante, o_var.name):
        raise PartitionMismatch(f"conclusion witness {o_var.name} occurs in the antecedent")
    check_upward_monotone(cons, o_var)

    inputs = tuple(nf_pointwise.params) + tuple(nf_pointwise.univ)
    input_types = [v.type for v in inputs]

    def hole(name: str, result: FiniteType) -> Var:
        ty: FiniteType = result
        if input_types:
            ty = arrow(*input_types, result)
        return Var(name, ty)

    holes: dict[str, str] = {}
    restricted = ante
    if restricted is not None:
        conjuncts = _and_spine(restricted)
        for v in slot_vars:
            if not any(_occurs(c, v.name) for c in conjuncts):
                raise PartitionMismatch(f"slot component {v.name} unused in antecedent")
        # Wrap each conjunct with the membership quantifiers of the slot
        # components occurring in it, keeping the conjunct grouping.
        new_conjuncts = []
        for idx, c in enumerate(conjuncts):
            vs = [v for v in slot_vars if _occurs(c, v.name)]
            wrapped = c
            for v in reversed(vs):
                hv = hole(f"{input_hole}{partition[v.name]}_{v.name}", Seq(v.type))
                holes[v.name] = hv.name
                wrapped = forall_in(v, app(hv, *inputs), wrapped)
            new_conjuncts.append(wrapped)
        restricted = _and_join(new_conjuncts)

    o_hole = hole(output_hole, o_var.type)
    holes[o_var.name] = o_hole.name
    conclusion = substitute(cons, o_var, app(o_hole, *inputs))

    body = conclusion if restricted is None else Implies(restricted, conclusion)
    out: Formula = body
    for x in reversed(inputs):
        out = Forall(x, out)
    assert is_internal(out)
    return out, holes


def _occurs(f: Formula, name: str) -> bool:
    return any(v.name == name for v in free_vars(f))


def _and_spine(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _and_spine(f.left) + _and_spine(f.right)
    return [f]


def _and_join(parts: list[Formula]) -> Formula:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out
