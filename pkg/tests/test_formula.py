import pytest

from nsf.formula import (
    And,
    AtomEq0,
    BExists,
    BForall,
    BinderTuple,
    Exists,
    ExistsSt,
    Forall,
    ForallSt,
    FormulaError,
    Implies,
    MemSeq,
    Not,
    NotInternal,
    Or,
    St,
    alpha_equal,
    desugar_membership,
    exists_in,
    expand_equality,
    forall_in,
    free_vars,
    fully_relativized,
    is_internal,
    match_exists_in,
    match_forall_in,
    relativize_st,
    substitute,
)
from nsf.typesys import (
    NAT,
    App,
    Arrow,
    NumLit,
    Seq,
    SeqAppend,
    SeqEmpty,
    TypeMismatch,
    Var,
    Zero,
    numeral,
    seq_literal,
)

n = Var("n", NAT)
m = Var("m", NAT)
f1 = Var("f", Arrow(NAT, NAT))


def eq(a, b):
    return AtomEq0(a, b)


def test_atom_requires_base_type():
    with pytest.raises(TypeMismatch):
        AtomEq0(f1, f1)


def test_st_checks_annotation():
    with pytest.raises(TypeMismatch):
        St(NAT, f1)


def test_memseq_checks_element_type():
    with pytest.raises(TypeMismatch):
        MemSeq(f1, SeqEmpty(NAT))


def test_binder_tuple_rejects_duplicates():
    with pytest.raises(FormulaError):
        BinderTuple((n, Var("n", NAT)))


k = Var("k", NAT)


@pytest.mark.parametrize(
    "left,right,expected",
    [
        (Forall(n, eq(n, n)), Forall(m, eq(m, m)), True),
        (Forall(n, eq(n, n)), Exists(n, eq(n, n)), False),
        (Forall(n, eq(n, n)), Forall(k, eq(k, k)), True),
        (eq(Zero(), Zero()), eq(Zero(), Zero()), True),
        (eq(Zero(), Zero()), eq(Zero(), NumLit(1)), False),
    ],
)
def test_alpha_equal(left, right, expected):
    assert alpha_equal(left, right) is expected


def test_alpha_distinguishes_binder_types():
    g = Var("g", Arrow(NAT, NAT))
    assert not alpha_equal(Forall(n, eq(n, n)), Forall(g, eq(Zero(), Zero())))


def test_alpha_reflexive_on_corpus(corpus):
    for formula in corpus.values():
        assert alpha_equal(formula, formula)


def test_substitute_simple():
    body = eq(App(f1, n), Zero())
    out = substitute(body, n, numeral(3))
    assert out == eq(App(f1, NumLit(3)), Zero())


def test_substitute_under_binder():
    g = Var("g", Arrow(NAT, NAT))
    body = Forall(n, eq(App(f1, n), Zero()))
    out = substitute(body, f1, g)
    assert alpha_equal(out, Forall(n, eq(App(g, n), Zero())))


def test_substitute_avoids_capture():
    # (forall n. f n = m)[m := n] must rename the binder.
    body = Forall(n, eq(App(f1, n), m))
    out = substitute(body, m, n)
    assert isinstance(out, Forall)
    assert out.binder.name != "n"
    assert alpha_equal(out, Forall(Var("k", NAT), eq(App(f1, Var("k", NAT)), n)))


def test_substitute_free_var_bookkeeping():
    body = Forall(n, eq(App(f1, n), m))
    out = substitute(body, m, numeral(0))
    names = {v.name for v in free_vars(out)}
    assert names == {"f"}


def test_substitute_bounded_quantifier_bound_is_outside_scope():
    body = BExists(n, m, eq(n, Zero()))
    out = substitute(body, m, numeral(4))
    assert out == BExists(n, NumLit(4), eq(n, Zero()))
    shadow = BExists(n, n, eq(n, Zero()))  # bound mentions an outer n
    out2 = substitute(shadow, n, numeral(2))
    assert out2 == BExists(n, NumLit(2), eq(n, Zero()))


def test_is_internal():
    assert is_internal(eq(App(f1, n), Zero()))
    assert not is_internal(St(NAT, n))
    assert not is_internal(ForallSt(n, eq(App(f1, n), Zero())))


def test_relativize_st():
    inner = Exists(n, eq(App(f1, n), Zero()))
    out = relativize_st(inner)
    assert out == ExistsSt(n, eq(App(f1, n), Zero()))
    bounded = BExists(m, n, eq(App(f1, m), Zero()))
    assert relativize_st(bounded) == bounded
    atom = eq(App(f1, n), Zero())
    assert relativize_st(atom) == atom


def test_relativize_requires_internal():
    with pytest.raises(NotInternal):
        relativize_st(St(NAT, n))


def test_relativize_leaves_no_unrelativized_quantifier():
    g = Forall(n, Implies(eq(n, Zero()), Exists(m, BForall(Var("k", NAT), m, eq(n, m)))))
    out = relativize_st(g)
    assert fully_relativized(out)
    assert not is_internal(out)


def test_expand_equality_base_and_arrow():
    assert expand_equality(n, m) == AtomEq0(n, m)
    g = Var("g", Arrow(NAT, NAT))
    out = expand_equality(f1, g)
    assert isinstance(out, Forall)
    z = out.binder
    assert out == Forall(z, AtomEq0(App(f1, z), App(g, z)))
    approx = expand_equality(f1, g, approx=True)
    assert isinstance(approx, ForallSt)


def test_expand_equality_avoids_operand_names():
    zf = Var("z", Arrow(NAT, NAT))
    zg = Var("z2", Arrow(NAT, NAT))
    out = expand_equality(zf, zg)
    assert out.binder.name not in {"z", "z2"}


def test_expand_equality_sequences():
    s = Var("s", Seq(NAT))
    t = Var("t", Seq(NAT))
    out = expand_equality(s, t)
    assert isinstance(out, And)
    assert isinstance(out.right, BForall)


def test_expand_equality_type_mismatch():
    with pytest.raises(TypeMismatch):
        expand_equality(n, f1)


def test_desugar_membership_empty_is_false():
    out = desugar_membership(MemSeq(n, SeqEmpty(NAT)))
    assert out == AtomEq0(Zero(), NumLit(1))


def test_desugar_membership_singleton():
    out = desugar_membership(MemSeq(n, seq_literal(NAT, [numeral(3)])))
    assert isinstance(out, BExists)
    assert out.bound == Zero()  # len - 1 evaluated on the closed sequence
    from nsf.typesys import SeqIdx

    assert alpha_equal(
        out, BExists(m, Zero(), AtomEq0(SeqIdx(seq_literal(NAT, [numeral(3)]), m), n))
    )


def test_desugar_membership_open_sequence_keeps_symbolic_bound():
    F = Var("F", Arrow(NAT, Seq(NAT)))
    out = desugar_membership(MemSeq(n, App(F, m)))
    assert isinstance(out, BExists)
    assert is_internal(out)
    names = {v.name for v in free_vars(out)}
    assert names == {"n", "F", "m"}


def test_membership_quantifier_views():
    s = Var("s", Seq(NAT))
    fa = forall_in(n, s, eq(n, Zero()))
    assert match_forall_in(fa) == (n, s, eq(n, Zero()))
    ex = exists_in(n, s, eq(n, Zero()))
    assert match_exists_in(ex) == (n, s, eq(n, Zero()))
    assert match_forall_in(Forall(n, eq(n, n))) is None
