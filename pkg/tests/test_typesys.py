import random

import pytest

from nsf.typesys import (
    NAT,
    App,
    Arrow,
    Closure,
    EMPTY_CONTEXT,
    Lam,
    Native,
    NumLit,
    OutOfFuel,
    Rec,
    Seq,
    SeqAppend,
    SeqEmpty,
    SeqIdx,
    SeqLen,
    SeqValue,
    Succ,
    TypeMismatch,
    TypingContext,
    UnboundVariable,
    Var,
    Zero,
    add_term,
    app,
    default_value,
    evaluate,
    max_term,
    maxseq_term,
    monus_term,
    mult_term,
    maxseq_term as _maxseq,
    numeral,
    pred_term,
    rec_type,
    seq_literal,
    type_check,
)

x = Var("x", NAT)


def test_identity_type():
    assert type_check(Lam(x, x)) == Arrow(NAT, NAT)


def test_seq_len_type():
    assert type_check(SeqLen(SeqEmpty(NAT))) == NAT


def test_succ_of_sequence_is_ill_typed():
    with pytest.raises(TypeMismatch):
        type_check(Succ(SeqEmpty(NAT)))


def test_application_argument_mismatch():
    f = Var("f", Arrow(Seq(NAT), NAT))
    with pytest.raises(TypeMismatch):
        type_check(App(f, Zero()), TypingContext([("f", Arrow(Seq(NAT), NAT))]))


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        type_check(x)


def test_rec_constant_type():
    assert type_check(Rec(NAT)) == rec_type(NAT)
    assert rec_type(NAT) == Arrow(NAT, Arrow(Arrow(NAT, Arrow(NAT, NAT)), Arrow(NAT, NAT)))


def test_context_shadowing_innermost_first():
    ctx = TypingContext([("x", NAT), ("x", Seq(NAT))])
    assert ctx.lookup("x") == Seq(NAT)


# ---------------------------------------------------------------------------
# Evaluation against host arithmetic


def test_add_examples():
    assert evaluate(app(add_term(), numeral(2), numeral(3))) == 5


def test_recursor_arithmetic_matches_host():
    rng = random.Random(20260810)
    add, mult, mx = add_term(), mult_term(), max_term()
    for _ in range(100):
        a, b = rng.randint(0, 1000), rng.randint(0, 1000)
        assert evaluate(app(add, numeral(a), numeral(b))) == a + b
        assert evaluate(app(mx, numeral(a), numeral(b))) == max(a, b)
    for _ in range(100):
        # Unary multiplication costs a*b recursor steps, so operands stay
        # proportional to the step budget.
        a, b = rng.randint(0, 300), rng.randint(0, 300)
        assert evaluate(app(mult, numeral(a), numeral(b))) == a * b


def test_monus_and_pred():
    assert evaluate(app(pred_term(), numeral(7))) == 6
    assert evaluate(app(pred_term(), Zero())) == 0
    assert evaluate(app(monus_term(), numeral(3), numeral(5))) == 0
    assert evaluate(app(monus_term(), numeral(9), numeral(4))) == 5


def test_recursor_base_and_step_laws():
    # Rec b s 0 = b and Rec b s (n+1) = s n (Rec b s n), for a nontrivial step.
    k, p = Var("k", NAT), Var("p", NAT)
    b = numeral(3)
    s = Lam(k, Lam(p, Succ(Succ(p))))
    assert evaluate(app(Rec(NAT), b, s, Zero())) == evaluate(b)
    for n in range(21):
        lhs = evaluate(app(Rec(NAT), b, s, numeral(n + 1)))
        rhs = evaluate(app(s, numeral(n), app(Rec(NAT), b, s, numeral(n))))
        assert lhs == rhs


def test_numlit_and_iterated_succ_agree():
    t = Succ(Succ(Succ(Zero())))
    assert evaluate(t) == evaluate(numeral(3)) == 3


def test_maxseq_collapse():
    s = seq_literal(NAT, [numeral(4), numeral(7)])
    assert evaluate(App(maxseq_term(), s)) == 7
    assert evaluate(App(maxseq_term(), seq_literal(NAT, [numeral(9)]))) == 9
    assert evaluate(App(maxseq_term(), SeqEmpty(NAT))) == 0


def test_maxseq_matches_host_max():
    rng = random.Random(7)
    for _ in range(50):
        xs = [rng.randint(0, 200) for _ in range(rng.randint(1, 8))]
        s = seq_literal(NAT, [numeral(v) for v in xs])
        assert evaluate(App(maxseq_term(), s)) == max(xs)


def test_sequence_primitives():
    assert evaluate(SeqLen(SeqEmpty(NAT))) == 0
    s = seq_literal(NAT, [numeral(4), numeral(7)])
    assert evaluate(SeqLen(s)) == 2
    assert evaluate(SeqIdx(s, numeral(1))) == 7


def test_out_of_range_indexing_returns_default():
    s = seq_literal(NAT, [numeral(4)])
    assert evaluate(SeqIdx(s, numeral(5))) == 0
    nested = SeqAppend(SeqEmpty(Seq(NAT)), SeqEmpty(NAT))
    assert evaluate(SeqIdx(nested, numeral(3))) == SeqValue((), NAT)


def test_default_values():
    assert default_value(NAT) == 0
    assert default_value(Seq(NAT)) == SeqValue((), NAT)
    fn = default_value(Arrow(NAT, NAT))
    assert isinstance(fn, Native)
    from nsf.typesys import apply_value

    assert apply_value(fn, 99) == 0


def test_fuel_exhaustion():
    big = app(mult_term(), numeral(1000), numeral(1000))
    with pytest.raises(OutOfFuel):
        evaluate(big, fuel=50)


def test_determinism():
    t = app(add_term(), numeral(12), numeral(30))
    assert evaluate(t) == evaluate(t)
    lam = Lam(x, app(add_term(), x, numeral(1)))
    assert evaluate(lam) == evaluate(lam)
    assert isinstance(evaluate(lam), Closure)


def test_subject_reduction_on_library_terms():
    # The value of every closed library application inhabits its type.
    samples = [
        (app(add_term(), numeral(2), numeral(2)), NAT),
        (seq_literal(NAT, [numeral(1)]), Seq(NAT)),
        (add_term(), Arrow(NAT, Arrow(NAT, NAT))),
        (App(maxseq_term(), seq_literal(NAT, [numeral(3)])), NAT),
    ]
    for term, ty in samples:
        assert type_check(term, EMPTY_CONTEXT) == ty
        value = evaluate(term)
        if ty == NAT:
            assert isinstance(value, int) and value >= 0
        elif isinstance(ty, Seq):
            assert isinstance(value, SeqValue)
        else:
            assert isinstance(value, (Closure, Native))


def test_library_terms_stay_within_default_fuel():
    assert evaluate(app(mult_term(), numeral(300), numeral(300))) == 90000
    assert evaluate(app(add_term(), numeral(1000), numeral(1000))) == 2000
