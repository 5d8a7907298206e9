import pytest

from nsf.formula import (
    AtomEq0,
    BExists,
    ExistsSt,
    Forall,
    ForallSt,
    Implies,
    MemSeq,
    Not,
    Or,
    St,
    alpha_equal,
)
from nsf.syntax import (
    FormulaSyntaxError,
    TypeAnnotationMissing,
    parse_corpus,
    parse_formula,
    parse_term,
    parse_type,
    print_formula,
    print_term,
    print_type,
)
from nsf.typesys import (
    NAT,
    App,
    Arrow,
    Lam,
    NumLit,
    Rec,
    Seq,
    SeqAppend,
    SeqEmpty,
    SeqIdx,
    SeqLen,
    Succ,
    Var,
    Zero,
)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("0", NAT),
        ("0 -> 0", Arrow(NAT, NAT)),
        ("1", Arrow(NAT, NAT)),
        ("2", Arrow(Arrow(NAT, NAT), NAT)),
        ("0*", Seq(NAT)),
        ("(0 -> 0)*", Seq(Arrow(NAT, NAT))),
        ("0 -> 0 -> 0", Arrow(NAT, Arrow(NAT, NAT))),
        ("(0 -> 0) -> 0", Arrow(Arrow(NAT, NAT), NAT)),
        ("0**", Seq(Seq(NAT))),
    ],
)
def test_parse_type(text, expected):
    assert parse_type(text) == expected


def test_type_round_trip():
    for text in ["0", "0 -> 0", "0*", "(0 -> 0)*", "(0 -> 0) -> 0 -> 0", "0* -> 0"]:
        ty = parse_type(text)
        assert parse_type(print_type(ty)) == ty


@pytest.mark.parametrize(
    "text,expected",
    [
        ("0", Zero()),
        ("3", NumLit(3)),
        ("S 0", Succ(Zero())),
        ("S (S 0)", Succ(Succ(Zero()))),
        ("rec[0]", Rec(NAT)),
        ("<>[0]", SeqEmpty(NAT)),
        ("append(<>[0], 4)", SeqAppend(SeqEmpty(NAT), NumLit(4))),
        ("len(<>[0])", SeqLen(SeqEmpty(NAT))),
        ("\\x:0. x", Lam(Var("x", NAT), Var("x", NAT))),
    ],
)
def test_parse_term(text, expected):
    assert parse_term(text) == expected


def test_parse_application_and_index():
    t = parse_term("f:(0 -> 0 -> 0) x:0 y:0")
    f = Var("f", Arrow(NAT, Arrow(NAT, NAT)))
    assert t == App(App(f, Var("x", NAT)), Var("y", NAT))
    s = parse_term("s:0* ! 2")
    assert s == SeqIdx(Var("s", Seq(NAT)), NumLit(2))


def test_successor_vs_variable_named_S():
    # A bare head S is the successor; a bound S is an ordinary variable.
    assert parse_term("S 3") == Succ(NumLit(3))
    f = parse_formula("forall S:1, x:0. S x = 0")
    assert isinstance(f, Forall) and f.binder.name == "S"
    inner = f.body.body
    assert inner == AtomEq0(App(Var("S", Arrow(NAT, NAT)), Var("x", NAT)), Zero())
    # In argument position an unbound S still reads as a variable error,
    # since the successor must be applied.
    g = parse_formula("forall g:(1 -> 0), S:1. g S = 0")
    assert isinstance(g.body.body, AtomEq0)


def test_free_variables_need_annotations():
    with pytest.raises(TypeAnnotationMissing):
        parse_formula("f n = 0")
    f = parse_formula("f:1 n:0 = 0")
    assert f == AtomEq0(App(Var("f", Arrow(NAT, NAT)), Var("n", NAT)), Zero())
    # the second occurrence inherits the annotation
    g = parse_formula("f:1 n:0 = 0 /\\ f n = 0")
    assert g.left == g.right


def test_annotation_conflict_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("forall x:0. x:0* = 0")


@pytest.mark.parametrize(
    "text,node",
    [
        ("st(f: 1)", St),
        ("forall^st n:0. f:1 n = 0", ForallSt),
        ("exists m <= i:0. f:1 m = 0", BExists),
        ("x:0 in s:0*", MemSeq),
        ("~f:1 x:0 = 0", Not),
        ("f:1 x:0 = 0 -> f x = 0", Implies),
    ],
)
def test_parse_formula_nodes(text, node):
    assert isinstance(parse_formula(text), node)


def test_st_parse_shapes():
    f = parse_formula("st(f: 1)")
    assert f == St(Arrow(NAT, NAT), Var("f", Arrow(NAT, NAT)))
    g = parse_formula("forall f:1, x:0. st(f x)")
    assert g.body.body == St(NAT, App(Var("f", Arrow(NAT, NAT)), Var("x", NAT)))


def test_quantifier_body_extends_right():
    f = parse_formula("forall n:0. f:1 n = 0 -> f n = 0")
    assert isinstance(f, Forall)
    assert isinstance(f.body, Implies)


def test_connective_precedence():
    f = parse_formula("a:0 = 0 \\/ b:0 = 0 /\\ c:0 = 0 -> d:0 = 0")
    assert isinstance(f, Implies)
    assert isinstance(f.left, Or)


def test_right_associative_connectives():
    f = parse_formula("a:0 = 0 \\/ b:0 = 0 \\/ c:0 = 0")
    assert isinstance(f, Or) and isinstance(f.right, Or)


def test_syntax_error_carries_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("forall x:0.\n x = ")
    assert err.value.line == 2


def test_multi_binder_groups():
    f = parse_formula("forall^st x:0, y:0. g:(0 -> 0 -> 0) x y = 0")
    assert isinstance(f, ForallSt) and isinstance(f.body, ForallSt)


@pytest.mark.parametrize(
    "text",
    [
        "st(y: 0)",
        "forall^st n:0. f:1 n = 0",
        "exists m <= i:0. f:1 m = 0",
        "forall x:0. x = x",
        "(exists x:0. f:1 x = 0) -> f (mu:(1 -> 0) f) = 0",
        "forall T:1, g:2. exists i <= g T. T i = 0",
        "x:0 in append(<>[0], 3)",
        "~(a:0 = 0 /\\ b:0 = 0)",
        "forall s:0*. exists n:0. (n in s -> len(s) = 0)",
        "(\\x:0. S x) 2 = 3",
    ],
)
def test_formula_round_trip(text):
    f = parse_formula(text)
    assert alpha_equal(parse_formula(print_formula(f)), f)


def test_corpus_round_trip(corpus):
    for name, f in corpus.items():
        printed = print_formula(f)
        assert alpha_equal(parse_formula(printed), f), name


def test_term_print_round_trip():
    for text in ["\\x:0. S x", "rec[0] 1 (\\k:0. \\p:0. S p) 3", "append(<>[0*], <>[0])"]:
        t = parse_term(text)
        assert parse_term(print_term(t)) == t


def test_parse_corpus_blocks():
    text = """
# comment
one:
  forall x:0. x = x

two: exists y:0. y = 0
""".strip()
    entries = parse_corpus(text)
    assert list(entries) == ["one", "two"]


def test_parse_corpus_rejects_duplicate_names():
    with pytest.raises(FormulaSyntaxError):
        parse_corpus("a: 0 = 0\na: 1 = 1\n")


def test_parse_corpus_rejects_unindented_continuation():
    with pytest.raises(FormulaSyntaxError):
        parse_corpus("a:\nforall x:0. x = x\n")
