import pytest

from conftest import interpret
from nsf.formula import (
    BExists,
    Forall,
    Implies,
    alpha_equal,
    free_vars,
    fully_relativized,
    is_internal,
)
from nsf.herbrand import (
    NotMonotone,
    PartitionMismatch,
    collapse_witnesses,
    extraction_obligation,
    herbrandise_pointwise,
    implication_to_normal_form,
    obligation_to_normal_form,
    skolemize_antecedent,
)
from nsf.sst import NameSupply, fixed_point_check, make_nf, shape_split
from nsf.syntax import parse_formula, print_formula
from nsf.typesys import NAT, Arrow


@pytest.fixture(scope="module")
def flagship(corpus):
    ante = [shape_split(corpus["uwkl_part"]), shape_split(corpus["kurve"])]
    cons = shape_split(corpus["b_form"])
    return ante, cons


def test_skolemization_prunes_to_own_universals(flagship):
    ante, _ = flagship
    supply = NameSupply(avoid={"T", "U", "S", "k", "N"})
    sk, witnesses = skolemize_antecedent(ante[1], supply, ["Xi"])
    assert [w.name for w in witnesses] == ["Xi"]
    assert witnesses[0].type == parse_type_cached("1 -> 1 -> 0 -> 0")
    assert not sk.exist
    assert "Xi" in {v.name for v in sk.params}


_types = {}


def parse_type_cached(text):
    from nsf.syntax import parse_type

    if text not in _types:
        _types[text] = parse_type(text)
    return _types[text]


def test_effective_form(flagship, corpus):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=True, witness_names=["Xi"])
    assert [v.name for v in nf.univ] == ["Xi", "f"]
    assert [v.name for v in nf.exist] == ["i"]
    assert {v.name for v in nf.params} == {"lenc", "ovr", "Phi"}
    assert isinstance(nf.matrix, Implies)
    hypothesis = nf.matrix.left
    # Both antecedent blocks are plain universals now.
    assert not fully_relativized(hypothesis) or is_internal(hypothesis)
    assert is_internal(nf.matrix)
    assert fixed_point_check(nf.render())


def test_pointwise_form(flagship):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=False, witness_names=["Xi"])
    assert [v.name for v in nf.univ] == ["Xi", "f"]
    assert [v.name for v in nf.exist] == ["T", "U", "S", "k", "i"]
    assert fixed_point_check(nf.render())


def test_vacuous_antecedent_passes_consequent_through(corpus):
    cons = shape_split(corpus["b_form"])
    trivial = make_nf((), (), parse_formula("0 = 0"))
    nf = implication_to_normal_form([trivial], cons, drop_st=True)
    assert alpha_equal(nf.render(), cons.render())
    nf2 = implication_to_normal_form([trivial], cons, drop_st=False)
    assert alpha_equal(nf2.render(), cons.render())


def test_obligation_shape(flagship):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=True, witness_names=["Xi"])
    ob = extraction_obligation(nf, "t")
    assert [v.name for v in ob.inputs] == ["lenc", "ovr", "Phi", "Xi", "f"]
    assert [v.name for v in ob.outputs] == ["i"]
    hole = ob.hole_vars()[0]
    assert hole.name == "t"
    rendered = ob.render()
    assert is_internal(rendered)
    assert "i in t" in print_formula(rendered)
    # every input is universally quantified in the rendering
    g = rendered
    seen = []
    while isinstance(g, Forall):
        seen.append(g.binder.name)
        g = g.body
    assert seen == ["lenc", "ovr", "Phi", "Xi", "f"]


def test_obligation_round_trips_to_normal_form(flagship):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=True, witness_names=["Xi"])
    ob = extraction_obligation(nf, "t")
    back = obligation_to_normal_form(ob, params={v.name for v in nf.params})
    assert alpha_equal(back.render(), nf.render())


def test_obligation_with_no_outputs():
    nf = shape_split(parse_formula("forall^st f:1. f 0 = 0"))
    ob = extraction_obligation(nf, "t")
    assert not ob.outputs
    assert alpha_equal(ob.render(), parse_formula("forall f:1. f 0 = 0"))


def test_collapse_witnesses(flagship):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=True, witness_names=["Xi"])
    ob = extraction_obligation(nf, "t")
    collapsed = collapse_witnesses(ob, "i", "s")
    assert not collapsed.outputs
    assert collapsed.collapsed[0][0] == "i"
    text = print_formula(collapsed.render())
    assert "exists m <= s" in text
    assert is_internal(collapsed.render())


def test_collapse_identity_on_singleton_semantics():
    # max over a one-entry candidate sequence is that entry; the collapse
    # of a singleton hole is the identity at the value level.
    from nsf.typesys import App, evaluate, maxseq_term, numeral, seq_literal, NAT as N0

    assert evaluate(App(maxseq_term(), seq_literal(N0, [numeral(42)]))) == 42


def test_collapse_rejects_downward_occurrence():
    f = parse_formula(
        "forall^st f:1. exists^st i:0. forall m <= i. f m = 0"
    )
    nf = shape_split(f)
    ob = extraction_obligation(nf, "t")
    with pytest.raises(NotMonotone):
        collapse_witnesses(ob, "i")


def test_collapse_rejects_non_base_component(corpus):
    nf = shape_split(corpus["wkl_st_nf"])
    ob = extraction_obligation(nf, "t")
    with pytest.raises(NotMonotone):
        collapse_witnesses(ob, "b")


def test_collapse_accepts_negated_bounded_forall():
    f = parse_formula(
        "forall^st f:1. exists^st i:0. ~(forall m <= i. f m = 0) \\/ f 0 = 0"
    )
    nf = shape_split(f)
    ob = extraction_obligation(nf, "t")
    out = collapse_witnesses(ob, "i")
    assert not out.outputs


def test_herbrandise_pointwise(flagship):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=False, witness_names=["Xi"])
    her, holes = herbrandise_pointwise(nf, {"T": 1, "U": 2, "S": 2, "k": 2, "i": "o"})
    assert holes == {"T": "i1_T", "U": "i2_U", "S": "i2_S", "k": "i2_k", "i": "o"}
    assert is_internal(her)
    assert fully_relativized(her) is False  # plain universals remain
    names = {v.name for v in free_vars(her)}
    assert {"i1_T", "i2_U", "i2_S", "i2_k", "o"} <= names


def test_herbrandise_output_matches_frozen_corpus(flagship, corpus):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=False, witness_names=["Xi"])
    her, _ = herbrandise_pointwise(nf, {"T": 1, "U": 2, "S": 2, "k": 2, "i": "o"})
    assert alpha_equal(her, corpus["her_uwkl"])


def test_herbrandise_requires_full_partition(flagship):
    ante, cons = flagship
    nf = implication_to_normal_form(ante, cons, drop_st=False, witness_names=["Xi"])
    with pytest.raises(PartitionMismatch):
        herbrandise_pointwise(nf, {"T": 1, "i": "o"})
    with pytest.raises(PartitionMismatch):
        herbrandise_pointwise(nf, {"T": 1, "U": 2, "S": 2, "k": 2, "i": 1})


def test_herbrandise_relativizes_back_to_expected_shape(flagship, corpus):
    # Substituting closed standard terms for the holes and re-relativizing
    # must produce a formula of the original implication's shape: relativized
    # universals over the inputs, membership-restricted hypothesis, bounded
    # conclusion.  Here we check the shape on the hole-named formula itself.
    from nsf.formula import relativize_st

    her = corpus["her_uwkl"]
    rel = relativize_st(her)
    assert fully_relativized(rel)
    g = rel
    names = []
    from nsf.formula import ForallSt

    while isinstance(g, ForallSt):
        names.append(g.binder.name)
        g = g.body
    assert names[:5] == ["lenc", "ovr", "Phi", "Xi", "f"]
    assert isinstance(g, Implies)
