from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from dcprofiles.dl import (
    AllAttr, AllRel, And, AtMostOneAttr, AtomicConcept, AttrMax, AttrMin, Complement, ConceptInc,
    Fd, IdAttr, IdRoles, Inverse, KnowledgeBase, Max, MaxPlace, Min, MinPlace, Or, Profile, Rel,
    Selection, SomeAttr, SomeRel, Top, TopRel,
)
from dcprofiles.kbtext import read_kb
from dcprofiles.semantics import (
    Interpretation, InterpretationError, InterpretationSyntaxError, eval_concept, eval_relation,
    format_interpretation, is_model, parse_interpretation, satisfies_axiom,
)
from support import FIXTURES, kb

SEM = FIXTURES / "semantics"
A, B = AtomicConcept("A"), AtomicConcept("B")
R, S = Rel("R"), Rel("S")


def interp(**kw):
    objs = frozenset(kw.pop("objs", ("c1", "c2", "c3")))
    vals = frozenset(kw.pop("vals", ()))
    return Interpretation(objs, vals, **kw)


def test_top():
    i = interp(top_set=frozenset({"c1"}))
    assert eval_concept(i, Top()) == {"c1"}


def test_at_most_one_attribute():
    i = interp(vals=("v1", "v2"), attrs={"a": frozenset({("c1", "v1"), ("c1", "v2")})})
    ext = eval_concept(i, AtMostOneAttr("a"))
    assert "c1" not in ext and {"c2", "c3"} <= ext


def test_at_least_two_successors():
    i = interp(relations={"R": frozenset({("c1", "c2"), ("c1", "c3")})})
    assert eval_concept(i, Min(2, R)) == {"c1"}


def test_inverse():
    i = interp(relations={"P": frozenset({("c1", "c2")})})
    assert eval_relation(i, Inverse("P")) == {("c2", "c1")}


def test_selection():
    i = interp(objs=("c1", "c2"), concepts={"A": frozenset({"c1"})})
    assert eval_relation(i, Selection("1", A)) == {("c1", "c1"), ("c1", "c2")}


def test_complement_of_empty():
    i = interp(objs=("c1", "c2"))
    assert len(eval_relation(i, Complement(Rel("P")))) == 4


def test_top_relations():
    i = interp(objs=("c1", "c2"))
    assert len(eval_relation(i, TopRel(2))) == 4
    assert len(eval_relation(i, TopRel(3))) == 8


def test_place_counts_use_labels():
    i = interp(relations={"P": frozenset({("c1", "c2"), ("c3", "c2")})},
               places={"P": ("from_side", "to_side")})
    assert eval_concept(i, MinPlace(2, "to_side", Rel("P"))) == {"c2"}
    assert eval_concept(i, MaxPlace(0, "from_side", Rel("P"))) == {"c2"}


def test_attribute_cardinality_counts_typed_values():
    i = interp(vals=("v1", "v2"), attrs={"a": frozenset({("c1", "v1"), ("c1", "v2")})},
               datatypes={"T": frozenset({"v1"})})
    assert "c1" in eval_concept(i, AttrMax(1, "a", "T"))
    assert "c1" not in eval_concept(i, AttrMin(2, "a", "T"))


def test_inclusion():
    i = interp(concepts={"A": frozenset({"c1"}), "B": frozenset({"c1", "c2"})})
    assert satisfies_axiom(i, ConceptInc(A, B))
    assert not satisfies_axiom(i, ConceptInc(B, A))


def test_identifier_shared_value():
    i = interp(vals=("v1",), concepts={"Book": frozenset({"c1", "c2"})},
               attrs={"isbn": frozenset({("c1", "v1"), ("c2", "v1")})},
               datatypes={"String": frozenset({"v1"})})
    assert not satisfies_axiom(i, IdAttr(AtomicConcept("Book"), "isbn"), ["String"])


def test_fd_violation():
    i = interp(objs=("a", "b", "c", "d"), relations={"P": frozenset({("a", "b", "c"), ("a", "b", "d")})})
    assert not satisfies_axiom(i, Fd("P", ("1", "2"), "3"))
    assert satisfies_axiom(i, Fd("P", ("1", "3"), "2"))


def test_id_roles_needs_one_successor_each():
    i = interp(concepts={"X": frozenset({"c1"})},
               relations={"R": frozenset({("c1", "c2")}), "S": frozenset()})
    assert not satisfies_axiom(i, IdRoles(AtomicConcept("X"), (R, S)))


def test_empty_kb_is_satisfied():
    assert is_model(interp(), KnowledgeBase(Profile.DCS)).ok


def test_missing_successor_witness():
    k = kb("profile dcs\nconcept A\nrel R/2\nA <= >= 1 R")
    res = is_model(interp(concepts={"A": frozenset({"c1"})}), k)
    assert not res.ok
    assert res.failures[0].witness == "c1"


def test_bad_interpretation():
    with pytest.raises(InterpretationError):
        interp(concepts={"A": frozenset({"zz"})}).check()
    with pytest.raises(InterpretationError):
        interp(objs=("c1",), vals=("c1",)).check()


def test_interpretation_syntax_error():
    with pytest.raises(InterpretationSyntaxError):
        parse_interpretation("obj c1\nrel P = {(c1,c2)}\n")


def _fixture_cases():
    return sorted(p.stem for p in SEM.glob("*.interp"))


def _expected(path):
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first.startswith("# expect:")
    return first.split(":", 1)[1].strip() == "model"


@pytest.mark.parametrize("case", _fixture_cases())
def test_fixture_verdict(case):
    k = read_kb(SEM / f"{case}.kb")
    i = parse_interpretation((SEM / f"{case}.interp").read_text(encoding="utf-8"))
    assert is_model(i, k).ok == _expected(SEM / f"{case}.interp")


def test_six_object_model_of_library_model():
    k = read_kb(FIXTURES / "fig1.dcs.kb")
    i = parse_interpretation((FIXTURES / "fig1_six.interp").read_text(encoding="utf-8"))
    assert len(i.delta_c) == 6
    res = is_model(i, k)
    assert res.ok, res.failures


# -- properties ----------------------------------------------------------------

OBJS = ("c1", "c2", "c3")
VALS = ("v1", "v2")


def subset(xs):
    return st.frozensets(st.sampled_from(list(xs))) if xs else st.just(frozenset())


@st.composite
def interpretations(draw):
    top = draw(subset(OBJS))
    pairs = list(product(sorted(top), repeat=2))
    attr_pairs = list(product(sorted(top), VALS))
    return Interpretation(
        frozenset(OBJS), frozenset(VALS), top,
        {"A": draw(subset(top)), "B": draw(subset(top))},
        {"R": draw(subset(pairs)), "S": draw(subset(pairs))},
        {}, {"a": draw(subset(attr_pairs))}, {"T": draw(subset(VALS))})


rels = st.sampled_from([R, S, Inverse("R"), Inverse("S")])
ks = st.integers(0, 3)
leaves = st.one_of(
    st.just(Top()), st.just(A), st.just(B),
    st.builds(Min, ks, rels), st.builds(Max, ks, rels),
    st.builds(MinPlace, ks, st.sampled_from(["1", "2"]), st.sampled_from([R, S])),
    st.builds(MaxPlace, ks, st.sampled_from(["1", "2"]), st.sampled_from([R, S])),
    st.just(AllAttr("a", "T")), st.just(SomeAttr("a", "T")), st.just(AtMostOneAttr("a")),
)
concepts = st.recursive(
    leaves,
    lambda inner: st.one_of(
        st.builds(lambda x, y: And((x, y)), inner, inner),
        st.builds(lambda x, y: Or((x, y)), inner, inner),
        st.builds(AllRel, rels, inner), st.builds(SomeRel, rels, inner)),
    max_leaves=6)


@settings(max_examples=200, deadline=None)
@given(interpretations(), concepts, concepts)
def test_and_is_intersection(i, c, d):
    assert eval_concept(i, And((c, d))) == eval_concept(i, c) & eval_concept(i, d)


@settings(max_examples=200, deadline=None)
@given(interpretations(), concepts, concepts)
def test_or_is_union(i, c, d):
    assert eval_concept(i, Or((c, d))) == eval_concept(i, c) | eval_concept(i, d)


@settings(max_examples=200, deadline=None)
@given(interpretations())
def test_inverse_involution(i):
    inv = eval_relation(i, Inverse("R"))
    assert {(b, a) for a, b in inv} == eval_relation(i, R)


@settings(max_examples=300, deadline=None)
@given(interpretations(), rels)
def test_universal_and_inverse_domain_agree(i, r):
    back = Rel(r.name) if isinstance(r, Inverse) else Inverse(r.name)
    forall = ConceptInc(Top(), AllRel(r, A))
    domain = ConceptInc(SomeRel(back, Top()), A)
    assert satisfies_axiom(i, forall) == satisfies_axiom(i, domain)


@settings(max_examples=300, deadline=None)
@given(interpretations(), st.sampled_from(["1", "2"]))
def test_place_typing_reading(i, place):
    typing = ConceptInc(MinPlace(1, place, R), A)
    k = int(place) - 1
    expected = all(t[k] in i.concept("A") for t in i.relation("R"))
    assert satisfies_axiom(i, typing) == expected


@settings(max_examples=200, deadline=None)
@given(interpretations())
def test_format_parse_round_trip(i):
    back = parse_interpretation(format_interpretation(i))
    for c in (A, B, Min(1, R), SomeAttr("a", "T"), AtMostOneAttr("a"), MinPlace(1, "2", S)):
        assert eval_concept(back, c) == eval_concept(i, c)
    assert back.top == i.top
