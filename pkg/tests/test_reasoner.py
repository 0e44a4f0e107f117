import random

import pytest
from hypothesis import given, settings, strategies as st

from dcprofiles.dl import AtomicConcept, KnowledgeBase, Max, Min, Or, Profile, Rel
from dcprofiles.finite import brute_force_countermodel
from dcprofiles.kbtext import read_kb
from dcprofiles.reasoner import (
    FALSE, BudgetExceeded, ModelFinder, classify, default_bound, entails, equivalent,
    find_countermodel, structure, subsumes_structural, unsatisfiable_concepts,
)
from dcprofiles.semantics import is_model
from kbpool import POOL, kb_of
from support import FIXTURES, kb

FIG1 = FIXTURES / "fig1.dcs.kb"


def test_empty_kb_countermodel():
    cm = find_countermodel(kb("profile dcs\nconcept A\nconcept B"), "A", "B")
    assert cm.interp.delta_c == {"c1"}
    assert cm.interp.concept("A") == {"c1"}
    assert cm.interp.concept("B") == frozenset()
    assert cm.witness == "c1"


def test_transitivity_has_no_countermodel():
    k = kb("profile dcs\nconcept A\nconcept B\nconcept C\nA <= B\nB <= C")
    assert find_countermodel(k, "A", "C", 3) is None
    assert subsumes_structural(k, "A", "C")


CLASH = "profile dcs\nconcept A\nconcept B\nrel R/2\nA <= >= 2 R\ntop <= <= 1 R"


@pytest.mark.parametrize("bound", [1, 2, 3, 4, 5])
def test_unsatisfiable_sub_has_no_countermodel(bound):
    assert find_countermodel(kb(CLASH), "A", "B", bound) is None


def test_unsatisfiable_lint():
    assert unsatisfiable_concepts(kb(CLASH)) == {"A": "unsatisfiable"}
    assert unsatisfiable_concepts(kb("profile dcs\nconcept A")) == {}


def test_countermodels_are_models():
    k = kb("profile dcs\nconcept A\nconcept B\nrel R/2\nA <= >= 2 R\nsome inv(R).top <= B")
    cm = find_countermodel(k, "B", "A", 4)
    assert cm is not None
    assert is_model(cm.interp, k).ok
    assert len(cm.interp.delta_c) <= 4


def test_library_model_subsumption():
    assert subsumes_structural(read_kb(FIG1), "Popular_science_book", "Book")


def test_reflexive():
    assert subsumes_structural(kb("profile dcs\nconcept A"), "A", "A")


def test_number_restriction_weakening():
    k = kb("profile dcs\nconcept A\nrel R/2\nA <= >= 3 R")
    assert entails(k, "A", Min(2, Rel("R")))
    assert not entails(k, "A", Min(4, Rel("R")))
    assert not entails(k, "A", Max(5, Rel("R")))
    # the same consequence, checked semantically through a named concept
    q = kb("profile dcs\nconcept A\nconcept Q\nrel R/2\nA <= >= 3 R\n>= 2 R <= Q")
    assert subsumes_structural(q, "A", "Q")
    assert find_countermodel(q, "A", "Q", 4) is None


def test_relation_inclusion_lifting():
    k = kb("profile dcuml\nconcept A\nconcept Q\nrel R/2\nrel S/2\nR <= S\nA <= >= 2 R\n>= 2 S <= Q")
    assert subsumes_structural(k, "A", "Q")


def test_existential_and_typing():
    k = kb("profile dcs\nconcept A\nconcept B\nrel R/2\nA <= some R.top\nsome R.top <= B")
    assert subsumes_structural(k, "A", "B")


def test_inverse_metadata():
    k = kb("profile dcs\nconcept A\nconcept B\nrel R/2\nrel R2/2\ninverse R R2\n"
           "A <= >= 1 inv(R2)\nsome R.top <= B")
    assert subsumes_structural(k, "A", "B")


def test_or_introduction():
    k = kb("profile dcorm\nconcept A\nconcept B\nconcept C\nA <= B")
    assert entails(k, "A", Or((AtomicConcept("B"), AtomicConcept("C"))))


def test_unknown_concept():
    with pytest.raises(KeyError):
        find_countermodel(kb("profile dcs\nconcept A"), "A", "Z")


def test_classify_equivalence():
    res = classify(kb("profile dcs\nconcept A\nconcept B\nA <= B\nB <= A"))
    assert ("A", "B") in res.equivalence_classes


def test_classify_library_model():
    res = classify(read_kb(FIG1))
    assert res.subsumes("Popular_science_book", "Book")
    assert not res.subsumes("Book", "Popular_science_book")
    assert res.unknown == []


def test_classify_empty_kb_is_discrete():
    res = classify(kb("profile dcs\nconcept A\nconcept B\nconcept C"))
    off = {p: s for p, s in res.status.items() if p[0] != p[1]}
    assert set(off.values()) == {FALSE}
    assert set(off) == set(res.witnesses)


def test_equivalent():
    assert equivalent(kb("profile dcs\nconcept A"), "A", "A")
    assert equivalent(kb("profile dcs\nconcept A\nconcept B\nA <= B\nB <= A"), "A", "B")
    assert not equivalent(kb("profile dcs\nconcept A\nconcept B"), "A", "B")


def test_default_bound():
    assert default_bound(kb("profile dcs\nconcept A\nconcept B")) == 3
    assert default_bound(read_kb(FIG1)) == 5


def test_budget_is_reported(monkeypatch):
    k = kb("profile dcs\nconcept A\nconcept B")
    with ModelFinder(k, 2) as mf:
        monkeypatch.setattr(mf.solver, "solve_limited", lambda **kw: None)
        with pytest.raises(BudgetExceeded):
            mf.countermodel("A", "B")


def test_bad_bound():
    with pytest.raises(ValueError):
        ModelFinder(KnowledgeBase(Profile.DCS), 0)


def test_dcp_is_reasoned_through_its_standard_translation():
    from dcprofiles.encode import encode_dcp
    from dcprofiles.io import read_model
    k = encode_dcp(read_model(FIXTURES / "fig1.cm.json"))
    assert subsumes_structural(k, "Popular_science_book", "Book")


# -- cross-checks against the brute-force oracle ------------------------------

SMALL = [i for i, t in enumerate(POOL)
         if all(s not in ("C", "S") for s in t[1:] if isinstance(s, str))]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(SMALL), max_size=3, unique=True),
       st.sampled_from([("A", "B"), ("B", "A")]))
def test_agrees_with_brute_force_at_bound_two(indices, query):
    k = kb_of(indices)
    # the brute-force oracle only handles one relation and two concepts
    k = KnowledgeBase(k.profile, type(k.vocabulary)(
        concepts=frozenset({"A", "B"}), relations={"R": ("1", "2")}), k.axioms)
    sat = find_countermodel(k, *query, bound=2)
    oracle = brute_force_countermodel(k, *query, bound=2)
    assert (sat is None) == (oracle is None)
    if subsumes_structural(k, *query):
        assert oracle is None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, len(POOL) - 1), max_size=4, unique=True), st.randoms())
def test_classification_ignores_axiom_order(indices, rnd):
    shuffled = list(indices)
    rnd.shuffle(shuffled)
    a = classify(kb_of(indices), bound=3)
    b = classify(kb_of(shuffled), bound=3)
    assert a.status == b.status


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, len(POOL) - 1), min_size=1, max_size=6, unique=True))
def test_adding_axioms_keeps_subsumptions(indices):
    names = ("A", "B", "C")
    before = set()
    for n in range(len(indices) + 1):
        s = structure(kb_of(indices[:n]))
        now = {(x, y) for x in names for y in names if s.subsumes(x, y)}
        assert before <= now
        before = now


def test_random_chains_are_monotone():
    rng = random.Random(7)
    for _ in range(30):
        chain = rng.sample(range(len(POOL)), 8)
        prev: set = set()
        for n in range(9):
            res = classify(kb_of(chain[:n]), bound=3)
            cur = set(res.order)
            assert prev <= cur
            prev = cur
