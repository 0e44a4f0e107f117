import pytest
from hypothesis import given, settings, strategies as st

from dcprofiles.model import (
    Attribute, Cardinality, ConceptualModel, Family, InternalUniqueness, ObjectType,
    Relationship, Role, ValueConstraint, ValueType, ValueTypeError, make_relationship,
    normalize_orm_value_types, slug, validate_model,
)
from modelgen import random_model


def rules(model):
    return [v.rule for v in validate_model(model)]


def test_empty_model_is_valid():
    assert validate_model(ConceptualModel(Family.UML)) == []


def test_uml_ternary_rejected():
    m = ConceptualModel(Family.UML, (ObjectType("A"), ObjectType("B"), ObjectType("C")),
                        relationships=(make_relationship("p", "A", "B", "C"),))
    assert "arity-3-not-in-UML-profile-input" in rules(m)


def test_duplicate_place_label():
    m = ConceptualModel(Family.EER, (ObjectType("A"),),
                        relationships=(Relationship("p", (Role("1", "A"), Role("1", "A"))),))
    assert "duplicate-place-label" in rules(m)


def test_unary_only_in_orm():
    m = ConceptualModel(Family.EER, (ObjectType("A"),),
                        relationships=(Relationship("p", (Role("1", "A"),)),))
    assert "arity-1-not-in-EER-profile-input" in rules(m)


def test_arity_four_rejected():
    m = ConceptualModel(Family.ORM, (ObjectType("A"),),
                        relationships=(make_relationship("p", "A", "A", "A", "A"),))
    assert "arity-above-3" in rules(m)


def test_one_cardinality_per_place():
    m = ConceptualModel(Family.UML, (ObjectType("A"),),
                        relationships=(make_relationship("p", "A", "A"),),
                        constraints=(Cardinality("p", "1", 0, 2), Cardinality("p", "1", 1, 3)))
    assert "duplicate-cardinality" in rules(m)


def test_min_above_max():
    m = ConceptualModel(Family.UML, (ObjectType("A"),),
                        relationships=(make_relationship("p", "A", "A"),),
                        constraints=(Cardinality("p", "1", 3, 2),))
    assert "min-above-max" in rules(m)


def test_unknown_player():
    m = ConceptualModel(Family.UML, (ObjectType("A"),),
                        relationships=(make_relationship("p", "A", "Ghost"),))
    assert "unknown-player" in rules(m)


def test_eer_attribute_without_datatype():
    m = ConceptualModel(Family.EER, (ObjectType("A"),), attributes=(Attribute("A", "x"),))
    assert validate_model(m) == []
    assert rules(ConceptualModel(Family.UML, (ObjectType("A"),),
                                 attributes=(Attribute("A", "x"),))) == ["missing-datatype"]


def test_slug():
    assert slug("… has member …") == "has_member"
    assert slug("... smokes at") == "smokes_at"


def _person_name():
    return ConceptualModel(
        Family.ORM, (ObjectType("Person"),),
        relationships=(Relationship(None, (Role("1", "Person"), Role("2", "Name")), ("… has …",)),),
        value_types=(ValueType("Name", "String"),),
    )


def test_value_type_becomes_attribute():
    out = normalize_orm_value_types(_person_name())
    assert out.attributes == (Attribute("Person", "name", "String"),)
    assert out.relationships == ()
    assert out.value_types == ()
    assert validate_model(out) == []


def test_no_value_types_unchanged():
    m = ConceptualModel(Family.ORM, (ObjectType("A"),),
                        relationships=(Relationship(None, (Role("1", "A"), Role("2", "A")), ("… likes …",)),))
    assert normalize_orm_value_types(m) == m


def test_shared_value_type_duplicated_per_owner():
    m = ConceptualModel(
        Family.ORM, (ObjectType("Sofa"), ObjectType("Table")),
        relationships=(
            Relationship(None, (Role("1", "Sofa"), Role("2", "Length")), ("… sofa has …",)),
            Relationship(None, (Role("1", "Table"), Role("2", "Length")), ("… table has …",)),
        ),
        value_types=(ValueType("Length", "Integer"),),
    )
    out = normalize_orm_value_types(m)
    assert set(out.attributes) == {Attribute("Sofa", "length", "Integer"),
                                   Attribute("Table", "length", "Integer")}


def test_uniqueness_on_value_role_becomes_identifier():
    m = _person_name()
    m = ConceptualModel(m.family, m.object_types, relationships=m.relationships,
                        value_types=m.value_types,
                        constraints=(InternalUniqueness("has", ("2",)),
                                     ValueConstraint("Name", ("a", "b"))))
    out = normalize_orm_value_types(m)
    kinds = {c.kind for c in out.constraints}
    assert kinds == {"singleIdentification", "valueConstraint"}
    assert any(getattr(c, "target", None) == "Person.name" for c in out.constraints)


def test_unattached_value_type():
    m = ConceptualModel(Family.ORM, (ObjectType("A"),), value_types=(ValueType("V", "String"),))
    with pytest.raises(ValueTypeError):
        normalize_orm_value_types(m)


def test_value_types_between_two_value_types():
    m = ConceptualModel(
        Family.ORM, (), relationships=(Relationship(None, (Role("1", "V"), Role("2", "W")), ("… x …",)),),
        value_types=(ValueType("V", "String"), ValueType("W", "String")))
    with pytest.raises(ValueTypeError):
        normalize_orm_value_types(m)


def test_normalize_needs_orm():
    with pytest.raises(ValueError):
        normalize_orm_value_types(ConceptualModel(Family.UML))


families = st.sampled_from(list(Family))
seeds = st.integers(0, 10_000)


@settings(max_examples=60, deadline=None)
@given(seeds, families)
def test_validate_is_pure(seed, fam):
    m = random_model(seed, fam)
    assert validate_model(m) == validate_model(m)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_normalize_idempotent_and_keeps_object_types(seed):
    m = random_model(seed, Family.ORM)
    once = normalize_orm_value_types(m)
    assert normalize_orm_value_types(once) == once
    assert once.object_type_names == m.object_type_names
    assert validate_model(once) == []


@settings(max_examples=60, deadline=None)
@given(seeds, families)
def test_generated_models_are_valid(seed, fam):
    assert validate_model(random_model(seed, fam)) == []
