import pytest
from hypothesis import given, settings, strategies as st

from dcprofiles.dl import (
    AtomicConcept, ConceptInc, IdRoles, Max, MaxPlace, Min, MinPlace, Profile, Rel, check_profile,
    conjuncts,
)
from dcprofiles.encode import (
    EncodingError, InvalidModel, UnsupportedFeature, encode, encode_dcp, encode_dcs, encode_eer,
    encode_orm, encode_uml, orm_lift_readings, plan_names, pos_to_standard, reify_nary,
)
from dcprofiles.kbtext import axiom_text, serialize_kb_text
from dcprofiles.model import (
    Attribute, AttributeCardinality, Cardinality, ConceptualModel, DataType, Disjointness,
    DisjunctiveMandatory, Family, MultiAttributeIdentification, ObjectType, RelSubsumption,
    Relationship, RingConstraint, Role, RoleDisjointness, RoleRef, WeakIdentification,
    make_relationship,
)
from modelgen import random_model


def types(*names):
    return tuple(ObjectType(n) for n in names)


def lines(kb):
    return {axiom_text(a) for a in kb.axioms}


def test_binary_typing_in_dcp():
    m = ConceptualModel(Family.UML, types("Professor", "Course"),
                        relationships=(make_relationship("teach", "Professor", "Course"),))
    assert lines(encode_dcp(m)) == {">= 1 [1] teach <= Professor", ">= 1 [2] teach <= Course"}


def test_attribute_in_dcp():
    m = ConceptualModel(Family.UML, types("Person"), (DataType("String"),),
                        attributes=(Attribute("Person", "name", "String"),))
    assert lines(encode_dcp(m)) == {"Person <= some name.String and <=1 name"}


@pytest.mark.parametrize("enc", [encode_dcp, encode_dcs])
def test_empty_model(enc):
    kb = enc(ConceptualModel(Family.UML))
    assert kb.axioms == () and not kb.vocabulary.names


def test_place_cardinality():
    m = ConceptualModel(Family.UML, types("A", "B"),
                        relationships=(make_relationship("P", "A", "B"),),
                        constraints=(Cardinality("P", "1", 2, 5),))
    assert "A <= <= 5 [1] P and >= 2 [1] P" in lines(encode_dcp(m))
    assert "A <= <= 5 P and >= 2 P" in lines(encode_dcs(m))


def test_membership_association():
    m = ConceptualModel(Family.UML, types("Affiliation", "Person"), relationships=(
        Relationship(None, (Role("1", "Affiliation", "has"), Role("2", "Person", "has_member"))),))
    kb = encode_dcs(m)
    assert set(kb.vocabulary.relations) == {"has_member", "has"}
    assert kb.vocabulary.inverse_partners()["has_member"] == "has"
    assert {"some has_member.top <= Affiliation", "some inv(has_member).top <= Person"} <= lines(kb)


def test_recursive_unnamed_places():
    m = ConceptualModel(Family.UML, types("A"), relationships=(make_relationship("P", "A", "A"),))
    kb = encode_dcs(m)
    assert lines(kb) == {"some P_e1.top <= A", "some inv(P_e1).top <= A"}
    assert kb.vocabulary.inverse_partners()["P_e1"] == "P_e2"
    assert kb.vocabulary.generated == {"P_e1", "P_e2"}


def test_recursive_named_places():
    m = ConceptualModel(Family.UML, types("Person"), relationships=(
        Relationship("supervision", (Role("boss", "Person"), Role("worker", "Person"))),))
    kb = encode_dcs(m)
    assert set(kb.vocabulary.relations) == {"boss", "worker"}


def test_pos_to_standard_without_relationships():
    m = ConceptualModel(Family.UML, types("A", "B"), subsumptions=())
    dcp = encode_dcp(m)
    assert pos_to_standard(dcp).axioms == dcp.axioms


def test_uml_attribute_cardinality():
    m = ConceptualModel(Family.UML, types("Person"), (DataType("String"),),
                        attributes=(Attribute("Person", "phone", "String"),),
                        constraints=(AttributeCardinality("Person", "phone", 1, 3),))
    assert lines(encode_uml(m)) == {"Person <= <= 3 phone.String and >= 1 phone.String"}


def test_uml_association_subsumption():
    m = ConceptualModel(Family.UML, types("A", "B"), relationships=(
        make_relationship("supervises", "A", "B"), make_relationship("manages", "A", "B")),
        rel_subsumptions=(RelSubsumption("supervises", "manages"),))
    out = lines(encode_uml(m))
    assert {"supervises <= manages", "supervises_inv <= manages_inv"} <= out
    assert {"supervises <= inv(supervises_inv)", "inv(supervises_inv) <= supervises"} <= out


def test_uml_without_extras_adds_only_inverse_links():
    m = random_model(3, Family.UML, core=True)
    dcs = encode_dcs(m)
    links = set()
    for a, b in (c.__dict__.values() for c in dcs.vocabulary.conditions):
        links |= {f"{a} <= inv({b})", f"inv({b}) <= {a}"}
    assert links
    assert lines(encode_uml(m)) == lines(dcs) | links


def test_uml_refuses_disjointness():
    m = ConceptualModel(Family.UML, types("A", "B"), constraints=(Disjointness(("A", "B")),))
    with pytest.raises(UnsupportedFeature) as e:
        encode_uml(m)
    assert e.value.element == "constraints[0]"


def test_dcp_refuses_richer_features():
    m = ConceptualModel(Family.UML, types("A"), (DataType("S"),), attributes=(Attribute("A", "x", "S"),),
                        constraints=(AttributeCardinality("A", "x", 1, 2),))
    with pytest.raises(UnsupportedFeature) as e:
        encode_dcp(m)
    assert e.value.suggested == "dcuml"


def test_ternary_needs_dceer():
    m = ConceptualModel(Family.EER, types("A"), relationships=(make_relationship("t", "A", "A", "A"),))
    with pytest.raises(UnsupportedFeature) as e:
        encode_dcs(m)
    assert e.value.suggested == "dceer"


def test_invalid_model():
    m = ConceptualModel(Family.UML, types("A"), relationships=(make_relationship("t", "A", "Z"),))
    with pytest.raises(InvalidModel) as e:
        encode_uml(m)
    assert e.value.violations[0].rule == "unknown-player"


def test_wrong_family():
    with pytest.raises(EncodingError):
        encode_uml(ConceptualModel(Family.EER))


def test_reify_supply():
    axioms = reify_nary(make_relationship("supply", "Vendor", "Part", "Project"))
    text = {axiom_text(a) for a in axioms}
    assert "supply_r <= top" in text
    for comp, player in [("supply_c1", "Vendor"), ("supply_c2", "Part"), ("supply_c3", "Project")]:
        assert {f"some {comp}.top <= supply_r", f"some inv({comp}).top <= {player}",
                f"supply_r <= some {comp}.top", f"supply_r <= <= 1 {comp}"} <= text
    assert "id supply_r supply_c1 supply_c2 supply_c3" in text
    assert len(axioms) == 14


def test_reify_binary_rejected():
    with pytest.raises(EncodingError):
        reify_nary(make_relationship("p", "A", "B"))


def test_eer_weak_identification():
    m = ConceptualModel(Family.EER, types("Dependent", "Policy", "Employee"),
                        relationships=(make_relationship("insures", "Employee", "Policy", "Dependent"),),
                        constraints=(WeakIdentification("insures", ("1", "2"), "3"),))
    kb = encode_eer(m)
    assert lines(kb) == {"fd insures 1,2 -> 3"}
    assert check_profile(kb).member


def test_eer_multi_attribute_identification():
    m = ConceptualModel(Family.EER, types("Person"), (DataType("String"),),
                        attributes=(Attribute("Person", "fname", "String"),
                                    Attribute("Person", "lname", "String")),
                        constraints=(MultiAttributeIdentification("Person", ("fname", "lname")),))
    kb = encode_eer(m)
    assert "id Person fname_lname" in lines(kb)
    assert "Person <= some fname_lname.fname_lname_type and <=1 fname_lname" in lines(kb)
    assert {"fname_lname", "fname_lname_type"} <= kb.vocabulary.generated


def test_eer_binary_only_matches_dcs():
    m = random_model(11, Family.EER, core=True)
    assert lines(encode_eer(m)) == lines(encode_dcs(m))


def test_eer_optional_reification():
    m = ConceptualModel(Family.EER, types("A", "B", "C"),
                        relationships=(make_relationship("t", "A", "B", "C"),))
    kb = encode_eer(m, reify=True)
    assert "id t_r t_c1 t_c2 t_c3" in lines(kb)
    assert all(len(ps) == 2 for ps in kb.vocabulary.relations.values())


def _orm(*rels, constraints=()):
    players = sorted({r.player for rel in rels for r in rel.roles})
    return ConceptualModel(Family.ORM, types(*players), relationships=rels, constraints=constraints)


def test_orm_two_readings():
    rel = Relationship(None, (Role("1", "Affiliation"), Role("2", "Person")),
                       ("… has member …", "… member of …"))
    kb = orm_lift_readings(rel)
    assert set(kb.vocabulary.relations) == {"has_member", "member_of"}
    assert kb.vocabulary.inverse_partners()["has_member"] == "member_of"


def test_orm_one_reading():
    rel = Relationship(None, (Role("1", "Person"), Role("2", "Bar")), ("… smokes at …",))
    kb = orm_lift_readings(rel)
    assert kb.vocabulary.inverse_partners()["smokes_at"] == "smokes_at_inv"
    assert "smokes_at_inv" in kb.vocabulary.generated


def test_orm_ternary_readings():
    rel = Relationship(None, (Role("1", "Vendor"), Role("2", "Part"), Role("3", "Project")),
                       ("… supplies …", "… supplied in …", "… supplied by …"))
    kb = orm_lift_readings(rel)
    assert set(kb.vocabulary.relations) == {"supplies", "supplied_in", "supplied_by"}
    assert "id supplies_r supplies supplied_in supplied_by" in lines(kb)


def test_orm_nameless_fact_type():
    with pytest.raises(EncodingError):
        orm_lift_readings(Relationship(None, (Role("1", "A"), Role("2", "B"))))


def test_orm_role_disjointness_and_disjunctive_mandatory():
    m = _orm(make_relationship("teaches", "Person", "Course"),
             make_relationship("studies", "Person", "Course"),
             constraints=(RoleDisjointness(RoleRef("teaches", "1"), RoleRef("studies", "1")),
                          DisjunctiveMandatory("Person", (RoleRef("teaches", "1"),
                                                          RoleRef("studies", "1")))))
    out = lines(encode_orm(m))
    assert {"teaches <= not studies", "studies <= not teaches"} <= out
    assert "Person <= some teaches.top or some studies.top" in out


def test_orm_unary_boolean():
    m = _orm(Relationship(None, (Role("1", "Person"),), ("… smokes",)))
    assert lines(encode_orm(m)) == {"Person <= all smokes.Boolean and <=1 smokes"}


def test_orm_ring_refused():
    m = _orm(make_relationship("r", "A", "A"), constraints=(RingConstraint("r"),))
    with pytest.raises(UnsupportedFeature):
        encode_orm(m)


def test_orm_nested_object_type_is_reified_concept():
    from dcprofiles.model import AssociativeObjectType, InternalUniqueness
    m = ConceptualModel(Family.ORM, types("A", "B", "Enrolment"),
                        relationships=(make_relationship("enrols", "A", "B"),),
                        constraints=(AssociativeObjectType("enrols", "Enrolment"),
                                     InternalUniqueness("enrols", ("1", "2"))))
    kb = encode_orm(m)
    ids = [a for a in kb.axioms if isinstance(a, IdRoles)]
    assert ids and all(a.concept == AtomicConcept("Enrolment") for a in ids)


# -- properties ----------------------------------------------------------------

seeds = st.integers(0, 100_000)
families = st.sampled_from(list(Family))
PROFILE = {Family.UML: Profile.DCUML, Family.EER: Profile.DCEER, Family.ORM: Profile.DCORM}


@settings(max_examples=100, deadline=None)
@given(seeds, families)
def test_linear_size(seed, fam):
    m = random_model(seed, fam)
    assert len(encode(m, PROFILE[fam]).axioms) <= 6 * m.element_count()


@settings(max_examples=60, deadline=None)
@given(seeds, families)
def test_deterministic(seed, fam):
    a = serialize_kb_text(encode(random_model(seed, fam), PROFILE[fam]))
    b = serialize_kb_text(encode(random_model(seed, fam), PROFILE[fam]))
    assert a == b


@settings(max_examples=100, deadline=None)
@given(seeds, families)
def test_provenance_total(seed, fam):
    kb = encode(random_model(seed, fam), PROFILE[fam])
    assert set(kb.axioms) <= set(kb.provenance)
    assert all(isinstance(v, str) and v for v in kb.provenance.values())


@settings(max_examples=100, deadline=None)
@given(seeds, families)
def test_encoders_respect_their_grammar(seed, fam):
    kb = encode(random_model(seed, fam), PROFILE[fam])
    rep = check_profile(kb)
    assert rep.member, rep.violations
    assert rep.encoder_producible, rep.lint


@settings(max_examples=100, deadline=None)
@given(seeds, families)
def test_lifting_preserves_place_cardinalities(seed, fam):
    m = random_model(seed, fam, core=True)
    plan = plan_names(m)
    dcp, dcs = encode_dcp(m), encode_dcs(m)
    lifted = {plan.dcp[ref]: (m.relationship(ref), plan.lifted[ref]) for ref in plan.dcp}
    std = [a for a in dcs.axioms if isinstance(a, ConceptInc)]
    for ax in dcp.axioms:
        if not isinstance(ax, ConceptInc) or not isinstance(ax.sub, AtomicConcept):
            continue
        for part in conjuncts(ax.sup):
            if not isinstance(part, (MinPlace, MaxPlace)):
                continue
            rel, names = lifted[part.rel.name]
            kind = Min if isinstance(part, MinPlace) else Max
            want = kind(part.k, Rel(names[rel.index(part.place)]))
            hits = [a for a in std if a.sub == ax.sub and want in conjuncts(a.sup)]
            assert len(hits) == 1, (ax, want)
