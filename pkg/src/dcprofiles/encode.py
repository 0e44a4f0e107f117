"""Knowledge-base construction from conceptual models.

``encode_dcp`` applies the positionalist rules to the core features,
``pos_to_standard`` lifts every binary relationship to a pair of inverse
DL roles, and the family encoders add their profile-specific axioms on
top of the standard-view core. Every emitted axiom records the model
element it came from in ``KnowledgeBase.provenance``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .dl import (
    AllAttr, AtMostOneAttr, AtomicConcept, AttrMax, AttrMin, Complement, ConceptInc,
    DisjointConcepts, Fd, IdAttr, IdRoles, Inverse, InverseOf, KnowledgeBase, Max, MaxPlace,
    Min, MinPlace, Profile, Rel, RelInc, Signature, SomeAttr, SomeRel, Top, TopRel, ValueSet,
    Vocabulary, atom, conj, disj, walk,
)
from .model import (
    ANY_TYPE, BOOLEAN, AssociativeObjectType, Attribute, AttributeCardinality, Cardinality,
    ConceptualModel, Constraint, DisjunctiveMandatory, ExternalIdentification,
    ExternalUniqueness, Family, InternalUniqueness, Mandatory, MultiAttributeIdentification,
    ObjectType, Relationship, RoleDisjointness, RoleRef, RoleSubsumption, SingleIdentification,
    ValueConstraint, WeakIdentification, normalize_orm_value_types, slug, validate_model,
)

INVERSE_SUFFIX = "_inv"
REIFIED_SUFFIX = "_r"


class EncodingError(ValueError):
    pass


class InvalidModel(EncodingError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("model is not valid: " + "; ".join(map(str, self.violations[:5])))


class UnsupportedFeature(EncodingError):
    """A model element has no encoding in the requested profile."""

    def __init__(self, element: str, suggested: Optional[str], reason: str = ""):
        self.element = element
        self.suggested = suggested
        msg = f"{element}: {reason or 'not expressible in this profile'}"
        if suggested:
            msg += f" (try {suggested})"
        super().__init__(msg)


# -- naming ------------------------------------------------------------------


@dataclass(frozen=True)
class Reified:
    concept: str
    components: tuple[str, ...]  # in role declaration order


@dataclass
class NamePlan:
    """Collision-free symbol names for one model.

    ``lifted[ref]`` holds the two directional relations of a binary, the
    first one leaving the player of the first declared role. ``dcp[ref]``
    is the positionalist relation name. Generated names get a numeric
    suffix on collision and are listed in ``generated``.
    """

    taken: set = field(default_factory=set)
    dcp_taken: set = field(default_factory=set)
    generated: set = field(default_factory=set)
    attr: dict = field(default_factory=dict)
    unary: dict = field(default_factory=dict)
    dcp: dict = field(default_factory=dict)
    lifted: dict = field(default_factory=dict)
    reified: dict = field(default_factory=dict)

    def claim(self, base: str, user: bool, pool: Optional[set] = None) -> str:
        pool = self.taken if pool is None else pool
        name, n = base, 2
        while name in pool:
            name, n = f"{base}_{n}", n + 1
            user = False
        pool.add(name)
        if not user:
            self.generated.add(name)
        return name

    def fresh(self, base: str) -> str:
        return self.claim(base, user=False)


def _named_place(label: str) -> bool:
    return not label.isdigit()


def plan_names(model: ConceptualModel, reify: Iterable[str] = ()) -> NamePlan:
    """Allocate every DL symbol the encoders need for ``model``.

    Relationships whose ref is in ``reify`` get a reified concept and one
    component relation per role instead of a lifted inverse pair.
    """
    reify = set(reify)
    plan = NamePlan()
    fixed = {o.name for o in model.object_types} | {d.name for d in model.data_types}
    fixed |= {ANY_TYPE, BOOLEAN}
    plan.taken |= fixed
    plan.dcp_taken |= fixed
    for a in model.attributes:
        key = (a.owner, a.name)
        if a.name in plan.attr.values():
            plan.attr[key] = a.name
            continue
        plan.attr[key] = plan.claim(a.name, user=True)
    plan.dcp_taken |= set(plan.attr.values())
    for rel in model.relationships:
        if rel.arity == 1:
            base = rel.ref
            plan.unary[rel.ref] = base if base in plan.attr.values() else plan.claim(base, True)
    plan.dcp_taken |= set(plan.unary.values())

    assoc = {c.relationship: c.object_type for c in model.constraints
             if isinstance(c, AssociativeObjectType)}
    orm = model.family is Family.ORM
    for rel in model.relationships:
        ref = rel.ref
        if rel.arity == 1:
            continue
        if ref in reify or ref in assoc:
            concept = assoc.get(ref) or plan.fresh(ref + REIFIED_SUFFIX)
            comps = []
            for i, role in enumerate(rel.roles, start=1):
                if orm and len(rel.readings) == rel.arity:
                    comps.append(plan.claim(slug(rel.readings[i - 1]), True))
                elif not orm and role.role_name:
                    comps.append(plan.claim(role.role_name, True))
                elif not orm and _named_place(role.place):
                    comps.append(plan.claim(role.place, True))
                else:
                    comps.append(plan.fresh(f"{ref}_c{i}"))
            plan.reified[ref] = Reified(concept, tuple(comps))
            continue
        user_ref = bool(rel.name) or (orm and bool(rel.readings))
        if rel.arity == 2:
            plan.dcp[ref] = plan.claim(ref, user_ref, plan.dcp_taken)
            plan.lifted[ref] = _lift(plan, rel, orm)
        else:
            # atomic ternary kept in the kb
            plan.lifted[ref] = (plan.claim(ref, user_ref),)
    return plan


def _lift(plan: NamePlan, rel: Relationship, orm: bool) -> tuple[str, str]:
    first, second = rel.roles
    recursive = first.player == second.player
    n1: Optional[str] = None
    n2: Optional[str] = None
    if orm and rel.readings:
        # fact type readings name the two directions; role names are ignored
        n1 = slug(rel.readings[0])
        n2 = slug(rel.readings[1]) if len(rel.readings) > 1 else None
    else:
        # an end name labels the relation navigated towards that end
        n1, n2 = second.role_name, first.role_name
        if n1 is None and n2 is None and recursive:
            if _named_place(first.place) and _named_place(second.place):
                n1, n2 = first.place, second.place
        if n1 is None and not recursive and rel.name:
            n1 = rel.name
    ref = rel.ref
    if n1 is not None:
        e1 = plan.claim(n1, True)
    elif n2 is not None:
        e1 = plan.fresh(n2 + INVERSE_SUFFIX)
    else:
        e1 = plan.fresh(f"{ref}_e1")
    if n2 is not None:
        e2 = plan.claim(n2, True)
    elif e1 not in plan.generated:
        e2 = plan.fresh(e1 + INVERSE_SUFFIX)
    else:
        e2 = plan.fresh(f"{ref}_e2")
    return e1, e2


# -- kb builder --------------------------------------------------------------


class _Builder:
    def __init__(self, profile: Profile):
        self.profile = profile
        self.axioms: list = []
        self.provenance: dict = {}
        self.concepts: set = set()
        self.relations: dict = {}
        self.attributes: set = set()
        self.datatypes: set = set()
        self.conditions: list = []
        self._seen_conditions: set = set()
        self.generated: set = set()

    def add(self, ax, source: str) -> None:
        if ax not in self.provenance:
            self.axioms.append(ax)
            self.provenance[ax] = source

    def condition(self, c) -> None:
        if c not in self._seen_conditions:
            self._seen_conditions.add(c)
            self.conditions.append(c)

    def build(self) -> KnowledgeBase:
        names = self.concepts | set(self.relations) | self.attributes | self.datatypes
        voc = Vocabulary(frozenset(self.concepts), dict(sorted(self.relations.items())),
                         frozenset(self.attributes), frozenset(self.datatypes),
                         frozenset(self.generated & names), tuple(self.conditions))
        return KnowledgeBase(self.profile, voc, tuple(self.axioms), dict(self.provenance))


def _attr_path(a: Attribute) -> str:
    return f"attributes/{a.owner}.{a.name}"


def _rel_path(ref: str) -> str:
    return f"relationships/{ref}"


def _card_parts(k_min: int, k_max: Optional[int], max_of, min_of) -> list:
    parts = []
    if k_max is not None:
        parts.append(max_of(k_max))
    if k_min > 0:
        parts.append(min_of(k_min))
    return parts


def _check_valid(model: ConceptualModel) -> ConceptualModel:
    violations = validate_model(model)
    if violations:
        raise InvalidModel(violations)
    if model.family is Family.ORM:
        model = normalize_orm_value_types(model)
        violations = validate_model(model)
        if violations:
            raise InvalidModel(violations)
    return model


_CORE_KINDS = {"cardinality", "mandatory", "singleIdentification"}


def _suggest(family: Family) -> str:
    return {Family.UML: "dcuml", Family.EER: "dceer", Family.ORM: "dcorm"}[family]


def _merged_cardinalities(model: ConceptualModel, refs: set[str]) -> list[tuple[str, Constraint]]:
    """Cardinality-like constraints on ``refs`` with redundant mandatories dropped.

    ORM uniqueness on one role of a binary is the same as a maximum of 1 at
    that place, so it is merged into the place's cardinality.
    """
    out: list[tuple[str, Constraint]] = []
    card_at: dict[tuple, int] = {}
    unique = set()
    for i, c in enumerate(model.constraints):
        if isinstance(c, InternalUniqueness) and c.relationship in refs and len(c.places) == 1:
            unique.add((c.relationship, c.places[0]))
    for i, c in enumerate(model.constraints):
        if isinstance(c, Cardinality) and c.relationship in refs:
            key = (c.relationship, c.place)
            if key in unique:
                c = replace(c, max=1 if c.max is None else min(c.max, 1))
                unique.discard(key)
            card_at[(c.relationship, c.place, c.player or model.relationship(c.relationship).role(c.place).player)] = c.min
            out.append((f"constraints[{i}]", c))
    for rel, place in sorted(unique):
        out.append((f"constraints/{rel}.{place}:uniqueness", Cardinality(rel, place, 0, 1)))
    for i, c in enumerate(model.constraints):
        if isinstance(c, Mandatory) and c.relationship in refs:
            player = c.player or model.relationship(c.relationship).role(c.place).player
            if card_at.get((c.relationship, c.place, player), 0) >= 1:
                continue
            out.append((f"constraints[{i}]", c))
    return out


def _encode_core(model: ConceptualModel, plan: NamePlan, refs: set[str],
                 attr_axioms: bool = True) -> _Builder:
    """Positionalist rules over the binaries ``refs``, attributes, subsumptions,
    cardinalities and single identification."""
    b = _Builder(Profile.DCP)
    b.concepts |= {o.name for o in model.object_types}
    b.datatypes |= {d.name for d in model.data_types}
    b.generated |= plan.generated
    for rel in model.relationships:
        if rel.ref not in refs:
            continue
        p = plan.dcp[rel.ref]
        b.relations[p] = rel.places
        for role in rel.roles:
            b.add(ConceptInc(MinPlace(1, role.place, Rel(p)), atom(role.player)), _rel_path(rel.ref))
    for a in model.attributes:
        sym = plan.attr[(a.owner, a.name)]
        dt = model.attribute_datatype(a)
        b.attributes.add(sym)
        b.datatypes.add(dt)
        if attr_axioms:
            b.add(ConceptInc(atom(a.owner), conj(SomeAttr(sym, dt), AtMostOneAttr(sym))), _attr_path(a))
    for s in model.subsumptions:
        b.add(ConceptInc(atom(s.sub), atom(s.sup)), f"subsumptions/{s.sub}<{s.sup}")
    for path, c in _merged_cardinalities(model, refs):
        rel = model.relationship(c.relationship)
        player = c.player or rel.role(c.place).player
        p = Rel(plan.dcp[rel.ref])
        if isinstance(c, Cardinality):
            parts = _card_parts(c.min, c.max, lambda k: MaxPlace(k, c.place, p),
                                lambda k: MinPlace(k, c.place, p))
        else:
            parts = [MinPlace(1, c.place, p)]
        if parts:
            b.add(ConceptInc(atom(player), conj(*parts)), path)
    for i, c in enumerate(model.constraints):
        if isinstance(c, SingleIdentification):
            b.add(IdAttr(atom(c.object_type), plan.attr[(c.object_type, c.attribute)]),
                  f"constraints[{i}]")
    return b


def encode_dcp(model: ConceptualModel) -> KnowledgeBase:
    """Positionalist core kb; refuses anything beyond the core features."""
    model = _check_valid(model)
    fam = model.family
    for i, rel in enumerate(model.relationships):
        if rel.arity != 2:
            raise UnsupportedFeature(f"relationships[{i}]", _suggest(fam),
                                     f"{rel.arity}-ary relationship {rel.ref!r}")
    if model.rel_subsumptions:
        raise UnsupportedFeature("relSubsumptions[0]", _suggest(fam), "relationship subsumption")
    for i, c in enumerate(model.constraints):
        if c.kind not in _CORE_KINDS:
            raise UnsupportedFeature(f"constraints[{i}]", _suggest(fam), f"{c.kind} constraint")
    plan = plan_names(model)
    return _encode_core(model, plan, {r.ref for r in model.relationships}).build()


# -- positionalist to standard view ------------------------------------------


def _derive_lifted(kb: KnowledgeBase) -> dict[str, tuple[str, str]]:
    """Names for the directional relations of every binary in a DCp kb."""
    voc = kb.vocabulary
    typing = _typing(kb)
    taken = set(voc.concepts | voc.attributes | voc.datatypes)
    out = {}
    gen = set()

    def claim(base: str, user: bool) -> str:
        name, n = base, 2
        while name in taken:
            name, n = f"{base}_{n}", n + 1
            user = False
        taken.add(name)
        if not user:
            gen.add(name)
        return name

    for p, places in sorted(voc.relations.items()):
        if len(places) != 2:
            continue
        d = typing.get((p, places[0]))
        r = typing.get((p, places[1]))
        recursive = d is not None and d == r
        if recursive and all(_named_place(x) for x in places):
            out[p] = (claim(places[0], True), claim(places[1], True))
        elif recursive:
            out[p] = (claim(f"{p}_e1", False), claim(f"{p}_e2", False))
        else:
            e1 = claim(p, p not in voc.generated)
            out[p] = (e1, claim(e1 + INVERSE_SUFFIX, False))
    return out, gen


def _typing(kb: KnowledgeBase) -> dict:
    out = {}
    for ax in kb.axioms:
        if (isinstance(ax, ConceptInc) and isinstance(ax.sub, MinPlace) and ax.sub.k == 1
                and isinstance(ax.sub.rel, Rel) and isinstance(ax.sup, AtomicConcept)):
            out.setdefault((ax.sub.rel.name, ax.sub.place), ax.sup.name)
    return out


def pos_to_standard(kb: KnowledgeBase, model: Optional[ConceptualModel] = None,
                    profile: Profile = Profile.DCS) -> KnowledgeBase:
    """Replace every positionalist binary by two inverse directional relations.

    With ``model`` the names come from end names, readings or place labels
    of the model; without it they are derived from the kb alone.
    """
    if Profile(kb.profile) is not Profile.DCP:
        raise EncodingError("pos_to_standard expects a dcp knowledge base")
    for r, ps in kb.vocabulary.relations.items():
        if len(ps) != 2:
            raise EncodingError(f"relation {r!r} has arity {len(ps)}; reify it first")
    if model is not None:
        model = _check_valid(model)
        plan = plan_names(model)
        lifted = {plan.dcp[ref]: plan.lifted[ref] for ref in plan.dcp}
        generated = plan.generated
    else:
        lifted, generated = _derive_lifted(kb)
    missing = set(kb.vocabulary.relations) - set(lifted)
    if missing:
        raise EncodingError(f"no lifting known for relations {sorted(missing)}")
    return _to_standard(kb, lifted, generated, profile).build()


def _to_standard(kb: KnowledgeBase, lifted: dict, generated: set, profile: Profile) -> _Builder:
    voc = kb.vocabulary
    b = _Builder(profile)
    b.concepts |= voc.concepts
    b.attributes |= voc.attributes
    b.datatypes |= voc.datatypes
    b.generated |= (voc.generated - set(voc.relations)) | set(generated)
    prov = kb.provenance

    def pe(p: str, place: str) -> str:
        return lifted[p][voc.relations[p].index(place)]

    def concept(c):
        if isinstance(c, (MinPlace, MaxPlace)):
            if isinstance(c.rel, Rel):
                target = Rel(pe(c.rel.name, c.place))
            elif isinstance(c.rel, TopRel):
                target = c.rel
            else:
                raise EncodingError(f"selection {c.rel} has no standard-view counterpart")
            return (Min if isinstance(c, MinPlace) else Max)(c.k, target)
        if hasattr(c, "args"):
            return conj(*(concept(a) for a in c.args))
        return c

    for p, places in voc.relations.items():
        e1, e2 = lifted[p]
        b.relations[e1] = ("1", "2")
        b.relations[e2] = ("1", "2")
        b.condition(InverseOf(e1, e2))
    for ax in kb.axioms:
        src = prov.get(ax, "")
        if (isinstance(ax, ConceptInc) and isinstance(ax.sub, MinPlace) and ax.sub.k == 1
                and isinstance(ax.sub.rel, Rel) and isinstance(ax.sup, AtomicConcept)):
            p, place = ax.sub.rel.name, ax.sub.place
            e1 = lifted[p][0]
            first = voc.relations[p][0] == place
            b.add(ConceptInc(SomeRel(Rel(e1) if first else Inverse(e1), Top()), ax.sup), src)
            continue
        if isinstance(ax, ConceptInc):
            b.add(ConceptInc(concept(ax.sub), concept(ax.sup)), src)
        elif isinstance(ax, IdAttr):
            b.add(ax, src)
        else:
            raise EncodingError(f"unexpected dcp axiom {ax}")
    if profile in (Profile.DCUML, Profile.DCORM):
        first_source: dict = {}
        for a in kb.axioms:
            if prov.get(a):
                for name in _rel_names(a):
                    first_source.setdefault(name, prov[a])
        for p in voc.relations:
            e1, e2 = lifted[p]
            src = first_source.get(p, "")
            b.add(RelInc(Rel(e1), Inverse(e2)), src)
            b.add(RelInc(Inverse(e2), Rel(e1)), src)
    return b


def _rel_names(ax) -> set:
    return {n.name for _, n in walk(ax) if isinstance(n, Rel)}


def encode_dcs(model: ConceptualModel) -> KnowledgeBase:
    """Standard-view core: :func:`encode_dcp` followed by :func:`pos_to_standard`."""
    return pos_to_standard(encode_dcp(model), model)


# -- reification -------------------------------------------------------------


def _reify(b: _Builder, rel: Relationship, names: Reified, source: str) -> None:
    cp = atom(names.concept)
    b.concepts.add(names.concept)
    b.add(ConceptInc(cp, Top()), source)
    for role, comp in zip(rel.roles, names.components):
        b.relations[comp] = ("1", "2")
        b.add(ConceptInc(SomeRel(Rel(comp), Top()), cp), source)
        b.add(ConceptInc(SomeRel(Inverse(comp), Top()), atom(role.player)), source)
        b.add(ConceptInc(cp, SomeRel(Rel(comp), Top())), source)
        b.add(ConceptInc(cp, Max(1, Rel(comp))), source)
    b.add(IdRoles(cp, tuple(Rel(c) for c in names.components)), source)


def reify_nary(rel: Relationship, names: Optional[Reified] = None) -> list:
    """Axioms replacing the ternary ``rel`` by a concept and one functional,
    total component relation per role, jointly identifying the concept."""
    if rel.arity != 3:
        raise EncodingError(f"reify_nary needs a ternary relationship, got arity {rel.arity}")
    if names is None:
        ref = rel.ref
        names = Reified(ref + REIFIED_SUFFIX,
                        tuple(r.role_name or f"{ref}_c{i}" for i, r in enumerate(rel.roles, 1)))
    b = _Builder(Profile.DCEER)
    _reify(b, rel, names, _rel_path(rel.ref))
    return list(b.axioms)


# -- family encoders ---------------------------------------------------------


class _FamilyEncoder:
    def __init__(self, model: ConceptualModel, profile: Profile, reify: Iterable[str] = ()):
        self.model = model
        self.profile = profile
        self.reify = set(reify)
        self.plan = plan_names(model, self.reify)
        self.core_refs = {r.ref for r in model.relationships
                          if r.arity == 2 and r.ref in self.plan.lifted}

    def core(self, attr_cards: bool) -> _Builder:
        m = self.model
        carded = set()
        if attr_cards:
            carded = {(c.owner, c.attribute) for c in m.constraints
                      if isinstance(c, AttributeCardinality)}
        core_model = replace(m, attributes=tuple(a for a in m.attributes
                                                 if (a.owner, a.name) not in carded))
        dcp = _encode_core(core_model, self.plan, self.core_refs)
        dcp_kb = dcp.build()
        lifted = {self.plan.dcp[ref]: self.plan.lifted[ref] for ref in self.core_refs}
        b = _to_standard(dcp_kb, lifted, self.plan.generated, self.profile)
        b.generated |= self.plan.generated
        for a in m.attributes:
            if (a.owner, a.name) in carded:
                b.attributes.add(self.plan.attr[(a.owner, a.name)])
                b.datatypes.add(m.attribute_datatype(a))
        return b

    def attribute_cardinalities(self, b: _Builder) -> None:
        m = self.model
        for i, c in enumerate(m.constraints):
            if not isinstance(c, AttributeCardinality):
                continue
            a = m.attribute(c.owner, c.attribute)
            sym = self.plan.attr[(a.owner, a.name)]
            dt = m.attribute_datatype(a)
            parts = _card_parts(c.min, c.max, lambda k: AttrMax(k, sym, dt),
                                lambda k: AttrMin(k, sym, dt))
            b.add(ConceptInc(atom(a.owner), conj(*parts) if parts else AllAttr(sym, dt)),
                  f"constraints[{i}]")

    def reified_roles(self, b: _Builder) -> None:
        """Reify relationships in the plan and encode cardinalities on their roles."""
        m = self.model
        for rel in m.relationships:
            names = self.plan.reified.get(rel.ref)
            if names is not None:
                _reify(b, rel, names, _rel_path(rel.ref))
        refs = set(self.plan.reified)
        for path, c in _merged_cardinalities(m, refs):
            rel = m.relationship(c.relationship)
            comp = self.plan.reified[rel.ref].components[rel.index(c.place)]
            r = Inverse(comp)
            player = c.player or rel.role(c.place).player
            if isinstance(c, Cardinality):
                parts = _card_parts(c.min, c.max, lambda k: Max(k, r), lambda k: Min(k, r))
            else:
                parts = [Min(1, r)]
            if parts:
                b.add(ConceptInc(atom(player), conj(*parts)), path)

    def role_rel(self, rr: RoleRef, path: str):
        rel = self.model.relationship(rr.relationship)
        idx = rel.index(rr.place)
        if rel.ref in self.plan.reified:
            return Inverse(self.plan.reified[rel.ref].components[idx])
        if rel.arity == 2:
            return Rel(self.plan.lifted[rel.ref][idx])
        raise UnsupportedFeature(path, None, f"role {rr} of a {rel.arity}-ary relationship")

    def rel_subsumptions(self, b: _Builder) -> None:
        m = self.model
        for i, s in enumerate(m.rel_subsumptions):
            path = f"relSubsumptions[{i}]"
            sub, sup = m.relationship(s.sub), m.relationship(s.sup)
            align = _align(sub, sup)
            if sub.ref in self.plan.reified and sup.ref in self.plan.reified:
                rs, ss = self.plan.reified[sub.ref], self.plan.reified[sup.ref]
                b.add(ConceptInc(atom(rs.concept), atom(ss.concept)), path)
                for i_sub, i_sup in align:
                    b.add(RelInc(Rel(rs.components[i_sub]), Rel(ss.components[i_sup])), path)
            elif sub.arity == 2 and sub.ref in self.core_refs and sup.ref in self.core_refs:
                ls, lp = self.plan.lifted[sub.ref], self.plan.lifted[sup.ref]
                for i_sub, i_sup in align:
                    b.add(RelInc(Rel(ls[i_sub]), Rel(lp[i_sup])), path)
            else:
                raise UnsupportedFeature(path, None, "subsumption between relationships encoded differently")


def _align(sub: Relationship, sup: Relationship) -> list[tuple[int, int]]:
    """Component correspondence: by place label when the labels agree, else by position."""
    if set(sub.places) == set(sup.places):
        return [(i, sup.index(p)) for i, p in enumerate(sub.places)]
    return [(i, i) for i in range(sub.arity)]


def _refuse(model: ConceptualModel, kinds: set[str], profile: str, why: str = "") -> None:
    for i, c in enumerate(model.constraints):
        if c.kind in kinds:
            raise UnsupportedFeature(f"constraints[{i}]", None,
                                     f"{c.kind} constraint is outside {profile}{why}")


def _require(model: ConceptualModel, family: Family) -> None:
    if model.family is not family:
        raise EncodingError(f"expected a {family.value} model, got {model.family.value}")


def encode_uml(model: ConceptualModel) -> KnowledgeBase:
    _require(model, Family.UML)
    model = _check_valid(model)
    _refuse(model, {"associativeObjectType", "disjointness", "completeness"}, "dcuml")
    enc = _FamilyEncoder(model, Profile.DCUML)
    b = enc.core(attr_cards=True)
    enc.attribute_cardinalities(b)
    enc.rel_subsumptions(b)
    return b.build()


def encode_eer(model: ConceptualModel, reify: bool = False) -> KnowledgeBase:
    """EER kb; ternaries stay atomic unless ``reify`` is set."""
    _require(model, Family.EER)
    model = _check_valid(model)
    _refuse(model, {"disjointness", "completeness"}, "dceer")
    if model.rel_subsumptions:
        raise UnsupportedFeature("relSubsumptions[0]", None, "relationship subsumption is outside dceer")
    ternaries = {r.ref for r in model.relationships if r.arity == 3}
    enc = _FamilyEncoder(model, Profile.DCEER, ternaries if reify else ())
    if not reify:
        for i, c in enumerate(model.constraints):
            if isinstance(c, (Cardinality, Mandatory)) and c.relationship in ternaries \
                    and c.relationship not in enc.plan.reified:
                raise UnsupportedFeature(f"constraints[{i}]", "dceer with reify=True",
                                         "cardinality on an atomic ternary")
    b = enc.core(attr_cards=True)
    if any(a.datatype is None for a in model.attributes):
        b.datatypes.add(ANY_TYPE)
    enc.attribute_cardinalities(b)
    enc.reified_roles(b)
    plan = enc.plan
    for rel in model.relationships:
        if rel.arity == 3 and rel.ref not in plan.reified:
            (p,) = plan.lifted[rel.ref]
            b.relations[p] = rel.places
            b.condition(Signature(p, tuple(r.player for r in rel.roles)))
    for i, c in enumerate(model.constraints):
        path = f"constraints[{i}]"
        if isinstance(c, WeakIdentification):
            rel = model.relationship(c.relationship)
            if rel.ref in plan.reified:
                names = plan.reified[rel.ref]
                comps = tuple(Rel(names.components[rel.index(p)]) for p in c.determinants)
                b.add(IdRoles(atom(names.concept), comps), path)
            else:
                b.add(Fd(plan.lifted[rel.ref][0], tuple(c.determinants), c.dependent), path)
        elif isinstance(c, MultiAttributeIdentification):
            comp = plan.fresh("_".join(c.attributes))
            dt = plan.fresh(f"{comp}_type")
            b.attributes.add(comp)
            b.datatypes.add(dt)
            b.generated |= {comp, dt}
            b.add(ConceptInc(atom(c.object_type), conj(SomeAttr(comp, dt), AtMostOneAttr(comp))), path)
            b.add(IdAttr(atom(c.object_type), comp), path)
    return b.build()


def orm_lift_readings(rel: Relationship) -> KnowledgeBase:
    """Standard-view relations for one ORM fact type, named after its readings.

    Binaries give two inverse relations typed by their players; ternaries
    are reified with one component per role.
    """
    if not rel.ref:
        raise EncodingError(f"fact type with roles {[r.player for r in rel.roles]} has no reading or name")
    if rel.arity == 1:
        raise EncodingError(f"unary fact type {rel.ref!r} becomes a boolean attribute, not a relation")
    players = sorted({r.player for r in rel.roles})
    m = ConceptualModel(Family.ORM, tuple(ObjectType(p) for p in players), relationships=(rel,))
    if rel.arity == 2:
        return encode_dcs(m)
    return encode_orm(m)


def encode_orm(model: ConceptualModel) -> KnowledgeBase:
    _require(model, Family.ORM)
    model = _check_valid(model)
    _refuse(model, {"ring"}, "dcorm", "; ring constraints are not part of the profile")
    _refuse(model, {"disjointness", "completeness"}, "dcorm")
    ternaries = {r.ref for r in model.relationships if r.arity == 3}
    enc = _FamilyEncoder(model, Profile.DCORM, ternaries)
    plan = enc.plan
    b = enc.core(attr_cards=False)
    enc.reified_roles(b)

    # unary fact types become boolean attributes
    unary_mandatory = {c.relationship for c in model.constraints
                       if isinstance(c, (Mandatory, Cardinality)) and c.relationship in plan.unary
                       and (isinstance(c, Mandatory) or c.min >= 1)}
    for rel in model.relationships:
        if rel.arity != 1:
            continue
        a = plan.unary[rel.ref]
        b.attributes.add(a)
        b.datatypes.add(BOOLEAN)
        first = SomeAttr(a, BOOLEAN) if rel.ref in unary_mandatory else AllAttr(a, BOOLEAN)
        b.add(ConceptInc(atom(rel.roles[0].player), conj(first, AtMostOneAttr(a))), _rel_path(rel.ref))

    # different-arity reified relationships are disjoint
    reified = [(model.relationship(ref).arity, names.concept) for ref, names in plan.reified.items()]
    for i, (n1, c1) in enumerate(reified):
        for n2, c2 in reified[i + 1:]:
            if n1 != n2:
                b.condition(DisjointConcepts(*sorted((c1, c2))))

    enc.rel_subsumptions(b)

    for i, c in enumerate(model.constraints):
        path = f"constraints[{i}]"
        if isinstance(c, (Mandatory, Cardinality)) and c.relationship in plan.unary:
            role = model.relationship(c.relationship).roles[0]
            if (c.player or role.player) != role.player or \
                    (isinstance(c, Cardinality) and c.max == 0):
                raise UnsupportedFeature(path, None, "constraint on a unary role")
        elif isinstance(c, RoleSubsumption):
            b.add(RelInc(enc.role_rel(c.sub, path), enc.role_rel(c.sup, path)), path)
        elif isinstance(c, RoleDisjointness):
            r, s = enc.role_rel(c.first, path), enc.role_rel(c.second, path)
            b.add(RelInc(r, Complement(s)), path)
            b.add(RelInc(s, Complement(r)), path)
        elif isinstance(c, DisjunctiveMandatory):
            b.add(ConceptInc(atom(c.object_type),
                             disj(*(SomeRel(enc.role_rel(rr, path), Top()) for rr in c.roles))), path)
        elif isinstance(c, InternalUniqueness):
            rel = model.relationship(c.relationship)
            if rel.ref in plan.reified:
                names = plan.reified[rel.ref]
                comps = tuple(Rel(names.components[rel.index(p)]) for p in c.places)
                b.add(IdRoles(atom(names.concept), comps), path)
            # a single role of a binary was merged into its cardinality;
            # spanning uniqueness of a binary or unary holds for any set of tuples
        elif isinstance(c, (ExternalUniqueness, ExternalIdentification)):
            _external_uniqueness(enc, b, c, path)
        elif isinstance(c, ValueConstraint):
            _value_constraint(enc, b, c, path)
    return b.build()


def _external_uniqueness(enc: _FamilyEncoder, b: _Builder, c, path: str) -> None:
    m = enc.model
    rels, others = [], set()
    for rr in c.roles:
        rel = m.relationship(rr.relationship)
        if rel.arity != 2 or rel.ref in enc.plan.reified:
            others.add(None)
            continue
        other = next(r for r in rel.roles if r.place != rr.place)
        others.add(other.player)
        rels.append(Rel(enc.plan.lifted[rel.ref][rel.index(other.place)]))
    if isinstance(c, ExternalIdentification):
        if None in others:
            raise UnsupportedFeature(path, None, "external identification through a non-binary fact type")
        b.add(IdRoles(atom(c.object_type), tuple(rels)), path)
        return
    if len(others) == 1 and None not in others:
        b.add(IdRoles(atom(others.pop()), tuple(rels)), path)
        return
    # no common object type: reify a fresh relationship over the constrained roles
    base = "_".join(rr.relationship for rr in c.roles)
    concept = enc.plan.fresh(base + "_u")
    comps = tuple(enc.plan.fresh(f"{concept}_c{j}") for j in range(1, len(c.roles) + 1))
    b.generated |= {concept, *comps}
    players = []
    for rr in c.roles:
        players.append(m.relationship(rr.relationship).role(rr.place))
    fresh_rel = Relationship(concept, tuple(players))
    _reify(b, fresh_rel, Reified(concept, comps), path)


def _value_constraint(enc: _FamilyEncoder, b: _Builder, c: ValueConstraint, path: str) -> None:
    m = enc.model
    targets = []
    if "." in c.target and c.target not in b.datatypes:
        owner, name = c.target.split(".", 1)
        targets.append(m.attribute(owner, name))
        base = f"{owner}_{name}_values"
    else:
        targets.extend(a for a in m.attributes if m.attribute_datatype(a) == c.target)
        base = f"{c.target}_values"
    dt = enc.plan.fresh(base)
    b.datatypes.add(dt)
    b.generated.add(dt)
    b.condition(ValueSet(dt, tuple(c.values)))
    for a in targets:
        sym = enc.plan.attr[(a.owner, a.name)]
        old_dt = m.attribute_datatype(a)
        old = ConceptInc(atom(a.owner), conj(SomeAttr(sym, old_dt), AtMostOneAttr(sym)))
        new = ConceptInc(atom(a.owner), conj(SomeAttr(sym, dt), AtMostOneAttr(sym)))
        if old in b.provenance:
            src = b.provenance.pop(old)
            b.axioms[b.axioms.index(old)] = new
            b.provenance[new] = src


ENCODERS = {
    Profile.DCP: encode_dcp,
    Profile.DCS: encode_dcs,
    Profile.DCUML: encode_uml,
    Profile.DCEER: encode_eer,
    Profile.DCORM: encode_orm,
}


def encode(model: ConceptualModel, profile) -> KnowledgeBase:
    return ENCODERS[Profile(profile)](model)


__all__ = [
    "EncodingError", "InvalidModel", "UnsupportedFeature", "NamePlan", "Reified",
    "plan_names", "encode_dcp", "pos_to_standard", "encode_dcs", "reify_nary",
    "encode_uml", "encode_eer", "orm_lift_readings", "encode_orm", "encode", "ENCODERS",
]
