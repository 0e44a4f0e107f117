"""Unified positionalist AST for UML class diagrams, (E)ER and ORM/2 models.

All three families share one representation: object types, relationships
whose roles sit at named argument places, attributes, subsumptions and a
tagged union of constraints. Family-specific features are gated by
:func:`validate_model`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import ClassVar, Iterable, Iterator, Optional, Union


class Family(str, Enum):
    UML = "uml"
    EER = "eer"
    ORM = "orm"


ANY_TYPE = "AnyType"
BOOLEAN = "Boolean"


def slug(text: str) -> str:
    """Turn a fact-type reading such as ``"… has member …"`` into ``has_member``.

    Placeholders are stripped and whitespace becomes ``_``; case is kept so
    that a reading generated from a relation name slugs back to that name.
    """
    text = text.replace("…", " ").replace("...", " ")
    text = re.sub(r"[^\w\s]", " ", text)
    return "_".join(text.split())


@dataclass(frozen=True)
class ObjectType:
    name: str


@dataclass(frozen=True)
class DataType:
    name: str


@dataclass(frozen=True)
class ValueType:
    """ORM value type; rewritten into attributes by :func:`normalize_orm_value_types`."""

    name: str
    datatype: str


@dataclass(frozen=True)
class Role:
    place: str
    player: str
    role_name: Optional[str] = None


@dataclass(frozen=True)
class Relationship:
    name: Optional[str]
    roles: tuple[Role, ...]
    readings: tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.roles)

    @property
    def ref(self) -> str:
        """Key used by constraints: the name, else the first reading's slug."""
        if self.name:
            return self.name
        if self.readings:
            return slug(self.readings[0])
        if self.roles and all(r.role_name for r in self.roles):
            return "_".join(r.role_name for r in self.roles)  # type: ignore[misc]
        return ""

    @property
    def places(self) -> tuple[str, ...]:
        return tuple(r.place for r in self.roles)

    def role(self, place: str) -> Role:
        for r in self.roles:
            if r.place == place:
                return r
        raise KeyError(place)

    def index(self, place: str) -> int:
        """0-based declaration position of ``place``."""
        return self.places.index(place)


def make_relationship(name: Optional[str], *players: Union[str, Role],
                      readings: Iterable[str] = ()) -> Relationship:
    """Build a relationship, labelling unlabelled places ``"1"``, ``"2"``, ``"3"``."""
    roles = []
    for i, p in enumerate(players, start=1):
        roles.append(p if isinstance(p, Role) else Role(str(i), p))
    return Relationship(name, tuple(roles), tuple(readings))


@dataclass(frozen=True)
class Attribute:
    owner: str
    name: str
    datatype: Optional[str] = None


@dataclass(frozen=True)
class Subsumption:
    sub: str
    sup: str


@dataclass(frozen=True)
class RelSubsumption:
    sub: str
    sup: str


@dataclass(frozen=True)
class RoleRef:
    relationship: str
    place: str

    def __str__(self) -> str:
        return f"{self.relationship}.{self.place}"


# -- constraints -------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    kind: ClassVar[str] = ""


@dataclass(frozen=True)
class Cardinality(Constraint):
    """``min..max`` participation of ``player`` at ``place``; ``max=None`` is ``*``.

    ``player`` defaults to the role's player and may name one of its subtypes.
    """

    kind: ClassVar[str] = "cardinality"
    relationship: str
    place: str
    min: int = 0
    max: Optional[int] = None
    player: Optional[str] = None


@dataclass(frozen=True)
class Mandatory(Constraint):
    kind: ClassVar[str] = "mandatory"
    relationship: str
    place: str
    player: Optional[str] = None


@dataclass(frozen=True)
class AttributeCardinality(Constraint):
    kind: ClassVar[str] = "attributeCardinality"
    owner: str
    attribute: str
    min: int = 0
    max: Optional[int] = None


@dataclass(frozen=True)
class SingleIdentification(Constraint):
    kind: ClassVar[str] = "singleIdentification"
    object_type: str
    attribute: str


@dataclass(frozen=True)
class WeakIdentification(Constraint):
    """Places ``determinants`` of a ternary jointly fix ``dependent``."""

    kind: ClassVar[str] = "weakIdentification"
    relationship: str
    determinants: tuple[str, str]
    dependent: str


@dataclass(frozen=True)
class MultiAttributeIdentification(Constraint):
    kind: ClassVar[str] = "multiAttributeIdentification"
    object_type: str
    attributes: tuple[str, ...]


@dataclass(frozen=True)
class AssociativeObjectType(Constraint):
    kind: ClassVar[str] = "associativeObjectType"
    relationship: str
    object_type: str


@dataclass(frozen=True)
class RoleSubsumption(Constraint):
    kind: ClassVar[str] = "roleSubsumption"
    sub: RoleRef
    sup: RoleRef


@dataclass(frozen=True)
class RoleDisjointness(Constraint):
    kind: ClassVar[str] = "roleDisjointness"
    first: RoleRef
    second: RoleRef


@dataclass(frozen=True)
class DisjunctiveMandatory(Constraint):
    kind: ClassVar[str] = "disjunctiveMandatory"
    object_type: str
    roles: tuple[RoleRef, ...]


@dataclass(frozen=True)
class InternalUniqueness(Constraint):
    kind: ClassVar[str] = "internalUniqueness"
    relationship: str
    places: tuple[str, ...]


@dataclass(frozen=True)
class ExternalUniqueness(Constraint):
    kind: ClassVar[str] = "externalUniqueness"
    roles: tuple[RoleRef, ...]


@dataclass(frozen=True)
class ExternalIdentification(Constraint):
    kind: ClassVar[str] = "externalIdentification"
    object_type: str
    roles: tuple[RoleRef, ...]


@dataclass(frozen=True)
class ValueConstraint(Constraint):
    """``target`` is a datatype, an ORM value type, or ``Owner.attribute``."""

    kind: ClassVar[str] = "valueConstraint"
    target: str
    values: tuple[str, ...]


# Features outside every profile. They are representable so that the
# encoders can refuse them with a precise error.


@dataclass(frozen=True)
class Disjointness(Constraint):
    kind: ClassVar[str] = "disjointness"
    object_types: tuple[str, ...]


@dataclass(frozen=True)
class Completeness(Constraint):
    kind: ClassVar[str] = "completeness"
    supertype: str
    subtypes: tuple[str, ...]


@dataclass(frozen=True)
class RingConstraint(Constraint):
    kind: ClassVar[str] = "ring"
    relationship: str
    ring_kind: str = "irreflexive"


CONSTRAINT_TYPES: dict[str, type] = {
    c.kind: c
    for c in (
        Cardinality, Mandatory, AttributeCardinality, SingleIdentification,
        WeakIdentification, MultiAttributeIdentification, AssociativeObjectType,
        RoleSubsumption, RoleDisjointness, DisjunctiveMandatory, InternalUniqueness,
        ExternalUniqueness, ExternalIdentification, ValueConstraint,
        Disjointness, Completeness, RingConstraint,
    )
}

# Constraint kinds admitted per family at model level. Kinds admitted here
# but absent from a profile are refused by the encoder, not the validator.
FAMILY_CONSTRAINTS: dict[Family, frozenset[str]] = {
    Family.UML: frozenset({
        "cardinality", "mandatory", "attributeCardinality", "singleIdentification",
        "associativeObjectType", "disjointness", "completeness",
    }),
    Family.EER: frozenset({
        "cardinality", "mandatory", "attributeCardinality", "singleIdentification",
        "weakIdentification", "multiAttributeIdentification", "associativeObjectType",
        "disjointness", "completeness",
    }),
    Family.ORM: frozenset({
        "cardinality", "mandatory", "singleIdentification", "associativeObjectType",
        "roleSubsumption", "roleDisjointness", "disjunctiveMandatory",
        "internalUniqueness", "externalUniqueness", "externalIdentification",
        "valueConstraint", "disjointness", "completeness", "ring",
    }),
}


@dataclass(frozen=True)
class ConceptualModel:
    family: Family
    object_types: tuple[ObjectType, ...] = ()
    data_types: tuple[DataType, ...] = ()
    relationships: tuple[Relationship, ...] = ()
    attributes: tuple[Attribute, ...] = ()
    subsumptions: tuple[Subsumption, ...] = ()
    rel_subsumptions: tuple[RelSubsumption, ...] = ()
    constraints: tuple[Constraint, ...] = ()
    value_types: tuple[ValueType, ...] = ()

    @cached_property
    def _rel_index(self) -> dict[str, Relationship]:
        return {r.ref: r for r in self.relationships}

    def relationship(self, ref: str) -> Relationship:
        return self._rel_index[ref]

    def has_relationship(self, ref: str) -> bool:
        return ref in self._rel_index

    @cached_property
    def object_type_names(self) -> frozenset[str]:
        return frozenset(o.name for o in self.object_types)

    @cached_property
    def value_type_index(self) -> dict[str, ValueType]:
        return {v.name: v for v in self.value_types}

    def attribute(self, owner: str, name: str) -> Attribute:
        for a in self.attributes:
            if a.owner == owner and a.name == name:
                return a
        raise KeyError(f"{owner}.{name}")

    def attribute_datatype(self, a: Attribute) -> str:
        return a.datatype or ANY_TYPE

    @cached_property
    def supertypes(self) -> dict[str, frozenset[str]]:
        """Reflexive-transitive supertypes of each object type."""
        direct: dict[str, set[str]] = {}
        for s in self.subsumptions:
            direct.setdefault(s.sub, set()).add(s.sup)
        out: dict[str, frozenset[str]] = {}
        for o in self.object_types:
            seen = {o.name}
            stack = [o.name]
            while stack:
                for sup in direct.get(stack.pop(), ()):
                    if sup not in seen:
                        seen.add(sup)
                        stack.append(sup)
            out[o.name] = frozenset(seen)
        return out

    def element_count(self) -> int:
        """Number of model elements; roles count individually."""
        return (len(self.object_types) + len(self.data_types) + len(self.value_types)
                + sum(1 + r.arity for r in self.relationships)
                + len(self.attributes) + len(self.subsumptions)
                + len(self.rel_subsumptions) + len(self.constraints))


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str
    message: str = ""

    def __str__(self) -> str:
        return f"{self.path}: {self.rule}" + (f" ({self.message})" if self.message else "")


def _duplicates(names: Iterable[str]) -> Iterator[str]:
    seen: set[str] = set()
    for n in names:
        if n in seen:
            yield n
        seen.add(n)


def validate_model(model: ConceptualModel) -> list[Violation]:
    """Check the AST invariants and family feature gating.

    Violations are returned, never raised; an empty list means the model is
    well formed.
    """
    out: list[Violation] = []

    def bad(path: str, rule: str, message: str = "") -> None:
        out.append(Violation(path, rule, message))

    fam = model.family
    ots = {o.name for o in model.object_types}
    dts = {d.name for d in model.data_types}
    if fam is Family.EER:
        dts.add(ANY_TYPE)
    vts = {v.name for v in model.value_types}

    for i, o in enumerate(model.object_types):
        if not o.name:
            bad(f"objectTypes[{i}]", "empty-name")
    for n in _duplicates(o.name for o in model.object_types):
        bad(f"objectTypes/{n}", "duplicate-object-type")
    for n in _duplicates(d.name for d in model.data_types):
        bad(f"dataTypes/{n}", "duplicate-datatype")
    if model.value_types and fam is not Family.ORM:
        bad("valueTypes", "value-types-only-in-ORM")
    for i, v in enumerate(model.value_types):
        if v.name in ots or v.name in dts:
            bad(f"valueTypes[{i}]", "name-clash", v.name)
        if v.datatype not in dts:
            bad(f"valueTypes[{i}].datatype", "unknown-datatype", v.datatype)
    for n in _duplicates(v.name for v in model.value_types):
        bad(f"valueTypes/{n}", "duplicate-value-type")

    players = ots | vts
    refs: list[str] = []
    for i, r in enumerate(model.relationships):
        path = f"relationships[{i}]"
        if not r.ref:
            rule = "orm-missing-reading" if fam is Family.ORM else "unnamed-relationship"
            bad(path, rule)
        else:
            refs.append(r.ref)
        n = r.arity
        if n < 1:
            bad(path, "empty-relationship")
        elif n == 1 and fam is not Family.ORM:
            bad(path, f"arity-1-not-in-{fam.name}-profile-input")
        elif n == 3 and fam is Family.UML:
            bad(path, "arity-3-not-in-UML-profile-input")
        elif n > 3:
            bad(path, "arity-above-3", "reify before ingestion")
        for place in _duplicates(r.places):
            bad(f"{path}.roles", "duplicate-place-label", place)
        for j, role in enumerate(r.roles):
            if not role.place:
                bad(f"{path}.roles[{j}]", "empty-place-label")
            if role.player not in players:
                bad(f"{path}.roles[{j}].player", "unknown-player", role.player)
        if len(r.readings) > max(2, n):
            bad(f"{path}.readings", "too-many-readings")
    for ref in _duplicates(refs):
        bad(f"relationships/{ref}", "duplicate-relationship")

    attr_keys: list[str] = []
    for i, a in enumerate(model.attributes):
        path = f"attributes[{i}]"
        if a.owner not in ots:
            bad(f"{path}.owner", "unknown-object-type", a.owner)
        if a.datatype is None:
            if fam is not Family.EER:
                bad(f"{path}.datatype", "missing-datatype")
        elif a.datatype not in dts:
            bad(f"{path}.datatype", "unknown-datatype", a.datatype)
        if not a.name:
            bad(path, "empty-name")
        attr_keys.append(f"{a.owner}.{a.name}")
    for k in _duplicates(attr_keys):
        bad(f"attributes/{k}", "duplicate-attribute")
    attrs = set(attr_keys)

    for i, s in enumerate(model.subsumptions):
        for side in ("sub", "sup"):
            if getattr(s, side) not in ots:
                bad(f"subsumptions[{i}].{side}", "unknown-object-type", getattr(s, side))

    rels = {r.ref: r for r in model.relationships if r.ref}
    for i, s in enumerate(model.rel_subsumptions):
        if s.sub not in rels or s.sup not in rels:
            bad(f"relSubsumptions[{i}]", "unknown-relationship")
        elif rels[s.sub].arity != rels[s.sup].arity:
            bad(f"relSubsumptions[{i}]", "arity-mismatch")

    sups = model.supertypes

    def check_role(path: str, rr: RoleRef) -> Optional[Role]:
        rel = rels.get(rr.relationship)
        if rel is None:
            bad(path, "unknown-relationship", rr.relationship)
            return None
        if rr.place not in rel.places:
            bad(path, "unknown-place", str(rr))
            return None
        return rel.role(rr.place)

    def check_player(path: str, role: Optional[Role], player: Optional[str]) -> None:
        if role is None or player is None or player == role.player:
            return
        if player not in ots:
            bad(path, "unknown-object-type", player)
        elif role.player not in sups.get(player, ()):
            bad(path, "player-not-subtype-of-role-player", player)

    card_keys: list[str] = []
    allowed = FAMILY_CONSTRAINTS[fam]
    for i, c in enumerate(model.constraints):
        path = f"constraints[{i}]"
        if c.kind not in allowed:
            bad(path, f"{c.kind}-not-in-{fam.name}")
        if isinstance(c, (Cardinality, Mandatory)):
            role = check_role(path, RoleRef(c.relationship, c.place))
            check_player(f"{path}.player", role, c.player)
            if isinstance(c, Cardinality):
                card_keys.append(f"{c.relationship}.{c.place}")
                if c.min < 0:
                    bad(path, "negative-min")
                if c.max is not None and c.max < c.min:
                    bad(path, "min-above-max")
        elif isinstance(c, AttributeCardinality):
            if f"{c.owner}.{c.attribute}" not in attrs:
                bad(path, "unknown-attribute", f"{c.owner}.{c.attribute}")
            if c.min < 0:
                bad(path, "negative-min")
            if c.max is not None and c.max < c.min:
                bad(path, "min-above-max")
        elif isinstance(c, SingleIdentification):
            if f"{c.object_type}.{c.attribute}" not in attrs:
                bad(path, "unknown-attribute", f"{c.object_type}.{c.attribute}")
        elif isinstance(c, WeakIdentification):
            rel = rels.get(c.relationship)
            if rel is None:
                bad(path, "unknown-relationship", c.relationship)
            else:
                ps = (*c.determinants, c.dependent)
                if rel.arity != 3:
                    bad(path, "weak-identification-needs-ternary")
                if len(set(ps)) != 3 or any(p not in rel.places for p in ps):
                    bad(path, "fd-places-invalid")
        elif isinstance(c, MultiAttributeIdentification):
            if len(c.attributes) < 2:
                bad(path, "needs-two-attributes")
            for a in c.attributes:
                if f"{c.object_type}.{a}" not in attrs:
                    bad(path, "unknown-attribute", f"{c.object_type}.{a}")
        elif isinstance(c, AssociativeObjectType):
            if c.relationship not in rels:
                bad(path, "unknown-relationship", c.relationship)
            if c.object_type not in ots:
                bad(path, "unknown-object-type", c.object_type)
        elif isinstance(c, RoleSubsumption):
            check_role(f"{path}.sub", c.sub)
            check_role(f"{path}.sup", c.sup)
        elif isinstance(c, RoleDisjointness):
            check_role(f"{path}.first", c.first)
            check_role(f"{path}.second", c.second)
        elif isinstance(c, (DisjunctiveMandatory, ExternalIdentification)):
            if c.object_type not in ots:
                bad(path, "unknown-object-type", c.object_type)
            if not c.roles:
                bad(path, "no-roles")
            for j, rr in enumerate(c.roles):
                check_role(f"{path}.roles[{j}]", rr)
        elif isinstance(c, InternalUniqueness):
            rel = rels.get(c.relationship)
            if rel is None:
                bad(path, "unknown-relationship", c.relationship)
            elif not c.places or any(p not in rel.places for p in c.places):
                bad(path, "unknown-place")
        elif isinstance(c, ExternalUniqueness):
            if len(c.roles) < 2:
                bad(path, "needs-two-roles")
            if len({rr.relationship for rr in c.roles}) != len(c.roles):
                bad(path, "roles-share-relationship")
            for j, rr in enumerate(c.roles):
                check_role(f"{path}.roles[{j}]", rr)
        elif isinstance(c, ValueConstraint):
            t = c.target
            if not (t in dts or t in vts or t in attrs):
                bad(path, "unknown-target", t)
            if not c.values:
                bad(path, "no-values")
        elif isinstance(c, Disjointness):
            for o in c.object_types:
                if o not in ots:
                    bad(path, "unknown-object-type", o)
        elif isinstance(c, Completeness):
            for o in (c.supertype, *c.subtypes):
                if o not in ots:
                    bad(path, "unknown-object-type", o)
        elif isinstance(c, RingConstraint):
            if c.relationship not in rels:
                bad(path, "unknown-relationship", c.relationship)
    for k in _duplicates(card_keys):
        bad(f"constraints/{k}", "duplicate-cardinality")
    return out


# -- ORM value types ---------------------------------------------------------


class ValueTypeError(ValueError):
    """A value type cannot be rewritten into attributes unambiguously."""


def normalize_orm_value_types(model: ConceptualModel) -> ConceptualModel:
    """Rewrite every ORM value type into attributes of the object types it is attached to.

    Each binary fact type between an object type ``A`` and a value type ``V``
    becomes an attribute of ``A`` with ``V``'s datatype, named after the role
    name of ``V``'s role if given, else after ``V``. A value type shared by
    several object types yields one attribute per owner. The bridging fact
    types disappear; uniqueness on the value role becomes single
    identification, and value constraints on ``V`` move to the new attributes.
    """
    if model.family is not Family.ORM:
        raise ValueError("value-type normalisation applies to ORM models only")
    if not model.value_types:
        return model
    vts = model.value_type_index

    bridges: dict[str, tuple[Role, Role]] = {}  # ref -> (owner role, value role)
    kept: list[Relationship] = []
    for rel in model.relationships:
        vroles = [r for r in rel.roles if r.player in vts]
        if not vroles:
            kept.append(rel)
            continue
        if rel.arity != 2 or len(vroles) != 1:
            raise ValueTypeError(
                f"value type {vroles[0].player!r} in fact type {rel.ref!r} "
                "is not attached to exactly one object type")
        owner = next(r for r in rel.roles if r.player not in vts)
        bridges[rel.ref] = (owner, vroles[0])

    attached = {vr.player for _, vr in bridges.values()}
    for v in model.value_types:
        if v.name not in attached:
            raise ValueTypeError(f"value type {v.name!r} is not attached to any object type")

    attributes = list(model.attributes)
    taken = {(a.owner, a.name) for a in attributes}
    attr_of: dict[str, Attribute] = {}
    for ref, (owner, vrole) in bridges.items():
        base = vrole.role_name or slug(vrole.player).lower()
        name, n = base, 2
        while (owner.player, name) in taken:
            name, n = f"{base}_{n}", n + 1
        taken.add((owner.player, name))
        attr = Attribute(owner.player, name, vts[vrole.player].datatype)
        attributes.append(attr)
        attr_of[ref] = attr

    constraints: list[Constraint] = []
    for c in model.constraints:
        rel = getattr(c, "relationship", None)
        if rel in bridges:
            owner, vrole = bridges[rel]
            if isinstance(c, InternalUniqueness) and c.places == (vrole.place,):
                a = attr_of[rel]
                constraints.append(SingleIdentification(a.owner, a.name))
            # other constraints on a bridge are implied by the attribute axiom
            continue
        if isinstance(c, ValueConstraint) and c.target in vts:
            for ref, (_, vrole) in bridges.items():
                if vrole.player == c.target:
                    a = attr_of[ref]
                    constraints.append(ValueConstraint(f"{a.owner}.{a.name}", c.values))
            continue
        for rr in _role_refs(c):
            if rr.relationship in bridges:
                raise ValueTypeError(
                    f"{c.kind} constraint spans value-type fact type {rr.relationship!r}")
        constraints.append(c)

    dts = list(model.data_types)
    names = {d.name for d in dts}
    for v in model.value_types:
        if v.datatype not in names:
            dts.append(DataType(v.datatype))
            names.add(v.datatype)

    return replace(
        model,
        data_types=tuple(dts),
        relationships=tuple(kept),
        attributes=tuple(attributes),
        constraints=tuple(constraints),
        value_types=(),
        rel_subsumptions=tuple(s for s in model.rel_subsumptions
                               if s.sub not in bridges and s.sup not in bridges),
    )


def _role_refs(c: Constraint) -> tuple[RoleRef, ...]:
    if isinstance(c, RoleSubsumption):
        return (c.sub, c.sup)
    if isinstance(c, RoleDisjointness):
        return (c.first, c.second)
    if isinstance(c, (DisjunctiveMandatory, ExternalUniqueness, ExternalIdentification)):
        return c.roles
    return ()
