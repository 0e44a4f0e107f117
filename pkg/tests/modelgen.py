"""Random valid conceptual models, one generator per family.

Models are built from a seeded ``random.Random`` so every failure can be
replayed from its seed. ``core=True`` restricts a model to the features the
positionalist encoder accepts (binaries, attributes, subsumption,
cardinality, mandatory, single identification).
"""

from __future__ import annotations

import random
from typing import Optional

from dcprofiles.model import (
    AssociativeObjectType, Attribute, AttributeCardinality, Cardinality, ConceptualModel,
    DataType, DisjunctiveMandatory, ExternalIdentification, ExternalUniqueness, Family,
    InternalUniqueness, Mandatory, MultiAttributeIdentification, ObjectType, RelSubsumption,
    Relationship, Role, RoleDisjointness, RoleRef, RoleSubsumption, SingleIdentification,
    Subsumption, ValueConstraint, ValueType, WeakIdentification,
)

DATATYPES = ("String", "Integer", "Date")


class _Gen:
    def __init__(self, rng: random.Random, family: Family, n_types: int, core: bool):
        self.rng = rng
        self.family = family
        self.core = core
        self.types = [f"C{i}" for i in range(n_types)]
        self.subs: list[Subsumption] = []
        self.rels: list[Relationship] = []
        self.attrs: list[Attribute] = []
        self.cons: list = []
        self.rel_subs: list[RelSubsumption] = []
        self.value_types: list[ValueType] = []
        self.counter = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def chance(self, p: float) -> bool:
        return self.rng.random() < p

    # -- structure -----------------------------------------------------------

    def hierarchy(self) -> None:
        for i in range(1, len(self.types)):
            if self.chance(0.35):
                j = self.rng.randrange(i)
                self.subs.append(Subsumption(self.types[i], self.types[j]))

    def supertypes(self, t: str) -> set[str]:
        out, stack = {t}, [t]
        while stack:
            x = stack.pop()
            for s in self.subs:
                if s.sub == x and s.sup not in out:
                    out.add(s.sup)
                    stack.append(s.sup)
        return out

    def subtypes(self, t: str) -> list[str]:
        return [x for x in self.types if t in self.supertypes(x)]

    def attributes(self) -> None:
        for t in self.types:
            for j in range(self.rng.randrange(3)):
                name = f"a{j}" if self.chance(0.3) else self.fresh("at")
                if any(a.owner == t and a.name == name for a in self.attrs):
                    continue
                dt: Optional[str] = self.rng.choice(DATATYPES)
                if self.family is Family.EER and self.chance(0.3):
                    dt = None
                self.attrs.append(Attribute(t, name, dt))

    def binary(self) -> Relationship:
        a, b = self.rng.choice(self.types), self.rng.choice(self.types)
        fam = self.family
        name = self.fresh("p") if self.chance(0.6) else None
        named_places = a == b and self.chance(0.3) and fam is not Family.ORM
        places = (self.fresh("pl"), self.fresh("pl")) if named_places else ("1", "2")
        roles = [None, None]
        if fam is not Family.ORM and (name is None or self.chance(0.3)):
            roles = [self.fresh("e") if (name is None and not named_places) or self.chance(0.5) else None
                     for _ in range(2)]
            if name is None and not named_places and roles[0] is None:
                roles[0] = self.fresh("e")
        readings: tuple = ()
        if fam is Family.ORM and (name is None or self.chance(0.3)):
            readings = tuple(f"… {self.fresh('rd')} …" for _ in range(self.rng.choice((1, 2))))
            name = None if self.chance(0.7) else name
        if fam is not Family.ORM and name is None and not all(roles):
            name = self.fresh("p")
        return Relationship(name, (Role(places[0], a, roles[0]), Role(places[1], b, roles[1])),
                            readings)

    def ternary(self) -> Relationship:
        players = [self.rng.choice(self.types) for _ in range(3)]
        readings: tuple = ()
        if self.family is Family.ORM and self.chance(0.5):
            readings = tuple(f"… {self.fresh('rd')} …" for _ in range(3))
        return Relationship(self.fresh("t"), tuple(Role(str(i + 1), p) for i, p in enumerate(players)),
                            readings)

    def relationships(self, n: int) -> None:
        for _ in range(n):
            self.rels.append(self.binary())
        if self.core:
            return
        if self.family in (Family.EER, Family.ORM):
            for _ in range(self.rng.randrange(n // 3 + 2)):
                self.rels.append(self.ternary())
        if self.family is Family.ORM:
            for _ in range(self.rng.randrange(n // 4 + 2)):
                t = self.rng.choice(self.types)
                self.rels.append(Relationship(None, (Role("1", t),), (f"… {self.fresh('u')}",)))

    # -- constraints ---------------------------------------------------------

    def binaries(self) -> list[Relationship]:
        return [r for r in self.rels if r.arity == 2]

    def cardinalities(self, rels: list[Relationship]) -> None:
        for rel in rels:
            for role in rel.roles:
                if not self.chance(0.4):
                    continue
                player = role.player if self.chance(0.7) else self.rng.choice(self.subtypes(role.player))
                if player == role.player:
                    player = None
                if self.chance(0.3):
                    self.cons.append(Mandatory(rel.ref, role.place, player))
                    continue
                lo = self.rng.randrange(3)
                hi = None if self.chance(0.3) else lo + self.rng.randrange(3)
                if hi == 0:
                    hi = 1
                self.cons.append(Cardinality(rel.ref, role.place, lo, hi, player))

    def identification(self) -> None:
        for a in self.attrs:
            if self.chance(0.2):
                self.cons.append(SingleIdentification(a.owner, a.name))

    def attribute_cardinalities(self) -> None:
        for a in self.attrs:
            if self.chance(0.25):
                lo = self.rng.randrange(3)
                hi = None if self.chance(0.3) else max(1, lo + self.rng.randrange(3))
                self.cons.append(AttributeCardinality(a.owner, a.name, lo, hi))

    def uml_extras(self) -> None:
        bins = [r for r in self.binaries()]
        for _ in range(self.rng.randrange(len(bins) // 3 + 1)):
            s, t = self.rng.sample(bins, 2) if len(bins) > 1 else (None, None)
            if s is not None:
                self.rel_subs.append(RelSubsumption(s.ref, t.ref))

    def eer_extras(self) -> None:
        ternaries = [r for r in self.rels if r.arity == 3]
        for rel in ternaries:
            if self.chance(0.4):
                ps = list(rel.places)
                self.rng.shuffle(ps)
                self.cons.append(WeakIdentification(rel.ref, (ps[0], ps[1]), ps[2]))
        for t in self.types:
            owned = [a.name for a in self.attrs if a.owner == t]
            if len(owned) >= 2 and self.chance(0.3):
                self.cons.append(MultiAttributeIdentification(t, tuple(self.rng.sample(owned, 2))))
        self.associative()

    def associative(self) -> None:
        for rel in self.rels:
            if rel.arity >= 2 and self.chance(0.15):
                obj = self.fresh("Assoc")
                self.types.append(obj)
                self.cons.append(AssociativeObjectType(rel.ref, obj))

    def role_refs(self, rels: list[Relationship]) -> list[RoleRef]:
        return [RoleRef(r.ref, role.place) for r in rels for role in r.roles]

    def orm_extras(self) -> None:
        bins = self.binaries()
        ternaries = [r for r in self.rels if r.arity == 3]
        unaries = [r for r in self.rels if r.arity == 1]
        self.cardinalities(ternaries)
        for u in unaries:
            if self.chance(0.3):
                self.cons.append(Mandatory(u.ref, "1"))
        self.associative()
        objectified = {c.relationship for c in self.cons if isinstance(c, AssociativeObjectType)}
        plain = [r for r in bins if r.ref not in objectified]
        roles = self.role_refs(bins + ternaries)
        for _ in range(self.rng.randrange(3)):
            if len(roles) >= 2:
                a, b = self.rng.sample(roles, 2)
                self.cons.append(RoleSubsumption(a, b))
            if len(roles) >= 2 and self.chance(0.5):
                a, b = self.rng.sample(roles, 2)
                self.cons.append(RoleDisjointness(a, b))
        for t in self.types:
            mine = [RoleRef(r.ref, role.place) for r in bins + ternaries
                    for role in r.roles if role.player == t]
            if len(mine) >= 2 and self.chance(0.3):
                self.cons.append(DisjunctiveMandatory(t, tuple(self.rng.sample(mine, 2))))
        for rel in bins + ternaries:
            if self.chance(0.3):
                k = self.rng.randrange(1, rel.arity + 1)
                self.cons.append(InternalUniqueness(rel.ref, tuple(self.rng.sample(list(rel.places), k))))
        if len(bins) >= 2 and self.chance(0.5):
            picked = self.rng.sample(bins, 2)
            rrs = tuple(RoleRef(r.ref, self.rng.choice(r.places)) for r in picked)
            self.cons.append(ExternalUniqueness(rrs))
        owners = {}
        for r in plain:
            for role in r.roles:
                owners.setdefault(role.player, []).append(r)
        for t, rs in owners.items():
            distinct = list({r.ref: r for r in rs}.values())
            if len(distinct) >= 2 and self.chance(0.3):
                picked = self.rng.sample(distinct, 2)
                rrs = []
                for r in picked:
                    own = next(role for role in r.roles if role.player == t)
                    rrs.append(RoleRef(r.ref, own.place))
                self.cons.append(ExternalIdentification(t, tuple(rrs)))
                break
        if self.attrs and self.chance(0.4):
            a = self.rng.choice(self.attrs)
            self.cons.append(ValueConstraint(f"{a.owner}.{a.name}", ("x", "y")))
        for _ in range(self.rng.randrange(2)):
            vt = self.fresh("V")
            self.value_types.append(ValueType(vt, self.rng.choice(DATATYPES)))
            bridge = Relationship(None, (Role("1", self.rng.choice(self.types)), Role("2", vt)),
                                  (f"… {self.fresh('has')} …",))
            self.rels.append(bridge)
            if self.chance(0.5):
                self.cons.append(InternalUniqueness(bridge.ref, ("2",)))
        bins_same = [(s, t) for s in plain for t in plain if s is not t]
        if bins_same and self.chance(0.3):
            s, t = self.rng.choice(bins_same)
            self.rel_subs.append(RelSubsumption(s.ref, t.ref))

    def build(self, n_rels: int) -> ConceptualModel:
        self.hierarchy()
        self.attributes()
        self.relationships(n_rels)
        self.cardinalities(self.binaries())
        self.identification()
        if not self.core:
            if self.family in (Family.UML, Family.EER):
                self.attribute_cardinalities()
            if self.family is Family.UML:
                self.uml_extras()
            elif self.family is Family.EER:
                self.eer_extras()
            else:
                self.orm_extras()
        used = {a.datatype for a in self.attrs if a.datatype} | {v.datatype for v in self.value_types}
        return ConceptualModel(
            family=self.family,
            object_types=tuple(ObjectType(t) for t in self.types),
            data_types=tuple(DataType(d) for d in sorted(used)),
            relationships=tuple(self.rels),
            attributes=tuple(self.attrs),
            subsumptions=tuple(self.subs),
            rel_subsumptions=tuple(self.rel_subs),
            constraints=tuple(self.cons),
            value_types=tuple(self.value_types),
        )


def random_model(seed: int, family: Family, n_types: Optional[int] = None,
                 core: bool = False) -> ConceptualModel:
    rng = random.Random(seed)
    n = n_types if n_types is not None else rng.randrange(2, 7)
    return _Gen(rng, family, n, core).build(rng.randrange(n + 2))


def sized_model(seed: int, family: Family, target: int) -> ConceptualModel:
    """A model with roughly ``target`` elements (never fewer)."""
    n = max(1, target // 8)
    while True:
        rng = random.Random(seed)
        m = _Gen(rng, family, n, core=False).build(n)
        if m.element_count() >= target:
            return m
        n += max(1, n // 8)
