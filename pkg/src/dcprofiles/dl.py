"""Concept, relation and axiom syntax shared by the five DC profiles.

Expressions are frozen dataclasses so they hash and compare structurally.
``str()`` gives DL notation; the ASCII file syntax lives in
:mod:`dcprofiles.kbtext`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Optional, Union


class Profile(str, Enum):
    DCP = "dcp"
    DCS = "dcs"
    DCUML = "dcuml"
    DCEER = "dceer"
    DCORM = "dcorm"


FROM, TO = "from", "to"


# -- concepts ----------------------------------------------------------------


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "⊤"


@dataclass(frozen=True)
class AtomicConcept:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class MinPlace:
    """``≥k[i]R``: participates at place ``i`` of at least ``k`` tuples."""

    k: int
    place: str
    rel: "RelExpr"

    def __str__(self) -> str:
        return f"≥{self.k}[{self.place}]{self.rel}"


@dataclass(frozen=True)
class MaxPlace:
    k: int
    place: str
    rel: "RelExpr"

    def __str__(self) -> str:
        return f"≤{self.k}[{self.place}]{self.rel}"


@dataclass(frozen=True)
class AllAttr:
    attr: str
    datatype: str

    def __str__(self) -> str:
        return f"∀{self.attr}.{self.datatype}"


@dataclass(frozen=True)
class SomeAttr:
    attr: str
    datatype: str

    def __str__(self) -> str:
        return f"∃{self.attr}.{self.datatype}"


@dataclass(frozen=True)
class AtMostOneAttr:
    attr: str

    def __str__(self) -> str:
        return f"≤1 {self.attr}"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self) -> str:
        return " ⊓ ".join(f"({a})" if isinstance(a, Or) else str(a) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self) -> str:
        return " ⊔ ".join(f"({a})" if isinstance(a, And) else str(a) for a in self.args)


@dataclass(frozen=True)
class AllRel:
    rel: "RelExpr"
    filler: "Concept"

    def __str__(self) -> str:
        return f"∀{self.rel}.{self.filler}"


@dataclass(frozen=True)
class SomeRel:
    rel: "RelExpr"
    filler: "Concept"

    def __str__(self) -> str:
        if isinstance(self.filler, Top):
            return f"∃{self.rel}"
        return f"∃{self.rel}.{self.filler}"


@dataclass(frozen=True)
class Min:
    k: int
    rel: "RelExpr"

    def __str__(self) -> str:
        return f"≥{self.k} {self.rel}"


@dataclass(frozen=True)
class Max:
    k: int
    rel: "RelExpr"

    def __str__(self) -> str:
        return f"≤{self.k} {self.rel}"


@dataclass(frozen=True)
class AttrMin:
    k: int
    attr: str
    datatype: str

    def __str__(self) -> str:
        return f"≥{self.k} {self.attr}.{self.datatype}"


@dataclass(frozen=True)
class AttrMax:
    k: int
    attr: str
    datatype: str

    def __str__(self) -> str:
        return f"≤{self.k} {self.attr}.{self.datatype}"


Concept = Union[Top, AtomicConcept, MinPlace, MaxPlace, AllAttr, SomeAttr, AtMostOneAttr,
                And, Or, AllRel, SomeRel, Min, Max, AttrMin, AttrMax]


# -- relations ---------------------------------------------------------------


@dataclass(frozen=True)
class TopRel:
    arity: int = 2

    def __str__(self) -> str:
        return f"⊤{self.arity}"


@dataclass(frozen=True)
class Rel:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Inverse:
    name: str

    def __str__(self) -> str:
        return f"{self.name}⁻"


@dataclass(frozen=True)
class Selection:
    """``(i:C)``: pairs of ``⊤₂`` whose ``i``-th component is in ``C``."""

    place: str
    concept: Concept

    def __str__(self) -> str:
        return f"({self.place}:{self.concept})"


@dataclass(frozen=True)
class Complement:
    rel: "RelExpr"

    def __str__(self) -> str:
        return f"¬{self.rel}"


RelExpr = Union[TopRel, Rel, Inverse, Selection, Complement]


# -- axioms ------------------------------------------------------------------


@dataclass(frozen=True)
class ConceptInc:
    sub: Concept
    sup: Concept

    def __str__(self) -> str:
        return f"{self.sub} ⊑ {self.sup}"


@dataclass(frozen=True)
class RelInc:
    sub: RelExpr
    sup: RelExpr

    def __str__(self) -> str:
        return f"{self.sub} ⊑ {self.sup}"


@dataclass(frozen=True)
class IdAttr:
    concept: Concept
    attr: str

    def __str__(self) -> str:
        return f"id {self.concept} {self.attr}"


@dataclass(frozen=True)
class IdRoles:
    concept: Concept
    rels: tuple

    def __str__(self) -> str:
        return f"id {self.concept} " + " ".join(str(r) for r in self.rels)


@dataclass(frozen=True)
class Fd:
    relation: str
    determinants: tuple
    dependent: str

    def __str__(self) -> str:
        return f"fd {self.relation} {','.join(self.determinants)} → {self.dependent}"


Axiom = Union[ConceptInc, RelInc, IdAttr, IdRoles, Fd]
AXIOM_ORDER = {ConceptInc: 0, RelInc: 1, IdAttr: 2, IdRoles: 3, Fd: 4}


# -- side conditions carried as vocabulary metadata --------------------------


@dataclass(frozen=True)
class InverseOf:
    """``second`` is interpreted as the inverse of ``first``."""

    first: str
    second: str


@dataclass(frozen=True)
class DisjointConcepts:
    first: str
    second: str


@dataclass(frozen=True)
class Signature:
    """Typing of an atomic ternary: place ``i`` is played by ``players[i]``."""

    relation: str
    players: tuple


@dataclass(frozen=True)
class ValueSet:
    datatype: str
    values: tuple


SideCondition = Union[InverseOf, DisjointConcepts, Signature, ValueSet]


# -- helpers -----------------------------------------------------------------


def conj(*parts: Concept) -> Concept:
    """Flattened conjunction; a single part is returned unchanged."""
    flat: list = []
    for p in parts:
        flat.extend(p.args if isinstance(p, And) else (p,))
    if not flat:
        return Top()
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Concept) -> Concept:
    flat: list = []
    for p in parts:
        flat.extend(p.args if isinstance(p, Or) else (p,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def conjuncts(c: Concept) -> tuple:
    return c.args if isinstance(c, And) else (c,)


def atom(name: str) -> AtomicConcept:
    return AtomicConcept(name)


def children(node) -> Iterator[tuple[str, object]]:
    """Direct sub-expressions of ``node`` with their field paths."""
    for f in dataclasses.fields(node):
        v = getattr(node, f.name)
        if dataclasses.is_dataclass(v):
            yield f.name, v
        elif isinstance(v, tuple):
            for i, x in enumerate(v):
                if dataclasses.is_dataclass(x):
                    yield f"{f.name}[{i}]", x


def walk(node, path: str = "") -> Iterator[tuple[str, object]]:
    yield path, node
    for name, child in children(node):
        yield from walk(child, f"{path}.{name}" if path else name)


# Fields holding vocabulary symbols, keyed by field name.
_SYMBOL_FIELDS = {"name", "attr", "datatype", "relation", "first", "second"}


def map_symbols(node, f: Callable[[str], str]):
    """Rebuild ``node`` with every vocabulary symbol passed through ``f``."""
    changes = {}
    for fl in dataclasses.fields(node):
        v = getattr(node, fl.name)
        if isinstance(v, str) and fl.name in _SYMBOL_FIELDS:
            changes[fl.name] = f(v)
        elif dataclasses.is_dataclass(v):
            changes[fl.name] = map_symbols(v, f)
        elif isinstance(v, tuple) and fl.name == "players":
            changes[fl.name] = tuple(f(x) for x in v)
        elif isinstance(v, tuple):
            changes[fl.name] = tuple(map_symbols(x, f) if dataclasses.is_dataclass(x) else x
                                     for x in v)
    return dataclasses.replace(node, **changes) if changes else node


def symbols(node) -> set[str]:
    out: set[str] = set()

    def grab(s: str) -> str:
        out.add(s)
        return s

    map_symbols(node, grab)
    return out


# -- vocabulary and knowledge base -------------------------------------------


class VocabularyError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    concepts: frozenset = frozenset()
    relations: dict = field(default_factory=dict)  # name -> tuple of place labels
    attributes: frozenset = frozenset()
    datatypes: frozenset = frozenset()
    generated: frozenset = frozenset()
    conditions: tuple = ()

    def arity(self, rel: str) -> int:
        return len(self.relations[rel])

    @property
    def places(self) -> frozenset:
        out = {FROM, TO}
        for ps in self.relations.values():
            out.update(ps)
        return frozenset(out)

    @property
    def names(self) -> frozenset:
        return self.concepts | set(self.relations) | self.attributes | self.datatypes

    def kind_of(self, name: str) -> Optional[str]:
        if name in self.concepts:
            return "concept"
        if name in self.relations:
            return "relation"
        if name in self.attributes:
            return "attribute"
        if name in self.datatypes:
            return "datatype"
        return None

    def inverse_partners(self) -> dict[str, str]:
        out = {}
        for c in self.conditions:
            if isinstance(c, InverseOf):
                out[c.first] = c.second
                out[c.second] = c.first
        return out

    def check(self) -> None:
        """Raise :class:`VocabularyError` if the symbol sets overlap or arities are bad."""
        sets = [("concept", self.concepts), ("relation", set(self.relations)),
                ("attribute", self.attributes), ("datatype", self.datatypes)]
        for i, (ka, a) in enumerate(sets):
            for kb_, b in sets[i + 1:]:
                both = set(a) & set(b)
                if both:
                    raise VocabularyError(f"{sorted(both)} declared as both {ka} and {kb_}")
        for r, ps in self.relations.items():
            if len(ps) not in (2, 3):
                raise VocabularyError(f"relation {r} has arity {len(ps)}")
            if len(set(ps)) != len(ps):
                raise VocabularyError(f"relation {r} repeats a place label")
        for s in self.generated:
            if s not in self.names:
                raise VocabularyError(f"generated symbol {s} is not declared")


@dataclass(frozen=True)
class KnowledgeBase:
    profile: Profile
    vocabulary: Vocabulary = field(default_factory=Vocabulary)
    axioms: tuple = ()
    provenance: dict = field(default_factory=dict, compare=False)

    def canonical(self) -> "KnowledgeBase":
        """Same kb with axioms and side conditions deduplicated in canonical order."""
        from .kbtext import _condition_text, axiom_text

        ordered = sorted(set(self.axioms), key=lambda a: (AXIOM_ORDER[type(a)], axiom_text(a)))
        conditions = tuple(sorted(set(self.vocabulary.conditions), key=_condition_text))
        voc = dataclasses.replace(self.vocabulary, conditions=conditions)
        return dataclasses.replace(self, vocabulary=voc, axioms=tuple(ordered))

    def check_symbols(self) -> None:
        """Raise :class:`VocabularyError` on any undeclared or mis-sorted symbol."""
        v = self.vocabulary
        v.check()
        for i, ax in enumerate(self.axioms):
            for path, node in walk(ax):
                _check_node(v, node, f"axioms[{i}]{'.' + path if path else ''}")
        for c in v.conditions:
            _check_node(v, c, "conditions")


def _check_node(v: Vocabulary, node, path: str) -> None:
    def need(name: str, kind: str) -> None:
        if v.kind_of(name) != kind:
            raise VocabularyError(f"{path}: {name!r} is not a declared {kind}")

    if isinstance(node, AtomicConcept):
        need(node.name, "concept")
    elif isinstance(node, (Rel, Inverse)):
        need(node.name, "relation")
    elif isinstance(node, (AllAttr, SomeAttr, AttrMin, AttrMax)):
        need(node.attr, "attribute")
        need(node.datatype, "datatype")
    elif isinstance(node, (AtMostOneAttr, IdAttr)):
        need(node.attr, "attribute")
    elif isinstance(node, Fd):
        need(node.relation, "relation")
    elif isinstance(node, InverseOf):
        need(node.first, "relation")
        need(node.second, "relation")
    elif isinstance(node, DisjointConcepts):
        need(node.first, "concept")
        need(node.second, "concept")
    elif isinstance(node, Signature):
        need(node.relation, "relation")
        for p in node.players:
            need(p, "concept")
    elif isinstance(node, ValueSet):
        need(node.datatype, "datatype")


# -- profile grammars --------------------------------------------------------

_CORE_CONCEPTS = {Top, AtomicConcept, AllAttr, SomeAttr, AtMostOneAttr, And}
_STD_CONCEPTS = _CORE_CONCEPTS | {AllRel, SomeRel, Min, Max}

GRAMMAR: dict[Profile, dict[str, set]] = {
    Profile.DCP: {
        "concept": _CORE_CONCEPTS | {MinPlace, MaxPlace},
        "relation": {TopRel, Rel, Selection},
        "axiom": {ConceptInc, IdAttr},
    },
    Profile.DCS: {
        "concept": _STD_CONCEPTS,
        "relation": {TopRel, Rel, Inverse},
        "axiom": {ConceptInc, IdAttr},
    },
    Profile.DCUML: {
        "concept": _STD_CONCEPTS | {AttrMin, AttrMax},
        "relation": {TopRel, Rel, Inverse},
        "axiom": {ConceptInc, RelInc, IdAttr},
    },
    Profile.DCEER: {
        "concept": _STD_CONCEPTS | {AttrMin, AttrMax},
        "relation": {TopRel, Rel, Inverse},
        # IdRoles carries the identifier of a reified n-ary.
        "axiom": {ConceptInc, IdAttr, Fd, IdRoles},
    },
    Profile.DCORM: {
        "concept": _STD_CONCEPTS | {Or},
        "relation": {TopRel, Rel, Inverse, Complement},
        "axiom": {ConceptInc, RelInc, IdAttr, IdRoles},
    },
}

_CONCEPT_TYPES = {Top, AtomicConcept, MinPlace, MaxPlace, AllAttr, SomeAttr, AtMostOneAttr,
                  And, Or, AllRel, SomeRel, Min, Max, AttrMin, AttrMax}
_RELATION_TYPES = {TopRel, Rel, Inverse, Selection, Complement}


@dataclass(frozen=True)
class Finding:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass
class MembershipReport:
    profile: Profile
    violations: list = field(default_factory=list)
    lint: list = field(default_factory=list)

    @property
    def member(self) -> bool:
        return not self.violations

    @property
    def encoder_producible(self) -> bool:
        return self.member and not self.lint


def check_profile(kb: KnowledgeBase, profile: Optional[Profile] = None) -> MembershipReport:
    """Report every construct of ``kb`` outside the grammar of ``profile``.

    Violations decide membership. The separate ``lint`` list flags axioms
    that are grammatical but could not come out of any encoder (for example
    ``A ⊑ ∃a.T ⊓ ≤1 a ⊓ ∀a.T``).
    """
    profile = Profile(profile or kb.profile)
    kb.check_symbols()
    voc = kb.vocabulary
    g = GRAMMAR[profile]
    rep = MembershipReport(profile)

    def bad(path: str, msg: str) -> None:
        rep.violations.append(Finding(path, msg))

    ternary_ok = profile is Profile.DCEER
    for r, ps in voc.relations.items():
        if len(ps) == 3 and not ternary_ok:
            bad(f"vocabulary.relations.{r}", f"ternary relation not in {profile.value}")
    for c in voc.conditions:
        if isinstance(c, InverseOf) and profile is Profile.DCP:
            bad("vocabulary.conditions", "inverse declarations are not in dcp")
        if isinstance(c, Signature) and not ternary_ok:
            bad("vocabulary.conditions", f"ternary signature not in {profile.value}")

    def rel_places(rel) -> Optional[tuple]:
        if isinstance(rel, Rel):
            return voc.relations[rel.name]
        if isinstance(rel, TopRel):
            return tuple(str(i) for i in range(1, rel.arity + 1))
        if isinstance(rel, (Selection, Inverse)):
            return ("1", "2")
        if isinstance(rel, Complement):
            return rel_places(rel.rel)
        return None

    def need_binary(rel, path: str) -> None:
        ps = rel_places(rel)
        if ps is not None and len(ps) != 2:
            bad(path, f"{rel} is not binary")

    for i, ax in enumerate(kb.axioms):
        base = f"axioms[{i}]"
        if type(ax) not in g["axiom"]:
            bad(base, f"{type(ax).__name__} axiom not in {profile.value}")
        for sub, node in walk(ax):
            path = f"{base}.{sub}" if sub else base
            t = type(node)
            if t in _CONCEPT_TYPES and t not in g["concept"]:
                bad(path, f"concept constructor {t.__name__} not in {profile.value}")
            elif t in _RELATION_TYPES and t not in g["relation"]:
                bad(path, f"relation constructor {t.__name__} not in {profile.value}")
            if isinstance(node, (Min, MinPlace, AttrMin)) and node.k < 1:
                bad(path, "minimum cardinality must be positive")
            if isinstance(node, (Max, MaxPlace, AttrMax)) and node.k < 0:
                bad(path, "negative cardinality")
            if isinstance(node, (MinPlace, MaxPlace)):
                need_binary(node.rel, path)
                ps = rel_places(node.rel)
                if ps is not None and node.place not in ps:
                    bad(path, f"place {node.place!r} not a place of {node.rel}")
            if isinstance(node, (Min, Max, AllRel, SomeRel)):
                need_binary(node.rel, path)
            if isinstance(node, (AllRel, SomeRel)) and not isinstance(node.filler, (Top, AtomicConcept)):
                bad(path, "filler must be atomic")
            if isinstance(node, Inverse) and voc.arity(node.name) != 2:
                bad(path, "inverse of a non-binary relation")
            if isinstance(node, Selection) and node.place not in ("1", "2"):
                bad(path, "selection place must be 1 or 2")
            if isinstance(node, TopRel) and (node.arity not in (2, 3) or
                                             (node.arity == 3 and not ternary_ok)):
                bad(path, f"⊤{node.arity} not in {profile.value}")
            if isinstance(node, RelInc):
                need_binary(node.sub, path + ".sub")
                need_binary(node.sup, path + ".sup")
            if isinstance(node, IdRoles):
                for j, r in enumerate(node.rels):
                    need_binary(r, f"{path}.rels[{j}]")
            if isinstance(node, Fd):
                ps = voc.relations[node.relation]
                used = (*node.determinants, node.dependent)
                if len(ps) != 3:
                    bad(path, "fd needs a ternary relation")
                if len(set(used)) != 3 or any(p not in ps for p in used):
                    bad(path, "fd places must be three different places of the relation")
    if rep.member:
        rep.lint.extend(_shape_lint(kb, profile))
    return rep


# -- encoder-shape lint ------------------------------------------------------


def _is_atomic(c) -> bool:
    return isinstance(c, AtomicConcept)


def _lifted(r) -> bool:
    return isinstance(r, (Rel, Inverse))


def _card_key(c):
    """(kind, relation-key) for a number restriction usable in a cardinality axiom."""
    if isinstance(c, (MinPlace, MaxPlace)) and isinstance(c.rel, Rel):
        return (type(c).__name__[:3], (c.rel, c.place))
    if isinstance(c, (Min, Max)) and _lifted(c.rel):
        return (type(c).__name__[:3], c.rel)
    if isinstance(c, (AttrMin, AttrMax)):
        return (type(c).__name__[4:], (c.attr, c.datatype))
    return None


def _card_shape(parts: tuple) -> Optional[tuple]:
    """Return the shared key if ``parts`` is [Max], [Min] or [Max, Min] on one target."""
    keys = [_card_key(p) for p in parts]
    if None in keys or not 1 <= len(keys) <= 2:
        return None
    kinds = [k[0] for k in keys]
    if kinds not in (["Max"], ["Min"], ["Max", "Min"]):
        return None
    if len({k[1] for k in keys}) != 1:
        return None
    return keys[0][1]


def _shape_lint(kb: KnowledgeBase, profile: Profile) -> list:
    out = []
    max_seen: dict = {}
    min_seen: dict = {}
    positional = profile is Profile.DCP
    for i, ax in enumerate(kb.axioms):
        ok = False
        if isinstance(ax, ConceptInc):
            sub, sup = ax.sub, ax.sup
            parts = conjuncts(sup)
            if _is_atomic(sub):
                if _is_atomic(sup) or isinstance(sup, Top):
                    ok = True
                elif (len(parts) == 2 and isinstance(parts[0], (SomeAttr, AllAttr))
                      and isinstance(parts[1], AtMostOneAttr) and parts[0].attr == parts[1].attr):
                    # SomeAttr: attribute; AllAttr: boolean attribute of a unary role
                    ok = isinstance(parts[0], SomeAttr) or profile is Profile.DCORM
                elif (key := _card_shape(parts)) is not None:
                    attr_card = isinstance(parts[0], (AttrMin, AttrMax))
                    ok = not attr_card or profile in (Profile.DCUML, Profile.DCEER)
                    if ok and not attr_card:
                        for p in parts:
                            seen = max_seen if isinstance(p, (Max, MaxPlace)) else min_seen
                            seen.setdefault((sub, key), {}).setdefault(p.k, []).append(i)
                elif (len(parts) == 1 and isinstance(sup, AllAttr)
                      and profile in (Profile.DCUML, Profile.DCEER)):
                    ok = True
                elif not positional and (isinstance(sup, SomeRel) and isinstance(sup.filler, Top)
                                         and _lifted(sup.rel)):
                    ok = profile in (Profile.DCEER, Profile.DCORM, Profile.DCS, Profile.DCUML)
                elif profile is Profile.DCORM and isinstance(sup, Or) and all(
                        isinstance(d, SomeRel) and isinstance(d.filler, Top) for d in sup.args):
                    ok = True
            elif positional:
                ok = (isinstance(sub, MinPlace) and sub.k == 1 and isinstance(sub.rel, Rel)
                      and _is_atomic(sup))
            else:
                ok = (isinstance(sub, SomeRel) and isinstance(sub.filler, Top)
                      and _lifted(sub.rel) and _is_atomic(sup))
        elif isinstance(ax, IdAttr):
            ok = _is_atomic(ax.concept)
        elif isinstance(ax, IdRoles):
            ok = _is_atomic(ax.concept) and all(_lifted(r) for r in ax.rels)
        elif isinstance(ax, Fd):
            ok = True
        elif isinstance(ax, RelInc):
            sup = ax.sup.rel if isinstance(ax.sup, Complement) and profile is Profile.DCORM else ax.sup
            ok = _lifted(ax.sub) and _lifted(sup)
        if not ok:
            out.append(Finding(f"axioms[{i}]", f"not encoder-producible: {ax}"))
    for what, seen in (("maximum", max_seen), ("minimum", min_seen)):
        for key, by_k in sorted(seen.items(), key=str):
            if len(by_k) > 1:
                idx = sorted(i for ids in by_k.values() for i in ids)
                out.append(Finding(f"axioms{idx}", f"several {what} cardinalities on one participation"))
    return out
