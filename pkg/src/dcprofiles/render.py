"""From a standard-view (DCs) knowledge base back to a conceptual model.

Each declared inverse pair becomes one binary relationship whose first
place is the domain of the typed relation of the pair. How the two
relation names surface depends on the family:

* UML: as association-end names, each on the end the relation points to;
* EER: the typed relation names the relationship, the other becomes a role name;
* ORM: as fact-type readings, one per direction.

Generated relation names never become user-visible labels, so that
encoding the rendered model yields the same kb up to generated names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .dl import (
    AtMostOneAttr, AtomicConcept, ConceptInc, IdAttr, Inverse, InverseOf, KnowledgeBase, Max,
    Min, Profile, Rel, RelInc, SomeAttr, SomeRel, Top, conjuncts, symbols,
)
from .model import (
    ANY_TYPE, Attribute, Cardinality, ConceptualModel, DataType, Family, InternalUniqueness,
    Mandatory, ObjectType, Relationship, Role, SingleIdentification, Subsumption, ValueType,
    slug, validate_model,
)

ELLIPSIS = "…"


class RenderError(ValueError):
    def __init__(self, message: str, axiom=None):
        self.axiom = axiom
        super().__init__(message if axiom is None else f"{message}: {axiom}")


# -- readings ----------------------------------------------------------------


def _words(name: str) -> str:
    return " ".join(w for w in name.split("_") if w)


def _inverse_words(name: str) -> Optional[str]:
    """Inverse verb phrase by a small rule table, or ``None``."""
    parts = [w for w in name.split("_") if w]
    if len(parts) >= 2 and parts[0] == "has":
        return " ".join(parts[1:]) + " of"
    if len(parts) >= 3 and parts[0] == "is" and parts[-1] == "of":
        return "has " + " ".join(parts[1:-1])
    if len(parts) >= 2 and parts[-1] == "of":
        return "has " + " ".join(parts[:-1])
    if len(parts) >= 3 and parts[0] == "is" and parts[-1] == "by":
        return " ".join(parts[1:-1])
    return None


def generate_readings(name: str, inverse: Optional[str] = None) -> tuple[str, str]:
    """Forward and inverse fact-type readings for the relation ``name``.

    A user-given ``inverse`` name is read as is. Otherwise the inverse
    phrase comes from the rule table (``has_X``/``X_of``, ``is_X_of``/``has_X``,
    ``is_X_by``/``X``) and falls back to ``is NAME of``.
    """
    if not name:
        raise ValueError("relation name must not be empty")
    forward = f"{ELLIPSIS} {_words(name)} {ELLIPSIS}"
    if inverse:
        back = _words(inverse)
    else:
        back = _inverse_words(name) or f"is {name} of"
    return forward, f"{ELLIPSIS} {back} {ELLIPSIS}"


def _reading(name: str) -> Optional[str]:
    """A reading that slugs back to ``name``, if there is one."""
    text = f"{ELLIPSIS} {_words(name)} {ELLIPSIS}"
    return text if slug(text) == name else None


# -- kb analysis -------------------------------------------------------------


@dataclass(eq=False)
class _Pair:
    primary: str
    other: str
    domain: Optional[str] = None
    range: Optional[str] = None
    generated_primary: bool = False
    generated_other: bool = False


def _direction(pairs: dict, r) -> tuple[_Pair, str]:
    """The pair of relation expression ``r`` and the place it leaves."""
    if isinstance(r, (Rel, Inverse)) and r.name in pairs:
        pair = pairs[r.name]
        leaves_first = (r.name == pair.primary) == isinstance(r, Rel)
        return pair, "1" if leaves_first else "2"
    raise RenderError("relation expression without a declared inverse partner", r)


def render_model(kb: KnowledgeBase, family, verbalize: bool = False) -> ConceptualModel:
    """Rebuild a conceptual model of ``family`` from a standard-view kb.

    With ``verbalize`` an ORM fact type whose inverse relation name was
    generated gets an invented inverse reading from :func:`generate_readings`;
    the reading then names a user relation on re-encoding.
    """
    family = Family(family)
    if Profile(kb.profile) not in (Profile.DCS, Profile.DCUML):
        raise RenderError(f"expected a dcs knowledge base, got {Profile(kb.profile).value}")
    voc = kb.vocabulary
    gen = voc.generated

    pairs: dict[str, _Pair] = {}
    for c in voc.conditions:
        if isinstance(c, InverseOf):
            p = _Pair(c.first, c.second, generated_primary=c.first in gen,
                      generated_other=c.second in gen)
            pairs[c.first] = pairs[c.second] = p
        else:
            raise RenderError("side condition outside dcs", c)
    for r in sorted(voc.relations):
        if r not in pairs:
            user = next((ax for ax in kb.canonical().axioms if r in symbols(ax)), None)
            raise RenderError(f"relation {r} has no declared inverse partner", user)

    rest = []
    for ax in kb.canonical().axioms:
        if (isinstance(ax, ConceptInc) and isinstance(ax.sub, SomeRel)
                and isinstance(ax.sub.filler, Top) and isinstance(ax.sup, AtomicConcept)):
            pair, leaves = _direction(pairs, ax.sub.rel)
            slot = "domain" if leaves == "1" else "range"
            have = getattr(pair, slot)
            if have is not None and have != ax.sup.name:
                raise RenderError("conflicting typing", ax)
            setattr(pair, slot, ax.sup.name)
        elif isinstance(ax, RelInc) and _is_inverse_link(pairs, ax):
            continue
        else:
            rest.append(ax)

    unique_pairs = sorted({id(p): p for p in pairs.values()}.values(), key=lambda p: p.primary)
    for p in unique_pairs:
        if p.domain is None or p.range is None:
            raise RenderError(f"relation {p.primary} is not typed on both ends")
        if p.generated_primary and not p.generated_other and p.domain != p.range:
            # keep a user name in the first direction; a recursive pair keeps
            # its orientation and carries the user name as the first end
            p.primary, p.other = p.other, p.primary
            p.domain, p.range = p.range, p.domain
            p.generated_primary, p.generated_other = False, True

    relationships: list[Relationship] = []
    ref_of: dict[int, str] = {}
    refs: set = set()
    for p in unique_pairs:
        rel = _relationship(p, family, verbalize, refs)
        relationships.append(rel)
        ref_of[id(p)] = rel.ref
        refs.add(rel.ref)

    attributes: list[Attribute] = []
    subsumptions: list[Subsumption] = []
    constraints: list = []
    for ax in rest:
        if isinstance(ax, IdAttr) and isinstance(ax.concept, AtomicConcept):
            constraints.append(SingleIdentification(ax.concept.name, ax.attr))
            continue
        if not (isinstance(ax, ConceptInc) and isinstance(ax.sub, AtomicConcept)):
            raise RenderError("axiom has no counterpart in a conceptual model", ax)
        owner = ax.sub.name
        parts = conjuncts(ax.sup)
        if isinstance(ax.sup, AtomicConcept):
            subsumptions.append(Subsumption(owner, ax.sup.name))
        elif (len(parts) == 2 and isinstance(parts[0], SomeAttr)
              and isinstance(parts[1], AtMostOneAttr) and parts[0].attr == parts[1].attr):
            dt = parts[0].datatype
            if dt == ANY_TYPE and family is Family.EER:
                dt = None
            attributes.append(Attribute(owner, parts[0].attr, dt))
        elif parts and all(isinstance(x, (Min, Max)) for x in parts) and len(parts) <= 2:
            constraints.append(_cardinality(pairs, ref_of, owner, parts, ax))
        else:
            raise RenderError("axiom has no counterpart in a conceptual model", ax)

    used_any = any(a.datatype is None for a in attributes)
    data_types = [DataType(d) for d in sorted(voc.datatypes) if not (d == ANY_TYPE and used_any)]
    model = ConceptualModel(
        family=family,
        object_types=tuple(ObjectType(c) for c in sorted(voc.concepts)),
        data_types=tuple(data_types),
        relationships=tuple(relationships),
        attributes=tuple(attributes),
        subsumptions=tuple(subsumptions),
        constraints=tuple(constraints),
    )
    if family is Family.ORM and model.attributes:
        model = _attributes_to_value_types(model)
    problems = validate_model(model)
    if problems:
        raise RenderError("rendered model is invalid: " + "; ".join(map(str, problems)))
    return model


def _is_inverse_link(pairs: dict, ax: RelInc) -> bool:
    a, b = ax.sub, ax.sup
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Rel) and isinstance(y, Inverse) and x.name in pairs:
            p = pairs[x.name]
            if {x.name, y.name} == {p.primary, p.other}:
                return True
    return False


def _fresh_ref(base: str, refs: set) -> str:
    name, n = base, 2
    while name in refs:
        name, n = f"{base}_{n}", n + 1
    return name


def _relationship(p: _Pair, family: Family, verbalize: bool, refs: set) -> Relationship:
    f, s = p.primary, p.other
    recursive = p.domain == p.range
    if p.generated_primary and not p.generated_other:
        base = re.sub(r"_inv(_\d+)?$", "", f) or f
        return Relationship(_fresh_ref(base + "_rel", refs),
                            (Role("1", p.domain, s), Role("2", p.range)))
    if p.generated_primary:
        # both directions generated: only a recursive relationship with
        # unlabelled places regenerates two names
        if not recursive:
            raise RenderError(f"relations {f} and {s} are both generated but not recursive")
        base = re.sub(r"_e1(_\d+)?$", "", f) or f
        return Relationship(_fresh_ref(base, refs), (Role("1", p.domain), Role("2", p.range)))

    if family is Family.ORM:
        rf = _reading(f)
        rs = None if p.generated_other else _reading(s)
        if rf is not None and (p.generated_other or rs is not None):
            readings = [rf]
            if rs is not None:
                readings.append(rs)
            elif verbalize:
                readings.append(generate_readings(f)[1])
            return Relationship(None, (Role("1", p.domain), Role("2", p.range)), tuple(readings))
        # names that do not survive reading normalisation travel as role names

    end1 = None if p.generated_other else s
    roles = (Role("1", p.domain, end1), Role("2", p.range, f))
    if family is Family.UML and end1 is not None:
        name = None
        if "_".join((end1, f)) in refs:
            name = _fresh_ref(f, refs)
        return Relationship(name, roles)
    if family is Family.EER and end1 is None and not recursive:
        roles = (Role("1", p.domain), Role("2", p.range))
    return Relationship(_fresh_ref(f, refs), roles)


def _cardinality(pairs: dict, ref_of: dict, owner: str, parts: tuple, ax):
    keys = {_direction(pairs, x.rel) for x in parts}
    if len(keys) != 1:
        raise RenderError("number restrictions on different relations in one axiom", ax)
    pair, place = next(iter(keys))
    ref = ref_of[id(pair)]
    role_player = pair.domain if place == "1" else pair.range
    player = None if owner == role_player else owner
    lo = next((x.k for x in parts if isinstance(x, Min)), 0)
    hi = next((x.k for x in parts if isinstance(x, Max)), None)
    if sum(isinstance(x, Min) for x in parts) > 1 or sum(isinstance(x, Max) for x in parts) > 1:
        raise RenderError("repeated number restriction", ax)
    if lo == 1 and hi is None:
        return Mandatory(ref, place, player)
    return Cardinality(ref, place, lo, hi, player)


def _attributes_to_value_types(model: ConceptualModel) -> ConceptualModel:
    """Replace attributes by value types reached through binary fact types."""
    dts_of: dict[str, set] = {}
    for a in model.attributes:
        dts_of.setdefault(a.name, set()).add(a.datatype or ANY_TYPE)
    taken = {o.name for o in model.object_types} | {d.name for d in model.data_types}
    taken |= {r.ref for r in model.relationships}
    vt_name: dict[tuple, str] = {}
    value_types = []
    for a in model.attributes:
        dt = a.datatype or ANY_TYPE
        key = (a.name, dt)
        if key in vt_name:
            continue
        base = a.name if len(dts_of[a.name]) == 1 else f"{a.name}_{dt}"
        name = _fresh_ref(base[:1].upper() + base[1:], taken)
        taken.add(name)
        vt_name[key] = name
        value_types.append(ValueType(name, dt))
    bridges = []
    bridge_of = {}
    for a in model.attributes:
        ref = _fresh_ref(f"{a.owner}_has_{a.name}", taken)
        taken.add(ref)
        bridge_of[(a.owner, a.name)] = ref
        bridges.append(Relationship(ref, (Role("1", a.owner), Role("2", vt_name[(a.name, a.datatype or ANY_TYPE)], a.name)),
                                    ("has",)))
    constraints = []
    for c in model.constraints:
        if isinstance(c, SingleIdentification):
            constraints.append(InternalUniqueness(bridge_of[(c.object_type, c.attribute)], ("2",)))
        else:
            constraints.append(c)
    dts = [d for d in model.data_types]
    names = {d.name for d in dts}
    for v in value_types:
        if v.datatype not in names:
            dts.append(DataType(v.datatype))
            names.add(v.datatype)
    return ConceptualModel(
        family=model.family,
        object_types=model.object_types,
        data_types=tuple(dts),
        value_types=tuple(value_types),
        relationships=model.relationships + tuple(bridges),
        attributes=(),
        subsumptions=model.subsumptions,
        constraints=tuple(constraints),
    )


# -- textual diagram source --------------------------------------------------


def _mult(lo: int, hi: Optional[int]) -> str:
    return f"{lo}..{'*' if hi is None else hi}"


def _place_cards(model: ConceptualModel, rel: Relationship) -> dict[str, tuple]:
    """Participation ``(min, max)`` per place, from constraints on the role player itself."""
    out = {r.place: (0, None) for r in rel.roles}
    for c in model.constraints:
        if getattr(c, "relationship", None) != rel.ref or getattr(c, "player", None) is not None:
            continue
        if isinstance(c, Cardinality):
            out[c.place] = (c.min, c.max)
        elif isinstance(c, Mandatory):
            lo, hi = out[c.place]
            out[c.place] = (max(lo, 1), hi)
    return out


def _fill(reading: str, players: list[str]) -> str:
    parts = [x.strip() for x in reading.split(ELLIPSIS)]
    words = [x for x in parts if x]
    text = players[0]
    for w, p in zip(words, players[1:]):
        text += f" {w} {p}"
    return text


def _constraint_line(c) -> str:
    fields = []
    for k, v in vars(c).items():
        if v is None:
            continue
        if isinstance(v, tuple):
            v = ",".join(map(str, v))
        fields.append(f"{k}={v}")
    return f"constraint {c.kind} " + " ".join(fields)


def outline(model: ConceptualModel) -> list[str]:
    """One line per model element, in family vocabulary.

    UML multiplicities are shown look-across: the range written next to an
    end is the participation of the player at the *other* end. EER shows
    ``(min,max)`` next to the participating entity type.
    """
    fam = model.family
    kind = {Family.UML: "class", Family.EER: "entity", Family.ORM: "entity type"}[fam]
    lines = [f"{kind} {o.name}" for o in model.object_types]
    lines += [f"datatype {d.name}" for d in model.data_types]
    lines += [f"value type {v.name} ({v.datatype})" for v in model.value_types]
    for a in model.attributes:
        lines.append(f"attribute {a.owner}.{a.name} : {a.datatype or ANY_TYPE}")
    for s in model.subsumptions:
        lines.append(f"isa {s.sub} -> {s.sup}")
    for s in model.rel_subsumptions:
        lines.append(f"relationship isa {s.sub} -> {s.sup}")
    for r in model.relationships:
        players = [x.player for x in r.roles]
        if fam is Family.ORM and r.readings:
            lines.append(f"fact type {r.ref}: " + " / ".join(
                _fill(rd, players if i == 0 else players[::-1]) for i, rd in enumerate(r.readings)))
            continue
        cards = _place_cards(model, r)
        if fam is Family.UML and r.arity == 2:
            a, b = r.roles
            end_a = f"{a.player} {_mult(*cards[b.place])}" + (f" +{a.role_name}" if a.role_name else "")
            end_b = f"{b.player} {_mult(*cards[a.place])}" + (f" +{b.role_name}" if b.role_name else "")
            lines.append(f"association {r.ref}: {end_a} -- {end_b}")
        else:
            ends = ", ".join(
                f"{x.place}:{x.player}" + (f" as {x.role_name}" if x.role_name else "")
                + f" ({cards[x.place][0]},{'n' if cards[x.place][1] is None else cards[x.place][1]})"
                for x in r.roles)
            lines.append(f"relationship {r.ref}({ends})")
    for c in model.constraints:
        lines.append(_constraint_line(c))
    return lines


def render_diagram_source(model: ConceptualModel) -> str:
    """Outline as ``#`` comment lines followed by the model JSON document.

    :func:`read_diagram_source` recovers the model exactly.
    """
    from .io import dumps_model

    head = [f"# {model.family.value} model"] + [f"# {x}" for x in outline(model)]
    return "\n".join(head) + "\n" + dumps_model(model)


def read_diagram_source(text: str) -> ConceptualModel:
    from .io import loads_model

    body = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
    return loads_model(body)
