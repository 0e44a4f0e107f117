"""Finite two-sorted interpretations and satisfaction of profile axioms.

Symbols missing from an interpretation denote the empty set. Relations
store tuples in the order of their place labels, which are kept per
relation so that place-indexed constructors look components up by label.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional

from .dl import (
    AllAttr, AllRel, And, AtMostOneAttr, AtomicConcept, AttrMax, AttrMin, Complement,
    ConceptInc, DisjointConcepts, Fd, IdAttr, IdRoles, Inverse, InverseOf, KnowledgeBase,
    Max, MaxPlace, Min, MinPlace, Or, Rel, RelInc, Selection, Signature, SomeAttr, SomeRel,
    Top, TopRel, ValueSet,
)


class InterpretationError(ValueError):
    pass


def _default_places(n: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(1, n + 1))


@dataclass(frozen=True)
class Interpretation:
    delta_c: frozenset
    delta_t: frozenset = frozenset()
    top_set: Optional[frozenset] = None  # defaults to delta_c
    concepts: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)  # name -> frozenset of tuples
    places: dict = field(default_factory=dict)  # name -> place labels, default "1","2",...
    attrs: dict = field(default_factory=dict)  # name -> frozenset of (object, value)
    datatypes: dict = field(default_factory=dict)

    @property
    def top(self) -> frozenset:
        return self.delta_c if self.top_set is None else self.top_set

    def concept(self, name: str) -> frozenset:
        return self.concepts.get(name, frozenset())

    def relation(self, name: str) -> frozenset:
        return self.relations.get(name, frozenset())

    def attr(self, name: str) -> frozenset:
        return self.attrs.get(name, frozenset())

    def datatype(self, name: str) -> frozenset:
        return self.datatypes.get(name, frozenset())

    def places_of(self, name: str) -> tuple:
        if name in self.places:
            return self.places[name]
        tuples = self.relation(name)
        n = len(next(iter(tuples))) if tuples else 2
        return _default_places(n)

    def check(self) -> None:
        """Raise :class:`InterpretationError` unless the containment conditions hold."""
        top = self.top
        if not top <= self.delta_c:
            raise InterpretationError("top extension is not a subset of the object domain")
        if self.delta_c & self.delta_t:
            raise InterpretationError("object and value domains overlap")
        for n, ext in self.concepts.items():
            if not ext <= top:
                raise InterpretationError(f"{n} is not a subset of the top extension")
        for n, ext in self.relations.items():
            arity = len(self.places_of(n))
            for t in ext:
                if len(t) != arity:
                    raise InterpretationError(f"tuple {t} of {n} has the wrong arity")
                if not set(t) <= top:
                    raise InterpretationError(f"tuple {t} of {n} leaves the top extension")
        for n, ext in self.datatypes.items():
            if not ext <= self.delta_t:
                raise InterpretationError(f"datatype {n} is not a subset of the value domain")
        for n, ext in self.attrs.items():
            for c, v in ext:
                if c not in top or v not in self.delta_t:
                    raise InterpretationError(f"pair {(c, v)} of attribute {n} is ill-sorted")


# -- relation and concept evaluation -----------------------------------------


def _index(interp: Interpretation, rel, place: str) -> int:
    places = _rel_places(interp, rel)
    if place not in places:
        raise InterpretationError(f"place {place!r} is not a place of {rel}")
    return places.index(place)


def _rel_places(interp: Interpretation, rel) -> tuple:
    if isinstance(rel, Rel):
        return interp.places_of(rel.name)
    if isinstance(rel, TopRel):
        return _default_places(rel.arity)
    if isinstance(rel, Complement):
        return _rel_places(interp, rel.rel)
    return ("1", "2")


def eval_relation(interp: Interpretation, rel) -> frozenset:
    top = interp.top
    if isinstance(rel, TopRel):
        return frozenset(product(top, repeat=rel.arity))
    if isinstance(rel, Rel):
        return interp.relation(rel.name)
    if isinstance(rel, Inverse):
        ext = interp.relation(rel.name)
        if any(len(t) != 2 for t in ext):
            raise InterpretationError(f"inverse of non-binary relation {rel.name}")
        return frozenset((b, a) for a, b in ext)
    if isinstance(rel, Selection):
        i = ("1", "2").index(rel.place) if rel.place in ("1", "2") else None
        if i is None:
            raise InterpretationError(f"selection place {rel.place!r} is not 1 or 2")
        c = eval_concept(interp, rel.concept)
        return frozenset(t for t in product(top, repeat=2) if t[i] in c)
    if isinstance(rel, Complement):
        inner = eval_relation(interp, rel.rel)
        arity = len(_rel_places(interp, rel.rel))
        return frozenset(product(top, repeat=arity)) - inner
    raise TypeError(f"not a relation expression: {rel!r}")


def _successors(pairs: Iterable[tuple]) -> dict:
    out: dict = {}
    for a, b in pairs:
        out.setdefault(a, set()).add(b)
    return out


def eval_concept(interp: Interpretation, c) -> frozenset:
    dc = interp.delta_c
    if isinstance(c, Top):
        return interp.top
    if isinstance(c, AtomicConcept):
        return interp.concept(c.name)
    if isinstance(c, And):
        out = dc
        for a in c.args:
            out = out & eval_concept(interp, a)
        return out
    if isinstance(c, Or):
        out = frozenset()
        for a in c.args:
            out = out | eval_concept(interp, a)
        return out
    if isinstance(c, (MinPlace, MaxPlace)):
        ext = eval_relation(interp, c.rel)
        i = _index(interp, c.rel, c.place)
        counts: dict = {}
        for t in ext:
            counts[t[i]] = counts.get(t[i], 0) + 1
        if isinstance(c, MinPlace):
            return frozenset(x for x in dc if counts.get(x, 0) >= c.k)
        return frozenset(x for x in dc if counts.get(x, 0) <= c.k)
    if isinstance(c, (AllRel, SomeRel, Min, Max)):
        ext = eval_relation(interp, c.rel)
        if any(len(t) != 2 for t in ext):
            raise InterpretationError(f"{c.rel} is not binary")
        succ = _successors(ext)
        if isinstance(c, Min):
            return frozenset(x for x in dc if len(succ.get(x, ())) >= c.k)
        if isinstance(c, Max):
            return frozenset(x for x in dc if len(succ.get(x, ())) <= c.k)
        filler = eval_concept(interp, c.filler)
        if isinstance(c, AllRel):
            return frozenset(x for x in dc if succ.get(x, set()) <= filler)
        return frozenset(x for x in dc if succ.get(x, set()) & filler)
    if isinstance(c, (AllAttr, SomeAttr, AtMostOneAttr, AttrMin, AttrMax)):
        vals = _successors(interp.attr(c.attr))
        if isinstance(c, AtMostOneAttr):
            return frozenset(x for x in dc if len(vals.get(x, ())) <= 1)
        t = interp.datatype(c.datatype)
        if isinstance(c, AllAttr):
            return frozenset(x for x in dc if vals.get(x, set()) <= t)
        if isinstance(c, SomeAttr):
            return frozenset(x for x in dc if vals.get(x, set()) & t)
        n = {x: len(vals.get(x, set()) & t) for x in dc}
        if isinstance(c, AttrMin):
            return frozenset(x for x in dc if n[x] >= c.k)
        return frozenset(x for x in dc if n[x] <= c.k)
    raise TypeError(f"not a concept expression: {c!r}")


# -- axioms ------------------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    """A violated axiom or side condition with a witness."""

    statement: object
    witness: object

    def __str__(self) -> str:
        return f"{self.statement}  [witness: {self.witness}]"


def _first(xs):
    return min(xs, key=repr)


def axiom_failure(interp: Interpretation, ax, datatypes: Optional[Iterable[str]] = None):
    """Return a witness of ``ax`` failing in ``interp``, or ``None`` if it holds.

    ``datatypes`` bounds the existential choice of datatype for ``id C a``;
    by default every datatype the interpretation names is tried.
    """
    if isinstance(ax, ConceptInc):
        bad = eval_concept(interp, ax.sub) - eval_concept(interp, ax.sup)
        return _first(bad) if bad else None
    if isinstance(ax, RelInc):
        bad = eval_relation(interp, ax.sub) - eval_relation(interp, ax.sup)
        return _first(bad) if bad else None
    if isinstance(ax, IdAttr):
        members = eval_concept(interp, ax.concept)
        pairs = interp.attr(ax.attr)
        vals = _successors(pairs)
        holders = _successors((v, c) for c, v in pairs)
        names = sorted(interp.datatypes if datatypes is None else datatypes)
        witness = None
        for t_name in names:
            t = interp.datatype(t_name)
            lacking = [c for c in members if not (vals.get(c, set()) & t) or len(vals.get(c, ())) > 1]
            if lacking:
                witness = witness or ("not exactly one value", _first(lacking))
                continue
            shared = [v for v in t if len(holders.get(v, ())) > 1]
            if shared:
                v = _first(shared)
                witness = witness or ("shared value", v, tuple(sorted(holders[v], key=repr)))
                continue
            return None
        return witness or ("no datatype",)
    if isinstance(ax, IdRoles):
        members = eval_concept(interp, ax.concept)
        succs = [_successors(eval_relation(interp, r)) for r in ax.rels]
        keys: dict = {}
        for c in sorted(members, key=repr):
            key = []
            for s in succs:
                ds = s.get(c, set())
                if len(ds) != 1:
                    return ("not exactly one successor", c)
                key.append(next(iter(ds)))
            key = tuple(key)
            if key in keys:
                return ("same successors", keys[key], c)
            keys[key] = c
        return None
    if isinstance(ax, Fd):
        ext = sorted(interp.relation(ax.relation), key=repr)
        places = interp.places_of(ax.relation)
        i1, i2 = (places.index(p) for p in ax.determinants)
        i3 = places.index(ax.dependent)
        seen: dict = {}
        for t in ext:
            k = (t[i1], t[i2])
            if k in seen and seen[k][i3] != t[i3]:
                return (seen[k], t)
            seen.setdefault(k, t)
        return None
    raise TypeError(f"not an axiom: {ax!r}")


def satisfies_axiom(interp: Interpretation, ax, datatypes: Optional[Iterable[str]] = None) -> bool:
    return axiom_failure(interp, ax, datatypes) is None


def condition_failure(interp: Interpretation, c):
    if isinstance(c, InverseOf):
        p = interp.relation(c.first)
        q = interp.relation(c.second)
        inv = frozenset((b, a) for a, b in p)
        bad = q ^ inv
        return _first(bad) if bad else None
    if isinstance(c, DisjointConcepts):
        both = interp.concept(c.first) & interp.concept(c.second)
        return _first(both) if both else None
    if isinstance(c, Signature):
        for t in sorted(interp.relation(c.relation), key=repr):
            for x, player in zip(t, c.players):
                if x not in interp.concept(player):
                    return t
        return None
    if isinstance(c, ValueSet):
        bad = interp.datatype(c.datatype) - set(c.values)
        return _first(bad) if bad else None
    raise TypeError(f"not a side condition: {c!r}")


@dataclass
class ModelCheck:
    ok: bool
    failures: list

    def __bool__(self) -> bool:
        return self.ok


def is_model(interp: Interpretation, kb: KnowledgeBase) -> ModelCheck:
    """Check every axiom and side condition of ``kb``; failures carry witnesses."""
    interp.check()
    for name, places in kb.vocabulary.relations.items():
        if name in interp.places and interp.places[name] != places:
            raise InterpretationError(f"relation {name} has places {interp.places[name]}, "
                                      f"vocabulary says {places}")
    interp = _with_places(interp, kb)
    failures = []
    dts = sorted(kb.vocabulary.datatypes)
    for ax in kb.axioms:
        w = axiom_failure(interp, ax, dts)
        if w is not None:
            failures.append(Failure(ax, w))
    for c in kb.vocabulary.conditions:
        w = condition_failure(interp, c)
        if w is not None:
            failures.append(Failure(c, w))
    return ModelCheck(not failures, failures)


def _with_places(interp: Interpretation, kb: KnowledgeBase) -> Interpretation:
    places = dict(kb.vocabulary.relations)
    places.update(interp.places)
    if places == interp.places:
        return interp
    return Interpretation(interp.delta_c, interp.delta_t, interp.top_set, interp.concepts,
                          interp.relations, places, interp.attrs, interp.datatypes)


# -- text format -------------------------------------------------------------

_LINE = re.compile(r"^(set|rel|attr|dt)\s+(\S+)\s*=\s*\{(.*)\}\s*$")
_TUPLE = re.compile(r"\(([^()]*)\)")


class InterpretationSyntaxError(ValueError):
    pass


def parse_interpretation(text: str) -> Interpretation:
    """Read ``obj``/``val``/``top``/``set``/``rel``/``attr``/``dt`` lines."""
    delta_c: list = []
    delta_t: list = []
    top = None
    concepts, relations, places, attrs, dts = {}, {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if head in ("obj", "val"):
            (delta_c if head == "obj" else delta_t).extend(line.split()[1:])
            continue
        if head == "top":
            m = re.match(r"^top\s*=\s*\{(.*)\}$", line)
            if not m:
                raise InterpretationSyntaxError(f"line {lineno}: bad top line")
            top = frozenset(_items(m.group(1)))
            continue
        m = _LINE.match(line)
        if not m:
            raise InterpretationSyntaxError(f"line {lineno}: cannot read {line!r}")
        kind, name, body = m.groups()
        if kind in ("set", "dt"):
            (concepts if kind == "set" else dts)[name] = frozenset(_items(body))
        elif kind == "attr":
            pairs = []
            for t in _TUPLE.findall(body):
                parts = _items(t)
                if len(parts) != 2:
                    raise InterpretationSyntaxError(f"line {lineno}: attribute pairs have two parts")
                pairs.append(tuple(parts))
            attrs[name] = frozenset(pairs)
        else:
            tuples, labels = [], None
            for t in _TUPLE.findall(body):
                comp = []
                for part in _items(t):
                    if ":" not in part:
                        raise InterpretationSyntaxError(f"line {lineno}: tuple components are place:element")
                    p, x = part.split(":", 1)
                    comp.append((p.strip(), x.strip()))
                ls = tuple(p for p, _ in comp)
                if labels is None:
                    labels = ls
                if set(ls) != set(labels) or len(ls) != len(labels):
                    raise InterpretationSyntaxError(f"line {lineno}: tuples use different places")
                d = dict(comp)
                tuples.append(tuple(d[p] for p in labels))
            relations[name] = frozenset(tuples)
            if labels is not None:
                places[name] = labels
    return Interpretation(frozenset(delta_c), frozenset(delta_t), top, concepts, relations,
                          places, attrs, dts)


def _items(body: str) -> list[str]:
    return [x.strip() for x in body.split(",") if x.strip()]


def format_interpretation(interp: Interpretation) -> str:
    def s(xs):
        return ", ".join(sorted(map(str, xs)))

    lines = [f"obj {' '.join(sorted(map(str, interp.delta_c)))}".rstrip()]
    if interp.delta_t:
        lines.append(f"val {' '.join(sorted(map(str, interp.delta_t)))}")
    if interp.top_set is not None and interp.top_set != interp.delta_c:
        lines.append(f"top = {{{s(interp.top_set)}}}")
    for n in sorted(interp.concepts):
        lines.append(f"set {n} = {{{s(interp.concepts[n])}}}")
    for n in sorted(interp.relations):
        ps = interp.places_of(n)
        ts = sorted("(" + ",".join(f"{p}:{x}" for p, x in zip(ps, t)) + ")"
                    for t in interp.relations[n])
        lines.append(f"rel {n} = {{{', '.join(ts)}}}")
    for n in sorted(interp.attrs):
        ts = sorted(f"({c},{v})" for c, v in interp.attrs[n])
        lines.append(f"attr {n} = {{{', '.join(ts)}}}")
    for n in sorted(interp.datatypes):
        lines.append(f"dt {n} = {{{s(interp.datatypes[n])}}}")
    return "\n".join(lines) + "\n"
