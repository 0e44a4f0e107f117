"""Subsumption and equivalence between concept names.

Two independent procedures live here:

* :func:`subsumes_structural` saturates the set of literals an element of
  a concept must satisfy. It is sound but incomplete.
* :func:`find_countermodel` searches for a finite model that separates the
  two concepts, by SAT over all domains up to a bound. Every model it
  returns is re-checked with the evaluator in :mod:`dcprofiles.semantics`.

Rules used by the saturation (``S`` is the literal set of one element):

1. told axioms ``A ⊑ C1 ⊓ … ⊓ Cn`` add every ``Ci`` once ``A`` is in ``S``;
   axioms with a complex left-hand side fire once ``S`` entails it;
2. ``≥k R`` entails ``≥k' R`` (k' ≤ k) and ``∃R.⊤`` (k ≥ 1); ``≤k R`` entails
   ``≤k' R`` (k' ≥ k); ``∃R.A`` entails ``≥1 R``;
3. relation inclusions lift: ``R ⊑ S`` gives ``≥k R ⊑ ≥k S``, ``≤k S ⊑ ≤k R``,
   ``∃R.A ⊑ ∃S.A`` and ``∀S.A ⊑ ∀R.A``; they hold for inverses as well;
4. inverse partners are identified, so ``P`` and ``Q⁻`` share one key;
5. ``≥k[i]P`` on a binary ``P`` is ``≥k P`` (i = first place) or ``≥k P⁻``;
6. for each successor demanded by ``S`` a successor literal set is built
   (filler, ``∀`` fillers, ``∃R⁻.⊤``) and saturated one level down; ``∀R⁻.A``
   in it puts ``A`` into ``S``, and a clash in it is a clash in ``S``;
7. a disjunction in ``S`` is split; literals common to all consistent
   branches are added, and if no branch is consistent ``S`` clashes;
8. ``id C a`` adds ``≤1 a`` to ``C``; ``id C R1..Rn`` adds ``∃Ri.⊤ ⊓ ≤1 Ri``;
   ternary signatures type each place; disjoint concepts clash.

A clash makes the concept unsatisfiable, so it is subsumed by everything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Optional

from pysat.formula import IDPool
from pysat.solvers import Solver

from .dl import (
    AllAttr, AllRel, And, AtMostOneAttr, AtomicConcept, AttrMax, AttrMin, Complement,
    ConceptInc, DisjointConcepts, Fd, IdAttr, IdRoles, Inverse, InverseOf, KnowledgeBase,
    Max, MaxPlace, Min, MinPlace, Or, Profile, Rel, RelInc, Selection, Signature, SomeAttr,
    SomeRel, Top, TopRel, ValueSet, conjuncts,
)
from .semantics import Interpretation, is_model, eval_concept

MAX_BOUND = 5


class FragmentError(ValueError):
    """The kb uses a constructor the structural procedure does not handle."""


class BudgetExceeded(RuntimeError):
    """The countermodel search hit its resource limit before deciding."""


# -- structural saturation ---------------------------------------------------

# Relation keys: ("rel", P) for P, ("inv", P) for P⁻, ("place", P, i) for the
# i-th place of a ternary, ("opaque", text) for anything else.


def _key_inverse(key) -> Optional[tuple]:
    if key[0] == "rel":
        return ("inv", key[1])
    if key[0] == "inv":
        return ("rel", key[1])
    return None


@dataclass(frozen=True)
class _Lit:
    """A normalized literal. ``kind`` is one of atom, min, max, some, all,
    attr-some, attr-all, attr-one, attr-min, attr-max, or."""

    kind: str
    key: object = None
    k: int = 0
    filler: object = None  # frozenset of literals, or None for ⊤
    alts: tuple = ()  # for "or": tuple of frozensets of literals


class _Structure:
    def __init__(self, kb: KnowledgeBase, depth: int = 2):
        if kb.profile is Profile.DCP:
            from .encode import pos_to_standard
            kb = pos_to_standard(kb)
        self.kb = kb
        self.depth = depth
        v = kb.vocabulary
        self.places = dict(v.relations)
        self.canon: dict[str, tuple] = {}
        for c in v.conditions:
            if isinstance(c, InverseOf):
                self.canon[c.second] = ("inv", c.first)
        self.told: dict[str, set] = {}
        self.gcis: list[tuple[frozenset, frozenset]] = []  # (lhs alternatives..., rhs)
        self.top_told: set = set()
        self.disjoint: list[tuple[str, str]] = []
        sub_pairs: set = set()
        for ax in kb.axioms:
            if isinstance(ax, ConceptInc):
                self._add_inclusion(ax.sub, ax.sup)
            elif isinstance(ax, RelInc):
                if isinstance(ax.sup, Complement):
                    continue  # disjointness of relations: not used
                a, b = self._rel_key(ax.sub), self._rel_key(ax.sup)
                sub_pairs.add((a, b))
                ia, ib = _key_inverse(a), _key_inverse(b)
                if ia and ib:
                    sub_pairs.add((ia, ib))
            elif isinstance(ax, IdAttr):
                self._add_inclusion(ax.concept, AtMostOneAttr(ax.attr))
            elif isinstance(ax, IdRoles):
                parts = []
                for r in ax.rels:
                    parts += [SomeRel(r, Top()), Max(1, r)]
                self._add_inclusion(ax.concept, And(tuple(parts)))
            elif isinstance(ax, Fd):
                continue
        for c in v.conditions:
            if isinstance(c, Signature):
                for place, player in zip(self.places[c.relation], c.players):
                    self._add_inclusion(MinPlace(1, place, Rel(c.relation)), AtomicConcept(player))
            elif isinstance(c, DisjointConcepts):
                self.disjoint.append((c.first, c.second))
        self.below = self._hierarchy(sub_pairs)
        self._cache: dict = {}

    # normalization

    def _rel_key(self, r) -> tuple:
        if isinstance(r, Rel):
            return self.canon.get(r.name, ("rel", r.name))
        if isinstance(r, Inverse):
            k = self.canon.get(r.name, ("rel", r.name))
            return _key_inverse(k)
        if isinstance(r, (TopRel, Selection)):
            return ("opaque", repr(r))
        raise FragmentError(f"relation expression {r} is outside the structural fragment")

    def _lits(self, c) -> frozenset:
        out = set()
        for p in conjuncts(c):
            lit = self._lit(p)
            if lit is not None:
                out.add(lit)
        return frozenset(out)

    def _lit(self, c) -> Optional[_Lit]:
        if isinstance(c, Top):
            return None
        if isinstance(c, AtomicConcept):
            return _Lit("atom", c.name)
        if isinstance(c, (MinPlace, MaxPlace)):
            kind = "min" if isinstance(c, MinPlace) else "max"
            r = c.rel
            if isinstance(r, Rel) and len(self.places.get(r.name, ())) == 2:
                i = self.places[r.name].index(c.place)
                key = self._rel_key(r if i == 0 else Inverse(r.name))
            elif isinstance(r, Rel):
                key = ("place", r.name, c.place)
            else:
                key = ("opaque", repr(c.rel), c.place)
            return _Lit(kind, key, c.k)
        if isinstance(c, (Min, Max)):
            return _Lit("min" if isinstance(c, Min) else "max", self._rel_key(c.rel), c.k)
        if isinstance(c, (SomeRel, AllRel)):
            filler = None if isinstance(c.filler, Top) else self._lits(c.filler)
            return _Lit("some" if isinstance(c, SomeRel) else "all", self._rel_key(c.rel),
                        filler=filler or None)
        if isinstance(c, SomeAttr):
            return _Lit("attr-some", (c.attr, c.datatype))
        if isinstance(c, AllAttr):
            return _Lit("attr-all", (c.attr, c.datatype))
        if isinstance(c, AtMostOneAttr):
            return _Lit("attr-one", c.attr)
        if isinstance(c, (AttrMin, AttrMax)):
            kind = "attr-min" if isinstance(c, AttrMin) else "attr-max"
            return _Lit(kind, (c.attr, c.datatype), c.k)
        if isinstance(c, Or):
            return _Lit("or", alts=tuple(self._lits(a) for a in c.args))
        if isinstance(c, And):
            raise AssertionError("conjunctions are flattened before this point")
        raise FragmentError(f"concept {c} is outside the structural fragment")

    def _add_inclusion(self, sub, sup) -> None:
        rhs = self._lits(sup)
        if isinstance(sub, AtomicConcept):
            self.told.setdefault(sub.name, set()).update(rhs)
        elif isinstance(sub, Top):
            self.top_told.update(rhs)
        else:
            self.gcis.append((self._lits(sub), frozenset(rhs)))

    def _hierarchy(self, pairs: set) -> dict:
        """Reflexive-transitive super-keys of each key."""
        keys = {k for p in pairs for k in p}
        up = {k: {k} for k in keys}
        changed = True
        while changed:
            changed = False
            for a, b in pairs:
                new = up[b] - up[a]
                if new:
                    up[a] |= new
                    changed = True
        return up

    def sub_key(self, a, b) -> bool:
        return a == b or b in self.below.get(a, ())

    # entailment and clashes on literal sets

    def _filler_ok(self, have, want) -> bool:
        if want is None:
            return True
        if have is None:
            return False
        cl = self.closure(have, 0, split=False)
        return all(self.entails(cl, w) for w in want)

    def entails(self, s: frozenset, lit: _Lit) -> bool:
        if lit in s:
            return True
        k = lit.kind
        if k == "min":
            if lit.k == 0:
                return True
            for x in s:
                if x.kind == "min" and x.k >= lit.k and self.sub_key(x.key, lit.key):
                    return True
                if lit.k == 1 and x.kind == "some" and self.sub_key(x.key, lit.key):
                    return True
            return False
        if k == "max":
            return any(x.kind == "max" and x.k <= lit.k and self.sub_key(lit.key, x.key) for x in s)
        if k == "some":
            for x in s:
                if x.kind == "some" and self.sub_key(x.key, lit.key) and self._filler_ok(x.filler, lit.filler):
                    return True
                if lit.filler is None and x.kind == "min" and x.k >= 1 and self.sub_key(x.key, lit.key):
                    return True
            return False
        if k == "all":
            for x in s:
                if x.kind == "all" and self.sub_key(lit.key, x.key) and self._filler_ok(x.filler, lit.filler):
                    return True
                if x.kind == "max" and x.k == 0 and self.sub_key(lit.key, x.key):
                    return True
            return lit.filler is None
        if k == "attr-some":
            return any(x.kind == "attr-min" and x.key == lit.key and x.k >= 1 for x in s)
        if k == "attr-min":
            return lit.k == 0 or any(
                (x.kind == "attr-min" and x.key == lit.key and x.k >= lit.k)
                or (lit.k == 1 and x.kind == "attr-some" and x.key == lit.key) for x in s)
        if k == "attr-max":
            return any((x.kind == "attr-max" and x.key == lit.key and x.k <= lit.k)
                       or (lit.k >= 1 and x.kind == "attr-one" and x.key == lit.key[0]) for x in s)
        if k == "or":
            return any(all(self.entails(s, y) for y in alt) for alt in lit.alts)
        return False

    def clashes(self, s: frozenset) -> bool:
        if _CLASH in s:
            return True
        for x in s:
            if x.kind == "max" and self.entails(s, _Lit("min", x.key, x.k + 1)):
                return True
            if x.kind == "attr-max" and self.entails(s, _Lit("attr-min", x.key, x.k + 1)):
                return True
            if x.kind == "attr-one" and any(y.kind == "attr-min" and y.key[0] == x.key and y.k >= 2
                                            for y in s):
                return True
        names = {x.key for x in s if x.kind == "atom"}
        return any(a in names and b in names for a, b in self.disjoint)

    # saturation

    def closure(self, seed: Iterable[_Lit], depth: int, split: bool = True) -> frozenset:
        seed = frozenset(seed)
        ck = (seed, depth, split)
        if ck in self._cache:
            return self._cache[ck]
        self._cache[ck] = seed  # provisional, sound value for cyclic filler checks
        s = set(seed) | self.top_told
        done_atoms: set = set()
        done_succ: set = set()
        done_or: set = set()
        while True:
            before = len(s)
            for x in [x for x in s if x.kind == "atom" and x.key not in done_atoms]:
                done_atoms.add(x.key)
                s |= self.told.get(x.key, set())
            fs = frozenset(s)
            for lhs, rhs in self.gcis:
                if not rhs <= s and all(self.entails(fs, y) for y in lhs):
                    s |= rhs
            if depth > 0:
                for x in [x for x in s if x not in done_succ and _demands_successor(x)]:
                    done_succ.add(x)
                    s |= self._successor(frozenset(s), x, depth)
            if split:
                for x in [x for x in s if x.kind == "or" and x not in done_or]:
                    if self.entails(frozenset(s - {x}), x):
                        done_or.add(x)
                        continue
                    branches = [self.closure(s | alt, depth, split=False) for alt in x.alts]
                    live = [b for b in branches if not self.clashes(b)]
                    if not live:
                        s.add(_CLASH)
                    else:
                        common = frozenset.intersection(*live)
                        s |= {y for y in common if y.kind != "or"}
                    done_or.add(x)
            if len(s) == before:
                break
        out = frozenset(s)
        if self.clashes(out):
            out = out | {_CLASH}
        self._cache[ck] = out
        return out

    def _successor(self, s: frozenset, x: _Lit, depth: int) -> set:
        key = x.key
        back = _key_inverse(key)
        seed = set(x.filler or ()) if x.kind == "some" else set()
        for y in s:
            if y.kind == "all" and self.sub_key(key, y.key) and y.filler:
                seed |= y.filler
        if back is not None:
            seed.add(_Lit("some", back))
        succ = self.closure(seed, depth - 1, split=False)
        if self.clashes(succ):
            return {_CLASH}
        out = set()
        if back is not None:
            for y in succ:
                if y.kind == "all" and self.sub_key(back, y.key) and y.filler:
                    out |= y.filler
        return out

    def concept_closure(self, name: str) -> frozenset:
        return self.closure([_Lit("atom", name)], self.depth)

    def subsumes(self, sub: str, sup: str) -> bool:
        if sub == sup:
            return True
        cl = self.concept_closure(sub)
        return _CLASH in cl or _Lit("atom", sup) in cl

    def unsatisfiable(self, name: str) -> bool:
        return _CLASH in self.concept_closure(name)

    def entails_concept(self, name: str, c) -> bool:
        """Whether ``name ⊑ c`` follows, ``c`` being any concept expression."""
        cl = self.concept_closure(name)
        return _CLASH in cl or all(self.entails(cl, x) for x in self._lits(c))


_CLASH = _Lit("clash")


def _demands_successor(x: _Lit) -> bool:
    return (x.kind == "some") or (x.kind == "min" and x.k >= 1 and x.key[0] in ("rel", "inv"))


def structure(kb: KnowledgeBase) -> _Structure:
    """Build the saturation structure once for repeated queries on ``kb``."""
    return _Structure(kb)


def subsumes_structural(kb: KnowledgeBase, sub: str, sup: str, _s: Optional[_Structure] = None) -> bool:
    """Sound test of ``sub ⊑ sup``: ``True`` means no model separates them."""
    voc = _std(kb).vocabulary
    for n in (sub, sup):
        if n not in voc.concepts:
            raise KeyError(f"{n} is not a concept of the knowledge base")
    return (_s or _Structure(kb)).subsumes(sub, sup)


def entails(kb: KnowledgeBase, sub: str, concept, _s: Optional[_Structure] = None) -> bool:
    """Sound test of ``sub ⊑ concept`` for a concept name and an expression."""
    if sub not in _std(kb).vocabulary.concepts:
        raise KeyError(f"{sub} is not a concept of the knowledge base")
    return (_s or _Structure(kb)).entails_concept(sub, concept)


def _std(kb: KnowledgeBase) -> KnowledgeBase:
    if kb.profile is Profile.DCP:
        from .encode import pos_to_standard
        return pos_to_standard(kb)
    return kb


# -- bounded countermodel search ---------------------------------------------


@dataclass(frozen=True)
class CounterModel:
    interp: Interpretation
    witness: str
    bound: int


def default_bound(kb: KnowledgeBase) -> int:
    ks = [0]
    for ax in kb.axioms:
        for node in _nodes(ax):
            if isinstance(node, (Min, Max, MinPlace, MaxPlace, AttrMin, AttrMax)):
                ks.append(node.k)
    return min(MAX_BOUND, len(kb.vocabulary.concepts) + max(ks) + 1)


def _nodes(x):
    from .dl import walk
    for _, node in walk(x):
        yield node


class _Sat:
    """Propositional encoding of "``kb`` has a model with at most ``n`` objects"."""

    def __init__(self, kb: KnowledgeBase, n: int, m: int):
        self.kb = kb
        v = kb.vocabulary
        self.pool = IDPool()
        self.clauses: list[list[int]] = []
        self.objs = tuple(f"c{i}" for i in range(1, n + 1))
        values = [f"v{i}" for i in range(1, m + 1)]
        fixed = set()
        for c in v.conditions:
            if isinstance(c, ValueSet):
                fixed.update(c.values)
        self.vals = tuple(values + sorted(fixed - set(values)))
        self.places = dict(v.relations)
        self.true = self.pool.id(("true",))
        self.clauses.append([self.true])
        self._memo: dict = {}
        self._counts: dict = {}
        for i, c in enumerate(self.objs):
            self.clauses.append([-self.top(c), self.exists(c)])
            if i:
                self.clauses.append([-self.exists(c), self.exists(self.objs[i - 1])])
        self.clauses.append([self.exists(self.objs[0])])
        for a in sorted(v.concepts):
            for c in self.objs:
                self.clauses.append([-self.var("C", a, c), self.top(c)])
        for r in sorted(v.relations):
            for t in product(self.objs, repeat=len(v.relations[r])):
                for x in set(t):
                    self.clauses.append([-self.var("R", r, t), self.top(x)])
        for a in sorted(v.attributes):
            for c in self.objs:
                for val in self.vals:
                    self.clauses.append([-self.var("A", a, c, val), self.top(c)])
        for ax in kb.axioms:
            self.axiom(ax)
        for c in v.conditions:
            self.condition(c)

    def var(self, *key) -> int:
        return self.pool.id(key)

    def exists(self, c) -> int:
        return self.var("E", c)

    def top(self, c) -> int:
        return self.var("T", c)

    # gates

    def and_(self, lits) -> int:
        lits = [x for x in lits if x != self.true]
        if not lits:
            return self.true
        if -self.true in lits:
            return -self.true
        if len(lits) == 1:
            return lits[0]
        key = ("and", tuple(sorted(lits)))
        if key in self._memo:
            return self._memo[key]
        g = self.pool.id(key)
        for x in lits:
            self.clauses.append([-g, x])
        self.clauses.append([g] + [-x for x in lits])
        self._memo[key] = g
        return g

    def or_(self, lits) -> int:
        return -self.and_([-x for x in lits])

    def at_least(self, lits, k: int) -> int:
        """Literal equivalent to "at least ``k`` of ``lits`` hold"."""
        lits = tuple(lits)
        if k <= 0:
            return self.true
        if k > len(lits):
            return -self.true
        key = (lits, k)
        if key in self._counts:
            return self._counts[key]
        # s[t] after j inputs: at least t of the first j hold
        prev = [self.true] + [-self.true] * k
        for x in lits:
            cur = [self.true]
            for t in range(1, k + 1):
                cur.append(self.or_([prev[t], self.and_([prev[t - 1], x])]))
            prev = cur
        self._counts[key] = prev[k]
        return prev[k]

    # relations and concepts

    def tuple_lit(self, r, t: tuple) -> int:
        if isinstance(r, Rel):
            return self.var("R", r.name, t)
        if isinstance(r, Inverse):
            return self.var("R", r.name, (t[1], t[0]))
        if isinstance(r, TopRel):
            return self.and_([self.top(x) for x in t])
        if isinstance(r, Selection):
            i = ("1", "2").index(r.place)
            return self.and_([self.top(t[0]), self.top(t[1]), self.concept(r.concept, t[i])])
        if isinstance(r, Complement):
            return self.and_([self.top(x) for x in t] + [-self.tuple_lit(r.rel, t)])
        raise TypeError(r)

    def arity(self, r) -> int:
        if isinstance(r, Rel):
            return len(self.places[r.name])
        if isinstance(r, TopRel):
            return r.arity
        if isinstance(r, Complement):
            return self.arity(r.rel)
        return 2

    def rel_places(self, r) -> tuple:
        if isinstance(r, Rel):
            return self.places[r.name]
        return tuple(str(i) for i in range(1, self.arity(r) + 1))

    def concept(self, c, x) -> int:
        key = ("concept", c, x)
        if key in self._memo:
            return self._memo[key]
        out = self._concept(c, x)
        self._memo[key] = out
        return out

    def _concept(self, c, x) -> int:
        objs, vals = self.objs, self.vals
        if isinstance(c, Top):
            return self.top(x)
        if isinstance(c, AtomicConcept):
            return self.var("C", c.name, x)
        if isinstance(c, And):
            return self.and_([self.concept(a, x) for a in c.args])
        if isinstance(c, Or):
            return self.or_([self.concept(a, x) for a in c.args])
        if isinstance(c, (MinPlace, MaxPlace)):
            i = self.rel_places(c.rel).index(c.place)
            n = self.arity(c.rel)
            lits = []
            for rest in product(objs, repeat=n - 1):
                t = rest[:i] + (x,) + rest[i:]
                lits.append(self.tuple_lit(c.rel, t))
            if isinstance(c, MinPlace):
                return self.at_least(lits, c.k)
            return -self.at_least(lits, c.k + 1)
        if isinstance(c, (Min, Max, SomeRel, AllRel)):
            succ = [(self.tuple_lit(c.rel, (x, d)), d) for d in objs]
            if isinstance(c, Min):
                return self.at_least([s for s, _ in succ], c.k)
            if isinstance(c, Max):
                return -self.at_least([s for s, _ in succ], c.k + 1)
            if isinstance(c, SomeRel):
                return self.or_([self.and_([s, self.concept(c.filler, d)]) for s, d in succ])
            return self.and_([self.or_([-s, self.concept(c.filler, d)]) for s, d in succ])
        if isinstance(c, AtMostOneAttr):
            return -self.at_least([self.var("A", c.attr, x, v) for v in vals], 2)
        if isinstance(c, (AllAttr, SomeAttr, AttrMin, AttrMax)):
            pairs = [(self.var("A", c.attr, x, v), self.var("D", c.datatype, v)) for v in vals]
            if isinstance(c, AllAttr):
                return self.and_([self.or_([-a, t]) for a, t in pairs])
            has = [self.and_([a, t]) for a, t in pairs]
            if isinstance(c, SomeAttr):
                return self.or_(has)
            if isinstance(c, AttrMin):
                return self.at_least(has, c.k)
            return -self.at_least(has, c.k + 1)
        raise TypeError(c)

    # axioms and side conditions

    def axiom(self, ax) -> None:
        objs = self.objs
        if isinstance(ax, ConceptInc):
            for x in objs:
                self.clauses.append([-self.exists(x), -self.concept(ax.sub, x), self.concept(ax.sup, x)])
        elif isinstance(ax, RelInc):
            for t in product(objs, repeat=self.arity(ax.sub)):
                self.clauses.append([-self.tuple_lit(ax.sub, t), self.tuple_lit(ax.sup, t)])
        elif isinstance(ax, IdAttr):
            sels = []
            for dt in sorted(self.kb.vocabulary.datatypes):
                s = self.var("sel", ax, dt)
                sels.append(s)
                for x in objs:
                    member = self.concept(AtomicConcept(ax.concept), x)
                    for need in (SomeAttr(ax.attr, dt), AtMostOneAttr(ax.attr)):
                        self.clauses.append([-s, -self.exists(x), -member, self.concept(need, x)])
                for v in self.vals:
                    many = self.at_least([self.var("A", ax.attr, x, v) for x in objs], 2)
                    self.clauses.append([-s, -self.var("D", dt, v), -many])
            if sels:
                self.clauses.append(sels)
            else:
                for x in objs:
                    self.clauses.append([-self.exists(x), -self.concept(AtomicConcept(ax.concept), x)])
        elif isinstance(ax, IdRoles):
            member = {x: self.concept(AtomicConcept(ax.concept), x) for x in objs}
            for x in objs:
                for r in ax.rels:
                    for need in (SomeRel(r, Top()), Max(1, r)):
                        self.clauses.append([-self.exists(x), -member[x], self.concept(need, x)])
            for x, y in combinations(objs, 2):
                same = [self.or_([self.and_([self.tuple_lit(r, (x, d)), self.tuple_lit(r, (y, d))])
                                  for d in objs]) for r in ax.rels]
                self.clauses.append([-member[x], -member[y]] + [-s for s in same])
        elif isinstance(ax, Fd):
            places = self.places[ax.relation]
            i1, i2 = (places.index(p) for p in ax.determinants)
            i3 = places.index(ax.dependent)
            tuples = list(product(objs, repeat=len(places)))
            for r, s in combinations(tuples, 2):
                if r[i1] == s[i1] and r[i2] == s[i2] and r[i3] != s[i3]:
                    self.clauses.append([-self.var("R", ax.relation, r), -self.var("R", ax.relation, s)])
        else:
            raise TypeError(ax)

    def condition(self, c) -> None:
        objs = self.objs
        if isinstance(c, InverseOf):
            for x, y in product(objs, repeat=2):
                p, q = self.var("R", c.first, (x, y)), self.var("R", c.second, (y, x))
                self.clauses += [[-p, q], [-q, p]]
        elif isinstance(c, DisjointConcepts):
            for x in objs:
                self.clauses.append([-self.var("C", c.first, x), -self.var("C", c.second, x)])
        elif isinstance(c, Signature):
            for t in product(objs, repeat=len(c.players)):
                for x, player in zip(t, c.players):
                    self.clauses.append([-self.var("R", c.relation, t), self.var("C", player, x)])
        elif isinstance(c, ValueSet):
            for v in self.vals:
                if v not in c.values:
                    self.clauses.append([-self.var("D", c.datatype, v)])
        else:
            raise TypeError(c)

    def decode(self, model: Iterable[int]) -> Interpretation:
        true = {x for x in model if x > 0}

        def on(*key) -> bool:
            return self.pool.obj2id.get(key) in true

        v = self.kb.vocabulary
        objs = frozenset(x for x in self.objs if on("E", x))
        top = frozenset(x for x in objs if on("T", x))
        concepts = {a: frozenset(x for x in objs if on("C", a, x)) for a in v.concepts}
        rels = {r: frozenset(t for t in product(sorted(objs), repeat=len(ps)) if on("R", r, t))
                for r, ps in v.relations.items()}
        attrs = {a: frozenset((x, val) for x in objs for val in self.vals if on("A", a, x, val))
                 for a in v.attributes}
        dts = {d: frozenset(val for val in self.vals if on("D", d, val)) for d in v.datatypes}
        used = set().union(*dts.values(), *({p[1] for p in ps} for ps in attrs.values()))
        return Interpretation(objs, frozenset(used), top, concepts, rels, dict(v.relations),
                              attrs, dts)


class ModelFinder:
    """SAT-based search for small models of one kb, reusable across queries."""

    def __init__(self, kb: KnowledgeBase, bound: int, conflicts: int = 200_000,
                 solver: str = "cadical153"):
        if bound < 1:
            raise ValueError("bound must be at least 1")
        self.kb = _std(kb)
        self.bound = bound
        self.conflicts = conflicts
        self.sat = _Sat(self.kb, bound, bound)
        self.solver = Solver(name=solver, bootstrap_with=self.sat.clauses)
        self._sent = len(self.sat.clauses)

    def close(self) -> None:
        self.solver.delete()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _solve(self, assumptions: list[int]) -> Optional[Interpretation]:
        sat = self.sat
        for size in range(1, self.bound + 1):
            extra = [-sat.exists(sat.objs[size])] if size < self.bound else []
            self.solver.conf_budget(self.conflicts)
            res = self.solver.solve_limited(assumptions=assumptions + extra)
            if res is None:
                raise BudgetExceeded(f"conflict budget {self.conflicts} exhausted at size {size}")
            if res:
                return sat.decode(self.solver.get_model())
        return None

    def countermodel(self, sub: str, sup: str) -> Optional[CounterModel]:
        sat = self.sat
        c1 = sat.objs[0]
        a = sat.concept(AtomicConcept(sub), c1)
        b = sat.concept(AtomicConcept(sup), c1)
        self._sync()
        interp = self._solve([a, -b])
        if interp is None:
            return None
        _verify(interp, self.kb, sub, sup, c1)
        return CounterModel(interp, c1, self.bound)

    def satisfiable(self, name: str) -> Optional[Interpretation]:
        lit = self.sat.concept(AtomicConcept(name), self.sat.objs[0])
        self._sync()
        return self._solve([lit])

    def _sync(self) -> None:
        """Hand clauses created by lazily encoded query concepts to the solver."""
        for cl in self.sat.clauses[self._sent:]:
            self.solver.add_clause(cl)
        self._sent = len(self.sat.clauses)


def _verify(interp: Interpretation, kb: KnowledgeBase, sub: str, sup: str, witness: str) -> None:
    check = is_model(interp, kb)
    inside = witness in eval_concept(interp, AtomicConcept(sub)) - eval_concept(interp, AtomicConcept(sup))
    if not check.ok or not inside:
        raise AssertionError(f"model finder returned a bad countermodel: {check.failures}")


def find_countermodel(kb: KnowledgeBase, sub: str, sup: str, bound: Optional[int] = None,
                      conflicts: int = 200_000) -> Optional[CounterModel]:
    """A model of ``kb`` with at most ``bound`` objects and values in which an
    element of ``sub`` is not in ``sup``; ``None`` if there is none that small."""
    bound = default_bound(kb) if bound is None else bound
    voc = _std(kb).vocabulary
    for n in (sub, sup):
        if n not in voc.concepts:
            raise KeyError(f"{n} is not a concept of the knowledge base")
    with ModelFinder(kb, bound, conflicts) as mf:
        return mf.countermodel(sub, sup)


# -- classification ----------------------------------------------------------

TRUE, FALSE, UNKNOWN = "true", "false", "unknown-at-bound"


@dataclass
class ClassificationResult:
    concepts: tuple
    status: dict  # (sub, sup) -> TRUE | FALSE | UNKNOWN
    witnesses: dict = field(default_factory=dict)  # (sub, sup) -> CounterModel
    bound: int = 0

    @property
    def order(self) -> frozenset:
        return frozenset(p for p, s in self.status.items() if s == TRUE)

    def subsumes(self, sub: str, sup: str) -> bool:
        return self.status[(sub, sup)] == TRUE

    @property
    def equivalence_classes(self) -> tuple:
        seen: set = set()
        out = []
        for a in self.concepts:
            if a in seen:
                continue
            cls = frozenset(b for b in self.concepts
                            if self.subsumes(a, b) and self.subsumes(b, a))
            seen |= cls
            out.append(tuple(sorted(cls)))
        return tuple(out)

    @property
    def unknown(self) -> list:
        return sorted(p for p, s in self.status.items() if s == UNKNOWN)


def classify(kb: KnowledgeBase, bound: Optional[int] = None, conflicts: int = 200_000) -> ClassificationResult:
    """Pairwise subsumption over the concept names of ``kb``.

    Pairs the structural test cannot prove are sent to the model finder and
    reported as false (with a countermodel) or unknown at the bound.
    """
    kb = _std(kb)
    bound = default_bound(kb) if bound is None else bound
    names = tuple(sorted(kb.vocabulary.concepts))
    s = _Structure(kb)
    status: dict = {}
    for a, b in product(names, repeat=2):
        status[(a, b)] = TRUE if s.subsumes(a, b) else None
    # close under transitivity so the order is a preorder regardless of rule order
    changed = True
    while changed:
        changed = False
        for a, b, c in product(names, repeat=3):
            if status[(a, b)] == TRUE and status[(b, c)] == TRUE and status[(a, c)] != TRUE:
                status[(a, c)] = TRUE
                changed = True
    witnesses = {}
    open_pairs = [p for p, v in status.items() if v is None]
    if open_pairs:
        with ModelFinder(kb, bound, conflicts) as mf:
            for a, b in open_pairs:
                cm = mf.countermodel(a, b)
                status[(a, b)] = FALSE if cm else UNKNOWN
                if cm:
                    witnesses[(a, b)] = cm
    return ClassificationResult(names, status, witnesses, bound)


def equivalent(kb: KnowledgeBase, a: str, b: str) -> bool:
    s = _Structure(_std(kb))
    return s.subsumes(a, b) and s.subsumes(b, a)


def unsatisfiable_concepts(kb: KnowledgeBase, bound: Optional[int] = None) -> dict[str, str]:
    """Concept names with an empty extension: ``"unsatisfiable"`` when the
    structural test proves it, ``"empty-at-bound"`` when no small model has
    an instance."""
    kb = _std(kb)
    bound = default_bound(kb) if bound is None else bound
    s = _Structure(kb)
    out = {}
    with ModelFinder(kb, bound) as mf:
        for name in sorted(kb.vocabulary.concepts):
            if s.unsatisfiable(name):
                out[name] = "unsatisfiable"
            elif mf.satisfiable(name) is None:
                out[name] = "empty-at-bound"
    return out
