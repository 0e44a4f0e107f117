"""Exhaustive enumeration of small interpretations.

This is deliberately naive: every subset of every admissible region is
tried. It exists to cross-check the SAT-based model finder and is only
usable for vocabularies with one or two symbols and domains of size two or
three.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterator, Optional

from .dl import AtomicConcept, KnowledgeBase, Vocabulary
from .semantics import Interpretation, axiom_failure, condition_failure, eval_concept


def subsets(xs) -> Iterator[frozenset]:
    xs = sorted(xs)
    for r in range(len(xs) + 1):
        for c in combinations(xs, r):
            yield frozenset(c)


def _assignments(names, region_of) -> Iterator[dict]:
    names = sorted(names)
    choices = [list(subsets(region_of(n))) for n in names]
    for pick in product(*choices):
        yield dict(zip(names, pick))


def enumerate_interpretations(vocab: Vocabulary, n_objects: int, n_values: int = 0,
                              full_top: bool = False) -> Iterator[Interpretation]:
    """Every interpretation of ``vocab`` over ``c1..cn`` and ``v1..vm``.

    With ``full_top`` only interpretations whose top extension is the whole
    object domain are produced.
    """
    objs = tuple(f"c{i}" for i in range(1, n_objects + 1))
    vals = tuple(f"v{i}" for i in range(1, n_values + 1))
    tops = [frozenset(objs)] if full_top else list(subsets(objs))
    for top in tops:
        for dts in _assignments(vocab.datatypes, lambda n: vals):
            for concepts in _assignments(vocab.concepts, lambda n: top):
                for rels in _assignments(vocab.relations,
                                         lambda n: product(top, repeat=len(vocab.relations[n]))):
                    for attrs in _assignments(vocab.attributes, lambda n: product(top, vals)):
                        yield Interpretation(frozenset(objs), frozenset(vals), top, concepts,
                                             rels, dict(vocab.relations), attrs, dts)


def holds(interp: Interpretation, kb: KnowledgeBase) -> bool:
    dts = sorted(kb.vocabulary.datatypes)
    if any(axiom_failure(interp, ax, dts) is not None for ax in kb.axioms):
        return False
    return all(condition_failure(interp, c) is None for c in kb.vocabulary.conditions)


def brute_force_countermodel(kb: KnowledgeBase, sub: str, sup: str, bound: int,
                             value_bound: Optional[int] = None) -> Optional[Interpretation]:
    """First interpretation (by size, then enumeration order) that satisfies
    ``kb`` and puts an element of ``sub`` outside ``sup``."""
    value_bound = bound if value_bound is None else value_bound
    needs_values = bool(kb.vocabulary.attributes or kb.vocabulary.datatypes)
    for n in range(1, bound + 1):
        for m in (range(0, value_bound + 1) if needs_values else (0,)):
            for interp in enumerate_interpretations(kb.vocabulary, n, m):
                diff = (eval_concept(interp, AtomicConcept(sub))
                        - eval_concept(interp, AtomicConcept(sup)))
                if diff and holds(interp, kb):
                    return interp
    return None


def count_models(kb: KnowledgeBase, n_objects: int, n_values: int = 0) -> int:
    return sum(1 for i in enumerate_interpretations(kb.vocabulary, n_objects, n_values)
               if holds(i, kb))


__all__ = ["subsets", "enumerate_interpretations", "holds", "brute_force_countermodel",
           "count_models"]
