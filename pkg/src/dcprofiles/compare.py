"""Knowledge-base equality up to a renaming of generated symbols."""

from __future__ import annotations

from collections import Counter
from typing import Optional

from .dl import KnowledgeBase, map_symbols, symbols


def _signature(kb: KnowledgeBase, name: str) -> tuple:
    v = kb.vocabulary
    kind = v.kind_of(name)
    return (kind, v.relations[name]) if kind == "relation" else (kind,)


def _statements(kb: KnowledgeBase) -> list:
    return list(dict.fromkeys(kb.axioms)) + list(dict.fromkeys(kb.vocabulary.conditions))


def rename_kb(kb: KnowledgeBase, mapping: dict[str, str]) -> KnowledgeBase:
    """Apply ``mapping`` to every symbol of ``kb`` (unmapped symbols stay)."""
    from dataclasses import replace

    f = lambda s: mapping.get(s, s)  # noqa: E731
    v = kb.vocabulary
    voc = replace(
        v,
        concepts=frozenset(map(f, v.concepts)),
        relations={f(r): ps for r, ps in v.relations.items()},
        attributes=frozenset(map(f, v.attributes)),
        datatypes=frozenset(map(f, v.datatypes)),
        generated=frozenset(map(f, v.generated)),
        conditions=tuple(map_symbols(c, f) for c in v.conditions),
    )
    return replace(kb, vocabulary=voc, axioms=tuple(map_symbols(a, f) for a in kb.axioms),
                   provenance={})


def kb_equal_modulo_renaming(kb1: KnowledgeBase, kb2: KnowledgeBase) -> Optional[dict[str, str]]:
    """Find a bijection between the generated symbols of ``kb1`` and ``kb2``
    under which both kbs have the same axioms, vocabulary and side conditions.

    User-declared symbols must map to themselves. Returns the mapping
    (restricted to generated symbols) or ``None``.
    """
    if kb1.profile != kb2.profile:
        return None
    st1, st2 = _statements(kb1), _statements(kb2)
    if len(st1) != len(st2):
        return None
    v1, v2 = kb1.vocabulary, kb2.vocabulary
    free1, free2 = set(v1.generated), set(v2.generated)
    fixed1, fixed2 = set(v1.names) - free1, set(v2.names) - free2
    if fixed1 != fixed2 or len(free1) != len(free2):
        return None
    if any(_signature(kb1, s) != _signature(kb2, s) for s in fixed1):
        return None

    colors1 = {s: _signature(kb1, s) for s in free1}
    colors2 = {s: _signature(kb2, s) for s in free2}
    table: dict = {}

    def intern(x) -> int:
        return table.setdefault(x, len(table))

    colors1 = {s: intern(c) for s, c in colors1.items()}
    colors2 = {s: intern(c) for s, c in colors2.items()}

    occurs1 = {s: [x for x in st1 if s in symbols(x)] for s in free1}
    occurs2 = {s: [x for x in st2 if s in symbols(x)] for s in free2}

    def refine(colors: dict, occurs: dict) -> dict:
        out = {}
        for s, c in colors.items():
            def mask(x, s=s):
                if x == s:
                    return "\0self"
                return f"\0{colors[x]}" if x in colors else x
            shapes = sorted(repr(map_symbols(x, mask)) for x in occurs[s])
            out[s] = (c, tuple(shapes))
        return out

    for _ in range(len(free1) + 1):
        r1, r2 = refine(colors1, occurs1), refine(colors2, occurs2)
        n1 = {s: intern(c) for s, c in r1.items()}
        n2 = {s: intern(c) for s, c in r2.items()}
        stable = len(set(n1.values())) == len(set(colors1.values()))
        colors1, colors2 = n1, n2
        if Counter(colors1.values()) != Counter(colors2.values()):
            return None
        if stable:
            break

    target = set(st2)
    order = sorted(free1, key=lambda s: (Counter(colors1.values())[colors1[s]], s))
    by_color: dict[int, list[str]] = {}
    for s in sorted(free2):
        by_color.setdefault(colors2[s], []).append(s)

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def complete() -> bool:
        f = lambda s: mapping.get(s, s)  # noqa: E731
        return all(map_symbols(x, f) in target for x in st1)

    def consistent(s: str) -> bool:
        f = lambda x: mapping.get(x, x)  # noqa: E731
        for x in occurs1[s]:
            if all(y in mapping or y not in free1 for y in symbols(x)):
                if map_symbols(x, f) not in target:
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return complete()
        s = order[i]
        for t in by_color.get(colors1[s], ()):
            if t in used:
                continue
            mapping[s] = t
            used.add(t)
            if consistent(s) and search(i + 1):
                return True
            used.discard(t)
            del mapping[s]
        return False

    if not search(0):
        return None
    return dict(sorted(mapping.items()))
