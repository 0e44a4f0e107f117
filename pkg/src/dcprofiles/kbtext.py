"""Line-oriented ASCII syntax for knowledge bases.

A file starts with ``profile <tag>``, declares its vocabulary, then lists
one axiom per line::

    profile dcs
    datatype String
    concept Book
    attr isbn
    Book <= some isbn.String and <=1 isbn
    id Book isbn

Besides ``concept``, ``rel NAME/ARITY``, ``attr`` and ``datatype`` there are
declarations for vocabulary metadata: ``auto NAME`` (generated symbol),
``inverse P Q``, ``disjoint A B``, ``signature P A B C`` and
``values T "v1" "v2"``. ``rel P/3 (a, b, c)`` gives non-default place
labels. Names that clash with keywords or are not identifiers are written
in backquotes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .dl import (
    AllAttr, AllRel, And, AtMostOneAttr, AtomicConcept, AttrMax, AttrMin,
    Complement, ConceptInc, DisjointConcepts, Fd, IdAttr, IdRoles, Inverse, InverseOf,
    KnowledgeBase, Max, MaxPlace, Min, MinPlace, Or, Profile, Rel, RelInc, Selection,
    Signature, SomeAttr, SomeRel, Top, TopRel, ValueSet, Vocabulary, VocabularyError,
    conj, disj,
)

KEYWORDS = frozenset({"top", "top2", "top3", "all", "some", "and", "or", "not", "inv", "id", "fd"})
DECLARATIONS = ("profile", "datatype", "concept", "attr", "rel", "auto",
                "inverse", "disjoint", "signature", "values")

_IDENT = re.compile(r"[^\W\d]\w*\Z")


class KBSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


# -- serialisation -----------------------------------------------------------


def name_text(name: str) -> str:
    if _IDENT.match(name) and name not in KEYWORDS:
        return name
    return "`" + name.replace("`", "``") + "`"


def place_text(place: str) -> str:
    return place if place.isdigit() else name_text(place)


def rel_text(r) -> str:
    if isinstance(r, TopRel):
        return f"top{r.arity}"
    if isinstance(r, Rel):
        return name_text(r.name)
    if isinstance(r, Inverse):
        return f"inv({name_text(r.name)})"
    if isinstance(r, Complement):
        return f"not {rel_text(r.rel)}"
    if isinstance(r, Selection):
        return f"({place_text(r.place)}:{concept_text(r.concept)})"
    raise TypeError(f"not a relation expression: {r!r}")


def _filler(c) -> str:
    if isinstance(c, Top):
        return "top"
    if isinstance(c, AtomicConcept):
        return name_text(c.name)
    raise TypeError(f"filler must be atomic: {c!r}")


def concept_text(c) -> str:
    if isinstance(c, Top):
        return "top"
    if isinstance(c, AtomicConcept):
        return name_text(c.name)
    if isinstance(c, MinPlace):
        return f">= {c.k} [{place_text(c.place)}] {rel_text(c.rel)}"
    if isinstance(c, MaxPlace):
        return f"<= {c.k} [{place_text(c.place)}] {rel_text(c.rel)}"
    if isinstance(c, AllAttr):
        return f"all {name_text(c.attr)}.{name_text(c.datatype)}"
    if isinstance(c, SomeAttr):
        return f"some {name_text(c.attr)}.{name_text(c.datatype)}"
    if isinstance(c, AtMostOneAttr):
        return f"<=1 {name_text(c.attr)}"
    if isinstance(c, AllRel):
        return f"all {rel_text(c.rel)}.{_filler(c.filler)}"
    if isinstance(c, SomeRel):
        return f"some {rel_text(c.rel)}.{_filler(c.filler)}"
    if isinstance(c, Min):
        return f">= {c.k} {rel_text(c.rel)}"
    if isinstance(c, Max):
        return f"<= {c.k} {rel_text(c.rel)}"
    if isinstance(c, AttrMin):
        return f">= {c.k} {name_text(c.attr)}.{name_text(c.datatype)}"
    if isinstance(c, AttrMax):
        return f"<= {c.k} {name_text(c.attr)}.{name_text(c.datatype)}"
    if isinstance(c, And):
        return " and ".join(f"({concept_text(a)})" if isinstance(a, (Or, And)) else concept_text(a)
                            for a in c.args)
    if isinstance(c, Or):
        return " or ".join(f"({concept_text(a)})" if isinstance(a, Or) else concept_text(a)
                           for a in c.args)
    raise TypeError(f"not a concept expression: {c!r}")


def _id_concept(c) -> str:
    if isinstance(c, (AtomicConcept, Top)):
        return concept_text(c)
    return f"({concept_text(c)})"


def axiom_text(ax) -> str:
    if isinstance(ax, ConceptInc):
        return f"{concept_text(ax.sub)} <= {concept_text(ax.sup)}"
    if isinstance(ax, RelInc):
        return f"{rel_text(ax.sub)} <= {rel_text(ax.sup)}"
    if isinstance(ax, IdAttr):
        return f"id {_id_concept(ax.concept)} {name_text(ax.attr)}"
    if isinstance(ax, IdRoles):
        return f"id {_id_concept(ax.concept)} " + " ".join(rel_text(r) for r in ax.rels)
    if isinstance(ax, Fd):
        a, b = ax.determinants
        return f"fd {name_text(ax.relation)} {place_text(a)},{place_text(b)} -> {place_text(ax.dependent)}"
    raise TypeError(f"not an axiom: {ax!r}")


def _condition_text(c) -> str:
    if isinstance(c, InverseOf):
        return f"inverse {name_text(c.first)} {name_text(c.second)}"
    if isinstance(c, DisjointConcepts):
        return f"disjoint {name_text(c.first)} {name_text(c.second)}"
    if isinstance(c, Signature):
        return f"signature {name_text(c.relation)} " + " ".join(name_text(p) for p in c.players)
    if isinstance(c, ValueSet):
        return f"values {name_text(c.datatype)} " + " ".join(json.dumps(v, ensure_ascii=False)
                                                             for v in c.values)
    raise TypeError(f"not a side condition: {c!r}")


def serialize_kb_text(kb: KnowledgeBase) -> str:
    """Deterministic text of ``kb``; axioms appear in canonical order."""
    v = kb.vocabulary
    lines = [f"profile {Profile(kb.profile).value}"]
    lines += [f"datatype {name_text(n)}" for n in sorted(v.datatypes)]
    lines += [f"concept {name_text(n)}" for n in sorted(v.concepts)]
    lines += [f"attr {name_text(n)}" for n in sorted(v.attributes)]
    for r in sorted(v.relations):
        ps = v.relations[r]
        default = tuple(str(i) for i in range(1, len(ps) + 1))
        extra = "" if ps == default else " (" + ", ".join(place_text(p) for p in ps) + ")"
        lines.append(f"rel {name_text(r)}/{len(ps)}{extra}")
    lines += [f"auto {name_text(n)}" for n in sorted(v.generated)]
    lines += sorted({_condition_text(c) for c in v.conditions})
    axioms = kb.canonical().axioms
    if axioms:
        lines.append("")
        lines += [axiom_text(a) for a in axioms]
    return "\n".join(lines) + "\n"


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><=|>=|->|[\[\]():.,/])
  | (?P<int>\d+)
  | (?P<name>[^\W\d]\w*)
  | (?P<quoted>`(?:[^`]|``)*`)
  | (?P<string>"(?:[^"\\]|\\.)*")
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # op, int, name, string, end
    text: str
    col: int

    @property
    def is_name(self) -> bool:
        return self.kind == "name"


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise KBSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "quoted":
            out.append(_Tok("name", text[1:-1].replace("``", "`"), pos + 1))
        elif kind == "name":
            out.append(_Tok("keyword" if text in KEYWORDS else "name", text, pos + 1))
        elif kind == "string":
            out.append(_Tok("string", json.loads(text), pos + 1))
        elif kind != "ws":
            out.append(_Tok(kind, text, pos + 1))
        pos = m.end()
    out.append(_Tok("end", "", len(line) + 1))
    return out


def _strip_comment(line: str) -> str:
    """Drop a ``#`` comment, ignoring ``#`` inside quotes."""
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "`\"":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


class _Parser:
    def __init__(self, toks: list[_Tok], lineno: int, voc: Vocabulary):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.voc = voc

    # token helpers
    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None) -> KBSyntaxError:
        tok = tok or self.peek()
        return KBSyntaxError(msg, self.lineno, tok.col)

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "keyword") and t.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.peek().text or 'end of line'!r}")
        return self.next()

    def name(self, what: str = "name") -> str:
        t = self.peek()
        if not t.is_name:
            raise self.error(f"expected {what}, found {t.text or 'end of line'!r}")
        self.i += 1
        return t.text

    def declared(self, kind: str, what: Optional[str] = None) -> str:
        tok = self.peek()
        n = self.name(what or kind)
        if self.voc.kind_of(n) != kind:
            raise self.error(f"{n!r} is not a declared {kind}", tok)
        return n

    def integer(self) -> int:
        t = self.peek()
        if t.kind != "int":
            raise self.error(f"expected a number, found {t.text or 'end of line'!r}")
        self.i += 1
        return int(t.text)

    def place(self) -> str:
        t = self.peek()
        if t.kind not in ("int", "name"):
            raise self.error("expected a place label")
        self.i += 1
        return t.text

    def end(self) -> None:
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")

    # relations
    def starts_rel(self) -> bool:
        t = self.peek()
        if t.kind == "keyword" and t.text in ("top2", "top3", "inv", "not"):
            return True
        if t.is_name and self.voc.kind_of(t.text) == "relation":
            return True
        return self.at("(") and self.peek(1).kind in ("int", "name") and \
            self.peek(2).kind == "op" and self.peek(2).text == ":"

    def rel(self):
        t = self.peek()
        if t.kind == "keyword":
            if t.text in ("top2", "top3"):
                self.i += 1
                return TopRel(int(t.text[-1]))
            if t.text == "inv":
                self.i += 1
                self.expect("(")
                n = self.declared("relation")
                self.expect(")")
                return Inverse(n)
            if t.text == "not":
                self.i += 1
                return Complement(self.rel())
        if self.at("("):
            self.i += 1
            p = self.place()
            self.expect(":")
            c = self.concept()
            self.expect(")")
            return Selection(p, c)
        return Rel(self.declared("relation"))

    # concepts
    def concept(self):
        parts = [self.conjunction()]
        while self.at("or"):
            self.i += 1
            parts.append(self.conjunction())
        return disj(*parts) if len(parts) > 1 else parts[0]

    def conjunction(self):
        parts = [self.primary()]
        while self.at("and"):
            self.i += 1
            parts.append(self.primary())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def filler(self):
        if self.at("top"):
            self.i += 1
            return Top()
        return AtomicConcept(self.declared("concept"))

    def primary(self):
        t = self.peek()
        if self.at("top"):
            self.i += 1
            return Top()
        if self.at("("):
            self.i += 1
            c = self.concept()
            self.expect(")")
            return c
        if self.at("all") or self.at("some"):
            self.i += 1
            is_all = t.text == "all"
            nt = self.peek()
            if nt.is_name and self.voc.kind_of(nt.text) == "attribute":
                self.i += 1
                self.expect(".")
                dt = self.declared("datatype")
                return AllAttr(nt.text, dt) if is_all else SomeAttr(nt.text, dt)
            r = self.rel()
            self.expect(".")
            f = self.filler()
            return AllRel(r, f) if is_all else SomeRel(r, f)
        if self.at("<=") or self.at(">="):
            self.i += 1
            k = self.integer()
            is_max = t.text == "<="
            if self.at("["):
                self.i += 1
                p = self.place()
                self.expect("]")
                r = self.rel()
                return MaxPlace(k, p, r) if is_max else MinPlace(k, p, r)
            nt = self.peek()
            if nt.is_name and self.voc.kind_of(nt.text) == "attribute":
                self.i += 1
                if self.at("."):
                    self.i += 1
                    dt = self.declared("datatype")
                    return AttrMax(k, nt.text, dt) if is_max else AttrMin(k, nt.text, dt)
                if is_max and k == 1:
                    return AtMostOneAttr(nt.text)
                raise self.error("attribute restriction needs a datatype", nt)
            r = self.rel()
            return Max(k, r) if is_max else Min(k, r)
        if t.is_name:
            return AtomicConcept(self.declared("concept"))
        raise self.error(f"expected a concept, found {t.text or 'end of line'!r}")

    # axioms
    def axiom(self):
        if self.at("id"):
            self.i += 1
            if self.at("(") or self.at("top"):
                c = self.primary()
            else:
                c = AtomicConcept(self.declared("concept"))
            t = self.peek()
            if t.is_name and self.voc.kind_of(t.text) == "attribute":
                self.i += 1
                self.end()
                return IdAttr(c, t.text)
            rels = [self.rel()]
            while self.peek().kind != "end":
                rels.append(self.rel())
            return IdRoles(c, tuple(rels))
        if self.at("fd"):
            self.i += 1
            r = self.declared("relation")
            a = self.place()
            self.expect(",")
            b = self.place()
            self.expect("->")
            d = self.place()
            self.end()
            return Fd(r, (a, b), d)
        if self.starts_rel():
            sub = self.rel()
            self.expect("<=")
            sup = self.rel()
            self.end()
            return RelInc(sub, sup)
        sub = self.concept()
        self.expect("<=")
        sup = self.concept()
        self.end()
        return ConceptInc(sub, sup)


def parse_kb_text(text: str) -> KnowledgeBase:
    """Parse the text syntax; raises :class:`KBSyntaxError` with line and column."""
    profile: Optional[Profile] = None
    concepts: set[str] = set()
    attrs: set[str] = set()
    dts: set[str] = set()
    rels: dict[str, tuple] = {}
    generated: set[str] = set()
    raw_conditions: list[tuple[int, list[_Tok]]] = []
    axiom_lines: list[tuple[int, list[_Tok]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        toks = _tokenize(line, lineno)
        head = toks[0]
        is_decl = (head.is_name and head.text in DECLARATIONS
                   and not any(t.kind == "op" and t.text == "<=" for t in toks))
        if not is_decl:
            axiom_lines.append((lineno, toks))
            continue
        p = _Parser(toks, lineno, Vocabulary())
        p.i = 1
        kw = head.text
        if kw == "profile":
            if profile is not None:
                raise KBSyntaxError("duplicate profile line", lineno, head.col)
            tag = p.name("profile tag")
            try:
                profile = Profile(tag)
            except ValueError:
                raise KBSyntaxError(f"unknown profile {tag!r}", lineno, toks[1].col) from None
            p.end()
        elif kw in ("datatype", "concept", "attr", "auto"):
            n = p.name()
            p.end()
            {"datatype": dts, "concept": concepts, "attr": attrs, "auto": generated}[kw].add(n)
        elif kw == "rel":
            n = p.name("relation name")
            rels[n] = _rel_decl(p)
        else:
            raw_conditions.append((lineno, toks))
    if profile is None:
        raise KBSyntaxError("missing 'profile' line", 1, 1)

    voc = Vocabulary(frozenset(concepts), rels, frozenset(attrs), frozenset(dts),
                     frozenset(generated))
    try:
        voc.check()
    except VocabularyError as e:
        raise KBSyntaxError(str(e)) from None
    conditions = [_condition(_Parser(toks, n, voc)) for n, toks in raw_conditions]
    voc = Vocabulary(voc.concepts, rels, voc.attributes, voc.datatypes, voc.generated,
                     tuple(conditions))
    axioms = []
    for lineno, toks in axiom_lines:
        axioms.append(_Parser(toks, lineno, voc).axiom())
    return KnowledgeBase(profile, voc, tuple(axioms))


def _rel_decl(p: _Parser) -> tuple:
    p.expect("/")
    arity = p.integer()
    places = tuple(str(i) for i in range(1, arity + 1))
    if p.at("("):
        p.i += 1
        given = [p.place()]
        while p.at(","):
            p.i += 1
            given.append(p.place())
        p.expect(")")
        if len(given) != arity:
            raise p.error(f"{len(given)} place labels for arity {arity}")
        places = tuple(given)
    p.end()
    return places


def _condition(p: _Parser):
    kw = p.next().text
    if kw == "inverse":
        c = InverseOf(p.declared("relation"), p.declared("relation"))
    elif kw == "disjoint":
        c = DisjointConcepts(p.declared("concept"), p.declared("concept"))
    elif kw == "signature":
        r = p.declared("relation")
        players = []
        while p.peek().kind != "end":
            players.append(p.declared("concept"))
        c = Signature(r, tuple(players))
    else:
        dt = p.declared("datatype")
        values = []
        while p.peek().kind == "string":
            values.append(p.next().text)
        c = ValueSet(dt, tuple(values))
    p.end()
    return c


def read_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as f:
        return parse_kb_text(f.read())


def write_kb(kb: KnowledgeBase, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize_kb_text(kb))
