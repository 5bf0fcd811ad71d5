"""Lexer and recursive-descent parser for ``.spm`` documents.

Grammar::

    document   := block+
    block      := system | observer | relation | inversion | composition
    system     := "system" ID "{" "states" ID+ ";" test* property* "}"
    test       := "test" ID "{" (ID "->" outcome ";")+ "}"
    outcome    := "yes" | "no" | "yes|no"
    property   := "property" ID "{" "tests" ID+ ";" "}"
    observer   := "observer" ID "{" "states" ID+ ";" "indicator" ID ";" test* property* "}"
    relation   := "relation" ID "(" ID "," ID ")" "{" ("(" ID "," ID ")" "=" outcome ";")+ "}"
    inversion  := "inversion" ID "on" ID "{" (ID "->" ID ";")+ "}"
    composition:= "composition" ID "{" "compound" ID+ ";"
                  "tau" "{" ("(" ID "," ID ")" "->" ID ";")+ "}"
                  "rho" "{" (ID "->" ID ";")+ "}"
                  "phi" "{" (ID "->" outcome ";")+ "}" "}"

``#`` starts a comment running to the end of the line. Identifiers use
ASCII letters, digits, ``_``, ``+`` and ``-``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..spaces import OutcomeSet
from .ast import (
    CompositionBlock,
    InversionBlock,
    ModelDocument,
    ObserverBlock,
    PropertyDecl,
    RelationBlock,
    Span,
    SystemBlock,
    TestDecl,
    canonical,
)

BLOCK_KEYWORDS = ("system", "observer", "relation", "inversion", "composition")
ID_CHARS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_+-")
PUNCT = "{}(),;=|"


class ParseError(Exception):
    """Base for all document errors; carries a 1-based position."""

    def __init__(self, message: str, span: Span, expected: Iterable[str] = ()):
        self.span = span
        self.expected = tuple(expected)
        self.message = message
        super().__init__(f"{span}: {message}")

    @property
    def line(self) -> int:
        return self.span.line

    @property
    def col(self) -> int:
        return self.span.col

    @property
    def kind(self) -> str:
        return type(self).__name__


class SpecSyntaxError(ParseError):
    pass


class DuplicateId(ParseError):
    pass


class UnresolvedReference(ParseError):
    pass


class NonTotalTable(ParseError):
    pass


class EmptyOutcome(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "->", one of PUNCT, or "eof"
    value: str
    span: Span

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.value)


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r\f\v":
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        span = Span(line, col)
        if c == "-" and text.startswith("->", i):
            toks.append(Token("->", "->", span))
            i, col = i + 2, col + 2
            continue
        if c in PUNCT:
            toks.append(Token(c, c, span))
            i, col = i + 1, col + 1
            continue
        if c in ID_CHARS:
            j = i
            while j < n and text[j] in ID_CHARS and not text.startswith("->", j):
                j += 1
            toks.append(Token("id", text[i:j], span))
            col += j - i
            i = j
            continue
        raise SpecSyntaxError(f"unexpected character {c!r}", span)
    toks.append(Token("eof", "", Span(line, col)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def _fail(self, expected: Iterable[str]) -> SpecSyntaxError:
        exp = tuple(expected)
        shown = ", ".join(f"'{e}'" if e != "identifier" else e for e in exp)
        return SpecSyntaxError(f"expected {shown}, found {self.tok.describe()}", self.tok.span, exp)

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "id" and self.tok.value in words

    def kw(self, word: str) -> Token:
        if not self.at_kw(word):
            raise self._fail([word])
        return self._advance()

    def punct(self, p: str) -> Token:
        if self.tok.kind != p:
            raise self._fail([p])
        return self._advance()

    def ident(self) -> Token:
        if self.tok.kind != "id":
            raise self._fail(["identifier"])
        return self._advance()

    def _advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def ids_until_semicolon(self) -> list[Token]:
        out = [self.ident()]
        while self.tok.kind == "id":
            out.append(self._advance())
        self.punct(";")
        return out

    def outcome(self) -> OutcomeSet:
        if self.tok.kind == ";":
            raise EmptyOutcome("missing outcome before ';'", self.tok.span, ("yes", "no", "yes|no"))
        if not self.at_kw("yes", "no"):
            raise self._fail(["yes", "no", "yes|no"])
        first = self._advance().value
        if self.tok.kind == "|":
            if first != "yes":
                raise self._fail([";"])
            self._advance()
            self.kw("no")
            return OutcomeSet.EITHER
        return OutcomeSet.parse(first)

    # blocks ---------------------------------------------------------

    def document(self) -> ModelDocument:
        blocks: dict[str, list] = {k: [] for k in BLOCK_KEYWORDS}
        if self.tok.kind == "eof":
            raise self._fail(BLOCK_KEYWORDS)
        while self.tok.kind != "eof":
            if not self.at_kw(*BLOCK_KEYWORDS):
                raise self._fail(BLOCK_KEYWORDS)
            kw = self.tok.value
            blocks[kw].append(getattr(self, kw)())
        return ModelDocument(
            systems=canonical(blocks["system"], key=lambda b: b.id),
            observers=canonical(blocks["observer"], key=lambda b: b.id),
            relations=canonical(blocks["relation"], key=lambda b: b.id),
            inversions=canonical(blocks["inversion"], key=lambda b: b.id),
            compositions=canonical(blocks["composition"], key=lambda b: b.id),
        )

    def _space_body(self, with_indicator: bool):
        self.kw("states")
        states = _unique(self.ids_until_semicolon(), "state")
        indicator = None
        if with_indicator:
            self.kw("indicator")
            indicator = self.ident()
            self.punct(";")
        tests: list[TestDecl] = []
        props: list[PropertyDecl] = []
        while self.at_kw("test"):
            tests.append(self.test())
        while self.at_kw("property"):
            props.append(self.property())
        if self.tok.kind != "}":
            raise self._fail(["test", "property", "}"] if not props else ["property", "}"])
        self._advance()
        return states, indicator, tests, props

    def system(self) -> SystemBlock:
        start = self.kw("system").span
        name = self.ident().value
        self.punct("{")
        states, _, tests, props = self._space_body(False)
        return SystemBlock(name, canonical(states), canonical(tests, key=lambda t: t.id),
                           canonical(props, key=lambda p: p.id), start)

    def observer(self) -> ObserverBlock:
        start = self.kw("observer").span
        name = self.ident().value
        self.punct("{")
        states, indicator, tests, props = self._space_body(True)
        blk = ObserverBlock(name, canonical(states), indicator.value,
                            canonical(tests, key=lambda t: t.id),
                            canonical(props, key=lambda p: p.id), start)
        object.__setattr__(blk, "_indicator_span", indicator.span)
        return blk

    def test(self) -> TestDecl:
        start = self.kw("test").span
        name = self.ident().value
        self.punct("{")
        entries = self._table(lambda: self.ident(), "->", self.outcome)
        return TestDecl(name, entries, start)

    def property(self) -> PropertyDecl:
        start = self.kw("property").span
        name = self.ident().value
        self.punct("{")
        self.kw("tests")
        reps = self.ids_until_semicolon()
        self.punct("}")
        decl = PropertyDecl(name, canonical(_unique(reps, "representative")), start)
        object.__setattr__(decl, "_ref_spans", {t.value: t.span for t in reps})
        return decl

    def pair(self) -> tuple[tuple[str, str], Span]:
        sp = self.punct("(").span
        a = self.ident().value
        self.punct(",")
        b = self.ident().value
        self.punct(")")
        return (a, b), sp

    def _table(self, key, sep: str, value):
        """Parse ``(key sep value ;)+ }`` into sorted (key, value) pairs."""
        rows: dict = {}
        spans: dict = {}
        while True:
            k = key()
            if isinstance(k, Token):
                k, sp = k.value, k.span
            else:
                k, sp = k
            if sep == "=":
                self.punct("=")
            else:
                self.punct("->")
            v = value()
            if isinstance(v, Token):
                v = v.value
            self.punct(";")
            if k in rows:
                raise DuplicateId(f"entry for {_show(k)} given twice", sp)
            rows[k] = v
            spans[k] = sp
            if self.tok.kind == "}":
                self._advance()
                break
        out = canonical(rows.items(), key=lambda kv: kv[0])
        self._last_spans = spans
        return out

    def relation(self) -> RelationBlock:
        start = self.kw("relation").span
        name = self.ident().value
        self.punct("(")
        observed = self.ident().value
        self.punct(",")
        observer = self.ident().value
        self.punct(")")
        self.punct("{")
        entries = self._table(self.pair, "=", self.outcome)
        blk = RelationBlock(name, observed, observer, entries, start)
        object.__setattr__(blk, "_entry_spans", self._last_spans)
        return blk

    def inversion(self) -> InversionBlock:
        start = self.kw("inversion").span
        name = self.ident().value
        self.kw("on")
        target = self.ident().value
        self.punct("{")
        mapping = self._table(self.ident, "->", self.ident)
        blk = InversionBlock(name, target, mapping, start)
        object.__setattr__(blk, "_entry_spans", self._last_spans)
        return blk

    def composition(self) -> CompositionBlock:
        start = self.kw("composition").span
        name = self.ident().value
        self.punct("{")
        self.kw("compound")
        compound = canonical(_unique(self.ids_until_semicolon(), "compound state"))
        spans = {}
        self.kw("tau")
        self.punct("{")
        tau = self._table(self.pair, "->", self.ident)
        spans["tau"] = self._last_spans
        self.kw("rho")
        self.punct("{")
        rho = self._table(self.ident, "->", self.ident)
        spans["rho"] = self._last_spans
        self.kw("phi")
        self.punct("{")
        phi = self._table(self.ident, "->", self.outcome)
        spans["phi"] = self._last_spans
        self.punct("}")
        blk = CompositionBlock(name, compound, tau, rho, phi, start)
        object.__setattr__(blk, "_entry_spans", spans)
        return blk


def _show(k) -> str:
    return f"({k[0]}, {k[1]})" if isinstance(k, tuple) else repr(k)


def _unique(tokens: list[Token], what: str) -> list[str]:
    seen: set[str] = set()
    for t in tokens:
        if t.value in seen:
            raise DuplicateId(f"{what} {t.value!r} declared twice", t.span)
        seen.add(t.value)
    return [t.value for t in tokens]


def parse(text: str) -> ModelDocument:
    """Parse and resolve a document; raise the first :class:`ParseError` found."""
    doc = _Parser(text).document()
    resolve(doc)
    return doc


def _spans(node, attr: str) -> dict:
    return getattr(node, attr, {}) or {}


def resolve(doc: ModelDocument) -> None:
    """Check ids are unique, references resolve and every table is total."""
    seen: dict[str, Span] = {}
    for b in doc.systems + doc.observers:
        if b.id in seen:
            raise DuplicateId(f"entity {b.id!r} already declared at {seen[b.id]}", b.span)
        seen[b.id] = b.span
    for group, what in ((doc.relations, "relation"), (doc.inversions, "inversion"),
                        (doc.compositions, "composition")):
        ids: dict[str, Span] = {}
        for b in group:
            if b.id in ids:
                raise DuplicateId(f"{what} {b.id!r} already declared at {ids[b.id]}", b.span)
            ids[b.id] = b.span

    for b in doc.systems + doc.observers:
        states = set(b.states)
        tids: dict[str, Span] = {}
        for t in b.tests:
            if t.id in tids:
                raise DuplicateId(f"test {t.id!r} declared twice in {b.id!r}", t.span)
            tids[t.id] = t.span
            table = dict(t.outcomes)
            for s in table:
                if s not in states:
                    raise UnresolvedReference(f"test {t.id!r} names unknown state {s!r}", t.span)
            for s in b.states:
                if s not in table:
                    raise NonTotalTable(f"test {t.id!r} has no outcome for state {s!r}", t.span)
        pids: set[str] = set()
        for p in b.properties:
            if p.id in pids:
                raise DuplicateId(f"property {p.id!r} declared twice in {b.id!r}", p.span)
            pids.add(p.id)
            for tid in p.tests:
                if tid not in tids:
                    sp = _spans(p, "_ref_spans").get(tid, p.span)
                    raise UnresolvedReference(f"property {p.id!r} cites unknown test {tid!r}", sp)
        if isinstance(b, ObserverBlock) and b.indicator not in pids:
            sp = getattr(b, "_indicator_span", b.span)
            raise UnresolvedReference(f"indicator {b.indicator!r} is not a property of {b.id!r}", sp)

    for r in doc.relations:
        sys_blk = doc.space_block(r.observed)
        if sys_blk is None:
            raise UnresolvedReference(f"relation {r.id!r} observes unknown entity {r.observed!r}", r.span)
        obs_blk = doc.observer(r.observer)
        if obs_blk is None:
            raise UnresolvedReference(f"relation {r.id!r} names unknown observer {r.observer!r}", r.span)
        _check_pairs(r.id, dict(r.entries), sys_blk.states, obs_blk.states, _spans(r, "_entry_spans"), r.span)

    for inv in doc.inversions:
        obs_blk = doc.observer(inv.observer)
        if obs_blk is None:
            raise UnresolvedReference(f"inversion {inv.id!r} is on unknown observer {inv.observer!r}", inv.span)
        table = dict(inv.mapping)
        sp = _spans(inv, "_entry_spans")
        for m, img in inv.mapping:
            if m not in obs_blk.states:
                raise UnresolvedReference(f"inversion {inv.id!r} maps unknown state {m!r}", sp.get(m, inv.span))
            if img not in obs_blk.states:
                raise UnresolvedReference(f"inversion {inv.id!r} maps {m!r} to unknown state {img!r}",
                                          sp.get(m, inv.span))
        for m in obs_blk.states:
            if m not in table:
                raise NonTotalTable(f"inversion {inv.id!r} has no image for {m!r}", inv.span)

    for c in doc.compositions:
        rel = doc.relation(c.id)
        if rel is None:
            raise UnresolvedReference(f"composition {c.id!r} does not name a relation", c.span)
        sys_blk = doc.space_block(rel.observed)
        obs_blk = doc.observer(rel.observer)
        sp = _spans(c, "_entry_spans")
        compound = set(c.compound)
        _check_pairs(f"{c.id}.tau", dict(c.tau), sys_blk.states, obs_blk.states, sp.get("tau", {}), c.span)
        for k, img in c.tau:
            if img not in compound:
                raise UnresolvedReference(f"tau maps {_show(k)} to unknown compound state {img!r}",
                                          sp.get("tau", {}).get(k, c.span))
        rho = dict(c.rho)
        for k, img in c.rho:
            where = sp.get("rho", {}).get(k, c.span)
            if k not in compound:
                raise UnresolvedReference(f"rho maps unknown compound state {k!r}", where)
            if img not in obs_blk.states:
                raise UnresolvedReference(f"rho maps {k!r} to unknown observer state {img!r}", where)
        for k in c.compound:
            if k not in rho:
                raise NonTotalTable(f"rho has no image for compound state {k!r}", c.span)
        phi = dict(c.phi)
        for k, _ in c.phi:
            if k not in obs_blk.states:
                raise UnresolvedReference(f"phi names unknown observer state {k!r}",
                                          sp.get("phi", {}).get(k, c.span))
        for m in obs_blk.states:
            if m not in phi:
                raise NonTotalTable(f"phi has no value for observer state {m!r}", c.span)


def _check_pairs(name: str, table: dict, observed, observers, spans: dict, span: Span) -> None:
    obs_set, m_set = set(observed), set(observers)
    for (s, m) in table:
        if s not in obs_set or m not in m_set:
            bad = s if s not in obs_set else m
            raise UnresolvedReference(f"{name}: unknown state {bad!r} in pair ({s}, {m})",
                                      spans.get((s, m), span))
    for m in observers:
        for s in observed:
            if (s, m) not in table:
                raise NonTotalTable(f"{name}: missing entry for pair ({s}, {m})", span)
