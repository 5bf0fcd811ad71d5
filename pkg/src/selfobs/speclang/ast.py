"""Syntax tree of ``.spm`` model documents.

Collections are stored in canonical (sorted) order as tuples, so two
documents that differ only in the order of their entries compare equal.
Source spans are carried along but excluded from equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..spaces import OutcomeSet


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOSPAN = Span(0, 0)


def _span() -> Span:
    return field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class TestDecl:
    id: str
    outcomes: tuple[tuple[str, OutcomeSet], ...]
    span: Span = _span()


@dataclass(frozen=True)
class PropertyDecl:
    id: str
    tests: tuple[str, ...]
    span: Span = _span()


@dataclass(frozen=True)
class SystemBlock:
    id: str
    states: tuple[str, ...]
    tests: tuple[TestDecl, ...] = ()
    properties: tuple[PropertyDecl, ...] = ()
    span: Span = _span()


@dataclass(frozen=True)
class ObserverBlock:
    id: str
    states: tuple[str, ...]
    indicator: str
    tests: tuple[TestDecl, ...] = ()
    properties: tuple[PropertyDecl, ...] = ()
    span: Span = _span()


@dataclass(frozen=True)
class RelationBlock:
    id: str
    observed: str
    observer: str
    entries: tuple[tuple[tuple[str, str], OutcomeSet], ...]
    span: Span = _span()

    def table(self) -> dict[tuple[str, str], OutcomeSet]:
        return dict(self.entries)


@dataclass(frozen=True)
class InversionBlock:
    id: str
    observer: str
    mapping: tuple[tuple[str, str], ...]
    span: Span = _span()


@dataclass(frozen=True)
class CompositionBlock:
    """Composition for the relation with the same id."""

    id: str
    compound: tuple[str, ...]
    tau: tuple[tuple[tuple[str, str], str], ...]
    rho: tuple[tuple[str, str], ...]
    phi: tuple[tuple[str, OutcomeSet], ...]
    span: Span = _span()


@dataclass(frozen=True)
class ModelDocument:
    systems: tuple[SystemBlock, ...] = ()
    observers: tuple[ObserverBlock, ...] = ()
    relations: tuple[RelationBlock, ...] = ()
    inversions: tuple[InversionBlock, ...] = ()
    compositions: tuple[CompositionBlock, ...] = ()

    def space_block(self, sid: str) -> SystemBlock | ObserverBlock | None:
        for b in self.systems + self.observers:
            if b.id == sid:
                return b
        return None

    def observer(self, oid: str) -> ObserverBlock | None:
        return next((b for b in self.observers if b.id == oid), None)

    def relation(self, rid: str) -> RelationBlock | None:
        return next((b for b in self.relations if b.id == rid), None)

    def composition(self, rid: str) -> CompositionBlock | None:
        return next((b for b in self.compositions if b.id == rid), None)

    def inversions_on(self, oid: str) -> tuple[InversionBlock, ...]:
        return tuple(b for b in self.inversions if b.observer == oid)


def canonical(items, key=None) -> tuple:
    return tuple(sorted(items, key=key))
