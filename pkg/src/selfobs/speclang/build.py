"""Turn a parsed document into model objects, and validate it."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from ..diagonal import SelfModel
from ..errors import EmptySpace, InconsistentEquivalenceClass, ModelError, NonSurjective
from ..observation import (
    CompositionSpec,
    NonSurjectiveWarning,
    ObserverModel,
    OutcomeRelation,
    composition_verdict,
    indicator_partition_verdict,
)
from ..spaces import (
    Property,
    StatePropertySpace,
    Test,
    classicality_verdict,
    is_classical_property,
)
from ..verdict import Verdict
from .parser import resolve
from .ast import CompositionBlock, ModelDocument, ObserverBlock, RelationBlock, SystemBlock


def space_from_block(b: SystemBlock | ObserverBlock) -> StatePropertySpace:
    tests = {t.id: Test(t.id, dict(t.outcomes)) for t in b.tests}
    props = {p.id: Property(p.id, tuple(tests[r] for r in p.tests)) for p in b.properties}
    return StatePropertySpace(b.states, tests, props, b.id)


def relation_from_block(r: RelationBlock, allow_nonsurjective: bool = False) -> OutcomeRelation:
    observed = {s for s, _ in r.table()}
    observers = {m for _, m in r.table()}
    return OutcomeRelation(tuple(observed), tuple(observers), r.table(),
                           allow_nonsurjective=allow_nonsurjective)


def composition_from_block(c: CompositionBlock) -> CompositionSpec:
    return CompositionSpec(c.compound, dict(c.tau), dict(c.rho), dict(c.phi))


@dataclass
class Workspace:
    """Model objects built from one or more documents."""

    doc: ModelDocument
    spaces: dict[str, StatePropertySpace] = field(default_factory=dict)
    observers: dict[str, ObserverModel] = field(default_factory=dict)
    systems: dict[str, StatePropertySpace] = field(default_factory=dict)

    def relation_ids(self) -> list[str]:
        return sorted(self.observers)

    def pick(self, rid: str | None) -> str:
        if rid is not None:
            if rid not in self.observers:
                raise ModelError(f"no relation named {rid!r}")
            return rid
        if not self.observers:
            raise ModelError("document declares no relation")
        if len(self.observers) > 1:
            raise ModelError(f"several relations ({', '.join(self.relation_ids())}); choose one")
        return self.relation_ids()[0]

    def self_model(self, rid: str, focus: str | None = None, mode: str = "relational") -> SelfModel:
        return SelfModel(self.observers[rid], focus, mode)

    def is_square(self, rid: str) -> bool:
        r = self.doc.relation(rid)
        return r.observed == r.observer


def load(doc: ModelDocument, allow_nonsurjective: bool = False) -> Workspace:
    """Build spaces and one observer model per relation; raises on invalid input."""
    ws = Workspace(doc)
    for b in doc.systems + doc.observers:
        ws.spaces[b.id] = space_from_block(b)
    for r in doc.relations:
        obs = doc.observer(r.observer)
        invs = doc.inversions_on(r.observer)
        comp = doc.composition(r.id)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonSurjectiveWarning)
            rel = relation_from_block(r, allow_nonsurjective)
        ws.observers[r.id] = ObserverModel(
            ws.spaces[obs.id], obs.indicator, rel,
            inversion=dict(invs[0].mapping) if invs else None,
            composition=composition_from_block(comp) if comp else None,
            id=obs.id,
        )
        ws.systems[r.id] = ws.spaces[r.observed]
    return ws


def merge(docs: list[ModelDocument]) -> ModelDocument:
    """Combine documents; ids must stay unique across all of them."""
    doc = ModelDocument(*(tuple(sorted(sum((getattr(d, f) for d in docs), ()), key=lambda b: b.id))
                          for f in ("systems", "observers", "relations", "inversions", "compositions")))
    resolve(doc)
    return doc


def validate(doc: ModelDocument, allow_nonsurjective: bool = False) -> list[Verdict]:
    """Structural checks on a parsed document; an empty list means valid.

    With ``allow_nonsurjective`` a relation that never yields one of the
    outcomes is reported as a warning instead of an error.
    """
    out: list[Verdict] = []

    def bad(v: Verdict, where, **extra) -> None:
        w = dict(v.witness, where=str(where), **extra)
        out.append(Verdict(v.check, False, v.detail, w, v.severity))

    spaces: dict[str, StatePropertySpace] = {}
    for b in doc.systems + doc.observers:
        try:
            sp = space_from_block(b)
        except EmptySpace as exc:
            bad(Verdict.failed("nonempty-space", str(exc)), b.span, entity=b.id)
            continue
        spaces[b.id] = sp
        for p in b.properties:
            try:
                classical = is_classical_property(sp, p.id)
            except InconsistentEquivalenceClass as exc:
                bad(Verdict.failed("equivalence-class", str(exc)), p.span, entity=b.id, property=p.id)
                continue
            if classical:
                v = classicality_verdict(sp, p.id)
                if not v:
                    bad(v, p.span, entity=b.id)
        if isinstance(b, ObserverBlock):
            try:
                ok = is_classical_property(sp, b.indicator)
            except InconsistentEquivalenceClass:
                ok = False
            if not ok:
                bad(Verdict.failed("indicator-classical", f"indicator {b.indicator!r} is not classical"),
                    b.span, entity=b.id)
            v = indicator_partition_verdict(sp, b.indicator)
            if not v:
                bad(v, b.span, entity=b.id)

    for r in doc.relations:
        gap = surjectivity_gap_of(r)
        if gap:
            v = Verdict("surjective", False, f"relation {r.id} never yields {gap}", {},
                        "warning" if allow_nonsurjective else "error")
            bad(v, r.span, relation=r.id)

    for c in doc.compositions:
        r = doc.relation(c.id)
        obs = doc.observer(r.observer)
        if obs.id not in spaces or any(v.check == "indicator-classical" and v.witness.get("entity") == obs.id
                                       for v in out):
            continue
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonSurjectiveWarning)
                v = composition_verdict(spaces[obs.id], obs.indicator, relation_from_block(r, True),
                                        composition_from_block(c))
        except (ModelError, NonSurjective) as exc:
            v = Verdict.failed("composition", str(exc))
        if not v:
            bad(v, c.span, relation=c.id)
    return out


def surjectivity_gap_of(r: RelationBlock) -> str | None:
    seen = set()
    for _, o in r.entries:
        seen |= o.members
    return next((x for x in ("yes", "no") if x not in seen), None)


__all__ = ["Workspace", "load", "merge", "validate", "space_from_block"]
