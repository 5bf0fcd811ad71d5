"""Observers, outcome relations and perfect observation.

An observer ``M`` has its own state-property space, a classical indicator
property ``i`` ("the indicated outcome is yes") and an outcome relation
``o(s, m)`` giving the possible outcomes when observer state ``m``
interacts with system state ``s``. The relation may also be produced by
composing an interaction map, a restriction back to the observer and the
indicator read-out.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping

from .errors import (
    EmptyLambda,
    ModelError,
    NonSurjective,
    NotClassical,
    PartialAlpha,
    PartialRelation,
    PremiseViolated,
    UnknownState,
)
from .spaces import (
    EITHER,
    NO,
    YES,
    OutcomeSet,
    PropertyRef,
    StatePropertySpace,
    actual_states,
    inverse_property,
    is_classical_property,
)
from .verdict import Verdict

InversionMode = Literal["relational", "strict"]
MODES = ("relational", "strict")


class CompositionMismatch(ModelError):
    pass


class NonSurjectiveWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class OutcomeRelation:
    """Total map ``(observed, observer) -> OutcomeSet``."""

    observed: tuple[str, ...]
    observers: tuple[str, ...]
    entries: Mapping[tuple[str, str], OutcomeSet]
    allow_nonsurjective: bool = False

    def __post_init__(self) -> None:
        observed = tuple(sorted(set(self.observed)))
        observers = tuple(sorted(set(self.observers)))
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "observers", observers)
        entries = {k: OutcomeSet(v) for k, v in self.entries.items()}
        object.__setattr__(self, "entries", entries)
        for m in observers:
            for s in observed:
                if (s, m) not in entries:
                    raise PartialRelation(f"no outcome for pair ({s}, {m})")
        if len(entries) != len(observed) * len(observers):
            stray = sorted(k for k in entries if k[0] not in observed or k[1] not in observers)
            raise UnknownState(f"entry {stray[0]} names an undeclared state")
        missing = surjectivity_gap(self)
        if missing:
            msg = f"outcome relation never yields {missing!r}"
            if not self.allow_nonsurjective:
                raise NonSurjective(msg)
            warnings.warn(msg, NonSurjectiveWarning, stacklevel=3)

    def __call__(self, s: str, m: str) -> OutcomeSet:
        try:
            return self.entries[(s, m)]
        except KeyError:
            raise UnknownState(f"({s}, {m}) is not a pair of declared states") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutcomeRelation):
            return NotImplemented
        return (self.observed, self.observers, dict(self.entries)) == (
            other.observed, other.observers, dict(other.entries))

    def row(self, m: str) -> tuple[OutcomeSet, ...]:
        """Outcomes of observer state ``m`` across all observed states."""
        return tuple(self(s, m) for s in self.observed)

    @classmethod
    def from_rows(cls, observed: Iterable[str], rows: Mapping[str, Iterable[OutcomeSet | str]],
                  **kw) -> "OutcomeRelation":
        observed = tuple(sorted(observed))
        entries = {}
        for m, row in rows.items():
            for s, o in zip(observed, row, strict=True):
                entries[(s, m)] = o if isinstance(o, OutcomeSet) else OutcomeSet.parse(o)
        return cls(observed, tuple(rows), entries, **kw)


def surjectivity_gap(relation: OutcomeRelation) -> str | None:
    """Return ``"yes"`` or ``"no"`` if that outcome never occurs, else None."""
    seen = set()
    for o in relation.entries.values():
        seen |= o.members
    for needed in ("yes", "no"):
        if needed not in seen:
            return needed
    return None


@dataclass(frozen=True)
class CompositionSpec:
    """Interaction ``tau``, restriction ``rho`` and read-out ``phi``."""

    compound: tuple[str, ...]
    tau: Mapping[tuple[str, str], str]
    rho: Mapping[str, str]
    phi: Mapping[str, OutcomeSet]

    @property
    def observed(self) -> tuple[str, ...]:
        return tuple(sorted({s for s, _ in self.tau}))

    @property
    def observers(self) -> tuple[str, ...]:
        return tuple(sorted({m for _, m in self.tau}))


def compose_outcome_relation(spec: CompositionSpec, *,
                             allow_nonsurjective: bool = False) -> OutcomeRelation:
    """Build ``o = phi . rho . tau`` and validate it."""
    compound = set(spec.compound)
    for s in spec.observed:
        for m in spec.observers:
            if (s, m) not in spec.tau:
                raise PartialRelation(f"tau has no image for ({s}, {m})")
    entries = {}
    for (s, m), c in spec.tau.items():
        if c not in compound:
            raise UnknownState(f"tau maps ({s}, {m}) to undeclared compound state {c!r}")
        if c not in spec.rho:
            raise PartialRelation(f"rho has no image for compound state {c!r}")
        m2 = spec.rho[c]
        if m2 not in spec.phi:
            raise PartialRelation(f"phi has no value for observer state {m2!r}")
        entries[(s, m)] = spec.phi[m2]
    return OutcomeRelation(spec.observed, spec.observers, entries,
                           allow_nonsurjective=allow_nonsurjective)


@dataclass(frozen=True, eq=False)
class ObserverModel:
    """Observer space, indicator, outcome relation and optional extras."""

    space: StatePropertySpace
    indicator: str
    relation: OutcomeRelation
    inversion: Mapping[str, str] | None = None
    composition: CompositionSpec | None = None
    id: str = field(default="M")

    def __post_init__(self) -> None:
        if tuple(self.relation.observers) != self.space.states:
            raise ModelError("relation observer states differ from the observer's states")
        if not is_classical_property(self.space, self.indicator):
            raise NotClassical(f"indicator {self.indicator!r} is not classical")
        v = indicator_partition_verdict(self.space, self.indicator)
        if not v:
            raise NotClassical(v.detail)
        if self.inversion is not None:
            check_alpha_total(self, self.inversion)
        if self.composition is not None:
            v = composition_verdict(self.space, self.indicator, self.relation, self.composition)
            if not v:
                raise CompositionMismatch(v.detail)

    def o(self, s: str, m: str) -> OutcomeSet:
        return self.relation(s, m)

    @property
    def states(self) -> tuple[str, ...]:
        return self.space.states


def indicator_partition_verdict(space: StatePropertySpace, indicator: PropertyRef) -> Verdict:
    """The indicator and its inverse must split the observer's states.

    Computed over every representative, so representatives that disagree
    show up as an overlap rather than being silently resolved.
    """
    prop = space.property(indicator)
    yes = {s for s in space.states if any(t(s) is YES for t in prop.tests)}
    no = {s for s in space.states if any(t(s) is NO for t in prop.tests)}
    both = sorted(yes & no)
    if both:
        return Verdict.failed("indicator-partition", f"state {both[0]} indicates both yes and no",
                              indicator=prop.id, state=both[0])
    neither = sorted(set(space.states) - yes - no)
    if neither:
        return Verdict.failed("indicator-partition", f"state {neither[0]} indicates neither",
                              indicator=prop.id, state=neither[0])
    return Verdict.passed("indicator-partition", indicator=prop.id)


def composition_verdict(space: StatePropertySpace, indicator: str, relation: OutcomeRelation,
                        spec: CompositionSpec) -> Verdict:
    """The composition must reproduce the relation and honour the indicator."""
    kappa_i = actual_states(space, indicator)
    for m in sorted(spec.phi):
        want = YES if m in kappa_i else NO
        if spec.phi[m] is not want:
            return Verdict.failed("composition-indicator",
                                  f"phi({m}) = {spec.phi[m]} but the indicator says {want}",
                                  state=m)
    composed = compose_outcome_relation(spec, allow_nonsurjective=True)
    rel = relation
    if (composed.observed, composed.observers) != (rel.observed, rel.observers):
        return Verdict.failed("composition-domain", "composition and relation range over different states")
    for m in rel.observers:
        for s in rel.observed:
            if composed(s, m) is not rel(s, m):
                return Verdict.failed("composition-mismatch",
                                      f"composed o({s},{m}) = {composed(s, m)}, declared {rel(s, m)}",
                                      pair=(s, m))
    return Verdict.passed("composition")


def check_alpha_total(model: ObserverModel, alpha: Mapping[str, str]) -> None:
    for m in model.states:
        if m not in alpha:
            raise PartialAlpha(f"alpha has no image for {m!r}")
        if alpha[m] not in model.space._index:
            raise PartialAlpha(f"alpha maps {m!r} outside the observer's states")


def _check_system(model: ObserverModel, system: StatePropertySpace) -> None:
    if tuple(model.relation.observed) != system.states:
        raise ModelError(f"relation is not over the states of {system.id!r}")


def is_perfect(model: ObserverModel, system: StatePropertySpace, m: str, a: PropertyRef,
               *, classical: bool = False) -> bool:
    """Whether observer state ``m`` answers yes with certainty wherever ``a`` is actual.

    Outside the Cartan image of ``a`` nothing is required. With
    ``classical=True`` (``a`` must be classical) the answer must also be a
    certain no wherever ``a``'s inverse is actual.
    """
    _check_system(model, system)
    model.space.check_state(m)
    ka = actual_states(system, a)
    if any(model.o(s, m) is not YES for s in ka):
        return False
    if classical:
        if not is_classical_property(system, a):
            raise NotClassical(f"property {system.property(a).id!r} is not classical")
        kinv = actual_states(system, inverse_property(system, a))
        return all(model.o(s, m) is NO for s in kinv)
    return True


def is_lambda_perfect(model: ObserverModel, system: StatePropertySpace, m: str,
                      lam: Iterable[PropertyRef]) -> bool:
    lam = list(lam)
    if not lam:
        raise EmptyLambda("perfectness needs a nonempty collection of properties")
    return all(is_perfect(model, system, m, a) for a in lam)


def _row_is_swap(model: ObserverModel, m: str, mstar: str, mode: str) -> tuple[bool, str | None]:
    for s in model.relation.observed:
        o, o2 = model.o(s, m), model.o(s, mstar)
        if mode == "strict" and not o.single:
            return False, s
        if o2 is not o.swap():
            return False, s
    return True, None


def is_inversion(model: ObserverModel, alpha: Mapping[str, str],
                 mode: InversionMode = "relational") -> Verdict:
    """Check that ``alpha`` swaps every outcome row.

    Relational mode requires ``o(s, alpha(m)) = swap(o(s, m))``; strict mode
    additionally requires every entry to be single-valued, so that the
    outcomes under ``m`` and ``alpha(m)`` differ literally.
    """
    if mode not in MODES:
        raise ValueError(f"unknown inversion mode {mode!r}")
    check_alpha_total(model, alpha)
    for m in model.states:
        ok, s = _row_is_swap(model, m, alpha[m], mode)
        if not ok:
            o = model.o(s, m)
            reason = ("two-valued entry" if mode == "strict" and not o.single
                      else f"o({s},{alpha[m]}) = {model.o(s, alpha[m])} is not the swap of {o}")
            return Verdict.failed("inversion", reason, pair=(s, m), image=alpha[m])
    return Verdict.passed("inversion")


def find_inversions(model: ObserverModel, m: str,
                    mode: InversionMode = "relational") -> tuple[str, ...]:
    """All observer states whose outcome row is the swap of ``m``'s row."""
    model.space.check_state(m)
    return tuple(ms for ms in model.states if _row_is_swap(model, m, ms, mode)[0])


def _biconditional_witness(model: ObserverModel, system: StatePropertySpace, m: str,
                           ka: frozenset[str]) -> str | None:
    for s in system.states:
        want = YES if s in ka else NO
        if model.o(s, m) is not want:
            return s
    return None


def is_classical_perfect(model: ObserverModel, system: StatePropertySpace, m: str,
                         a: PropertyRef, mode: InversionMode = "relational") -> Verdict:
    """``m`` is a-perfect and has an inversion image that is perfect for ``a``'s inverse.

    On success the witness names the inversion image used (the model's
    ``alpha(m)`` when it qualifies, otherwise the least qualifying state).
    """
    _check_system(model, system)
    if not is_classical_property(system, a):
        raise NotClassical(f"property {system.property(a).id!r} is not classical")
    aid = system.property(a).id
    ka = actual_states(system, a)
    if not is_perfect(model, system, m, a):
        s = min(s for s in ka if model.o(s, m) is not YES)
        return Verdict.failed("classical-perfect(i)", f"o({s},{m}) = {model.o(s, m)} where {aid} is actual",
                              state=m, property=aid, observed=s)
    perp = inverse_property(system, a)
    images = [ms for ms in find_inversions(model, m, mode) if is_perfect(model, system, ms, perp)]
    if not images:
        return Verdict.failed("classical-perfect(ii)", f"no inversion image of {m} is perfect for {perp.id}",
                              state=m, property=aid)
    s = _biconditional_witness(model, system, m, ka)
    if s is not None:
        return Verdict.failed("classical-perfect(iii)",
                              f"o({s},{m}) = {model.o(s, m)} breaks the classical correlation",
                              state=m, property=aid, observed=s)
    alpha = model.inversion or {}
    mstar = alpha[m] if alpha.get(m) in images else images[0]
    return Verdict.passed("classical-perfect", state=m, property=aid, image=mstar)


def is_knowledgable(model: ObserverModel, system: StatePropertySpace) -> Verdict:
    """Every property actual in some system state has a perfectly observing state.

    Perfectness for a classical property carries the certain-no clause as
    well; for a non-classical one only the certain-yes clause applies.
    """
    _check_system(model, system)
    for s in system.states:
        for pid in sorted(system.properties):
            if s not in actual_states(system, pid):
                continue
            classical = is_classical_property(system, pid)
            if not any(is_perfect(model, system, m, pid, classical=classical) for m in model.states):
                return Verdict.failed("knowledgable", f"no observer state perfectly observes {pid}",
                                      observed=s, property=pid)
    return Verdict.passed("knowledgable")


def verify_theorem1(model: ObserverModel, system: StatePropertySpace, a: PropertyRef,
                    mode: InversionMode = "relational") -> Verdict:
    """For a valid inversion ``alpha``: m is a-perfect iff alpha(m) is perfect for a's inverse."""
    if not is_classical_property(system, a):
        raise NotClassical(f"property {system.property(a).id!r} is not classical")
    if model.inversion is None:
        raise PremiseViolated("model has no inversion map")
    inv = is_inversion(model, model.inversion, mode)
    if not inv:
        raise PremiseViolated(f"alpha is not an inversion: {inv.detail}")
    perp = inverse_property(system, a)
    alpha = model.inversion
    for m in model.states:
        left = is_perfect(model, system, m, a, classical=True)
        right = is_perfect(model, system, alpha[m], perp, classical=True)
        if left != right:
            return Verdict.failed("theorem1", f"{m} a-perfect={left}, alpha({m}) perp-perfect={right}",
                                  state=m, image=alpha[m])
    return Verdict.passed("theorem1", property=system.property(a).id)


def verify_theorem2(model: ObserverModel, system: StatePropertySpace, a: PropertyRef,
                    m: str, mstar: str, mode: InversionMode = "relational") -> Verdict:
    """If m is a-perfect and mstar is perfect for a's inverse, mstar inverts m."""
    if not is_classical_property(system, a):
        raise NotClassical(f"property {system.property(a).id!r} is not classical")
    perp = inverse_property(system, a)
    if not is_perfect(model, system, m, a, classical=True):
        raise PremiseViolated(f"{m} is not perfect for {system.property(a).id}")
    if not is_perfect(model, system, mstar, perp, classical=True):
        raise PremiseViolated(f"{mstar} is not perfect for {perp.id}")
    if mstar in find_inversions(model, m, mode):
        return Verdict.passed("theorem2", state=m, image=mstar)
    return Verdict.failed("theorem2", f"{mstar} is not an inversion of {m}", state=m, image=mstar)


def perfect_pairs(model: ObserverModel, system: StatePropertySpace,
                  a: PropertyRef) -> list[tuple[str, str]]:
    """All (m, m*) with m a-perfect and m* perfect for a's inverse (classical sense)."""
    perp = inverse_property(system, a)
    ms = [m for m in model.states if is_perfect(model, system, m, a, classical=True)]
    mss = [m for m in model.states if is_perfect(model, system, m, perp, classical=True)]
    return [(m, x) for m in ms for x in mss]


__all__ = [
    "CompositionMismatch", "CompositionSpec", "EITHER", "InversionMode", "NonSurjectiveWarning",
    "ObserverModel", "OutcomeRelation", "compose_outcome_relation", "composition_verdict",
    "find_inversions", "indicator_partition_verdict", "is_classical_perfect", "is_inversion",
    "is_knowledgable", "is_lambda_perfect", "is_perfect", "perfect_pairs", "surjectivity_gap",
    "verify_theorem1", "verify_theorem2",
]
