"""Self-observation: an observer whose observed system is itself.

For a classical focus property ``a`` of the observer, the derived property
``p_a`` ("this state is a-classical perfect") is again a property of the
observer's own states. The observer can only learn whether it has ``p_a``
by observing itself, which makes the diagonal entries ``o(m, m)`` the
relevant outcomes. :func:`diagonal_contradiction` instantiates the
correlations a ``p_a``-classical-perfect state would have to satisfy and
records, step by step, how they force one diagonal entry to be both yes
and no.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

from .errors import ModelError, NotClassical, NotClassicalFocus, PremiseViolated
from .observation import InversionMode, ObserverModel, find_inversions, is_classical_perfect
from .spaces import NO, YES, OutcomeSet, actual_states, inverse_property, is_classical_property
from .verdict import Verdict

Quantify = Literal["diagonal", "full"]
CertificateKind = Literal["contradiction", "premise_unsatisfiable", "counterexample", "pass"]


@dataclass(frozen=True, eq=False)
class SelfModel:
    observer: ObserverModel
    focus: str | None = None
    mode: InversionMode = "relational"

    def __post_init__(self) -> None:
        rel = self.observer.relation
        if rel.observed != rel.observers:
            raise ModelError("a self model needs a square relation over the observer's own states")
        if self.focus is None:
            object.__setattr__(self, "focus", self.observer.indicator)
        try:
            classical = is_classical_property(self.space, self.focus)
        except NotClassical as exc:  # pragma: no cover - defensive
            raise NotClassicalFocus(str(exc)) from None
        if not classical:
            raise NotClassicalFocus(f"focus {self.focus!r} is not classical")

    @property
    def space(self):
        return self.observer.space

    @property
    def states(self) -> tuple[str, ...]:
        return self.observer.states

    def o(self, s: str, m: str) -> OutcomeSet:
        return self.observer.o(s, m)


@dataclass(frozen=True)
class PaPartition:
    pa_states: frozenset[str]
    pa_perp_states: frozenset[str]


@dataclass(frozen=True)
class TraceStep:
    """One instantiated claim of a diagonal argument.

    ``values`` holds what the model says at the witness states, so a step
    can be re-evaluated later (see :func:`replay_certificate`).
    """

    claim: str
    equation: str
    witnesses: tuple[str, ...]
    values: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"claim": self.claim, "equation": self.equation,
                "witnesses": list(self.witnesses), "values": self.values}


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    trace: tuple[TraceStep, ...] = ()
    focus: str = ""
    quantify: str = "diagonal"
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        out = {"kind": self.kind, "focus": self.focus, "quantify": self.quantify,
               "trace": [t.to_dict() for t in self.trace]}
        if self.note:
            out["note"] = self.note
        return out


def derive_pa(sm: SelfModel) -> PaPartition:
    """States that decide the focus classically perfectly, in either polarity.

    A state belongs to ``p_a`` when it is a-classical perfect or perfect for
    the inverse of ``a`` with its own inversion image; the two states of an
    inverting pair thus share the property.
    """
    space, a = sm.space, sm.focus
    perp = inverse_property(space, a)
    pa = frozenset(
        m for m in sm.states
        if is_classical_perfect(sm.observer, space, m, a, sm.mode)
        or is_classical_perfect(sm.observer, space, m, perp, sm.mode)
    )
    return PaPartition(pa, frozenset(sm.states) - pa)


def theorem3_check(sm: SelfModel) -> Verdict:
    """If every state is a-classical perfect, ``p_a`` is a classical property.

    Each state's verdict on ``a`` must be predetermined: its row is either
    the focus indicator ("right") or its swap ("inverted"), and ``p_a`` with
    its inverse must split the states.
    """
    part = derive_pa(sm)
    if part.pa_states != frozenset(sm.states):
        missing = min(frozenset(sm.states) - part.pa_states)
        raise PremiseViolated(f"state {missing} is not a-classical perfect")
    ka = actual_states(sm.space, sm.focus)
    verdicts: dict[str, str] = {}
    for m in sm.states:
        row = {s: sm.o(s, m) for s in sm.states}
        if not all(o.single for o in row.values()):
            return Verdict.failed("theorem3", f"row of {m} is not predetermined", state=m)
        if all((row[s] is YES) == (s in ka) for s in sm.states):
            verdicts[m] = "right"
        elif all((row[s] is NO) == (s in ka) for s in sm.states):
            verdicts[m] = "inverted"
        else:
            return Verdict.failed("theorem3", f"{m} is neither always right nor always wrong", state=m)
    if part.pa_states & part.pa_perp_states or part.pa_states | part.pa_perp_states != frozenset(sm.states):
        return Verdict.failed("theorem3", "p_a and its inverse do not partition the states")
    return Verdict.passed("theorem3", pa=part.pa_states, pa_perp=part.pa_perp_states, verdicts=verdicts)


def sigma_pa(sm: SelfModel, part: PaPartition | None = None, quantify: Quantify = "diagonal") -> list[str]:
    """States whose self-observation correctly reports their own ``p_a`` status.

    In ``full`` mode the state must also report ``p_a`` correctly for every
    observed state, not only for itself.
    """
    part = part or derive_pa(sm)
    out = []
    for m in sm.states:
        d = sm.o(m, m)
        if not _diag_ok(m, d, part):
            continue
        if quantify == "full" and not all(_diag_ok(s, sm.o(s, m), part) for s in sm.states):
            continue
        out.append(m)
    return out


def _diag_ok(m: str, d: OutcomeSet, part: PaPartition) -> bool:
    return ((m in part.pa_states) == (d is YES)) and ((m in part.pa_perp_states) == (d is NO))


def _correlation_step(sm: SelfModel, m: str, part: PaPartition) -> TraceStep:
    return TraceStep(
        f"{m} reports its own p_a status correctly",
        f"{m} in pa <=> o({m},{m})=yes ; {m} in pa_perp <=> o({m},{m})=no",
        (m,),
        {"in_pa": m in part.pa_states, "in_pa_perp": m in part.pa_perp_states,
         "o": sm.o(m, m).text},
    )


def diagonal_contradiction(sm: SelfModel, quantify: Quantify = "diagonal") -> Certificate:
    """Try to exhibit a ``p_a``-classical-perfect state and record why it fails.

    For each candidate ``m`` (a state that reports its own ``p_a`` status
    correctly) and each inversion image ``m*`` of ``m`` lying in the inverse
    of ``p_a``, the inverse correlation at ``m*`` demands ``o(m*, m*) = no``.
    That makes ``m*`` a state reporting its own status correctly, hence one
    having ``p_a``, and the direct correlation then demands
    ``o(m*, m*) = yes``.
    """
    if quantify not in ("diagonal", "full"):
        raise ValueError(f"unknown quantification {quantify!r}")
    part = derive_pa(sm)
    cands = sigma_pa(sm, part, quantify)
    trace: list[TraceStep] = []
    if not cands:
        return Certificate("premise_unsatisfiable", (), sm.focus, quantify,
                           "no state reports its own p_a status correctly")
    contradiction = survivor = False
    for m in cands:
        trace.append(_correlation_step(sm, m, part))
        images = [x for x in find_inversions(sm.observer, m, sm.mode) if x in part.pa_perp_states]
        if not images:
            trace.append(TraceStep(f"{m} has no inversion image outside p_a",
                                   f"exists alpha({m}) in pa_perp", (m,),
                                   {"images": list(find_inversions(sm.observer, m, sm.mode))}))
            continue
        for ms in images:
            trace.append(TraceStep(
                f"{ms} inverts {m} and lacks p_a", f"alpha({m}) = {ms} in pa_perp", (m, ms),
                {"row": [o.text for o in sm.observer.relation.row(m)],
                 "image_row": [o.text for o in sm.observer.relation.row(ms)],
                 "in_pa_perp": ms in part.pa_perp_states}))
            d = sm.o(ms, ms)
            trace.append(TraceStep(
                f"inverse correlation applied at {ms}",
                f"{ms} in pa_perp <=> o({ms},{ms})=no", (ms,),
                {"required": "no", "o": d.text}))
            if d is not NO:
                # m* breaks the inverse correlation: m is not p_a-classical perfect via m*
                continue
            forced = [YES, NO]
            trace.append(TraceStep(
                f"{ms} therefore reports its status correctly and has p_a",
                f"o({ms},{ms})=no => {ms} in Sigma_pa => {ms} in pa => o({ms},{ms})=yes", (ms,),
                {"forced": [f.text for f in forced], "o": d.text}))
            if all(d is f for f in forced):
                survivor = True
            else:
                contradiction = True
    if survivor:
        kind: CertificateKind = "counterexample"
    elif contradiction:
        kind = "contradiction"
    else:
        kind = "premise_unsatisfiable"
    note = "" if contradiction or survivor else "no candidate has an inversion image satisfying the inverse correlation"
    return Certificate(kind, tuple(trace), sm.focus, quantify, note)


def replay_certificate(sm: SelfModel, cert: Certificate) -> bool:
    """Re-evaluate every trace step against the model."""
    part = derive_pa(sm)
    for step in cert.trace:
        v = step.values
        if "in_pa" in v:
            (m,) = step.witnesses
            if v != _correlation_step(sm, m, part).values:
                return False
        elif "images" in v:
            (m,) = step.witnesses
            if v["images"] != list(find_inversions(sm.observer, m, sm.mode)):
                return False
        elif "image_row" in v:
            m, ms = step.witnesses
            if ms not in find_inversions(sm.observer, m, sm.mode):
                return False
            if v["row"] != [o.text for o in sm.observer.relation.row(m)]:
                return False
            if v["image_row"] != [o.text for o in sm.observer.relation.row(ms)]:
                return False
            if v["in_pa_perp"] != (ms in part.pa_perp_states):
                return False
        elif "forced" in v:
            (ms,) = step.witnesses
            # the step only fires when the inverse correlation held at ms
            if v["o"] != sm.o(ms, ms).text or sm.o(ms, ms) is not NO:
                return False
            if sorted(v["forced"]) != ["no", "yes"]:
                return False
        elif "required" in v:
            (ms,) = step.witnesses
            if v["o"] != sm.o(ms, ms).text:
                return False
        else:
            return False
    return True


def theorem5_check(sm: SelfModel, quantify: Quantify = "diagonal") -> Verdict:
    """No observer perfectly observes all of its own actual properties."""
    part = derive_pa(sm)
    if not part.pa_states:
        return Verdict.passed("theorem5", "observer is not a-classical perfect", horn="not-classical-perfect")
    cert = diagonal_contradiction(sm, quantify)
    if cert.kind == "counterexample":
        return Verdict.failed("theorem5", "a p_a-classical-perfect state survived", horn="diagonal")
    return Verdict.passed("theorem5", f"diagonal certificate: {cert.kind}", horn="diagonal",
                          certificate=cert.kind)
