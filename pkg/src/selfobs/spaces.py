"""Finite state-property spaces.

A test is stored extensionally: for every state it records the set of
outcomes it can produce (``yes``, ``no`` or both). A property is a class of
equivalent tests, kept as explicit representatives so that equivalence is
checked rather than trusted. The Cartan map sends a property to the states
where it is actual, i.e. where its tests answer ``yes`` with certainty.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Union

from .errors import (
    EmptySpace,
    InconsistentEquivalenceClass,
    NotClassical,
    PartialTest,
    UnknownProperty,
    UnknownState,
    UnknownTest,
)
from .verdict import Verdict


class OutcomeSet(enum.IntEnum):
    """Nonempty subset of {yes, no}.

    The integer codes give the canonical order used by enumeration:
    ``{no} < {yes} < {yes,no}``.
    """

    NO = 0
    YES = 1
    EITHER = 2

    @property
    def members(self) -> frozenset[str]:
        return _MEMBERS[self]

    @property
    def single(self) -> bool:
        return self is not OutcomeSet.EITHER

    @property
    def text(self) -> str:
        return _TEXT[self]

    def swap(self) -> "OutcomeSet":
        return _SWAP[self]

    def __str__(self) -> str:
        return self.text

    @classmethod
    def parse(cls, text: str) -> "OutcomeSet":
        try:
            return _FROM_TEXT[text.replace(" ", "")]
        except KeyError:
            raise ValueError(f"not an outcome set: {text!r}") from None

    @classmethod
    def of(cls, members: Iterable[str]) -> "OutcomeSet":
        key = frozenset(members)
        for value, mem in _MEMBERS.items():
            if mem == key:
                return value
        raise ValueError(f"outcome set must be a nonempty subset of yes/no: {sorted(key)}")


_MEMBERS = {
    OutcomeSet.NO: frozenset({"no"}),
    OutcomeSet.YES: frozenset({"yes"}),
    OutcomeSet.EITHER: frozenset({"yes", "no"}),
}
_TEXT = {OutcomeSet.NO: "no", OutcomeSet.YES: "yes", OutcomeSet.EITHER: "yes|no"}
_FROM_TEXT = {
    "no": OutcomeSet.NO,
    "yes": OutcomeSet.YES,
    "yes|no": OutcomeSet.EITHER,
    "no|yes": OutcomeSet.EITHER,
}
_SWAP = {
    OutcomeSet.NO: OutcomeSet.YES,
    OutcomeSet.YES: OutcomeSet.NO,
    OutcomeSet.EITHER: OutcomeSet.EITHER,
}

YES, NO, EITHER = OutcomeSet.YES, OutcomeSet.NO, OutcomeSet.EITHER


@dataclass(frozen=True, eq=False)
class Test:
    """A test as a map from state ids to outcome sets."""

    id: str
    outcomes: Mapping[str, OutcomeSet]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "outcomes", {s: OutcomeSet(v) for s, v in self.outcomes.items()}
        )

    def __call__(self, state: str) -> OutcomeSet:
        try:
            return self.outcomes[state]
        except KeyError:
            raise PartialTest(f"test {self.id!r} has no outcome for state {state!r}") from None

    def __eq__(self, other: object) -> bool:
        # extensional equality; ids are labels only
        if not isinstance(other, Test):
            return NotImplemented
        return dict(self.outcomes) == dict(other.outcomes)

    def __hash__(self) -> int:
        return hash(frozenset(self.outcomes.items()))

    def certain_yes(self) -> frozenset[str]:
        return frozenset(s for s, o in self.outcomes.items() if o is YES)

    @property
    def is_classical(self) -> bool:
        return all(o.single for o in self.outcomes.values())

    def check_total(self, states: Iterable[str]) -> None:
        for s in states:
            if s not in self.outcomes:
                raise PartialTest(f"test {self.id!r} has no outcome for state {s!r}")


@dataclass(frozen=True)
class Property:
    """An equivalence class of tests, given by representative tests."""

    id: str
    tests: tuple[Test, ...]

    def __post_init__(self) -> None:
        if not self.tests:
            raise InconsistentEquivalenceClass(f"property {self.id!r} has no representative test")
        object.__setattr__(self, "tests", tuple(self.tests))

    @property
    def representatives(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.tests)


PropertyRef = Union[str, Property]


@dataclass(frozen=True, eq=False)
class StatePropertySpace:
    """States, tests and properties of one entity.

    States are kept in canonical (lexicographic) order. Construction checks
    that every test is total and every property cites declared tests;
    equivalence of representatives is checked by the operations that
    depend on it.
    """

    states: tuple[str, ...]
    tests: Mapping[str, Test]
    properties: Mapping[str, Property]
    id: str = "S"
    _index: Mapping[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        states = tuple(sorted(set(self.states)))
        if len(states) != len(self.states):
            raise ValueError("duplicate state ids")
        if not states:
            raise EmptySpace("a state property space needs at least one state")
        if not self.properties:
            raise EmptySpace("a state property space needs at least one property")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "tests", dict(self.tests))
        object.__setattr__(self, "properties", dict(self.properties))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(states)})
        for t in self.tests.values():
            t.check_total(states)
            extra = set(t.outcomes) - set(states)
            if extra:
                raise UnknownState(f"test {t.id!r} mentions undeclared states {sorted(extra)}")
        for p in self.properties.values():
            for t in p.tests:
                if t.id not in self.tests:
                    raise UnknownTest(f"property {p.id!r} cites undeclared test {t.id!r}")

    @classmethod
    def build(
        cls,
        states: Iterable[str],
        tests: Mapping[str, Mapping[str, OutcomeSet | str]],
        properties: Mapping[str, Iterable[str]],
        id: str = "S",
    ) -> "StatePropertySpace":
        """Convenience constructor from plain tables.

        >>> sp = StatePropertySpace.build(["p"], {"t": {"p": "yes"}}, {"a": ["t"]})
        >>> sorted(actual_states(sp, "a"))
        ['p']
        """
        built = {
            tid: Test(tid, {s: _coerce(o) for s, o in table.items()}) for tid, table in tests.items()
        }
        props = {}
        for pid, reps in properties.items():
            try:
                props[pid] = Property(pid, tuple(built[r] for r in reps))
            except KeyError as exc:
                raise UnknownTest(f"property {pid!r} cites undeclared test {exc.args[0]!r}") from None
        return cls(tuple(states), built, props, id)

    @property
    def full(self) -> frozenset[str]:
        return frozenset(self.states)

    def index(self, state: str) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise UnknownState(f"{state!r} is not a state of {self.id!r}") from None

    def check_state(self, state: str) -> str:
        self.index(state)
        return state

    def property(self, a: PropertyRef) -> Property:
        if isinstance(a, Property):
            for t in a.tests:
                t.check_total(self.states)
            return a
        try:
            return self.properties[a]
        except KeyError:
            raise UnknownProperty(f"{a!r} is not a property of {self.id!r}") from None

    def test(self, tid: str) -> Test:
        try:
            return self.tests[tid]
        except KeyError:
            raise UnknownTest(f"{tid!r} is not a test of {self.id!r}") from None


def _coerce(o: OutcomeSet | str) -> OutcomeSet:
    return o if isinstance(o, OutcomeSet) else OutcomeSet.parse(o)


def tests_equivalent(space: StatePropertySpace, t: Test, t2: Test) -> bool:
    """Equivalent tests have the same certain-yes state set."""
    t.check_total(space.states)
    t2.check_total(space.states)
    return all((t(s) is YES) == (t2(s) is YES) for s in space.states)


def _check_class(space: StatePropertySpace, prop: Property) -> None:
    first = prop.tests[0]
    for other in prop.tests[1:]:
        if not tests_equivalent(space, first, other):
            diff = sorted(first.certain_yes() ^ other.certain_yes())
            raise InconsistentEquivalenceClass(
                f"representatives {first.id!r} and {other.id!r} of {prop.id!r} "
                f"disagree at state {diff[0]!r}"
            )


def actual_states(space: StatePropertySpace, a: PropertyRef) -> frozenset[str]:
    """The Cartan image of ``a``: states where ``a`` is actual."""
    prop = space.property(a)
    _check_class(space, prop)
    return frozenset(s for s in space.states if prop.tests[0](s) is YES)


def potential_states(space: StatePropertySpace, a: PropertyRef) -> frozenset[str]:
    return space.full - actual_states(space, a)


def actuality_status(space: StatePropertySpace, a: PropertyRef, s: str) -> str:
    space.check_state(s)
    return "actual" if s in actual_states(space, a) else "potential"


def inverse_test(t: Test) -> Test:
    """Swap the roles of yes and no; two-valued entries stay two-valued."""
    tid = t.id[: -len("^inv")] if t.id.endswith("^inv") else t.id + "^inv"
    return Test(tid, {s: o.swap() for s, o in t.outcomes.items()})


def is_classical_property(space: StatePropertySpace, a: PropertyRef) -> bool:
    """True iff every representative answers with a single outcome everywhere.

    A class mixing classical and non-classical tests is rejected.
    """
    prop = space.property(a)
    _check_class(space, prop)
    flags = {t.is_classical for t in prop.tests}
    if len(flags) > 1:
        raise InconsistentEquivalenceClass(
            f"property {prop.id!r} mixes classical and non-classical representatives"
        )
    return flags.pop()


def inverse_property(space: StatePropertySpace, a: PropertyRef) -> Property:
    """Materialize ``a``'s inverse from the inverse tests of its representatives.

    Only classical properties have a well-defined inverse.
    """
    prop = space.property(a)
    if not is_classical_property(space, prop):
        raise NotClassical(f"property {prop.id!r} is not classical; its inverse is not a property")
    pid = prop.id[: -len("^perp")] if prop.id.endswith("^perp") else prop.id + "^perp"
    return Property(pid, tuple(inverse_test(t) for t in prop.tests))


def classicality_verdict(space: StatePropertySpace, a: PropertyRef) -> Verdict:
    """Check that a classical property and its inverse split the state set.

    Three checks, reported in order: the two Cartan images cover the
    states, they are disjoint, and inverses of equivalent representatives
    are themselves equivalent.
    """
    prop = space.property(a)
    if not is_classical_property(space, prop):
        raise NotClassical(f"property {prop.id!r} is not classical")
    inv = inverse_property(space, prop)
    ka = actual_states(space, prop)
    # computed over all representatives so that check (iii) is not presupposed
    kinv = frozenset(s for s in space.states if any(t(s) is YES for t in inv.tests))
    missing = sorted(space.full - (ka | kinv))
    if missing:
        return Verdict.failed("classical-cover", f"state {missing[0]} in neither image",
                              property=prop.id, state=missing[0])
    both = sorted(ka & kinv)
    if both:
        return Verdict.failed("classical-disjoint", f"state {both[0]} in both images",
                              property=prop.id, state=both[0])
    for t, t2 in combinations(inv.tests, 2):
        if not tests_equivalent(space, t, t2):
            return Verdict.failed("inverse-well-defined",
                                  f"inverse tests {t.id} and {t2.id} are not equivalent",
                                  property=prop.id, tests=(t.id, t2.id))
    return Verdict.passed("classical-partition", property=prop.id,
                          actual=ka, inverse_actual=kinv)


def property_profile(space: StatePropertySpace, s: str) -> frozenset[str]:
    space.check_state(s)
    return frozenset(pid for pid in space.properties if s in actual_states(space, pid))


def state_determination_verdict(space: StatePropertySpace) -> Verdict:
    """Passes iff distinct states have distinct sets of actual properties."""
    seen: dict[frozenset[str], str] = {}
    for s in space.states:
        prof = property_profile(space, s)
        if prof in seen:
            return Verdict.failed("state-determination",
                                  f"states {seen[prof]} and {s} share a profile",
                                  states=(seen[prof], s), profile=prof)
        seen[prof] = s
    return Verdict.passed("state-determination")
