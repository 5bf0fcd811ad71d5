from dataclasses import replace

import pytest

from selfobs import fixtures
from selfobs.diagonal import (
    SelfModel,
    derive_pa,
    diagonal_contradiction,
    replay_certificate,
    sigma_pa,
    theorem3_check,
    theorem5_check,
)
from selfobs.errors import ModelError, NonSurjective, NotClassicalFocus, PremiseViolated
from selfobs.observation import ObserverModel, OutcomeRelation
from selfobs.spaces import StatePropertySpace
from selfobs.speclang import load, parse

from helpers import brute_diagonal, rows_from_codes, self_model_for


def from_fixture(name):
    return load(parse(fixtures.text(name))).self_model("self")


def square(rows, focus=("m1",), states=("m1", "m2")):
    sp = StatePropertySpace.build(list(states), {"ta": {s: ("yes" if s in focus else "no") for s in states}},
                                  {"a": ["ta"]})
    rel = OutcomeRelation.from_rows(states, rows)
    return SelfModel(ObserverModel(sp, "a", rel))


@pytest.fixture(scope="module")
def self2():
    return from_fixture("self2")


@pytest.fixture(scope="module")
def selfdiag():
    return from_fixture("selfdiag")


def test_self2_pa(self2):
    part = derive_pa(self2)
    assert part.pa_states == {"m1", "m2"} and part.pa_perp_states == frozenset()


def test_constant_rows_have_no_pa():
    sm = square({"m1": ["yes", "yes"], "m2": ["no", "no"]})
    assert derive_pa(sm).pa_states == frozenset()


def test_one_state_self_models_have_no_pa():
    sp = StatePropertySpace.build(["m"], {"ta": {"m": "yes"}}, {"a": ["ta"]})
    built = 0
    for o in ("yes", "no", "yes|no"):
        try:
            rel = OutcomeRelation.from_rows(["m"], {"m": [o]})
        except NonSurjective:
            continue
        built += 1
        assert derive_pa(SelfModel(ObserverModel(sp, "a", rel))).pa_states == frozenset()
    assert built == 1


def test_theorem3(self2, selfdiag):
    v = theorem3_check(self2)
    assert v.ok and v.witness["verdicts"] == {"m1": "right", "m2": "inverted"}
    with pytest.raises(PremiseViolated):
        theorem3_check(selfdiag)


def test_self2_diagonal(self2):
    cert = diagonal_contradiction(self2)
    assert cert.kind == "premise_unsatisfiable"
    assert replay_certificate(self2, cert)
    v = theorem5_check(self2)
    assert v.ok and v.witness["horn"] == "diagonal"


def test_contradiction_certificate(selfdiag):
    cert = diagonal_contradiction(selfdiag)
    assert cert.kind == "contradiction"
    assert replay_certificate(selfdiag, cert)
    forced = [s for s in cert.trace if "forced" in s.values]
    assert forced and all(sorted(s.values["forced"]) == ["no", "yes"] for s in forced)
    # the state forced both ways is an inversion image whose self-report is no
    assert {s.witnesses[0] for s in forced} == {"x", "y"}
    assert theorem5_check(selfdiag).witness["horn"] == "not-classical-perfect"


def test_tampered_certificate_does_not_replay(selfdiag):
    cert = diagonal_contradiction(selfdiag)
    step = cert.trace[0]
    bad = replace(step, values=dict(step.values, o="yes"))
    assert not replay_certificate(selfdiag, replace(cert, trace=(bad,) + cert.trace[1:]))
    step = next(s for s in cert.trace if "image_row" in s.values)
    bad = replace(step, witnesses=(step.witnesses[0], step.witnesses[0]))
    assert not replay_certificate(selfdiag, replace(cert, trace=(bad,)))


def test_missing_inversion_image():
    sm = square({"m1": ["no", "yes"], "m2": ["no", "no"]})
    cert = diagonal_contradiction(sm)
    assert cert.kind == "premise_unsatisfiable"
    assert any(s.values.get("images") == [] for s in cert.trace)
    assert replay_certificate(sm, cert)


def test_no_candidates():
    # m1 sits outside p_a but reports yes about itself
    sm = square({"m1": ["yes", "yes"], "m2": ["no", "no"]})
    assert sigma_pa(sm) == ["m2"]
    # nobody has p_a, yet every diagonal entry says yes
    sm2 = square({"m1": ["yes", "yes|no"], "m2": ["no", "yes"]})
    assert derive_pa(sm2).pa_states == frozenset()
    cert = diagonal_contradiction(sm2)
    assert cert.kind == "premise_unsatisfiable" and cert.trace == ()


def test_full_quantification_is_stricter(selfdiag):
    assert set(sigma_pa(selfdiag, quantify="full")) <= set(sigma_pa(selfdiag))
    assert diagonal_contradiction(selfdiag, "full").kind != "counterexample"
    with pytest.raises(ValueError):
        diagonal_contradiction(selfdiag, "everything")


def test_self_model_validation(self2):
    sp = StatePropertySpace.build(["m1", "m2"], {"ta": {"m1": "yes", "m2": "no"},
                                                 "tf": {"m1": "yes", "m2": "yes|no"}},
                                  {"a": ["ta"], "f": ["tf"]})
    rel = OutcomeRelation.from_rows(("m1", "m2"), {"m1": ["yes", "no"], "m2": ["no", "yes"]})
    with pytest.raises(NotClassicalFocus):
        SelfModel(ObserverModel(sp, "a", rel), "f")
    rect = OutcomeRelation.from_rows(("s1",), {"m1": ["yes"], "m2": ["no"]})
    with pytest.raises(ModelError):
        SelfModel(ObserverModel(sp, "a", rect))
    assert SelfModel(self2.observer).focus == "a"


def test_certificate_serializes(selfdiag):
    d = diagonal_contradiction(selfdiag).to_dict()
    assert d["kind"] == "contradiction" and d["focus"] == "i"
    assert all(set(step) == {"claim", "equation", "witnesses", "values"} for step in d["trace"])


def test_four_state_contradiction_with_nonempty_pa():
    """Rows: a, its swap, and a diagonal-crossing pair that lacks p_a."""
    # states 0..3, focus {0, 2}; rows listed per observer over observed 0..3
    rows = {
        "s0": ["yes", "no", "yes", "no"],
        "s1": ["no", "yes", "no", "yes"],
        "s2": ["yes", "no", "no", "yes"],
        "s3": ["no", "yes", "yes", "no"],
    }
    sm = square(rows, focus=("s0", "s2"), states=("s0", "s1", "s2", "s3"))
    part = derive_pa(sm)
    assert part.pa_states == {"s0", "s1"}
    cert = diagonal_contradiction(sm)
    assert cert.kind == "contradiction"
    assert replay_certificate(sm, cert)
    codes = [0] * 16
    for m, r in enumerate(rows.values()):
        for s, x in enumerate(r):
            codes[s * 4 + m] = ("no", "yes", "yes|no").index(x)
    assert brute_diagonal(rows_from_codes(4, 4, codes), {0, 2})["kind"] == "contradiction"
    assert self_model_for(4, codes, 0b0101).focus == "a"
