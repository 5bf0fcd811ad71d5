import random
from itertools import product

import pytest

from selfobs.diagonal import derive_pa, diagonal_contradiction, replay_certificate, theorem3_check
from selfobs.errors import BoundsTooLarge, InvalidSeed, NonSurjective, PremiseViolated
from selfobs.observation import perfect_pairs, verify_theorem1, verify_theorem2
from selfobs.search import (
    decode_index,
    evaluate_index,
    focus_masks,
    grid_size,
    sample_indices,
    search_models,
    sweep_observation_theorems,
)

from helpers import brute_diagonal, rows_from_codes, self_model_for, surjective


def names_of(mask, n):
    return {f"s{i}" for i in range(n) if mask >> i & 1}


def cross_check(index, max_states, quantify="diagonal", mode="relational"):
    """Kernel, object API and brute-force oracle must agree on one candidate."""
    c, rd, fr, t1 = evaluate_index(index, max_states, quantify, mode)
    rows = rows_from_codes(c.n, c.n, c.codes)
    focus = {i for i in range(c.n) if c.focus_mask >> i & 1}
    if fr is None:
        assert not surjective(rows)
        with pytest.raises(NonSurjective):
            self_model_for(c.n, c.codes, c.focus_mask, c.alpha, mode)
        return None
    brute = brute_diagonal(rows, focus, quantify, strict=mode == "strict")
    sm = self_model_for(c.n, c.codes, c.focus_mask, c.alpha, mode)
    part = derive_pa(sm)
    assert part.pa_states == names_of(fr.pa, c.n) == {f"s{i}" for i in brute["pa"]}
    cert = diagonal_contradiction(sm, quantify)
    assert cert.kind == fr.kind == brute["kind"]
    assert fr.survivors == brute["perfect"] == 0
    assert replay_certificate(sm, cert)
    if fr.theorem3 is None:
        with pytest.raises(PremiseViolated):
            theorem3_check(sm)
    else:
        assert theorem3_check(sm).ok == (fr.theorem3 == "pass")
    model, space = sm.observer, sm.space
    if t1 is None:
        with pytest.raises(PremiseViolated):
            verify_theorem1(model, space, "a", mode)
    else:
        assert verify_theorem1(model, space, "a", mode).ok == t1
    pairs = perfect_pairs(model, space, "a")
    if fr.theorem2 is None:
        assert pairs == []
    else:
        ok = all(verify_theorem2(model, space, "a", m, ms, mode).ok for m, ms in pairs)
        assert ok == (fr.theorem2 == "pass")
    return fr


def test_grid_sizes():
    assert grid_size(1) == 0
    assert grid_size(2) == 81 * 2 * 4 == 648
    assert grid_size(3) == 19683 * 6 * 27


def test_focus_order():
    assert focus_masks(2) == (0b01, 0b10)
    assert focus_masks(3) == (0b001, 0b110, 0b011, 0b100, 0b101, 0b010)


def test_decode_index_is_lexicographic():
    prev = None
    for i in range(grid_size(2)):
        c = decode_index(i, 2)
        key = (c.n, c.codes, c.focus, c.alpha)
        assert prev is None or key > prev
        prev = key
    with pytest.raises(IndexError):
        decode_index(grid_size(2), 2)


@pytest.mark.parametrize("mode", ["relational", "strict"])
def test_every_two_state_candidate(mode):
    seen = sum(cross_check(i, 2, mode=mode) is not None for i in range(grid_size(2)))
    assert seen == 632


@pytest.mark.parametrize("quantify", ["diagonal", "full"])
def test_random_three_and_four_state_candidates(quantify):
    rng = random.Random(7)
    total = grid_size(3) + grid_size(4)
    kinds = set()
    for _ in range(400):
        fr = cross_check(rng.randrange(total), 4, quantify)
        if fr is not None:
            kinds.add(fr.kind)
    assert "premise_unsatisfiable" in kinds


def test_three_state_contradictions_agree():
    """Candidates that do produce a contradiction, found by scanning relations."""
    found = 0
    n_alpha, n_focus = 27, 6
    for r in range(0, 19683, 7):
        for f in range(n_focus):
            idx = (r * n_focus + f) * n_alpha
            c, rd, fr, _ = evaluate_index(idx, 3)
            if fr is not None and fr.kind == "contradiction":
                cross_check(idx, 3)
                found += 1
    assert found > 0


def test_exhaustive_two_states():
    rep = search_models(2, "exhaustive")
    assert rep.models_examined == 648
    assert rep.rejected == 16
    assert rep.pa_perfect_found == 0
    assert rep.ok
    assert all(t["fail"] == 0 for t in rep.theorem_tallies.values())


def test_exhaustive_one_state():
    rep = search_models(1, "exhaustive")
    assert rep.models_examined == 0 and rep.pa_perfect_found == 0


def test_projection_closure():
    """Two-state models embed in the three-state grid via the live 2x2 corner."""
    corners = set()
    for codes in product(range(3), repeat=9):
        corners.add((codes[0], codes[1], codes[3], codes[4]))
    assert corners == set(product(range(3), repeat=4))
    restricted = {m & 0b11 for m in focus_masks(3)} - {0, 0b11}
    assert restricted == set(focus_masks(2))


def test_worker_count_does_not_change_results():
    a = search_models(2, "exhaustive", workers=1).to_dict(timing=False)
    b = search_models(2, "exhaustive", workers=2).to_dict(timing=False)
    assert a == b
    s1 = search_models(3, "sampled", samples=3000, seed=5, workers=1).to_dict(timing=False)
    s2 = search_models(3, "sampled", samples=3000, seed=5, workers=3).to_dict(timing=False)
    assert s1 == s2


def test_sampling_is_seeded():
    a = sample_indices(4, 1000, 42)
    assert (a == sample_indices(4, 1000, 42)).all()
    assert not (a == sample_indices(4, 1000, 43)).all()
    r1 = search_models(4, samples=2000, seed=1)
    assert r1.mode == "sampled" and r1.samples == 2000
    assert r1.to_dict(timing=False) == search_models(4, samples=2000, seed=1).to_dict(timing=False)
    assert r1.pa_perfect_found == 0


def test_full_quantify_and_strict_inversion():
    rep = search_models(2, "exhaustive", quantify="full", inversion_mode="strict")
    assert rep.ok and rep.quantify == "full" and rep.inversion_mode == "strict"


def test_bounds_and_seed_errors():
    with pytest.raises(BoundsTooLarge):
        search_models(4, "exhaustive")
    with pytest.raises(BoundsTooLarge):
        search_models(0)
    with pytest.raises(BoundsTooLarge):
        search_models(6, "sampled")
    with pytest.raises(InvalidSeed):
        search_models(2, "sampled", seed=-1)
    with pytest.raises(InvalidSeed):
        search_models(2, "sampled", seed=1.5)
    with pytest.raises(ValueError):
        search_models(2, "sampled", samples=0)


def test_report_defaults_mode_by_size():
    assert search_models(2).mode == "exhaustive"
    assert "duration" in search_models(2).to_dict()
    assert "duration" not in search_models(2).to_dict(timing=False)


def test_observation_sweep_small():
    t = sweep_observation_theorems(2, 2)
    assert t.theorems["theorem1"]["applicable"] > 0
    assert t.theorems["theorem1"]["fail"] == 0 and t.theorems["theorem2"]["fail"] == 0
