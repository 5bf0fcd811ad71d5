"""Brute-force oracles and model builders shared by the tests.

The oracles work on plain strings and lists, straight from the
definitions, and never touch the bitmask kernel in ``selfobs.search``.
"""

from __future__ import annotations

import warnings
from itertools import product

from selfobs.diagonal import SelfModel
from selfobs.observation import ObserverModel, OutcomeRelation
from selfobs.spaces import StatePropertySpace

CODE_TEXT = ("no", "yes", "yes|no")
SWAP_TEXT = {"yes": "no", "no": "yes", "yes|no": "yes|no"}


def names(n: int, prefix: str = "s") -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def rows_from_codes(n_observed: int, n_observers: int, codes) -> list[list[str]]:
    """rows[m][s] for a row-major code tuple (observed state is the outer index)."""
    return [[CODE_TEXT[codes[s * n_observers + m]] for s in range(n_observed)] for m in range(n_observers)]


def surjective(rows) -> bool:
    flat = [x for r in rows for x in r]
    return any(x != "no" for x in flat) and any(x != "yes" for x in flat)


def inversion_images(rows, m: int, strict: bool = False) -> list[int]:
    if strict and "yes|no" in rows[m]:
        return []
    want = [SWAP_TEXT[x] for x in rows[m]]
    return [k for k, r in enumerate(rows) if r == want]


def decides(row, focus: set[int]) -> bool:
    """Row answers yes exactly on ``focus`` and no exactly off it."""
    return all(x == ("yes" if s in focus else "no") for s, x in enumerate(row))


def brute_pa(rows, focus: set[int], strict: bool = False) -> set[int]:
    n = len(rows[0])
    comp = set(range(n)) - focus
    out = set()
    for m, row in enumerate(rows):
        if not (decides(row, focus) or decides(row, comp)):
            continue
        if inversion_images(rows, m, strict):
            out.add(m)
    return out


def brute_diagonal(rows, focus: set[int], quantify: str = "diagonal", strict: bool = False) -> dict:
    """Classify a square self model the long way round."""
    n = len(rows)
    pa = brute_pa(rows, focus, strict)
    perp = set(range(n)) - pa

    def correct(s: int, x: str) -> bool:
        return (s in pa) == (x == "yes") and (s in perp) == (x == "no")

    cands = [m for m in range(n) if correct(m, rows[m][m])
             and (quantify == "diagonal" or all(correct(s, rows[m][s]) for s in range(n)))]
    clash = False
    perfect = 0
    for m in cands:
        for ms in inversion_images(rows, m, strict):
            if ms not in perp or rows[ms][ms] != "no":
                continue
            # ms reports correctly, so it has p_a, yet it lies in the inverse
            if ms in pa and rows[ms][ms] == "yes":
                perfect += 1
            else:
                clash = True
    kind = "counterexample" if perfect else "contradiction" if clash else "premise_unsatisfiable"
    return {"pa": pa, "candidates": cands, "kind": kind, "perfect": perfect}


def space_for(n: int, focus: set[int], prefix: str = "s") -> StatePropertySpace:
    st = names(n, prefix)
    row = {st[i]: ("yes" if i in focus else "no") for i in range(n)}
    return StatePropertySpace.build(st, {"ta": row}, {"a": ["ta"]})


def observer_for(n_observed: int, n_observers: int, codes, focus: set[int], alpha=None,
                 system_prefix: str = "s", observer_prefix: str = "s") -> ObserverModel:
    """Object-level model for a raw candidate; the observer indicator is the focus."""
    obs = names(n_observers, observer_prefix)
    sys_states = names(n_observed, system_prefix)
    rows = rows_from_codes(n_observed, n_observers, codes)
    rel = OutcomeRelation.from_rows(sys_states, {obs[m]: rows[m] for m in range(n_observers)})
    space = space_for(n_observers, focus if n_observers == n_observed else {0}, observer_prefix)
    inv = None if alpha is None else {obs[m]: obs[alpha[m]] for m in range(n_observers)}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ObserverModel(space, "a", rel, inversion=inv)


def self_model_for(n: int, codes, focus_mask: int, alpha=None, mode: str = "relational") -> SelfModel:
    focus = {i for i in range(n) if focus_mask >> i & 1}
    return SelfModel(observer_for(n, n, codes, focus, alpha), "a", mode)


def all_relations(n_observed: int, n_observers: int):
    return product(range(3), repeat=n_observed * n_observers)
