"""Exhaustive and sampled search over small self-observing models.

A raw candidate is a square outcome relation over ``n`` observer states,
an ordered split of those states into the focus property and its inverse
(both nonempty), and an arbitrary map ``alpha`` on the states. Candidates
are indexed canonically:

* ``n`` ascending;
* relations in row-major lexicographic order of outcome codes
  (``no=0 < yes=1 < yes|no=2``; row = observed state, column = observer);
* focus splits grouped by the block holding the least state, that block
  first as the focus, then its complement;
* ``alpha`` lexicographically.

Everything here works on bitmasks over state indices; the object-level
API in :mod:`selfobs.observation` and :mod:`selfobs.diagonal` is the
reference these routines are tested against.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Any, Iterable

import numpy as np

from .errors import BoundsTooLarge, InvalidSeed

NO_C, YES_C, EITHER_C = 0, 1, 2
SWAP_C = (1, 0, 2)
EXHAUSTIVE_LIMIT = 3
SAMPLED_LIMIT = 5
THEOREMS = ("eq1", "theorem1", "theorem2", "theorem3", "theorem4", "theorem5")
MAX_RECORDED = 10


@dataclass(frozen=True)
class RelationData:
    """Per-relation facts every focus/alpha combination reuses."""

    n_observed: int
    n_observers: int
    codes: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    yes: tuple[int, ...]
    no: tuple[int, ...]
    inv: tuple[tuple[int, ...], ...]
    surjective: bool

    def diag(self, m: int) -> int:
        return self.codes[m * self.n_observers + m]


def relation_data(n_observed: int, n_observers: int, codes: tuple[int, ...],
                  mode: str = "relational") -> RelationData:
    nm = n_observers
    rows = tuple(tuple(codes[s * nm + m] for s in range(n_observed)) for m in range(nm))
    yes = tuple(sum(1 << s for s, c in enumerate(r) if c == YES_C) for r in rows)
    no = tuple(sum(1 << s for s, c in enumerate(r) if c == NO_C) for r in rows)
    index: dict[tuple[int, ...], list[int]] = {}
    for m, r in enumerate(rows):
        index.setdefault(r, []).append(m)
    inv = []
    for r in rows:
        if mode == "strict" and EITHER_C in r:
            inv.append(())
        else:
            inv.append(tuple(index.get(tuple(SWAP_C[c] for c in r), ())))
    present = set(codes)
    surjective = bool(present & {YES_C, EITHER_C}) and bool(present & {NO_C, EITHER_C})
    return RelationData(n_observed, nm, codes, rows, yes, no, tuple(inv), surjective)


@lru_cache(maxsize=None)
def focus_masks(n: int) -> tuple[int, ...]:
    """Ordered (focus, inverse) splits of ``n`` states into nonempty blocks."""
    full = (1 << n) - 1
    out: list[int] = []
    for b0 in range(1, full, 2):  # blocks containing state 0
        out += [b0, full ^ b0]
    return tuple(out)


def decode_relation(r: int, cells: int) -> tuple[int, ...]:
    digits = [0] * cells
    for i in range(cells - 1, -1, -1):
        r, digits[i] = divmod(r, 3)
    return tuple(digits)


def alpha_index(alpha: Iterable[int], n: int) -> int:
    idx = 0
    for x in alpha:
        idx = idx * n + x
    return idx


def decode_alpha(idx: int, n: int) -> tuple[int, ...]:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        idx, out[i] = divmod(idx, n)
    return tuple(out)


@lru_cache(maxsize=None)
def grid_size(n: int) -> int:
    return 3 ** (n * n) * len(focus_masks(n)) * n ** n


@dataclass(frozen=True)
class FocusResult:
    """Evaluation of one (relation, focus) pair; alpha-independent parts."""

    pa: int
    right: int
    wrong: int
    kind: str
    survivors: int
    premise4: bool
    eq1: bool
    theorem2: str | None
    theorem3: str | None


def _split_ok(a: int, full: int, code_row: list[int]) -> bool:
    # the split's indicator test and its swap must cover and be disjoint
    inv_row = [SWAP_C[c] for c in code_row]
    ka = sum(1 << i for i, c in enumerate(code_row) if c == YES_C)
    kp = sum(1 << i for i, c in enumerate(inv_row) if c == YES_C)
    return (ka | kp) == full and not (ka & kp) and ka == a


def evaluate_focus(rd: RelationData, a: int, quantify: str = "diagonal") -> FocusResult:
    """Derive ``p_a``, run the diagonal argument and the alpha-free theorem checks."""
    n = rd.n_observers
    full = (1 << n) - 1
    ac = full ^ a
    right = wrong = pa = 0
    for m in range(n):
        bit = 1 << m
        if rd.yes[m] == a and rd.no[m] == ac:
            right |= bit
        elif rd.yes[m] == ac and rd.no[m] == a:
            wrong |= bit
        else:
            continue
        if rd.inv[m]:
            pa |= bit
    pa_perp = full ^ pa

    eq1 = _split_ok(a, full, [YES_C if a >> i & 1 else NO_C for i in range(n)]) and \
        _split_ok(pa, full, [YES_C if pa >> i & 1 else NO_C for i in range(n)])

    def reports(s: int, c: int) -> bool:
        in_pa = bool(pa >> s & 1)
        return in_pa == (c == YES_C) and (not in_pa) == (c == NO_C)

    cands = []
    for m in range(n):
        if not reports(m, rd.diag(m)):
            continue
        if quantify == "full" and not all(reports(s, rd.rows[m][s]) for s in range(n)):
            continue
        cands.append(m)
    contradiction = False
    survivors = 0
    for m in cands:
        for ms in rd.inv[m]:
            if not pa_perp >> ms & 1:
                continue
            d = rd.diag(ms)
            if d != NO_C:
                continue
            # ms now reports its own status correctly, which places it in p_a
            forced = (YES_C, NO_C)
            if all(d == f for f in forced):
                survivors += 1
            else:
                contradiction = True
    kind = "counterexample" if survivors else "contradiction" if contradiction else "premise_unsatisfiable"

    t2 = None
    rights = [m for m in range(n) if right >> m & 1]
    wrongs = [m for m in range(n) if wrong >> m & 1]
    if rights and wrongs:
        t2 = "pass" if all(ms in rd.inv[m] for m in rights for ms in wrongs) else "fail"

    t3 = None
    if pa == full:
        t3 = "pass" if (right | wrong) == full and not (right & wrong) and \
            all(EITHER_C not in rd.rows[m] for m in range(n)) else "fail"

    return FocusResult(pa, right, wrong, kind, survivors, bool(pa), eq1, t2, t3)


def theorem1_holds(rd: RelationData, fr: FocusResult, alpha: tuple[int, ...]) -> bool:
    return all((fr.right >> m & 1) == (fr.wrong >> alpha[m] & 1) for m in range(rd.n_observers))


def alpha_valid(rd: RelationData, alpha: tuple[int, ...]) -> bool:
    return all(alpha[m] in rd.inv[m] for m in range(rd.n_observers))


@dataclass
class Tally:
    """Mergeable counters; addition is associative and commutative."""

    examined: int = 0
    rejected: int = 0
    premise_satisfying: int = 0
    pa_perfect_found: int = 0
    contradictions: int = 0
    theorems: dict[str, dict[str, int]] = field(
        default_factory=lambda: {t: {"applicable": 0, "pass": 0, "fail": 0} for t in THEOREMS})
    counterexamples: list[dict[str, Any]] = field(default_factory=list)

    def bump(self, theorem: str, status: str | None, weight: int = 1) -> None:
        if status is None:
            return
        t = self.theorems[theorem]
        t["applicable"] += weight
        t[status] += weight

    def record(self, index: int, theorem: str, **info: Any) -> None:
        self.counterexamples.append({"model_index": index, "theorem": theorem, **info})
        self.counterexamples.sort(key=lambda c: (c["model_index"], c["theorem"]))
        del self.counterexamples[MAX_RECORDED:]

    def merge(self, other: "Tally") -> "Tally":
        out = Tally(self.examined + other.examined, self.rejected + other.rejected,
                    self.premise_satisfying + other.premise_satisfying,
                    self.pa_perfect_found + other.pa_perfect_found,
                    self.contradictions + other.contradictions)
        for t in THEOREMS:
            for k in ("applicable", "pass", "fail"):
                out.theorems[t][k] = self.theorems[t][k] + other.theorems[t][k]
        out.counterexamples = sorted(self.counterexamples + other.counterexamples,
                                     key=lambda c: (c["model_index"], c["theorem"]))[:MAX_RECORDED]
        return out


def _account_focus(t: Tally, fr: FocusResult, weight: int, base_index: int, n: int) -> None:
    t.bump("eq1", "pass" if fr.eq1 else "fail", weight)
    t.bump("theorem2", fr.theorem2, weight)
    t.bump("theorem3", fr.theorem3, weight)
    t.bump("theorem4", "fail" if fr.kind == "counterexample" else "pass" if fr.premise4 else None, weight)
    t.bump("theorem5", "fail" if fr.kind == "counterexample" else "pass", weight)
    if fr.premise4:
        t.premise_satisfying += weight
    if fr.kind == "contradiction":
        t.contradictions += weight
    if fr.survivors:
        t.pa_perfect_found += weight
    for name, bad in (("eq1", not fr.eq1), ("theorem2", fr.theorem2 == "fail"),
                      ("theorem3", fr.theorem3 == "fail"), ("theorem4", fr.kind == "counterexample")):
        if bad:
            t.record(base_index, name, n=n)


def _exhaustive_chunk(args: tuple[int, int, int, str, str]) -> Tally:
    n, r_lo, r_hi, quantify, mode = args
    t = Tally()
    masks = focus_masks(n)
    n_alpha = n ** n
    n_focus = len(masks)
    offset = sum(grid_size(k) for k in range(1, n))
    cells = n * n
    codes_iter = _product_from(decode_relation(r_lo, cells), r_hi - r_lo)
    for r, codes in enumerate(codes_iter, start=r_lo):
        rd = relation_data(n, n, codes, mode)
        block = n_focus * n_alpha
        t.examined += block
        if not rd.surjective:
            t.rejected += block
            continue
        for f, a in enumerate(masks):
            fr = evaluate_focus(rd, a, quantify)
            base = offset + (r * n_focus + f) * n_alpha
            _account_focus(t, fr, n_alpha, base, n)
            for alpha in product(*rd.inv):
                ok = theorem1_holds(rd, fr, alpha)
                t.bump("theorem1", "pass" if ok else "fail")
                if not ok:
                    t.record(base + alpha_index(alpha, n), "theorem1", n=n)
    return t


def _product_from(start: tuple[int, ...], count: int):
    """Yield ``count`` base-3 digit tuples in lexicographic order from ``start``."""
    digits = list(start)
    cells = len(digits)
    for _ in range(count):
        yield tuple(digits)
        i = cells - 1
        while i >= 0:
            digits[i] += 1
            if digits[i] < 3:
                break
            digits[i] = 0
            i -= 1


@dataclass(frozen=True)
class Candidate:
    n: int
    relation: int
    focus: int
    alpha: tuple[int, ...]
    codes: tuple[int, ...]
    focus_mask: int


def decode_index(index: int, max_states: int) -> Candidate:
    """Map a global canonical index to its raw candidate."""
    for n in range(1, max_states + 1):
        size = grid_size(n)
        if index < size:
            masks = focus_masks(n)
            rest, ai = divmod(index, n ** n)
            r, f = divmod(rest, len(masks))
            return Candidate(n, r, f, decode_alpha(ai, n), decode_relation(r, n * n), masks[f])
        index -= size
    raise IndexError("index outside the candidate grid")


@lru_cache(maxsize=4096)
def _cached_relation(n: int, codes: tuple[int, ...], mode: str) -> RelationData:
    return relation_data(n, n, codes, mode)


def evaluate_index(index: int, max_states: int, quantify: str = "diagonal",
                   mode: str = "relational") -> tuple[Candidate, RelationData, FocusResult | None, bool | None]:
    """Evaluate one raw candidate; returns (candidate, relation data, focus result, theorem1)."""
    c = decode_index(index, max_states)
    rd = _cached_relation(c.n, c.codes, mode)
    if not rd.surjective:
        return c, rd, None, None
    fr = evaluate_focus(rd, c.focus_mask, quantify)
    t1 = theorem1_holds(rd, fr, c.alpha) if alpha_valid(rd, c.alpha) else None
    return c, rd, fr, t1


def _sampled_chunk(args: tuple[list[int], int, str, str]) -> Tally:
    indices, max_states, quantify, mode = args
    t = Tally()
    for idx in indices:
        c, rd, fr, t1 = evaluate_index(idx, max_states, quantify, mode)
        t.examined += 1
        if fr is None:
            t.rejected += 1
            continue
        _account_focus(t, fr, 1, idx, c.n)
        if t1 is not None:
            t.bump("theorem1", "pass" if t1 else "fail")
            if not t1:
                t.record(idx, "theorem1", n=c.n)
    return t


@dataclass
class SearchReport:
    bounds: int
    mode: str
    seed: int
    samples: int | None
    quantify: str
    inversion_mode: str
    models_examined: int
    rejected: int
    premise_satisfying: int
    pa_perfect_found: int
    contradictions: int
    theorem_tallies: dict[str, dict[str, int]]
    counterexamples: list[dict[str, Any]]
    duration: float | None = None

    @property
    def ok(self) -> bool:
        return self.pa_perfect_found == 0 and not any(
            t["fail"] for t in self.theorem_tallies.values())

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        out = {
            "bounds": {"max_states": self.bounds},
            "mode": self.mode,
            "seed": self.seed,
            "samples": self.samples,
            "quantify": self.quantify,
            "inversion_mode": self.inversion_mode,
            "models_examined": self.models_examined,
            "rejected": self.rejected,
            "premise_satisfying": self.premise_satisfying,
            "pa_perfect_found": self.pa_perfect_found,
            "contradictions": self.contradictions,
            "theorem_tallies": self.theorem_tallies,
            "counterexamples": self.counterexamples,
        }
        if timing and self.duration is not None:
            out["duration"] = round(self.duration, 3)
        return out


def sample_indices(max_states: int, samples: int, seed: int) -> np.ndarray:
    """Seeded uniform draws over the union of candidate grids for n <= max_states."""
    total = sum(grid_size(n) for n in range(1, max_states + 1))
    rng = np.random.default_rng(seed)
    return rng.integers(0, total, size=samples, dtype=np.int64)


def _run(fn, jobs: list, workers: int) -> Tally:
    if workers <= 1 or len(jobs) <= 1:
        parts = [fn(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, jobs))
    total = Tally()
    for p in parts:
        total = total.merge(p)
    return total


def search_models(max_states: int, mode: str | None = None, samples: int = 100_000, seed: int = 0,
                  quantify: str = "diagonal", inversion_mode: str = "relational",
                  workers: int = 1) -> SearchReport:
    """Run the diagonal search and the theorem checks over raw candidates.

    ``mode`` defaults to exhaustive up to three states and sampled above.
    Results do not depend on ``workers``.
    """
    if not isinstance(max_states, int) or max_states < 1:
        raise BoundsTooLarge(f"max_states must be a positive integer, got {max_states!r}")
    if mode is None:
        mode = "exhaustive" if max_states <= EXHAUSTIVE_LIMIT else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown search mode {mode!r}")
    if quantify not in ("diagonal", "full"):
        raise ValueError(f"unknown quantification {quantify!r}")
    if inversion_mode not in ("relational", "strict"):
        raise ValueError(f"unknown inversion mode {inversion_mode!r}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise InvalidSeed(f"seed must be a non-negative integer, got {seed!r}")
    start = time.perf_counter()
    if mode == "exhaustive":
        if max_states > EXHAUSTIVE_LIMIT:
            raise BoundsTooLarge(f"exhaustive search is limited to {EXHAUSTIVE_LIMIT} states")
        jobs = []
        pieces = max(1, workers) * 4
        for n in range(1, max_states + 1):
            if not focus_masks(n):
                continue
            nrel = 3 ** (n * n)
            step = -(-nrel // pieces)
            jobs += [(n, lo, min(nrel, lo + step), quantify, inversion_mode)
                     for lo in range(0, nrel, step)]
        tally = _run(_exhaustive_chunk, jobs, workers)
        # n=1 has no focus split: its grid is empty
        n_samples = None
    else:
        if max_states > SAMPLED_LIMIT:
            raise BoundsTooLarge(f"sampled search is limited to {SAMPLED_LIMIT} states")
        if not isinstance(samples, int) or samples < 1:
            raise ValueError("sampled mode needs samples >= 1")
        idx = sample_indices(max_states, samples, int(seed)).tolist()
        chunk = -(-len(idx) // max(1, workers))
        jobs = [(idx[i:i + chunk], max_states, quantify, inversion_mode)
                for i in range(0, len(idx), chunk)]
        tally = _run(_sampled_chunk, jobs, workers)
        n_samples = samples
    return SearchReport(
        bounds=max_states, mode=mode, seed=int(seed), samples=n_samples, quantify=quantify,
        inversion_mode=inversion_mode, models_examined=tally.examined, rejected=tally.rejected,
        premise_satisfying=tally.premise_satisfying, pa_perfect_found=tally.pa_perfect_found,
        contradictions=tally.contradictions, theorem_tallies=tally.theorems,
        counterexamples=tally.counterexamples, duration=time.perf_counter() - start,
    )


def sweep_observation_theorems(max_system: int = 3, max_observer: int = 3,
                               mode: str = "relational", literal: bool = False) -> Tally:
    """Check the two inversion theorems on every observer/system pair within bounds.

    Candidates: relations over ``ns`` system and ``nm`` observer states,
    any subset of system states as the focus (a classical property), and
    any map ``alpha`` on observer states. With ``literal=True`` perfectness
    only constrains the states where the property is actual; that reading
    admits counterexamples and is exposed to demonstrate it.
    """
    t = Tally()
    index = 0
    for ns in range(1, max_system + 1):
        for nm in range(1, max_observer + 1):
            full = (1 << ns) - 1
            n_alpha = nm ** nm
            for codes in product(range(3), repeat=ns * nm):
                rd = relation_data(ns, nm, codes, mode)
                block = (full + 1) * n_alpha
                t.examined += block
                if not rd.surjective:
                    t.rejected += block
                    index += block
                    continue
                for a in range(full + 1):
                    ac = full ^ a
                    if literal:
                        right = [rd.yes[m] & a == a for m in range(nm)]
                        wrong = [rd.yes[m] & ac == ac for m in range(nm)]
                    else:
                        right = [rd.yes[m] == a and rd.no[m] == ac for m in range(nm)]
                        wrong = [rd.yes[m] == ac and rd.no[m] == a for m in range(nm)]
                    pairs = [(m, ms) for m in range(nm) if right[m] for ms in range(nm) if wrong[ms]]
                    if pairs:
                        ok = all(ms in rd.inv[m] for m, ms in pairs)
                        t.bump("theorem2", "pass" if ok else "fail", n_alpha)
                        if not ok:
                            t.record(index, "theorem2", ns=ns, nm=nm, relation=list(codes), focus=a)
                    for alpha in product(*rd.inv):
                        ok = all(right[m] == wrong[alpha[m]] for m in range(nm))
                        t.bump("theorem1", "pass" if ok else "fail")
                        if not ok:
                            t.record(index + alpha_index(alpha, nm), "theorem1", ns=ns, nm=nm,
                                     relation=list(codes), focus=a, alpha=list(alpha))
                    index += n_alpha
    return t
