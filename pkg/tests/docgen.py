"""Seeded generator of random valid ``.spm`` documents.

Documents are produced as text with shuffled entry order, random
whitespace and comments, so canonical serialization has real work to do.
"""

from __future__ import annotations

import random

OUTCOMES = ("yes", "no", "yes|no")
ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_+-"
KEYWORDS = {"system", "observer", "relation", "inversion", "composition", "states", "test",
            "property", "tests", "indicator", "on", "compound", "tau", "rho", "phi", "yes", "no"}


class Names:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used: set[str] = set()

    def fresh(self, prefix: str) -> str:
        while True:
            tail = "".join(self.rng.choice(ALPHABET) for _ in range(self.rng.randint(0, 3)))
            name = prefix + tail
            # "->" inside an id would lex as an arrow
            if "->" in name or name.endswith("-") or name in KEYWORDS or name in self.used:
                continue
            self.used.add(name)
            return name


def _ws(rng: random.Random) -> str:
    return rng.choice([" ", "  ", "\n", "\n  ", "\t", " # note\n"])


def _shuffled(rng: random.Random, items: list) -> list:
    items = list(items)
    rng.shuffle(items)
    return items


def _outcome(rng: random.Random, allow_either: bool = True) -> str:
    o = rng.choice(OUTCOMES if allow_either else OUTCOMES[:2])
    return o.replace("|", rng.choice(["|", " | "])) if "|" in o else o


def _space(rng: random.Random, names: Names, kind: str) -> tuple[str, dict]:
    sid = names.fresh("S" if kind == "system" else "M")
    states = [names.fresh("s") for _ in range(rng.randint(1, 4))]
    tests, lines = {}, []
    if kind == "observer":
        ind_t = names.fresh("t")
        row = {s: rng.choice(["yes", "no"]) for s in states}
        tests[ind_t] = row
    for _ in range(rng.randint(0 if kind == "observer" else 1, 3)):
        tests[names.fresh("t")] = {s: _outcome(rng) for s in states}
    props = {}
    tids = list(tests)
    if kind == "observer":
        props[names.fresh("p")] = [ind_t]
    for _ in range(rng.randint(0, 2)):
        props[names.fresh("p")] = rng.sample(tids, rng.randint(1, len(tids)))
    w = lambda: _ws(rng)  # noqa: E731
    body = [f"states{w()}{' '.join(_shuffled(rng, states))};"]
    indicator = None
    if kind == "observer":
        indicator = next(iter(props))
        body.append(f"indicator {indicator};")
    for tid in _shuffled(rng, tids):
        entries = "".join(f"{s}{w()}->{w()}{o}{w()};{w()}"
                          for s, o in _shuffled(rng, list(tests[tid].items())))
        body.append(f"test {tid} {{{w()}{entries}}}")
    for pid in _shuffled(rng, list(props)):
        body.append(f"property {pid}{w()}{{ tests {' '.join(props[pid])};{w()}}}")
    text = f"{kind} {sid}{w()}{{{w()}" + w().join(body) + f"{w()}}}"
    return text, {"id": sid, "states": states, "indicator": indicator}


def gen_document(seed: int) -> str:
    rng = random.Random(seed)
    names = Names(rng)
    blocks = []
    systems = []
    observers = []
    for _ in range(rng.randint(0, 2)):
        t, info = _space(rng, names, "system")
        blocks.append(t)
        systems.append(info)
    for _ in range(rng.randint(1, 2)):
        t, info = _space(rng, names, "observer")
        blocks.append(t)
        observers.append(info)
    spaces = systems + observers
    for _ in range(rng.randint(0, 3)):
        obs = rng.choice(observers)
        src = rng.choice(spaces)
        rid = names.fresh("o")
        pairs = [(s, m) for s in src["states"] for m in obs["states"]]
        entries = "".join(f"({s},{_ws(rng)}{m}) = {_outcome(rng)};{_ws(rng)}"
                          for s, m in _shuffled(rng, pairs))
        blocks.append(f"relation {rid} ({src['id']}, {obs['id']}) {{{_ws(rng)}{entries}}}")
        if rng.random() < 0.5:
            compound = [names.fresh("c") for _ in range(rng.randint(1, 3))]
            tau = "".join(f"({s}, {m}) -> {rng.choice(compound)}; " for s, m in _shuffled(rng, pairs))
            rho = "".join(f"{c} -> {rng.choice(obs['states'])};{_ws(rng)}" for c in _shuffled(rng, compound))
            phi = "".join(f"{m} -> {_outcome(rng)}; " for m in _shuffled(rng, obs["states"]))
            blocks.append(f"composition {rid} {{ compound {' '.join(compound)}; tau {{ {tau}}}"
                          f"{_ws(rng)}rho {{ {rho}}} phi {{ {phi}}} }}")
    for obs in observers:
        if rng.random() < 0.5:
            mapping = "".join(f"{m} -> {rng.choice(obs['states'])}; " for m in _shuffled(rng, obs["states"]))
            blocks.append(f"inversion {names.fresh('alpha')} on {obs['id']} {{ {mapping}}}")
    header = "# generated\n" if rng.random() < 0.5 else ""
    return header + "\n\n".join(_shuffled(rng, blocks)) + "\n"
