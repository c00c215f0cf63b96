"""Presentations shared by the Rips, subgroup, fibre and acceptance tests."""

from __future__ import annotations

import functools
import random

from ripsconj.presentation import Presentation
from ripsconj.rips import rips_build

SEED = 20240611


def _random_relator(rng: random.Random, gens, lo: int, hi: int) -> str:
    while True:
        n = rng.randint(lo, hi)
        w = []
        for _ in range(n):
            x = (rng.choice(gens), rng.choice([1, -1]))
            if w and w[-1] == (x[0], -x[1]):
                continue
            w.append(x)
        while len(w) > 1 and w[0] == (w[-1][0], -w[-1][1]):
            w = w[1:-1]
        if w:
            return " ".join(f"{g}^{s}" for g, s in w)


def random_two_by_two(seed: int) -> Presentation:
    rng = random.Random(seed)
    return Presentation.from_strings("x y", *(_random_relator(rng, "xy", 3, 6) for _ in range(2)))


CORPUS = {
    "trivial": Presentation.from_strings(""),
    "Z": Presentation.from_strings("x"),
    "Z3": Presentation.from_strings("x", "x^3"),
    "Z6": Presentation.from_strings("x", "x^6"),
    "Z2": Presentation.from_strings("x y", "x y x^-1 y^-1"),
    "S3": Presentation.from_strings("s t", "s^2", "t^2", "s t s t s t"),
    "F2": Presentation.from_strings("x y"),
    "D4": Presentation.from_strings("x y", "x^2", "y^2", "x y x y x y x y"),
    "BS12": Presentation.from_strings("x y", "y^-1 x y x^-2"),
    "rand1": random_two_by_two(SEED),
    "rand2": random_two_by_two(SEED + 1),
}

FINITE_ORDER = {"trivial": 1, "Z3": 3, "Z6": 6, "S3": 6, "D4": 8}


@functools.lru_cache(maxsize=None)
def build(name: str):
    return rips_build(CORPUS[name])
