"""Search budgets, verdict types and the ambient-group context."""

from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from .presentation import Presentation, WordOracle
from .smallcanc import CertificateMissing, SymmetrizedSet, cyclic_dehn_run, symmetrize, word_problem
from .words import Word, free_reduce

__all__ = [
    "Budget",
    "Conjugate",
    "ConjugacyVerdict",
    "Deadline",
    "GroupContext",
    "NonConjugate",
    "SubgroupContext",
    "Undecided",
]


@dataclass(frozen=True)
class Budget:
    """Limits shared by the search procedures.

    ``max_length`` bounds enumerated words (conjugators, subgroup elements),
    ``max_degree`` the permutation degree of finite quotients, ``max_steps``
    the number of cooperative search steps and ``time_ms`` wall-clock time.
    """

    max_length: int = 8
    max_degree: int = 4
    max_steps: int = 200_000
    time_ms: int = 10_000
    root_slack: int = 2
    order_cap: int = 10_000
    max_cosets: int = 100_000

    def __post_init__(self):
        for name in ("max_length", "max_degree", "max_steps", "time_ms", "root_slack", "order_cap", "max_cosets"):
            if getattr(self, name) <= 0:
                raise ValueError(f"budget field {name} must be positive")

    def deadline(self) -> "Deadline":
        return Deadline(time.monotonic() + self.time_ms / 1000.0)


@dataclass
class Deadline:
    at: float

    def expired(self) -> bool:
        return time.monotonic() >= self.at


@dataclass(frozen=True)
class Conjugate:
    """``conjugator`` c satisfies c^-1 x c = y (re-verified before return)."""

    conjugator: Any
    path: str = ""


@dataclass(frozen=True)
class NonConjugate:
    witness: Any
    path: str = ""


@dataclass(frozen=True)
class Undecided:
    reason: str
    spent: dict = field(default_factory=dict, compare=False)


ConjugacyVerdict = Conjugate | NonConjugate | Undecided


class GroupContext:
    """A C'(1/6)-certified group with its word problem and a search budget."""

    def __init__(self, G: Presentation, budget: Budget | None = None):
        self.G = G
        self.symmetrized: SymmetrizedSet = symmetrize(G)
        if not self.symmetrized.certified:
            raise CertificateMissing(f"{G} is not certified C'(1/6)")
        self.budget = budget or Budget()

    def wp(self, w: Word) -> bool:
        return word_problem(w, self.symmetrized)

    def equal(self, u: Word, v: Word) -> bool:
        return word_problem(u * ~v, self.symmetrized)

    def is_conjugator(self, c: Word, x: Word, y: Word) -> bool:
        return word_problem(~c * x * c * ~y, self.symmetrized)

    @functools.lru_cache(maxsize=4096)
    def cyclic_form(self, w: Word) -> tuple[Word, Word]:
        return cyclic_dehn_run(w, self.symmetrized)

    def with_budget(self, budget: Budget) -> "GroupContext":
        out = GroupContext.__new__(GroupContext)
        out.G, out.symmetrized, out.budget = self.G, self.symmetrized, budget
        return out


@dataclass(frozen=True)
class SubgroupContext:
    """A subgroup given by generators and a tri-state membership oracle."""

    ambient: GroupContext
    gens: tuple[Word, ...]
    membership: WordOracle
    normal: bool = False

    def __post_init__(self):
        gens = tuple(free_reduce(g) for g in self.gens)
        object.__setattr__(self, "gens", gens)
        for g in gens:
            self.ambient.G.check_alphabet(g)
            if self.membership(g) is False:
                raise ValueError(f"subgroup generator {g} rejected by the membership oracle")

    def letter_generators(self) -> Optional[set[str]]:
        """Names of the generators if every one is a single positive letter."""
        names = set()
        for g in self.gens:
            if len(g) != 1 or g[0].sign < 0:
                return None
            names.add(g[0].name)
        return names
