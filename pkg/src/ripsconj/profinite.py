"""Finite quotients via permutation representations, separability witnesses,
and the three-path conjugacy decider.

A :class:`Witness` stores the whole quotient (generator images) and the words
it separates, so anyone can re-evaluate it; :meth:`Witness.verify` does so.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from . import perms as P
from .centralizer import centralizer_coset_reps
from .context import (
    Budget,
    Conjugate,
    ConjugacyVerdict,
    GroupContext,
    NonConjugate,
    Undecided,
)
from .cosets import CosetTable
from .presentation import Presentation
from .smallcanc import CertificateMissing
from .words import Word, enumerate_words, free_reduce, letter_code

__all__ = [
    "Exhausted",
    "PermQuotient",
    "SoundnessError",
    "Witness",
    "enumerate_perm_reps",
    "parallel_decide_conjugacy",
    "separate_conjugacy",
    "separate_elements",
    "separate_from_double_coset",
    "separate_from_subgroup",
]


class SoundnessError(RuntimeError):
    """A certificate or witness failed re-verification (internal error)."""


# ---------------------------------------------------------------------------
# quotients


@dataclass(frozen=True)
class PermQuotient:
    """A homomorphism to Sym(degree) given by generator images (0-based)."""

    presentation: Presentation
    degree: int
    images: tuple[P.Perm, ...]
    _table: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        images = tuple(tuple(p) for p in self.images)
        if len(images) != len(self.presentation.generators):
            raise ValueError("need one image per generator")
        for p in images:
            if sorted(p) != list(range(self.degree)):
                raise ValueError(f"{p} is not a permutation of degree {self.degree}")
        table = {}
        for g, p in zip(self.presentation.generators, images):
            table[letter_code(g, 1)] = p
            table[letter_code(g, -1)] = P.inverse(p)
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "_table", table)

    @classmethod
    def from_table(cls, p: Presentation, table: CosetTable) -> "PermQuotient":
        """The action on the cosets of a complete coset table."""
        return cls(p, len(table.rows), tuple(table.permutations()))

    def image(self, w: Word) -> P.Perm:
        self.presentation.check_alphabet(w)
        cur = P.identity(self.degree)
        for ch, run in itertools.groupby(w.code):
            cur = P.compose(cur, P.power(self._table[ch], len(list(run))))
        return cur

    def is_homomorphism(self) -> bool:
        e = P.identity(self.degree)
        return all(self.image(r) == e for r in self.presentation.relators)

    def group_elements(self, cap: int = 10_000) -> Optional[set[P.Perm]]:
        return P.closure(self.images, self.degree, cap)

    def group_order(self, cap: int = 10_000) -> Optional[int]:
        els = self.group_elements(cap)
        return None if els is None else len(els)

    def to_record(self) -> list[str]:
        lines = [f"degree: {self.degree}"]
        lines += [f"gen {g}: {P.to_cycle_notation(p)}" for g, p in zip(self.presentation.generators, self.images)]
        return lines


def _compile(p: Presentation, w: Word) -> list[tuple[int, int]]:
    index = {g: i for i, g in enumerate(p.generators)}
    runs = []
    for name, e in w.runs():
        runs.append((index[name], e))
    return runs


def _perm_rep_search(p: Presentation, degree: int) -> Iterator[Optional[tuple[P.Perm, ...]]]:
    """Backtracking over generator images; yields ``None`` as a progress tick
    after each rejected assignment and the image tuple for each homomorphism."""
    m = len(p.generators)
    all_perms = list(itertools.permutations(range(degree)))
    e = P.identity(degree)
    checks: list[list[list[tuple[int, int]]]] = [[] for _ in range(m)]
    for r in p.relators:
        runs = _compile(p, r)
        checks[max(j for j, _ in runs)].append(runs)
    imgs: list[P.Perm] = [e] * m

    def holds(runs) -> bool:
        cur = e
        for j, k in runs:
            cur = P.compose(cur, P.power(imgs[j], k))
        return cur == e

    def dfs(j: int):
        if j == m:
            yield tuple(imgs)
            return
        for perm in all_perms:
            imgs[j] = perm
            if all(holds(r) for r in checks[j]):
                yield from dfs(j + 1)
            else:
                yield None

    yield from dfs(0)


def enumerate_perm_reps(p: Presentation, degree: int, limit: Optional[int] = None) -> Iterator[PermQuotient]:
    """Every homomorphism to Sym(degree), lexicographic in the generator images."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    count = 0
    for imgs in _perm_rep_search(p, degree):
        if imgs is None:
            continue
        if limit is not None and count >= limit:
            return
        count += 1
        yield PermQuotient(p, degree, imgs)


# ---------------------------------------------------------------------------
# witnesses

ELEMENT = "element-separation"
CONJUGACY = "conjugacy-separation"
SUBGROUP = "subgroup-separation"
DOUBLE_COSET = "double-coset-separation"
KINDS = (ELEMENT, CONJUGACY, SUBGROUP, DOUBLE_COSET)


@dataclass(frozen=True)
class Witness:
    """A finite quotient separating the data words.

    ``words`` holds (role, word) pairs: ``x``/``y`` for element and conjugacy
    separation; ``g`` and ``h`` (subgroup generators, repeated) for subgroup
    separation, plus ``c`` (the cyclic factor) for double cosets.
    """

    kind: str
    quotient: PermQuotient
    words: tuple[tuple[str, Word], ...]

    def _role(self, role: str) -> list[Word]:
        return [w for r, w in self.words if r == role]

    def verify(self) -> bool:
        q = self.quotient
        if not q.is_homomorphism():
            return False
        n = q.degree
        if self.kind in (ELEMENT, CONJUGACY):
            (x,), (y,) = self._role("x"), self._role("y")
            px, py = q.image(x), q.image(y)
            if self.kind == ELEMENT:
                return px != py
            orbit = P.conjugacy_orbit(px, q.images, math.factorial(n))
            return py not in orbit
        g = q.image(self._role("g")[0])
        sub = P.closure([q.image(h) for h in self._role("h")], n, math.factorial(n))
        if self.kind == SUBGROUP:
            return g not in sub
        if self.kind == DOUBLE_COSET:
            cyc = P.closure([q.image(c) for c in self._role("c")], n, math.factorial(n))
            return all(P.compose(c, h) != g for c in cyc for h in sub)
        return False

    def to_record(self) -> str:
        lines = [f"kind: {self.kind}", *self.quotient.to_record()]
        for role, w in self.words:
            lines.append(f"word {role}: {w}")
            lines.append(f"image {role}: {P.to_cycle_notation(self.quotient.image(w))}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "degree": self.quotient.degree,
            "images": {g: P.to_cycle_notation(p) for g, p in zip(self.quotient.presentation.generators, self.quotient.images)},
            "words": [f"{role}: {w} -> {P.to_cycle_notation(self.quotient.image(w))}" for role, w in self.words],
        }


@dataclass(frozen=True)
class Exhausted:
    """No witness found within the budget; ``frontier`` says how far it got."""

    kind: str
    frontier: dict = field(default_factory=dict)
    skipped: tuple[str, ...] = ()


def _quotients(p: Presentation, budget: Budget, stats: dict) -> Iterator[Optional[PermQuotient]]:
    for n in range(1, budget.max_degree + 1):
        stats["degree"] = n
        for imgs in _perm_rep_search(p, n):
            if imgs is None:
                yield None
                continue
            stats["quotients"] = stats.get("quotients", 0) + 1
            yield PermQuotient(p, n, imgs)


def _conjugacy_witness_steps(p: Presentation, x: Word, y: Word, budget: Budget, stats: dict, skipped: list):
    for q in _quotients(p, budget, stats):
        if q is None:
            yield None
            continue
        px, py = q.image(x), q.image(y)
        if P.cycle_type(px) != P.cycle_type(py):
            yield Witness(CONJUGACY, q, (("x", x), ("y", y)))
            return
        orbit = P.conjugacy_orbit(px, q.images, budget.order_cap)
        if orbit is None:
            skipped.append(f"degree {q.degree} images {q.images}: class exceeds cap {budget.order_cap}")
        elif py not in orbit:
            yield Witness(CONJUGACY, q, (("x", x), ("y", y)))
            return
        yield None


def _run_search(steps, kind: str, budget: Budget, stats: dict, skipped: list):
    deadline = budget.deadline()
    count = 0
    for out in steps:
        if out is not None:
            if not out.verify():
                raise SoundnessError(f"witness failed re-verification: {out}")
            return out
        count += 1
        if count >= budget.max_steps or deadline.expired():
            stats["stopped"] = "budget"
            break
    stats["steps"] = count
    return Exhausted(kind, dict(stats), tuple(skipped))


def separate_conjugacy(p: Presentation, x: Word, y: Word, budget: Budget | None = None) -> Witness | Exhausted:
    """First quotient (by degree, then lexicographic) where x and y have
    non-conjugate images inside the image group."""
    budget = budget or Budget()
    p.check_alphabet(x), p.check_alphabet(y)
    stats: dict = {}
    skipped: list = []
    return _run_search(_conjugacy_witness_steps(p, x, y, budget, stats, skipped), CONJUGACY, budget, stats, skipped)


def separate_elements(p: Presentation, x: Word, y: Word, budget: Budget | None = None) -> Witness | Exhausted:
    budget = budget or Budget()
    p.check_alphabet(x), p.check_alphabet(y)
    stats: dict = {}

    def steps():
        for q in _quotients(p, budget, stats):
            if q is not None and q.image(x) != q.image(y):
                yield Witness(ELEMENT, q, (("x", x), ("y", y)))
                return
            yield None

    return _run_search(steps(), ELEMENT, budget, stats, [])


def _subgroup_steps(p, g, H_gens, cyclic, kind, budget, stats, skipped):
    words = (("g", g),) + tuple(("h", h) for h in H_gens) + tuple(("c", c) for c in cyclic)
    for q in _quotients(p, budget, stats):
        if q is None:
            yield None
            continue
        pg = q.image(g)
        sub = P.closure([q.image(h) for h in H_gens], q.degree, budget.order_cap)
        cyc = P.closure([q.image(c) for c in cyclic], q.degree, budget.order_cap)
        if sub is None or cyc is None:
            skipped.append(f"degree {q.degree} images {q.images}: subgroup exceeds cap {budget.order_cap}")
        elif all(P.compose(c, h) != pg for c in cyc for h in sub):
            yield Witness(kind, q, words)
            return
        yield None


def separate_from_subgroup(p: Presentation, g: Word, H_gens: Sequence[Word], budget: Budget | None = None) -> Witness | Exhausted:
    """A quotient in which the image of ``g`` lies outside the image of <H_gens>."""
    budget = budget or Budget()
    p.check_alphabet(g)
    for h in H_gens:
        p.check_alphabet(h)
    stats: dict = {}
    skipped: list = []
    steps = _subgroup_steps(p, g, tuple(H_gens), (), SUBGROUP, budget, stats, skipped)
    return _run_search(steps, SUBGROUP, budget, stats, skipped)


def separate_from_double_coset(
    p: Presentation, g: Word, x: Word, H_gens: Sequence[Word], budget: Budget | None = None
) -> Witness | Exhausted:
    """A quotient in which the image of ``g`` avoids image(C)·image(H),
    where C = <root(x)> is the centralizer of ``x``.

    Needs a C'(1/6) certificate for ``p`` and a verified root.
    """
    budget = budget or Budget()
    for w in (g, x, *H_gens):
        p.check_alphabet(w)
    ctx = GroupContext(p, budget)
    data = centralizer_coset_reps(ctx, x)
    if not data.verified:
        raise CertificateMissing(f"no verified root for {x} within the budget")
    stats: dict = {}
    skipped: list = []
    steps = _subgroup_steps(p, g, tuple(H_gens), (data.root,), DOUBLE_COSET, budget, stats, skipped)
    return _run_search(steps, DOUBLE_COSET, budget, stats, skipped)


# ---------------------------------------------------------------------------
# conjugacy decider


def _rotation_path(ctx: GroupContext, x: Word, y: Word):
    fx, tx = ctx.cyclic_form(x)
    fy, ty = ctx.cyclic_form(y)
    if len(fx) == len(fy):
        n = len(fx)
        pos = (fx.code + fx.code).find(fy.code) if n else 0
        if pos >= 0:
            # fy = u^-1 fx u with u = fx[:pos]
            yield Conjugate(tx * fx[:pos] * ~ty, "rotation")


def _enumeration_path(ctx: GroupContext, x: Word, y: Word, budget: Budget):
    for g in enumerate_words(ctx.G.generators, budget.max_length):
        if ctx.is_conjugator(g, x, y):
            yield Conjugate(g, "enumeration")
            return
        yield None


def _quotient_path(ctx: GroupContext, x: Word, y: Word, budget: Budget, stats: dict, skipped: list):
    for out in _conjugacy_witness_steps(ctx.G, x, y, budget, stats, skipped):
        yield None if out is None else NonConjugate(out, "quotient")


def parallel_decide_conjugacy(ctx: GroupContext, x: Word, y: Word, budget: Budget | None = None) -> ConjugacyVerdict:
    """Decide whether c^-1 x c = y for some c.

    Three searches share one budget, stepped round-robin in a fixed order:
    rotation of cyclic Dehn forms, conjugator enumeration by length, and
    the finite-quotient witness search. The first definite answer wins once
    its certificate or witness re-verifies.
    """
    budget = budget or ctx.budget
    ctx.G.check_alphabet(x), ctx.G.check_alphabet(y)
    x, y = free_reduce(x), free_reduce(y)
    deadline = budget.deadline()
    stats: dict = {}
    skipped: list = []
    paths = [
        ["rotation", _rotation_path(ctx, x, y)],
        ["enumeration", _enumeration_path(ctx, x, y, budget)],
        ["quotient", _quotient_path(ctx, x, y, budget, stats, skipped)],
    ]
    steps = 0
    while paths:
        for entry in list(paths):
            name, gen = entry
            try:
                out = next(gen)
            except StopIteration:
                paths.remove(entry)
                continue
            steps += 1
            if isinstance(out, Conjugate):
                if not ctx.is_conjugator(out.conjugator, x, y):
                    raise SoundnessError(f"conjugator {out.conjugator} failed re-verification")
                return out
            if isinstance(out, NonConjugate):
                if not out.witness.verify():
                    raise SoundnessError("witness failed re-verification")
                return out
            if steps >= budget.max_steps or deadline.expired():
                return Undecided("budget exhausted", {"steps": steps, **stats, "skipped": len(skipped)})
    return Undecided("all searches exhausted", {"steps": steps, **stats, "skipped": len(skipped)})
