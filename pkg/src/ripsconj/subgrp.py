"""Conjugacy in subgroups from membership, and membership from conjugacy.

* :func:`conj_in_subgroup` decides conjugacy in H <= G given a membership
  oracle for H: find any conjugator c in G, then test h c for the finitely
  many coset representatives h of <x> in C_G(x).
* :func:`membership_via_conj` decides g in N for normal N given a conjugacy
  oracle in N: x0^g is conjugate in N to x0 exactly when g N meets C_G(x0),
  and the coset of C_N(x0) in C_G(x0) containing g h^-1 settles it.

Each procedure needs the other's kind of oracle; for Rips groups the loop is
broken by :func:`quotient_word_problem`, which decides membership in N
through psi and the word problem of P.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .centralizer import CentralizerData, centralizer_coset_reps
from .context import (
    Budget,
    Conjugate,
    ConjugacyVerdict,
    GroupContext,
    NonConjugate,
    SubgroupContext,
    Undecided,
)
from .oracles import PresentationOracle
from .presentation import Presentation, WordOracle, apply_hom
from .profinite import SoundnessError, parallel_decide_conjugacy
from .rips import RipsOutput
from .words import EMPTY, Word, enumerate_words, free_reduce, letter_code

__all__ = [
    "CentralizerData",
    "RejectionTranscript",
    "centralizer_coset_reps",
    "conj_in_subgroup",
    "membership_via_conj",
    "normal_subgroup_context",
    "quotient_word_problem",
    "subgroup_words",
]

ConjOracle = Callable[[Word, Word], ConjugacyVerdict]


@functools.lru_cache(maxsize=32)
def _p_oracle(P: Presentation) -> PresentationOracle:
    return PresentationOracle(P)


def quotient_word_problem(out: RipsOutput, w: Word, p_oracle: WordOracle | None = None) -> Optional[bool]:
    """Is ``w`` in N? Equivalently, is psi(w) trivial in P."""
    out.G.check_alphabet(w)
    return (p_oracle or _p_oracle(out.P))(apply_hom(out.psi, w))


def normal_subgroup_context(out: RipsOutput, budget: Budget | None = None, p_oracle: WordOracle | None = None) -> SubgroupContext:
    """N = <a-generators> in G, with psi-membership as its oracle."""
    ctx = GroupContext(out.G, budget)
    return SubgroupContext(ctx, out.N_gens, lambda w: quotient_word_problem(out, w, p_oracle), normal=True)


def subgroup_words(H: SubgroupContext, max_length: int) -> Iterator[Word]:
    """Products of at most ``max_length`` generators of H (and inverses),
    freely reduced over the symbolic generators; duplicates possible."""
    names = [f"s{i}" for i in range(len(H.gens))]
    table = {}
    for name, g in zip(names, H.gens):
        table[letter_code(name, 1)] = g.code
        table[letter_code(name, -1)] = g.inverse().code
    for w in enumerate_words(names, max_length):
        yield free_reduce(Word.from_code("".join(table[c] for c in w.code)))


@dataclass(frozen=True)
class RejectionTranscript:
    """Why x and y are not conjugate in H: ``ambient`` conjugates x to y in G,
    C_G(x) = <root>, and every candidate ``h·ambient`` was rejected."""

    x: Word
    y: Word
    ambient: Word
    root: Word
    k: int
    rejected: tuple[Word, ...]

    def to_dict(self) -> dict:
        return {
            "kind": "centralizer-rejection",
            "x": str(self.x),
            "y": str(self.y),
            "ambient_conjugator": str(self.ambient),
            "root": str(self.root),
            "k": self.k,
            "rejected": [str(w) for w in self.rejected],
        }


def conj_in_subgroup(H: SubgroupContext, x: Word, y: Word, budget: Budget | None = None) -> ConjugacyVerdict:
    """Is there c in H with c^-1 x c = y?"""
    G = H.ambient
    budget = budget or G.budget
    x, y = free_reduce(x), free_reduce(y)
    for w in (x, y):
        G.G.check_alphabet(w)
        if H.membership(w) is False:
            raise ValueError(f"{w} is not in the subgroup")
    if x == y:
        return Conjugate(EMPTY, "identical")
    verdict = parallel_decide_conjugacy(G, x, y, budget)
    if isinstance(verdict, NonConjugate):
        return NonConjugate(verdict.witness, "ambient")
    if isinstance(verdict, Undecided):
        return Undecided(f"ambient conjugacy: {verdict.reason}", verdict.spent)
    c = verdict.conjugator
    if G.wp(x):
        return Conjugate(EMPTY, "trivial")
    data = centralizer_coset_reps(G.with_budget(budget), x)
    if not data.verified:
        return Undecided("centralizer root search", {"steps": data.steps})
    rejected = []
    stalled = False
    for h in data.coset_reps:
        cand = h * c
        m = H.membership(cand)
        if m is True:
            if not G.is_conjugator(cand, x, y):
                raise SoundnessError(f"conjugator {cand} failed re-verification")
            return Conjugate(cand, "centralizer")
        if m is None:
            stalled = True
        rejected.append(cand)
    if stalled:
        return Undecided("membership oracle indeterminate on a coset representative", {"tested": len(rejected)})
    return NonConjugate(RejectionTranscript(x, y, c, data.root, data.k, tuple(rejected)), "centralizer")


def _centralizer_cosets_in_n(N: SubgroupContext, data: CentralizerData) -> Optional[tuple[Word, ...]]:
    # f_i = r^i for i < d, d the least positive power of the root inside N
    root = data.root
    for d in range(1, data.k + 1):
        m = N.membership(root**d)
        if m is None:
            return None
        if m:
            return tuple(root**i for i in range(d))
    return None


def membership_via_conj(
    N: SubgroupContext,
    g: Word,
    conj_oracle_in_N: ConjOracle | None = None,
    x0: Word | None = None,
    budget: Budget | None = None,
) -> Optional[bool]:
    """Decide g in N (N normal) through a conjugacy oracle in N.

    ``N.membership`` is used only as the bootstrap oracle for the
    precomputation of the coset representatives f_i of C_N(x0) in C_G(x0)
    and to test the candidate h; ``None`` means undecided.
    """
    if not N.normal:
        raise ValueError("membership through conjugacy needs a normal subgroup")
    G = N.ambient
    budget = budget or G.budget
    G.G.check_alphabet(g)
    g = free_reduce(g)
    letters = N.letter_generators()
    if letters is not None and g.names() <= letters:
        return True
    x0 = free_reduce(x0) if x0 is not None else N.gens[0]
    if G.wp(x0):
        raise ValueError("x0 must be nontrivial")
    oracle = conj_oracle_in_N or (lambda u, v: conj_in_subgroup(N, u, v, budget))

    xg = ~g * x0 * g
    verdict = oracle(xg, x0)
    if isinstance(verdict, NonConjugate):
        return False
    if not isinstance(verdict, Conjugate):
        return None

    # h in N with x0^h = x0^g: the certificate's inverse, else search N
    h = None
    cand = ~verdict.conjugator if isinstance(verdict.conjugator, Word) else None
    if cand is not None and N.membership(cand) is True and G.is_conjugator(cand, x0, xg):
        h = cand
    else:
        for n in subgroup_words(N, budget.max_length):
            if G.is_conjugator(n, x0, xg):
                h = n
                break
    if h is None:
        return None
    z = g * ~h
    if not G.is_conjugator(z, x0, x0):
        raise SoundnessError("g h^-1 does not centralize x0")

    data = centralizer_coset_reps(G.with_budget(budget), x0)
    if not data.verified:
        return None
    f_reps = _centralizer_cosets_in_n(N, data)
    if f_reps is None:
        return None
    if len(f_reps) == 1:
        return True  # C_G(x0) = C_N(x0), so g h^-1 lies in N
    for n in subgroup_words(N, budget.max_length):
        for i, f in enumerate(f_reps):
            if G.equal(n, z * ~f):
                return i == 0
    return None
