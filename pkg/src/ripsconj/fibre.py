"""Fibre products over a Rips group.

For a Rips output G -> P and F <= P, the fibre product
T_H = {(g1, g2) : psi(g1) = psi(g2) modulo <<F>>} sits in G x G; T_N is
the case F = 1. Membership reduces to the word problem of Q = P / <<F>>,
and conjugacy reduces to conjugacy in G plus one membership query for a
cyclic subgroup of Q (MPCS).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from . import perms as Pm
from .centralizer import centralizer_coset_reps
from .context import Budget, Conjugate, ConjugacyVerdict, GroupContext, NonConjugate, Undecided
from .cosets import todd_coxeter
from .presentation import Presentation, apply_hom
from .profinite import PermQuotient, SoundnessError, parallel_decide_conjugacy
from .rips import RipsOutput
from .smallcanc import symmetrize
from .words import EMPTY, ParseError, Word, free_reduce

__all__ = [
    "FibreContext",
    "FibreRejection",
    "FiniteQuotientOracle",
    "AbelianQuotientOracle",
    "PairWord",
    "QuotientOracle",
    "UnsupportedQuotient",
    "conj_in_direct_product",
    "fibre_conj",
    "fibre_generators",
    "fibre_membership",
    "index_ratio_check",
    "make_quotient_oracle",
]


class UnsupportedQuotient(ValueError):
    """Q is neither visibly abelian nor finite within the enumeration limit."""


@dataclass(frozen=True)
class PairWord:
    left: Word
    right: Word

    def __post_init__(self):
        object.__setattr__(self, "left", free_reduce(self.left))
        object.__setattr__(self, "right", free_reduce(self.right))

    @classmethod
    def diagonal(cls, w: Word) -> "PairWord":
        return cls(w, w)

    @classmethod
    def parse(cls, text: str) -> "PairWord":
        m = re.fullmatch(r"\s*\(([^|()]*)\|([^|()]*)\)\s*", text)
        if not m:
            raise ParseError(f"expected '(<word> | <word>)', got {text!r}")
        return cls(Word.parse(m.group(1)), Word.parse(m.group(2)))

    def __mul__(self, other: "PairWord") -> "PairWord":
        return PairWord(self.left * other.left, self.right * other.right)

    def inverse(self) -> "PairWord":
        return PairWord(~self.left, ~self.right)

    __invert__ = inverse

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


IDENTITY = PairWord(EMPTY, EMPTY)


# ---------------------------------------------------------------------------
# quotient oracles


class QuotientOracle(Protocol):
    """Decision procedures in Q; words are over P's generators."""

    def word_problem(self, w: Word) -> Optional[bool]: ...

    def mpcs_exponent(self, w: Word, x: Word) -> Optional[int]:
        """Some s with x^s = w in Q, or ``None`` if w is not in <x>."""

    def mpcs(self, w: Word, x: Word) -> Optional[bool]:
        """Is w in <x>?"""

    def conjugacy(self, u: Word, v: Word) -> Optional[bool]: ...


class FiniteQuotientOracle:
    """Q finite: the regular permutation representation from coset enumeration."""

    kind = "finite"

    def __init__(self, Q: Presentation, max_cosets: int = 10_000):
        table = todd_coxeter(Q, (), max_cosets)
        if not table.complete:
            raise UnsupportedQuotient(f"coset enumeration of {Q} did not finish within {max_cosets} cosets")
        self.Q = Q
        self.rep = PermQuotient.from_table(Q, table)
        self.order = self.rep.degree

    def _perm(self, w: Word) -> Pm.Perm:
        return self.rep.image(w)

    def word_problem(self, w: Word) -> bool:
        return self._perm(w)[0] == 0

    def mpcs_exponent(self, w: Word, x: Word) -> Optional[int]:
        target = self._perm(w)[0]
        px = self._perm(x)
        point, s = 0, 0
        while True:
            if point == target:
                return s
            point, s = px[point], s + 1
            if point == 0:
                return None

    def mpcs(self, w: Word, x: Word) -> bool:
        return self.mpcs_exponent(w, x) is not None

    def conjugacy(self, u: Word, v: Word) -> bool:
        orbit = Pm.conjugacy_orbit(self._perm(u), self.rep.images, self.order)
        return self._perm(v) in orbit


def _hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row Hermite-style echelon form over the integers (pivots positive)."""
    rows = [r[:] for r in rows if any(r)]
    out = []
    ncols = len(rows[0]) if rows else 0
    col = 0
    while rows and col < ncols:
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            pivot = live[0]
            nxt = [pivot]
            for r in live[1:]:
                q = r[col] // pivot[col]
                r = [a - q * b for a, b in zip(r, pivot)]
                (nxt if r[col] != 0 else rest).append(r)
            live = nxt
        if live:
            p = live[0]
            if p[col] < 0:
                p = [-a for a in p]
            out.append(p)
        rows = [r for r in rest if any(r)]
        col += 1
    return out


def _pivot(row: list[int]) -> int:
    return next(i for i, a in enumerate(row) if a)


class AbelianQuotientOracle:
    """Q visibly abelian: every commutator of two generators is a relator.
    Elements are exponent vectors modulo the lattice of relator vectors, so
    this covers free abelian Q and finite abelian Q alike."""

    kind = "abelian"

    def __init__(self, Q: Presentation):
        gens = Q.generators
        comms = []
        for i, j in itertools.combinations(range(len(gens)), 2):
            comms.append(Word.parse(f"{gens[i]} {gens[j]} {gens[i]}^-1 {gens[j]}^-1"))
        if Q.relators and all(Q.relators):
            s = symmetrize(Q)
            if not all(c in s for c in comms):
                raise UnsupportedQuotient(f"{Q} is not visibly abelian")
        elif comms:
            raise UnsupportedQuotient(f"{Q} is not visibly abelian")
        self.Q = Q
        self.index = {g: i for i, g in enumerate(gens)}
        self.lattice = [self.vector(r) for r in Q.relators]

    def vector(self, w: Word) -> list[int]:
        v = [0] * len(self.index)
        for name, e in w.runs():
            v[self.index[name]] += e
        return v

    def _solve(self, target: list[int], x: Optional[list[int]]) -> Optional[int]:
        # lattice rows (l, 0) and (x, 1); reduce (target, 0) on the first columns
        m = len(target)
        rows = [r + [0] for r in self.lattice] + ([x + [1]] if x is not None else [])
        basis = _hnf(rows)
        t = target + [0]
        for row in basis:
            c = _pivot(row)
            if c >= m:
                break
            if t[c] % row[c]:
                return None
            q = t[c] // row[c]
            t = [a - q * b for a, b in zip(t, row)]
        if any(t[:m]):
            return None
        return -t[m]

    def word_problem(self, w: Word) -> bool:
        return self._solve(self.vector(w), None) is not None

    def mpcs_exponent(self, w: Word, x: Word) -> Optional[int]:
        return self._solve(self.vector(w), self.vector(x))

    def mpcs(self, w: Word, x: Word) -> bool:
        return self.mpcs_exponent(w, x) is not None

    def conjugacy(self, u: Word, v: Word) -> bool:
        return self.word_problem(u * ~v)


def make_quotient_oracle(P: Presentation, F_gens: Sequence[Word] = (), max_cosets: int = 10_000) -> QuotientOracle:
    """The abelian oracle if Q = P/<<F>> is visibly abelian, else the finite
    one if Q enumerates, else :class:`UnsupportedQuotient`."""
    for f in F_gens:
        P.check_alphabet(f)
    Q = Presentation(P.generators, P.relators + tuple(free_reduce(f) for f in F_gens if free_reduce(f)))
    try:
        return AbelianQuotientOracle(Q)
    except UnsupportedQuotient:
        return FiniteQuotientOracle(Q, max_cosets)


# ---------------------------------------------------------------------------
# fibre products


class FibreContext:
    """T_H for H = psi^-1(<F>) with F given by words over P (empty for T_N)."""

    def __init__(
        self,
        out: RipsOutput,
        H_gens: Sequence[Word] = (),
        q_oracle: QuotientOracle | None = None,
        budget: Budget | None = None,
    ):
        self.out = out
        self.H_gens = tuple(free_reduce(h) for h in H_gens)
        for h in self.H_gens:
            out.P.check_alphabet(h)
        self.q = q_oracle or make_quotient_oracle(out.P, self.H_gens)
        self.group = GroupContext(out.G, budget)

    @property
    def budget(self) -> Budget:
        return self.group.budget

    def project(self, w: Word) -> Word:
        """G -> P (delete a-letters); then read in Q by the oracle."""
        return apply_hom(self.out.psi, w)


def _generator_pairs(out: RipsOutput, H_gens: Sequence[Word]) -> list[PairWord]:
    gens = [PairWord(n, EMPTY) for n in out.N_gens]
    gens += [PairWord(out.lift(h), EMPTY) for h in H_gens]
    gens += [PairWord.diagonal(Word.gen(g)) for g in out.G.generators]
    return gens


def fibre_generators(ctx: FibreContext) -> list[PairWord]:
    """N x 1, the lifts of F (left factor), and the diagonal."""
    return _generator_pairs(ctx.out, ctx.H_gens)


def fibre_membership(ctx: FibreContext, p: PairWord) -> Optional[bool]:
    ctx.out.G.check_alphabet(p.left), ctx.out.G.check_alphabet(p.right)
    return ctx.q.word_problem(ctx.project(p.left * ~p.right))


def conj_in_direct_product(ctx: FibreContext, x: PairWord, y: PairWord, budget: Budget | None = None) -> ConjugacyVerdict:
    """Componentwise conjugacy in G x G."""
    parts = []
    for i, (a, b) in enumerate(((x.left, y.left), (x.right, y.right)), 1):
        v = parallel_decide_conjugacy(ctx.group, a, b, budget)
        if isinstance(v, NonConjugate):
            return NonConjugate(v.witness, f"component {i}: {v.path}")
        if isinstance(v, Undecided):
            return Undecided(f"component {i}: {v.reason}", v.spent)
        parts.append(v.conjugator)
    return Conjugate(PairWord(*parts), "componentwise")


@dataclass(frozen=True)
class FibreRejection:
    """x, y conjugate in G x G by ``ambient`` but no candidate passed MPCS."""

    x: PairWord
    y: PairWord
    ambient: PairWord
    roots: tuple[Word, Word]
    queries: tuple[tuple[Word, Word], ...] = field(default=())  # (q-image of z1 z2^-1, q-image of x1)

    def to_dict(self) -> dict:
        return {
            "kind": "mpcs-rejection",
            "x": str(self.x),
            "y": str(self.y),
            "ambient_conjugator": str(self.ambient),
            "roots": [str(r) for r in self.roots],
            "queries": [f"{a} in <{b}>: false" for a, b in self.queries],
        }


def _verified(ctx: FibreContext, c: PairWord, x: PairWord, y: PairWord, path: str) -> Conjugate:
    g = ctx.group
    if not (g.is_conjugator(c.left, x.left, y.left) and g.is_conjugator(c.right, x.right, y.right)):
        raise SoundnessError(f"pair conjugator {c} failed re-verification")
    if fibre_membership(ctx, c) is not True:
        raise SoundnessError(f"pair conjugator {c} is not in the fibre product")
    return Conjugate(c, path)


def fibre_conj(ctx: FibreContext, x: PairWord, y: PairWord, budget: Budget | None = None) -> ConjugacyVerdict:
    """Is there c in T_H with c^-1 x c = y (componentwise)?"""
    budget = budget or ctx.budget
    for p in (x, y):
        m = fibre_membership(ctx, p)
        if m is False:
            raise ValueError(f"{p} is not in the fibre product")
        if m is None:
            return Undecided("membership of the input undecided")
    if x == y:
        return Conjugate(IDENTITY, "identical")
    verdict = conj_in_direct_product(ctx, x, y, budget)
    if not isinstance(verdict, Conjugate):
        return verdict
    g1, g2 = verdict.conjugator.left, verdict.conjugator.right
    G = ctx.group
    # a trivial component makes every element of the other factor's
    # conjugator coset reachable through the diagonal
    if G.wp(x.left):
        return _verified(ctx, PairWord(g2, g2), x, y, "degenerate")
    if G.wp(x.right):
        return _verified(ctx, PairWord(g1, g1), x, y, "degenerate")
    gb = G.with_budget(budget)
    c1, c2 = centralizer_coset_reps(gb, x.left), centralizer_coset_reps(gb, x.right)
    if not (c1.verified and c2.verified):
        return Undecided("centralizer root search", {"steps": c1.steps + c2.steps})
    qx1 = ctx.project(x.left)
    queries = []
    for h1 in c1.coset_reps:
        for h2 in c2.coset_reps:
            z1, z2 = h1 * g1, h2 * g2
            qz = ctx.project(z1 * ~z2)
            s = ctx.q.mpcs_exponent(qz, qx1)
            queries.append((qz, qx1))
            if s is not None:
                return _verified(ctx, PairWord((x.left ** -s) * z1, z2), x, y, "mpcs")
    return NonConjugate(FibreRejection(x, y, verdict.conjugator, (c1.root, c2.root), tuple(queries)), "mpcs")


@dataclass(frozen=True)
class IndexCheck:
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.equal))


def _pair_closure(gens: list[tuple[Pm.Perm, Pm.Perm]], n: int) -> set:
    e = (Pm.identity(n), Pm.identity(n))
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for a, b in frontier:
            for g, h in gens:
                c = (Pm.compose(a, g), Pm.compose(b, h))
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


def index_ratio_check(ctx_H: FibreContext, ctx_N: FibreContext | None = None, p_finite: PermQuotient | None = None) -> IndexCheck:
    """|eta(T_H) : eta(T_N)| against |F| = |H : N|, computed inside P x P.

    ``p_finite`` is a faithful permutation representation of P; by default
    the regular one from coset enumeration.
    """
    out = ctx_H.out
    if ctx_N is not None and ctx_N.out.P != out.P:
        raise ValueError("contexts are over different quotients")
    if p_finite is None:
        table = todd_coxeter(out.P, (), ctx_H.budget.max_cosets)
        if not table.complete:
            raise ValueError("P is not finite within the coset limit")
        p_finite = PermQuotient.from_table(out.P, table)
    if p_finite.presentation != out.P or not p_finite.is_homomorphism():
        raise ValueError("the permutation data is not a representation of P")
    n = p_finite.degree

    def eta(pw: PairWord) -> tuple[Pm.Perm, Pm.Perm]:
        return (p_finite.image(ctx_H.project(pw.left)), p_finite.image(ctx_H.project(pw.right)))

    t_h = _pair_closure([eta(p) for p in fibre_generators(ctx_H)], n)
    n_pairs = fibre_generators(ctx_N) if ctx_N is not None else _generator_pairs(out, ())
    t_n = _pair_closure([eta(p) for p in n_pairs], n)
    if len(t_h) % len(t_n):
        raise SoundnessError("eta(T_N) does not divide eta(T_H)")
    F = Pm.closure([p_finite.image(h) for h in ctx_H.H_gens], n, len(t_h))
    if any(Pm.compose(Pm.compose(Pm.inverse(g), f), g) not in F for f in F for g in p_finite.images):
        raise ValueError("F is not normal in P; the fibre product then contains the normal closure of F")
    return IndexCheck(len(t_h) // len(t_n), len(F))
