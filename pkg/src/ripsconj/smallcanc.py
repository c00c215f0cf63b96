"""Metric small cancellation: symmetrized relator sets, pieces, Dehn's algorithm.

A presentation whose longest piece is shorter than a sixth of its shortest
relator (and with no proper-power relators) is certified C'(1/6). For such
presentations Dehn's algorithm decides the word problem, and the cyclic
variant gives a conjugacy-invariant normal-form heuristic.
"""

from __future__ import annotations

import bisect
import functools
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .presentation import Presentation
from .words import EMPTY, Word, cyclic_reduce, free_reduce, invert_code, letter_code, reduce_code

__all__ = [
    "CertificateMissing",
    "DegenerateRelatorError",
    "DehnMove",
    "DehnRun",
    "SmallCancellationReport",
    "SymmetrizedSet",
    "UncertifiedWarning",
    "cyclic_dehn_form",
    "cyclic_dehn_run",
    "dehn_reduce",
    "dehn_run",
    "piece_report",
    "symmetrize",
    "verify_metric",
    "word_problem",
]

SIXTH = Fraction(1, 6)
_REGEX_BUDGET = 200_000


class DegenerateRelatorError(ValueError):
    """A relator is freely trivial."""


class CertificateMissing(RuntimeError):
    """The presentation has not been certified C'(1/6)."""


class UncertifiedWarning(UserWarning):
    """Dehn reduction ran on a presentation without a C'(1/6) certificate."""


Origin = tuple[int, int, bool]  # (relator index, rotation, inverted)


@dataclass(frozen=True)
class _Cyclic:
    code: str  # the relator (or its inverse) as a cyclic word
    relator: int
    inverted: bool
    period: int  # number of distinct rotations


class SymmetrizedSet:
    """All cyclic rotations of the relators and their inverses, deduplicated.

    Elements are materialized lazily; ``len(s)`` can be large for long
    relators. Element ``i`` has origin ``s.origin(i)``, and the element order
    (relator by relator, the relator before its inverse, rotations in order)
    is the tie-breaking order used by :func:`dehn_reduce`.
    """

    def __init__(self, base: Presentation):
        self.base = base
        classes: list[_Cyclic] = []
        for i, r in enumerate(base.relators):
            if not r:
                raise DegenerateRelatorError(f"relator {i} is freely trivial")
            for inverted, code in ((False, r.code), (True, invert_code(r.code))):
                if any(len(c.code) == len(code) and (c.code + c.code).find(code) >= 0 for c in classes):
                    continue
                period = (code + code).find(code, 1)
                classes.append(_Cyclic(code, i, inverted, period))
        self._classes = classes
        self._doubled = [c.code + c.code for c in classes]
        self._offsets = np.cumsum([0] + [c.period for c in classes]).tolist()
        # shortest possible Dehn match; words shorter than this are Dehn-reduced
        self.min_half = min((len(c.code) // 2 + 1 for c in classes), default=0)

    def __len__(self) -> int:
        return self._offsets[-1]

    def _locate(self, i: int) -> tuple[int, int]:
        if not 0 <= i < len(self):
            raise IndexError(i)
        k = bisect.bisect_right(self._offsets, i) - 1
        return k, i - self._offsets[k]

    def element_code(self, i: int) -> str:
        k, rot = self._locate(i)
        n = len(self._classes[k].code)
        return self._doubled[k][rot : rot + n]

    def element(self, i: int) -> Word:
        return Word.from_code(self.element_code(i), True)

    def origin(self, i: int) -> Origin:
        k, rot = self._locate(i)
        c = self._classes[k]
        return (c.relator, rot, c.inverted)

    def index_of(self, origin: Origin) -> int:
        rel, rot, inv = origin
        for k, c in enumerate(self._classes):
            if c.relator == rel and c.inverted == inv and 0 <= rot < c.period:
                return self._offsets[k] + rot
        raise KeyError(origin)

    def __iter__(self) -> Iterator[Word]:
        for i in range(len(self)):
            yield self.element(i)

    def __contains__(self, w: Word) -> bool:
        code = free_reduce(w).code
        return any(len(c.code) == len(code) and (c.code + c.code).find(code) >= 0 for c in self._classes)

    @functools.cached_property
    def min_relator_len(self) -> int:
        return min((len(c.code) for c in self._classes), default=0)

    @functools.cached_property
    def report(self) -> "SmallCancellationReport":
        return _compute_report(self)

    @functools.cached_property
    def certified(self) -> bool:
        """C'(1/6) holds (ratio < 1/6, no proper powers)."""
        rep = self.report
        return rep.ratio < SIXTH and not rep.proper_power

    @functools.cached_property
    def _dehn_index(self) -> tuple[list[int], dict[int, dict[int, list[int]]]]:
        # half-length h -> hash(prefix of length h) -> element indices
        by_h: dict[int, dict[int, list[int]]] = {}
        for k, c in enumerate(self._classes):
            n = len(c.code)
            h = n // 2 + 1
            table = by_h.setdefault(h, {})
            dd = self._doubled[k]
            base = self._offsets[k]
            for rot in range(c.period):
                table.setdefault(hash(dd[rot : rot + h]), []).append(base + rot)
        return sorted(by_h), by_h

    @functools.cached_property
    def _match_start(self) -> Optional[re.Pattern]:
        # Leftmost position where some element's Dehn prefix occurs, found by
        # the regex engine. Skipped for very large sets (long Rips relators).
        hs, _ = self._dehn_index
        total = sum(len(self._classes[k].code) * c.period for k, c in enumerate(self._classes))
        if not hs or total > _REGEX_BUDGET:
            return None
        prefixes = set()
        for k, c in enumerate(self._classes):
            h = len(c.code) // 2 + 1
            dd = self._doubled[k]
            prefixes.update(dd[rot : rot + h] for rot in range(c.period))
        alt = "|".join(re.escape(p) for p in sorted(prefixes))
        return re.compile(f"(?=(?:{alt}))", re.DOTALL)

    @functools.cached_property
    def _max_len(self) -> int:
        return max((len(c.code) for c in self._classes), default=0)


@functools.lru_cache(maxsize=64)
def symmetrize(p: Presentation) -> SymmetrizedSet:
    return SymmetrizedSet(p)


# ---------------------------------------------------------------------------
# pieces


@dataclass(frozen=True)
class SmallCancellationReport:
    max_piece_len: int
    min_relator_len: int
    ratio: Fraction
    witness: Optional[tuple[Origin, Origin]]
    proper_power: bool

    def holds(self, lam: Fraction = SIXTH) -> bool:
        return self.ratio < lam and not self.proper_power

    def to_record(self) -> str:
        def fmt(o: Optional[Origin]) -> str:
            if o is None:
                return "none"
            rel, rot, inv = o
            return f"{rel}:{rot}" + (":inv" if inv else "")

        a, b = self.witness if self.witness else (None, None)
        return (
            f"max_piece_len: {self.max_piece_len}\n"
            f"min_relator_len: {self.min_relator_len}\n"
            f"ratio: {self.ratio}\n"
            f"witness_a: {fmt(a)}\n"
            f"witness_b: {fmt(b)}\n"
            f"proper_power: {str(self.proper_power).lower()}\n"
        )

    @classmethod
    def from_record(cls, text: str) -> "SmallCancellationReport":
        fields = {}
        for line in text.splitlines():
            key, sep, value = line.partition(":")
            if sep:
                fields[key.strip()] = value.strip()

        def origin(v: str) -> Optional[Origin]:
            if v == "none":
                return None
            parts = v.split(":")
            return (int(parts[0]), int(parts[1]), len(parts) > 2 and parts[2] == "inv")

        a, b = origin(fields["witness_a"]), origin(fields["witness_b"])
        return cls(
            int(fields["max_piece_len"]),
            int(fields["min_relator_len"]),
            Fraction(fields["ratio"]),
            (a, b) if a is not None and b is not None else None,
            fields["proper_power"] == "true",
        )


def piece_report(s: SymmetrizedSet) -> SmallCancellationReport:
    return s.report


def verify_metric(p: Presentation, lam: Fraction | str | float = SIXTH) -> tuple[bool, SmallCancellationReport]:
    lam = Fraction(lam)
    if not 0 < lam <= Fraction(1, 2):
        raise ValueError(f"lambda must lie in (0, 1/2], got {lam}")
    rep = symmetrize(p).report
    return rep.holds(lam), rep


def _suffix_array(t: np.ndarray) -> np.ndarray:
    """Prefix-doubling suffix array of an integer sequence."""
    n = len(t)
    rank = np.unique(t, return_inverse=True)[1].astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r1, r2 = rank[sa], second[sa]
        step = np.empty(n, dtype=np.int64)
        step[0] = 0
        step[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        rank = np.empty(n, dtype=np.int64)
        rank[sa] = np.cumsum(step)
        if rank[sa[-1]] == n - 1 or k >= n:
            return sa
        k *= 2


def _lcp_array(t: list[int], sa: np.ndarray) -> list[int]:
    """Kasai: ``lcp[r]`` is the common prefix of suffixes ``sa[r-1]`` and ``sa[r]``."""
    n = len(t)
    sa_l = sa.tolist()
    rank = [0] * n
    for r, i in enumerate(sa_l):
        rank[i] = r
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = sa_l[r - 1]
        while i + h < n and j + h < n and t[i + h] == t[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return lcp


def _compute_report(s: SymmetrizedSet) -> SmallCancellationReport:
    classes = s._classes
    proper_power = any(c.period < len(c.code) for c in classes)
    if not classes:
        return SmallCancellationReport(0, 0, Fraction(0), None, False)
    min_len = s.min_relator_len

    # Text: for each cyclic class its doubled code, then a unique sentinel.
    # Letters are renumbered by presentation order so the result does not
    # depend on the process-wide letter registry.
    local = {}
    for k, g in enumerate(s.base.generators):
        local[letter_code(g, 1)] = 2 * k
        local[letter_code(g, -1)] = 2 * k + 1
    text: list[int] = []
    start_elem: list[int] = []  # element index starting here, or -1
    elem_len: list[int] = []
    for k, c in enumerate(classes):
        n = len(c.code)
        text.extend(local[ch] for ch in s._doubled[k])
        text.append(-1 - k)
        base = s._offsets[k]
        start_elem.extend(base + rot if rot < c.period else -1 for rot in range(2 * n))
        start_elem.append(-1)
        elem_len.extend([n] * c.period)

    sa = _suffix_array(np.asarray(text, dtype=np.int64))
    lcp = _lcp_array(text, sa)

    # Walk valid starts in suffix order. The common prefix of two valid
    # starts is the minimum of lcp over the range between them; element
    # lengths cap it, so keep scanning while the range minimum could still
    # beat the best found.
    valid = [(r, start_elem[p]) for r, p in enumerate(sa.tolist()) if start_elem[p] >= 0]
    best, witness = 0, None
    for a in range(len(valid)):
        ra, ea = valid[a]
        run = None
        for b in range(a + 1, len(valid)):
            rb, eb = valid[b]
            seg = min(lcp[valid[b - 1][0] + 1 : rb + 1])
            run = seg if run is None else min(run, seg)
            if run <= best:
                break
            piece = min(run, elem_len[ea], elem_len[eb])
            if piece > best:
                best, witness = piece, (min(ea, eb), max(ea, eb))
    wit = (s.origin(witness[0]), s.origin(witness[1])) if witness and best > 0 else None
    return SmallCancellationReport(best, min_len, Fraction(best, min_len), wit, proper_power)


# ---------------------------------------------------------------------------
# Dehn's algorithm


@dataclass(frozen=True)
class DehnMove:
    position: int
    length: int  # letters replaced (> half the element)
    element: int


@dataclass(frozen=True)
class DehnRun:
    word: Word
    moves: tuple[DehnMove, ...]
    certified: bool


def _common_prefix(a: str, ai: int, b: str, bi: int, limit: int) -> int:
    if a[ai : ai + limit] == b[bi : bi + limit]:
        return limit
    lo, hi = 0, limit - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a[ai : ai + mid] == b[bi : bi + mid]:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _find_rewrite(s: SymmetrizedSet, code: str, start: int, stop: int, max_match: int) -> Optional[DehnMove]:
    """Leftmost, then longest, then lowest-index element match in ``code``.

    Match starts are restricted to ``[start, stop)`` and lengths to
    ``max_match`` (used for cyclic scans over a doubled word).
    """
    hs, by_h = s._dehn_index
    n = len(code)
    rx = s._match_start
    if rx is not None:
        m = rx.search(code, start)
        if m is None or m.start() >= stop:
            return None
        start = m.start()
    for i in range(start, stop):
        best: Optional[DehnMove] = None
        for h in hs:
            if i + h > n or h > max_match:
                break
            bucket = by_h[h].get(hash(code[i : i + h]))
            if not bucket:
                continue
            piece = code[i : i + h]
            for e in bucket:
                k, rot = s._locate(e)
                dd = s._doubled[k]
                if dd[rot : rot + h] != piece:
                    continue
                m = len(s._classes[k].code)
                limit = min(m, n - i, max_match)
                c = h + _common_prefix(code, i + h, dd, rot + h, limit - h)
                if best is None or c > best.length or (c == best.length and e < best.element):
                    best = DehnMove(i, c, e)
        if best is not None:
            return best
    return None


def dehn_run(w: Word, s: SymmetrizedSet) -> DehnRun:
    code = free_reduce(w).code
    certified = s.certified
    moves: list[DehnMove] = []
    if not s._classes or len(code) < s.min_half:
        return DehnRun(Word.from_code(code, True), (), certified)
    start = 0
    while True:
        mv = _find_rewrite(s, code, start, len(code), len(code))
        if mv is None:
            break
        moves.append(mv)
        elem = s.element_code(mv.element)
        new = reduce_code(code[: mv.position] + invert_code(elem[mv.length :]) + code[mv.position + mv.length :])
        diff = _common_prefix(code, 0, new, 0, min(len(code), len(new)))
        start = max(0, diff - s._max_len)
        code = new
    return DehnRun(Word.from_code(code, True), tuple(moves), certified)


def dehn_reduce(w: Word, s: SymmetrizedSet) -> Word:
    run = dehn_run(w, s)
    if not run.certified:
        warnings.warn("Dehn reduction over a presentation not certified C'(1/6)", UncertifiedWarning, stacklevel=2)
    return run.word


def word_problem(w: Word, s: SymmetrizedSet) -> bool:
    """True iff ``w`` is trivial in the group. Needs a C'(1/6) certificate."""
    if not s.certified:
        raise CertificateMissing(f"{s.base} is not certified C'(1/6): {s.report.to_record()!r}")
    code = w.code if w._reduced else free_reduce(w).code
    if not s._classes or len(code) < s.min_half:
        return not code
    rx = s._match_start
    if rx is not None and rx.search(code) is None:
        return False  # already Dehn-reduced and nonempty
    return not dehn_run(Word.from_code(code, True), s).word


def cyclic_dehn_run(w: Word, s: SymmetrizedSet) -> tuple[Word, Word]:
    """Return ``(form, conj)`` with ``w = conj * form * conj^-1`` in the group.

    ``form`` is cyclically reduced and no cyclic permutation of it contains
    more than half of a relator.
    """
    if not s.certified:
        raise CertificateMissing(f"{s.base} is not certified C'(1/6)")
    cur = free_reduce(w)
    conj = EMPTY
    min_h = s.min_half if s._classes else None
    while True:
        core, c = cyclic_reduce(cur)
        conj = conj * c
        cur = core
        n = len(cur)
        if min_h is None or n < min_h:
            break
        mv = _find_rewrite(s, cur.code + cur.code, 0, n, n)
        if mv is None:
            break
        conj = conj * cur[: mv.position]
        cur = dehn_run(cur.rotate(mv.position), s).word
    return cur, conj


def cyclic_dehn_form(w: Word, s: SymmetrizedSet) -> Word:
    return cyclic_dehn_run(w, s)[0]
