"""Todd–Coxeter coset enumeration (HLT strategy with coincidence processing).

Columns of a coset table follow presentation order with each generator
followed by its inverse. Cosets are numbered from 0 internally; the subgroup
itself is coset 0. Text output (CSV) numbers cosets from 1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

from .presentation import Presentation
from .words import Word, free_reduce, letter_code

__all__ = ["COMPLETE", "OVERFLOW", "CosetTable", "TableInconsistent", "todd_coxeter"]

COMPLETE = "complete"
OVERFLOW = "overflow"


class TableInconsistent(RuntimeError):
    """A completed table failed its post-hoc action check (internal error)."""


@dataclass(frozen=True)
class CosetTable:
    generators: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]  # rows[c][2j] = c·g_j, rows[c][2j+1] = c·g_j^-1
    status: str
    max_cosets: int
    defined: int = 0  # cosets defined during the run, live or not

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE

    @property
    def index(self) -> Optional[int]:
        return len(self.rows) if self.complete else None

    def column_names(self) -> list[str]:
        out = []
        for g in self.generators:
            out += [g, f"{g}^-1"]
        return out

    def permutations(self) -> list[tuple[int, ...]]:
        """Right action of each generator on cosets (0-based)."""
        if not self.complete:
            raise ValueError("table is not complete")
        return [tuple(row[2 * j] for row in self.rows) for j in range(len(self.generators))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["coset", *self.column_names()])
        for c, row in enumerate(self.rows, 1):
            w.writerow([c, *(x + 1 for x in row)])
        return buf.getvalue()


class _Overflow(Exception):
    pass


def _columns(p: Presentation) -> dict[str, int]:
    cols = {}
    for j, g in enumerate(p.generators):
        cols[letter_code(g, 1)] = 2 * j
        cols[letter_code(g, -1)] = 2 * j + 1
    return cols


class _Enumerator:
    def __init__(self, ncols: int, max_cosets: int):
        self.ncols = ncols
        self.max_cosets = max_cosets
        self.table: list[list[Optional[int]]] = [[None] * ncols]
        self.parent = [0]
        self.live = 1

    def rep(self, k: int) -> int:
        p = self.parent
        root = k
        while p[root] != root:
            root = p[root]
        while p[k] != root:
            p[k], k = root, p[k]
        return root

    def is_live(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int) -> None:
        if self.live >= self.max_cosets:
            raise _Overflow
        d = len(self.table)
        self.table.append([None] * self.ncols)
        self.parent.append(d)
        self.live += 1
        self.table[c][x] = d
        self.table[d][x ^ 1] = c

    def scan_and_fill(self, c: int, w: Sequence[int]) -> None:
        t = self.table
        f = b = c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and t[f][w[i]] is not None:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][w[j] ^ 1] is not None:
                b = t[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][w[i] ^ 1] = f
                return
            self.define(f, w[i])

    def _merge(self, k: int, l: int, queue: list[int]) -> None:
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        if l < k:
            k, l = l, k
        self.parent[l] = k
        self.live -= 1
        queue.append(l)

    def coincidence(self, a: int, b: int) -> None:
        t = self.table
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(self.ncols):
                f = t[e][x]
                if f is None:
                    continue
                t[f][x ^ 1] = None
                e1, f1 = self.rep(e), self.rep(f)
                if t[e1][x] is not None:
                    self._merge(f1, t[e1][x], queue)
                elif t[f1][x ^ 1] is not None:
                    self._merge(e1, t[f1][x ^ 1], queue)
                else:
                    t[e1][x] = f1
                    t[f1][x ^ 1] = e1

    def run(self, relators: list[list[int]], subgens: list[list[int]]) -> None:
        for w in subgens:
            self.scan_and_fill(0, w)
        c = 0
        while c < len(self.table):
            for r in relators:
                if not self.is_live(c):
                    break
                self.scan_and_fill(c, r)
            if self.is_live(c):
                for x in range(self.ncols):
                    if self.table[c][x] is None:
                        self.define(c, x)
            c += 1

    def compact(self) -> list[tuple[int, ...]]:
        live = [c for c in range(len(self.table)) if self.is_live(c)]
        new = {c: i for i, c in enumerate(live)}
        return [tuple(new[self.rep(self.table[c][x])] for x in range(self.ncols)) for c in live]


def _acts_correctly(rows, relators, subgens) -> bool:
    n = len(rows)
    ncols = len(rows[0]) if rows else 0
    for x in range(ncols):
        if sorted(r[x] for r in rows) != list(range(n)):
            return False
        if any(rows[rows[c][x]][x ^ 1] != c for c in range(n)):
            return False

    def trace(c, w):
        for x in w:
            c = rows[c][x]
        return c

    if any(trace(0, w) != 0 for w in subgens):
        return False
    return all(trace(c, r) == c for r in relators for c in range(n))


def todd_coxeter(p: Presentation, sub_gens: Sequence[Word] = (), max_cosets: int = 100_000) -> CosetTable:
    """Enumerate the cosets of ``<sub_gens>`` in the group presented by ``p``.

    Overflow (more than ``max_cosets`` live cosets) is reported through the
    table status; it is the expected outcome for infinite index.
    """
    if max_cosets < 1:
        raise ValueError("max_cosets must be at least 1")
    cols = _columns(p)
    for w in sub_gens:
        p.check_alphabet(w)
    rels = [[cols[ch] for ch in r.code] for r in p.relators]
    subs = [[cols[ch] for ch in free_reduce(w).code] for w in sub_gens]
    en = _Enumerator(2 * len(p.generators), max_cosets)
    try:
        en.run(rels, subs)
    except _Overflow:
        return CosetTable(p.generators, (), OVERFLOW, max_cosets, len(en.table))
    rows = en.compact()
    if not _acts_correctly(rows, rels, subs):
        raise TableInconsistent("completed coset table does not satisfy the relators")
    return CosetTable(p.generators, tuple(rows), COMPLETE, max_cosets, len(en.table))
