"""Word-problem oracles for quotient presentations.

:class:`PresentationOracle` tries, in order: free groups, words that are
freely trivial or a cyclic conjugate of a relator (or its inverse), Dehn's
algorithm when the presentation is certified C'(1/6), and the regular
representation from a complete coset enumeration. Anything else is
undecided (``None``).
"""

from __future__ import annotations

import functools
from typing import Optional

from .cosets import todd_coxeter
from .presentation import Presentation
from .profinite import PermQuotient
from .smallcanc import symmetrize, word_problem
from .words import Word, cyclic_reduce, free_reduce

__all__ = ["PresentationOracle"]


class PresentationOracle:
    def __init__(self, p: Presentation, max_cosets: int = 100_000):
        self.p = p
        self.max_cosets = max_cosets

    @functools.cached_property
    def certified(self) -> bool:
        try:
            return symmetrize(self.p).certified
        except ValueError:
            return False

    @functools.cached_property
    def regular(self) -> Optional[PermQuotient]:
        """The action on the elements of a finite group, if enumeration completes."""
        table = todd_coxeter(self.p, (), self.max_cosets)
        return PermQuotient.from_table(self.p, table) if table.complete else None

    def _is_relator_conjugate(self, w: Word) -> bool:
        core, _ = cyclic_reduce(w)
        return core in symmetrize(self.p) if self.p.relators and all(self.p.relators) else False

    def __call__(self, w: Word) -> Optional[bool]:
        self.p.check_alphabet(w)
        w = free_reduce(w)
        if not w:
            return True
        if not self.p.relators:
            return False
        if self._is_relator_conjugate(w):
            return True
        if self.certified:
            return word_problem(w, symmetrize(self.p))
        q = self.regular
        if q is not None:
            return q.image(w)[0] == 0
        return None

    @property
    def finite_order(self) -> Optional[int]:
        q = self.regular if self.p.relators or not self.p.generators else None
        return q.degree if q is not None else None
