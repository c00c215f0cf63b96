"""Roots and centralizer coset representatives in torsion-free C'(1/6) groups.

There the centralizer of a nontrivial x is infinite cyclic, generated by a
root r with r^k = x; the powers r^0, ..., r^(k-1) represent the cosets of
<x> in C(x).
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import GroupContext
from .words import EMPTY, Word, enumerate_words

__all__ = ["CentralizerData", "centralizer_coset_reps"]


@dataclass(frozen=True)
class CentralizerData:
    element: Word
    root: Word
    k: int
    coset_reps: tuple[Word, ...]
    verified: bool = True
    steps: int = 0


def centralizer_coset_reps(ctx: GroupContext, x: Word) -> CentralizerData:
    """Shortest root of ``x`` within ``root_slack`` times its cyclic Dehn length.

    The search runs on the cyclic Dehn form ``x'`` (x = t x' t^-1) and the
    answer is conjugated back by ``t``. If the step budget runs out first,
    ``x`` itself is returned with k = 1 and ``verified=False``.
    """
    if ctx.wp(x):
        raise ValueError("centralizer roots need a nontrivial element")
    form, t = ctx.cyclic_form(x)
    L = len(form)
    bound = ctx.budget.root_slack * L
    steps = 0
    root, k, verified = form, 1, False
    for r in enumerate_words(ctx.G.generators, bound):
        if not r:
            continue
        steps += 1
        if r == form:
            root, k, verified = form, 1, True
            break
        hit = 0
        for e in range(1, max(1, bound // len(r)) + 1):
            steps += 1
            if ctx.equal(r**e, form):
                hit = e
                break
        if hit:
            root, k, verified = r, hit, True
            break
        if steps >= ctx.budget.max_steps:
            break
    back = lambda w: t * w * ~t  # noqa: E731
    reps = tuple(back(root**i) for i in range(k)) if verified else (EMPTY,)
    return CentralizerData(x, back(root), k, reps, verified, steps)
