"""Independent brute-force oracles used to derive expected values.

These deliberately avoid the package's algorithms: words are plain tuples of
(name, sign) pairs and every computation is the naive definition.
"""

from __future__ import annotations

import itertools
from collections import deque

Letter = tuple[str, int]


def parse(text: str) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for term in text.split():
        if term == "1":
            continue
        name, _, exp = term.partition("^")
        k = int(exp) if exp else 1
        out.extend([(name, 1 if k > 0 else -1)] * abs(k))
    return tuple(out)


def inv(w):
    return tuple((n, -s) for n, s in reversed(w))


def reduce(w):
    out: list[Letter] = []
    for x in w:
        if out and out[-1] == (x[0], -x[1]):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def rotations(w):
    return [w[i:] + w[:i] for i in range(len(w))]


def symmetrized(relators):
    out = set()
    for r in relators:
        for c in (r, inv(r)):
            out.update(rotations(c))
    return out


def max_piece(relators) -> int:
    """Longest common prefix over ordered pairs of distinct symmetrized words."""
    elems = sorted(symmetrized(relators))
    best = 0
    for u, v in itertools.combinations(elems, 2):
        k = 0
        while k < min(len(u), len(v)) and u[k] == v[k]:
            k += 1
        best = max(best, k)
    return best


def trivial_words(relators, gens, cap: int) -> set:
    """All reduced words of length <= cap reachable from the empty word.

    Moves: insert a cyclic relator word (or its inverse) at any position,
    conjugate by a letter; each followed by free reduction. Intermediate words
    longer than ``cap`` are discarded.
    """
    rels = sorted(symmetrized(relators))
    letters = [(g, s) for g in gens for s in (1, -1)]
    seen = {()}
    queue = deque([()])
    while queue:
        w = queue.popleft()
        cands = []
        for i in range(len(w) + 1):
            for r in rels:
                cands.append(w[:i] + r + w[i:])
        for x in letters:
            cands.append((x,) + w + ((x[0], -x[1]),))
        for c in cands:
            c = reduce(c)
            if len(c) <= cap and c not in seen:
                seen.add(c)
                queue.append(c)
    return seen


def perm_compose(p, q):
    """Apply p then q (right action), permutations as tuples on range(n)."""
    return tuple(q[p[i]] for i in range(len(p)))


def perm_inv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def evaluate(word, images, n):
    cur = tuple(range(n))
    for name, s in word:
        p = images[name] if s > 0 else perm_inv(images[name])
        cur = perm_compose(cur, p)
    return cur


def count_homs(gens, relators, n) -> int:
    """Brute force over all assignments of S_n to the generators."""
    perms = list(itertools.permutations(range(n)))
    ident = tuple(range(n))
    count = 0
    for imgs in itertools.product(perms, repeat=len(gens)):
        images = dict(zip(gens, imgs))
        if all(evaluate(r, images, n) == ident for r in relators):
            count += 1
    return count


def generated_group(perms, n):
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for p in perms:
                h = perm_compose(g, p)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen
