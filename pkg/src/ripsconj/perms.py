"""Permutations of ``range(n)`` as tuples, acting on the right.

``compose(p, q)`` is "p then q", matching how words are read left to right
and how coset tables act.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    return tuple([q[i] for i in p])


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycles(p: Perm) -> list[list[int]]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    return out


def power(p: Perm, e: int) -> Perm:
    out = list(p)
    for cyc in cycles(p):
        L = len(cyc)
        s = e % L
        for idx, x in enumerate(cyc):
            out[x] = cyc[(idx + s) % L]
    return tuple(out)


def cycle_type(p: Perm) -> tuple[int, ...]:
    return tuple(sorted(len(c) for c in cycles(p)))


def to_cycle_notation(p: Perm) -> str:
    """1-based cycle notation, fixed points omitted; ``()`` for the identity."""
    parts = ["(" + " ".join(str(x + 1) for x in c) + ")" for c in cycles(p) if len(c) > 1]
    return "".join(parts) or "()"


def from_cycle_notation(text: str, n: int) -> Perm:
    out = list(range(n))
    body = text.strip()
    if body in ("", "()"):
        return tuple(out)
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"bad cycle notation {text!r}")
    for chunk in body[1:-1].split(")("):
        pts = [int(x) - 1 for x in chunk.split()]
        if any(not 0 <= x < n for x in pts) or len(set(pts)) != len(pts):
            raise ValueError(f"bad cycle {chunk!r} for degree {n}")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            out[a] = b
    if sorted(out) != list(range(n)):
        raise ValueError(f"cycles in {text!r} overlap")
    return tuple(out)


def closure(gens: Sequence[Perm], n: int, cap: int) -> Optional[set[Perm]]:
    """Elements of the group generated by ``gens``, or ``None`` past ``cap``."""
    e = identity(n)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = compose(g, s)
                if h not in seen:
                    seen.add(h)
                    if len(seen) > cap:
                        return None
                    nxt.append(h)
        frontier = nxt
    return seen


def conjugacy_orbit(p: Perm, gens: Iterable[Perm], cap: int) -> Optional[set[Perm]]:
    """The conjugacy class of ``p`` in ``<gens>``, or ``None`` past ``cap``."""
    gens = list(gens)
    invs = [inverse(g) for g in gens]
    seen = {p}
    frontier = [p]
    while frontier:
        nxt = []
        for q in frontier:
            for g, gi in zip(gens, invs):
                r = compose(compose(gi, q), g)
                if r not in seen:
                    seen.add(r)
                    if len(seen) > cap:
                        return None
                    nxt.append(r)
        frontier = nxt
    return seen
