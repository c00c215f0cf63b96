"""The eight acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; a summary line per criterion
is printed at the end of the session.
"""

import math
import os
import random
import subprocess
import sys
import time

import pytest

from ripsconj.context import Budget, Conjugate, GroupContext, NonConjugate, Undecided
from ripsconj.cosets import todd_coxeter
from ripsconj.fibre import FibreContext, index_ratio_check
from ripsconj.presentation import Presentation
from ripsconj.profinite import enumerate_perm_reps, parallel_decide_conjugacy
from ripsconj.rips import rips_build, verify_rips
from ripsconj.smallcanc import symmetrize, word_problem
from ripsconj.subgrp import membership_via_conj, normal_subgroup_context, quotient_word_problem
from ripsconj.words import Word, enumerate_words, free_reduce

import helpers
from corpus import CORPUS, build

SURFACE = Presentation.from_strings("a b c d", "a b a^-1 b^-1 c d c^-1 d^-1")
SURFACE_RELATOR = helpers.parse("a b a^-1 b^-1 c d c^-1 d^-1")


def W(t):
    return Word.parse(t)


# 1 ------------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def surface_trivial_short():
    """Trivial words of length <= 8, from BFS at three caps (must agree)."""
    found = [
        {w for w in helpers.trivial_words([SURFACE_RELATOR], "abcd", cap) if len(w) <= 8} for cap in (10, 12, 14)
    ]
    assert found[0] == found[1] == found[2]
    return found[-1]


@pytest.mark.acceptance(1, "word problem matches BFS on all surface words of length <= 8")
def test_word_problem_exhaustive(surface_trivial_short):
    s = symmetrize(SURFACE)
    trivial = {Word.parse(" ".join(f"{n}^{e}" for n, e in t) or "1") for t in surface_trivial_short}
    start = time.monotonic()
    total = mismatches = 0
    for w in enumerate_words(SURFACE.generators, 8):
        total += 1
        if word_problem(w, s) != (w in trivial):
            mismatches += 1
    elapsed = time.monotonic() - start
    print(f"words={total} trivial={len(surface_trivial_short)} mismatches={mismatches} seconds={elapsed:.1f}")
    assert total == 1 + sum(8 * 7 ** (n - 1) for n in range(1, 9))
    assert mismatches == 0
    assert elapsed < 60


# 2 ------------------------------------------------------------------------------------


@pytest.mark.acceptance(2, "Rips builds verify on the corpus within 10 s each")
@pytest.mark.parametrize("name", sorted(CORPUS))
def test_rips_pipeline(name):
    P = CORPUS[name]
    start = time.monotonic()
    out = rips_build(P)
    elapsed = time.monotonic() - start
    v = verify_rips(out)
    print(f"{name}: blocks={out.blocks} ratio={out.report.ratio} seconds={elapsed:.2f}")
    assert v.ok, v.failures()
    assert len(out.G.relators) == len(P.relators) + 4 * len(P.generators)
    assert elapsed < 10


def test_corpus_size():
    assert len(CORPUS) >= 10
    assert {"trivial", "Z", "Z3", "Z2", "S3", "rand1"} <= set(CORPUS)
    assert all(len(CORPUS[n].generators) == 2 and len(CORPUS[n].relators) == 2 for n in ("rand1", "rand2"))


# 3 ------------------------------------------------------------------------------------


@pytest.mark.acceptance(3, "index of N in G equals |P| for Z/3, Z/6, S3")
@pytest.mark.parametrize("name,order", [("Z3", 3), ("Z6", 6), ("S3", 6)])
def test_quotient_identity(name, order):
    out = build(name)
    t = todd_coxeter(out.G, out.N_gens)
    assert t.complete and t.index == order


# 4 ------------------------------------------------------------------------------------


@pytest.mark.acceptance(4, "fibre index identity over Z/6")
@pytest.mark.parametrize("F,order", [([], 1), (["x^3"], 2), (["x^2"], 3), (["x"], 6)])
def test_index_identity(F, order):
    out = build("Z6")
    lhs, rhs, equal = index_ratio_check(FibreContext(out, [W(f) for f in F]), FibreContext(out))
    assert (lhs, rhs, equal) == (order, order, True)


# 5 ------------------------------------------------------------------------------------


@pytest.mark.acceptance(5, "membership through conjugacy agrees with the quotient route")
def test_membership_routes_agree():
    out = build("Z3")
    N = normal_subgroup_context(out)
    total = definite = contradictions = 0
    for w in enumerate_words(out.G.generators, 6):
        total += 1
        a = membership_via_conj(N, w)
        b = quotient_word_problem(out, w)
        if a is not None and b is not None:
            definite += 1
            contradictions += a != b
    print(f"words={total} definite={definite} contradictions={contradictions}")
    assert contradictions == 0
    assert definite >= 0.95 * total


# 6 ------------------------------------------------------------------------------------


def _random_reduced(rng, n):
    letters = [(g, s) for g in "abcd" for s in (1, -1)]
    w = []
    while len(w) < n:
        x = rng.choice(letters)
        if not w or w[-1] != (x[0], -x[1]):
            w.append(x)
    return Word.parse(" ".join(f"{g}^{s}" for g, s in w) or "1")


def _abelian(w):
    v = dict.fromkeys("abcd", 0)
    for x in w.letters:
        v[x.name] += x.sign
    return tuple(v[g] for g in "abcd")


def _instances():
    rng = random.Random(6)
    conj = []
    while len(conj) < 50:
        x = _random_reduced(rng, rng.randint(1, 6))
        g = _random_reduced(rng, rng.randint(1, 4))
        conj.append((x, free_reduce(~g * x * g)))
    non = []
    while len(non) < 20:
        x = _random_reduced(rng, rng.randint(1, 6))
        y = _random_reduced(rng, rng.randint(1, 6))
        ax, ay = _abelian(x), _abelian(y)
        if any((p - q) % 2 for p, q in zip(ax, ay)) or any((p - q) % 3 for p, q in zip(ax, ay)):
            non.append((x, y))
    return conj, non


@pytest.mark.acceptance(6, "conjugacy decider: 50 conjugate and 20 separable pairs")
def test_decider():
    ctx = GroupContext(SURFACE)
    budget = Budget(time_ms=10_000)
    conj, non = _instances()
    for x, y in conj:
        v = parallel_decide_conjugacy(ctx, x, y, budget)
        assert isinstance(v, Conjugate), (x, y, v)
        assert ctx.is_conjugator(v.conjugator, x, y)
    resolved = 0
    for x, y in non:
        v = parallel_decide_conjugacy(ctx, x, y, budget)
        assert not isinstance(v, Conjugate), (x, y)
        if isinstance(v, NonConjugate):
            assert v.witness.verify()
            resolved += 1
        else:
            assert isinstance(v, Undecided)
    print(f"conjugate=50/50 separated={resolved}/20")
    assert resolved >= 0.9 * len(non)


# 7 ------------------------------------------------------------------------------------


@pytest.mark.acceptance(7, "permutation-representation and reduced-word counts")
def test_enumeration_counts():
    assert len(list(enumerate_perm_reps(Presentation.from_strings("x", "x^2"), 3))) == 4
    assert len(list(enumerate_perm_reps(SURFACE, 2))) == 16
    assert helpers.count_homs("abcd", [SURFACE_RELATOR], 2) == 16
    for n in range(1, 6):
        assert len(list(enumerate_perm_reps(Presentation.from_strings("x"), n))) == math.factorial(n)
    lengths = [0] * 9
    for w in enumerate_words("ab", 8):
        lengths[len(w)] += 1
    assert lengths[0] == 1
    assert all(lengths[n] == 4 * 3 ** (n - 1) for n in range(1, 9))


# 8 ------------------------------------------------------------------------------------


def _cli_jobs(d):
    z3, f2, s = d / "z3.pres", d / "f2.pres", d / "surface.pres"
    return [
        ["verify-sc", s],
        ["verify-sc", z3, "--lambda", "1/3"],
        ["wp", s, "a b a^-1 b^-1 c d c^-1 d^-1"],
        ["wp", z3, "x^4"],
        ["conj", f2, "a", "a^-1"],
        ["conj", s, "a b c", "c a b"],
        ["conj", f2, "a b", "a b^-1", "--max-length", "2", "--max-degree", "1"],
        ["rips", z3, "-o", d / "out" / "g3"],
        ["member", d / "out" / "g3", "a1 x^3"],
        ["member", d / "out" / "g3", "x"],
        ["preimage", d / "out" / "g3", "--index"],
        ["fibre-gens", d / "out" / "g3"],
        ["fibre-index", d / "out" / "g3", "x"],
        ["fibre-conj", d / "out" / "g3", "(a1 | a1)", "(x^-1 a1 x | a1)"],
        ["quotients", s, "--max-degree", "2"],
        ["separate", f2, "conj", "a", "a^-1"],
        ["separate", f2, "element", "a b", "b a"],
        ["separate", f2, "subgroup", "b", "a"],
        ["separate", f2, "double-coset", "b", "a", "a"],
        ["tc", z3],
        ["tc", z3, "-o", d / "out" / "table.csv"],
    ]


def _run_all(d, hashseed):
    (d / "out").mkdir(exist_ok=True)
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    outputs = []
    for job in _cli_jobs(d):
        for emit in ("text", "structured"):
            argv = [sys.executable, "-m", "ripsconj", *map(str, job), "--emit", emit, "--seed", "7"]
            proc = subprocess.run(argv, capture_output=True, env=env)
            outputs.append((job[0], proc.returncode, proc.stdout, proc.stderr))
    for f in sorted((d / "out").iterdir()):
        outputs.append((f.name, 0, f.read_bytes(), b""))
    return outputs


@pytest.mark.acceptance(8, "every CLI command is byte-for-byte deterministic")
def test_cli_determinism(tmp_path):
    runs = []
    for i, seed in enumerate((1, 2)):
        d = tmp_path / f"run{i}"
        d.mkdir()
        (d / "z3.pres").write_text("gens: x\nrel: x^3\n")
        (d / "f2.pres").write_text("gens: a b\n")
        (d / "surface.pres").write_text("gens: a b c d\nrel: a b a^-1 b^-1 c d c^-1 d^-1\n")
        runs.append(_run_all(d, seed))
    first, second = runs
    assert len(first) == len(second)
    commands = set()
    for a, b in zip(first, second):
        commands.add(a[0])
        assert a[1] in (0, 2), a
        # outputs name files by absolute path; compare with the directory masked
        mask = lambda s: s.replace(str(tmp_path / "run0").encode(), b"D").replace(str(tmp_path / "run1").encode(), b"D")  # noqa: E731
        assert a[0] == b[0] and a[1] == b[1] and mask(a[2]) == mask(b[2]) and a[3] == b[3], a[0]
    expected = {"verify-sc", "wp", "conj", "member", "rips", "preimage", "fibre-gens", "fibre-conj", "fibre-index", "quotients", "separate", "tc"}
    assert expected <= commands
