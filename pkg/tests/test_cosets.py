import pytest
from hypothesis import given, settings, strategies as st

from ripsconj.cosets import COMPLETE, OVERFLOW, todd_coxeter
from ripsconj.presentation import Presentation
from ripsconj.words import Word

import helpers

S3 = Presentation.from_strings("s t", "s^2", "t^2", "s t s t s t")


def W(t):
    return Word.parse(t)


def check_action(table, p, subs):
    """Independent re-check with the tuple-word helpers."""
    perms = dict(zip(p.generators, table.permutations()))
    n = len(table.rows)
    ident = tuple(range(n))
    for r in p.relators:
        word = tuple((x.name, x.sign) for x in r.letters)
        assert helpers.evaluate(word, perms, n) == ident
    for h in subs:
        word = tuple((x.name, x.sign) for x in h.letters)
        assert helpers.evaluate(word, perms, n)[0] == 0
    orbit = {0}
    frontier = [0]
    while frontier:
        c = frontier.pop()
        for q in perms.values():
            for d in (q[c], helpers.perm_inv(q)[c]):
                if d not in orbit:
                    orbit.add(d)
                    frontier.append(d)
    assert orbit == set(range(n))


def test_cyclic_trivial_subgroup():
    p = Presentation.from_strings("x", "x^3")
    t = todd_coxeter(p)
    assert t.status == COMPLETE and t.index == 3
    check_action(t, p, [])


def test_s3_over_reflection():
    # |S3| = 6 and <s> has order 2
    t = todd_coxeter(S3, [W("s")])
    assert t.index == 3
    check_action(t, S3, [W("s")])


def test_s3_order():
    assert todd_coxeter(S3).index == len(helpers.generated_group([(1, 0, 2), (0, 2, 1)], 3))


@pytest.mark.parametrize("cap", [1, 10, 1000])
def test_free_group_overflows(cap):
    p = Presentation.from_strings("a b")
    t = todd_coxeter(p, [W("a")], max_cosets=cap)
    assert t.status == OVERFLOW and t.index is None


def test_bad_cap():
    with pytest.raises(ValueError):
        todd_coxeter(S3, max_cosets=0)


def test_csv_layout():
    t = todd_coxeter(Presentation.from_strings("x", "x^3"))
    lines = t.to_csv().splitlines()
    assert lines[0] == "coset,x,x^-1"
    assert len(lines) == 4
    for line in lines[1:]:
        c, f, b = map(int, line.split(","))
        assert f == c % 3 + 1 and b == (c - 2) % 3 + 1


def test_incomplete_table_has_no_permutations():
    t = todd_coxeter(Presentation.from_strings("a"), max_cosets=5)
    with pytest.raises(ValueError):
        t.permutations()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12))
def test_cyclic_order(n):
    p = Presentation.from_strings("x", f"x^{n}")
    t = todd_coxeter(p)
    assert t.index == n
    check_action(t, p, [])


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 9), st.booleans())
def test_dihedral_index(n, over_reflection):
    # D_n has order 2n; a reflection generates a subgroup of order 2
    p = Presentation.from_strings("s t", "s^2", "t^2", " ".join(["s t"] * n))
    subs = [W("s")] if over_reflection else []
    t = todd_coxeter(p, subs)
    assert t.index == (n if over_reflection else 2 * n)
    check_action(t, p, subs)
