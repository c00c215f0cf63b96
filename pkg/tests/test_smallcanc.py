from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ripsconj.presentation import Presentation
from ripsconj.smallcanc import (
    CertificateMissing,
    DegenerateRelatorError,
    SmallCancellationReport,
    UncertifiedWarning,
    cyclic_dehn_form,
    cyclic_dehn_run,
    dehn_reduce,
    symmetrize,
    verify_metric,
    word_problem,
)
from ripsconj.words import EMPTY, Word, enumerate_words, free_reduce

import helpers

SURFACE = Presentation.from_strings("a b c d", "a b a^-1 b^-1 c d c^-1 d^-1")
R = SURFACE.relators[0]


def W(t):
    return Word.parse(t)


def as_tuple(w):
    return tuple((x.name, x.sign) for x in w.letters)


@pytest.fixture(scope="module")
def surface_trivial():
    return helpers.trivial_words([as_tuple(R)], "abcd", 12)


def test_symmetrize_examples():
    s = symmetrize(Presentation.from_strings("a b", "a b"))
    assert sorted(map(str, s)) == sorted(["a b", "b a", "b^-1 a^-1", "a^-1 b^-1"])
    assert sorted(map(str, symmetrize(Presentation.from_strings("a", "a")))) == ["a", "a^-1"]
    assert len(symmetrize(SURFACE)) == len(helpers.symmetrized([as_tuple(R)])) == 16


def test_symmetrize_rejects_trivial_relator():
    with pytest.raises(DegenerateRelatorError):
        symmetrize(Presentation.from_strings("a", "a a^-1"))


def test_symmetrized_set_closed():
    s = symmetrize(SURFACE)
    for e in s:
        assert e.inverse() in s
        assert e.rotate(3) in s
        assert e and e.code[0] != e.inverse().code[-1]
    for i in range(len(s)):
        assert s.index_of(s.origin(i)) == i


def test_piece_report_surface():
    rep = symmetrize(SURFACE).report
    assert (rep.max_piece_len, rep.min_relator_len, rep.ratio) == (1, 8, Fraction(1, 8))
    assert rep.max_piece_len == helpers.max_piece([as_tuple(R)])
    assert not rep.proper_power


def test_piece_report_free():
    ok, rep = verify_metric(Presentation.from_strings("a b"), Fraction(1, 100))
    assert ok and rep.max_piece_len == 0


def test_increasing_exponents_has_long_pieces():
    # b^5 a b^6 occurs in two rotations, so the ratio is 12/35, not below 1/6
    p = Presentation.from_strings("a b", "a b a b^2 a b^3 a b^4 a b^5 a b^6 a b^7")
    rep = symmetrize(p).report
    assert rep.max_piece_len == helpers.max_piece([as_tuple(p.relators[0])]) == 12
    assert rep.ratio == Fraction(12, 35)
    assert not verify_metric(p)[0]


def test_witness_realizes_max_piece():
    p = Presentation.from_strings("a b", "a b a b^2 a b^3 a b^4 a b^5 a b^6 a b^7")
    s = symmetrize(p)
    (oa, ob) = s.report.witness
    u, v = s.element(s.index_of(oa)), s.element(s.index_of(ob))
    assert u != v and u.code[:12] == v.code[:12]


def test_verify_metric_examples():
    assert verify_metric(SURFACE, Fraction(1, 6))[0]
    ok, rep = verify_metric(Presentation.from_strings("a", "a^3"))
    assert not ok and rep.proper_power
    assert verify_metric(Presentation.from_strings("a b c"), Fraction(1, 2))[0]
    with pytest.raises(ValueError):
        verify_metric(SURFACE, Fraction(2, 3))


def test_report_record_round_trip():
    rep = symmetrize(SURFACE).report
    text = rep.to_record()
    assert [line.split(":")[0] for line in text.splitlines()] == [
        "max_piece_len", "min_relator_len", "ratio", "witness_a", "witness_b", "proper_power",
    ]
    assert SmallCancellationReport.from_record(text) == rep


def test_dehn_examples():
    s = symmetrize(SURFACE)
    assert dehn_reduce(R, s) == EMPTY
    assert dehn_reduce(W("a"), s) == W("a")
    assert dehn_reduce(W("a") * R * W("a^-1"), s) == EMPTY
    # more than half of R is rewritten to the shorter complement
    assert dehn_reduce(W("a b a^-1 b^-1 c"), s) == W("d c d^-1")


def test_dehn_half_not_rewritten():
    s = symmetrize(SURFACE)
    assert dehn_reduce(W("a b a^-1 b^-1"), s) == W("a b a^-1 b^-1")


def test_word_problem_examples():
    s = symmetrize(SURFACE)
    assert word_problem(EMPTY, s)
    assert word_problem(R, s)
    assert not word_problem(W("a b"), s)


def test_uncertified_refuses():
    s = symmetrize(Presentation.from_strings("a", "a^3"))
    with pytest.raises(CertificateMissing):
        word_problem(W("a"), s)
    with pytest.warns(UncertifiedWarning):
        dehn_reduce(W("a^3"), s)


def test_cyclic_dehn_examples():
    s = symmetrize(SURFACE)
    assert cyclic_dehn_form(W("a") * R * W("a^-1"), s) == EMPTY
    assert len(cyclic_dehn_form(W("a b"), s)) == 2
    assert cyclic_dehn_form(EMPTY, s) == EMPTY


def test_word_problem_matches_bfs_up_to_6(surface_trivial):
    s = symmetrize(SURFACE)
    for w in enumerate_words(SURFACE.generators, 6):
        assert word_problem(w, s) == (as_tuple(w) in surface_trivial)


surface_words = st.lists(
    st.sampled_from([(g, e) for g in "abcd" for e in (1, -1)]), max_size=10
).map(lambda xs: free_reduce(Word(xs)))


@given(surface_words)
def test_dehn_preserves_element(w):
    s = symmetrize(SURFACE)
    assert word_problem(dehn_reduce(w, s) * ~w, s)


@given(surface_words, surface_words)
def test_cyclic_dehn_conjugator_replays(w, u):
    s = symmetrize(SURFACE)
    x = u * w * R * ~u
    form, conj = cyclic_dehn_run(x, s)
    assert word_problem(conj * form * ~conj * ~x, s)
    assert len(form) <= len(free_reduce(x))


@settings(max_examples=30)
@given(st.permutations(["a", "b", "c", "d"]), st.booleans())
def test_piece_report_order_independent(order, swap):
    rels = ["a b a^-1 b^-1 c d c^-1 d^-1", "a^2 b^3 c^5"]
    if swap:
        rels.reverse()
    p = Presentation.from_strings(order, *rels)
    q = Presentation.from_strings("a b c d", *sorted(rels))
    assert symmetrize(p).report.max_piece_len == symmetrize(q).report.max_piece_len


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.sampled_from([("a", 1), ("a", -1), ("b", 1), ("b", -1), ("c", 1)]), min_size=1, max_size=9), min_size=1, max_size=3))
def test_piece_report_matches_brute_force(rels):
    words = [free_reduce(Word(r)) for r in rels]
    if not all(words):
        return
    p = Presentation(("a", "b", "c"), tuple(words))
    if not all(p.relators):
        return
    expected = helpers.max_piece([as_tuple(r) for r in p.relators])
    assert symmetrize(p).report.max_piece_len == expected
