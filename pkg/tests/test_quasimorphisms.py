from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centext.errors import InputError
from centext.groups import FreeAbelian, FreeGroup, GroupValue, ball, element, evaluate_word, parse_word
from centext.quasimorphisms import (
    LineAction,
    LowerBound,
    QuasiMap,
    QuasilineMetric,
    abelianization_correction,
    brooks,
    brooks_defect_radius,
    brooks_homogeneous,
    busemann,
    busemann_map,
    conjugation_invariance_probe,
    count_occurrences,
    defect_growth,
    defect_on_ball,
    homogenization_table,
    homogenize,
    homomorphism,
    quasiline_distance,
    rational_inverse,
    retract_to_kernel,
)

F2 = FreeGroup(2)
letters = st.tuples(st.integers(0, 1), st.sampled_from([1, -1]))
words = st.lists(letters, min_size=1, max_size=7)


def test_count_occurrences_counts_overlaps():
    w = parse_word(F2, "a a")
    assert count_occurrences(parse_word(F2, "a a a"), w) == 2


@pytest.mark.parametrize("text", ["a b", "a a b", "a b^-1", "a^-1 b a"])
def test_brooks_defect_is_attained_on_certified_radius(text):
    w = parse_word(F2, text)
    phi = brooks(F2, w)
    r = brooks_defect_radius(w)
    D, (g, h) = defect_on_ball(phi, r)
    assert abs(phi.deviation(g, h)) == D
    assert defect_on_ball(phi, r + 1)[0] == D
    if text == "a b":
        assert D == 1


def test_brooks_rejects_unreduced_words():
    with pytest.raises(InputError):
        brooks(F2, parse_word(F2, "a a^-1"))
    with pytest.raises(InputError):
        brooks(FreeAbelian(2), parse_word(F2, "a"))


@settings(max_examples=60, deadline=None)
@given(words)
def test_homogenization_converges_to_closed_form(w):
    phi = brooks(F2, parse_word(F2, "a b"))
    hom = brooks_homogeneous(F2, parse_word(F2, "a b"))
    g = evaluate_word(F2, w)
    D = 1
    for n in (8, 16):
        assert abs(homogenize(phi, g, n) - hom(g)) <= Fraction(D, n)


@settings(max_examples=40, deadline=None)
@given(words, words, st.integers(1, 4))
def test_homogeneous_brooks_is_homogeneous_and_conjugation_invariant(w, u, n):
    hom = brooks_homogeneous(F2, parse_word(F2, "a b"))
    g, c = evaluate_word(F2, w), evaluate_word(F2, u)
    assert hom(g**n) == n * hom(g)
    assert hom(c * g * c.inverse()) == hom(g)


def test_homogenization_table_cauchy_bound():
    phi = brooks(F2, parse_word(F2, "a b"))
    t = homogenization_table(phi, element(F2, "a b b a^-1 b"), [8, 16, 32, 64], 1)
    assert t["passed"]
    assert all(row["gap"] <= row["bound"] for row in t["rows"])
    with pytest.raises(InputError):
        homogenize(phi, F2.identity(), 0)


@pytest.mark.parametrize("k", range(-5, 6))
def test_busemann_is_minus_translation(k):
    action = LineAction(F2, (1, 0))
    g = F2.generators()[0] ** k
    for T in (abs(k) + 1, 10, 64):
        assert busemann(action, g, T) == -k
    assert defect_on_ball(busemann_map(action, 8), 2)[0] == 0


def test_busemann_rejects_reflections_and_non_actions():
    with pytest.raises(InputError):
        LineAction(F2, (1, 0), (1, -1))
    with pytest.raises(InputError):
        LineAction(F2, (1,))
    with pytest.raises(InputError):
        busemann(LineAction(F2, (1, 1)), F2.identity(), 0)


def test_retraction_on_lower_triangular_family():
    Z2 = FreeAbelian(2, ("z1", "z2"))
    z1, z2 = Z2.generators()
    phi1 = homomorphism(Z2, [1, 0], None, "phi1")
    phi2 = homomorphism(Z2, [3, 2], None, "phi2")
    R = retract_to_kernel([phi1, phi2], [z1, z2])
    assert R.matrix == [[1, 0], [3, 2]]
    assert R.psi(z1).coords == (1, 0) and R.psi(z2).coords == (0, 1)
    for g in ball(Z2, 4):
        assert R.psi(g).coords == g.nf
    with pytest.raises(InputError):
        retract_to_kernel([phi1, phi1], [z1, z2])


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
def test_rational_inverse(M):
    try:
        inv = rational_inverse(M)
    except InputError:
        return
    for i in range(3):
        for j in range(3):
            assert sum(M[i][k] * inv[k][j] for k in range(3)) == (1 if i == j else 0)


def test_quasiline_distance_lower_bound():
    Z2 = FreeAbelian(2)
    pot = homomorphism(Z2, [1, 0], None, "first coordinate")
    QL = QuasilineMetric(Z2, pot, 1)
    for a in range(-6, 7):
        g = GroupValue(Z2, (a, 3))
        d = quasiline_distance(QL, g, 3, max_steps=12)
        assert not isinstance(d, LowerBound)
        assert Fraction(abs(a), 1) - 1 <= d
    far = quasiline_distance(QL, GroupValue(Z2, (40, 0)), 2, max_steps=3)
    assert far == LowerBound(4)
    with pytest.raises(InputError):
        QuasilineMetric(Z2, pot, 0)


def test_abelianization_correction_kills_chosen_elements():
    Z2 = FreeAbelian(2)
    x, y = Z2.generators()
    X = homomorphism(Z2, [5, -2], None, "X")
    lam = [homomorphism(Z2, [1, 0], None, "l1"), homomorphism(Z2, [0, 1], None, "l2")]
    Xc = abelianization_correction(X, [(x, lam[0]), (y, lam[1])])
    assert Xc(x) == 0 and Xc(y) == 0
    with pytest.raises(InputError):
        abelianization_correction(X, [(x, lam[1])])


def test_conjugation_probe_on_homogeneous_map_is_zero():
    hom = brooks_homogeneous(F2, parse_word(F2, "a b"))
    value, _ = conjugation_invariance_probe(hom, F2, 2, lambda g: True)
    assert value == 0


def test_defect_growth_rows_and_domain_check():
    phi = brooks(F2, parse_word(F2, "a b"))
    rows = defect_growth(phi, [1, 2])
    assert [r["defect"] for r in rows] == [1, 1]
    with pytest.raises(InputError):
        phi(FreeAbelian(2).identity())


def test_parallel_defect_matches_serial():
    phi = QuasiMap(F2, None, lambda g: len(g.nf) // 2, "half length")
    assert defect_on_ball(phi, 3) == defect_on_ball(QuasiMap(F2, None, phi.rule, "copy"), 3, jobs=4)
