from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centext.errors import InputError, ResourceCapError
from centext.groups import (
    AbelianGroup,
    AffineMapZ3,
    Cyclic,
    DirectProduct,
    FreeAbelian,
    FreeGroup,
    GroupValue,
    HeisenbergGroup,
    ball,
    element,
    evaluate_word,
    geodesic_word,
    group_from_config,
    parse_word,
    sphere,
    word_length,
)

ints = st.integers(-6, 6)


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def heis_matrix(a, b, c):
    # x -> E12, y -> E23, [x, y] -> E13; x^a y^b z^c
    return [[1, a, a * b + c], [0, 1, b], [0, 0, 1]]


@given(ints, ints, ints, ints, ints, ints)
def test_heisenberg_product_matches_unitriangular_matrices(a, b, c, d, e, f):
    H = HeisenbergGroup()
    g, h = H.value(a, b, c), H.value(d, e, f)
    assert heis_matrix(*(g * h).nf) == matmul(heis_matrix(a, b, c), heis_matrix(d, e, f))


def test_heisenberg_commutator_is_center():
    H = HeisenbergGroup()
    x, y = H.generators()
    assert x * y * x.inverse() * y.inverse() == H.center(1)
    assert y * x == x * y * H.center(-1)


@pytest.mark.parametrize("r", range(0, 5))
def test_free_group_ball_sizes(r):
    assert len(ball(FreeGroup(2), r)) == 2 * 3**r - 1


@pytest.mark.parametrize("r", range(0, 6))
def test_z2_ball_sizes(r):
    assert len(ball(FreeAbelian(2), r)) == 2 * r * r + 2 * r + 1
    assert len(sphere(FreeAbelian(2), r)) == (4 * r if r else 1)


def test_ball_order_is_shortlex_and_deterministic():
    F = FreeGroup(2)
    B = ball(F, 2)
    assert [F.format_word(g.nf) for g in B[:5]] == ["1", "a", "a^-1", "b", "b^-1"]
    assert B == ball(FreeGroup(2), 2)


@given(st.lists(st.tuples(st.integers(0, 1), st.sampled_from([1, -1])), max_size=8))
def test_free_group_word_length_is_reduced_length(w):
    F = FreeGroup(2)
    g = evaluate_word(F, w)
    assert word_length(F, g) == len(g.nf)


@given(ints, ints, st.integers(-3, 3))
@settings(max_examples=40, deadline=None)
def test_heisenberg_word_length_agrees_with_bfs(a, b, c):
    H = HeisenbergGroup()
    g = H.value(a % 3, b % 3, c)
    w = geodesic_word(H, g)
    assert evaluate_word(H, w) == g
    assert len(w) == word_length(H, g)
    B = ball(H, len(w))
    assert g in B
    if len(w):
        assert g not in ball(H, len(w) - 1)


@pytest.mark.parametrize(
    "G",
    [FreeGroup(2), FreeAbelian(2), Cyclic(5), AbelianGroup(1, (2, 3)), HeisenbergGroup(),
     DirectProduct([FreeAbelian(1), Cyclic(3)])],
    ids=lambda G: repr(G),
)
def test_group_axioms_on_ball(G):
    B = ball(G, 2)
    e = G.identity()
    for g in B:
        assert g * e == g == e * g
        assert (g * g.inverse()).is_identity()
        for h in B[:8]:
            for k in B[:8]:
                assert (g * h) * k == g * (h * k)


def test_parse_and_format_round_trip():
    F = FreeGroup(2, ("x", "y"))
    w = parse_word(F, "x y^-1 x^3")
    assert F.format_word(w) == "x y^-1 x x x"
    assert element(F, "1").is_identity()
    with pytest.raises(InputError):
        parse_word(F, "x q")


def test_cyclic_canonical_residues():
    C = Cyclic(4)
    t = C.generators()[0]
    assert (t**5) == t
    assert (t**4).is_identity()


def test_affine_maps():
    m = AffineMapZ3(((0, 1, 0), (1, 0, 0), (0, 0, 1)), (1, 0, 0))
    assert (m @ m.inverse()).is_identity()
    assert m((1, 2, 3)) == (3, 1, 3)
    with pytest.raises(InputError):
        AffineMapZ3(((2, 0, 0), (0, 1, 0), (0, 0, 1)), (0, 0, 0))


def test_group_from_config_and_errors():
    G = group_from_config({"kind": "DirectProduct", "factors": [{"kind": "Free", "rank": 2}, {"kind": "Cyclic", "order": 2}]})
    assert isinstance(G, DirectProduct)
    with pytest.raises(InputError):
        group_from_config({"kind": "Nope"})
    with pytest.raises(InputError):
        group_from_config({"rank": 2})


def test_ball_cap():
    with pytest.raises(ResourceCapError):
        ball(FreeGroup(3), 6, cap=100)


def test_mixing_groups_is_an_error():
    with pytest.raises(InputError):
        FreeGroup(2).generators()[0] * GroupValue(FreeAbelian(2), (1, 0))
