from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centext.cocycles import (
    Cocycle,
    build_extension,
    coboundary,
    cocycle_from_table,
    cocycle_law_table,
    cocycle_violation,
    delta2,
    euler_cocycle,
    isomorphism_check,
    normalize_cocycle,
    sup_norm_on_ball,
    verify_bundle,
    zero_cocycle,
)
from centext.errors import InputError
from centext.extensions import Z, heisenberg_bundle, registry_bundles, trivial_bundle
from centext.groups import Cyclic, FreeAbelian, GroupValue, ball

ints = st.integers(-5, 5)


@given(ints, ints, ints, ints)
def test_heisenberg_euler_cocycle_closed_form(a1, a2, b1, b2):
    ext = heisenberg_bundle()
    G = ext.base
    omega = euler_cocycle(ext)
    assert int(omega(GroupValue(G, (a1, a2)), GroupValue(G, (b1, b2)))) == -a2 * b1


@pytest.mark.parametrize("r", range(1, 7))
def test_heisenberg_sup_norm_is_r_squared(r):
    omega = euler_cocycle(heisenberg_bundle())
    value, (g, h) = sup_norm_on_ball(omega, r)
    assert value == r * r
    assert int(omega(g, h)) in (r * r, -(r * r))


@pytest.mark.parametrize("name", ["heisenberg", "trivial", "heisenberg-mod2", "triangle", "square-coboundary", "carry"])
def test_registry_euler_cocycles_satisfy_the_cocycle_law(name):
    ext = registry_bundles()[name]()
    assert cocycle_violation(euler_cocycle(ext), 2) is None
    assert verify_bundle(ext) == []


def test_coboundary_is_a_cocycle_and_detected_failure_has_witness():
    G, K = FreeAbelian(1, ("t",)), Z()
    db = coboundary(lambda g: g.nf[0] ** 3, G, K)
    assert cocycle_violation(db, 3) is None
    bad = Cocycle(G, K, lambda g, h: g.nf[0] * h.nf[0] ** 2)
    hit = cocycle_violation(bad, 2)
    assert hit is not None
    assert not delta2(bad, *hit).is_zero()
    with pytest.raises(InputError) as err:
        build_extension(K, G, bad)
    assert err.value.witness is not None


def test_normalization_subtracts_constant():
    G, K = FreeAbelian(1, ("t",)), Z()
    omega = Cocycle(G, K, lambda g, h: 7)  # constant cocycle, cohomologous to 0
    n, c = normalize_cocycle(omega)
    assert int(c) == 7
    for g in ball(G, 2):
        for h in ball(G, 2):
            assert n(g, h).is_zero()
    assert n.normalized


def test_twisted_product_round_trip_and_table_import():
    C2, K = Cyclic(2, "u"), Cyclic(2, "z")
    omega = cocycle_from_table(C2, K, [("1", "1", 0), ("1", "u", 0), ("u", "1", 0), ("u", "u", 1)])
    ext = build_extension(K, C2, omega)
    # Z/2 by Z/2 with the carry cocycle is Z/4: the lift of u has order 4
    s = ext.section(C2.generators()[0])
    assert not (s * s).is_identity() and (s * s * s * s).is_identity()
    assert verify_bundle(ext) == []
    with pytest.raises(InputError):
        omega(C2.generators()[0], GroupValue(FreeAbelian(1), (1,)))


@pytest.mark.parametrize("make", [heisenberg_bundle, trivial_bundle])
def test_dictionary_round_trip(make):
    ext = make()
    rebuilt = build_extension(ext.kernel, ext.base, euler_cocycle(ext))
    assert isomorphism_check(ext, rebuilt, 4) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_extension_group_inverse(k, a):
    ext = build_extension(Z(), FreeAbelian(1, ("t",)), coboundary(lambda g: g.nf[0] ** 2, FreeAbelian(1, ("t",)), Z()))
    E = ext.total
    e = E.pair(Z().kvalue((k,)), GroupValue(ext.base, (a,)))
    assert (e * e.inverse()).is_identity()


def test_law_table_and_zero_cocycle():
    G, K = FreeAbelian(2), Z()
    t = cocycle_law_table(zero_cocycle(G, K), [1, 2])
    assert t["passed"] and [r["r"] for r in t["rows"]] == [1, 2]
    assert sup_norm_on_ball(zero_cocycle(G, K), 3)[0] == 0
