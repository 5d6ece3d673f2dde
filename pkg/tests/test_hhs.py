from __future__ import annotations

import copy

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centext.errors import InputError
from centext.hhs import (
    builtin_model,
    check_axioms,
    cycle_model,
    grid_model,
    min_delta,
    model_from_doc,
    model_to_doc,
    path_model,
    quotient_model,
    replay_witness,
    restrict_to_unbounded,
)
from centext.hhs.axioms import Context, derive_theta, measure, run_check
from centext.hhs.model import GroupAction
from centext.reports import axiom_report_doc


@pytest.fixture(scope="module")
def grid():
    return grid_model()


@pytest.fixture(scope="module")
def corrupted():
    return grid_model(corrupted=True)


def assert_witnesses_replay(m, rep):
    for r in rep.failures():
        assert r.witness is not None
        assert replay_witness(m, r.index, r.witness, rep.delta, rep.theta), (r.index, r.witness)


def test_path_model():
    m = path_model()
    assert check_axioms(m, 1).passed
    rep0 = check_axioms(m, 0)
    assert not rep0.passed and rep0.result("1").witness[0] == "lipschitz"
    assert min_delta(m, 3) == 1


def test_grid_model(grid):
    assert check_axioms(grid, 2).passed
    assert min_delta(grid, 3) == 2
    rep = check_axioms(grid, 1)
    assert {r.index for r in rep.failures()} == {"3", "9"}
    assert_witnesses_replay(grid, rep)


def test_grid_partial_realization_witnessed_by_coordinates(grid):
    ctx = Context(grid)
    assert run_check(ctx, "10", 0) is None


def test_corrupted_grid_fails_projections_with_adjacent_pair(corrupted):
    rep = check_axioms(corrupted, 2)
    r = rep.result("1")
    assert not r.passed
    kind, W, x, y = r.witness
    assert (kind, W) == ("lipschitz", "U")
    assert corrupted.dist[x][y] == 1
    assert replay_witness(corrupted, "1", r.witness, 2)
    assert r.measured == 5
    assert min_delta(corrupted, 3) is None


@pytest.mark.parametrize("name", ["path", "grid", "corrupted-grid", "cycle"])
def test_monotone_in_delta(name):
    m = builtin_model(name)
    ctx = Context(m)
    for index in ("0", "1", "3", "7", "8", "9", "10"):
        seen_pass = False
        for d in range(0, 7):
            ok = run_check(ctx, index, d) is None
            assert ok or not seen_pass, (index, d)
            seen_pass |= ok


@pytest.mark.parametrize("name", ["path", "grid", "corrupted-grid", "cycle"])
def test_measured_constants_are_tight(name):
    m = builtin_model(name)
    ctx = Context(m)
    rep = check_axioms(m, 3, ctx=ctx)
    for r in rep.results:
        if r.measured:
            assert run_check(ctx, r.index, r.measured) is None
            assert run_check(ctx, r.index, r.measured - 1) is not None


@pytest.mark.parametrize("name", ["path", "corrupted-grid", "cycle", "grid"])
@pytest.mark.parametrize("delta", [0, 1, 2])
def test_every_failure_witness_replays(name, delta):
    m = builtin_model(name)
    assert_witnesses_replay(m, check_axioms(m, delta, measure_constants=False))


def test_uniqueness_function_on_grid(grid):
    theta = derive_theta(Context(grid))
    for r, t in theta.items():
        assert t <= 2 * r + 2
    # oracle: pairs with both factor distances < r have L1 distance <= 2r - 2
    assert all(theta[r] == max(0, 2 * r - 1) for r in theta)
    # a table that is too small fails with a replayable witness
    small = {r: max(0, t - 1) for r, t in theta.items()}
    rep = check_axioms(grid, 2, theta=small, measure_constants=False)
    r = rep.result("11")
    assert not r.passed and replay_witness(grid, "11", r.witness, 2, small)


def test_containers_need_a_proper_container():
    m = grid_model(extra=True)
    m = m.copy_with(orthogonal=m.orthogonal | {frozenset(("U", "Y"))})
    rep = check_axioms(m, 2, measure_constants=False)
    r = rep.result("5")
    assert not r.passed and r.witness[0] == "no container"
    assert replay_witness(m, "5", r.witness, 2)
    alt = check_axioms(m, 2, containers="finite-dimension", measure_constants=False)
    assert alt.result("5'").passed


def test_passing_up_variant_reports_table(grid):
    rep = check_axioms(grid, 2, large_links="passing-up")
    assert rep.passed
    assert rep.passing_up[1] == 1
    assert max(rep.passing_up.values()) == 3


def test_cycle_hyperbolicity():
    m = cycle_model(6)
    rep = check_axioms(m, 2, measure_constants=False)
    r = rep.result("0")
    assert not r.passed and replay_witness(m, "0", r.witness, 2)
    assert min_delta(m, 4) == 3


def test_parallel_check_is_identical(grid):
    a = axiom_report_doc(check_axioms(grid, 1))
    b = axiom_report_doc(check_axioms(grid, 1, jobs=4))
    assert a == b


# ---------------------------------------------------------------------------
# documents


def test_model_document_round_trip(grid):
    doc = model_to_doc(grid)
    again = model_to_doc(model_from_doc(doc))
    assert again == doc
    flip = grid_model(flip=True)
    assert model_to_doc(model_from_doc(model_to_doc(flip))) == model_to_doc(flip)


@pytest.mark.parametrize("section", ["points", "domains", "coordinate_graphs", "projections"])
def test_malformed_model_names_missing_datum(grid, section):
    doc = model_to_doc(grid)
    del doc[section]
    with pytest.raises(InputError) as err:
        model_from_doc(doc)
    assert section in str(err.value)


def test_model_invariants_rejected():
    doc = model_to_doc(path_model(4))
    bad = copy.deepcopy(doc)
    bad["points"]["distance"][0][3] = 9
    with pytest.raises(InputError):
        model_from_doc(bad)
    bad = copy.deepcopy(doc)
    bad["points"]["distance"][0][3] = bad["points"]["distance"][3][0] = 9
    with pytest.raises(InputError, match="triangle"):
        model_from_doc(bad)
    bad = copy.deepcopy(doc)
    bad["coordinate_graphs"]["S"]["edges"] = []
    with pytest.raises(InputError, match="disconnected"):
        model_from_doc(bad)


# ---------------------------------------------------------------------------
# transformations


def test_restrict_keeps_big_domains(grid):
    res = restrict_to_unbounded(grid, 2)
    assert res.kept == ["S", "U", "V"] and res.passed


def test_restrict_drops_single_vertex_domain():
    m = grid_model(extra=True)
    res = restrict_to_unbounded(m, 2)
    assert res.dropped == ["Y"] and res.passed
    # projections unchanged, so every retained instance keeps its verdict
    a, b = Context(m), Context(res.model)
    for W in res.kept:
        assert (a.dW[W] == b.dW[W]).all()
    for index in ("1", "3", "7", "8", "10"):
        for d in range(0, 3):
            assert (run_check(a, index, d) is None) == (run_check(b, index, d) is None)
    assert all(res.passing_up[t] == res.passing_up[2] for t in res.passing_up if t <= 2)


def test_restrict_path_huge_threshold():
    res = restrict_to_unbounded(path_model(), 100)
    assert res.kept == ["S"] and res.passed


def test_restrict_threshold_below_delta(grid):
    with pytest.raises(InputError):
        restrict_to_unbounded(grid, 1, delta=2)
    with pytest.raises(InputError):
        restrict_to_unbounded(grid, 1)


def test_quotient_trivial_action_is_identity(grid):
    res = quotient_model(grid, GroupAction([], []), 2)
    assert model_to_doc(res.model) == model_to_doc(grid)
    assert res.B == 0 and res.passed


def test_quotient_cycle_is_half_cycle():
    res = quotient_model(cycle_model(6), delta=3)
    q = res.model
    assert q.n_points == 6
    assert [max(row) for row in q.dist] == [3] * 6
    assert res.report_at_delta.passed and res.passed
    assert res.B == 6


def test_quotient_factor_flip():
    m = grid_model(flip=True)
    res = quotient_model(m, delta=2)
    assert res.orbit_diameters == {"X": 10, "S": 0, "U": 10, "V": 0}
    assert res.delta_prime == 22 and res.passed
    assert res.model.n_points == 66 and len(res.model.graphs["U"]) == 6


def test_quotient_rejects_non_automorphisms(grid):
    n = grid.n_points
    swap = list(range(n))
    swap[0], swap[1] = 1, 0
    gp = {W: list(range(len(grid.graphs[W]))) for W in grid.domains}
    with pytest.raises(InputError) as err:
        quotient_model(grid, GroupAction([swap], [gp]), 2)
    assert err.value.witness is not None


# ---------------------------------------------------------------------------
# random single-domain models


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 8).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=n, max_size=n))),
       st.integers(0, 3))
def test_random_projection_witnesses_replay(data, delta):
    n, images = data
    m = path_model(n)
    m = m.copy_with(projections={"S": [frozenset((v,)) for v in images]})
    rep = check_axioms(m, delta, measure_constants=False)
    assert_witnesses_replay(m, rep)
    ctx = Context(m)
    hi = measure(ctx, "1", 2 * n)
    assert hi is not None and (hi <= delta) == rep.result("1").passed
