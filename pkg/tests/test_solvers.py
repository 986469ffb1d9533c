import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reach.errors import ParameterError, SizeMismatchError
from reach.mdp import (
    FiniteMdp,
    Objective,
    fixture_raa_doomed_goal,
    fixture_raa_pinata,
    fixture_rr_cone,
    fixture_rr_river_islands,
    random_mdp,
)
from reach.oracle import oracle_value
from reach.solvers import (
    bellman_residual,
    evaluate_policy_gamma,
    evaluate_srabe,
    greedy_policy,
    solve_avoid,
    solve_avoid_gamma,
    solve_reach,
    solve_reach_avoid,
    solve_reach_avoid_gamma,
    solve_reach_gamma,
    sweep_cap,
)

seeds = st.integers(min_value=0, max_value=2**64 - 1)
SELF_LOOP = FiniteMdp([[0]])
CHAIN = FiniteMdp([[1], [2], [2]])
GAMMAS = (0.9, 0.99, 0.999, 0.9999)


def test_reach_examples():
    assert solve_reach(SELF_LOOP, [0.5])[0].tolist() == [0.5]
    values, report = solve_reach(CHAIN, [-1, 0, 2])
    assert values.tolist() == [2.0, 2.0, 2.0]
    assert report.converged and report.residual == 0.0


def test_reach_matches_oracle_on_golden_instance():
    mdp, (l1, _) = random_mdp(1, 5, 2)
    assert np.array_equal(solve_reach(mdp, l1)[0], oracle_value(mdp, (l1,), Objective.R))


def test_avoid_examples():
    assert solve_avoid(SELF_LOOP, [0.3])[0].tolist() == [0.3]
    mdp = FiniteMdp([[0, 1], [1, 1]])
    assert solve_avoid(mdp, [1, -2])[0].tolist() == [1.0, -2.0]
    pinata, _, g = fixture_raa_pinata()
    assert solve_avoid(pinata, g)[0].tolist() == [1.0, -1.0, 1.0]


def test_reach_avoid_examples():
    assert solve_reach_avoid(SELF_LOOP, [2], [-1])[0].tolist() == [-1.0]
    mdp, l, g = fixture_raa_doomed_goal()
    assert solve_reach_avoid(mdp, l, g)[0].tolist() == [1.0, 1.0, -1.0]


def test_size_mismatch_is_rejected():
    with pytest.raises(SizeMismatchError):
        solve_reach(CHAIN, [0.0, 1.0])


@given(seeds, st.integers(1, 6), st.integers(1, 3))
def test_exact_solvers_match_oracle(seed, n, m):
    mdp, (l, g) = random_mdp(seed, n, m)
    assert np.array_equal(solve_reach(mdp, l)[0], oracle_value(mdp, (l,), Objective.R))
    assert np.array_equal(solve_avoid(mdp, g)[0], oracle_value(mdp, (g,), Objective.A))
    assert np.array_equal(solve_reach_avoid(mdp, l, g)[0], oracle_value(mdp, (l, g), Objective.RA))


@given(seeds, st.integers(1, 6), st.integers(1, 3))
def test_exact_outputs_are_label_values_and_fixed_points(seed, n, m):
    mdp, (l, g) = random_mdp(seed, n, m)
    v_r = solve_reach(mdp, l)[0]
    v_a = solve_avoid(mdp, g)[0]
    v_ra = solve_reach_avoid(mdp, l, g)[0]
    label_set = set(l.tolist()) | set(g.tolist())
    for table in (v_r, v_a, v_ra):
        assert set(table.tolist()) <= label_set
    assert bellman_residual(mdp, v_r, Objective.R, [l]) == 0.0
    assert bellman_residual(mdp, v_a, Objective.A, [g]) == 0.0
    assert bellman_residual(mdp, v_ra, Objective.RA, [l, g]) == 0.0
    assert (v_ra <= v_r).all()
    assert (v_ra <= g).all()


@given(seeds, st.integers(1, 6), st.integers(1, 3))
def test_sweep_count_is_bounded(seed, n, m):
    mdp, (l, g) = random_mdp(seed, n, m)
    distinct = len(set(l.tolist()) | set(g.tolist()))
    for _, report in (solve_reach(mdp, l), solve_avoid(mdp, g), solve_reach_avoid(mdp, l, g)):
        assert report.sweeps <= n * distinct + 1


def test_discounted_gamma_zero_is_instantaneous():
    mdp, l, g = fixture_raa_doomed_goal()
    values, report = solve_reach_avoid_gamma(mdp, l, g, 0.0)
    assert values.tolist() == np.minimum(l, g).tolist()
    assert report.sweeps == 1


@pytest.mark.parametrize("gamma", [0.0, 0.5, 0.9, 0.9999])
def test_discounted_reach_self_loop(gamma):
    assert solve_reach_gamma(SELF_LOOP, [1.0], gamma)[0][0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("gamma", [-0.1, 1.0, 1.5])
def test_discount_out_of_range_is_rejected(gamma):
    with pytest.raises(ParameterError):
        solve_reach_gamma(SELF_LOOP, [1.0], gamma)


@given(seeds, st.integers(1, 6), st.integers(1, 3), st.sampled_from([0.5, 0.9, 0.99]))
def test_discounted_residual_within_tolerance(seed, n, m, gamma):
    mdp, (l, g) = random_mdp(seed, n, m)
    for kind, labels, solver in (
        (Objective.R, [l], lambda: solve_reach_gamma(mdp, l, gamma)),
        (Objective.A, [g], lambda: solve_avoid_gamma(mdp, g, gamma)),
        (Objective.RA, [l, g], lambda: solve_reach_avoid_gamma(mdp, l, g, gamma)),
    ):
        values, report = solver()
        assert report.converged
        assert bellman_residual(mdp, values, kind, labels, gamma) <= 1e-12


def test_sweep_cap():
    assert sweep_cap(0.0, 6.0) == 1
    assert sweep_cap(0.9, 0.0) == 1
    assert sweep_cap(0.5, 1.0) == 41


def test_residual_of_non_fixed_points():
    mdp, l, g = fixture_raa_pinata()
    high = np.full(3, 10.0)
    assert bellman_residual(mdp, high, Objective.R, [l], 0.9) > 0
    assert bellman_residual(mdp, high, Objective.A, [g]) > 0


def _fixture_problems():
    for build in (fixture_raa_pinata, fixture_raa_doomed_goal):
        mdp, l, g = build()
        yield mdp, Objective.R, [l]
        yield mdp, Objective.A, [g]
        yield mdp, Objective.RA, [l, g]
    for build in (fixture_rr_cone, fixture_rr_river_islands):
        mdp, l1, l2 = build()
        yield mdp, Objective.R, [l1]
        yield mdp, Objective.R, [l2]


EXACT = {Objective.R: solve_reach, Objective.A: solve_avoid, Objective.RA: solve_reach_avoid}
DISCOUNTED = {Objective.R: solve_reach_gamma, Objective.A: solve_avoid_gamma, Objective.RA: solve_reach_avoid_gamma}


@pytest.mark.parametrize("mdp,kind,labels", list(_fixture_problems()))
def test_discount_gap_shrinks_as_gamma_grows(mdp, kind, labels):
    exact = EXACT[kind](mdp, *labels)[0]
    gaps = [np.max(np.abs(DISCOUNTED[kind](mdp, *labels, gamma)[0] - exact)) for gamma in GAMMAS]
    assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))


def test_srabe_one_hot_matches_deterministic_evaluation():
    mdp, (l, g) = random_mdp(2, 4, 2)
    actions = np.array([1, 0, 1, 0])
    one_hot = np.eye(2)[actions]
    np.testing.assert_allclose(
        evaluate_srabe(mdp, one_hot, l, g, 0.9),
        evaluate_policy_gamma(mdp, actions, l, g, 0.9),
        atol=1e-12,
    )


@pytest.mark.parametrize("gamma", [0.0, 0.5, 0.99])
def test_srabe_constant_labels(gamma):
    assert evaluate_srabe(SELF_LOOP, [[1.0]], [0.25], [0.25], gamma)[0] == pytest.approx(0.25, abs=1e-12)


def test_srabe_rejects_bad_rows():
    mdp, (l, g) = random_mdp(2, 4, 2)
    with pytest.raises(ParameterError):
        evaluate_srabe(mdp, np.full((4, 2), 0.6), l, g, 0.9)
    with pytest.raises(ParameterError):
        evaluate_srabe(mdp, [[1.5, -0.5]] * 4, l, g, 0.9)
    with pytest.raises(ParameterError):
        evaluate_srabe(mdp, np.full((4, 3), 1 / 3), l, g, 0.9)


def _srabe_bound_holds(seed, n, m, policies, rng):
    mdp, (l, g) = random_mdp(seed, n, m)
    optimal, _ = solve_reach_avoid_gamma(mdp, l, g, 0.9)
    for _ in range(policies):
        probs = rng.dirichlet(np.ones(m), size=n)
        assert (evaluate_srabe(mdp, probs, l, g, 0.9) <= optimal + 1e-10).all()
    greedy = np.eye(m)[greedy_policy(mdp, optimal)]
    np.testing.assert_allclose(evaluate_srabe(mdp, greedy, l, g, 0.9), optimal, atol=1e-10)


def test_srabe_bound_on_seed2():
    _srabe_bound_holds(2, 4, 2, 100, np.random.default_rng(0))


def test_srabe_bound_on_random_instances():
    rng = np.random.default_rng(1)
    for seed in range(20):
        _srabe_bound_holds(seed, 5, 3, 100, rng)
