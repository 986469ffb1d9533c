import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reach.compose import compose_raa, compose_rr
from reach.errors import NotCycledError, ParameterError, ResidualCheckError
from reach.mdp import (
    FiniteMdp,
    Objective,
    fixture_raa_doomed_goal,
    fixture_raa_pinata,
    fixture_rr_cone,
    random_mdp,
)
from reach.oracle import augmented_graph
from reach.policy import (
    StationaryPolicy,
    best_stationary_value,
    extract_avoid_policy,
    extract_reach_avoid_policy,
    extract_reach_policy,
    label_lists,
    reach_times,
    realized_objective,
    simulate,
    synth_raa_augmented,
    synth_rr_augmented,
    trace,
)
from reach.solvers import solve_avoid, solve_reach, solve_reach_avoid

seeds = st.integers(min_value=0, max_value=2**64 - 1)
instances = st.tuples(seeds, st.integers(1, 6), st.integers(1, 3))
SELF_LOOP = FiniteMdp([[0]])
CHAIN = FiniteMdp([[1], [2], [2]])


def rollout_value(mdp, policy, x, labels=None, mode=None):
    traj = simulate(mdp, policy, x, 4 * mdp.num_states * 49 + 2, labels, mode)
    return realized_objective(traj)


def test_avoid_policy_examples():
    assert extract_avoid_policy(SELF_LOOP, [0.0]).to_list() == [0]
    mdp, _, g = fixture_raa_pinata()
    v_avoid, _ = solve_avoid(mdp, g)
    assert extract_avoid_policy(mdp, v_avoid, g).actions[0] == 1


def test_avoid_policy_rejects_non_fixed_point():
    mdp, _, g = fixture_raa_pinata()
    with pytest.raises(ResidualCheckError):
        extract_avoid_policy(mdp, np.full(3, 10.0), g)


@given(instances)
def test_avoid_policy_achieves_value(instance):
    mdp, (_, g) = random_mdp(*instance)
    v_avoid, _ = solve_avoid(mdp, g)
    policy = extract_avoid_policy(mdp, v_avoid, g)
    for x in range(mdp.num_states):
        assert rollout_value(mdp, policy, x, (g,), Objective.A) == v_avoid[x]


def test_reach_policy_on_chain():
    l = [-1.0, 0.0, 2.0]
    v_reach, _ = solve_reach(CHAIN, l)
    assert reach_times(CHAIN, l, v_reach).tolist() == [2, 1, 0]
    assert extract_reach_policy(CHAIN, l, v_reach).to_list() == [0, 0, 0]


def test_reach_policy_heads_for_target_on_cone():
    mdp, l1, _ = fixture_rr_cone()
    v_reach, _ = solve_reach(mdp, l1)
    assert extract_reach_policy(mdp, l1, v_reach).actions[0] == 0


def test_reach_policy_rejects_unattained_value():
    with pytest.raises(ResidualCheckError):
        extract_reach_policy(SELF_LOOP, [0.0], [10.0])


@given(instances)
def test_reach_policy_achieves_value(instance):
    mdp, (l, _) = random_mdp(*instance)
    v_reach, _ = solve_reach(mdp, l)
    policy = extract_reach_policy(mdp, l, v_reach)
    for x in range(mdp.num_states):
        assert rollout_value(mdp, policy, x, (l,), Objective.R) == v_reach[x]


def test_onion_peeling_examples():
    _, peeled = extract_reach_avoid_policy(SELF_LOOP, [2.0], [-1.0])
    assert peeled.tolist() == [-1.0]
    mdp, l, g = fixture_raa_doomed_goal()
    raa = compose_raa(mdp, l, g)
    _, peeled = extract_reach_avoid_policy(mdp, raa.tilde_l, g)
    assert peeled.tolist() == [-1.0, -1.0, -1.0]
    policy, peeled = extract_reach_avoid_policy(mdp, l, g)
    assert peeled.tolist() == [1.0, 1.0, -1.0]
    assert policy.actions[0] == 1


@given(instances)
def test_onion_peeling_matches_solver_and_rollouts(instance):
    mdp, (l, g) = random_mdp(*instance)
    v_ra, _ = solve_reach_avoid(mdp, l, g)
    policy, peeled = extract_reach_avoid_policy(mdp, l, g)
    assert np.array_equal(peeled, v_ra)
    for x in range(mdp.num_states):
        assert rollout_value(mdp, policy, x, (l, g), Objective.RA) == v_ra[x]


def test_raa_policy_on_pinata():
    mdp, l, g = fixture_raa_pinata()
    raa = compose_raa(mdp, l, g)
    assert rollout_value(mdp, synth_raa_augmented(mdp, raa), 0) == -1.0 == raa.v_raa[0]


@given(instances)
def test_raa_policy_follows_reach_avoid_when_hazard_is_inactive(instance):
    mdp, (l, _) = random_mdp(*instance)
    g = np.full(mdp.num_states, 3.0)
    policy = synth_raa_augmented(mdp, compose_raa(mdp, l, g))
    pi = policy.components["pi"]
    for x, y, z in augmented_graph(mdp, (l, g), Objective.RAA).nodes:
        assert policy.action(x, y, z) == pi.actions[x]


@given(instances)
def test_raa_policy_realizes_composed_value(instance):
    mdp, (l, g) = random_mdp(*instance)
    raa = compose_raa(mdp, l, g)
    policy = synth_raa_augmented(mdp, raa)
    for x in range(mdp.num_states):
        assert rollout_value(mdp, policy, x) == raa.v_raa[x]


def test_raa_synthesis_rejects_inconsistent_solution():
    mdp, l, g = fixture_raa_doomed_goal()
    raa = compose_raa(mdp, l, g)
    broken = type(raa)(raa.l, raa.g, raa.v_avoid, raa.tilde_l, solve_reach_avoid(mdp, l, g)[0])
    with pytest.raises(ResidualCheckError):
        synth_raa_augmented(mdp, broken)


def test_rr_policy_on_cone_visits_both_targets():
    mdp, l1, l2 = fixture_rr_cone()
    policy = synth_rr_augmented(mdp, compose_rr(mdp, l1, l2))
    traj = simulate(mdp, policy, 0, 50)
    assert {1, 2} <= set(traj.states[:5])
    assert traj.cycled
    assert realized_objective(traj) == 1.0


@given(instances)
def test_rr_policy_with_duplicate_targets_matches_reach(instance):
    mdp, (l, _) = random_mdp(*instance)
    policy = synth_rr_augmented(mdp, compose_rr(mdp, l, l))
    v_reach, _ = solve_reach(mdp, l)
    for x in range(mdp.num_states):
        assert rollout_value(mdp, policy, x) == v_reach[x]


@given(instances)
def test_rr_policy_realizes_composed_value(instance):
    mdp, (l1, l2) = random_mdp(*instance)
    rr = compose_rr(mdp, l1, l2)
    policy = synth_rr_augmented(mdp, rr)
    for x in range(mdp.num_states):
        assert rollout_value(mdp, policy, x) == rr.v_rr[x]


def test_simulate_self_loop_stops_on_repeat():
    traj = simulate(SELF_LOOP, StationaryPolicy([0]), 0, 10, ([0.5], [0.3]), Objective.RAA)
    assert traj.states == [0, 0]
    assert traj.actions == [0]
    assert traj.cycled
    assert realized_objective(traj) == 0.3


@given(instances)
def test_cycle_detection_bounds_length(instance):
    mdp, (l, g) = random_mdp(*instance)
    policy = synth_raa_augmented(mdp, compose_raa(mdp, l, g))
    bound = mdp.num_states * np.unique(l).size * np.unique(g).size
    for x in range(mdp.num_states):
        traj = simulate(mdp, policy, x, 10 * bound)
        assert traj.cycled
        assert len(traj.states) <= bound + 1
        assert all(a <= b for a, b in zip(traj.y_trace, traj.y_trace[1:]))
        assert all(a >= b for a, b in zip(traj.z_trace, traj.z_trace[1:]))


def test_forced_pinata_path():
    mdp, l, g = fixture_raa_pinata()
    traj = simulate(mdp, StationaryPolicy([0, 0, 0]), 0, 10, (l, g), Objective.RAA)
    assert traj.states == [0, 1, 1]
    assert realized_objective(traj) == -1.0


def test_realized_objective_needs_a_cycle():
    traj = simulate(CHAIN, StationaryPolicy([0, 0, 0]), 0, 1, ([-1, 0, 2],), Objective.R)
    assert not traj.cycled
    with pytest.raises(NotCycledError):
        realized_objective(traj)


def test_realized_objective_rejects_other_mode():
    traj = simulate(SELF_LOOP, StationaryPolicy([0]), 0, 5, ([0.5],), Objective.R)
    with pytest.raises(ParameterError):
        realized_objective(traj, Objective.A)


def test_simulate_argument_checks():
    policy = StationaryPolicy([0])
    with pytest.raises(ParameterError):
        simulate(SELF_LOOP, policy, 1, 5, ([0.0],), Objective.R)
    with pytest.raises(ParameterError):
        simulate(SELF_LOOP, policy, 0, 0, ([0.0],), Objective.R)
    with pytest.raises(ParameterError):
        simulate(SELF_LOOP, policy, 0, 5)


def test_best_stationary_examples():
    mdp, l1, l2 = fixture_rr_cone()
    best = best_stationary_value(mdp, (l1, l2), Objective.RR)
    # from L or R a fixed action at M still alternates between both targets
    assert best.tolist() == [-1.0, 1.0, 1.0]
    assert best[0] < compose_rr(mdp, l1, l2).v_rr[0] == 1.0
    mdp, l, g = fixture_raa_pinata()
    assert best_stationary_value(mdp, (l, g), Objective.RAA)[0] == -1.0


@given(st.tuples(seeds, st.integers(1, 4), st.integers(1, 3)))
def test_stationary_never_beats_augmented(instance):
    mdp, (a, b) = random_mdp(*instance)
    assert (best_stationary_value(mdp, (a, b), Objective.RAA) <= compose_raa(mdp, a, b).v_raa).all()
    assert (best_stationary_value(mdp, (a, b), Objective.RR) <= compose_rr(mdp, a, b).v_rr).all()


def test_augmented_table_agrees_with_rule():
    mdp, l1, l2 = fixture_rr_cone()
    policy = synth_rr_augmented(mdp, compose_rr(mdp, l1, l2))
    table = policy.table()
    assert table.shape == (3, 2, 2)
    for x in range(3):
        for yi, y in enumerate(policy.y_values):
            for zi, z in enumerate(policy.z_values):
                assert table[x, yi, zi] == policy.action(x, y, z)
    flat = policy.to_dict()["actions"]
    assert flat == table.ravel().tolist()


@given(instances)
def test_trace_on_converted_tables_matches_simulate(instance):
    mdp, (l, g) = random_mdp(*instance)
    policy = synth_raa_augmented(mdp, compose_raa(mdp, l, g))
    nxt = mdp.next.tolist()
    tables = label_lists(mdp, (l, g), Objective.RAA)
    for x in range(mdp.num_states):
        steps = 4 * mdp.num_states * 49 + 2
        assert trace(nxt, tables, Objective.RAA, policy, x, steps) == simulate(mdp, policy, x, steps)
