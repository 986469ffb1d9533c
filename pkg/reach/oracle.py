"""Brute-force values on the augmented product graph.

Nothing here calls the solvers; the only shared code is the running-extremum
augmentation in `reach.mdp`.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from config import Config

from .compose import compose_raa, compose_rr
from .errors import CapExceededError, ParameterError
from .mdp import FiniteMdp, Objective, SplitMix64, as_labels, augmented_bound, initial_extrema, random_mdp, step_extrema, terminal_score
from .policy import best_stationary_value, realized_objective, simulate, synth_raa_augmented, synth_rr_augmented
from .solvers import solve_avoid, solve_reach, solve_reach_avoid

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OracleReport:
    mode: Objective
    values: np.ndarray
    oracle: np.ndarray
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "values": self.values.tolist(),
            "oracle": self.oracle.tolist(),
            "mismatches": [list(m) for m in self.mismatches],
        }


def _tables(mdp: FiniteMdp, labels: Sequence, mode: Objective) -> list:
    if len(labels) != len(mode.label_names):
        raise ParameterError(f"objective {mode.value} needs labels {mode.label_names}")
    return [as_labels(t, mdp, n).tolist() for t, n in zip(labels, mode.label_names)]


def augmented_graph(mdp: FiniteMdp, labels: Sequence, mode: Objective, cap: int = Config.ORACLE_CAP) -> nx.DiGraph:
    """Augmented states (x, y, z) reachable from every (x, initial extrema), as a digraph."""
    mode = Objective(mode)
    tables = _tables(mdp, labels, mode)
    nxt = mdp.next.tolist()
    graph = nx.DiGraph()
    roots = [(x, *initial_extrema(mode, tables, x)) for x in range(mdp.num_states)]
    graph.add_nodes_from(roots)
    queue = deque(roots)
    while queue:
        node = queue.popleft()
        x, y, z = node
        for x_next in set(nxt[x]):
            succ = (x_next, *step_extrema(mode, tables, y, z, x_next))
            if succ not in graph:
                if graph.number_of_nodes() >= cap:
                    raise CapExceededError(f"augmented graph exceeds {cap} states")
                queue.append(succ)
            graph.add_edge(node, succ)
    graph.graph["roots"] = roots
    graph.graph["mode"] = mode
    return graph


def oracle_value(mdp: FiniteMdp, labels: Sequence, mode: Objective, cap: int = Config.ORACLE_CAP) -> np.ndarray:
    """Best terminal score over the cycle-borne augmented states reachable from each start."""
    mode = Objective(mode)
    graph = augmented_graph(mdp, labels, mode, cap)
    components = list(nx.strongly_connected_components(graph))
    dag = nx.condensation(graph, scc=components)
    best = {}
    for c in reversed(list(nx.topological_sort(dag))):
        members = dag.nodes[c]["members"]
        candidates = [best[s] for s in dag.successors(c)]
        if len(members) > 1 or any(graph.has_edge(v, v) for v in members):
            candidates.extend(terminal_score(mode, v[1], v[2]) for v in members)
        best[c] = max(candidates)
    mapping = dag.graph["mapping"]
    logger.debug("%s oracle: %d augmented states, %d components", mode.value, graph.number_of_nodes(), len(components))
    return np.array([best[mapping[root]] for root in graph.graph["roots"]], dtype=np.float64)


def oracle_by_policy_enumeration(mdp: FiniteMdp, labels: Sequence, mode: Objective, cap: int = Config.POLICY_ENUM_CAP) -> np.ndarray:
    """Best realized value over all deterministic stationary augmented policies.

    A rollout only depends on the choices at the augmented states it visits,
    so policies are enumerated lazily along each rollout: every branch fixes
    the action of the state it is at, and a branch ends when it revisits a
    state whose action is already fixed.
    """
    mode = Objective(mode)
    graph = augmented_graph(mdp, labels, mode, Config.ORACLE_CAP)
    count = mdp.num_actions ** graph.number_of_nodes()
    if count > cap:
        raise CapExceededError(f"{count} augmented policies exceed the enumeration cap {cap}")
    tables = _tables(mdp, labels, mode)
    nxt = mdp.next.tolist()

    def best_from(node, on_path):
        x, y, z = node
        result = None
        for a in range(mdp.num_actions):
            x_next = nxt[x][a]
            succ = (x_next, *step_extrema(mode, tables, y, z, x_next))
            if succ in on_path:
                score = terminal_score(mode, succ[1], succ[2])
            else:
                on_path.add(succ)
                score = best_from(succ, on_path)
                on_path.discard(succ)
            result = score if result is None else max(result, score)
        return result

    values = []
    for root in graph.graph["roots"]:
        values.append(best_from(root, {root}))
    return np.array(values, dtype=np.float64)


def _pipeline_values(mdp: FiniteMdp, labels: Sequence, mode: Objective) -> np.ndarray:
    if mode is Objective.R:
        return solve_reach(mdp, labels[0])[0]
    if mode is Objective.A:
        return solve_avoid(mdp, labels[0])[0]
    if mode is Objective.RA:
        return solve_reach_avoid(mdp, labels[0], labels[1])[0]
    if mode is Objective.RAA:
        return compose_raa(mdp, labels[0], labels[1]).v_raa
    return compose_rr(mdp, labels[0], labels[1]).v_rr


def cross_check(mdp: FiniteMdp, labels: Sequence, mode: Objective, values: Optional[np.ndarray] = None) -> OracleReport:
    """Compare the solver pipeline (or a supplied table) with the oracle, exactly."""
    mode = Objective(mode)
    if values is None:
        values = _pipeline_values(mdp, labels, mode)
    values = np.asarray(values, dtype=np.float64)
    oracle = oracle_value(mdp, labels, mode)
    mismatches = [
        (x, float(values[x]), float(oracle[x]))
        for x in range(mdp.num_states)
        if values[x] != oracle[x]
    ]
    if mismatches:
        logger.info("%s cross-check: %d mismatching states", mode.value, len(mismatches))
    return OracleReport(mode, values, oracle, mismatches)


@dataclass(frozen=True)
class TrialRecord:
    index: int
    seed: int
    num_states: int
    num_actions: int
    raa_mismatches: int
    rr_mismatches: int
    raa_rollout_failures: int
    rr_rollout_failures: int
    stationary_violations: int
    stationary_checked: bool

    @property
    def ok(self) -> bool:
        return not (
            self.raa_mismatches or self.rr_mismatches or self.raa_rollout_failures
            or self.rr_rollout_failures or self.stationary_violations
        )


def _rollout_failures(mdp: FiniteMdp, policy, values: np.ndarray, steps: int) -> int:
    failures = 0
    for x in range(mdp.num_states):
        traj = simulate(mdp, policy, x, steps)
        if not traj.cycled or realized_objective(traj) != values[x]:
            failures += 1
    return failures


def run_trial(index: int, seed: int, max_states: int, max_actions: int, corrupt: bool = False) -> TrialRecord:
    draw = SplitMix64(seed)
    num_states = 1 + draw.next() % max_states
    num_actions = 1 + draw.next() % max_actions
    trial_seed = draw.next()
    mdp, (first, second) = random_mdp(trial_seed, num_states, num_actions, 2)

    raa = compose_raa(mdp, first, second)
    rr = compose_rr(mdp, first, second)
    raa_values = raa.v_raa.copy()
    if corrupt:
        raa_values[0] += 1.0
    raa_report = cross_check(mdp, (first, second), Objective.RAA, raa_values)
    rr_report = cross_check(mdp, (first, second), Objective.RR, rr.v_rr)

    steps = 2 * augmented_bound(mdp, (first, second)) + 2
    raa_failures = _rollout_failures(mdp, synth_raa_augmented(mdp, raa), raa.v_raa, steps)
    rr_failures = _rollout_failures(mdp, synth_rr_augmented(mdp, rr), rr.v_rr, steps)

    violations = 0
    checked = num_states <= Config.STATIONARY_MAX_STATES
    if checked:
        violations += int((best_stationary_value(mdp, (first, second), Objective.RAA) > raa.v_raa).sum())
        violations += int((best_stationary_value(mdp, (first, second), Objective.RR) > rr.v_rr).sum())
    return TrialRecord(
        index, trial_seed, num_states, num_actions,
        len(raa_report.mismatches), len(rr_report.mismatches),
        raa_failures, rr_failures, violations, checked,
    )


def run_battery(trials: int, max_states: int, max_actions: int, seed: int, corrupt: bool = False) -> list:
    """Random-instance check of both decompositions, their policies and the stationary gap."""
    if trials < 1 or max_states < 1 or max_actions < 1:
        raise ParameterError("trials, max_states and max_actions must be positive")
    records = []
    for index in range(trials):
        records.append(run_trial(index, seed + index, max_states, max_actions, corrupt))
        if not records[-1].ok:
            logger.info("trial %d failed: %s", index, records[-1])
    logger.info("battery finished: %d/%d trials clean", sum(r.ok for r in records), trials)
    return records
