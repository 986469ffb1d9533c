from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np

from config import Config

from .compose import RaaSolution, RrSolution, check_raa, check_rr
from .errors import CapExceededError, NotCycledError, ParameterError, ResidualCheckError
from .mdp import FiniteMdp, Objective, as_labels, initial_extrema, step_extrema, terminal_score
from .solvers import bellman_residual, check_values, greedy_policy

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StationaryPolicy:
    actions: np.ndarray

    def __post_init__(self):
        table = np.array(self.actions, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "actions", table)

    def action(self, x: int, y: float = 0.0, z: float = 0.0) -> int:
        return int(self.actions[x])

    def to_list(self) -> list:
        return self.actions.tolist()


@dataclass(frozen=True, eq=False)
class AugmentedPolicy:
    """Policy on (x, y, z), evaluated by a switching rule rather than a stored table."""

    mode: Objective
    y_values: np.ndarray
    z_values: np.ndarray
    labels: tuple
    num_states: int
    num_actions: int
    rule: Callable[[int, float, float], int]
    components: dict = field(default_factory=dict)

    def action(self, x: int, y: float, z: float) -> int:
        return self.rule(x, y, z)

    def table(self, cap: int = Config.POLICY_ENUM_CAP) -> np.ndarray:
        """Dense (num_states, |Y|, |Z|) action table; row-major flattening matches AugmentedMdp."""
        size = self.num_states * self.y_values.size * self.z_values.size
        if size > cap:
            raise CapExceededError(f"augmented policy table has {size} entries, cap is {cap}")
        ys, zs = self.y_values.tolist(), self.z_values.tolist()
        return np.array(
            [[[self.rule(x, y, z) for z in zs] for y in ys] for x in range(self.num_states)],
            dtype=np.int64,
        )

    def to_dict(self, cap: int = Config.POLICY_ENUM_CAP) -> dict:
        return {
            "mode": self.mode.value,
            "y_values": self.y_values.tolist(),
            "z_values": self.z_values.tolist(),
            "actions": self.table(cap).ravel().tolist(),
            "components": {name: p.to_list() for name, p in self.components.items()},
        }


@dataclass(frozen=True)
class Trajectory:
    states: list
    actions: list
    y_trace: list
    z_trace: list
    mode: Objective
    cycled: bool

    def to_dict(self) -> dict:
        return {
            "states": self.states,
            "actions": self.actions,
            "y": self.y_trace,
            "z": self.z_trace,
            "mode": self.mode.value,
            "cycled": self.cycled,
        }


def extract_avoid_policy(mdp: FiniteMdp, v_avoid, g=None) -> StationaryPolicy:
    values = check_values(mdp, v_avoid)
    if g is not None and bellman_residual(mdp, values, Objective.A, [g]) != 0.0:
        raise ResidualCheckError("avoid table is not a fixed point of the avoid recursion")
    return StationaryPolicy(greedy_policy(mdp, values))


def reach_times(mdp: FiniteMdp, l, v_reach) -> np.ndarray:
    """Steps needed to collect the reach value, along value-preserving edges."""
    l = as_labels(l, mdp, "l")
    values = check_values(mdp, v_reach)
    if bellman_residual(mdp, values, Objective.R, [l]) != 0.0:
        raise ResidualCheckError("reach table is not a fixed point of the reach recursion")

    preserving = values[mdp.next] == values[:, None]
    predecessors = [[] for _ in range(mdp.num_states)]
    for x, u in zip(*np.nonzero(preserving)):
        predecessors[mdp.next[x, u]].append(int(x))

    tau = np.full(mdp.num_states, -1, dtype=np.int64)
    queue = deque(np.flatnonzero(l == values).tolist())
    tau[list(queue)] = 0
    while queue:
        y = queue.popleft()
        for x in predecessors[y]:
            if tau[x] < 0:
                tau[x] = tau[y] + 1
                queue.append(x)
    if (tau < 0).any():
        raise ResidualCheckError(
            f"reach value is never attained from states {np.flatnonzero(tau < 0).tolist()[:10]}"
        )
    return tau


def extract_reach_policy(mdp: FiniteMdp, l, v_reach) -> StationaryPolicy:
    values = check_values(mdp, v_reach)
    tau = reach_times(mdp, l, values)
    succ_values = values[mdp.next]
    advancing = (succ_values == values[:, None]) & (tau[mdp.next] == tau[:, None] - 1)
    actions = np.where(tau == 0, np.argmax(succ_values, axis=1), np.argmax(advancing, axis=1))
    return StationaryPolicy(actions)


def extract_reach_avoid_policy(mdp: FiniteMdp, l_tilde, g):
    """Stationary reach-avoid policy by onion peeling.

    Each peel backs up every unsettled state through the settled values,
    settles the states attaining the best level, and freezes their actions.
    """
    l_tilde = as_labels(l_tilde, mdp, "l_tilde")
    g = as_labels(g, mdp, "g")
    settled = np.zeros(mdp.num_states, dtype=bool)
    values = np.zeros(mdp.num_states, dtype=np.float64)
    actions = np.zeros(mdp.num_states, dtype=np.int64)
    peels = 0
    while not settled.all():
        open_states = np.flatnonzero(~settled)
        succ = mdp.next[open_states]
        succ_settled = settled[succ]
        succ_values = values[succ]
        # Unsettled successors are filled with l_tilde, which max{l_tilde, .} absorbs.
        best = np.where(succ_settled, succ_values, l_tilde[open_states, None]).max(axis=1)
        level = np.minimum(g[open_states], np.maximum(l_tilde[open_states], best))
        alpha = level.max()
        for row in np.flatnonzero(level == alpha):
            known = np.flatnonzero(succ_settled[row])
            if known.size:
                actions[open_states[row]] = known[np.argmax(succ_values[row, known])]
        joining = open_states[level == alpha]
        values[joining] = alpha
        settled[joining] = True
        peels += 1
    logger.debug("onion peeling settled %d states in %d peels", mdp.num_states, peels)
    return StationaryPolicy(actions), values


def synth_raa_augmented(mdp: FiniteMdp, raa: RaaSolution) -> AugmentedPolicy:
    if not check_raa(mdp, raa):
        raise ResidualCheckError("reach-always-avoid solution is not internally consistent")
    pi, _ = extract_reach_avoid_policy(mdp, raa.tilde_l, raa.g)
    theta = extract_avoid_policy(mdp, raa.v_avoid, raa.g)
    nxt = mdp.next.tolist()
    l, g, v_avoid = raa.l.tolist(), raa.g.tolist(), raa.v_avoid.tolist()
    pi_actions, theta_actions = pi.actions.tolist(), theta.actions.tolist()

    def rule(x: int, y: float, z: float) -> int:
        a = pi_actions[x]
        xp = nxt[x][a]
        if min(max(y, l[xp]), min(z, g[xp]), v_avoid[xp]) >= min(y, z, v_avoid[x]):
            return a
        return theta_actions[x]

    return AugmentedPolicy(
        Objective.RAA, np.unique(raa.l), np.unique(raa.g), (raa.l, raa.g),
        mdp.num_states, mdp.num_actions, rule, {"pi": pi, "theta": theta},
    )


def synth_rr_augmented(mdp: FiniteMdp, rr: RrSolution) -> AugmentedPolicy:
    if not check_rr(mdp, rr):
        raise ResidualCheckError("reach-reach solution is not internally consistent")
    pi = extract_reach_policy(mdp, rr.hat_l, rr.v_rr).actions.tolist()
    theta_1 = extract_reach_policy(mdp, rr.l1, rr.v_r1)
    theta_2 = extract_reach_policy(mdp, rr.l2, rr.v_r2)
    t1, t2 = theta_1.actions.tolist(), theta_2.actions.tolist()
    v_rr = rr.v_rr.tolist()

    def rule(x: int, y: float, z: float) -> int:
        if max(y, z) < v_rr[x]:
            return pi[x]
        # y == z goes to the first target
        return t1[x] if y <= z else t2[x]

    return AugmentedPolicy(
        Objective.RR, np.unique(rr.l1), np.unique(rr.l2), (rr.l1, rr.l2),
        mdp.num_states, mdp.num_actions, rule,
        {"pi": StationaryPolicy(pi), "theta_1": theta_1, "theta_2": theta_2},
    )


def label_lists(mdp: FiniteMdp, labels: Sequence, mode: Objective) -> list:
    if len(labels) != len(mode.label_names):
        raise ParameterError(f"objective {mode.value} needs labels {mode.label_names}, got {len(labels)}")
    return [as_labels(t, mdp, name).tolist() for t, name in zip(labels, mode.label_names)]


def simulate(
    mdp: FiniteMdp,
    policy,
    start: int,
    max_steps: int,
    labels: Optional[Sequence] = None,
    mode: Optional[Objective] = None,
    stop_on_cycle: bool = True,
) -> Trajectory:
    start = mdp.check_state(start)
    if max_steps < 1:
        raise ParameterError(f"max_steps must be at least 1, got {max_steps}")
    if isinstance(policy, AugmentedPolicy):
        if mode is not None and Objective(mode) is not policy.mode:
            raise ParameterError(f"policy was synthesized for {policy.mode.value}, not {Objective(mode).value}")
        mode = policy.mode
        labels = policy.labels if labels is None else labels
    if mode is None or labels is None:
        raise ParameterError("stationary rollouts need the label tables and an objective")
    mode = Objective(mode)
    return trace(mdp.next.tolist(), label_lists(mdp, labels, mode), mode, policy, start, max_steps, stop_on_cycle)


def trace(nxt: list, tables: list, mode: Objective, policy, start: int, max_steps: int, stop_on_cycle: bool = True) -> Trajectory:
    """Rollout loop of `simulate` on tables already converted to lists; no argument checks."""
    x = start
    y, z = initial_extrema(mode, tables, x)
    states, actions, ys, zs = [x], [], [y], [z]
    seen = {(x, y, z)}
    cycled = False
    for _ in range(max_steps):
        a = policy.action(x, y, z)
        if not 0 <= a < len(nxt[x]):
            raise ParameterError(f"policy chose action {a} at state {x}")
        x = nxt[x][a]
        y, z = step_extrema(mode, tables, y, z, x)
        states.append(x)
        actions.append(a)
        ys.append(y)
        zs.append(z)
        if (x, y, z) in seen:
            cycled = True
            if stop_on_cycle:
                break
        seen.add((x, y, z))
    return Trajectory(states, actions, ys, zs, mode, cycled)


def realized_objective(traj: Trajectory, mode: Optional[Objective] = None) -> float:
    if mode is not None and Objective(mode) is not traj.mode:
        raise ParameterError(f"trajectory was traced for {traj.mode.value}, not {Objective(mode).value}")
    if not traj.cycled:
        raise NotCycledError("trajectory has not closed a cycle; its objective is not determined yet")
    return terminal_score(traj.mode, traj.y_trace[-1], traj.z_trace[-1])


def rollout_score(nxt: list, tables: list, mode: Objective, choose: Callable, start: int) -> float:
    """Terminal score of the rollout from `start`; `choose(x, y, z)` picks the action."""
    x = start
    y, z = initial_extrema(mode, tables, x)
    seen = {(x, y, z)}
    while True:
        x = nxt[x][choose(x, y, z)]
        y, z = step_extrema(mode, tables, y, z, x)
        if (x, y, z) in seen:
            return terminal_score(mode, y, z)
        seen.add((x, y, z))


def best_stationary_value(mdp: FiniteMdp, labels: Sequence, mode: Objective, cap: int = Config.STATIONARY_CAP) -> np.ndarray:
    """Per-state best value over all memoryless deterministic policies."""
    mode = Objective(mode)
    count = mdp.num_actions ** mdp.num_states
    if count > cap:
        raise CapExceededError(f"{count} stationary policies exceed the enumeration cap {cap}")
    tables = label_lists(mdp, labels, mode)
    nxt = mdp.next.tolist()
    best = None
    for choice in product(range(mdp.num_actions), repeat=mdp.num_states):
        scores = np.array([
            rollout_score(nxt, tables, mode, lambda x, y, z: choice[x], s)
            for s in range(mdp.num_states)
        ])
        best = scores if best is None else np.maximum(best, scores)
    logger.debug("enumerated %d stationary policies for %s", count, mode.value)
    return best
