from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from config import Config

from .errors import ParameterError, SizeMismatchError
from .mdp import FiniteMdp, Objective, as_labels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveReport:
    sweeps: int
    residual: float
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)


def successor_max(mdp: FiniteMdp, values: np.ndarray) -> np.ndarray:
    return values[mdp.next].max(axis=1)


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 <= gamma < 1.0:
        raise ParameterError(f"discount must lie in [0, 1), got {gamma}")
    return gamma


def check_values(mdp: FiniteMdp, values) -> np.ndarray:
    table = np.asarray(values, dtype=np.float64)
    if table.shape != (mdp.num_states,):
        raise SizeMismatchError(f"value table has shape {table.shape}, expected ({mdp.num_states},)")
    return table


def _iterate_exact(backup: Callable[[np.ndarray], np.ndarray], start: np.ndarray, name: str):
    # Values stay inside the finite label set, so consecutive tables become equal.
    values = start.copy()
    sweeps = 0
    while True:
        updated = backup(values)
        sweeps += 1
        if np.array_equal(updated, values):
            break
        values = updated
    logger.debug("%s converged after %d sweeps", name, sweeps)
    return values, SolveReport(sweeps=sweeps, residual=0.0, converged=True)


def sweep_cap(gamma: float, spread: float, tol: float = Config.DISCOUNTED_TOL) -> int:
    """A-priori sweep count after which a gamma-contraction is within `tol`."""
    if gamma == 0.0 or spread <= tol:
        return 1
    return max(1, math.ceil(math.log(tol / spread) / math.log(gamma)) + 1)


def _iterate_discounted(backup, start: np.ndarray, gamma: float, spread: float, name: str):
    tol = Config.DISCOUNTED_TOL
    cap = sweep_cap(gamma, spread, tol)
    values = start.copy()
    sweeps = 0
    step = math.inf
    while sweeps < cap:
        updated = backup(values)
        sweeps += 1
        step = float(np.max(np.abs(updated - values)))
        values = updated
        if step <= tol:
            break
    residual = float(np.max(np.abs(backup(values) - values)))
    converged = residual <= tol
    if not converged:
        logger.warning("%s stopped at sweep cap %d with residual %.3g", name, cap, residual)
    logger.debug("%s (gamma=%s) ran %d sweeps, residual %.3g", name, gamma, sweeps, residual)
    return values, SolveReport(sweeps=sweeps, residual=residual, converged=converged)


def _spread(*tables: np.ndarray) -> float:
    joined = np.concatenate(tables)
    return float(joined.max() - joined.min())


def solve_reach(mdp: FiniteMdp, l):
    l = as_labels(l, mdp, "l")
    return _iterate_exact(lambda v: np.maximum(l, successor_max(mdp, v)), l, "reach")


def solve_avoid(mdp: FiniteMdp, g):
    g = as_labels(g, mdp, "g")
    return _iterate_exact(lambda v: np.minimum(g, successor_max(mdp, v)), g, "avoid")


def solve_reach_avoid(mdp: FiniteMdp, l, g):
    l = as_labels(l, mdp, "l")
    g = as_labels(g, mdp, "g")
    return _iterate_exact(
        lambda v: np.minimum(g, np.maximum(l, successor_max(mdp, v))),
        np.minimum(l, g),
        "reach-avoid",
    )


def solve_reach_gamma(mdp: FiniteMdp, l, gamma: float):
    gamma = _check_gamma(gamma)
    l = as_labels(l, mdp, "l")
    return _iterate_discounted(
        lambda v: (1 - gamma) * l + gamma * np.maximum(l, successor_max(mdp, v)),
        l, gamma, _spread(l), "reach",
    )


def solve_avoid_gamma(mdp: FiniteMdp, g, gamma: float):
    gamma = _check_gamma(gamma)
    g = as_labels(g, mdp, "g")
    return _iterate_discounted(
        lambda v: (1 - gamma) * g + gamma * np.minimum(g, successor_max(mdp, v)),
        g, gamma, _spread(g), "avoid",
    )


def solve_reach_avoid_gamma(mdp: FiniteMdp, l, g, gamma: float):
    gamma = _check_gamma(gamma)
    l = as_labels(l, mdp, "l")
    g = as_labels(g, mdp, "g")
    floor = np.minimum(l, g)
    return _iterate_discounted(
        lambda v: (1 - gamma) * floor + gamma * np.minimum(g, np.maximum(l, successor_max(mdp, v))),
        floor, gamma, _spread(l, g), "reach-avoid",
    )


def check_stochastic_policy(mdp: FiniteMdp, probs) -> np.ndarray:
    rows = np.asarray(probs, dtype=np.float64)
    if rows.shape != (mdp.num_states, mdp.num_actions):
        raise ParameterError(
            f"policy has shape {rows.shape}, expected ({mdp.num_states}, {mdp.num_actions})"
        )
    if not np.isfinite(rows).all() or (rows < 0).any():
        raise ParameterError("policy probabilities must be finite and non-negative")
    worst = float(np.max(np.abs(rows.sum(axis=1) - 1.0)))
    if worst > Config.SRABE_ROW_TOL:
        raise ParameterError(f"policy rows must sum to 1, worst deviation {worst:.3g}")
    return rows


def evaluate_srabe(mdp: FiniteMdp, probs, l_tilde, g, gamma: float) -> np.ndarray:
    """Discounted reach-avoid value of a stochastic policy (expectation over actions)."""
    gamma = _check_gamma(gamma)
    rows = check_stochastic_policy(mdp, probs)
    l_tilde = as_labels(l_tilde, mdp, "l_tilde")
    g = as_labels(g, mdp, "g")
    floor = np.minimum(l_tilde, g)

    def expected_backup(v):
        stage = np.minimum(np.maximum(v[mdp.next], l_tilde[:, None]), g[:, None])
        return (1 - gamma) * floor + gamma * (rows * stage).sum(axis=1)

    values, _ = _iterate_discounted(expected_backup, floor, gamma, _spread(l_tilde, g), "srabe")
    return values


def evaluate_policy_gamma(mdp: FiniteMdp, actions, l, g, gamma: float) -> np.ndarray:
    """Discounted reach-avoid value of a deterministic stationary policy."""
    gamma = _check_gamma(gamma)
    l = as_labels(l, mdp, "l")
    g = as_labels(g, mdp, "g")
    chosen = mdp.next[np.arange(mdp.num_states), np.asarray(actions, dtype=np.int64)]
    floor = np.minimum(l, g)
    values, _ = _iterate_discounted(
        lambda v: (1 - gamma) * floor + gamma * np.minimum(np.maximum(v[chosen], l), g),
        floor, gamma, _spread(l, g), "policy evaluation",
    )
    return values


def greedy_policy(mdp: FiniteMdp, values) -> np.ndarray:
    """argmax_u values[next[x][u]], lowest action index on ties."""
    return np.argmax(np.asarray(values)[mdp.next], axis=1)


def backup(mdp: FiniteMdp, values, kind: Objective, labels: Sequence, gamma: Optional[float] = None) -> np.ndarray:
    kind = Objective(kind)
    values = check_values(mdp, values)
    if len(labels) != len(kind.label_names):
        raise ParameterError(f"{kind.value} backup needs labels {kind.label_names}")
    tables = [as_labels(t, mdp, n) for t, n in zip(labels, kind.label_names)]
    best = successor_max(mdp, values)
    if kind is Objective.R:
        (l,) = tables
        target, stage = np.maximum(l, best), l
    elif kind is Objective.A:
        (g,) = tables
        target, stage = np.minimum(g, best), g
    elif kind is Objective.RA:
        l, g = tables
        target, stage = np.minimum(g, np.maximum(l, best)), np.minimum(l, g)
    else:
        raise ParameterError(f"no single-table backup for {kind.value}; use the compose residuals")
    if gamma is None:
        return target
    gamma = _check_gamma(gamma)
    return (1 - gamma) * stage + gamma * target


def bellman_residual(mdp: FiniteMdp, values, kind: Objective, labels: Sequence, gamma: Optional[float] = None) -> float:
    values = check_values(mdp, values)
    return float(np.max(np.abs(values - backup(mdp, values, kind, labels, gamma))))
