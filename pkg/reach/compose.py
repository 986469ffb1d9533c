from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .mdp import FiniteMdp, as_labels
from .solvers import SolveReport, check_values, successor_max, solve_avoid, solve_reach, solve_reach_avoid

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RaaSolution:
    l: np.ndarray
    g: np.ndarray
    v_avoid: np.ndarray
    tilde_l: np.ndarray
    v_raa: np.ndarray
    reports: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "problem": "raa",
            "v_avoid": self.v_avoid.tolist(),
            "tilde_l": self.tilde_l.tolist(),
            "v_raa": self.v_raa.tolist(),
            "reports": {k: r.to_dict() for k, r in self.reports.items()},
        }


@dataclass(frozen=True, eq=False)
class RrSolution:
    l1: np.ndarray
    l2: np.ndarray
    v_r1: np.ndarray
    v_r2: np.ndarray
    hat_l: np.ndarray
    v_rr: np.ndarray
    reports: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "problem": "rr",
            "v_r1": self.v_r1.tolist(),
            "v_r2": self.v_r2.tolist(),
            "hat_l": self.hat_l.tolist(),
            "v_rr": self.v_rr.tolist(),
            "reports": {k: r.to_dict() for k, r in self.reports.items()},
        }


def compose_raa(mdp: FiniteMdp, l, g) -> RaaSolution:
    """Reach-always-avoid value: avoid solve, clip the reward by it, then reach-avoid."""
    l = as_labels(l, mdp, "l")
    g = as_labels(g, mdp, "g")
    v_avoid, avoid_report = solve_avoid(mdp, g)
    tilde_l = np.minimum(l, v_avoid)
    v_raa, ra_report = solve_reach_avoid(mdp, tilde_l, g)
    logger.debug(
        "compose_raa: avoid %d sweeps, reach-avoid %d sweeps",
        avoid_report.sweeps, ra_report.sweeps,
    )
    return RaaSolution(l, g, v_avoid, tilde_l, v_raa, {"avoid": avoid_report, "reach_avoid": ra_report})


def compose_rr(mdp: FiniteMdp, l1, l2) -> RrSolution:
    """Reach-reach value: reach each target, build the frontier reward, reach it."""
    l1 = as_labels(l1, mdp, "l1")
    l2 = as_labels(l2, mdp, "l2")
    v_r1, r1_report = solve_reach(mdp, l1)
    v_r2, r2_report = solve_reach(mdp, l2)
    hat_l = np.maximum(np.minimum(l1, v_r2), np.minimum(l2, v_r1))
    v_rr, rr_report = solve_reach(mdp, hat_l)
    return RrSolution(
        l1, l2, v_r1, v_r2, hat_l, v_rr,
        {"reach_1": r1_report, "reach_2": r2_report, "reach_composed": rr_report},
    )


def raa_bellman_residual(mdp: FiniteMdp, tilde_l, g, values) -> float:
    tilde_l = as_labels(tilde_l, mdp, "tilde_l")
    g = as_labels(g, mdp, "g")
    values = check_values(mdp, values)
    target = np.minimum(g, np.maximum(tilde_l, successor_max(mdp, values)))
    return float(np.max(np.abs(values - target)))


def raa_direct_residual(mdp: FiniteMdp, l, g, v_avoid, values) -> float:
    """Joint residual of V_A = min{g, max_u V_A(f)} and V = min{g, max{min{l, V_A}, max_u V(f)}}.

    Unlike `raa_bellman_residual` the clipped reward is not taken as given:
    a stale avoid table shows up here even when V is consistent with it.
    """
    l = as_labels(l, mdp, "l")
    g = as_labels(g, mdp, "g")
    v_avoid = check_values(mdp, v_avoid)
    values = check_values(mdp, values)
    avoid_gap = np.abs(v_avoid - np.minimum(g, successor_max(mdp, v_avoid)))
    raa_gap = np.abs(values - np.minimum(g, np.maximum(np.minimum(l, v_avoid), successor_max(mdp, values))))
    return float(max(avoid_gap.max(), raa_gap.max()))


def rr_bellman_residual(mdp: FiniteMdp, hat_l, values) -> float:
    hat_l = as_labels(hat_l, mdp, "hat_l")
    values = check_values(mdp, values)
    return float(np.max(np.abs(values - np.maximum(hat_l, successor_max(mdp, values)))))


def check_raa(mdp: FiniteMdp, raa: RaaSolution) -> bool:
    return (
        np.array_equal(raa.tilde_l, np.minimum(raa.l, raa.v_avoid))
        and raa_bellman_residual(mdp, raa.tilde_l, raa.g, raa.v_raa) == 0.0
    )


def check_rr(mdp: FiniteMdp, rr: RrSolution) -> bool:
    hat_l = np.maximum(np.minimum(rr.l1, rr.v_r2), np.minimum(rr.l2, rr.v_r1))
    return np.array_equal(rr.hat_l, hat_l) and rr_bellman_residual(mdp, rr.hat_l, rr.v_rr) == 0.0
