"""Discounted backups and the reach-avoid advantage estimators built on them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterError

BASELINES = ("segment_start", "segment_end")


@dataclass(frozen=True)
class AdvantageConfig:
    gamma: float
    lam: float
    baseline_at: str = "segment_start"

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ParameterError(f"gamma must lie in [0, 1), got {self.gamma}")
        if not 0.0 <= self.lam < 1.0:
            raise ParameterError(f"lambda must lie in [0, 1), got {self.lam}")
        if self.baseline_at not in BASELINES:
            raise ParameterError(f"baseline_at must be one of {BASELINES}, got {self.baseline_at!r}")


def backup_r(lx: float, q: float, gamma: float) -> float:
    return (1 - gamma) * lx + gamma * max(lx, q)


def backup_a(gx: float, q: float, gamma: float) -> float:
    return (1 - gamma) * gx + gamma * min(gx, q)


def backup_ra(lx: float, gx: float, q: float, gamma: float) -> float:
    return (1 - gamma) * min(lx, gx) + gamma * min(gx, max(lx, q))


def phi_ra(args: Sequence[float], gamma: float) -> float:
    """Fold (l_1, g_1, ..., l_n, g_n, tail) right to left through backup_ra."""
    if len(args) < 3 or len(args) % 2 == 0:
        raise ParameterError(f"phi_ra takes n stage pairs plus a tail (odd length >= 3), got {len(args)}")
    acc = args[-1]
    for k in range(len(args) - 3, -1, -2):
        acc = backup_ra(args[k], args[k + 1], acc, gamma)
    return acc


def phi_r(args: Sequence[float], gamma: float) -> float:
    """Fold (l_1, ..., l_n, tail) through backup_r."""
    if len(args) < 2:
        raise ParameterError("phi_r takes at least one stage value and a tail")
    acc = args[-1]
    for lx in reversed(args[:-1]):
        acc = backup_r(lx, acc, gamma)
    return acc


def phi_a(args: Sequence[float], gamma: float) -> float:
    if len(args) < 2:
        raise ParameterError("phi_a takes at least one stage value and a tail")
    acc = args[-1]
    for gx in reversed(args[:-1]):
        acc = backup_a(gx, acc, gamma)
    return acc


def _segment(states: Sequence[int], start: int, k: int) -> Sequence[int]:
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    if start < 0 or len(states) - start < k + 1:
        raise ParameterError(f"segment from {start} has {len(states) - start} states, needs {k + 1}")
    return states[start:start + k + 1]


def k_step_advantage(traj, values, k: int, config: AdvantageConfig, l, g, start: int = 0) -> float:
    """k-step reach-avoid advantage of the segment of `traj` beginning at `start`."""
    seg = _segment(traj.states, start, k)
    args = []
    for x in seg[:-1]:
        args.extend((float(l[x]), float(g[x])))
    args.append(float(values[seg[-1]]))
    baseline = values[seg[0]] if config.baseline_at == "segment_start" else values[seg[-1]]
    return phi_ra(args, config.gamma) - float(baseline)


def gae(traj, values, config: AdvantageConfig, horizon: int, l, g, start: int = 0) -> float:
    """Truncated lambda-weighted sum (1/(1-lam)) * sum_{k=1..horizon} lam^k A^(k)."""
    if horizon < 1:
        raise ParameterError(f"horizon must be at least 1, got {horizon}")
    _segment(traj.states, start, horizon)
    total = 0.0
    for k in range(1, horizon + 1):
        total += config.lam ** k * k_step_advantage(traj, values, k, config, l, g, start)
    return total / (1 - config.lam)
