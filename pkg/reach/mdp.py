from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidMdpError, ParameterError, SizeMismatchError

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


class Objective(str, Enum):
    R = "r"
    A = "a"
    RA = "ra"
    RAA = "raa"
    RR = "rr"

    @property
    def label_names(self) -> tuple[str, ...]:
        return _LABEL_NAMES[self]


_LABEL_NAMES = {
    Objective.R: ("l",),
    Objective.A: ("g",),
    Objective.RA: ("l", "g"),
    Objective.RAA: ("l", "g"),
    Objective.RR: ("l1", "l2"),
}


@dataclass(frozen=True, eq=False)
class FiniteMdp:
    """Deterministic MDP given by a dense successor table, next[x][u]."""

    next: np.ndarray

    def __post_init__(self):
        try:
            table = np.array(self.next, dtype=np.int64)
        except (TypeError, ValueError) as e:
            raise InvalidMdpError(f"transition table is not a rectangular integer array: {e}") from e
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise InvalidMdpError(f"transition table must be (num_states, num_actions), got shape {table.shape}")
        if table.min() < 0 or table.max() >= table.shape[0]:
            raise InvalidMdpError(f"successor index out of range [0, {table.shape[0]})")
        table.setflags(write=False)
        object.__setattr__(self, "next", table)

    @property
    def num_states(self) -> int:
        return self.next.shape[0]

    @property
    def num_actions(self) -> int:
        return self.next.shape[1]

    def check_state(self, x: int) -> int:
        if not 0 <= int(x) < self.num_states:
            raise ParameterError(f"state {x} out of range [0, {self.num_states})")
        return int(x)


def as_labels(values, mdp: FiniteMdp, name: str = "label") -> np.ndarray:
    """Validate one label table against `mdp` and return it as a read-only float array."""
    table = np.array(values, dtype=np.float64)
    if table.ndim != 1 or table.shape[0] != mdp.num_states:
        raise SizeMismatchError(
            f"label {name!r} has shape {table.shape}, expected ({mdp.num_states},)"
        )
    if not np.isfinite(table).all():
        raise SizeMismatchError(f"label {name!r} contains non-finite entries")
    table.setflags(write=False)
    return table


# Running-extremum augmentation, one rule per objective.  The pair (y, z)
# always exists; single-label objectives mirror the tracked coordinate.

def initial_extrema(mode: Objective, labels: Sequence, x: int) -> tuple[float, float]:
    if mode is Objective.R:
        y = float(labels[0][x])
        return y, y
    if mode is Objective.A:
        z = float(labels[0][x])
        return z, z
    a, b = float(labels[0][x]), float(labels[1][x])
    if mode is Objective.RA:
        return min(a, b), b
    return a, b


def step_extrema(mode: Objective, labels: Sequence, y: float, z: float, x_next: int) -> tuple[float, float]:
    if mode is Objective.R:
        y = max(y, float(labels[0][x_next]))
        return y, y
    if mode is Objective.A:
        z = min(z, float(labels[0][x_next]))
        return z, z
    a, b = float(labels[0][x_next]), float(labels[1][x_next])
    if mode is Objective.RA:
        z = min(z, b)
        return max(y, min(a, z)), z
    if mode is Objective.RAA:
        return max(y, a), min(z, b)
    return max(y, a), max(z, b)


def terminal_score(mode: Objective, y: float, z: float) -> float:
    if mode in (Objective.R, Objective.RA):
        return y
    if mode is Objective.A:
        return z
    return min(y, z)


def augmented_bound(mdp: FiniteMdp, labels: Sequence) -> int:
    """Upper bound on the number of distinct augmented states of any objective."""
    distinct = np.unique(np.concatenate([np.asarray(t, dtype=np.float64) for t in labels])).size
    return mdp.num_states * distinct * distinct


@dataclass(frozen=True, eq=False)
class AugmentedMdp:
    """Product of a base MDP with sorted running-extremum value sets.

    Augmented state (x, yi, zi) is flattened row-major as (x * |Y| + yi) * |Z| + zi.
    """

    base: FiniteMdp
    y_values: np.ndarray
    z_values: np.ndarray
    mode: Objective
    next_aug: np.ndarray
    initial: np.ndarray

    @property
    def num_states(self) -> int:
        return self.next_aug.shape[0]

    def index(self, x: int, yi: int, zi: int) -> int:
        return (x * self.y_values.size + yi) * self.z_values.size + zi

    def unflatten(self, s: int) -> tuple[int, int, int]:
        rest, zi = divmod(int(s), self.z_values.size)
        x, yi = divmod(rest, self.y_values.size)
        return x, yi, zi

    def state(self, s: int) -> tuple[int, float, float]:
        x, yi, zi = self.unflatten(s)
        return x, float(self.y_values[yi]), float(self.z_values[zi])


def build_augmented(mdp: FiniteMdp, label_a, label_b, mode: Objective) -> AugmentedMdp:
    mode = Objective(mode)
    if mode not in (Objective.RAA, Objective.RR):
        raise ParameterError(f"augmented product is defined for raa and rr, not {mode.value}")
    la = as_labels(label_a, mdp, mode.label_names[0])
    lb = as_labels(label_b, mdp, mode.label_names[1])
    ys, zs = np.unique(la), np.unique(lb)
    ny, nz = ys.size, zs.size

    succ = mdp.next[:, None, None, :]
    y_next = np.maximum(ys[None, :, None, None], la[succ])
    if mode is Objective.RAA:
        z_next = np.minimum(zs[None, None, :, None], lb[succ])
    else:
        z_next = np.maximum(zs[None, None, :, None], lb[succ])
    flat = (succ * ny + np.searchsorted(ys, y_next)) * nz + np.searchsorted(zs, z_next)
    flat = np.broadcast_to(flat, (mdp.num_states, ny, nz, mdp.num_actions))
    next_aug = np.ascontiguousarray(flat.reshape(-1, mdp.num_actions))
    initial = (np.arange(mdp.num_states) * ny + np.searchsorted(ys, la)) * nz + np.searchsorted(zs, lb)
    for arr in (ys, zs, next_aug, initial):
        arr.setflags(write=False)
    logger.debug("built %s product: %d augmented states", mode.value, next_aug.shape[0])
    return AugmentedMdp(mdp, ys, zs, mode, next_aug, initial)


def reachable_augmented(aug: AugmentedMdp) -> np.ndarray:
    """Sorted flat indices of augmented states reachable from the initial states."""
    seen = np.zeros(aug.num_states, dtype=bool)
    frontier = np.unique(aug.initial)
    seen[frontier] = True
    while frontier.size:
        succ = np.unique(aug.next_aug[frontier].ravel())
        frontier = succ[~seen[succ]]
        seen[frontier] = True
    return np.flatnonzero(seen)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


def random_mdp(seed: int, num_states: int, num_actions: int, label_count: int = 2) -> tuple[FiniteMdp, list]:
    """Seeded MDP with integer labels in {-3..3}.

    Draw order: successors row-major (u64 % num_states), then each label
    table in turn ((u64 % 7) - 3).
    """
    if num_states < 1 or num_actions < 1:
        raise ParameterError("random_mdp needs at least one state and one action")
    if label_count not in (1, 2):
        raise ParameterError(f"label_count must be 1 or 2, got {label_count}")
    rng = SplitMix64(seed)
    table = [[rng.next() % num_states for _ in range(num_actions)] for _ in range(num_states)]
    mdp = FiniteMdp(table)
    labels = [
        as_labels([float(rng.next() % 7) - 3.0 for _ in range(num_states)], mdp)
        for _ in range(label_count)
    ]
    return mdp, labels


# Fixtures. Label pairs are (l, g) for the avoid-type fixtures and (l1, l2)
# for the two-target ones.

def fixture_rr_cone():
    """M=0 branches to L=1 (action a) or R=2 (action b); both return to M."""
    mdp = FiniteMdp([[1, 2], [0, 0], [0, 0]])
    return mdp, as_labels([-1, 1, -1], mdp, "l1"), as_labels([-1, -1, 1], mdp, "l2")


def fixture_raa_pinata():
    """The reward at 1 is a trap: state 1 carries the hazard forever."""
    mdp = FiniteMdp([[1, 2], [1, 1], [2, 2]])
    return mdp, as_labels([-1, 1, -1], mdp, "l"), as_labels([1, -1, 1], mdp, "g")


def fixture_raa_doomed_goal():
    mdp = FiniteMdp([[0, 1], [2, 2], [2, 2]])
    return mdp, as_labels([-1, 1, -1], mdp, "l"), as_labels([1, 1, -1], mdp, "g")


def fixture_rr_river_islands():
    """S=0 picks one island, W=1 or E=2, and both drain into the absorbing D=3."""
    mdp = FiniteMdp([[1, 2], [3, 3], [3, 3], [3, 3]])
    return mdp, as_labels([-1, 1, -1, -1], mdp, "l1"), as_labels([-1, -1, 1, -1], mdp, "l2")


FIXTURES = {
    "rr_cone": fixture_rr_cone,
    "raa_pinata": fixture_raa_pinata,
    "raa_doomed_goal": fixture_raa_doomed_goal,
}
