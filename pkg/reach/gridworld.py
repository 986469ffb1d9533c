from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .mdp import FiniteMdp, Objective, as_labels
from .policy import label_lists, trace

logger = logging.getLogger(__name__)

LEFT, STRAIGHT, RIGHT = 0, 1, 2
TASKS = ("ra", "raa", "r", "rr")
BOUNDARY_MODES = ("neutral", "hazard")


@dataclass(frozen=True)
class Box:
    x_c: float
    y_c: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ParameterError(f"box extents must be positive, got w={self.w}, h={self.h}")

    def to_list(self) -> list:
        return [self.x_c, self.y_c, self.w, self.h]


GOAL_BOX = Box(0.0, 4.5, 2.0, 1.5)
HAZARD_BOXES = (Box(-0.75, 3.0, 1.0, 1.0), Box(0.75, 3.0, 1.0, 1.0), Box(0.0, 6.0, 2.5, 1.0))
TARGET_BOXES = (Box(-1.25, 0.0, 0.5, 2.0), Box(1.25, 0.0, 0.5, 2.0))


@dataclass(frozen=True)
class GridSpec:
    task: str = "raa"
    x_range: tuple = (-2.0, 2.0)
    y_range: tuple = (-2.0, 10.0)
    cells_x: int = 80
    cells_y: int = 120
    reward_boxes: tuple = field(default=(GOAL_BOX,))
    penalty_boxes: tuple = field(default=HAZARD_BOXES)
    boundary_mode: str = "neutral"

    def __post_init__(self):
        if self.task not in TASKS:
            raise ParameterError(f"unknown grid task {self.task!r}")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ParameterError(f"unknown boundary mode {self.boundary_mode!r}")
        if self.cells_x < 1 or self.cells_y < 1:
            raise ParameterError("grid needs at least one cell per axis")
        if not (self.x_range[0] < self.x_range[1] and self.y_range[0] < self.y_range[1]):
            raise ParameterError("grid ranges must be increasing")
        if not self.reward_boxes:
            raise ParameterError(f"task {self.task} needs reward boxes")
        if self.task in ("ra", "raa") and not self.penalty_boxes:
            raise ParameterError(f"task {self.task} needs penalty boxes")
        if self.task == "rr" and len(self.reward_boxes) != 2:
            raise ParameterError("task rr needs exactly two reward boxes")

    @classmethod
    def for_task(cls, task: str, boundary_mode: str = "neutral") -> "GridSpec":
        if task in ("r", "rr"):
            return cls(task=task, reward_boxes=TARGET_BOXES, penalty_boxes=(), boundary_mode=boundary_mode)
        return cls(task=task, boundary_mode=boundary_mode)

    @property
    def objective(self) -> Objective:
        return Objective(self.task)

    @property
    def num_cells(self) -> int:
        return self.cells_x * self.cells_y

    def cell_centers(self) -> tuple:
        """World coordinates of every cell centre, flattened as j * cells_x + i."""
        dx = (self.x_range[1] - self.x_range[0]) / self.cells_x
        dy = (self.y_range[1] - self.y_range[0]) / self.cells_y
        xs = self.x_range[0] + (np.arange(self.cells_x) + 0.5) * dx
        ys = self.y_range[0] + (np.arange(self.cells_y) + 0.5) * dy
        px, py = np.meshgrid(xs, ys)
        return px.ravel(), py.ravel()

    def to_dict(self) -> dict:
        data = asdict(self)
        data["x_range"] = list(self.x_range)
        data["y_range"] = list(self.y_range)
        data["reward_boxes"] = [b.to_list() for b in self.reward_boxes]
        data["penalty_boxes"] = [b.to_list() for b in self.penalty_boxes]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        return cls(
            task=data["task"],
            x_range=tuple(data["x_range"]),
            y_range=tuple(data["y_range"]),
            cells_x=data["cells_x"],
            cells_y=data["cells_y"],
            reward_boxes=tuple(Box(*b) for b in data["reward_boxes"]),
            penalty_boxes=tuple(Box(*b) for b in data["penalty_boxes"]),
            boundary_mode=data.get("boundary_mode", "neutral"),
        )


def sdf_box(point, box: Box):
    """Signed distance to an axis-aligned box, negative inside. Broadcasts over arrays."""
    px, py = point
    dx = np.abs(np.asarray(px, dtype=np.float64) - box.x_c) - box.w / 2
    dy = np.abs(np.asarray(py, dtype=np.float64) - box.y_c) - box.h / 2
    outside = np.sqrt(np.maximum(dx, 0.0) ** 2 + np.maximum(dy, 0.0) ** 2)
    inside = np.minimum(np.maximum(dx, dy), 0.0)
    result = outside + inside
    return float(result) if result.ndim == 0 else result


def build_labels(spec: GridSpec) -> dict:
    """Label tables over the cells (no sink), keyed by interchange label name."""
    centers = spec.cell_centers()
    rewards = [-sdf_box(centers, box) for box in spec.reward_boxes]
    if spec.task == "rr":
        return {"l1": rewards[0], "l2": rewards[1]}
    labels = {"l": np.max(rewards, axis=0)}
    if spec.task in ("ra", "raa"):
        labels["g"] = np.min([sdf_box(centers, box) for box in spec.penalty_boxes], axis=0)
    return labels


def build_mdp(spec: GridSpec):
    """Upward-flow lattice: every action climbs one row; left and right also shift a column."""
    cx, cy = spec.cells_x, spec.cells_y
    sink = spec.num_cells
    i = np.tile(np.arange(cx), cy)
    j = np.repeat(np.arange(cy), cx)
    table = np.empty((sink + 1, 3), dtype=np.int64)
    for a, shift in ((LEFT, -1), (STRAIGHT, 0), (RIGHT, 1)):
        ni, nj = i + shift, j + 1
        inside = (ni >= 0) & (ni < cx) & (nj < cy)
        table[:sink, a] = np.where(inside, nj * cx + ni, sink)
    table[sink, :] = sink
    mdp = FiniteMdp(table)

    labels = {}
    for name, cells in build_labels(spec).items():
        if name == "g":
            exit_value = cells.max() if spec.boundary_mode == "neutral" else cells.min() - 1.0
        else:
            exit_value = cells.min() - 1.0
        labels[name] = as_labels(np.append(cells, exit_value), mdp, name)
    logger.info("compiled %s grid: %d states, boundary %s", spec.task, mdp.num_states, spec.boundary_mode)
    return mdp, labels


def _cell_rows(spec: GridSpec):
    px, py = spec.cell_centers()
    return px.tolist(), py.tolist()


def export_value_grid(values, spec: GridSpec, path) -> Path:
    """CSV `x,y,value` per cell, row-major (j outer, i inner), sink excluded."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] < spec.num_cells:
        raise ParameterError(f"value table has {values.shape[0]} entries for {spec.num_cells} cells")
    path = Path(path)
    xs, ys = _cell_rows(spec)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "value"])
        for k in range(spec.num_cells):
            writer.writerow([f"{xs[k]:.17g}", f"{ys[k]:.17g}", f"{values[k]:.17g}"])
    return path


def export_label_grid(labels: dict, spec: GridSpec, path) -> Path:
    names = sorted(labels)
    path = Path(path)
    xs, ys = _cell_rows(spec)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", *names])
        for k in range(spec.num_cells):
            writer.writerow([f"{xs[k]:.17g}", f"{ys[k]:.17g}", *(f"{labels[n][k]:.17g}" for n in names)])
    return path


def rollout_summary(mdp: FiniteMdp, policy, values, spec: GridSpec, max_steps: int = 0) -> list:
    """(cell, value, success) per cell; success means both tracked extrema ended positive."""
    steps = max_steps or 2 * (spec.cells_y + 2)
    nxt = mdp.next.tolist()
    tables = label_lists(mdp, policy.labels, policy.mode)
    rows = []
    for cell in range(spec.num_cells):
        traj = trace(nxt, tables, policy.mode, policy, cell, steps)
        success = traj.cycled and traj.y_trace[-1] > 0 and traj.z_trace[-1] > 0
        rows.append((cell, float(values[cell]), bool(success)))
    return rows


def export_rollout_summary(rows: Sequence, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cell", "value", "success"])
        for cell, value, success in rows:
            writer.writerow([cell, f"{value:.17g}", "true" if success else "false"])
    return path


def sign_agreement(reference, other, threshold: float = 0.05) -> float:
    """Fraction of entries with |reference| > threshold whose sign `other` shares."""
    reference = np.asarray(reference)
    other = np.asarray(other)
    mask = np.abs(reference) > threshold
    if not mask.any():
        return 1.0
    return float(np.mean(np.sign(reference[mask]) == np.sign(other[mask])))


def sup_gap(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
