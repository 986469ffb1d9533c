"""Reachability value functions, decompositions and policy synthesis on finite deterministic MDPs."""

from .errors import (
    CapExceededError,
    InvalidMdpError,
    MdpFormatError,
    NotCycledError,
    ParameterError,
    ReachError,
    ResidualCheckError,
    SizeMismatchError,
    UsageError,
)
from .mdp import AugmentedMdp, FiniteMdp, Objective, build_augmented, random_mdp
from .solvers import SolveReport

__all__ = [
    "AugmentedMdp",
    "CapExceededError",
    "FiniteMdp",
    "InvalidMdpError",
    "MdpFormatError",
    "NotCycledError",
    "Objective",
    "ParameterError",
    "ReachError",
    "ResidualCheckError",
    "SizeMismatchError",
    "SolveReport",
    "UsageError",
    "build_augmented",
    "random_mdp",
]
