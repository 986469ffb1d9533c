"""Subcommand handlers. Each module registers its commands with `on_command`."""
from dataclasses import dataclass, field
from typing import Callable

from config import Txt
from reach.errors import MdpFormatError

COMMANDS = {}

PROBLEMS = ("reach", "avoid", "reach-avoid", "raa", "rr")
PROBLEM_LABELS = {
    "reach": ("l",),
    "avoid": ("g",),
    "reach-avoid": ("l", "g"),
    "raa": ("l", "g"),
    "rr": ("l1", "l2"),
}


@dataclass
class Command:
    name: str
    help: str
    handler: Callable
    arguments: list = field(default_factory=list)


def argument(*args, **kwargs):
    """Attach one argparse argument to a handler; stack under `on_command`."""
    def decorator(func):
        func.__dict__.setdefault("cli_arguments", []).insert(0, (args, kwargs))
        return func
    return decorator


def on_command(name, help=""):
    def decorator(func):
        COMMANDS[name] = Command(name, help, func, func.__dict__.get("cli_arguments", []))
        return func
    return decorator


def require_labels(labels, problem, path):
    """Label tables a problem needs, in order; names the first one missing."""
    missing = [name for name in PROBLEM_LABELS[problem] if name not in labels]
    if missing:
        raise MdpFormatError(Txt.MISSING_LABEL_TXT.format(problem=problem, label=missing[0], path=path))
    return [labels[name] for name in PROBLEM_LABELS[problem]]
