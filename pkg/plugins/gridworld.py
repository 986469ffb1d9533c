import logging
import time
from pathlib import Path

from config import Config, Txt
from helper.storage import store
from helper.utils import TimeFormatter
from plugins import argument, on_command
from reach.compose import compose_raa, compose_rr
from reach.gridworld import (
    BOUNDARY_MODES,
    TASKS,
    GridSpec,
    build_mdp,
    export_label_grid,
    export_rollout_summary,
    export_value_grid,
    rollout_summary,
)
from reach.policy import synth_raa_augmented, synth_rr_augmented
from reach.solvers import solve_reach, solve_reach_avoid, solve_reach_avoid_gamma

logger = logging.getLogger(__name__)


def solve_grid(spec):
    """Compile and solve a grid task; returns the MDP, labels, value tables and policy."""
    mdp, labels = build_mdp(spec)
    values, policy = {}, None
    if spec.task == "r":
        values["r"] = solve_reach(mdp, labels["l"])[0]
    elif spec.task == "ra":
        values["ra"] = solve_reach_avoid(mdp, labels["l"], labels["g"])[0]
        values["ra_discounted"] = solve_reach_avoid_gamma(mdp, labels["l"], labels["g"], Config.GRID_GAMMA)[0]
    elif spec.task == "raa":
        raa = compose_raa(mdp, labels["l"], labels["g"])
        values["raa"] = raa.v_raa
        values["ra"] = solve_reach_avoid(mdp, labels["l"], labels["g"])[0]
        policy = synth_raa_augmented(mdp, raa)
    else:
        rr = compose_rr(mdp, labels["l1"], labels["l2"])
        values["rr"] = rr.v_rr
        policy = synth_rr_augmented(mdp, rr)
    return mdp, labels, values, policy


@on_command("gridworld", help="compile, solve and export the upward-flow grid world")
@argument("--task", choices=TASKS, default="raa")
@argument("--boundary", choices=BOUNDARY_MODES, default="neutral")
@argument("--spec", default=None, help="GridSpec JSON overriding the built-in geometry")
@argument("--out-dir", required=True)
def cmd_gridworld(args):
    started = time.perf_counter()
    spec = store.load_grid_spec(args.spec) if args.spec else GridSpec.for_task(args.task, args.boundary)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    mdp, labels, values, policy = solve_grid(spec)
    written = [
        store.save_grid_spec(out / "grid_spec.json", spec),
        store.save_mdp(out / "mdp.json", mdp, labels),
        export_label_grid(labels, spec, out / "labels.csv"),
    ]
    for name, table in values.items():
        written.append(export_value_grid(table, spec, out / f"values_{name}.csv"))
    if policy is not None:
        rows = rollout_summary(mdp, policy, values[spec.task], spec)
        written.append(export_rollout_summary(rows, out / f"rollout_{spec.task}.csv"))

    logger.info("gridworld %s finished in %s", spec.task, TimeFormatter(time.perf_counter() - started))
    print(Txt.GRID_TXT.format(task=spec.task, boundary=spec.boundary_mode, files=len(written), path=out))
    return 0
