import logging

from config import Txt
from helper.storage import store
from plugins import PROBLEMS, argument, on_command, require_labels
from reach.compose import compose_raa, compose_rr
from reach.mdp import Objective
from reach.policy import (
    AugmentedPolicy,
    extract_avoid_policy,
    extract_reach_avoid_policy,
    extract_reach_policy,
    realized_objective,
    simulate,
    synth_raa_augmented,
    synth_rr_augmented,
)
from reach.solvers import solve_avoid, solve_reach

logger = logging.getLogger(__name__)

OBJECTIVES = {
    "reach": Objective.R,
    "avoid": Objective.A,
    "reach-avoid": Objective.RA,
    "raa": Objective.RAA,
    "rr": Objective.RR,
}


def synthesize(mdp, problem, tables):
    """Optimal policy for `problem`; stationary for R/A/RA, augmented for RAA/RR."""
    if problem == "reach":
        values, _ = solve_reach(mdp, tables[0])
        return extract_reach_policy(mdp, tables[0], values)
    if problem == "avoid":
        values, _ = solve_avoid(mdp, tables[0])
        return extract_avoid_policy(mdp, values, tables[0])
    if problem == "reach-avoid":
        return extract_reach_avoid_policy(mdp, *tables)[0]
    if problem == "raa":
        return synth_raa_augmented(mdp, compose_raa(mdp, *tables))
    return synth_rr_augmented(mdp, compose_rr(mdp, *tables))


def policy_document(problem, policy):
    if isinstance(policy, AugmentedPolicy):
        return {"problem": problem, **policy.to_dict()}
    return {"problem": problem, "actions": policy.to_list()}


@on_command("policy", help="synthesize an optimal (augmented) policy")
@argument("--input", required=True, help="MDP JSON file")
@argument("--problem", required=True, choices=PROBLEMS)
@argument("--out", required=True, help="output JSON file")
def cmd_policy(args):
    mdp, labels = store.load_mdp(args.input)
    tables = require_labels(labels, args.problem, args.input)
    policy = synthesize(mdp, args.problem, tables)
    store.write(args.out, policy_document(args.problem, policy))
    print(Txt.POLICY_TXT.format(problem=args.problem, path=args.out))
    return 0


@on_command("simulate", help="roll out the optimal policy from one state")
@argument("--input", required=True, help="MDP JSON file")
@argument("--problem", required=True, choices=PROBLEMS)
@argument("--start", type=int, required=True)
@argument("--steps", type=int, required=True)
@argument("--out", required=True, help="output JSON file")
def cmd_simulate(args):
    mdp, labels = store.load_mdp(args.input)
    tables = require_labels(labels, args.problem, args.input)
    mdp.check_state(args.start)
    policy = synthesize(mdp, args.problem, tables)
    traj = simulate(mdp, policy, args.start, args.steps, tables, OBJECTIVES[args.problem])
    realized = realized_objective(traj) if traj.cycled else None
    if realized is None:
        logger.warning("trajectory from %d did not cycle within %d steps", args.start, args.steps)
    store.write(args.out, {"problem": args.problem, **traj.to_dict(), "realized": realized})
    print(Txt.SIMULATE_TXT.format(
        problem=args.problem, start=args.start, steps=len(traj.actions),
        cycled=traj.cycled, realized=realized, path=args.out,
    ))
    return 0
