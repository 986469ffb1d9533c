import logging

from config import Txt
from helper.storage import store
from plugins import PROBLEMS, argument, on_command, require_labels
from reach.compose import compose_raa, compose_rr
from reach.errors import UsageError
from reach.solvers import (
    solve_avoid,
    solve_avoid_gamma,
    solve_reach,
    solve_reach_avoid,
    solve_reach_avoid_gamma,
    solve_reach_gamma,
)

logger = logging.getLogger(__name__)

EXACT = {"reach": solve_reach, "avoid": solve_avoid, "reach-avoid": solve_reach_avoid}
DISCOUNTED = {"reach": solve_reach_gamma, "avoid": solve_avoid_gamma, "reach-avoid": solve_reach_avoid_gamma}


@on_command("solve", help="compute an optimal value table")
@argument("--input", required=True, help="MDP JSON file")
@argument("--problem", required=True, choices=PROBLEMS)
@argument("--gamma", type=float, default=None, help="discount in [0, 1); reach, avoid and reach-avoid only")
@argument("--out", required=True, help="output JSON file")
def cmd_solve(args):
    mdp, labels = store.load_mdp(args.input)
    tables = require_labels(labels, args.problem, args.input)

    if args.problem in ("raa", "rr"):
        if args.gamma is not None:
            raise UsageError(f"--gamma is not defined for {args.problem}")
        solution = compose_raa(mdp, *tables) if args.problem == "raa" else compose_rr(mdp, *tables)
        store.write(args.out, solution.to_dict())
    elif args.gamma is None:
        values, report = EXACT[args.problem](mdp, *tables)
        store.save_values(args.out, values, report)
    else:
        values, report = DISCOUNTED[args.problem](mdp, *tables, args.gamma)
        store.save_values(args.out, values, report)

    logger.info("solved %s on %d states", args.problem, mdp.num_states)
    print(Txt.SOLVE_TXT.format(problem=args.problem, path=args.out))
    return 0
