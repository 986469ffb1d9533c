import logging
import time

from config import Txt
from helper.utils import TimeFormatter, trials_table
from plugins import argument, on_command
from reach.errors import UsageError
from reach.oracle import run_battery

logger = logging.getLogger(__name__)


@on_command("verify", help="check decompositions and policies against the brute-force oracle")
@argument("--trials", type=int, default=1000)
@argument("--max-states", type=int, default=6)
@argument("--max-actions", type=int, default=3)
@argument("--seed", type=int, default=7)
@argument("--corrupt", action="store_true", help="debug: perturb one composed value per trial")
def cmd_verify(args):
    if args.trials < 1 or args.max_states < 1 or args.max_actions < 1:
        raise UsageError("--trials, --max-states and --max-actions must be positive")
    started = time.perf_counter()
    records = run_battery(args.trials, args.max_states, args.max_actions, args.seed, args.corrupt)
    logger.info("verify ran %d trials in %s", args.trials, TimeFormatter(time.perf_counter() - started))

    print(trials_table(records, Txt.VERIFY_HEADERS))
    failed = [r for r in records if not r.ok]
    if failed:
        print(Txt.VERIFY_FAIL_TXT.format(failed=len(failed), trials=len(records), first=failed[0].index))
        return 1
    print(Txt.VERIFY_OK_TXT.format(trials=len(records)))
    return 0
