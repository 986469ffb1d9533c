from pathlib import Path

from config import Txt
from helper.storage import store
from plugins import argument, on_command
from reach.mdp import FIXTURES


@on_command("fixtures", help="write the counterexample MDPs as JSON")
@argument("--out-dir", required=True)
def cmd_fixtures(args):
    out = Path(args.out_dir)
    for name, build in FIXTURES.items():
        mdp, first, second = build()
        names = ("l1", "l2") if name.startswith("rr_") else ("l", "g")
        store.save_mdp(out / f"{name}.json", mdp, dict(zip(names, (first, second))))
    print(Txt.FIXTURES_TXT.format(count=len(FIXTURES), path=out))
    return 0
