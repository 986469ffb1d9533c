import argparse
import importlib
import json
import logging
import pkgutil
import sys

import plugins
from config import Config
from plugins import COMMANDS
from reach.errors import ReachError

logger = logging.getLogger(__name__)


class ReachCli:

    def __init__(self, plugin_root="plugins"):
        self.plugin_root = plugin_root
        for module in pkgutil.iter_modules(plugins.__path__):
            importlib.import_module(f"{plugin_root}.{module.name}")
        self.parser = self.build_parser()

    def build_parser(self):
        parser = argparse.ArgumentParser(
            prog="reachsolve",
            description="Reach, avoid, reach-avoid, reach-always-avoid and reach-reach solvers for finite deterministic MDPs.",
        )
        parser.add_argument("--log-level", default=Config.LOG_LEVEL, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
        sub = parser.add_subparsers(dest="command", required=True)
        for command in COMMANDS.values():
            child = sub.add_parser(command.name, help=command.help)
            for args, kwargs in command.arguments:
                child.add_argument(*args, **kwargs)
            child.set_defaults(handler=command.handler)
        return parser

    def run(self, argv=None):
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return 2 if e.code else 0

        logging.basicConfig(level=getattr(logging, args.log_level), format=Config.LOG_FORMAT)
        try:
            return args.handler(args)
        except (ReachError, OSError, json.JSONDecodeError) as e:
            logger.error(f"{args.command} failed: {e}")
            print(f"error: {e}", file=sys.stderr)
            return 2


if __name__ == "__main__":
    sys.exit(ReachCli().run())
