# ghlab/main.py
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from . import __version__
from .commands import bound_commands, geometry_commands, gh_commands
from .config import get_settings
from .exceptions import GHLabError
from .models import RunConfig
from .utils.helpers import write_output

logger = logging.getLogger("ghlab")

# Exit code for a RunConfig that fails validation
VALIDATION_EXIT = 3


def configure_logging(level: str) -> None:
    """One stderr handler on the package logger; stdout carries only reports"""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master RNG seed (GHLAB_SEED overrides)")
    common.add_argument("--format", choices=["json", "csv"], help="output format (default json)")
    common.add_argument("--out", help="output file; stdout when omitted")
    common.add_argument("--log-level", help="logging level (default from GHLAB_LOG_LEVEL)")

    parser = argparse.ArgumentParser(
        prog="ghlab",
        description="Gromov-Hausdorff distances, equilateral sets and certified bounds in normed spaces",
    )
    parser.add_argument("--version", action="version", version=f"ghlab {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    gh_commands.register(subparsers, [common])
    geometry_commands.register(subparsers, [common])
    bound_commands.register(subparsers, [common])
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    settings = get_settings()
    values = {k: v for k, v in vars(args).items() if v is not None and k not in ("handler", "log_level")}
    values.setdefault("starts", settings.starts)
    values.setdefault("iterations", settings.iterations)
    values.setdefault("node_budget", settings.node_budget)
    if settings.seed_from_env:
        if "seed" in values and values["seed"] != settings.seed:
            logger.info(f"🔧 GHLAB_SEED={settings.seed} overrides --seed {values['seed']}")
        values["seed"] = settings.seed
    return RunConfig(**values)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse, dispatch, write the report; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = get_settings()
        configure_logging(args.log_level or settings.log_level)
        config = to_run_config(args)
        text = args.handler(config)
        write_output(text, config.out)
        return 0
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"])
        print(f"ghlab: invalid arguments: {where}: {err['msg']}", file=sys.stderr)
        return VALIDATION_EXIT
    except GHLabError as e:
        print(f"ghlab: {e.detail}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        # bad --log-level
        print(f"ghlab: {e}", file=sys.stderr)
        return VALIDATION_EXIT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
