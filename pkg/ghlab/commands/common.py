# ghlab/commands/common.py
import argparse
import functools
import logging

from ..exceptions import GHLabError, InputError, ParseError
from ..models import ModelFile, RunConfig, SpaceFile
from ..services.metric_core import FiniteMetricSpace
from ..services.normed_models import NormedModel
from ..services.optimizer import SearchBudget
from ..utils.helpers import load_json_file

logger = logging.getLogger(__name__)


def banner(title: str, **details) -> None:
    logger.info("=" * 60)
    logger.info(title)
    for key, value in details.items():
        logger.info(f"   - {key}: {value}")
    logger.info("=" * 60)


def require(value, flag: str):
    if value is None:
        raise InputError(f"{flag} is required for this command")
    return value


def load_space(path: str, flag: str) -> FiniteMetricSpace:
    spec = load_json_file(require(path, flag), SpaceFile)
    return spec.to_space()


def load_model(path: str, flag: str) -> NormedModel:
    spec = load_json_file(require(path, flag), ModelFile)
    try:
        return spec.to_model()
    except ParseError as e:
        raise ParseError(e.detail, location=f"{path}:functionals")


def budget_of(config: RunConfig) -> SearchBudget:
    return SearchBudget(starts=config.starts, iterations=config.iterations)


def add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--starts", type=int, help="random starts per search")
    parser.add_argument("--iterations", type=int, help="iterations per start")


def guarded(handler):
    """Let GHLabError through untouched; anything else becomes an exit-1 GHLabError"""
    @functools.wraps(handler)
    def wrapper(config: RunConfig) -> str:
        try:
            return handler(config)
        except GHLabError:
            raise
        except Exception as e:
            logger.error(f"❌ Error in {config.command}: {e}", exc_info=True)
            raise GHLabError(f"{config.command} failed: {e}")
    return wrapper


def int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
