# ghlab/commands/bound_commands.py
import logging
from typing import Optional

from ..models import BOUND_CSV_HEADER, BoundPayload, RunConfig, SweepPayload
from ..services.certificates import CertifiedValue, Tag
from ..services.gh_bounds import EquilateralSpec, equilateral_gap_bound, infinite_distance_sweep
from ..utils.helpers import to_csv, to_json
from .common import add_search_flags, banner, budget_of, float_list, guarded, load_model, require

logger = logging.getLogger(__name__)


def _given_c(config: RunConfig) -> Optional[CertifiedValue]:
    if config.c is None:
        return None
    return CertifiedValue(value=config.c, tag=Tag(config.c_tag), provenance="supplied on the command line")


@guarded
def run_bound(config: RunConfig) -> str:
    """Lower bound on d_GH from an equilateral set of diameter d and an imbalance certificate c"""
    spec = EquilateralSpec(m=require(config.m, "--m"), d=require(config.d, "--d"))
    c = _given_c(config)
    if c is None:
        require(None, "--c")
    banner("📉 Equilateral gap bound", m=spec.m, d=spec.d, c=c.value, c_tag=c.tag.value)
    report = equilateral_gap_bound(spec, c)
    if report.valid:
        logger.info(f"✅ d_GH >= {report.bound!r}")
    payload = BoundPayload.from_report(report)
    if config.format == "csv":
        return to_csv(BOUND_CSV_HEADER, [payload.csv_row()])
    return to_json(payload)


@guarded
def run_sweep(config: RunConfig) -> str:
    """Scale an equilateral set of X by each lambda and bound d_GH(X, Y) from below"""
    x_model = load_model(config.x_model, "--x-model")
    y_model = load_model(config.y_model, "--y-model")
    m = require(config.m, "--m")
    banner("♾️ Infinite-distance sweep", x=x_model.describe(), y=y_model.describe(), m=m,
           lambdas=config.lambdas, seed=config.seed)
    result = infinite_distance_sweep(x_model, y_model, m, config.lambdas, budget_of(config),
                                     config.seed, c=_given_c(config))
    if result.diagnostic:
        logger.warning(f"⚠️ {result.diagnostic}")
    for report in result.reports:
        logger.info(f"   - lambda {report.lam:g}: bound {report.bound:.9g} (valid: {report.valid})")
    payload = SweepPayload.from_result(result)
    if config.format == "csv":
        return to_csv(BOUND_CSV_HEADER, [r.csv_row() for r in payload.reports])
    return to_json(payload)


def register(subparsers, parents) -> None:
    bound = subparsers.add_parser("bound", help="GH lower bound from an equilateral set", parents=parents)
    bound.add_argument("--m", type=int, required=True, help="size of the equilateral set")
    bound.add_argument("--d", type=float, required=True, help="its common distance")
    bound.add_argument("--c", type=float, required=True, help="imbalance value c_m of the other space")
    bound.add_argument("--c-tag", choices=[t.value for t in Tag], help="certificate tag of --c")
    bound.set_defaults(handler=run_bound)

    sweep = subparsers.add_parser("sweep", help="lambda sweep of the GH lower bound", parents=parents)
    sweep.add_argument("--x-model", required=True, help="model holding the equilateral set (JSON)")
    sweep.add_argument("--y-model", required=True, help="model whose imbalance is used (JSON)")
    sweep.add_argument("--m", type=int, required=True, help="size of the equilateral set")
    sweep.add_argument("--lambdas", type=float_list, help="comma-separated scale factors")
    sweep.add_argument("--c", type=float, help="known c_m of the y model; searched when omitted")
    sweep.add_argument("--c-tag", choices=[t.value for t in Tag], help="certificate tag of --c")
    add_search_flags(sweep)
    sweep.set_defaults(handler=run_sweep)
