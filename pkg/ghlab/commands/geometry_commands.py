# ghlab/commands/geometry_commands.py
import logging

from ..exceptions import InputError
from ..models import AuditPayload, CertifiedValuePayload, EdPayload, EquilateralPayload, RunConfig
from ..services.equilateral import ed_evidence, equilateral_search
from ..services.imbalance import c_m_upper, imbalance_profile, inequality_audit, packing_profile, r_m_upper
from ..utils.helpers import to_csv, to_json
from .common import add_search_flags, banner, budget_of, guarded, int_list, load_model, require

logger = logging.getLogger(__name__)

CERT_CSV_HEADER = ["m", "value", "tag", "provenance"]
EQUILATERAL_CSV_HEADER = ["m", "success", "common_distance", "spread"]


def _equilateral_row(payload: EquilateralPayload) -> list:
    return [payload.m, payload.success, payload.common_distance, payload.spread]


@guarded
def run_equilateral(config: RunConfig) -> str:
    model = load_model(config.model, "--model")
    m = require(config.m, "--m")
    banner("🔺 Equilateral search", model=model.describe(), m=m, seed=config.seed)
    report = equilateral_search(model, m, budget_of(config), config.seed, tol=config.tol)
    if report.success:
        logger.info(f"✅ equilateral {m}-set found, common distance {report.common_distance!r}")
    else:
        logger.warning(f"⚠️ no equilateral {m}-set found (relative spread {report.relative_spread:.3e})")
    payload = EquilateralPayload.from_report(report)
    if config.format == "csv":
        return to_csv(EQUILATERAL_CSV_HEADER, [_equilateral_row(payload)])
    return to_json(payload)


@guarded
def run_ed(config: RunConfig) -> str:
    model = load_model(config.model, "--model")
    banner("🔺 Equilateral dimension evidence", model=model.describe(), cap=2 ** model.dim)
    evidence = ed_evidence(model, budget_of(config), config.seed, tol=config.tol, max_m=config.m)
    logger.info(f"✅ ed >= {evidence.lower_bound} (cap {evidence.cap})")
    payload = EdPayload.from_evidence(evidence)
    if config.format == "csv":
        return to_csv(EQUILATERAL_CSV_HEADER, [_equilateral_row(r) for r in payload.reports])
    return to_json(payload)


def _certificates_output(ms, certs, config: RunConfig, single: bool) -> str:
    payloads = [CertifiedValuePayload.from_cert(cert) for cert in certs]
    if config.format == "csv":
        return to_csv(CERT_CSV_HEADER, [[m, p.value, p.tag, p.provenance] for m, p in zip(ms, payloads)])
    return to_json(payloads[0] if single else payloads)


def _point_counts(config: RunConfig, smallest: int):
    if config.ms:
        ms = sorted(set(config.ms))
    else:
        ms = [require(config.m, "--m or --ms")]
    if ms[0] < smallest:
        raise InputError(f"point counts must be at least {smallest}, got {ms[0]}")
    return ms


@guarded
def run_imbalance(config: RunConfig) -> str:
    model = load_model(config.model, "--model")
    ms = _point_counts(config, 3)
    banner("📐 Metric imbalance", model=model.describe(), ms=ms, seed=config.seed)
    if config.ms:
        certs = imbalance_profile(model, ms, budget_of(config), config.seed)
    else:
        certs = [c_m_upper(model, ms[0], budget_of(config), config.seed)]
    for m, cert in zip(ms, certs):
        logger.info(f"✅ c_{m} <= {cert.value!r} [{cert.tag.value}]")
    return _certificates_output(ms, certs, config, single=not config.ms)


@guarded
def run_packing(config: RunConfig) -> str:
    model = load_model(config.model, "--model")
    ms = _point_counts(config, 2)
    banner("📦 Packing radius", model=model.describe(), ms=ms, seed=config.seed)
    if config.ms:
        certs = packing_profile(model, ms, budget_of(config), config.seed)
    else:
        certs = [r_m_upper(model, ms[0], budget_of(config), config.seed)]
    for m, cert in zip(ms, certs):
        logger.info(f"✅ R_{m} <= {cert.value!r} [{cert.tag.value}]")
    return _certificates_output(ms, certs, config, single=not config.ms)


@guarded
def run_audit(config: RunConfig) -> str:
    model = load_model(config.model, "--model")
    m = require(config.m, "--m")
    banner("🧾 Imbalance / packing inequality audit", model=model.describe(), m=m, seed=config.seed)
    report = inequality_audit(model, m, budget_of(config), config.seed)
    if not report.all_passed:
        logger.warning("⚠️ At least one audit check failed")
    payload = AuditPayload.from_report(report)
    if config.format == "csv":
        header = ["model", "m", "c", "c_tag", "r", "r_tag"]
        row = [payload.model, payload.m, payload.c.value, payload.c.tag, payload.r.value, payload.r.tag]
        for check in payload.checks:
            header += [f"{check.name}_passed", f"{check.name}_conclusive", f"{check.name}_margin"]
            row += [check.passed, check.conclusive, check.margin]
        return to_csv(header, [row])
    return to_json(payload)


def register(subparsers, parents) -> None:
    specs = [
        ("equilateral", run_equilateral, "search an equilateral m-set"),
        ("ed", run_ed, "lower-bound evidence for the equilateral dimension"),
        ("imbalance", run_imbalance, "upper certificate for the metric imbalance c_m"),
        ("packing", run_packing, "upper certificate for the packing radius R_m"),
        ("audit", run_audit, "check 2R_m + 1 >= c_m >= R_m - 2"),
    ]
    for name, handler, help_text in specs:
        parser = subparsers.add_parser(name, help=help_text, parents=parents)
        parser.add_argument("--model", required=True, help="normed model (JSON)")
        parser.add_argument("--m", type=int, required=name in ("equilateral", "audit"),
                            help="largest m to try" if name == "ed" else "number of points")
        if name in ("imbalance", "packing"):
            parser.add_argument("--ms", type=int_list, help="comma-separated point counts for a profile")
        if name in ("equilateral", "ed"):
            parser.add_argument("--tol", type=float, help="relative spread tolerance")
        add_search_flags(parser)
        parser.set_defaults(handler=handler)
