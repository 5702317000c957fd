# ghlab/commands/gh_commands.py
import logging

from ..models import EmbeddingPayload, GHResultPayload, RunConfig
from ..services.gh_bounds import embedding_gh_certificate, min_distortion_embedding
from ..services.metric_core import gh_exact
from ..utils.helpers import to_csv, to_json
from .common import add_search_flags, banner, budget_of, guarded, load_model, load_space

logger = logging.getLogger(__name__)


@guarded
def run_gh(config: RunConfig) -> str:
    """Exact Gromov-Hausdorff distance between two finite metric spaces"""
    banner("📏 Gromov-Hausdorff distance", x=config.x, y=config.y, budget=config.node_budget)
    X = load_space(config.x, "--x")
    Y = load_space(config.y, "--y")
    logger.info(f"🔍 Step 1: searching correspondences between {X.n} and {Y.n} points...")
    result = gh_exact(X, Y, budget=config.node_budget)
    status = "exact" if result.exact else "upper bound (budget exhausted)"
    logger.info(f"✅ d_GH = {result.distance!r} [{status}] after {result.nodes_explored} nodes")
    payload = GHResultPayload.from_result(result)
    if config.format == "csv":
        return to_csv(["distance", "exact", "nodes_explored"],
                      [[payload.distance, payload.exact, payload.nodes_explored]])
    return to_json(payload)


@guarded
def run_embed(config: RunConfig) -> str:
    """Minimal-distortion placement of a finite space in a normed model"""
    banner("🧭 Minimal-distortion embedding", space=config.space, model=config.model, seed=config.seed)
    X = load_space(config.space, "--space")
    model = load_model(config.model, "--model")
    logger.info(f"🔍 Step 1: searching placements of {X.n} points in {model.describe()}...")
    placement, dis = min_distortion_embedding(X, model, budget_of(config), config.seed)
    cert = embedding_gh_certificate(X, placement)
    logger.info(f"✅ distortion {dis!r}; d_GH(X, f(X)) <= {cert.value!r}")
    payload = EmbeddingPayload(distortion=dis, gh_upper=cert.value, points=placement.points.tolist())
    if config.format == "csv":
        return to_csv(["distortion", "gh_upper"], [[payload.distortion, payload.gh_upper]])
    return to_json(payload)


def register(subparsers, parents) -> None:
    gh = subparsers.add_parser("gh", help="exact GH distance between finite spaces", parents=parents)
    gh.add_argument("--x", required=True, help="first space (JSON)")
    gh.add_argument("--y", required=True, help="second space (JSON)")
    gh.add_argument("--budget", dest="node_budget", type=int, help="branch-and-bound node limit")
    gh.set_defaults(handler=run_gh)

    embed = subparsers.add_parser("embed", help="minimal-distortion embedding into a normed model",
                                   parents=parents)
    embed.add_argument("--space", required=True, help="space to embed (JSON)")
    embed.add_argument("--model", required=True, help="target model (JSON)")
    add_search_flags(embed)
    embed.set_defaults(handler=run_embed)
