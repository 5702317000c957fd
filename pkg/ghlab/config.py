# ghlab/config.py
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from .exceptions import ConfigError

load_dotenv()

# Fixed default so that runs without GHLAB_SEED are reproducible
DEFAULT_SEED = 20240611
# numpy SeedSequence entropy is a non-negative integer; seeds stay in 64 bits
MAX_SEED = 2 ** 64

DEFAULT_STARTS = 24
DEFAULT_ITERATIONS = 400
DEFAULT_NODE_BUDGET = 2_000_000

# Relative tolerance for metric validation
METRIC_RTOL = 1e-9
# Two vectors closer than this are treated as the same point
POINT_ATOL = 1e-12
# Certificates must re-evaluate to their value within this
CERT_ATOL = 1e-9

COMMANDS = [
    "gh",
    "embed",
    "equilateral",
    "ed",
    "imbalance",
    "packing",
    "audit",
    "bound",
    "sweep",
]


class Settings(BaseModel):
    """Runtime settings read from the environment (and `.env` if present)"""
    seed: int = Field(DEFAULT_SEED, ge=0, lt=MAX_SEED, description="Master RNG seed")
    seed_from_env: bool = Field(False, description="Whether GHLAB_SEED was set")
    starts: int = Field(DEFAULT_STARTS, gt=0, description="Default multistart count")
    iterations: int = Field(DEFAULT_ITERATIONS, gt=0, description="Default iterations per start")
    node_budget: int = Field(DEFAULT_NODE_BUDGET, gt=0, description="Branch-and-bound node limit")
    n_jobs: int = Field(1, description="joblib worker count for multistart batches")
    log_level: str = Field("WARNING", description="Logging level name")

    model_config = {"frozen": True}

    @field_validator("n_jobs")
    @classmethod
    def _nonzero_jobs(cls, v: int) -> int:
        # joblib: positive worker counts, or -1, -2, ... for all cores but k - 1
        if v == 0:
            raise ValueError("n_jobs must be a positive worker count or negative (all cores)")
        return v


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build settings once per process"""
    seed_raw = os.getenv("GHLAB_SEED")
    try:
        return Settings(
            seed=_env_int("GHLAB_SEED", DEFAULT_SEED),
            seed_from_env=bool(seed_raw and seed_raw.strip()),
            starts=_env_int("GHLAB_STARTS", DEFAULT_STARTS),
            iterations=_env_int("GHLAB_ITERATIONS", DEFAULT_ITERATIONS),
            node_budget=_env_int("GHLAB_NODE_BUDGET", DEFAULT_NODE_BUDGET),
            n_jobs=_env_int("GHLAB_N_JOBS", 1),
            log_level=os.getenv("GHLAB_LOG_LEVEL", "WARNING").upper(),
        )
    except ValidationError as e:
        raise ConfigError(f"Invalid environment configuration: {e.errors()[0]['msg']}")
