"""
NodeHilb configuration.
Reads from environment variables / .env file using pydantic-settings.
"""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Central configuration: values come from NODEHILB_* env vars or a .env file."""

    # ── App ──
    app_name: str = "NodeHilb"
    engine_version: str = "1.0.0"
    debug: bool = False

    # ── Parameter bounds ──
    identity_max_m: int = Field(default=6, description="sigma, g, orders and z suites")
    express_max_m: int = 4
    express_max_degree: int = 6
    discriminant_max_m: int = 5
    eta_max_m: int = 5
    chart_max_m: int = 4
    strata_max_m: int = 6
    section_max_n: int = 5
    elimination_max_m: int = 2
    elimination_slow_max_m: int = 3
    scroll_max_n: int = 8
    polyscroll_max_m: int = 12
    restriction_max_m: int = 5
    hard_max_m: int = Field(
        default=8,
        description="Above this m every suite requires the override token",
    )
    override_token: str = "accept-expression-swell"

    # ── Execution ──
    jobs: int = Field(default=1, ge=1)
    check_timeout_seconds: float = 120.0
    slow_timeout_seconds: float = 900.0
    record_timings: bool = Field(
        default=False,
        description="Emit real durations, worker count and cache hits (breaks byte-identity)",
    )

    # ── Cache ──
    cache_dir: Path = Path(".nodehilb-cache")

    # ── Algebra guards ──
    reduction_max_steps: int = 10_000
    division_max_steps: int = 500_000
    sigma_max_depth: int = 64

    model_config = {
        "env_prefix": "NODEHILB_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
    }


settings = Settings()
