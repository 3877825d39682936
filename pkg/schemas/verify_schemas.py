from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from config import settings

SuiteName = Literal["sigma", "g", "orders", "eta", "charts", "z", "elimination", "strata", "scrolls", "all"]

SUITES: tuple[str, ...] = ("sigma", "g", "orders", "eta", "charts", "z", "elimination", "strata", "scrolls")


# ── Verify command ───────────────────────────────────────
class VerifyRequest(BaseModel):
    suite: SuiteName
    m: Optional[int] = Field(default=None, ge=1)
    n: Optional[int] = Field(default=None, ge=1)
    j: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = Field(default=None, ge=0)
    slow: bool = False
    jobs: int = Field(default_factory=lambda: settings.jobs, ge=1, le=64)
    format: Literal["json", "text"] = "json"
    out: Optional[Path] = None
    cache: Optional[Path] = None
    timeout: Optional[float] = Field(default=None, gt=0)
    timings: bool = Field(default_factory=lambda: settings.record_timings)
    override: Optional[str] = None

    @field_validator("override")
    @classmethod
    def validate_override(cls, token: Optional[str]) -> Optional[str]:
        if token is not None and token != settings.override_token:
            raise ValueError("override token does not match the configured token")
        return token

    @model_validator(mode="after")
    def validate_bounds(self) -> "VerifyRequest":
        if self.m is not None and self.m > settings.hard_max_m and not self.overridden:
            raise ValueError(f"m={self.m} exceeds {settings.hard_max_m}; pass --override <token>")
        if self.n is not None and self.m is not None and self.n > self.m:
            raise ValueError(f"n={self.n} exceeds m={self.m}")
        return self

    @property
    def overridden(self) -> bool:
        return self.override is not None

    @property
    def suites(self) -> tuple[str, ...]:
        return SUITES if self.suite == "all" else (self.suite,)

    def params(self) -> dict:
        """Parameters as recorded in the certificate; unset values are left out."""
        return self.model_dump(include={"m", "n", "j", "k", "slow"}, exclude_none=True)
