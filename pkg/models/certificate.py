"""Certificate records emitted by the verify command, plus Gröbner cache entries."""

from typing import Any

from pydantic import Field, field_validator

from models.base import BaseDomainModel
from models.report import CheckStatus

_INT64 = 2**63


def _jsonable(value: Any) -> Any:
    """Sort mapping keys and turn integers beyond 64 bits into decimal strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value if -_INT64 <= value < _INT64 else str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(value[k]) for k in sorted(value, key=str)}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, float)):
        return value
    return str(value)


class Anchor(BaseDomainModel):
    location: str = Field(min_length=1)
    quote: str = Field(min_length=1)


class CheckRecord(BaseDomainModel):
    id: str = Field(min_length=1)
    anchor: Anchor
    status: CheckStatus
    detail: dict[str, Any] = Field(default_factory=dict)
    millis: int = Field(default=0, ge=0)

    @field_validator("detail", mode="before")
    @classmethod
    def normalize_detail(cls, detail: dict[str, Any]) -> dict[str, Any]:
        return _jsonable(dict(detail))


class Certificate(BaseDomainModel):
    version: str
    suite: str
    params: dict[str, Any] = Field(default_factory=dict)
    checks: tuple[CheckRecord, ...] = ()
    environment: dict[str, Any] = Field(default_factory=dict)

    @field_validator("params", "environment", mode="before")
    @classmethod
    def normalize_mapping(cls, value: dict[str, Any]) -> dict[str, Any]:
        return _jsonable(dict(value))

    @field_validator("checks")
    @classmethod
    def ids_unique(cls, checks: tuple[CheckRecord, ...]) -> tuple[CheckRecord, ...]:
        seen: set[str] = set()
        for record in checks:
            if record.id in seen:
                raise ValueError(f"duplicate check id '{record.id}'")
            seen.add(record.id)
        return checks

    def statuses(self) -> list[CheckStatus]:
        return [record.status for record in self.checks]


# ── Cache ─────────────────────────────────────────────────
Term = tuple[tuple[int, ...], str]


class CacheEntry(BaseDomainModel):
    key: str
    engine_version: str
    order: str
    gens: tuple[str, ...]
    generators: tuple[tuple[Term, ...], ...]
    basis: tuple[tuple[Term, ...], ...]
