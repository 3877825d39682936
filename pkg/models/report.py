"""Check outcomes produced by the verification services."""

from enum import Enum
from typing import Any

from pydantic import Field

from models.base import BaseDomainModel


class CheckStatus(str, Enum):
    VERIFIED = "verified"
    CORRECTED = "corrected"
    FAILED = "failed"
    SKIPPED = "skipped"

    @property
    def severity(self) -> int:
        return _SEVERITY[self]

    @property
    def glyph(self) -> str:
        return _GLYPH[self]


_SEVERITY = {
    CheckStatus.SKIPPED: 0,
    CheckStatus.VERIFIED: 0,
    CheckStatus.CORRECTED: 1,
    CheckStatus.FAILED: 2,
}
_GLYPH = {
    CheckStatus.VERIFIED: "✓",
    CheckStatus.CORRECTED: "~",
    CheckStatus.FAILED: "✗",
    CheckStatus.SKIPPED: "-",
}


def worst_status(statuses) -> CheckStatus:
    """Most severe status; skipped never outranks verified."""
    worst = CheckStatus.VERIFIED
    for status in statuses:
        if status.severity > worst.severity:
            worst = status
    return worst


class CheckEntry(BaseDomainModel):
    id: str = Field(min_length=1)
    status: CheckStatus
    detail: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def of(cls, id: str, ok: bool, **detail: Any) -> "CheckEntry":
        return cls(id=id, status=CheckStatus.VERIFIED if ok else CheckStatus.FAILED, detail=detail)

    @classmethod
    def compared(cls, id: str, ok: bool, matches_printed: bool, **detail: Any) -> "CheckEntry":
        """Verified when the computation holds and agrees with the printed formula,
        corrected when it holds but the printed formula differs."""
        if not ok:
            status = CheckStatus.FAILED
        elif matches_printed:
            status = CheckStatus.VERIFIED
        else:
            status = CheckStatus.CORRECTED
        return cls(id=id, status=status, detail={**detail, "matches_printed": matches_printed})


class CheckReport(BaseDomainModel):
    name: str
    entries: tuple[CheckEntry, ...] = ()

    @property
    def status(self) -> CheckStatus:
        return worst_status(e.status for e in self.entries)

    @property
    def ok(self) -> bool:
        return all(e.status is not CheckStatus.FAILED for e in self.entries)

    def by_id(self, id: str) -> CheckEntry:
        return next(e for e in self.entries if e.id == id)

    def count(self, status: CheckStatus) -> int:
        return sum(1 for e in self.entries if e.status is status)
