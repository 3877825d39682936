"""Chart presentations of the local model and descriptions of its special fibres."""

from dataclasses import dataclass, field
from typing import Literal, Optional

from pydantic import Field

from models.base import BaseDomainModel
from models.qpoly import QPoly, QuotientContext


@dataclass(frozen=True)
class UniversalGenerators:
    """F_0..F_m over the ring with all chart coordinates."""

    m: int
    ctx: QuotientContext
    polys: tuple[QPoly, ...]

    def __getitem__(self, i: int) -> QPoly:
        return self.polys[i]


@dataclass(frozen=True)
class ChartPresentation:
    m: int
    i: int
    # context carrying the chart H-ideal as extra relations
    ctx: QuotientContext
    substitution: dict[str, int] = field(hash=False, compare=False)
    free_variables: tuple[str, ...]
    h_relations: tuple[QPoly, ...]
    f_low: QPoly
    f_high: QPoly

    @property
    def x_cap(self) -> int:
        return self.m - self.i

    @property
    def y_cap(self) -> int:
        return self.i - 1

    @property
    def cobasis_labels(self) -> tuple[str, ...]:
        xs = ["1"] + [f"x^{e}" for e in range(1, self.x_cap + 1)]
        return tuple(xs + [f"y^{e}" for e in range(1, self.y_cap + 1)])

    @property
    def cobasis(self) -> tuple[QPoly, ...]:
        x, y = self.ctx.registry.x_names[0], self.ctx.registry.y_names[0]
        xs = [self.ctx.var(x, e) if e else self.ctx.one for e in range(self.x_cap + 1)]
        return tuple(xs + [self.ctx.var(y, e) for e in range(1, self.y_cap + 1)])


@dataclass(frozen=True)
class MultiplicationPair:
    m: int
    i: int
    m_x: tuple[tuple[QPoly, ...], ...]
    m_y: tuple[tuple[QPoly, ...], ...]


# ── Fibres of the cycle map ───────────────────────────────
class FiberComponent(BaseDomainModel):
    """C^m_index with both readings of its node-scroll equations."""

    index: int = Field(ge=1)
    # v_1..v_(j+b) = 0, u_(j+b+1).. = 0 as printed: pins the corner point below
    printed_equations: tuple[str, ...]
    printed_point: int
    # v_1..v_(j+b-1) = 0, u_(j+b+1).. = 0: [u_index : v_index] stays free
    component_equations: tuple[str, ...]
    endpoints: tuple[int, int]


class FiberDescription(BaseDomainModel):
    m: int = Field(ge=1)
    a: int = Field(ge=0)
    b: int = Field(ge=0)
    kind: Literal["chain", "point"]
    vanishing: tuple[str, ...] = ()
    components: tuple[FiberComponent, ...] = ()
    point: Optional[int] = None
    index_flag: Optional[str] = None


class LengthCertificate(BaseDomainModel):
    m: int
    i: int
    point: tuple[str, str]
    kind: Literal["principal", "[0,1]", "[1,0]"]
    ideal: tuple[str, ...]
    basis: tuple[str, ...]
    standard_monomials: tuple[str, ...]
    length: int

    @property
    def ok(self) -> bool:
        return self.length == self.m
