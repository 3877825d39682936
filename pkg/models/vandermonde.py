"""Mixed Van der Monde matrices, their determinants and boundary components."""

from dataclasses import dataclass

from pydantic import Field, model_validator

from models.base import BaseDomainModel
from models.qpoly import QPoly
from models.registry import VariableRegistry


@dataclass(frozen=True)
class MixedVdM:
    """Rows 1, x, ..., x^(m-i), y, ..., y^(i-1) evaluated at the points."""

    m: int
    i: int
    rows: tuple[tuple[QPoly, ...], ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def x_rows(self) -> int:
        return self.m - self.i + 1

    @property
    def y_rows(self) -> int:
        return self.i - 1


@dataclass(frozen=True)
class GElement:
    m: int
    j: int
    det_form: QPoly
    # (s^y_m)^(j-1) * v_x / t^t_power, exact
    sigma_form: QPoly
    t_power: int
    sign: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


class ThetaComponent(BaseDomainModel):
    """Special-fibre component: points in I on the x-branch, the rest on the y-branch."""

    m: int = Field(ge=1)
    index_set: tuple[int, ...] = ()

    @model_validator(mode="after")
    def indices_in_range(self) -> "ThetaComponent":
        if any(not 1 <= i <= self.m for i in self.index_set) or len(set(self.index_set)) != len(self.index_set):
            raise ValueError(f"index set {self.index_set} is not a subset of [1, {self.m}]")
        return self

    @property
    def size(self) -> int:
        return len(self.index_set)

    @property
    def a(self) -> int:
        return self.m - len(self.index_set)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.m + 1) if i not in self.index_set)

    def localized_names(self, registry: VariableRegistry) -> set[str]:
        """x_i for i in I, y_i otherwise; the free coordinates of the chart."""
        names = set()
        for point, x_name, y_name in zip(registry.points, registry.x_names, registry.y_names):
            names.add(x_name if point in self.index_set else y_name)
        return names
