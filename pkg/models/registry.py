"""Named variables of the quotient rings and their frozen ordering."""

from dataclasses import dataclass
from enum import Enum

from exceptions import PreconditionError, UnknownVariable


class VariableKind(str, Enum):
    X = "x"
    Y = "y"
    T = "t"
    CHART_U = "chart-u"
    CHART_V = "chart-v"
    CHART_A = "chart-a"
    CHART_D = "chart-d"
    Z = "z-projective"
    SIGMA = "sigma-symbol"
    AUX = "auxiliary"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VariableKind
    index: int | None = None


class VariableRegistry:
    """Ordered, uniquely named variables.

    Once frozen, every variable gets a slot in the lattice key used by
    ``QPoly``: one slot per point index (exp x_i - exp y_i), one slot for the
    t-weight (sum of y exponents plus exp t), then one slot per remaining
    variable in registration order.
    """

    def __init__(self) -> None:
        self._entries: list[Variable] = []
        self._by_name: dict[str, Variable] = {}
        self._frozen = False

    @classmethod
    def for_points(
        cls,
        m: int,
        extra: tuple[tuple[str, VariableKind], ...] = (),
        *,
        x_name: str = "x{}",
        y_name: str = "y{}",
    ) -> "VariableRegistry":
        """x1..xm, y1..ym, t, then ``extra``; the result is frozen."""
        registry = cls()
        for i in range(1, m + 1):
            registry.register(x_name.format(i), VariableKind.X, i)
        for i in range(1, m + 1):
            registry.register(y_name.format(i), VariableKind.Y, i)
        registry.register("t", VariableKind.T)
        for name, kind in extra:
            registry.register(name, kind)
        return registry.freeze()

    # ── Build ───────────────────────────────────────────────
    def register(self, name: str, kind: VariableKind, index: int | None = None) -> "VariableRegistry":
        if self._frozen:
            raise PreconditionError(f"registry is frozen; cannot add '{name}'")
        if name in self._by_name:
            raise PreconditionError(f"variable '{name}' registered twice")
        variable = Variable(name, kind, index)
        self._entries.append(variable)
        self._by_name[name] = variable
        return self

    def freeze(self) -> "VariableRegistry":
        if self._frozen:
            return self
        x_idx = sorted(v.index for v in self._entries if v.kind is VariableKind.X)
        y_idx = sorted(v.index for v in self._entries if v.kind is VariableKind.Y)
        if x_idx != y_idx or len(set(x_idx)) != len(x_idx):
            raise PreconditionError(f"x indices {x_idx} and y indices {y_idx} must pair up")
        t_vars = [v for v in self._entries if v.kind is VariableKind.T]
        if len(t_vars) != 1:
            raise PreconditionError("exactly one family parameter t is required")

        self.points: tuple[int, ...] = tuple(x_idx)
        self.t_name: str = t_vars[0].name
        self.x_names: tuple[str, ...] = tuple(self._point_name(VariableKind.X, i) for i in self.points)
        self.y_names: tuple[str, ...] = tuple(self._point_name(VariableKind.Y, i) for i in self.points)
        self.aux_names: tuple[str, ...] = tuple(
            v.name for v in self._entries if v.kind not in (VariableKind.X, VariableKind.Y, VariableKind.T)
        )
        self.names: tuple[str, ...] = tuple(v.name for v in self._entries)
        self._frozen = True
        return self

    def _point_name(self, kind: VariableKind, index: int) -> str:
        return next(v.name for v in self._entries if v.kind is kind and v.index == index)

    # ── Read ────────────────────────────────────────────────
    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def entries(self) -> tuple[Variable, ...]:
        return tuple(self._entries)

    @property
    def key_length(self) -> int:
        return len(self.points) + 1 + len(self.aux_names)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def of_kind(self, kind: VariableKind) -> tuple[Variable, ...]:
        return tuple(v for v in self._entries if v.kind is kind)

    def signature(self) -> tuple[tuple[str, str, int | None], ...]:
        return tuple((v.name, v.kind.value, v.index) for v in self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VariableRegistry) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    def __repr__(self) -> str:
        return f"VariableRegistry({', '.join(self.names)})"
