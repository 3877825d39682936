"""Expressions in the abstract elementary symmetric symbols s^x_j, s^y_j and t."""

from dataclasses import dataclass
from functools import lru_cache

import sympy

from models.qpoly import QPoly


@lru_cache(maxsize=None)
def sigma_symbols(m: int) -> tuple[tuple[sympy.Symbol, ...], tuple[sympy.Symbol, ...], sympy.Symbol]:
    """(sx1..sxm, sy1..sym, t) for m points."""
    sx = tuple(sympy.Symbol(f"sx{j}") for j in range(1, m + 1))
    sy = tuple(sympy.Symbol(f"sy{j}") for j in range(1, m + 1))
    return sx, sy, sympy.Symbol("t")


@dataclass(frozen=True)
class SigmaExpr:
    m: int
    expr: sympy.Expr
    # the polynomial this expression evaluates to
    witness: QPoly

    @property
    def symbols(self) -> tuple[sympy.Symbol, ...]:
        sx, sy, t = sigma_symbols(self.m)
        return sx + sy + (t,)

    def to_string(self) -> str:
        return sympy.sstr(sympy.expand(self.expr), order="grlex")

    def __str__(self) -> str:
        return self.to_string()
