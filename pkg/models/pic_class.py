"""Formal divisor classes over a fixed symbol basis and node-scroll descriptors."""

import re
from typing import Literal

from pydantic import Field, field_validator

from exceptions import ContextMismatch
from models.base import BaseDomainModel

PSI_X = "psi_x"
PSI_Y = "psi_y"
NM_X = "Nm_x"
NM_Y = "Nm_y"
BOUNDARY = "boundary"
D_THETA_1 = "Dtheta'"
D_THETA_2 = "Dtheta''"

_FIXED = (PSI_X, PSI_Y, NM_X, NM_Y)
_TAIL = (BOUNDARY, D_THETA_1, D_THETA_2)
_GAMMA = re.compile(r"^Gamma<(\d+)>$")
_SWAP = {PSI_X: PSI_Y, PSI_Y: PSI_X, NM_X: NM_Y, NM_Y: NM_X, D_THETA_1: D_THETA_2, D_THETA_2: D_THETA_1}


def gamma(k: int) -> str:
    """Symbol of the discriminant polarization Gamma<k>."""
    if k < 0:
        raise ValueError(f"Gamma<{k}> needs k >= 0")
    return f"Gamma<{k}>"


def _rank(symbol: str) -> tuple[int, int]:
    if symbol in _FIXED:
        return (0, _FIXED.index(symbol))
    match = _GAMMA.match(symbol)
    if match:
        return (1, int(match.group(1)))
    return (2, _TAIL.index(symbol))


class ClassContext(BaseDomainModel):
    """Stratum a class lives on: total length m, node multiplicities n, indices j, free points k."""

    k: int = Field(ge=0)
    m: int | None = None
    n: tuple[int, ...] = ()
    j: tuple[int, ...] = ()

    def join(self, other: "ClassContext") -> "ClassContext":
        """Common context of two operands; fields they disagree on are forgotten."""
        if self.k != other.k:
            raise ContextMismatch(f"classes over k={self.k} and k={other.k} cannot be combined")
        if self == other:
            return self
        return ClassContext(
            k=self.k,
            m=self.m if self.m == other.m else None,
            n=self.n if self.n == other.n else (),
            j=self.j if self.j == other.j else (),
        )

    def swapped(self) -> "ClassContext":
        # branch swap sends D^n_j to D^n_(n+1-j)
        if len(self.n) == 1 and len(self.j) == 1:
            return self.model_copy(update={"j": (self.n[0] + 1 - self.j[0],)})
        return self


def _joined(a: ClassContext | None, b: ClassContext | None) -> ClassContext | None:
    if a is None or b is None:
        return a or b
    return a.join(b)


class PicClass(BaseDomainModel):
    """Integer combination of basis symbols; no relations are imposed among them.

    A class without a context combines with any other; two contexts must agree on k."""

    coeffs: dict[str, int] = Field(default_factory=dict)
    context: ClassContext | None = None

    @field_validator("coeffs")
    @classmethod
    def known_symbols(cls, value: dict[str, int]) -> dict[str, int]:
        for symbol in value:
            if symbol not in _FIXED and symbol not in _TAIL and not _GAMMA.match(symbol):
                raise ValueError(f"'{symbol}' is not a basis symbol")
        return {s: c for s, c in sorted(value.items(), key=lambda item: _rank(item[0])) if c}

    @classmethod
    def of(cls, **coeffs: int) -> "PicClass":
        return cls(coeffs=coeffs)

    @classmethod
    def symbol(cls, name: str, coeff: int = 1) -> "PicClass":
        return cls(coeffs={name: coeff})

    def within(self, context: ClassContext | None) -> "PicClass":
        return self.model_copy(update={"context": context})

    # ── Arithmetic ──────────────────────────────────────────
    def __add__(self, other: "PicClass") -> "PicClass":
        context = _joined(self.context, other.context)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return PicClass(coeffs=out, context=context)

    def __neg__(self) -> "PicClass":
        return PicClass(coeffs={s: -c for s, c in self.coeffs.items()}, context=self.context)

    def __sub__(self, other: "PicClass") -> "PicClass":
        return self + (-other)

    def __mul__(self, k: int) -> "PicClass":
        return PicClass(coeffs={s: k * c for s, c in self.coeffs.items()}, context=self.context)

    __rmul__ = __mul__

    # ── Queries and maps ────────────────────────────────────
    def coefficient(self, symbol: str) -> int:
        return self.coeffs.get(symbol, 0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def same_coefficients(self, other: "PicClass") -> bool:
        """Equality of coefficient vectors, ignoring contexts."""
        return self.coeffs == other.coeffs

    def truncate(self, *symbols: str) -> "PicClass":
        """Set the given symbols to zero."""
        return PicClass(coeffs={s: c for s, c in self.coeffs.items() if s not in symbols}, context=self.context)

    def substitute(self, images: dict[str, "PicClass"]) -> "PicClass":
        total = PicClass(context=self.context)
        for s, c in self.coeffs.items():
            total = total + (images[s] * c if s in images else PicClass.symbol(s, c))
        return total

    def swap(self) -> "PicClass":
        context = self.context.swapped() if self.context else None
        return PicClass(coeffs={_SWAP.get(s, s): c for s, c in self.coeffs.items()}, context=context)

    def to_string(self) -> str:
        if not self.coeffs:
            return "0"
        text = ""
        for s, c in self.coeffs.items():
            body = s if abs(c) == 1 else f"{abs(c)}*{s}"
            if not text:
                text = ("-" if c < 0 else "") + body
            else:
                text += f" {'-' if c < 0 else '+'} {body}"
        return text

    def __str__(self) -> str:
        return self.to_string()


class SectionIdentity(BaseDomainModel):
    """polarization = section + pullback of a summand, kept as a formal record."""

    polarization: PicClass
    section: str
    pullback: PicClass

    def to_string(self) -> str:
        return f"{self.polarization} = {self.section} + pullback({self.pullback})"


class ScrollDescriptor(BaseDomainModel):
    """P(D^n_j + D^n_(j+1)) over the node stratum with its polarization and sections."""

    n: int = Field(ge=2)
    j: int = Field(ge=1)
    k: int = Field(ge=0)
    m: int = Field(ge=2)
    summands: tuple[PicClass, PicClass]
    sections: tuple[str, str]
    polarization: PicClass
    form: Literal["standard", "dual"] = "standard"

    @property
    def section_difference(self) -> PicClass:
        """Class of sections[0] - sections[1]; by the two section identities it equals summands[0] - summands[1]."""
        return self.summands[0] - self.summands[1]

    def identities(self) -> tuple[SectionIdentity, SectionIdentity]:
        first, second = self.sections
        return (
            SectionIdentity(polarization=self.polarization, section=first, pullback=self.summands[1]),
            SectionIdentity(polarization=self.polarization, section=second, pullback=self.summands[0]),
        )

    def twisted(self, c: PicClass) -> "ScrollDescriptor":
        """Same scroll with both summands twisted by c."""
        return self.model_copy(update={"summands": (self.summands[0] + c, self.summands[1] + c), "polarization": self.polarization + c})


class PolyscrollResult(BaseDomainModel):
    m: int
    context: ClassContext
    descriptors: tuple[ScrollDescriptor, ...]
    polarization: PicClass
    expected: PicClass

    @property
    def telescopes(self) -> bool:
        return self.polarization == self.expected
