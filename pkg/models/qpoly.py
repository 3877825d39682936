"""
Canonical polynomials in Q[x_1..x_m, y_1..y_m, t, aux]/(x_i y_i - t).

The quotient is the semigroup ring of lattice points (v, h, aux) with
v_i = exp(x_i) - exp(y_i) and h = sum exp(y_i) + exp(t).  A monomial is
stored by that key, so products are key sums and two polynomials are equal
iff their term maps agree.  Canonical exponents are read back per context:

    plain index      x_i = max(v_i, 0), y_i = max(-v_i, 0)
    y_i localized    x_i = 0,           y_i = -v_i          (x_i -> t*y_i^-1)
    x_i localized    x_i = v_i,         y_i = 0             (y_i -> t*x_i^-1)
    t = h - sum y_i
"""

from __future__ import annotations

import operator
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import sympy
from sympy import QQ
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from exceptions import (
    ContextMismatch,
    NegativeExponentNotLocalized,
    PreconditionError,
    UnknownVariable,
)
from models.registry import VariableKind, VariableRegistry

Key = tuple[int, ...]

_PARSE_TRANSFORMS = standard_transformations + (convert_xor,)


def to_coefficient(value):
    """Coerce an exact scalar to a QQ element; floats are refused."""
    if isinstance(value, bool):
        raise PreconditionError("booleans are not coefficients")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, float):
        raise PreconditionError(f"floating point coefficient {value!r}")
    if isinstance(value, sympy.Basic):
        if not value.is_Rational:
            raise PreconditionError(f"non-rational coefficient {value}")
        return QQ.from_sympy(value)
    return QQ.convert(value)


class QuotientContext:
    """Frozen ambient ring: registry, localized variables and extra relations."""

    def __init__(
        self,
        registry: VariableRegistry,
        localized: Iterable[str] = (),
        relations: tuple[tuple[tuple[Key, object], ...], ...] = (),
    ) -> None:
        if not registry.frozen:
            raise PreconditionError("freeze the registry before building a context")
        localized = frozenset(localized)
        for name in localized:
            registry.get(name)
        if relations and localized:
            raise ContextMismatch("a context with extra relations cannot be localized")

        self.registry = registry
        self.localized = localized
        self.m = len(registry.points)
        self._x_loc = tuple(name in localized for name in registry.x_names)
        self._y_loc = tuple(name in localized for name in registry.y_names)
        self._t_loc = registry.t_name in localized
        self._aux_loc = tuple(name in localized for name in registry.aux_names)
        self._relations = tuple(relations)
        self._symbols: dict[str, sympy.Symbol] = {}

        point_pos = {i: p for p, i in enumerate(registry.points)}
        aux_pos = {name: k for k, name in enumerate(registry.aux_names)}
        layout = []
        for var in registry.entries:
            if var.kind is VariableKind.X:
                layout.append(("x", point_pos[var.index]))
            elif var.kind is VariableKind.Y:
                layout.append(("y", point_pos[var.index]))
            elif var.kind is VariableKind.T:
                layout.append(("t", 0))
            else:
                layout.append(("aux", aux_pos[var.name]))
        self._layout = tuple(layout)
        self._slot = dict(zip(registry.names, layout))
        self._ident = (registry.signature(), tuple(sorted(localized)), self._relations)
        self._hash = hash(self._ident)

    # ── Identity ────────────────────────────────────────────
    def __eq__(self, other: object) -> bool:
        return self is other or (isinstance(other, QuotientContext) and self._ident == other._ident)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        loc = ",".join(sorted(self.localized)) or "-"
        return f"QuotientContext(m={self.m}, localized={loc}, relations={len(self._relations)})"

    # ── Derived contexts ────────────────────────────────────
    def localize(self, names: Iterable[str]) -> QuotientContext:
        names = frozenset(names)
        if not names:
            return self
        return QuotientContext(self.registry, self.localized | names, self._relations)

    def with_relations(self, polys: Iterable[QPoly]) -> QuotientContext:
        frozen = []
        for p in polys:
            if p.ctx.registry != self.registry:
                raise ContextMismatch("relation lives over another registry")
            frozen.append(tuple(sorted(p.terms.items())))
        return QuotientContext(self.registry, self.localized, tuple(frozen))

    def without_relations(self) -> QuotientContext:
        return QuotientContext(self.registry, self.localized) if self._relations else self

    @property
    def relations(self) -> tuple[QPoly, ...]:
        base = self.without_relations()
        return tuple(QPoly(base, dict(items), check=False) for items in self._relations)

    @property
    def has_relations(self) -> bool:
        return bool(self._relations)

    # ── Keys and exponents ──────────────────────────────────
    def split(self, key: Key) -> tuple[list[int], list[int], int]:
        xs, ys, y_total = [], [], 0
        for p in range(self.m):
            v = key[p]
            if self._y_loc[p]:
                x, y = 0, -v
            elif self._x_loc[p] or v >= 0:
                x, y = v, 0
            else:
                x, y = 0, -v
            xs.append(x)
            ys.append(y)
            y_total += y
        return xs, ys, key[self.m] - y_total

    def exponents(self, key: Key) -> tuple[int, ...]:
        """Canonical exponent vector in registry order."""
        xs, ys, t = self.split(key)
        aux = key[self.m + 1:]
        out = []
        for kind, pos in self._layout:
            if kind == "x":
                out.append(xs[pos])
            elif kind == "y":
                out.append(ys[pos])
            elif kind == "t":
                out.append(t)
            else:
                out.append(aux[pos])
        return tuple(out)

    def exponent_map(self, key: Key) -> dict[str, int]:
        return {n: e for n, e in zip(self.registry.names, self.exponents(key)) if e}

    def t_exponent(self, key: Key) -> int:
        return self.split(key)[2]

    def exponent_of(self, key: Key, name: str) -> int:
        kind, pos = self._slot_of(name)
        if kind == "aux":
            return key[self.m + 1 + pos]
        xs, ys, t = self.split(key)
        return {"x": lambda: xs[pos], "y": lambda: ys[pos], "t": lambda: t}[kind]()

    def _slot_of(self, name: str) -> tuple[str, int]:
        try:
            return self._slot[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def is_valid(self, key: Key) -> bool:
        xs, ys, t = self.split(key)
        if t < 0 and not self._t_loc:
            return False
        for p in range(self.m):
            if xs[p] < 0 and not self._x_loc[p]:
                return False
            if ys[p] < 0 and not self._y_loc[p]:
                return False
        return all(e >= 0 or loc for e, loc in zip(key[self.m + 1:], self._aux_loc))

    def validate(self, key: Key) -> None:
        if self.is_valid(key):
            return
        for name, e in zip(self.registry.names, self.exponents(key)):
            if e < 0 and name not in self.localized:
                raise NegativeExponentNotLocalized(name, e)

    def key_from_exponents(self, exponents: Mapping[str, int]) -> Key:
        """Lattice key of a raw (not necessarily canonical) exponent map."""
        v = [0] * self.m
        h = 0
        aux = [0] * len(self.registry.aux_names)
        for name, e in exponents.items():
            kind, pos = self._slot_of(name)
            e = int(e)
            if e < 0 and name not in self.localized:
                raise NegativeExponentNotLocalized(name, e)
            if kind == "x":
                v[pos] += e
            elif kind == "y":
                v[pos] -= e
                h += e
            elif kind == "t":
                h += e
            else:
                aux[pos] += e
        key = tuple(v) + (h,) + tuple(aux)
        self.validate(key)
        return key

    def order_key(self, key: Key) -> tuple[int, Key]:
        """Group order used for leading terms: weight x=y=aux=1, t=2, then lex."""
        m = self.m
        return (sum(key[:m]) + 2 * key[m] + sum(key[m + 1:]), key)

    def permute_key(self, key: Key, perm: tuple[int, ...]) -> Key:
        """Move point slot p to slot perm[p]."""
        out = list(key)
        for p, q in enumerate(perm):
            out[q] = key[p]
        return tuple(out)

    @property
    def unit_key(self) -> Key:
        return (0,) * self.registry.key_length

    # ── Constructors ────────────────────────────────────────
    def const(self, value) -> QPoly:
        return QPoly(self, {self.unit_key: to_coefficient(value)}, check=False)

    @property
    def zero(self) -> QPoly:
        return QPoly(self, {}, check=False)

    @property
    def one(self) -> QPoly:
        return self.const(1)

    def var(self, name: str, power: int = 1) -> QPoly:
        return QPoly(self, {self.key_from_exponents({name: power}): QQ(1)}, check=False)

    def monomial(self, exponents: Mapping[str, int], coeff=1) -> QPoly:
        return QPoly(self, {self.key_from_exponents(exponents): to_coefficient(coeff)}, check=False)

    def x(self, i: int) -> QPoly:
        return self.var(self.registry.x_names[self.registry.points.index(i)])

    def y(self, i: int) -> QPoly:
        return self.var(self.registry.y_names[self.registry.points.index(i)])

    @property
    def t(self) -> QPoly:
        return self.var(self.registry.t_name)

    # ── sympy bridge ────────────────────────────────────────
    def symbol(self, name: str) -> sympy.Symbol:
        if name not in self._symbols:
            self.registry.get(name)
            self._symbols[name] = sympy.Symbol(name)
        return self._symbols[name]

    def symbols(self) -> tuple[sympy.Symbol, ...]:
        return tuple(self.symbol(n) for n in self.registry.names)

    def to_sympy(self, p: QPoly) -> sympy.Expr:
        total = sympy.Integer(0)
        for key, coeff in p.terms.items():
            term = QQ.to_sympy(coeff)
            for name, e in self.exponent_map(key).items():
                term *= self.symbol(name) ** e
            total += term
        return total

    def from_sympy(self, expr) -> QPoly:
        terms: dict[Key, object] = {}
        for part in sympy.Add.make_args(sympy.expand(sympy.sympify(expr))):
            coeff, rest = part.as_coeff_Mul()
            exps: dict[str, int] = {}
            for base, e in rest.as_powers_dict().items():
                if base == sympy.S.One:
                    continue
                if not isinstance(base, sympy.Symbol) or not e.is_Integer:
                    raise PreconditionError(f"not a Laurent monomial: {rest}")
                exps[base.name] = exps.get(base.name, 0) + int(e)
            key = self.key_from_exponents(exps)
            c = terms.get(key, QQ(0)) + to_coefficient(coeff)
            if c:
                terms[key] = c
            else:
                terms.pop(key, None)
        return QPoly(self, terms, check=False)

    def parse(self, text: str) -> QPoly:
        """Inverse of ``QPoly.to_string``."""
        local = {name: self.symbol(name) for name in self.registry.names}
        return self.from_sympy(parse_expr(text, local_dict=local, transformations=_PARSE_TRANSFORMS))


class QPoly:
    """Immutable polynomial in canonical form; see the module docstring."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: QuotientContext, terms: Mapping[Key, object] | None = None, *, check: bool = True):
        clean = {k: c for k, c in (terms or {}).items() if c}
        if check:
            for key in clean:
                ctx.validate(key)
        self.ctx = ctx
        self._terms = clean
        self._hash: int | None = None

    # ── Introspection ───────────────────────────────────────
    @property
    def terms(self) -> Mapping[Key, object]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Key, object]]:
        return iter(self._terms.items())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self.ctx.unit_key in self._terms)

    def constant_value(self):
        return self._terms.get(self.ctx.unit_key, QQ(0))

    def coefficient(self, exponents: Mapping[str, int]):
        return self._terms.get(self.ctx.key_from_exponents(exponents), QQ(0))

    def variables(self) -> set[str]:
        names: set[str] = set()
        for key in self._terms:
            names.update(self.ctx.exponent_map(key))
        return names

    def leading(self) -> tuple[Key, object]:
        key = max(self._terms, key=self.ctx.order_key)
        return key, self._terms[key]

    def weights(self) -> tuple[int, int]:
        w = [self.ctx.order_key(k)[0] for k in self._terms]
        return min(w), max(w)

    # ── Arithmetic ──────────────────────────────────────────
    def _coerce(self, other) -> QPoly:
        if isinstance(other, QPoly):
            if other.ctx != self.ctx:
                raise ContextMismatch()
            return other
        return self.ctx.const(other)

    def __add__(self, other) -> QPoly:
        other = self._coerce(other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            if key in terms:
                s = terms[key] + c
                if s:
                    terms[key] = s
                else:
                    del terms[key]
            else:
                terms[key] = c
        return QPoly(self.ctx, terms, check=False)

    __radd__ = __add__

    def __neg__(self) -> QPoly:
        return QPoly(self.ctx, {k: -c for k, c in self._terms.items()}, check=False)

    def __sub__(self, other) -> QPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> QPoly:
        if not isinstance(other, QPoly):
            c = to_coefficient(other)
            if not c:
                return self.ctx.zero
            return QPoly(self.ctx, {k: v * c for k, v in self._terms.items()}, check=False)
        other = self._coerce(other)
        if len(other._terms) > len(self._terms):
            small, big = self._terms, other._terms
        else:
            small, big = other._terms, self._terms
        add = operator.add
        terms: dict[Key, object] = {}
        for k1, c1 in small.items():
            for k2, c2 in big.items():
                key = tuple(map(add, k1, k2))
                c = c1 * c2
                if key in terms:
                    terms[key] += c
                else:
                    terms[key] = c
        return QPoly(self.ctx, terms, check=False)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> QPoly:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if not self.is_monomial:
                raise PreconditionError("only monomials in localized variables can be inverted")
            key, c = next(iter(self._terms.items()))
            inv = tuple(-e for e in key)
            self.ctx.validate(inv)
            return QPoly(self.ctx, {inv: 1 / c}, check=False) ** (-n)
        result, base = self.ctx.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale_key(self, key: Key, coeff=1) -> QPoly:
        """Multiply by the monomial with lattice key ``key``."""
        add = operator.add
        c = to_coefficient(coeff)
        out = QPoly(
            self.ctx,
            {tuple(map(add, k, key)): v * c for k, v in self._terms.items()},
            check=False,
        )
        for k in out._terms:
            self.ctx.validate(k)
        return out

    # ── Equality ────────────────────────────────────────────
    def __eq__(self, other) -> bool:
        if isinstance(other, QPoly):
            return self.ctx == other.ctx and self._terms == other._terms
        try:
            return self._terms == self.ctx.const(other)._terms
        except PreconditionError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self._terms.items())))
        return self._hash

    # ── Context moves ───────────────────────────────────────
    def in_context(self, ctx: QuotientContext) -> QPoly:
        if ctx.registry != self.ctx.registry:
            raise ContextMismatch("target context has another registry")
        return QPoly(ctx, self._terms, check=True)

    # ── Serialization ───────────────────────────────────────
    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        """Terms as (canonical exponents, coefficient), graded-lex descending."""
        rows = [(self.ctx.exponents(k), c) for k, c in self._terms.items()]
        rows.sort(key=lambda row: (sum(row[0]), row[0]), reverse=True)
        return rows

    def to_string(self) -> str:
        if not self._terms:
            return "0"
        names = self.ctx.registry.names
        pieces = []
        for exps, coeff in self.sorted_terms():
            factors = "*".join(f"{n}^{e}" for n, e in zip(names, exps) if e)
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = factors
            else:
                body = f"{mag}*{factors}"
            sign = "-" if coeff < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"QPoly({self.to_string()})"
