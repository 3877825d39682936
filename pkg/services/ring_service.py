"""Ring service: arithmetic, division, substitution and determinants in the quotient ring."""

import logging
import operator
from functools import lru_cache, reduce
from typing import Iterable, Mapping, Sequence

from sympy import QQ

from config import settings
from exceptions import (
    ContextMismatch,
    NonSquare,
    NotDivisible,
    PreconditionError,
    ReductionDiverged,
    RelationViolated,
    ZeroPolynomial,
)
from models.qpoly import QPoly, QuotientContext, to_coefficient
from models.registry import VariableKind, VariableRegistry

logger = logging.getLogger("nodehilb.services.ring")

Matrix = Sequence[Sequence[QPoly]]


class RingService:
    def __init__(self, groebner=None) -> None:
        # relation contexts need Gröbner normal forms; imported lazily to keep
        # the plain ring usable without a cache
        self._groebner = groebner

    @property
    def groebner(self):
        if self._groebner is None:
            from services.groebner_service import GroebnerService

            self._groebner = GroebnerService()
        return self._groebner

    # ── Construction ────────────────────────────────────────
    def normalize(self, raw_terms: Iterable[tuple[Mapping[str, int], object]], ctx: QuotientContext) -> QPoly:
        """Canonical form of sum(coeff * prod(var^e)) for raw exponent maps."""
        total = ctx.zero
        for exponents, coeff in raw_terms:
            total = total + ctx.monomial(exponents, coeff)
        if ctx.has_relations:
            total = self.reduce_modulo(total)
        return total

    def arith(self, op: str, *operands: QPoly) -> QPoly:
        if not operands:
            raise PreconditionError("arith needs at least one operand")
        ctx = operands[0].ctx
        if any(p.ctx != ctx for p in operands):
            raise ContextMismatch()
        if op == "add":
            return reduce(operator.add, operands)
        if op == "mul":
            return reduce(operator.mul, operands)
        if op == "neg":
            (p,) = operands
            return -p
        if op == "pow":
            p, exponent = operands
            if not exponent.is_constant:
                raise PreconditionError("exponent must be a constant")
            value = exponent.constant_value()
            if value.denominator != 1:
                raise PreconditionError("exponent must be an integer")
            return p ** int(value.numerator)
        raise PreconditionError(f"unknown ring operation '{op}'")

    # ── Division ────────────────────────────────────────────
    def exact_div(self, p: QPoly, q: QPoly) -> QPoly:
        """r with r*q = p; NotDivisible carries the remainder of the long division."""
        if p.ctx != q.ctx:
            raise ContextMismatch()
        if q.is_zero:
            raise ZeroPolynomial("division by the zero polynomial")
        if p.is_zero:
            return p
        if q.is_monomial:
            return self._divide_by_monomial(p, q)

        ctx = p.ctx
        order = ctx.order_key
        q_key, q_coeff = q.leading()
        floor = p.weights()[0] - q.weights()[0]
        quotient: dict = {}
        remainder = ctx.zero
        rest = p
        steps = 0
        while not rest.is_zero:
            steps += 1
            if steps > settings.division_max_steps:
                raise ReductionDiverged(steps)
            key, coeff = rest.leading()
            shift = tuple(map(operator.sub, key, q_key))
            if order(shift)[0] < floor:
                remainder = remainder + rest
                break
            if not ctx.is_valid(shift):
                lead = QPoly(ctx, {key: coeff}, check=False)
                remainder = remainder + lead
                rest = rest - lead
                continue
            c = coeff / q_coeff
            quotient[shift] = quotient.get(shift, QQ(0)) + c
            rest = rest - q.scale_key(shift, c)
        if not remainder.is_zero:
            raise NotDivisible(p.to_string(), q.to_string(), remainder.to_string())
        return QPoly(ctx, quotient, check=False)

    def _divide_by_monomial(self, p: QPoly, q: QPoly) -> QPoly:
        ctx = p.ctx
        q_key, q_coeff = q.leading()
        quotient, leftover = {}, {}
        for key, coeff in p:
            shift = tuple(map(operator.sub, key, q_key))
            if ctx.is_valid(shift):
                quotient[shift] = coeff / q_coeff
            else:
                leftover[key] = coeff
        if leftover:
            witness = QPoly(ctx, leftover, check=False)
            raise NotDivisible(p.to_string(), q.to_string(), witness.to_string())
        return QPoly(ctx, quotient, check=False)

    def divides(self, q: QPoly, p: QPoly) -> bool:
        try:
            self.exact_div(p, q)
        except NotDivisible:
            return False
        return True

    # ── Substitution ────────────────────────────────────────
    def substitute(
        self,
        p: QPoly,
        assignment: Mapping[str, object],
        target: QuotientContext | None = None,
    ) -> QPoly:
        """Homomorphic image of p under a partial variable assignment.

        Unassigned variables map to themselves in ``target`` (default: the
        context of the assigned values, else p's own context).
        """
        if target is None:
            target = next((v.ctx for v in assignment.values() if isinstance(v, QPoly)), p.ctx)
        images: dict[str, QPoly] = {}
        for name, value in assignment.items():
            p.ctx.registry.get(name)
            image = value if isinstance(value, QPoly) else target.const(value)
            if image.ctx != target:
                raise ContextMismatch(f"image of '{name}' lives in another context")
            images[name] = image
        self._check_relations(p.ctx, images, target)

        powers: dict[tuple[str, int], QPoly] = {}

        def power(name: str, e: int) -> QPoly:
            if (name, e) not in powers:
                base = images[name] if name in images else target.var(name)
                powers[(name, e)] = base ** e
            return powers[(name, e)]

        total = target.zero
        for key, coeff in p:
            term = target.const(1) * coeff
            for name, e in p.ctx.exponent_map(key).items():
                term = term * power(name, e)
                if term.is_zero:
                    break
            total = total + term
        if target.has_relations:
            total = self.reduce_modulo(total)
        return total

    def _check_relations(self, ctx: QuotientContext, images: dict[str, QPoly], target: QuotientContext) -> None:
        registry = ctx.registry
        t_image = images.get(registry.t_name)
        for index, x_name, y_name in zip(registry.points, registry.x_names, registry.y_names):
            if x_name not in images or y_name not in images:
                continue
            if t_image is None:
                t_image = target.var(registry.t_name)
            product = images[x_name] * images[y_name]
            if product != t_image:
                raise RelationViolated(index, product.to_string(), t_image.to_string())

    # ── Localization ────────────────────────────────────────
    def localize(self, ctx: QuotientContext, names: Iterable[str]) -> QuotientContext:
        localized = ctx.localize(names)
        if localized is not ctx:
            logger.debug("Localized %s at %s", ctx, sorted(localized.localized - ctx.localized))
        return localized

    # ── Orders ──────────────────────────────────────────────
    def t_adic_order(self, p: QPoly, parameter: str | None = None) -> int:
        """Minimal exponent of t (or an auxiliary parameter) over the canonical terms."""
        if p.is_zero:
            raise ZeroPolynomial()
        ctx = p.ctx
        name = parameter or ctx.registry.t_name
        kind = ctx.registry.get(name).kind
        if kind in (VariableKind.X, VariableKind.Y):
            raise PreconditionError(f"'{name}' is a point coordinate, not a family parameter")
        if kind is VariableKind.T:
            return min(ctx.t_exponent(key) for key, _ in p)
        return min(ctx.exponent_of(key, name) for key, _ in p)

    # ── Relation contexts ───────────────────────────────────
    def reduce_modulo(self, p: QPoly) -> QPoly:
        """Normal form modulo the context's extra relations (identity otherwise)."""
        if not p.ctx.has_relations or p.is_zero:
            return p
        return self.groebner.normal_form(p)

    def equal_modulo(self, p: QPoly, q: QPoly) -> bool:
        return self.reduce_modulo(p - q).is_zero

    # ── Determinants ────────────────────────────────────────
    def det_cofactor(self, matrix: Matrix) -> QPoly:
        """Laplace expansion along rows, memoized on the remaining column set."""
        ctx = self._check_square(matrix)
        n = len(matrix)
        memo: dict[tuple[int, ...], QPoly] = {}

        def minor(row: int, cols: tuple[int, ...]) -> QPoly:
            if row == n:
                return ctx.one
            if cols in memo:
                return memo[cols]
            total = ctx.zero
            for pos, col in enumerate(cols):
                entry = matrix[row][col]
                if entry.is_zero:
                    continue
                term = entry * minor(row + 1, cols[:pos] + cols[pos + 1:])
                total = total - term if pos % 2 else total + term
            memo[cols] = total
            return total

        return minor(0, tuple(range(n)))

    def det_bareiss(self, matrix: Matrix) -> QPoly:
        """Fraction-free elimination; every division is exact in the domain."""
        ctx = self._check_square(matrix)
        n = len(matrix)
        rows = [list(row) for row in matrix]
        sign = 1
        prev = ctx.one
        for k in range(n - 1):
            if rows[k][k].is_zero:
                swap = next((r for r in range(k + 1, n) if not rows[r][k].is_zero), None)
                if swap is None:
                    return ctx.zero
                rows[k], rows[swap] = rows[swap], rows[k]
                sign = -sign
            pivot = rows[k][k]
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    numerator = rows[i][j] * pivot - rows[i][k] * rows[k][j]
                    rows[i][j] = self.exact_div(numerator, prev)
            prev = pivot
        det = rows[n - 1][n - 1]
        return -det if sign < 0 else det

    def det_fraction_free(self, matrix: Matrix) -> QPoly:
        self._check_square(matrix)
        if len(matrix) < 5:
            return self.det_cofactor(matrix)
        return self.det_bareiss(matrix)

    def _check_square(self, matrix: Matrix) -> QuotientContext:
        n = len(matrix)
        for row in matrix:
            if len(row) != n:
                raise NonSquare(n, len(row))
        if n == 0:
            raise PreconditionError("empty matrix has no context")
        ctx = matrix[0][0].ctx
        if any(entry.ctx != ctx for row in matrix for entry in row):
            raise ContextMismatch("matrix entries live in different contexts")
        return ctx

    # ── Helpers ─────────────────────────────────────────────
    @staticmethod
    def lift(ctx: QuotientContext, values: Matrix) -> list[list[QPoly]]:
        """Coerce a matrix of scalars and polynomials into ``ctx``."""
        return [[v if isinstance(v, QPoly) else ctx.const(to_coefficient(v)) for v in row] for row in values]


@lru_cache(maxsize=None)
def point_context(m: int) -> QuotientContext:
    """Q[x_1..x_m, y_1..y_m, t]/(x_i y_i - t)."""
    return QuotientContext(VariableRegistry.for_points(m))
