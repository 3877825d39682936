"""Symfun service: elementary symmetric functions, symmetrization and sigma expressions."""

import logging
from itertools import combinations, combinations_with_replacement, permutations
from math import factorial
from threading import Lock

import sympy
from sympy import QQ, Poly
from sympy.polys.polyfuncs import symmetrize as sympy_symmetrize
from sympy.utilities.iterables import multiset_permutations

from config import settings
from exceptions import (
    ForeignVariables,
    IndexOutOfRange,
    NotInvariant,
    PreconditionError,
    RecursionDepthExceeded,
)
from models.qpoly import QPoly, QuotientContext
from models.registry import VariableKind
from models.report import CheckEntry, CheckReport
from models.sigma_expr import SigmaExpr, sigma_symbols
from services.ring_service import RingService, point_context

logger = logging.getLogger("nodehilb.services.symfun")

Pairs = tuple[tuple[int, int], ...]


class SymfunService:
    def __init__(self, ring: RingService | None = None) -> None:
        self.ring = ring or RingService()
        self._elem: dict[tuple[QuotientContext, str, int], QPoly] = {}
        self._orbit_exprs: dict[tuple[int, Pairs], sympy.Expr] = {}
        self._lock = Lock()

    # ── Elementary symmetric functions ──────────────────────
    def elem_sym(self, axis: str, j: int, ctx: QuotientContext) -> QPoly:
        if axis not in ("x", "y"):
            raise PreconditionError(f"axis must be 'x' or 'y', got '{axis}'")
        if not 0 <= j <= ctx.m:
            raise IndexOutOfRange(f"sigma^{axis} index", j, 0, ctx.m)
        cache_key = (ctx, axis, j)
        with self._lock:
            cached = self._elem.get(cache_key)
        if cached is None:
            names = ctx.registry.x_names if axis == "x" else ctx.registry.y_names
            total = ctx.zero
            for combo in combinations(names, j):
                total = total + ctx.monomial({name: 1 for name in combo})
            with self._lock:
                cached = self._elem.setdefault(cache_key, total)
        return cached

    # ── Diagonal action ─────────────────────────────────────
    def _check_point_variables(self, p: QPoly) -> None:
        registry = p.ctx.registry
        point_kinds = (VariableKind.X, VariableKind.Y, VariableKind.T)
        foreign = sorted(n for n in p.variables() if registry.get(n).kind not in point_kinds)
        if foreign:
            raise ForeignVariables(foreign)

    @staticmethod
    def permute(p: QPoly, perm: tuple[int, ...]) -> QPoly:
        """Move the pair (x_a, y_a) to slot perm[a]."""
        ctx = p.ctx
        return QPoly(ctx, {ctx.permute_key(k, perm): c for k, c in p}, check=False)

    def symmetrize(self, p: QPoly) -> QPoly:
        """R(p): the average of p over all diagonal permutations."""
        self._check_point_variables(p)
        m = p.ctx.m
        total = p.ctx.zero
        for perm in permutations(range(m)):
            total = total + self.permute(p, perm)
        return total * QQ(1, factorial(m))

    def check_invariant(self, p: QPoly) -> None:
        m = p.ctx.m
        for a in range(m - 1):
            perm = tuple(range(a)) + (a + 1, a) + tuple(range(a + 2, m))
            if self.permute(p, perm) != p:
                raise NotInvariant((a + 1, a + 2))

    def is_invariant(self, p: QPoly) -> bool:
        try:
            self.check_invariant(p)
        except NotInvariant:
            return False
        return True

    def orbit(self, ctx: QuotientContext, pairs: Pairs) -> QPoly:
        """Sum of the distinct images of prod x_a^{I_a} y_a^{J_a}."""
        pad = (0,) * len(ctx.registry.aux_names)
        terms = {}
        for image in multiset_permutations(list(pairs)):
            key = tuple(a - b for a, b in image) + (sum(b for _, b in image),) + pad
            terms[key] = QQ(1)
        return QPoly(ctx, terms, check=False)

    # ── Sigma expressions ───────────────────────────────────
    def sigma_express(self, p: QPoly) -> SigmaExpr:
        """Write an invariant polynomial in s^x_j, s^y_j and t."""
        ctx = p.ctx
        if ctx.localized or ctx.has_relations:
            raise PreconditionError("sigma expressions live in the plain point ring")
        self._check_point_variables(p)
        self.check_invariant(p)
        expr = self._express(p, depth=0)
        return SigmaExpr(m=ctx.m, expr=sympy.expand(expr), witness=p)

    def _express(self, p: QPoly, depth: int) -> sympy.Expr:
        if depth > settings.sigma_max_depth:
            raise RecursionDepthExceeded(depth)
        ctx = p.ctx
        _, _, t_sym = sigma_symbols(ctx.m)
        result = sympy.Integer(0)
        rest = p
        while not rest.is_zero:
            key, coeff = rest.leading()
            xs, ys, t_exp = ctx.split(key)
            pairs = tuple(zip(xs, ys))
            rep = tuple(sorted(pairs, reverse=True))
            result += QQ.to_sympy(coeff) * t_sym**t_exp * self._orbit_expr(ctx, rep, depth)
            rest = rest - self.orbit(ctx, pairs) * (ctx.t**t_exp) * coeff
        return result

    def _orbit_expr(self, ctx: QuotientContext, rep: Pairs, depth: int) -> sympy.Expr:
        memo_key = (ctx.m, rep)
        with self._lock:
            cached = self._orbit_exprs.get(memo_key)
        if cached is not None:
            return cached
        sx, sy, t_sym = sigma_symbols(ctx.m)
        x_part = tuple(a for a, _ in rep)
        y_part = tuple(b for _, b in rep)
        if not any(x_part) and not any(y_part):
            expr = sympy.Integer(1)
        elif not any(y_part):
            expr = self._pure_orbit_expr(x_part, sx)
        elif not any(x_part):
            expr = self._pure_orbit_expr(y_part, sy)
        else:
            # R(x^I)R(y^J) = lam*Orb(I,J) + t*F with F invariant of lower xy-degree
            x_orbit = self.orbit(ctx, tuple((a, 0) for a in x_part))
            y_orbit = self.orbit(ctx, tuple((0, b) for b in y_part))
            rx = x_orbit * QQ(1, len(x_orbit))
            ry = y_orbit * QQ(1, len(y_orbit))
            product = rx * ry
            target = self.orbit(ctx, rep)
            rep_key = tuple(a - b for a, b in rep) + (sum(y_part),) + (0,) * len(ctx.registry.aux_names)
            lam = product.terms[rep_key]
            correction = self.ring.exact_div(product - target * lam, ctx.t)
            logger.debug("Orbit %s: lambda=%s, correction has %d terms", rep, lam, len(correction))
            f_expr = self._express(correction, depth + 1)
            rx_expr = self._pure_orbit_expr(x_part, sx) / len(x_orbit)
            ry_expr = self._pure_orbit_expr(y_part, sy) / len(y_orbit)
            expr = sympy.expand((rx_expr * ry_expr - t_sym * f_expr) / QQ.to_sympy(lam))
        with self._lock:
            return self._orbit_exprs.setdefault(memo_key, expr)

    @staticmethod
    def _pure_orbit_expr(exponents: tuple[int, ...], symbols: tuple[sympy.Symbol, ...]) -> sympy.Expr:
        m = len(exponents)
        zs = sympy.symbols(f"z1:{m + 1}")
        poly = sympy.Add(*(sympy.Mul(*(z**e for z, e in zip(zs, image))) for image in multiset_permutations(list(exponents))))
        sym, remainder, _ = sympy_symmetrize(poly, *zs, formal=True, symbols=list(symbols))
        if remainder != 0:
            raise PreconditionError(f"orbit sum of {exponents} is not symmetric")
        return sympy.expand(sym)

    def evaluate(self, sigma: SigmaExpr, ctx: QuotientContext | None = None) -> QPoly:
        """Substitute s^x_j -> sigma^x_j, s^y_j -> sigma^y_j in the point ring."""
        ctx = ctx or sigma.witness.ctx
        m = sigma.m
        images = (
            [self.elem_sym("x", j, ctx) for j in range(1, m + 1)]
            + [self.elem_sym("y", j, ctx) for j in range(1, m + 1)]
            + [ctx.t]
        )
        powers: dict[tuple[int, int], QPoly] = {}
        total = ctx.zero
        for monom, coeff in Poly(sigma.expr, *sigma.symbols, domain=QQ).terms():
            term = ctx.const(coeff)
            for slot, e in enumerate(monom):
                if e:
                    if (slot, e) not in powers:
                        powers[(slot, e)] = images[slot] ** e
                    term = term * powers[(slot, e)]
            total = total + term
        return total

    # ── Relations ───────────────────────────────────────────
    def verify_sigma_relations(self, m: int) -> CheckReport:
        if m < 1:
            raise IndexOutOfRange("m", m, 1, settings.hard_max_m)
        ctx = point_context(m)
        t = ctx.t

        def sx(j):
            return self.elem_sym("x", j, ctx)

        def sy(j):
            return self.elem_sym("y", j, ctx)

        entries = []
        for j in range(m + 1):
            holds = sy(m) * sx(j) == t**j * sy(m - j)
            entries.append(CheckEntry.of(f"m={m}/ymxj/j={j}", holds, identity="s^y_m s^x_j = t^j s^y_(m-j)", j=j))
            holds = sx(m) * sy(j) == t**j * sx(m - j)
            entries.append(CheckEntry.of(f"m={m}/xmyj/j={j}", holds, identity="s^x_m s^y_j = t^j s^x_(m-j)", j=j))
        for j in range(m + 1):
            for i in range(m - j + 1):
                holds = t ** (m - i) * sy(m - j) == t ** (m - i - j) * sx(j) * sy(m)
                entries.append(
                    CheckEntry.of(f"m={m}/weighted-y/i={i},j={j}", holds, identity="t^(m-i) s^y_(m-j) = t^(m-i-j) s^x_j s^y_m")
                )
                holds = t ** (m - i) * sx(m - j) == t ** (m - i - j) * sy(j) * sx(m)
                entries.append(
                    CheckEntry.of(f"m={m}/weighted-x/i={i},j={j}", holds, identity="t^(m-i) s^x_(m-j) = t^(m-i-j) s^y_j s^x_m")
                )
        report = CheckReport(name="sigma-relations", entries=tuple(entries))
        logger.info("Sigma relations at m=%s: %d instances, status %s", m, len(entries), report.status.value)
        return report

    def express_check(self, m: int, max_degree: int | None = None) -> CheckReport:
        """sigma_express then evaluate returns every orbit sum of degree <= max_degree."""
        max_degree = settings.express_max_degree if max_degree is None else max_degree
        ctx = point_context(m)
        exponents = [(a, 0) for a in range(max_degree + 1)] + [(0, b) for b in range(1, max_degree + 1)]
        entries = []
        for rep in combinations_with_replacement(exponents, m):
            if sum(a + b for a, b in rep) > max_degree:
                continue
            rep = tuple(sorted(rep, reverse=True))
            orbit = self.orbit(ctx, rep)
            sigma = self.sigma_express(orbit)
            label = ";".join(f"{a},{b}" for a, b in rep)
            entries.append(CheckEntry.of(f"m={m}/express/{label}", self.evaluate(sigma) == orbit, sigma=sigma.to_string()))
        return CheckReport(name="sigma-express", entries=tuple(entries))
