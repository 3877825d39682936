"""Groebner service: cached bases, normal forms, membership, elimination and saturation."""

import logging
from dataclasses import dataclass
from threading import Lock
from typing import Iterable, Sequence

import sympy
from sympy import QQ, Poly

from models.qpoly import QPoly, QuotientContext
from services.cache_service import GroebnerCache

logger = logging.getLogger("nodehilb.services.groebner")


@dataclass(frozen=True)
class IdealBasis:
    """A Gröbner basis together with the generator order it was computed for."""

    polys: tuple[sympy.Expr, ...]
    gens: tuple[sympy.Symbol, ...]
    order: str

    @property
    def is_unit(self) -> bool:
        return any(p.is_number and p != 0 for p in self.polys)

    def normal_form(self, expr) -> sympy.Expr:
        expr = sympy.expand(expr)
        if not self.polys or expr == 0:
            return expr
        _, remainder = sympy.reduced(expr, list(self.polys), *self.gens, order=self.order, domain=QQ)
        return sympy.expand(remainder)

    def contains(self, expr) -> bool:
        return self.normal_form(expr) == 0

    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [Poly(p, *self.gens, domain=QQ).monoms(order=self.order)[0] for p in self.polys]


def _terms(expr, gens: Sequence[sympy.Symbol]) -> tuple[tuple[tuple[int, ...], str], ...]:
    poly = Poly(expr, *gens, domain=QQ)
    return tuple((tuple(int(e) for e in monom), str(coeff)) for monom, coeff in poly.terms())


def _from_terms(terms, gens: Sequence[sympy.Symbol]) -> sympy.Expr:
    data = {tuple(monom): sympy.Rational(coeff) for monom, coeff in terms}
    return Poly.from_dict(data, *gens, domain=QQ).as_expr()


class GroebnerService:
    def __init__(self, cache: GroebnerCache | None = None) -> None:
        self.cache = cache if cache is not None else GroebnerCache()
        self._context_bases: dict[QuotientContext, IdealBasis] = {}
        self._lock = Lock()

    # ── Bases ───────────────────────────────────────────────
    def basis(self, generators: Iterable, gens: Sequence[sympy.Symbol], order: str = "grevlex") -> IdealBasis:
        gens = tuple(gens)
        exprs = [sympy.expand(g) for g in generators]
        exprs = [g for g in exprs if g != 0]
        encoded = tuple(sorted(_terms(g, gens) for g in exprs))

        def compute():
            if not exprs:
                return ()
            logger.debug("Computing %s basis of %d generators in %d variables", order, len(exprs), len(gens))
            result = sympy.groebner(exprs, *gens, order=order, domain=QQ)
            return tuple(_terms(g, gens) for g in result.exprs)

        entry = self.cache.get_or_compute(order, tuple(str(g) for g in gens), encoded, compute)
        polys = tuple(_from_terms(terms, gens) for terms in entry.basis)
        return IdealBasis(polys=polys, gens=gens, order=order)

    def context_basis(self, ctx: QuotientContext) -> IdealBasis:
        """Basis of the extra relations plus x_i*y_i - t, in registry order."""
        with self._lock:
            cached = self._context_bases.get(ctx)
        if cached is not None:
            return cached
        generators = [ctx.to_sympy(r) for r in ctx.relations]
        t = ctx.symbol(ctx.registry.t_name)
        for x_name, y_name in zip(ctx.registry.x_names, ctx.registry.y_names):
            generators.append(ctx.symbol(x_name) * ctx.symbol(y_name) - t)
        basis = self.basis(generators, ctx.symbols(), "grevlex")
        with self._lock:
            self._context_bases[ctx] = basis
        return basis

    def normal_form(self, p: QPoly) -> QPoly:
        basis = self.context_basis(p.ctx)
        return p.ctx.from_sympy(basis.normal_form(p.ctx.to_sympy(p)))

    # ── Membership ──────────────────────────────────────────
    def missing_from(self, basis: IdealBasis, exprs: Iterable) -> list[sympy.Expr]:
        """Generators of ``exprs`` that do not reduce to zero; empty means inclusion."""
        return [e for e in exprs if not basis.contains(e)]

    def compare_ideals(self, left: Sequence, right: Sequence, gens: Sequence[sympy.Symbol], order: str = "grevlex"):
        """(left generators outside right, right generators outside left)."""
        left_basis = self.basis(left, gens, order)
        right_basis = self.basis(right, gens, order)
        return self.missing_from(right_basis, left), self.missing_from(left_basis, right)

    def quotient_length(self, basis: IdealBasis, limit: int = 10_000) -> tuple[int, list[tuple[int, ...]]]:
        """Count standard monomials; raises ValueError when the quotient is not finite."""
        leads = basis.leading_monomials()
        n = len(basis.gens)
        for axis in range(n):
            if not any(lead[axis] > 0 and sum(lead) == lead[axis] for lead in leads):
                raise ValueError(f"quotient is infinite along {basis.gens[axis]}")

        def divisible(monom):
            return any(all(a >= b for a, b in zip(monom, lead)) for lead in leads)

        standard: list[tuple[int, ...]] = []
        frontier = [(0,) * n]
        seen = set(frontier)
        while frontier:
            monom = frontier.pop()
            if divisible(monom):
                continue
            standard.append(monom)
            if len(standard) > limit:
                raise ValueError("standard monomial enumeration exceeded its limit")
            for axis in range(n):
                nxt = monom[:axis] + (monom[axis] + 1,) + monom[axis + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        standard.sort(key=lambda m: (sum(m), m))
        return len(standard), standard

    # ── Elimination ─────────────────────────────────────────
    def eliminate(self, generators: Sequence, drop: Sequence[sympy.Symbol], keep: Sequence[sympy.Symbol]) -> list[sympy.Expr]:
        """Generators of I ∩ k[keep], from a lex basis with ``drop`` ordered first."""
        drop_set = set(drop)
        basis = self.basis(generators, tuple(drop) + tuple(keep), "lex")
        return [g for g in basis.polys if not (g.free_symbols & drop_set)]

    def saturate(self, generators: Sequence, element: sympy.Expr, keep: Sequence[sympy.Symbol]) -> list[sympy.Expr]:
        """I : element^∞ via the auxiliary relation 1 - w*element."""
        w = sympy.Dummy("w")
        return self.eliminate(list(generators) + [1 - w * element], (w,), keep)

    def intersect(self, ideals: Sequence[Sequence], keep: Sequence[sympy.Symbol]) -> list[sympy.Expr]:
        """Intersection of ideals by iterated lambda-elimination."""
        current = list(ideals[0])
        for other in ideals[1:]:
            lam = sympy.Dummy("lam")
            combined = [lam * g for g in current] + [(1 - lam) * g for g in other]
            current = self.eliminate(combined, (lam,), keep)
        return current
