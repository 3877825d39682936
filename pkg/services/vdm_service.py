"""Van der Monde service: the generators G_j, their identities and boundary valuations."""

import logging
from itertools import combinations
from math import comb
from threading import Lock

import sympy

from config import settings
from exceptions import ExactDivisionFailed, IndexOutOfRange, NoExponentWorks, NotDivisible, PreconditionError
from models.qpoly import QPoly, QuotientContext
from models.report import CheckEntry, CheckReport, CheckStatus
from models.sigma_expr import SigmaExpr, sigma_symbols
from models.vandermonde import GElement, MixedVdM, ThetaComponent
from services.ring_service import RingService, point_context
from services.symfun_service import SymfunService

logger = logging.getLogger("nodehilb.services.vdm")


def _sign_between(lhs: QPoly, rhs: QPoly) -> int | None:
    """+1 or -1 when lhs = ±rhs, else None."""
    if lhs == rhs:
        return 1
    if lhs == -rhs:
        return -1
    return None


class VdmService:
    def __init__(self, ring: RingService | None = None, symfun: SymfunService | None = None) -> None:
        self.ring = ring or RingService()
        self.symfun = symfun or SymfunService(self.ring)
        self._dets: dict[tuple[QuotientContext, int, tuple[int, ...]], QPoly] = {}
        self._lock = Lock()

    # ── Matrices and determinants ───────────────────────────
    def mixed_vdm(self, m: int, i: int, ctx: QuotientContext | None = None, points: tuple[int, ...] | None = None) -> MixedVdM:
        """V^m_i on ``points`` (default: all m points of ``ctx``)."""
        if m < 1 or not 1 <= i <= m:
            raise IndexOutOfRange("i", i, 1, max(m, 1))
        ctx = ctx or point_context(m)
        points = points or tuple(ctx.registry.points[:m])
        if len(points) != m:
            raise PreconditionError(f"V^{m}_{i} needs {m} points, got {len(points)}")
        xs = [ctx.x(p) for p in points]
        ys = [ctx.y(p) for p in points]
        rows = [tuple(x**e for x in xs) for e in range(m - i + 1)]
        rows += [tuple(y**e for y in ys) for e in range(1, i)]
        return MixedVdM(m=m, i=i, rows=tuple(rows))

    def det_v(self, m: int, i: int, ctx: QuotientContext | None = None, points: tuple[int, ...] | None = None) -> QPoly:
        ctx = ctx or point_context(m)
        points = points or tuple(ctx.registry.points[:m])
        memo_key = (ctx, i, points)
        with self._lock:
            cached = self._dets.get(memo_key)
        if cached is None:
            det = self.ring.det_fraction_free(self.mixed_vdm(m, i, ctx, points).rows)
            with self._lock:
                cached = self._dets.setdefault(memo_key, det)
        return cached

    def v_x(self, ctx: QuotientContext, points: tuple[int, ...]) -> QPoly:
        """prod_{a<b} (x_a - x_b) over ``points``."""
        total = ctx.one
        for a, b in combinations(points, 2):
            total = total * (ctx.x(a) - ctx.x(b))
        return total

    def g_element(self, m: int, j: int) -> GElement:
        if m < 1 or not 1 <= j <= m:
            raise IndexOutOfRange("j", j, 1, max(m, 1))
        ctx = point_context(m)
        points = ctx.registry.points
        det_form = self.det_v(m, j)
        power = (j - 1) * (2 * m - j) // 2
        numerator = self.symfun.elem_sym("y", m, ctx) ** (j - 1) * self.v_x(ctx, points)
        try:
            sigma_form = self.ring.exact_div(numerator, ctx.t**power)
        except NotDivisible as exc:
            raise ExactDivisionFailed(m, j, exc.remainder) from exc
        sign = _sign_between(det_form, sigma_form)
        if sign is None:
            raise ExactDivisionFailed(m, j, (det_form - sigma_form).to_string())
        return GElement(m=m, j=j, det_form=det_form, sigma_form=sigma_form, t_power=power, sign=sign)

    def verify_g_elements(self, m: int) -> CheckReport:
        entries = []
        for j in range(1, m + 1):
            try:
                g = self.g_element(m, j)
                entries.append(CheckEntry.of(f"m={m}/G/j={j}", True, sign=g.sign, t_power=g.t_power, terms=len(g.det_form)))
            except ExactDivisionFailed as exc:
                entries.append(CheckEntry.of(f"m={m}/G/j={j}", False, error=exc.message))
        return CheckReport(name="g-elements", entries=tuple(entries))

    # ── Recurrences and syzygies ────────────────────────────
    def verify_g_recurrence(self, m: int) -> CheckReport:
        """s^y_m det V_i = eps t^(m-i) det V_(i+1), eps compared with (-1)^(m-i+1)."""
        ctx = point_context(m)
        sy_m = self.symfun.elem_sym("y", m, ctx)
        entries = []
        for i in range(1, m):
            lhs = sy_m * self.det_v(m, i)
            rhs = ctx.t ** (m - i) * self.det_v(m, i + 1)
            eps = _sign_between(lhs, rhs)
            printed = (-1) ** (m - i + 1)
            entries.append(
                CheckEntry.compared(
                    f"m={m}/recurrence/i={i}",
                    eps is not None,
                    eps == printed,
                    computed_sign=eps,
                    printed_sign=printed,
                )
            )
        report = CheckReport(name="g-recurrence", entries=tuple(entries))
        logger.info("G recurrence at m=%s: %s", m, report.status.value)
        return report

    def verify_g_syzygies(self, m: int) -> CheckReport:
        ctx = point_context(m)
        g = {j: self.det_v(m, j) for j in range(1, m + 1)}
        entries = []
        for i in range(1, m):
            lhs = self.symfun.elem_sym("x", m - i, ctx) * g[i + 1]
            rhs = self.symfun.elem_sym("y", i, ctx) * g[i]
            sign = _sign_between(lhs, rhs)
            entries.append(CheckEntry.of(f"m={m}/linear/i={i}", sign is not None, sign=sign))
        for i in range(1, m + 1):
            for j in range(i + 2, m + 1):
                lhs = g[i] * g[j]
                rhs = ctx.t ** (j - i - 1) * g[i + 1] * g[j - 1]
                sign = _sign_between(lhs, rhs)
                entries.append(CheckEntry.of(f"m={m}/quadratic/i={i},j={j}", sign is not None, sign=sign))
        return CheckReport(name="g-syzygies", entries=tuple(entries))

    def verify_branch_flip(self, m: int) -> CheckReport:
        """(s^y_m)^(m-1) det V_1 = eps t^e det V_m, against the printed single power."""
        ctx = point_context(m)
        sy_m = self.symfun.elem_sym("y", m, ctx)
        lhs = sy_m ** (m - 1) * self.det_v(m, 1)
        top = self.det_v(m, m)
        bound = max(0, (lhs.weights()[1] - top.weights()[1]) // 2) + 1
        found = [(e, s) for e in range(bound + 1) if (s := _sign_between(lhs, ctx.t**e * top)) is not None]
        printed_holds = sy_m * self.det_v(m, 1) == (-ctx.t) ** comb(m, 2) * top
        e, eps = found[0] if found else (None, None)
        entry = CheckEntry.compared(
            f"m={m}/branch-flip",
            len(found) == 1 and e == comb(m, 2) and eps == (-1) ** comb(m, 2),
            printed_holds,
            exponent=e,
            sign=eps,
            sigma_power=m - 1,
            printed_sigma_power=1,
        )
        return CheckReport(name="branch-flip", entries=(entry,))

    # ── Discriminant and eta ────────────────────────────────
    def discriminant_in_sigma(self, m: int) -> SigmaExpr:
        """disc(x^m + a_(m-1) x^(m-1) + ... + a_0) with a_i = (-1)^(m-i) s^x_(m-i)."""
        if m < 1:
            raise IndexOutOfRange("m", m, 1, settings.hard_max_m)
        ctx = point_context(m)
        sx, _, _ = sigma_symbols(m)
        X = sympy.Symbol("X")
        coeffs = sympy.symbols(f"a0:{m}")
        f0 = X**m + sum(coeffs[i] * X**i for i in range(m))
        disc = sympy.discriminant(f0, X) if m > 1 else sympy.Integer(1)
        substitution = {coeffs[i]: (-1) ** (m - i) * sx[m - i - 1] for i in range(m)}
        expr = sympy.expand(sympy.sympify(disc).subs(substitution, simultaneous=True))
        g1 = self.v_x(ctx, ctx.registry.points)
        return SigmaExpr(m=m, expr=expr, witness=g1 * g1)

    def discriminant_check(self, m: int) -> CheckReport:
        sigma = self.discriminant_in_sigma(m)
        holds = self.symfun.evaluate(sigma) == sigma.witness
        entry = CheckEntry.of(f"m={m}/discriminant", holds, sigma_form=sigma.to_string() if m <= 3 else None)
        return CheckReport(name="discriminant", entries=(entry,))

    def eta_check(self, m: int, i: int, j: int) -> CheckReport:
        if not (1 <= i <= m and 1 <= j <= m):
            raise IndexOutOfRange("(i, j)", max(i, j), 1, m)
        ctx = point_context(m)
        v = self.v_x(ctx, ctx.registry.points)
        numerator = self.symfun.elem_sym("y", m, ctx) ** (i + j - 2) * v * v
        target = self.det_v(m, i) * self.det_v(m, j)
        bound = max(0, (numerator.weights()[1] - target.weights()[1]) // 2) + 1
        matches = []
        for e in range(bound + 1):
            try:
                quotient = self.ring.exact_div(numerator, ctx.t**e)
            except NotDivisible:
                break
            sign = _sign_between(quotient, target)
            if sign is not None:
                matches.append((e, sign))
        if not matches:
            raise NoExponentWorks(m, i, j)
        e, sign = matches[0]
        printed = (i - 1) * (m - i) + (j - 1) * (m - j)
        candidate = (i - 1) * (2 * m - i) // 2 + (j - 1) * (2 * m - j) // 2
        entry = CheckEntry.compared(
            f"m={m}/eta/i={i},j={j}",
            len(matches) == 1,
            e == printed,
            exponent=e,
            sign=sign,
            printed_exponent=printed,
            candidate_exponent=candidate,
            matches_candidate=e == candidate,
            excess_over_printed=e - printed,
            binomial_excess=comb(i, 2) + comb(j, 2),
        )
        return CheckReport(name="eta", entries=(entry,))

    # ── Valuations along Θ_I ────────────────────────────────
    def theta_valuation(self, p: QPoly, index_set) -> int:
        component = ThetaComponent(m=p.ctx.m, index_set=tuple(sorted(index_set)))
        chart = self.ring.localize(p.ctx, component.localized_names(p.ctx.registry))
        return self.ring.t_adic_order(p.in_context(chart))

    def theta_orders(self, m: int, j: int) -> dict[int, set[int]]:
        """|I| -> the set of orders of G_j over all I of that size."""
        g = self.det_v(m, j)
        table: dict[int, set[int]] = {}
        for size in range(m + 1):
            for index_set in combinations(range(1, m + 1), size):
                table.setdefault(size, set()).add(self.theta_valuation(g, index_set))
        return table

    def theta_order_table(self, m: int) -> CheckReport:
        if m < 2:
            raise IndexOutOfRange("m", m, 2, settings.hard_max_m)
        entries = []
        for j in range(1, m + 1):
            table = self.theta_orders(m, j)
            zero_sizes = []
            for size, orders in sorted(table.items()):
                order = min(orders)
                a = m - size
                printed = (size - j) ** 2 + (size - j)
                candidate = ((a - j) ** 2 + (a - j)) // 2
                if order == 0:
                    zero_sizes.append(size)
                entries.append(
                    CheckEntry.compared(
                        f"m={m}/order/j={j},size={size}",
                        len(orders) == 1 and order >= 0,
                        order == printed,
                        order=order,
                        depends_only_on_size=len(orders) == 1,
                        printed=printed,
                        candidate=candidate,
                        matches_candidate=order == candidate,
                    )
                )
            expected = sorted(s for s in range(m + 1) if m - s in (j - 1, j))
            entries.append(
                CheckEntry.of(f"m={m}/order-zero/j={j}", zero_sizes == expected, zero_sizes=zero_sizes, expected=expected)
            )
        report = CheckReport(name="theta-orders", entries=tuple(entries))
        logger.info(
            "Theta orders at m=%s: %d cells, %d corrected",
            m,
            len(entries),
            report.count(CheckStatus.CORRECTED),
        )
        return report

    def intermediate_diagonal_check(self, m: int) -> CheckReport:
        """ord(G_j) = ord(G_1) + (j-1)|I| - (j-1)(2m-j)/2 and the branch symmetry j <-> m+1-j."""
        orders = {j: {size: min(v) for size, v in self.theta_orders(m, j).items()} for j in range(1, m + 1)}
        entries = []
        for j in range(1, m + 1):
            for size in range(m + 1):
                expected = orders[1][size] + (j - 1) * size - (j - 1) * (2 * m - j) // 2
                entries.append(
                    CheckEntry.of(
                        f"m={m}/diagonal/j={j},size={size}",
                        orders[j][size] == expected,
                        order=orders[j][size],
                        expected=expected,
                    )
                )
                mirrored = orders[m + 1 - j][m - size]
                entries.append(
                    CheckEntry.of(f"m={m}/branch-symmetry/j={j},size={size}", orders[j][size] == mirrored, mirrored=mirrored)
                )
        return CheckReport(name="intermediate-diagonals", entries=tuple(entries))

    # ── Localization ────────────────────────────────────────
    def localization_factorization(self, m: int, k_x: int, k_y: int, j: int) -> CheckReport:
        n = m - k_x - k_y
        if j < 1 or j + k_y > m or k_x + k_y >= m or j > n or min(k_x, k_y) < 0:
            raise PreconditionError(f"localization needs 1 <= j <= m-k_x-k_y; got m={m}, k_x={k_x}, k_y={k_y}, j={j}")
        base = point_context(m)
        reg = base.registry
        block_n = tuple(range(1, n + 1))
        block_x = tuple(range(n + 1, n + k_x + 1))
        block_y = tuple(range(n + k_x + 1, m + 1))
        localized = {reg.x_names[a - 1] for a in block_x} | {reg.y_names[b - 1] for b in block_y}
        ctx = self.ring.localize(base, localized)

        def diff_x(a, b):
            return ctx.x(a) - ctx.x(b)

        g_big = self.det_v(m, j + k_y).in_context(ctx)
        g_small = self.det_v(n, j, ctx, block_n) if n else ctx.one
        cross_x = ctx.one
        for a, b in combinations(range(1, m + 1), 2):
            if a in block_x or b in block_x:
                cross_x = cross_x * diff_x(a, b)
        y_n = ctx.one
        for a in block_n:
            y_n = y_n * ctx.y(a)
        mixed = y_n**k_y
        for a in block_n:
            for b in block_y:
                mixed = mixed * diff_x(a, b)
        inner_y = ctx.one
        for a, b in combinations(block_y, 2):
            inner_y = inner_y * diff_x(a, b)

        entries = []
        try:
            mixed_factor = self.ring.exact_div(mixed, ctx.t ** (n * k_y))
            inner_factor = self.ring.exact_div(inner_y, ctx.t ** comb(k_y, 2))
            unit = self.ring.exact_div(g_big, g_small * cross_x * mixed_factor * inner_factor)
        except NotDivisible as exc:
            entries.append(CheckEntry.of(f"m={m}/localization/kx={k_x},ky={k_y},j={j}", False, remainder=exc.remainder))
            return CheckReport(name="localization", entries=tuple(entries))

        is_unit = self._is_unit(unit)
        entries.append(
            CheckEntry.of(
                f"m={m}/localization/kx={k_x},ky={k_y},j={j}",
                is_unit,
                unit=unit.to_string(),
                small_generator=f"G^{n}_{j}",
                cross_x_factors=comb(m, 2) - comb(n + k_y, 2),
                mixed_factors=n * k_y,
                inner_y_factors=comb(k_y, 2),
            )
        )
        # each inner factor (x_a - x_b)/t is y_b^-1 - y_a^-1
        for a, b in combinations(block_y, 2):
            factor = self.ring.exact_div(diff_x(a, b), ctx.t)
            expected = ctx.y(b) ** -1 - ctx.y(a) ** -1
            entries.append(CheckEntry.of(f"m={m}/localization/kx={k_x},ky={k_y},j={j}/inner/{a},{b}", factor == expected))
        # the mixed factor is prod (y_b - y_a) up to a unit
        prod_y = ctx.one
        for a in block_n:
            for b in block_y:
                prod_y = prod_y * (ctx.y(b) - ctx.y(a))
        try:
            mixed_unit = self.ring.exact_div(mixed_factor, prod_y)
            mixed_ok = self._is_unit(mixed_unit)
        except NotDivisible:
            mixed_ok = False
        entries.append(CheckEntry.of(f"m={m}/localization/kx={k_x},ky={k_y},j={j}/mixed", mixed_ok))
        return CheckReport(name="localization", entries=tuple(entries))

    @staticmethod
    def _is_unit(q: QPoly) -> bool:
        """±1 times a monomial in localized variables only."""
        if not q.is_monomial:
            return False
        key, coeff = q.leading()
        return abs(coeff) == 1 and set(q.ctx.exponent_map(key)) <= q.ctx.localized
