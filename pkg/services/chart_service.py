"""Chart service: universal generators, chart presentations, multiplication matrices and Z relations."""

import logging
import operator
from functools import lru_cache
from threading import Lock

import sympy

from config import settings
from exceptions import CobasisNotClosed, IndexOutOfRange, ReductionDiverged
from models.chart import ChartPresentation, MultiplicationPair, UniversalGenerators
from models.qpoly import Key, QPoly, QuotientContext
from models.registry import VariableKind, VariableRegistry
from models.report import CheckEntry, CheckReport
from services.ring_service import RingService, point_context
from services.symfun_service import SymfunService
from services.vdm_service import VdmService, _sign_between

logger = logging.getLogger("nodehilb.services.chart")


@lru_cache(maxsize=None)
def chart_context(m: int) -> QuotientContext:
    """Q[x, y, t, a_0.., d_0.., u_1.., v_1..]/(xy - t) for the length-m local model."""
    extra = [(f"a{k}", VariableKind.CHART_A) for k in range(m)]
    extra += [(f"d{k}", VariableKind.CHART_D) for k in range(m)]
    extra += [(f"u{k}", VariableKind.CHART_U) for k in range(1, m)]
    extra += [(f"v{k}", VariableKind.CHART_V) for k in range(1, m)]
    return QuotientContext(VariableRegistry.for_points(1, tuple(extra), x_name="x", y_name="y"))


class _Coords:
    """Named coordinates of ``chart_context(m)`` with the boundary conventions."""

    def __init__(self, m: int) -> None:
        self.m = m
        self.ctx = chart_context(m)

    def a(self, k: int) -> QPoly:
        return self.ctx.one if k == self.m else self.ctx.var(f"a{k}")

    def d(self, k: int) -> QPoly:
        return self.ctx.one if k == self.m else self.ctx.var(f"d{k}")

    def u(self, k: int) -> QPoly:
        return self.ctx.one if k == 0 else self.ctx.var(f"u{k}")

    def v(self, k: int) -> QPoly:
        return self.ctx.one if k == self.m else self.ctx.var(f"v{k}")

    def x(self, e: int = 1) -> QPoly:
        return self.ctx.var("x", e) if e else self.ctx.one

    def y(self, e: int = 1) -> QPoly:
        return self.ctx.var("y", e) if e else self.ctx.one


class ChartService:
    def __init__(self, ring: RingService | None = None, vdm: VdmService | None = None) -> None:
        self.ring = ring or RingService()
        self.vdm = vdm or VdmService(self.ring)
        self.symfun: SymfunService = self.vdm.symfun
        self._generators: dict[int, UniversalGenerators] = {}
        self._charts: dict[tuple[int, int], ChartPresentation] = {}
        self._lock = Lock()

    # ── Universal generators ────────────────────────────────
    def f_generators(self, m: int) -> UniversalGenerators:
        if m < 1:
            raise IndexOutOfRange("m", m, 1, settings.hard_max_m)
        with self._lock:
            cached = self._generators.get(m)
        if cached is not None:
            return cached
        c = _Coords(m)
        polys = [sum((c.a(k) * c.x(k) for k in range(m + 1)), c.ctx.zero)]
        for i in range(1, m):
            x_part = sum((c.a(k) * c.x(k - i) for k in range(i, m + 1)), c.ctx.zero)
            y_part = sum((c.d(m - i + l) * c.y(l) for l in range(1, i + 1)), c.ctx.zero)
            polys.append(c.u(i) * x_part + c.v(i) * y_part)
        polys.append(sum((c.d(k) * c.y(k) for k in range(m + 1)), c.ctx.zero))
        generators = UniversalGenerators(m=m, ctx=c.ctx, polys=tuple(polys))
        with self._lock:
            return self._generators.setdefault(m, generators)

    def h_relations(self, m: int) -> tuple[QPoly, ...]:
        """The H-equations together with the binomial relations cutting out C~."""
        c = _Coords(m)
        t = c.ctx.t
        if m == 1:
            return (c.a(0) * c.d(0) - t,)
        relations = [c.a(0) * c.u(1) - t * c.v(1), c.d(0) * c.v(m - 1) - t * c.u(m - 1)]
        relations += [c.a(k) * c.u(k) - c.d(m - k) * c.v(k) for k in range(1, m)]
        relations += [c.v(k) * c.u(k + 1) - t * c.u(k) * c.v(k + 1) for k in range(1, m - 1)]
        return tuple(relations)

    # ── Charts ──────────────────────────────────────────────
    def chart(self, m: int, i: int) -> ChartPresentation:
        if not 1 <= i <= m:
            raise IndexOutOfRange("chart index", i, 1, max(m, 1))
        with self._lock:
            cached = self._charts.get((m, i))
        if cached is not None:
            return cached
        base = chart_context(m)
        substitution = {f"u{k}": 1 for k in range(1, i)}
        substitution.update({f"v{k}": 1 for k in range(i, m)})
        plain = [self.ring.substitute(r, substitution, target=base) for r in self.h_relations(m)]
        plain = [r for r in plain if not r.is_zero]
        ctx = base.with_relations(plain)
        generators = self.f_generators(m)
        presentation = ChartPresentation(
            m=m,
            i=i,
            ctx=ctx,
            substitution=substitution,
            free_variables=tuple(n for n in base.registry.names if n not in substitution),
            h_relations=tuple(plain),
            f_low=self.ring.substitute(generators[i - 1], substitution, target=ctx),
            f_high=self.ring.substitute(generators[i], substitution, target=ctx),
        )
        logger.debug("Chart U_%d at m=%d: %d H-relations", i, m, len(plain))
        with self._lock:
            return self._charts.setdefault((m, i), presentation)

    def to_chart(self, p: QPoly, chart: ChartPresentation) -> QPoly:
        return self.ring.substitute(p, chart.substitution, target=chart.ctx)

    # ── Rewriting ───────────────────────────────────────────
    def reduce_in_chart(self, p: QPoly, chart: ChartPresentation) -> QPoly:
        """Normal form in the co-basis span: x^(m-i+1) and y^i rewritten by F_(i-1), F_i, coefficients mod H."""
        ctx = chart.ctx
        x_top = ctx.key_from_exponents({"x": chart.x_cap + 1})
        y_top = ctx.key_from_exponents({"y": chart.y_cap + 1})
        x_tail = chart.f_low - ctx.var("x", chart.x_cap + 1)
        y_tail = chart.f_high - ctx.var("y", chart.y_cap + 1)
        current = p
        for _ in range(settings.reduction_max_steps):
            kept: dict[Key, object] = {}
            pending = ctx.zero
            for key, coeff in current:
                v = key[0]
                if v > chart.x_cap:
                    pending = pending + x_tail.scale_key(tuple(map(operator.sub, key, x_top)), -coeff)
                elif -v > chart.y_cap:
                    pending = pending + y_tail.scale_key(tuple(map(operator.sub, key, y_top)), -coeff)
                else:
                    kept[key] = coeff
            done = QPoly(ctx, kept, check=False)
            if not pending.is_zero:
                current = done + pending
                continue
            reduced = self.ring.reduce_modulo(done)
            if all(-chart.y_cap <= k[0] <= chart.x_cap for k, _ in reduced):
                return reduced
            current = reduced
        raise ReductionDiverged(settings.reduction_max_steps)

    def coordinates(self, p: QPoly, chart: ChartPresentation) -> list[QPoly]:
        """Coefficients of p along the co-basis; p must already lie in its span."""
        ctx = chart.ctx
        coords: list[dict[Key, object]] = [{} for _ in range(chart.m)]
        for key, coeff in p:
            v, h = key[0], key[1]
            if v > chart.x_cap or -v > chart.y_cap:
                raise CobasisNotClosed(QPoly(ctx, {key: coeff}, check=False).to_string())
            slot = v if v >= 0 else chart.x_cap - v
            coords[slot][(0, h - max(-v, 0)) + key[2:]] = coeff
        return [QPoly(ctx, c, check=False) for c in coords]

    def chart_multiplication(self, m: int, i: int) -> MultiplicationPair:
        chart = self.chart(m, i)
        x, y = chart.ctx.var("x"), chart.ctx.var("y")

        def matrix(factor: QPoly) -> tuple[tuple[QPoly, ...], ...]:
            columns = [self.coordinates(self.reduce_in_chart(factor * b, chart), chart) for b in chart.cobasis]
            return tuple(tuple(columns[c][r] for c in range(m)) for r in range(m))

        return MultiplicationPair(m=m, i=i, m_x=matrix(x), m_y=matrix(y))

    def _product_is_t(self, left, right, chart: ChartPresentation) -> bool:
        ctx = chart.ctx
        for r in range(chart.m):
            for c in range(chart.m):
                entry = sum((left[r][k] * right[k][c] for k in range(chart.m)), ctx.zero)
                if r == c:
                    entry = entry - ctx.t
                if not self.ring.reduce_modulo(entry).is_zero:
                    return False
        return True

    def _charpoly_matches(self, matrix, variable: str, target: QPoly, chart: ChartPresentation) -> bool:
        ctx = chart.ctx
        sym = sympy.Matrix([[ctx.to_sympy(e) for e in row] for row in matrix])
        charpoly = ctx.from_sympy(sym.charpoly(ctx.symbol(variable)).as_expr())
        return self.ring.equal_modulo(charpoly, target)

    def verify_charts(self, m: int) -> CheckReport:
        """Closure, M_x M_y = M_y M_x = t Id and both characteristic polynomials, per chart."""
        generators = self.f_generators(m)
        entries = []
        for i in range(1, m + 1):
            chart = self.chart(m, i)
            prefix = f"m={m}/chart={i}"
            try:
                pair = self.chart_multiplication(m, i)
            except (ReductionDiverged, CobasisNotClosed) as exc:
                entries.append(CheckEntry.of(f"{prefix}/closure", False, error=exc.message))
                continue
            entries.append(CheckEntry.of(f"{prefix}/closure", True, cobasis=list(chart.cobasis_labels)))
            entries.append(CheckEntry.of(f"{prefix}/xy", self._product_is_t(pair.m_x, pair.m_y, chart)))
            entries.append(CheckEntry.of(f"{prefix}/yx", self._product_is_t(pair.m_y, pair.m_x, chart)))
            f_first = self.to_chart(generators[0], chart)
            f_last = self.to_chart(generators[m], chart)
            entries.append(CheckEntry.of(f"{prefix}/charpoly-x", self._charpoly_matches(pair.m_x, "x", f_first, chart)))
            entries.append(CheckEntry.of(f"{prefix}/charpoly-y", self._charpoly_matches(pair.m_y, "y", f_last, chart)))
        report = CheckReport(name="chart-flatness", entries=tuple(entries))
        logger.info("Chart flatness at m=%s: %s", m, report.status.value)
        return report

    def verify_confluence(self, m: int, i: int | None = None) -> CheckReport:
        """Critical pairs x^(m-i+1)*y and x*y^i, and their multiples up to degree m+2."""
        charts = [i] if i is not None else list(range(1, m + 1))
        entries = []
        for k in charts:
            chart = self.chart(m, k)
            ctx = chart.ctx
            x, y = ctx.var("x"), ctx.var("y")
            x_tail = chart.f_low - ctx.var("x", chart.x_cap + 1)
            y_tail = chart.f_high - ctx.var("y", chart.y_cap + 1)
            overlaps = {
                "x-top*y": (chart.x_cap + 2, -x_tail * y, ctx.t * x**chart.x_cap),
                "x*y-top": (chart.y_cap + 2, -y_tail * x, ctx.t * y**chart.y_cap),
            }
            for label, (degree, first, second) in overlaps.items():
                for e in range(max(m + 2 - degree, 0) + 1):
                    for axis, factor in (("x", x**e), ("y", y**e)):
                        if e == 0 and axis == "y":
                            continue
                        lhs = self.reduce_in_chart(first * factor, chart)
                        rhs = self.reduce_in_chart(second * factor, chart)
                        entries.append(
                            CheckEntry.of(
                                f"m={m}/chart={k}/{label}/{axis}^{e}",
                                self.ring.equal_modulo(lhs, rhs),
                            )
                        )
        return CheckReport(name="chart-confluence", entries=tuple(entries))

    # ── Universal-ideal relations ───────────────────────────
    def verify_f_relations(self, m: int) -> CheckReport:
        generators = self.f_generators(m)
        c = _Coords(m)
        identities = []
        for i in range(2, m + 1):
            for j in range(i - 1):
                lhs = c.u(i - 1) * generators[j]
                rhs = c.u(j) * c.x(i - 1 - j) * generators[i - 1]
                identities.append((f"u/i={i},j={j}", lhs - rhs))
        for i in range(1, m):
            for j in range(i + 1, m + 1):
                lhs = c.v(i) * generators[j]
                rhs = c.v(j) * c.y(j - i) * generators[i]
                identities.append((f"v/i={i},j={j}", lhs - rhs))

        entries = []
        for k in range(1, m + 1):
            chart = self.chart(m, k)
            for label, difference in identities:
                residue = self.to_chart(difference, chart)
                entries.append(
                    CheckEntry.of(f"m={m}/chart={k}/{label}", residue.is_zero, residue=residue.to_string())
                )
        report = CheckReport(name="f-relations", entries=tuple(entries))
        logger.info("F relations at m=%s: %d instances, status %s", m, len(entries), report.status.value)
        return report

    # ── Z coordinates ───────────────────────────────────────
    def z_monomial(self, m: int, i: int) -> QPoly:
        """Z_i = u_1...u_(i-1) v_i...v_(m-1)."""
        c = _Coords(m)
        total = c.ctx.one
        for k in range(1, i):
            total = total * c.u(k)
        for k in range(i, m):
            total = total * c.v(k)
        return total

    def z_relations_check(self, m: int) -> CheckReport:
        if m < 2:
            raise IndexOutOfRange("m", m, 2, settings.hard_max_m)
        c = _Coords(m)
        binomials = [c.v(k) * c.u(k + 1) - c.ctx.t * c.u(k) * c.v(k + 1) for k in range(1, m - 1)]
        ctx = c.ctx.with_relations(binomials) if binomials else c.ctx
        z = [None] + [self.z_monomial(m, i).in_context(ctx) for i in range(1, m + 1)]
        t = ctx.t
        entries = []
        for i in range(1, m + 1):
            for j in range(i + 2, m + 1):
                difference = z[i] * z[j] - t ** (j - i - 1) * z[i + 1] * z[j - 1]
                entries.append(CheckEntry.of(f"m={m}/quadratic/i={i},j={j}", self.ring.reduce_modulo(difference).is_zero))

        # sigma-Z relations with Z_i -> G_i
        point_ctx = point_context(m)
        g = [None] + [self.vdm.g_element(m, i) for i in range(1, m + 1)]
        for i in range(1, m):
            sy = self.symfun.elem_sym("y", i, point_ctx)
            sx = self.symfun.elem_sym("x", m - i, point_ctx)
            holds = sy * g[i].sigma_form == sx * g[i + 1].sigma_form
            det_sign = _sign_between(sy * g[i].det_form, sx * g[i + 1].det_form)
            entries.append(CheckEntry.of(f"m={m}/sigma-z/i={i}", holds, det_sign=det_sign))
        report = CheckReport(name="z-relations", entries=tuple(entries))
        logger.info("Z relations at m=%s: %s", m, report.status.value)
        return report

    def sigma_uv_check(self, m: int) -> CheckReport:
        """Chart H-equations in sigma form, with (u_i : v_i) -> (G_(i+1) : G_i)."""
        ctx = point_context(m)
        t = ctx.t

        def sx(k):
            return self.symfun.elem_sym("x", k, ctx)

        def sy(k):
            return self.symfun.elem_sym("y", k, ctx)

        signed = (-1) ** m
        if m == 1:
            holds = sx(1) * sy(1) == t
            return CheckReport(
                name="sigma-uv",
                entries=(CheckEntry.of("m=1/a0d0", holds, identity="s^x_1 s^y_1 = t", signed_sign=1),),
            )
        g = [None] + [self.vdm.g_element(m, i).sigma_form for i in range(1, m + 1)]
        cases = [("first", sx(m) * g[2], t * g[1])]
        cases += [(f"middle/i={i}", sx(m - i) * g[i + 1], sy(i) * g[i]) for i in range(1, m)]
        cases.append(("last", t * g[m], sy(m) * g[m - 1]))
        entries = [
            CheckEntry.of(f"m={m}/{label}", _sign_between(lhs, rhs) == 1, signed_sign=signed)
            for label, lhs, rhs in cases
        ]
        return CheckReport(name="sigma-uv", entries=tuple(entries))

    @staticmethod
    def z_vanishing_pattern(m: int, l1: int, l2: int) -> tuple[set[int], set[int]]:
        """(forced zeros, free) among Z_1..Z_m when s^x_k != 0 iff k <= l1 and s^y_k != 0 iff k <= l2."""
        zeros: set[int] = set()
        changed = True
        while changed:
            changed = False
            for i in range(1, m):
                y_live, x_live = i <= l2, m - i <= l1
                forced = set()
                if y_live and not x_live:
                    forced.add(i)
                elif x_live and not y_live:
                    forced.add(i + 1)
                elif x_live and y_live and ({i, i + 1} & zeros):
                    forced.update((i, i + 1))
                if not forced <= zeros:
                    zeros |= forced
                    changed = True
        return zeros, set(range(1, m + 1)) - zeros

    def z_vanishing_check(self, m: int) -> CheckReport:
        entries = []
        for l1 in range(m + 1):
            for l2 in range(m + 1 - l1):
                zeros, free = self.z_vanishing_pattern(m, l1, l2)
                high = max(m - l1 + 1, l2 + 2)
                low = min(l2, m - l1 - 1)
                expected_zeros = {i for i in range(1, m + 1) if i >= high or i <= low}
                if l1 + l2 == m:
                    expected_free = {i for i in (l2, l2 + 1) if 1 <= i <= m}
                else:
                    expected_free = set(range(l2 + 1, m - l1 + 1))
                entries.append(
                    CheckEntry.of(
                        f"m={m}/l1={l1},l2={l2}",
                        zeros == expected_zeros and free == expected_free,
                        zeros=sorted(zeros),
                        free=sorted(free),
                    )
                )
        return CheckReport(name="z-vanishing", entries=tuple(entries))
