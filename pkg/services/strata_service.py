"""Strata service: fibres of the cycle map, punctual ideal lengths and interpolating sections."""

import logging
from fractions import Fraction

import sympy

from config import settings
from exceptions import IndexOutOfRange, InvalidStratum, ZeroRatio
from models.chart import FiberComponent, FiberDescription, LengthCertificate
from models.report import CheckEntry, CheckReport
from services.chart_service import ChartService
from services.groebner_service import GroebnerService

logger = logging.getLogger("nodehilb.services.strata")

X, Y = sympy.symbols("x y")
S, C = sympy.symbols("s c")


def _names(prefix: str, low: int, high: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{k}" for k in range(low, high + 1))


class StrataService:
    def __init__(self, groebner: GroebnerService | None = None, charts: ChartService | None = None) -> None:
        self.groebner = groebner or GroebnerService()
        self.charts = charts or ChartService()

    # ── Fibres ──────────────────────────────────────────────
    @staticmethod
    def _component(m: int, b: int, i: int) -> FiberComponent:
        j = i - b
        upper = _names("u", j + b + 1, m - 1)
        return FiberComponent(
            index=i,
            printed_equations=_names("v", 1, j + b) + upper,
            printed_point=j + b + 1,
            component_equations=_names("v", 1, j + b - 1) + upper,
            endpoints=(i, i + 1),
        )

    def punctual_fiber(self, m: int, a: int, b: int) -> FiberDescription:
        """Fibre over the cycle with a points at the node on the x-side and b on the y-side."""
        if m < 1 or a < 0 or b < 0 or a + b > m - 1:
            raise InvalidStratum(m, a, b)
        vanishing = _names("v", 1, b) + _names("u", m - a, m - 1)
        if a + b == m - 1:
            return FiberDescription(m=m, a=a, b=b, kind="point", vanishing=vanishing, point=b + 1)
        components = tuple(self._component(m, b, i) for i in range(b + 1, m - a))
        return FiberDescription(m=m, a=a, b=b, kind="chain", vanishing=vanishing, components=components)

    def boundary_fiber(self, m: int, b: int) -> FiberDescription:
        """The case a + b = m."""
        a = m - b
        if m < 1 or not 0 <= b <= m:
            raise InvalidStratum(m, a, b)
        if b == 0:
            return FiberDescription(m=m, a=a, b=b, kind="point", point=1)
        if b == m:
            return FiberDescription(
                m=m, a=a, b=b, kind="point", point=m, index_flag=f"printed Q^{m}_{m + 1} is outside 1..{m}"
            )
        component = self._component(m, b - 1, b)
        return FiberDescription(
            m=m, a=a, b=b, kind="chain", vanishing=component.component_equations, components=(component,)
        )

    def strata_check(self, m: int) -> CheckReport:
        entries = []
        for a in range(m):
            for b in range(m - a):
                fiber = self.punctual_fiber(m, a, b)
                prefix = f"m={m}/a={a},b={b}"
                if fiber.kind == "point":
                    entries.append(CheckEntry.of(prefix, fiber.point == b + 1, point=fiber.point))
                    continue
                comps = fiber.components
                entries.append(CheckEntry.of(f"{prefix}/count", len(comps) == m - 1 - a - b, count=len(comps)))
                chained = True
                for left, right in zip(comps, comps[1:]):
                    shared = set(range(left.endpoints[0], left.endpoints[1] + 1)) & set(
                        range(right.endpoints[0], right.endpoints[1] + 1)
                    )
                    changed = {
                        int(n[1:])
                        for n in set(left.printed_equations) ^ set(right.printed_equations)
                    }
                    chained &= shared == {left.index + 1} and left.printed_point == left.index + 1 and len(changed) == 1
                entries.append(CheckEntry.of(f"{prefix}/chain", chained))
        report = CheckReport(name="strata", entries=tuple(entries))
        logger.info("Strata at m=%s: %d entries, status %s", m, len(entries), report.status.value)
        return report

    def boundary_check(self, m: int) -> CheckReport:
        entries = []
        for b in range(m + 1):
            fiber = self.boundary_fiber(m, b)
            entry_id = f"m={m}/b={b}"
            if fiber.kind == "point":
                in_range = 1 <= fiber.point <= m
                if fiber.index_flag:
                    entries.append(CheckEntry.compared(entry_id, in_range, False, point=fiber.point, flag=fiber.index_flag))
                else:
                    entries.append(CheckEntry.of(entry_id, in_range, point=fiber.point))
            else:
                (component,) = fiber.components
                entries.append(CheckEntry.of(entry_id, component.endpoints == (b, b + 1), endpoints=list(component.endpoints)))
        return CheckReport(name="boundary-fibres", entries=tuple(entries))

    # ── Punctual ideals ─────────────────────────────────────
    def punctual_ideal_length(self, m: int, i: int, point: tuple) -> LengthCertificate:
        """Length of k[x,y]/(xy, I) for the punctual ideal of C^m_i at [u : v]."""
        u, v = (Fraction(p) for p in point)
        if u == 0 and v == 0:
            raise ZeroRatio()
        if u and v:
            kind = "principal"
            if not 1 <= i <= m - 1:
                raise IndexOutOfRange("i", i, 1, m - 1)
            ratio = u / v
            ideal = [X ** (m - i) + sympy.Rational(ratio.numerator, ratio.denominator) * Y**i]
        elif u == 0:
            kind = "[0,1]"
            if not 1 <= i <= m:
                raise IndexOutOfRange("i", i, 1, m)
            ideal = [X ** (m + 1 - i), Y**i]
        else:
            kind = "[1,0]"
            if not 0 <= i <= m - 1:
                raise IndexOutOfRange("i", i, 0, m - 1)
            ideal = [X ** (m - i), Y ** (i + 1)]
        basis = self.groebner.basis(ideal + [X * Y], (X, Y), "grevlex")
        length, standard = self.groebner.quotient_length(basis)
        return LengthCertificate(
            m=m,
            i=i,
            point=(str(u), str(v)),
            kind=kind,
            ideal=tuple(str(g) for g in ideal),
            basis=tuple(str(g) for g in basis.polys),
            standard_monomials=tuple(str(X**ex * Y**ey) for ex, ey in standard),
            length=length,
        )

    def punctual_length_check(self, m: int) -> CheckReport:
        samples = [(1, 1), (-2, 3)]
        entries = []
        for i in range(1, m):
            for point in samples:
                cert = self.punctual_ideal_length(m, i, point)
                entries.append(CheckEntry.of(f"m={m}/principal/i={i}/{cert.point[0]}:{cert.point[1]}", cert.ok, length=cert.length))
        for i in range(1, m + 1):
            cert = self.punctual_ideal_length(m, i, (0, 1))
            entries.append(CheckEntry.of(f"m={m}/[0,1]/i={i}", cert.ok, length=cert.length, point=f"Q^{m}_{i}"))
        for i in range(m):
            cert = self.punctual_ideal_length(m, i, (1, 0))
            entries.append(CheckEntry.of(f"m={m}/[1,0]/i={i}", cert.ok, length=cert.length, point=f"Q^{m}_{i + 1}"))
        return CheckReport(name="punctual-lengths", entries=tuple(entries))

    # ── Interpolating sections ──────────────────────────────
    @staticmethod
    def _section_ideals(n: int, j: int) -> tuple[list, list]:
        base = S * X ** (n - j) + Y**j
        product = [sympy.expand(base * (X - C)), sympy.expand(base * Y)]
        target = [S * X ** (n - j + 1) - C * S * X ** (n - j) - C * Y**j, Y ** (j + 1)]
        return product, target

    def interpolating_section_check(self, n: int, j: int) -> CheckReport:
        """(s x^(n-j) + y^j)(x - c, y) against its expanded form, with and without xy = 0."""
        if not 1 <= j <= n - 1:
            raise IndexOutOfRange("j", j, 1, n - 1)
        gens = (X, Y, S, C)
        product, target = self._section_ideals(n, j)
        node = [X * Y]
        left_out, right_out = self.groebner.compare_ideals(product + node, target + node, gens)
        entries = [
            CheckEntry.of(
                f"n={n}/j={j}/node",
                not left_out and not right_out,
                product_outside=[str(g) for g in left_out],
                target_outside=[str(g) for g in right_out],
            )
        ]
        left_out, right_out = self.groebner.compare_ideals(product, target, gens)
        witnesses = [str(g) for g in left_out + right_out]
        entries.append(CheckEntry.of(f"n={n}/j={j}/smooth-control", bool(witnesses), witnesses=witnesses))
        return CheckReport(name="interpolating-section", entries=tuple(entries))

    def section_chart_equation(self, n: int, j: int) -> CheckReport:
        """Ratio [u_j : v_j] for which F_j (m = n+1, a_n = -c, other a, d = 0) lies in the section ideal."""
        if not 1 <= j <= n - 1:
            raise IndexOutOfRange("j", j, 1, n - 1)
        m = n + 1
        generators = self.charts.f_generators(m)
        ctx = generators.ctx
        u, v = sympy.symbols("u v")
        values = {ctx.symbol(f"a{k}"): 0 for k in range(m)}
        values.update({ctx.symbol(f"d{k}"): 0 for k in range(m)})
        values[ctx.symbol(f"a{n}")] = -C
        values[ctx.symbol(f"u{j}")] = u
        values[ctx.symbol(f"v{j}")] = v
        values[ctx.symbol("x")] = X
        values[ctx.symbol("y")] = Y
        f_j = sympy.expand(ctx.to_sympy(generators[j]).xreplace(values))

        _, target = self._section_ideals(n, j)
        domain = sympy.QQ.frac_field(S, C, u, v)
        basis = sympy.groebner(target + [X * Y], X, Y, order="grevlex", domain=domain)
        _, remainder = basis.reduce(f_j)
        candidates = set()
        for coeff in sympy.Poly(remainder, X, Y).coeffs():
            numerator = sympy.numer(sympy.together(coeff))
            for factor, _ in sympy.factor_list(numerator)[1]:
                if factor.free_symbols & {u, v}:
                    candidates.add(sympy.expand(factor))

        def proportional(expr, reference) -> bool:
            return sympy.cancel(expr / reference).is_number

        computed = C * u + S * v
        printed = C * u - S * v
        equation = next(iter(candidates)) if len(candidates) == 1 else None
        ok = equation is not None and proportional(equation, computed)
        matches_printed = equation is not None and proportional(equation, printed)
        logger.debug("Section chart equation n=%s j=%s: %s", n, j, candidates)
        entry = CheckEntry.compared(
            f"n={n}/j={j}",
            ok,
            matches_printed,
            equation=f"{equation} = 0" if equation is not None else sorted(map(str, candidates)),
        )
        return CheckReport(name="section-chart-equation", entries=(entry,))

    def section_sweep(self, max_n: int | None = None) -> CheckReport:
        max_n = max_n or settings.section_max_n
        entries = []
        for n in range(2, max_n + 1):
            for j in range(1, n):
                entries.extend(self.interpolating_section_check(n, j).entries)
                entries.extend(self.section_chart_equation(n, j).entries)
        return CheckReport(name="interpolating-sections", entries=tuple(entries))
