"""Scroll service: D^n_j classes, node scrolls and polyscrolls, and the restriction factorization."""

import logging
from itertools import permutations
from math import comb

import sympy

from config import settings
from exceptions import IdenticallyZero, IndexOutOfRange, MultiplicityOverflow, PreconditionError
from models.pic_class import (
    ClassContext,
    D_THETA_1,
    D_THETA_2,
    NM_X,
    NM_Y,
    PSI_X,
    PSI_Y,
    PicClass,
    PolyscrollResult,
    ScrollDescriptor,
    gamma,
)
from models.qpoly import QuotientContext
from models.registry import VariableKind, VariableRegistry
from models.report import CheckEntry, CheckReport
from services.ring_service import RingService
from services.vdm_service import VdmService

logger = logging.getLogger("nodehilb.services.scroll")

# local divisors of the interpolating section, read as norm divisors
LOCAL_DICTIONARY = {D_THETA_1: PicClass.symbol(NM_X), D_THETA_2: PicClass.symbol(NM_Y)}


class ScrollService:
    def __init__(self, ring: RingService | None = None, vdm: VdmService | None = None) -> None:
        self.ring = ring or RingService()
        self.vdm = vdm or VdmService(self.ring)

    # ── Classes ─────────────────────────────────────────────
    @staticmethod
    def d_class(n: int, j: int, k: int = 0, m: int | None = None) -> PicClass:
        """-C(n-j+1,2) psi_x - C(j,2) psi_y + (n-j+1) Nm_x + j Nm_y, over the stratum of length m (default n + k)."""
        if not 1 <= j <= n:
            raise IndexOutOfRange("j", j, 1, n)
        if k < 0:
            raise IndexOutOfRange("k", k, 0, settings.scroll_max_n)
        m = n + k if m is None else m
        if m < n + k:
            raise MultiplicityOverflow(n + k, m)
        return PicClass(
            coeffs={
                PSI_X: -comb(n - j + 1, 2),
                PSI_Y: -comb(j, 2),
                NM_X: n - j + 1,
                NM_Y: j,
            },
            context=ClassContext(k=k, m=m, n=(n,), j=(j,)),
        )

    def ordered_pullback_class(self, m: int, n: int, j: int) -> PicClass:
        """d_class(n, min(j, n), m - n) + Gamma<m - n>."""
        if not 1 <= n <= m:
            raise IndexOutOfRange("n", n, 1, m)
        if not 1 <= j <= m:
            raise IndexOutOfRange("j", j, 1, m)
        k = m - n
        return self.d_class(n, min(j, n), k) + PicClass.symbol(gamma(k))

    @staticmethod
    def branch_swap(cls_: PicClass) -> PicClass:
        return cls_.swap()

    # ── Scrolls ─────────────────────────────────────────────
    def node_scroll(self, n: int, j: int, k: int, m: int | None = None) -> ScrollDescriptor:
        """Standard form: summands (D^n_j, D^n_(j+1)), polarization -Gamma<m> + Gamma<m-n>."""
        if not 1 <= j < n:
            raise IndexOutOfRange("j", j, 1, n - 1)
        m = n + k if m is None else m
        if m < n + k:
            raise MultiplicityOverflow(n + k, m)
        context = ClassContext(k=k, m=m, n=(n,))
        return ScrollDescriptor(
            n=n,
            j=j,
            k=k,
            m=m,
            summands=(self.d_class(n, j, k, m), self.d_class(n, j + 1, k, m)),
            sections=(f"Q_{j}", f"Q_{j + 1}"),
            polarization=(PicClass(coeffs={gamma(m): -1}) + PicClass.symbol(gamma(m - n))).within(context),
        )

    @staticmethod
    def dual_form(descriptor: ScrollDescriptor) -> ScrollDescriptor:
        """Summands negated, polarization shifted by -(sum of summands), section labels swapped."""
        first, second = descriptor.summands
        return descriptor.model_copy(
            update={
                "summands": (-first, -second),
                "sections": (descriptor.sections[1], descriptor.sections[0]),
                "polarization": descriptor.polarization - (first + second),
                "form": "dual" if descriptor.form == "standard" else "standard",
            }
        )

    def polyscroll(self, ns: list[int], js: list[int], m: int) -> PolyscrollResult:
        if not ns or len(ns) != len(js):
            raise PreconditionError("node multiplicities and indices must be non-empty lists of equal length")
        total = sum(ns)
        if total > m:
            raise MultiplicityOverflow(total, m)
        k = m - total
        descriptors = []
        remaining = m
        polarization = PicClass()
        for n, j in zip(ns, js):
            scroll = self.node_scroll(n, j, k, m=remaining)
            descriptors.append(scroll)
            polarization = polarization + scroll.polarization
            remaining -= n
        # the polarization sees the multiset of multiplicities, not their order
        context = ClassContext(k=k, m=m, n=tuple(sorted(ns)))
        expected = PicClass(coeffs={gamma(m): -1, gamma(k): 1}, context=context)
        return PolyscrollResult(
            m=m,
            context=ClassContext(k=k, m=m, n=tuple(ns), j=tuple(js)),
            descriptors=tuple(descriptors),
            polarization=polarization.within(context),
            expected=expected,
        )

    # ── Checks ──────────────────────────────────────────────
    def d_class_symmetry_check(self, max_n: int | None = None) -> CheckReport:
        max_n = max_n or settings.scroll_max_n
        entries = []
        for n in range(1, max_n + 1):
            for j in range(1, n + 1):
                holds = self.branch_swap(self.d_class(n, j)) == self.d_class(n, n + 1 - j)
                entries.append(CheckEntry.of(f"n={n}/j={j}", holds))
        return CheckReport(name="d-class-symmetry", entries=tuple(entries))

    def local_global_consistency(self, n: int, j: int) -> CheckReport:
        if not 1 <= j < n:
            raise IndexOutOfRange("j", j, 1, n - 1)
        difference = self.d_class(n, j + 1) - self.d_class(n, j)
        expected = PicClass(coeffs={PSI_X: n - j, PSI_Y: -j, NM_X: -1, NM_Y: 1})
        local = difference.truncate(PSI_X, PSI_Y)
        # L_j - L_(j+1) = Dtheta'' - Dtheta' in the local model
        local_model = (PicClass.symbol(D_THETA_2) - PicClass.symbol(D_THETA_1)).substitute(LOCAL_DICTIONARY)
        entries = (
            CheckEntry.of(
                f"n={n}/j={j}/difference", difference.same_coefficients(expected), difference=difference.to_string()
            ),
            CheckEntry.of(
                f"n={n}/j={j}/local",
                local.same_coefficients(local_model),
                truncated=local.to_string(),
                local_model=local_model.to_string(),
                assumption="Dtheta' -> Nm_x, Dtheta'' -> Nm_y",
            ),
        )
        return CheckReport(name="local-global", entries=entries)

    def scroll_check(self, max_n: int | None = None) -> CheckReport:
        """Local/global consistency, polarization, twist invariance and the dual form for all 1 <= j < n <= max_n."""
        max_n = max_n or settings.scroll_max_n
        entries = []
        twist = PicClass(coeffs={PSI_X: 1, NM_Y: -2})
        for n in range(2, max_n + 1):
            for j in range(1, n):
                entries.extend(self.local_global_consistency(n, j).entries)
                for k in (0, 2):
                    scroll = self.node_scroll(n, j, k)
                    # built from n and k alone
                    expected = PicClass(coeffs={gamma(n + k): -1, gamma(k): 1})
                    holds = scroll.polarization.context == ClassContext(k=k, m=n + k, n=(n,)) and all(
                        identity.polarization.same_coefficients(expected) for identity in scroll.identities()
                    )
                    entries.append(
                        CheckEntry.of(
                            f"n={n}/j={j}/k={k}/polarization", holds, polarization=scroll.polarization.to_string()
                        )
                    )
                scroll = self.node_scroll(n, j, 0)
                entries.append(
                    CheckEntry.of(
                        f"n={n}/j={j}/twist",
                        scroll.twisted(twist).section_difference == scroll.section_difference,
                    )
                )
                dual = self.dual_form(scroll)
                entries.append(
                    CheckEntry.of(
                        f"n={n}/j={j}/dual",
                        dual.section_difference == -scroll.section_difference and self.dual_form(dual) == scroll,
                    )
                )
        return CheckReport(name="node-scroll", entries=tuple(entries))

    def polyscroll_check(self, m: int) -> CheckReport:
        """Telescoping and order independence over compositions with at most three nodes."""
        entries = []
        for ns in _compositions(m, max_parts=3):
            js = [1] * len(ns)
            js[-1] = ns[-1] - 1
            base = self.polyscroll(list(ns), js, m)
            # built from m and the total multiplicity alone
            expected = PicClass(coeffs={gamma(m): -1, gamma(m - sum(ns)): 1})
            same = True
            summands = _summand_texts(base)
            for order in set(permutations(range(len(ns)))):
                shuffled = self.polyscroll([ns[i] for i in order], [js[i] for i in order], m)
                same &= shuffled.polarization == base.polarization
                same &= _summand_texts(shuffled) == summands
            label = ",".join(map(str, ns))
            entries.append(
                CheckEntry.of(
                    f"m={m}/n={label}/telescopes",
                    base.polarization.same_coefficients(expected),
                    polarization=base.polarization.to_string(),
                )
            )
            entries.append(CheckEntry.of(f"m={m}/n={label}/order", same))
        return CheckReport(name="polyscroll", entries=tuple(entries))

    # ── Restriction factorization ───────────────────────────
    def restriction_factorization(self, m: int, n: int, j: int) -> CheckReport:
        """Restrict det V^m_j to the node configuration and read off its factor counts."""
        if not 1 <= n <= m:
            raise IndexOutOfRange("n", n, 1, m)
        if not 1 <= j <= m:
            raise IndexOutOfRange("j", j, 1, m)
        j0 = min(j, n)
        k = m - n
        x_node, y_node = n - j0 + 1, j0 - 1
        y_free = j - j0
        x_free = k - y_free

        names = (
            [f"w{a}" for a in range(1, x_node + 1)]
            + [f"z{b}" for b in range(1, y_node + 1)]
            + [f"q{c}" for c in range(1, y_free + 1)]
            + [f"p{c}" for c in range(1, x_free + 1)]
        )
        target = QuotientContext(VariableRegistry.for_points(0, tuple((n_, VariableKind.AUX) for n_ in names)))
        source = self.vdm.det_v(m, j)
        registry = source.ctx.registry
        assignment: dict[str, object] = {registry.t_name: 0}
        for point, name in zip(registry.points, names):
            x_name = registry.x_names[point - 1]
            y_name = registry.y_names[point - 1]
            if name[0] in "wp":
                assignment[x_name], assignment[y_name] = target.var(name), target.zero
            else:
                assignment[x_name], assignment[y_name] = target.zero, target.var(name)
        restricted = self.ring.substitute(source, assignment, target=target)
        if restricted.is_zero:
            raise IdenticallyZero(m, n, j)

        symbols = {name: target.symbol(name) for name in names}
        groups = {prefix: {s for n_, s in symbols.items() if n_[0] == prefix} for prefix in "wzpq"}
        _, factors = sympy.factor_list(target.to_sympy(restricted))
        diagonal = {prefix: 0 for prefix in "wzpq"}
        monomial = {prefix: 0 for prefix in "wzpq"}
        residual = sympy.Integer(1)
        for factor, mult in factors:
            free = factor.free_symbols
            if factor.is_Symbol:
                monomial[factor.name[0]] += mult
                if factor.name[0] in "pq":
                    residual *= factor**mult
                continue
            prefix = next((p for p, group in groups.items() if free <= group), None)
            if prefix is not None and len(free) == 2 and sympy.Poly(factor, *free).total_degree() == 1:
                diagonal[prefix] += mult
                if prefix in "pq":
                    residual *= factor**mult
                continue
            residual *= factor**mult

        node_zero = {symbols[n_]: 0 for n_ in names if n_[0] in "wz"}
        collapsed = sympy.expand(residual.xreplace(node_zero))

        def branch_order(free_name: str):
            if free_name not in symbols or collapsed == 0:
                return None
            return min(e for (e,) in sympy.Poly(collapsed, symbols[free_name]).monoms())

        x_order, y_order = branch_order("p1"), branch_order("q1")
        gamma_count = diagonal["p"] + diagonal["q"]
        prefix = f"m={m}/n={n}/j={j}"
        entries = [
            CheckEntry.of(f"{prefix}/nonzero", True, j0=j0, restriction_terms=len(restricted)),
            CheckEntry.compared(
                f"{prefix}/w-diagonal", True, diagonal["w"] == comb(x_node, 2), count=diagonal["w"], printed=comb(x_node, 2)
            ),
            CheckEntry.compared(
                f"{prefix}/z-diagonal", True, diagonal["z"] == comb(j0, 2), count=diagonal["z"], printed=comb(j0, 2)
            ),
            CheckEntry.compared(
                f"{prefix}/gamma",
                True,
                gamma_count == comb(x_free, 2) + comb(y_free, 2),
                count=gamma_count,
                free_points=[x_free, y_free],
            ),
        ]
        if x_order is not None:
            entries.append(
                CheckEntry.compared(f"{prefix}/x-branch-order", True, x_order == n - j0 + 1, order=x_order, printed=n - j0 + 1)
            )
        if y_order is not None:
            entries.append(CheckEntry.compared(f"{prefix}/y-branch-order", True, y_order == j0, order=y_order, printed=j0))
        entries.append(CheckEntry.of(f"{prefix}/monomials", True, counts=monomial))
        logger.debug("Restriction %s: diagonals %s, monomials %s", prefix, diagonal, monomial)
        return CheckReport(name="restriction", entries=tuple(entries))

    def restriction_table(self, m: int) -> CheckReport:
        """restriction_factorization over every (n, j) at fixed m."""
        entries = []
        for n in range(1, m + 1):
            for j in range(1, m + 1):
                try:
                    entries.extend(self.restriction_factorization(m, n, j).entries)
                except IdenticallyZero as exc:
                    entries.append(CheckEntry.of(f"m={m}/n={n}/j={j}/nonzero", False, error=exc.message))
        return CheckReport(name="restriction", entries=tuple(entries))


def _compositions(m: int, max_parts: int) -> list[tuple[int, ...]]:
    """Ordered tuples of parts >= 2 with sum <= m."""
    out: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], room: int) -> None:
        if prefix:
            out.append(prefix)
        if len(prefix) == max_parts:
            return
        for part in range(2, room + 1):
            extend(prefix + (part,), room - part)

    extend((), m)
    return out


def _summand_texts(result: PolyscrollResult) -> list[tuple[str, str]]:
    return sorted((first.to_string(), second.to_string()) for first, second in (d.summands for d in result.descriptors))
