"""Suite routes: turn a verify request into the grid of check jobs it covers."""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Callable, Iterable

from config import settings
from models.certificate import Anchor
from models.report import CheckReport
from schemas.verify_schemas import VerifyRequest
from services.cache_service import GroebnerCache
from services.chart_service import ChartService
from services.elimination_service import EliminationService
from services.groebner_service import GroebnerService
from services.ring_service import RingService
from services.scroll_service import ScrollService
from services.strata_service import StrataService
from services.symfun_service import SymfunService
from services.vdm_service import VdmService

logger = logging.getLogger("nodehilb.routes.suite")

# One anchor per report family: the claim's name and a short verbatim quote.
ANCHORS: dict[str, Anchor] = {
    name: Anchor(location=location, quote=quote)
    for name, (location, quote) in {
        "sigma-relations": ("Relations among elementary symmetric functions", "these functions satisfy the relations"),
        "sigma-express": ("Symmetrization algorithm", "is an embedding locally near"),
        "g-elements": ("Mixed Van der Monde generators", "an elementary calculation shows"),
        "g-recurrence": ("Mixed Van der Monde recurrence", "multiply each jth column"),
        "g-syzygies": ("Generation of the half-discriminant ideal", "is generated, locally near"),
        "branch-flip": ("Mixed Van der Monde generators", "an elementary calculation shows"),
        "discriminant": ("Generation of the half-discriminant ideal", "is generated, locally near"),
        "eta": ("Eta generators", "this is a polynomial in the"),
        "theta-orders": ("Vanishing orders", "the vanishing order of"),
        "intermediate-diagonals": ("G-bundles and intermediate diagonals", "the vanishing order of"),
        "localization": ("Localization formula", "Localization formula"),
        "chart-flatness": ("Local Hilbert scheme", "flat of length m over"),
        "chart-confluence": ("Local Hilbert scheme", "a co-basis for the universal ideal"),
        "f-relations": ("Universal ideal generators", "defined by the equations"),
        "sigma-uv": ("H-equations", "be the subscheme defined by"),
        "z-relations": ("Z-coordinates", "These satisfy the relations"),
        "z-vanishing": ("Z-coordinates", "a family of rational normal curves"),
        "elimination": ("Symmetric-product equations", "schematically defined by the equations"),
        "strata": ("Strata fibres", "over this point is schematically"),
        "boundary-fibres": ("Strata fibres", "persist, so we conclude"),
        "punctual-lengths": ("Local Hilbert scheme", "punctual Hilbert scheme of the special fibre"),
        "interpolating-section": ("Local node-scroll structure", "there is a well-defined section"),
        "section-chart-equation": ("Local node-scroll structure", "is defined locally by"),
        "interpolating-sections": ("Local node-scroll structure", "there is a well-defined section"),
        "d-class-symmetry": ("D-classes", "it is natural to set"),
        "local-global": ("Local node-scroll structure", "using the quotient convention for"),
        "node-scroll": ("Node scroll theorem", "Node scroll theorem"),
        "polyscroll": ("Node polyscroll theorem", "Node Polyscroll Theorem"),
        "restriction": ("Pullback class", "the cotangent (psi) class"),
    }.items()
}


@dataclass(frozen=True)
class CheckJob:
    family: str
    key: str
    run: Callable[[], CheckReport]

    @property
    def anchor(self) -> Anchor:
        return ANCHORS[self.family]

    @property
    def id(self) -> str:
        return f"{self.family}/{self.key}"


class SuiteRouter:
    """Holds one service graph per request so every job shares the same cache."""

    def __init__(self, request: VerifyRequest) -> None:
        self.request = request
        self.cache = GroebnerCache(request.cache)
        groebner = GroebnerService(self.cache)
        self.ring = RingService(groebner)
        self.symfun = SymfunService(self.ring)
        self.vdm = VdmService(self.ring, self.symfun)
        self.charts = ChartService(self.ring, self.vdm)
        self.strata = StrataService(groebner, self.charts)
        self.elimination = EliminationService(self.cache.directory)
        self.scrolls = ScrollService(self.ring, self.vdm)
        self._routes: dict[str, Callable[[], Iterable[CheckJob]]] = {
            "sigma": self._sigma,
            "g": self._g,
            "orders": self._orders,
            "eta": self._eta,
            "charts": self._charts,
            "z": self._z,
            "elimination": self._elimination,
            "strata": self._strata,
            "scrolls": self._scrolls,
        }

    def jobs(self) -> list[CheckJob]:
        jobs = [job for suite in self.request.suites for job in self._routes[suite]()]
        logger.info("Suite '%s' expands to %d jobs", self.request.suite, len(jobs))
        return jobs

    # ── Grids ───────────────────────────────────────────────
    def _grid(self, bound: int, low: int = 1) -> list[int]:
        """Values of m to visit: the requested m alone, or low..bound."""
        if self.request.m is not None:
            return [self.request.m] if self.request.m >= low else []
        return list(range(low, bound + 1))

    @staticmethod
    def _job(family: str, key: str, fn: Callable, *args, **kwargs) -> CheckJob:
        return CheckJob(family=family, key=key, run=partial(fn, *args, **kwargs))

    # ── Suites ──────────────────────────────────────────────
    def _sigma(self):
        for m in self._grid(settings.identity_max_m):
            yield self._job("sigma-relations", f"m={m}", self.symfun.verify_sigma_relations, m)
        for m in self._grid(settings.express_max_m):
            yield self._job("sigma-express", f"m={m}", self.symfun.express_check, m, settings.express_max_degree)

    def _g(self):
        for m in self._grid(settings.identity_max_m):
            yield self._job("g-elements", f"m={m}", self.vdm.verify_g_elements, m)
            yield self._job("g-recurrence", f"m={m}", self.vdm.verify_g_recurrence, m)
            yield self._job("g-syzygies", f"m={m}", self.vdm.verify_g_syzygies, m)
            yield self._job("branch-flip", f"m={m}", self.vdm.verify_branch_flip, m)
        for m in self._grid(settings.discriminant_max_m):
            yield self._job("discriminant", f"m={m}", self.vdm.discriminant_check, m)

    def _orders(self):
        for m in self._grid(settings.identity_max_m, low=2):
            yield self._job("theta-orders", f"m={m}", self.vdm.theta_order_table, m)
            yield self._job("intermediate-diagonals", f"m={m}", self.vdm.intermediate_diagonal_check, m)
        for m in self._grid(4, low=2):
            for k_x in range(m):
                for k_y in range(m - k_x):
                    for j in range(1, m - k_x - k_y + 1):
                        key = f"m={m}/k_x={k_x},k_y={k_y},j={j}"
                        yield self._job("localization", key, self.vdm.localization_factorization, m, k_x, k_y, j)

    def _eta(self):
        for m in self._grid(settings.eta_max_m):
            for i in range(1, m + 1):
                for j in range(1, m + 1):
                    if self.request.j is None or self.request.j == j:
                        yield self._job("eta", f"m={m}/i={i},j={j}", self.vdm.eta_check, m, i, j)

    def _charts(self):
        for m in self._grid(settings.chart_max_m):
            yield self._job("chart-flatness", f"m={m}", self.charts.verify_charts, m)
            yield self._job("f-relations", f"m={m}", self.charts.verify_f_relations, m)
            yield self._job("chart-confluence", f"m={m}", self.charts.verify_confluence, m)
            yield self._job("sigma-uv", f"m={m}", self.charts.sigma_uv_check, m)

    def _z(self):
        for m in self._grid(settings.identity_max_m, low=2):
            yield self._job("z-relations", f"m={m}", self.charts.z_relations_check, m)
            yield self._job("z-vanishing", f"m={m}", self.charts.z_vanishing_check, m)

    def _elimination(self):
        request = self.request
        bound = settings.elimination_slow_max_m if request.slow else settings.elimination_max_m
        for m in self._grid(bound):
            # an explicit --m never lifts the slow gate
            if m > bound and not request.overridden:
                logger.info("Elimination at m=%s needs %s; not scheduled", m, "--override" if request.slow else "--slow")
                continue
            yield self._job(
                "elimination",
                f"m={m}",
                self.elimination.elimination_check,
                m,
                request.slow,
                override=request.overridden,
                timeout=request.timeout,
            )

    def _strata(self):
        for m in self._grid(settings.strata_max_m):
            yield self._job("strata", f"m={m}", self.strata.strata_check, m)
            yield self._job("boundary-fibres", f"m={m}", self.strata.boundary_check, m)
            yield self._job("punctual-lengths", f"m={m}", self.strata.punctual_length_check, m)
        n, j = self.request.n, self.request.j
        if n is not None and j is not None:
            yield self._job("interpolating-section", f"n={n}/j={j}", self.strata.interpolating_section_check, n, j)
            yield self._job("section-chart-equation", f"n={n}/j={j}", self.strata.section_chart_equation, n, j)
        elif self.request.m is None:
            yield self._job("interpolating-sections", "sweep", self.strata.section_sweep)

    def _scrolls(self):
        request = self.request
        max_n = request.n or settings.scroll_max_n
        yield self._job("d-class-symmetry", f"n<={max_n}", self.scrolls.d_class_symmetry_check, max_n)
        yield self._job("node-scroll", f"n<={max_n}", self.scrolls.scroll_check, max_n)
        for m in self._grid(settings.polyscroll_max_m, low=2):
            yield self._job("polyscroll", f"m={m}", self.scrolls.polyscroll_check, m)
        m, n, j = request.m, request.n, request.j
        if m is not None and n is not None and j is not None:
            yield self._job("restriction", f"m={m}/n={n},j={j}", self.scrolls.restriction_factorization, m, n, j)
        else:
            for m in self._grid(settings.restriction_max_m):
                yield self._job("restriction", f"m={m}", self.scrolls.restriction_table, m)

