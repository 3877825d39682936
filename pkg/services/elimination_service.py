"""Elimination service: recovering the symmetric-product equations from the Z-coordinate model."""

import logging
import multiprocessing
from pathlib import Path

import sympy

from config import settings
from exceptions import CheckTimeout, IndexOutOfRange
from models.report import CheckEntry, CheckReport
from models.sigma_expr import sigma_symbols
from services.cache_service import GroebnerCache
from services.groebner_service import GroebnerService

logger = logging.getLogger("nodehilb.services.elimination")


def z_symbols(m: int) -> tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"Z{i}") for i in range(1, m + 1))


def z_model_ideal(m: int) -> list[sympy.Expr]:
    """Quadratic Z relations, sigma-Z relations and the two boundary equations."""
    sx, sy, t = sigma_symbols(m)
    z = (None,) + z_symbols(m)

    def x(k):
        return sympy.Integer(1) if k == 0 else sx[k - 1]

    def y(k):
        return sympy.Integer(1) if k == 0 else sy[k - 1]

    if m == 1:
        return [(x(1) * y(1) - t) * z[1]]
    ideal = [z[i] * z[j] - t ** (j - i - 1) * z[i + 1] * z[j - 1] for i in range(1, m + 1) for j in range(i + 2, m + 1)]
    ideal += [y(i) * z[i] - x(m - i) * z[i + 1] for i in range(1, m)]
    ideal += [x(m) * z[2] - t * z[1], y(m) * z[m - 1] - t * z[m]]
    return ideal


def sigma_relation_ideal(m: int) -> list[sympy.Expr]:
    sx, sy, t = sigma_symbols(m)
    sigma_x = (sympy.Integer(1),) + sx
    sigma_y = (sympy.Integer(1),) + sy
    relations = []
    for j in range(m + 1):
        relations.append(sigma_y[m] * sigma_x[j] - t**j * sigma_y[m - j])
        relations.append(sigma_x[m] * sigma_y[j] - t**j * sigma_x[m - j])
    return [r for r in (sympy.expand(r) for r in relations) if r != 0]


def _eliminate(m: int, cache_dir: str) -> dict:
    """Worker body; returns plain strings so results cross process boundaries."""
    groebner = GroebnerService(GroebnerCache(Path(cache_dir)))
    sx, sy, t = sigma_symbols(m)
    keep = sx + sy + (t,)
    zs = z_symbols(m)
    ideal = z_model_ideal(m)
    target = sigma_relation_ideal(m)

    raw = groebner.eliminate(ideal, zs, keep)
    colons = []
    for z in zs:
        w = sympy.Dummy("w")
        colons.append(groebner.eliminate(ideal + [1 - w * z], (w,) + zs, keep))
    saturated = groebner.intersect(colons, keep)

    raw_outside, target_outside_raw = groebner.compare_ideals(raw, target, keep)
    sat_outside, target_outside_sat = groebner.compare_ideals(saturated, target, keep)
    return {
        "raw": [str(g) for g in raw],
        "saturated": [str(g) for g in saturated],
        "raw_outside_target": [str(g) for g in raw_outside],
        "target_outside_raw": [str(g) for g in target_outside_raw],
        "saturated_outside_target": [str(g) for g in sat_outside],
        "target_outside_saturated": [str(g) for g in target_outside_sat],
    }


class EliminationService:
    def __init__(self, cache_dir: Path | None = None) -> None:
        self.cache_dir = Path(cache_dir) if cache_dir is not None else Path(settings.cache_dir)

    def elimination_check(
        self, m: int, slow: bool = False, *, override: bool = False, in_process: bool = False, timeout: float | None = None
    ) -> CheckReport:
        """Saturate by (Z_1..Z_m), eliminate the Z's and compare with the sigma relations both ways."""
        bound = settings.elimination_slow_max_m if slow else settings.elimination_max_m
        if m < 1 or (m > bound and not override):
            raise IndexOutOfRange("m", m, 1, bound)
        if timeout is None:
            timeout = settings.slow_timeout_seconds if slow else settings.check_timeout_seconds
        check_id = f"elimination/m={m}"

        if in_process:
            result = _eliminate(m, str(self.cache_dir))
        else:
            with multiprocessing.get_context("spawn").Pool(1) as pool:
                pending = pool.apply_async(_eliminate, (m, str(self.cache_dir)))
                try:
                    result = pending.get(timeout)
                except multiprocessing.TimeoutError:
                    pool.terminate()
                    logger.warning("Elimination at m=%s exceeded %ss", m, timeout)
                    raise CheckTimeout(check_id, timeout) from None

        saturated_ok = not result["saturated_outside_target"] and not result["target_outside_saturated"]
        raw_equal = not result["raw_outside_target"] and not result["target_outside_raw"]
        entries = (
            CheckEntry.of(
                f"m={m}/saturated",
                saturated_ok,
                generators=result["saturated"],
                outside_target=result["saturated_outside_target"],
                target_outside=result["target_outside_saturated"],
            ),
            # the unsaturated image only has to sit inside the target
            CheckEntry.of(
                f"m={m}/raw",
                not result["raw_outside_target"],
                equal=raw_equal,
                generators=result["raw"],
                target_outside=result["target_outside_raw"],
            ),
        )
        logger.info("Elimination at m=%s: saturated %s, raw equal %s", m, saturated_ok, raw_equal)
        return CheckReport(name="elimination", entries=entries)
