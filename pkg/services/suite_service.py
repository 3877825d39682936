"""Suite service: run check jobs on a worker pool and assemble the certificate."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor

import gmpy2
import pydantic
import sympy

from config import settings
from exceptions import CheckTimeout, NodeHilbError
from models.certificate import Certificate, CheckRecord
from models.report import CheckStatus
from routes.suite_routes import CheckJob, SuiteRouter
from schemas.verify_schemas import VerifyRequest

logger = logging.getLogger("nodehilb.services.suite")


class SuiteService:
    # ── Jobs ────────────────────────────────────────────────
    @staticmethod
    def run_job(job: CheckJob, timings: bool = False) -> list[CheckRecord]:
        """Run one job; domain errors become a single failed record, timeouts a skipped one."""
        started = time.perf_counter()
        try:
            report = job.run()
        except CheckTimeout as exc:
            logger.warning("Skipped %s: %s", job.id, exc.message)
            return [CheckRecord(id=job.id, anchor=job.anchor, status=CheckStatus.SKIPPED, detail={"reason": exc.message})]
        except NodeHilbError as exc:
            logger.error("Job %s raised %s: %s", job.id, type(exc).__name__, exc.message)
            return [
                CheckRecord(
                    id=job.id,
                    anchor=job.anchor,
                    status=CheckStatus.FAILED,
                    detail={"error": type(exc).__name__, "message": exc.message},
                )
            ]
        millis = round((time.perf_counter() - started) * 1000) if timings else 0

        records = [
            CheckRecord(
                id=f"{report.name}/{entry.id}",
                anchor=job.anchor,
                status=entry.status,
                detail=entry.detail,
                millis=millis,
            )
            for entry in report.entries
        ]
        level = logging.INFO if report.ok else logging.WARNING
        logger.log(level, "%s: %d checks, %s", job.id, len(records), report.status.value)
        return records

    # ── Suites ──────────────────────────────────────────────
    def run_suite(self, request: VerifyRequest) -> Certificate:
        router = SuiteRouter(request)
        jobs = router.jobs()
        with ThreadPoolExecutor(max_workers=request.jobs, thread_name_prefix="nodehilb") as pool:
            batches = list(pool.map(lambda job: self.run_job(job, request.timings), jobs))
        records = sorted((record for batch in batches for record in batch), key=lambda record: record.id)

        environment = {
            "engine": settings.engine_version,
            "sympy": sympy.__version__,
            "gmpy2": gmpy2.version(),
            "pydantic": pydantic.VERSION,
        }
        if request.timings:
            environment.update(
                workers=request.jobs,
                cache_hits=router.cache.hits,
                cache_misses=router.cache.misses,
            )
        certificate = Certificate(
            version=settings.engine_version,
            suite=request.suite,
            params=request.params(),
            checks=tuple(records),
            environment=environment,
        )
        counts = {status.value: sum(1 for s in certificate.statuses() if s is status) for status in CheckStatus}
        logger.info("Suite '%s' finished: %s", request.suite, counts)
        return certificate
