import pytest

from config import settings
from exceptions import CheckTimeout, InvalidStratum
from models.report import CheckStatus, worst_status
from routes.suite_routes import ANCHORS, CheckJob, SuiteRouter
from schemas.verify_schemas import VerifyRequest
from services.emit_service import EmitService
from services.suite_service import SuiteService

suite_service = SuiteService()


def _request(tmp_path, **fields):
    return VerifyRequest(cache=tmp_path / "cache", **fields)


# ── Routing ───────────────────────────────────────────────
def test_every_route_family_has_an_anchor(tmp_path):
    router = SuiteRouter(_request(tmp_path, suite="all"))
    assert {job.family for job in router.jobs()} <= set(ANCHORS)


def test_explicit_m_restricts_the_grid(tmp_path):
    router = SuiteRouter(_request(tmp_path, suite="g", m=3))
    assert {job.key for job in router.jobs()} == {"m=3"}


def test_explicit_m_keeps_the_slow_gate(tmp_path):
    assert SuiteRouter(_request(tmp_path, suite="elimination", m=3)).jobs() == []
    (job,) = SuiteRouter(_request(tmp_path, suite="elimination", m=3, slow=True)).jobs()
    assert job.key == "m=3" and job.run.keywords["override"] is False
    assert SuiteRouter(_request(tmp_path, suite="elimination", m=4, slow=True)).jobs() == []
    overridden = _request(tmp_path, suite="elimination", m=4, slow=True, override=settings.override_token)
    assert [job.key for job in SuiteRouter(overridden).jobs()] == ["m=4"]


def test_default_grids_reach_the_full_ranges(tmp_path):
    keys = {job.id for job in SuiteRouter(_request(tmp_path, suite="g")).jobs()}
    assert "discriminant/m=5" in keys
    express = [job for job in SuiteRouter(_request(tmp_path, suite="sigma")).jobs() if job.family == "sigma-express"]
    assert [job.key for job in express] == ["m=1", "m=2", "m=3", "m=4"]
    assert all(job.run.args[-1] == 6 for job in express)


def test_eta_filters_by_j(tmp_path):
    router = SuiteRouter(_request(tmp_path, suite="eta", m=3, j=2))
    assert [job.key for job in router.jobs()] == ["m=3/i=1,j=2", "m=3/i=2,j=2", "m=3/i=3,j=2"]


# ── Jobs ──────────────────────────────────────────────────
def _raising(exc):
    def run():
        raise exc

    return run


def test_domain_error_becomes_failed_record():
    job = CheckJob(family="strata", key="m=3", run=_raising(InvalidStratum(3, 2, 1)))
    (record,) = suite_service.run_job(job)
    assert record.id == "strata/m=3"
    assert record.status is CheckStatus.FAILED
    assert record.detail["error"] == "InvalidStratum"


def test_timeout_becomes_skipped_record():
    job = CheckJob(family="elimination", key="m=3", run=_raising(CheckTimeout("elimination/m=3", 1.0)))
    (record,) = suite_service.run_job(job)
    assert record.status is CheckStatus.SKIPPED
    assert record.anchor == ANCHORS["elimination"]


# ── Suites ────────────────────────────────────────────────
def test_sigma_suite_is_verified(tmp_path):
    certificate = suite_service.run_suite(_request(tmp_path, suite="sigma", m=2))
    ids = [record.id for record in certificate.checks]
    assert ids == sorted(ids) and len(ids) == len(set(ids))
    assert worst_status(certificate.statuses()) is CheckStatus.VERIFIED
    assert certificate.params == {"m": 2, "slow": False}
    assert all(record.millis == 0 for record in certificate.checks)


def test_eta_corrections_raise_severity(tmp_path):
    certificate = suite_service.run_suite(_request(tmp_path, suite="eta", m=2))
    assert worst_status(certificate.statuses()).severity == 1


@pytest.mark.parametrize("suite", ["g", "strata"])
def test_output_does_not_depend_on_worker_count(tmp_path, suite):
    emit = EmitService()
    single = suite_service.run_suite(_request(tmp_path, suite=suite, m=2, jobs=1))
    pooled = suite_service.run_suite(_request(tmp_path, suite=suite, m=2, jobs=3))
    assert emit.to_json(single) == emit.to_json(pooled)


def test_timings_are_recorded_on_request(tmp_path):
    certificate = suite_service.run_suite(_request(tmp_path, suite="sigma", m=1, timings=True, jobs=2))
    assert certificate.environment["workers"] == 2
    assert "cache_hits" in certificate.environment
