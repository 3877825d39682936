"""Shared fixtures: services wired to a throwaway Gröbner cache."""

import pytest

from services.cache_service import GroebnerCache
from services.chart_service import ChartService
from services.groebner_service import GroebnerService
from services.ring_service import RingService, point_context
from services.scroll_service import ScrollService
from services.strata_service import StrataService
from services.symfun_service import SymfunService
from services.vdm_service import VdmService


@pytest.fixture
def cache_dir(tmp_path):
    return tmp_path / "cache"


@pytest.fixture
def groebner(cache_dir):
    return GroebnerService(GroebnerCache(cache_dir))


@pytest.fixture
def ring(groebner):
    return RingService(groebner)


@pytest.fixture
def symfun(ring):
    return SymfunService(ring)


@pytest.fixture
def vdm(ring, symfun):
    return VdmService(ring, symfun)


@pytest.fixture
def charts(ring, vdm):
    return ChartService(ring, vdm)


@pytest.fixture
def strata(groebner, charts):
    return StrataService(groebner, charts)


@pytest.fixture
def scrolls(ring, vdm):
    return ScrollService(ring, vdm)


@pytest.fixture
def ctx2():
    return point_context(2)


@pytest.fixture
def ctx3():
    return point_context(3)
