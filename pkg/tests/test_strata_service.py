import pytest

from exceptions import IndexOutOfRange, InvalidStratum, ZeroRatio
from models.report import CheckStatus


# ── Fibres ────────────────────────────────────────────────
def test_generic_fibre_is_a_chain(strata):
    fiber = strata.punctual_fiber(3, 0, 0)
    assert fiber.kind == "chain"
    assert [c.index for c in fiber.components] == [1, 2]
    assert fiber.components[0].endpoints == (1, 2)


def test_balanced_fibre_is_a_point(strata):
    fiber = strata.punctual_fiber(3, 1, 1)
    assert fiber.kind == "point" and fiber.point == 2
    assert fiber.vanishing == ("v1", "u2")


def test_single_component(strata):
    fiber = strata.punctual_fiber(4, 1, 1)
    assert [c.index for c in fiber.components] == [2]


def test_invalid_stratum(strata):
    with pytest.raises(InvalidStratum):
        strata.punctual_fiber(3, 2, 1)


def test_boundary_fibres(strata):
    assert strata.boundary_fiber(3, 0).point == 1
    top = strata.boundary_fiber(3, 3)
    assert top.point == 3 and top.index_flag
    middle = strata.boundary_fiber(3, 1)
    assert middle.kind == "chain" and middle.components[0].endpoints == (1, 2)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_strata_ranges(strata, m):
    assert strata.strata_check(m).status is CheckStatus.VERIFIED


def test_boundary_index_flag_is_a_correction(strata):
    report = strata.boundary_check(3)
    assert report.by_id("m=3/b=3").status is CheckStatus.CORRECTED
    assert report.ok


# ── Punctual ideals ───────────────────────────────────────
def test_principal_punctual_ideal(strata):
    cert = strata.punctual_ideal_length(3, 1, (2, 1))
    assert cert.kind == "principal"
    assert cert.length == 3 and cert.ok
    assert sorted(cert.standard_monomials) == ["1", "x", "y"]


def test_monomial_punctual_ideals(strata):
    cert = strata.punctual_ideal_length(3, 1, (0, 1))
    assert cert.length == 3
    assert sorted(cert.standard_monomials) == ["1", "x", "x**2"]
    assert strata.punctual_ideal_length(3, 0, (1, 0)).length == 3


def test_punctual_index_ranges(strata):
    with pytest.raises(IndexOutOfRange):
        strata.punctual_ideal_length(3, 3, (1, 0))
    with pytest.raises(IndexOutOfRange):
        strata.punctual_ideal_length(3, 3, (1, 1))


def test_zero_ratio(strata):
    with pytest.raises(ZeroRatio):
        strata.punctual_ideal_length(3, 1, (0, 0))


@pytest.mark.parametrize("m", [2, 4])
def test_every_punctual_ideal_has_length_m(strata, m):
    assert strata.punctual_length_check(m).status is CheckStatus.VERIFIED


# ── Interpolating sections ────────────────────────────────
@pytest.mark.parametrize("n,j", [(2, 1), (3, 1), (3, 2)])
def test_section_ideal_identity(strata, n, j):
    report = strata.interpolating_section_check(n, j)
    assert report.by_id(f"n={n}/j={j}/node").status is CheckStatus.VERIFIED
    control = report.by_id(f"n={n}/j={j}/smooth-control")
    assert control.detail["witnesses"]


def test_section_index_range(strata):
    with pytest.raises(IndexOutOfRange):
        strata.interpolating_section_check(2, 2)


def test_section_chart_equation_is_linear(strata):
    entry = strata.section_chart_equation(2, 1).entries[0]
    assert entry.status in (CheckStatus.VERIFIED, CheckStatus.CORRECTED)
    assert "matches_printed" in entry.detail
