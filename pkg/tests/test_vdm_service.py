from concurrent.futures import ThreadPoolExecutor

import pytest
import sympy

from exceptions import IndexOutOfRange, PreconditionError
from models.report import CheckStatus
from models.sigma_expr import sigma_symbols


# ── Matrices and generators ───────────────────────────────
def test_mixed_vdm_rows(vdm, ctx3):
    matrix = vdm.mixed_vdm(3, 2)
    assert matrix.size == 3 and matrix.x_rows == 2 and matrix.y_rows == 1
    assert matrix.rows[1] == (ctx3.x(1), ctx3.x(2), ctx3.x(3))
    assert matrix.rows[2] == (ctx3.y(1), ctx3.y(2), ctx3.y(3))


def test_mixed_vdm_index_range(vdm):
    with pytest.raises(IndexOutOfRange):
        vdm.mixed_vdm(2, 3)


def test_first_generator_is_classical_vandermonde(vdm, ctx2):
    assert vdm.det_v(2, 1) in (ctx2.x(1) - ctx2.x(2), ctx2.x(2) - ctx2.x(1))


def test_last_generator_matches_sigma_form(vdm, ctx2):
    g = vdm.g_element(2, 2)
    assert g.det_form in (ctx2.y(2) - ctx2.y(1), ctx2.y(1) - ctx2.y(2))
    assert g.t_power == 1
    assert g.det_form == g.sigma_form * g.sign


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_g_elements_verify(vdm, m):
    report = vdm.verify_g_elements(m)
    assert report.status is CheckStatus.VERIFIED
    assert len(report.entries) == m


def test_recurrence_holds_up_to_sign(vdm):
    report = vdm.verify_g_recurrence(3)
    assert report.ok
    assert {e.detail["computed_sign"] for e in report.entries} <= {1, -1}


def test_recurrence_is_vacuous_at_one_point(vdm):
    assert vdm.verify_g_recurrence(1).entries == ()


def test_syzygies(vdm):
    report = vdm.verify_g_syzygies(3)
    assert report.status is CheckStatus.VERIFIED
    assert report.by_id("m=3/quadratic/i=1,j=3").detail["sign"] in (1, -1)
    assert not any("i=1,j=2" in e.id for e in report.entries if "quadratic" in e.id)


def test_branch_flip_at_two_points(vdm):
    entry = vdm.verify_branch_flip(2).entries[0]
    assert entry.detail["exponent"] == 1
    assert entry.detail["sign"] == -1
    assert entry.detail["sigma_power"] == 1


# ── Discriminant ──────────────────────────────────────────
def test_discriminant_of_two_points(vdm):
    sx, _, _ = sigma_symbols(2)
    sigma = vdm.discriminant_in_sigma(2)
    assert sympy.expand(sigma.expr - (sx[0] ** 2 - 4 * sx[1])) == 0


@pytest.mark.parametrize("m", [1, 2, 3, pytest.param(4, marks=pytest.mark.slow), pytest.param(5, marks=pytest.mark.slow)])
def test_discriminant_evaluates_to_square(vdm, m):
    assert vdm.discriminant_check(m).status is CheckStatus.VERIFIED


# ── Eta ───────────────────────────────────────────────────
def test_eta_diagonal_generator(vdm):
    entry = vdm.eta_check(2, 1, 1).entries[0]
    assert entry.detail["exponent"] == 0
    assert entry.status is CheckStatus.VERIFIED


def test_eta_mixed_exponent_is_corrected(vdm):
    entry = vdm.eta_check(2, 2, 1).entries[0]
    assert entry.detail["exponent"] == 1
    assert entry.detail["printed_exponent"] == 0
    assert entry.status is CheckStatus.CORRECTED


def test_eta_top_generator(vdm):
    assert vdm.eta_check(2, 2, 2).entries[0].detail["exponent"] == 2


def test_eta_index_range(vdm):
    with pytest.raises(IndexOutOfRange):
        vdm.eta_check(2, 3, 1)


# ── Valuations ────────────────────────────────────────────
def test_theta_valuations(vdm, ctx2, ctx3):
    assert vdm.theta_valuation(ctx2.x(1) - ctx2.x(2), {1}) == 0
    assert vdm.theta_valuation(ctx2.y(1), {1}) == 1
    assert vdm.theta_valuation(ctx3.x(2) - ctx3.x(3), {1}) == 1


def test_theta_table_hand_checked_cell(vdm):
    report = vdm.theta_order_table(3)
    cell = report.by_id("m=3/order/j=1,size=1")
    assert cell.detail["order"] == 1
    assert cell.detail["printed"] == 0
    assert cell.status is CheckStatus.CORRECTED


@pytest.mark.parametrize("m", [2, 3, 4])
def test_order_zero_at_two_adjacent_sizes(vdm, m):
    report = vdm.theta_order_table(m)
    for j in range(1, m + 1):
        zero = report.by_id(f"m={m}/order-zero/j={j}")
        assert zero.status is CheckStatus.VERIFIED
        sizes = zero.detail["zero_sizes"]
        assert len(sizes) == 2 and sizes[1] - sizes[0] == 1


def test_theta_table_needs_two_points(vdm):
    with pytest.raises(IndexOutOfRange):
        vdm.theta_order_table(1)


def test_intermediate_diagonals(vdm):
    assert vdm.intermediate_diagonal_check(3).ok


# ── Localization ──────────────────────────────────────────
def test_localization_single_cross_diagonal(vdm):
    assert vdm.localization_factorization(2, 1, 0, 1).ok


def test_localization_with_both_blocks(vdm):
    report = vdm.localization_factorization(3, 1, 1, 1)
    assert report.status is CheckStatus.VERIFIED
    assert report.entries[0].detail["mixed_factors"] == 1


def test_localization_precondition(vdm):
    with pytest.raises(PreconditionError):
        vdm.localization_factorization(2, 0, 1, 2)


def test_determinant_memo_is_shared_between_threads(vdm):
    with ThreadPoolExecutor(max_workers=4) as pool:
        dets = list(pool.map(lambda _: vdm.det_v(3, 2), range(8)))
    assert all(d is dets[0] for d in dets)
    assert len(vdm._dets) == 1
