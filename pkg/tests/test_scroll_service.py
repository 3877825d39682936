import pytest

from exceptions import ContextMismatch, IndexOutOfRange, MultiplicityOverflow
from models.pic_class import NM_X, NM_Y, PSI_X, PSI_Y, ClassContext, PicClass, gamma
from models.report import CheckStatus


# ── PicClass ──────────────────────────────────────────────
def test_zero_coefficients_are_dropped():
    assert PicClass.of(psi_x=0, Nm_y=2) == PicClass.symbol(NM_Y, 2)
    assert PicClass.of(psi_x=1) - PicClass.of(psi_x=1) == PicClass()


def test_unknown_symbol_is_rejected():
    with pytest.raises(ValueError):
        PicClass(coeffs={"kappa": 1})


def test_text_form_uses_basis_order():
    cls = PicClass(coeffs={NM_Y: 1, gamma(2): 1, PSI_X: -1, NM_X: 2})
    assert cls.to_string() == "-psi_x + 2*Nm_x + Nm_y + Gamma<2>"


def test_swap_exchanges_branches():
    assert PicClass.of(psi_x=2, Nm_y=-1).swap() == PicClass(coeffs={PSI_Y: 2, NM_X: -1})


def test_classes_over_different_k_do_not_combine(scrolls):
    with pytest.raises(ContextMismatch):
        scrolls.d_class(3, 1, 0) + scrolls.d_class(3, 1, 2)
    with pytest.raises(ContextMismatch):
        scrolls.d_class(3, 1, 0) - scrolls.d_class(2, 1, 1)


def test_classes_without_context_adopt_the_other(scrolls):
    total = scrolls.d_class(3, 2, 1) + PicClass.symbol(gamma(1))
    assert total.context == scrolls.d_class(3, 2, 1).context
    assert (PicClass.of(psi_x=1) + PicClass.of(Nm_x=1)).context is None


def test_sum_forgets_disagreeing_fields(scrolls):
    difference = scrolls.d_class(4, 2, 1) - scrolls.d_class(4, 1, 1)
    assert difference.context == ClassContext(k=1, m=5, n=(4,))


# ── D-classes ─────────────────────────────────────────────
def test_d_class_examples(scrolls):
    assert scrolls.d_class(2, 1).same_coefficients(PicClass(coeffs={PSI_X: -1, NM_X: 2, NM_Y: 1}))
    assert scrolls.d_class(3, 2).same_coefficients(PicClass(coeffs={PSI_X: -1, PSI_Y: -1, NM_X: 2, NM_Y: 2}))


def test_d_class_carries_its_stratum(scrolls):
    assert scrolls.d_class(3, 2, 1).context == ClassContext(k=1, m=4, n=(3,), j=(2,))
    assert scrolls.d_class(3, 2, 1, m=6).context.m == 6
    assert scrolls.d_class(3, 2, 0) != scrolls.d_class(3, 2, 3)
    assert scrolls.d_class(4, 1).swap().context.j == (4,)


def test_d_class_needs_room_for_free_points(scrolls):
    with pytest.raises(MultiplicityOverflow):
        scrolls.d_class(3, 1, 2, m=4)


def test_d_class_index_range(scrolls):
    with pytest.raises(IndexOutOfRange):
        scrolls.d_class(2, 3)


def test_d_class_branch_symmetry(scrolls):
    assert scrolls.d_class_symmetry_check(8).status is CheckStatus.VERIFIED


def test_ordered_pullback_adds_gamma(scrolls):
    assert scrolls.ordered_pullback_class(5, 3, 2) == scrolls.d_class(3, 2) + PicClass.symbol(gamma(2))


# ── Node scrolls ──────────────────────────────────────────
def test_node_scroll_summands(scrolls):
    scroll = scrolls.node_scroll(2, 1, 0)
    first, second = scroll.summands
    assert first.same_coefficients(PicClass(coeffs={PSI_X: -1, NM_X: 2, NM_Y: 1}))
    assert second.same_coefficients(PicClass(coeffs={PSI_Y: -1, NM_X: 1, NM_Y: 2}))
    assert scroll.sections == ("Q_1", "Q_2")
    assert scroll.polarization == PicClass(coeffs={gamma(2): -1, gamma(0): 1}, context=ClassContext(k=0, m=2, n=(2,)))


def test_node_scroll_fills_contexts(scrolls):
    scroll = scrolls.node_scroll(4, 2, 1)
    assert [s.context for s in scroll.summands] == [
        ClassContext(k=1, m=5, n=(4,), j=(2,)),
        ClassContext(k=1, m=5, n=(4,), j=(3,)),
    ]
    assert scroll.polarization.context == ClassContext(k=1, m=5, n=(4,))


def test_node_scroll_needs_j_below_n(scrolls):
    with pytest.raises(IndexOutOfRange):
        scrolls.node_scroll(3, 3, 0)


def test_dual_form_is_an_involution(scrolls):
    scroll = scrolls.node_scroll(4, 2, 1)
    dual = scrolls.dual_form(scroll)
    assert dual.form == "dual"
    assert dual.section_difference == -scroll.section_difference
    assert scrolls.dual_form(dual) == scroll


@pytest.mark.parametrize(
    "n,j,expected",
    [(2, 1, {PSI_X: 1, PSI_Y: -1, NM_X: -1, NM_Y: 1}), (5, 3, {PSI_X: 2, PSI_Y: -3, NM_X: -1, NM_Y: 1})],
)
def test_local_global_difference(scrolls, n, j, expected):
    report = scrolls.local_global_consistency(n, j)
    difference = report.by_id(f"n={n}/j={j}/difference")
    assert difference.status is CheckStatus.VERIFIED
    assert difference.detail["difference"] == PicClass(coeffs=expected).to_string()
    assert report.by_id(f"n={n}/j={j}/local").detail["truncated"] == "-Nm_x + Nm_y"


def test_scroll_check(scrolls):
    report = scrolls.scroll_check(8)
    assert report.status is CheckStatus.VERIFIED
    assert report.by_id("n=3/j=1/k=2/polarization").detail["polarization"] == "Gamma<2> - Gamma<5>"


def test_scroll_check_catches_a_wrong_polarization(scrolls, monkeypatch):
    real = scrolls.node_scroll

    def shifted(n, j, k, m=None):
        scroll = real(n, j, k, m)
        return scroll.model_copy(update={"polarization": scroll.polarization + PicClass.symbol(gamma(0))})

    monkeypatch.setattr(scrolls, "node_scroll", shifted)
    report = scrolls.scroll_check(3)
    assert report.by_id("n=3/j=1/k=0/polarization").status is CheckStatus.FAILED


# ── Polyscrolls ───────────────────────────────────────────
def test_polyscroll_telescopes(scrolls):
    result = scrolls.polyscroll([2, 3], [1, 2], 7)
    assert result.polarization.same_coefficients(PicClass(coeffs={gamma(7): -1, gamma(2): 1}))
    assert result.telescopes


def test_polyscroll_fills_contexts(scrolls):
    result = scrolls.polyscroll([2, 3], [1, 2], 7)
    assert result.context == ClassContext(k=2, m=7, n=(2, 3), j=(1, 2))
    assert result.polarization.context == ClassContext(k=2, m=7, n=(2, 3))
    assert [d.summands[0].context.m for d in result.descriptors] == [7, 5]
    assert scrolls.polyscroll([3, 2], [2, 1], 7).polarization == result.polarization


def test_single_scroll_polyscroll(scrolls):
    result = scrolls.polyscroll([3], [1], 5)
    assert result.descriptors == (scrolls.node_scroll(3, 1, 2, m=5),)


def test_polyscroll_overflow(scrolls):
    with pytest.raises(MultiplicityOverflow):
        scrolls.polyscroll([3, 3], [1, 1], 5)


@pytest.mark.parametrize("m", [2, 6, 12])
def test_polyscroll_check(scrolls, m):
    assert scrolls.polyscroll_check(m).status is CheckStatus.VERIFIED


def test_polyscroll_check_catches_a_wrong_polarization(scrolls, monkeypatch):
    real = scrolls.polyscroll

    def shifted(ns, js, m):
        result = real(ns, js, m)
        wrong = result.polarization + PicClass.symbol(gamma(0))
        return result.model_copy(update={"polarization": wrong, "expected": wrong})

    monkeypatch.setattr(scrolls, "polyscroll", shifted)
    report = scrolls.polyscroll_check(6)
    assert report.by_id("m=6/n=2,3/telescopes").status is CheckStatus.FAILED


# ── Restriction ───────────────────────────────────────────
def test_restriction_three_points(scrolls):
    report = scrolls.restriction_factorization(3, 2, 1)
    assert report.by_id("m=3/n=2/j=1/w-diagonal").detail["count"] == 1
    assert report.ok


def test_restriction_two_point_node(scrolls):
    report = scrolls.restriction_factorization(2, 2, 1)
    assert report.by_id("m=2/n=2/j=1/nonzero").status is CheckStatus.VERIFIED
    assert report.by_id("m=2/n=2/j=1/w-diagonal").detail["count"] == 1


def test_restriction_table_never_fails(scrolls):
    assert scrolls.restriction_table(2).ok
