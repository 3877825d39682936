import pytest
import sympy
from hypothesis import given, settings as hyp_settings, strategies as st
from sympy import QQ

from exceptions import ForeignVariables, IndexOutOfRange, NotInvariant
from models.qpoly import QuotientContext
from models.report import CheckStatus
from models.registry import VariableKind, VariableRegistry
from models.sigma_expr import sigma_symbols
from services.ring_service import point_context
from services.symfun_service import SymfunService

symfun = SymfunService()


# ── Elementary symmetric functions ────────────────────────
def test_sigma_zero_is_one(ctx2):
    assert symfun.elem_sym("x", 0, ctx2) == ctx2.one


def test_sigma_top_is_product(ctx2):
    assert symfun.elem_sym("x", 2, ctx2) == ctx2.x(1) * ctx2.x(2)


def test_sigma_y_two_of_three(ctx3):
    y1, y2, y3 = ctx3.y(1), ctx3.y(2), ctx3.y(3)
    assert symfun.elem_sym("y", 2, ctx3) == y1 * y2 + y1 * y3 + y2 * y3


def test_sigma_index_out_of_range(ctx2):
    with pytest.raises(IndexOutOfRange):
        symfun.elem_sym("x", 3, ctx2)


# ── Symmetrization ────────────────────────────────────────
def test_symmetrize_single_coordinate(ctx2):
    assert symfun.symmetrize(ctx2.x(1)) == (ctx2.x(1) + ctx2.x(2)) * QQ(1, 2)


def test_symmetrize_mixed_orbit(ctx2):
    p = ctx2.x(1) * ctx2.y(2)
    assert symfun.symmetrize(p) == (p + ctx2.x(2) * ctx2.y(1)) * QQ(1, 2)


def test_symmetrize_is_a_projection(ctx3):
    p = symfun.elem_sym("x", 2, ctx3) * symfun.elem_sym("y", 1, ctx3)
    assert symfun.symmetrize(p) == p


def test_symmetrize_refuses_foreign_variables():
    registry = VariableRegistry.for_points(2, (("c", VariableKind.AUX),))
    ctx = QuotientContext(registry)
    with pytest.raises(ForeignVariables):
        symfun.symmetrize(ctx.x(1) * ctx.var("c"))


# ── Sigma expressions ─────────────────────────────────────
def test_power_sum_by_newton(ctx2):
    sx, _, _ = sigma_symbols(2)
    sigma = symfun.sigma_express(ctx2.x(1) ** 2 + ctx2.x(2) ** 2)
    assert sympy.expand(sigma.expr - (sx[0] ** 2 - 2 * sx[1])) == 0


def test_mixed_orbit_uses_t(ctx2):
    sx, sy, t = sigma_symbols(2)
    sigma = symfun.sigma_express(ctx2.x(1) * ctx2.y(2) + ctx2.x(2) * ctx2.y(1))
    assert sympy.expand(sigma.expr - (sx[0] * sy[0] - 2 * t)) == 0


def test_non_invariant_is_refused(ctx2):
    with pytest.raises(NotInvariant):
        symfun.sigma_express(ctx2.x(1))


CTX3 = point_context(3)
monomial_exponents = st.tuples(*(st.integers(0, 1) for _ in range(7)))


@given(st.lists(st.tuples(monomial_exponents, st.integers(-3, 3)), min_size=1, max_size=3))
@hyp_settings(max_examples=25, deadline=None)
def test_express_then_evaluate_returns_input(terms):
    p = CTX3.zero
    for (a1, a2, a3, b1, b2, b3, e), c in terms:
        p = p + CTX3.monomial({"x1": a1, "x2": a2, "x3": a3, "y1": b1, "y2": b2, "y3": b3, "t": e}, c)
    invariant = symfun.symmetrize(p)
    if invariant.is_zero:
        return
    sigma = symfun.sigma_express(invariant)
    assert symfun.evaluate(sigma) == invariant


CONTEXTS = {m: point_context(m) for m in (2, 3, 4)}


@st.composite
def invariant_sources(draw):
    """A point count in 2..4 and a polynomial of total degree <= 6 in x, y and t."""
    m = draw(st.sampled_from(sorted(CONTEXTS)))
    ctx = CONTEXTS[m]
    names = ctx.registry.x_names + ctx.registry.y_names + (ctx.registry.t_name,)
    p = ctx.zero
    for _ in range(draw(st.integers(1, 3))):
        factors = draw(st.lists(st.sampled_from(names), max_size=6))
        exponents = {name: factors.count(name) for name in set(factors)}
        p = p + ctx.monomial(exponents, draw(st.integers(-3, 3)))
    return p


@pytest.mark.slow
@given(invariant_sources())
@hyp_settings(max_examples=40, deadline=None)
def test_express_is_exact_up_to_degree_six(p):
    invariant = symfun.symmetrize(p)
    if invariant.is_zero:
        return
    assert symfun.evaluate(symfun.sigma_express(invariant)) == invariant


# ── Relation checks ───────────────────────────────────────
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_sigma_relations_verify(m):
    report = symfun.verify_sigma_relations(m)
    assert report.status is CheckStatus.VERIFIED
    assert report.by_id(f"m={m}/ymxj/j=1").detail["j"] == 1


def test_express_check_small_m():
    report = symfun.express_check(2)
    assert report.entries and report.ok


@pytest.mark.slow
@pytest.mark.parametrize("m", [3, 4])
def test_express_check_full_range(m):
    report = symfun.express_check(m, max_degree=6)
    assert report.status is CheckStatus.VERIFIED
    assert report.by_id(f"m={m}/express/" + ";".join(["2,0", "0,2"] + ["0,0"] * (m - 2))).status is CheckStatus.VERIFIED
