import json

import pytest
import sympy

from services.cache_service import GroebnerCache
from services.chart_service import chart_context
from services.groebner_service import GroebnerService

X, Y, Z = sympy.symbols("x y z")


def test_membership_and_normal_form(groebner):
    basis = groebner.basis([X * Y - Z, X**2], (X, Y, Z))
    assert basis.contains(X**2 * Y)
    assert basis.contains(X * Z)
    assert not basis.contains(X + Y)
    assert basis.normal_form(X * Y) == Z


def test_unit_ideal(groebner):
    assert groebner.basis([X, X - 1], (X, Y)).is_unit


def test_compare_ideals_reports_witnesses(groebner):
    left_out, right_out = groebner.compare_ideals([X, Y], [X * Y], (X, Y))
    assert set(left_out) == {X, Y}
    assert right_out == []


def test_quotient_length_of_punctual_ideal(groebner):
    basis = groebner.basis([X**2 + Y, X * Y], (X, Y))
    length, standard = groebner.quotient_length(basis)
    assert length == 3
    assert standard == [(0, 0), (0, 1), (1, 0)]


def test_infinite_quotient_is_refused(groebner):
    with pytest.raises(ValueError):
        groebner.quotient_length(groebner.basis([X * Y], (X, Y)))


def test_elimination_drops_variables(groebner):
    eliminated = groebner.eliminate([X - Z**2, Y - Z**3], (Z,), (X, Y))
    assert eliminated
    assert all(Z not in g.free_symbols for g in eliminated)
    assert groebner.basis(eliminated, (X, Y)).contains(X**3 - Y**2)


def test_saturation_removes_embedded_component(groebner):
    saturated = groebner.saturate([X**2, X * Y], X, (X, Y))
    assert groebner.basis(saturated, (X, Y)).is_unit


def test_intersection_of_coordinate_axes(groebner):
    meet = groebner.intersect([[X], [Y]], (X, Y))
    left_out, right_out = groebner.compare_ideals(meet, [X * Y], (X, Y))
    assert left_out == [] and right_out == []


def test_context_basis_normal_form(groebner):
    ctx = chart_context(1)
    relation = ctx.var("a0") * ctx.var("d0") - ctx.t
    with_h = ctx.with_relations([relation])
    assert groebner.normal_form(with_h.var("a0") * with_h.var("d0") - with_h.t).is_zero


# ── Cache ─────────────────────────────────────────────────
def test_cache_persists_and_reloads(cache_dir):
    first = GroebnerService(GroebnerCache(cache_dir))
    basis = first.basis([X**2 - Y, Y**2], (X, Y))
    assert first.cache.misses == 1
    files = list(cache_dir.glob("*.json"))
    assert len(files) == 1

    second = GroebnerService(GroebnerCache(cache_dir))
    again = second.basis([Y**2, X**2 - Y], (X, Y))
    assert second.cache.hits == 1 and second.cache.misses == 0
    assert again.polys == basis.polys


def test_cache_key_includes_engine_version(cache_dir):
    GroebnerService(GroebnerCache(cache_dir, engine_version="1.0.0")).basis([X * Y], (X, Y))
    newer = GroebnerService(GroebnerCache(cache_dir, engine_version="2.0.0"))
    newer.basis([X * Y], (X, Y))
    assert newer.cache.hits == 0
    assert len(list(cache_dir.glob("*.json"))) == 2


def test_corrupted_cache_entry_is_recomputed(cache_dir):
    GroebnerService(GroebnerCache(cache_dir)).basis([X - Y], (X, Y))
    (path,) = cache_dir.glob("*.json")
    path.write_text("{not json", encoding="utf-8")
    fresh = GroebnerService(GroebnerCache(cache_dir))
    basis = fresh.basis([X - Y], (X, Y))
    assert fresh.cache.misses == 1
    assert basis.contains(X - Y)
    assert json.loads(path.read_text(encoding="utf-8"))["key"] == path.stem


def test_deleting_cache_does_not_change_results(cache_dir):
    generators = [X**3 - Y, X * Y - 1]
    cold = GroebnerService(GroebnerCache(cache_dir)).basis(generators, (X, Y))
    for path in cache_dir.glob("*.json"):
        path.unlink()
    warm = GroebnerService(GroebnerCache(cache_dir)).basis(generators, (X, Y))
    assert cold.polys == warm.polys
