import numpy as np
import pytest

from sspint import methods
from sspint.errors import NegativeGap, NonFinite
from sspint.expm import (
    ExpCache,
    build_cache,
    expm,
    quantize_gap,
    required_gaps,
)
from sspint.spatial import Grid1D, upwind_matrix


def taylor_expm(M, terms=150):
    """Independent oracle: Taylor series with compensated summation."""
    n = M.shape[0]
    total = np.zeros((n, n))
    comp = np.zeros((n, n))
    term = np.eye(n)
    for k in range(terms):
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        term = term @ M / (k + 1)
    return total


def test_expm_matches_taylor_oracle():
    rng = np.random.default_rng(7)
    for _ in range(5):
        M = rng.standard_normal((5, 5))
        ref = taylor_expm(M)
        assert np.allclose(expm(M), ref, atol=1e-12, rtol=1e-12)


def test_expm_large_norm_scaling():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((4, 4)) * 8.0
    half = expm(M / 2)
    assert np.allclose(half @ half, expm(M), atol=1e-9, rtol=1e-9)


def test_expm_identity_and_errors():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3), atol=1e-15)
    with pytest.raises(NonFinite):
        expm(np.array([[np.nan, 0.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        expm(np.zeros((2, 3)))


def test_quantize_gap_collapses_nearby_values():
    assert quantize_gap(0.3 + 4e-15) == quantize_gap(0.3)
    assert quantize_gap(0.0) == 0.0


def test_required_gap_counts_stay_small():
    # repeated abscissa differences collapse onto few exponentials:
    # equally spaced abscissas give only the multiples of the spacing
    assert len(required_gaps(methods.get("eSSPRK+(9,3)").tableau.c)) == 7
    assert len(required_gaps(methods.get("eSSPRK+(9,2)").tableau.c)) == 9


def test_cache_circulant_matches_dense():
    grid = Grid1D(32)
    L = upwind_matrix(grid, 2.0)
    gaps = [0.0, 0.25, 1.0]
    cache = ExpCache(L, 0.01, gaps)
    assert cache.circulant
    for g in gaps:
        dense = expm(g * 0.01 * L)
        assert np.allclose(cache.matrix(g), dense, atol=1e-11)
        u = np.sin(2 * np.pi * grid.x)
        assert np.allclose(cache.apply(g, u), dense @ u, atol=1e-11)


def test_cache_dense_fallback():
    L = np.array([[0.0, 1.0], [-1.0, 1.0]])
    cache = ExpCache(L, 0.1, [0.5, 1.0])
    assert not cache.circulant
    assert np.allclose(cache.matrix(0.5), expm(0.05 * L))
    assert cache.construction_count == 2


def test_cache_rejects_negative_gap():
    with pytest.raises(NegativeGap):
        ExpCache(np.zeros((4, 4)), 0.1, [-0.5, 0.5])


def test_cache_zero_dt_is_identity():
    grid = Grid1D(16)
    L = upwind_matrix(grid, 1.0)
    cache = ExpCache(L, 0.0, [0.5, 1.0])
    u = np.arange(16, dtype=float)
    assert np.allclose(cache.apply(1.0, u), u, atol=1e-12)


def test_build_cache_validates_abscissas():
    L = np.zeros((8, 8))
    with pytest.raises(ValueError):
        build_cache(L, 0.1, np.array([0.5, 1.0]))
    with pytest.raises(NegativeGap):
        build_cache(L, 0.1, np.array([0.0, 1.0, 0.5]))
    cache = build_cache(L, 0.1, methods.get("eSSPRK+(3,3)").tableau.c)
    assert 0.0 not in [g for g in cache.gaps if g > 0]
