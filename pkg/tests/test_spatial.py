import numpy as np
import pytest

from sspint.errors import NonFinite
from sspint.spatial import (
    ADVECTION_BURGERS_SMOOTH,
    ADVECTION_BURGERS_STEP,
    LINEAR_ADVECTION_STEP,
    VAN_DER_POL,
    Grid1D,
    make_problem,
    upwind_matrix,
    van_der_pol_full,
    van_der_pol_splitting,
    weno5_burgers_rhs,
)


def test_grid_basics():
    g = Grid1D(10)
    assert g.dx == 0.1
    assert np.allclose(g.x, np.arange(10) * 0.1)
    with pytest.raises(ValueError):
        Grid1D(4)


def test_upwind_matrix_structure():
    g = Grid1D(8)
    M = upwind_matrix(g, 2.0)
    assert M[0, 0] == pytest.approx(-16.0)
    assert M[1, 0] == pytest.approx(16.0)
    assert M[0, 7] == pytest.approx(16.0)  # periodic wrap
    assert np.allclose(M @ np.ones(8), 0.0)  # constants are steady states


def test_upwind_matrix_rejects_negative_wavespeed():
    with pytest.raises(ValueError):
        upwind_matrix(Grid1D(8), -1.0)


def test_upwind_matrix_is_first_order_derivative():
    g = Grid1D(256)
    u = np.sin(2 * np.pi * g.x)
    du_exact = -2.0 * 2 * np.pi * np.cos(2 * np.pi * g.x)
    err = np.abs(upwind_matrix(g, 2.0) @ u - du_exact).max()
    assert err < 2.0 * 2 * np.pi * (2 * np.pi * g.dx)


def test_weno5_constant_state():
    g = Grid1D(32)
    assert np.allclose(weno5_burgers_rhs(g, np.full(32, 0.7)), 0.0, atol=1e-13)


def test_weno5_rejects_nonfinite():
    g = Grid1D(32)
    u = np.ones(32)
    u[3] = np.nan
    with pytest.raises(NonFinite):
        weno5_burgers_rhs(g, u)


def test_weno5_high_order_on_smooth_data():
    # spatial truncation error should shrink much faster than low order
    # schemes when refining a smooth profile
    errs = []
    for n in (64, 128, 256):
        g = Grid1D(n)
        u = np.exp(np.sin(2 * np.pi * g.x))
        du = u * (2 * np.pi * np.cos(2 * np.pi * g.x))
        exact = -u * du
        errs.append(np.abs(weno5_burgers_rhs(g, u) - exact).max())
    slope = np.polyfit(
        np.log([1 / 64, 1 / 128, 1 / 256]), np.log(errs), 1
    )[0]
    assert slope >= 4.5


def test_make_problem_shapes_and_initial_data():
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=3.0, n=100)
    assert sys_.L.shape == (100, 100)
    assert u0.min() == 0.0 and u0.max() == 1.0
    assert u0[30] == 1.0 and u0[10] == 0.0  # supported on [1/4, 3/4]

    sys2, v0 = make_problem(ADVECTION_BURGERS_STEP, a=1.0, n=100)
    assert v0[20] == 1.0 and v0[60] == 0.0  # supported on [0, 1/2]

    _, w0 = make_problem(ADVECTION_BURGERS_SMOOTH, a=1.0, n=100)
    assert w0.min() > 0.0

    with pytest.raises(ValueError):
        make_problem("nope")


def test_linear_advection_nonlinear_part_is_unit_upwind():
    sys_, _ = make_problem(LINEAR_ADVECTION_STEP, a=5.0, n=64)
    g = Grid1D(64)
    M1 = upwind_matrix(g, 1.0)
    u = np.sin(2 * np.pi * g.x) + 0.3
    assert np.allclose(sys_.N(u), M1 @ u, atol=1e-10)


def test_van_der_pol_splittings_sum_to_full_rhs():
    u = np.array([1.7, -0.4])
    full = van_der_pol_full(u)
    for which in ("a", "b"):
        L, N = van_der_pol_splitting(which)
        assert np.allclose(L @ u + N(u), full, atol=1e-14), which
    with pytest.raises(ValueError):
        van_der_pol_splitting("c")


def test_van_der_pol_problem():
    sys_, u0 = make_problem(VAN_DER_POL, splitting="b")
    assert np.array_equal(u0, [2.0, 0.0])
    assert sys_.L.shape == (2, 2)
