import numpy as np
import pytest

from sspint import methods
from sspint.integrators import rk_step
from sspint.spatial import Grid1D, upwind_matrix
from sspint.ssp_radius import (
    canonical_form,
    is_absolutely_monotonic,
    observed_l2_cfl,
    ssp_radius,
    stability_polynomial,
)


def test_radius_of_classic_methods():
    assert ssp_radius(methods.get("eSSPRK(2,2)").tableau).radius == pytest.approx(
        1.0, abs=1e-3
    )
    assert ssp_radius(methods.get("eSSPRK(3,3)").tableau).radius == pytest.approx(
        1.0, abs=1e-3
    )
    assert ssp_radius(methods.get("eSSPRK+(4,3)").tableau).radius == pytest.approx(
        20.0 / 11.0, abs=1e-3
    )


def test_canonical_form_nonnegative_at_radius():
    t = methods.get("eSSPRK(3,3)").tableau
    can = canonical_form(t, 1.0)
    assert can.v.min() >= -1e-12
    assert can.P.min() >= -1e-12


def test_monotonicity_fails_past_radius():
    t = methods.get("eSSPRK(3,3)").tableau
    assert is_absolutely_monotonic(t, 1.0)
    assert not is_absolutely_monotonic(t, 1.2)


def test_feasibility_is_an_interval():
    t = methods.get("eSSPRK+(4,3)").tableau
    r = ssp_radius(t).radius
    for ri in np.linspace(0.0, r, 20):
        assert is_absolutely_monotonic(t, ri)


def test_stability_polynomial_third_order():
    # every 3-stage 3rd-order explicit method shares 1 + z + z^2/2 + z^3/6
    for name in ("eSSPRK(3,3)", "eSSPRK+(3,3)"):
        t = methods.get(name).tableau
        for z in (0.3 - 0.7j, -1.5 + 0.0j, 2.0 + 1.0j):
            expect = 1 + z + z**2 / 2 + z**3 / 6
            assert stability_polynomial(t, z) == pytest.approx(expect, abs=1e-13)


def test_stability_polynomial_trivial_values():
    t22 = methods.get("eSSPRK(2,2)").tableau
    assert stability_polynomial(t22, 0.0) == pytest.approx(1.0, abs=0)
    assert stability_polynomial(t22, -2.0) == pytest.approx(1.0, abs=1e-14)


def test_stability_polynomial_matches_scalar_step():
    # one RK step of u' = (z/dt) u multiplies u by R(z)
    rec = methods.get("eSSPRK(5,4)")
    z, dt = -0.8, 0.1
    u = rk_step(rec, lambda v: (z / dt) * v, np.array([1.0]), dt)
    R = stability_polynomial(rec.tableau, z)
    assert abs(u[0] - R.real) <= 1e-13 * abs(R.real)


def test_observed_l2_cfl_zero_operator():
    t = methods.get("eSSPRK(3,3)").tableau
    assert observed_l2_cfl(t, np.zeros((8, 8)), 3.5, n_steps=20) == 3.5


def test_observed_l2_cfl_small_upwind():
    # coarse version of the wavespeed-11 probe; the fine-grid value is
    # pinned by the acceptance suite
    grid = Grid1D(100)
    M = upwind_matrix(grid, 11.0) * grid.dx
    t = methods.get("eSSPRK(3,3)").tableau
    lam = observed_l2_cfl(t, M, 0.3, n_steps=200)
    assert 0.08 <= lam <= 0.16
