import numpy as np
import pytest

from sspint import methods
from sspint.analysis import (
    TvTrace,
    convergence_slope,
    ifrk_builder,
    lambda_sweep,
    max_tv_rise,
    observed_tvd_lambda,
    rk_builder,
    sweep_transition,
    total_variation,
    tv_trace,
)
from sspint.errors import NonFinite
from sspint.spatial import LINEAR_ADVECTION_STEP, make_problem


def test_total_variation_examples():
    step = np.array([0.0, 0.0, 1.0, 1.0, 0.0, 0.0])
    assert total_variation(step) == pytest.approx(2.0, abs=0)
    assert total_variation(np.full(7, 3.3)) == 0.0
    assert total_variation(np.array([0.0, 1.0, 0.5])) == pytest.approx(2.0)


def test_tv_trace_max_rise_clamped():
    assert TvTrace((3.0, 2.0, 1.0)).max_rise == 0.0
    assert TvTrace((1.0, 1.5, 1.2)).max_rise == pytest.approx(0.5)
    assert TvTrace((1.0,)).max_rise == 0.0


def test_max_tv_rise_zero_lambda():
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=1.0, n=64)
    build = ifrk_builder(methods.get("eSSPRK+(2,2)"))
    assert max_tv_rise(build, sys_, u0, 0.0, 10) == 0.0


def test_max_tv_rise_nonfinite_is_infinite():
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=1.0, n=64)

    def build(sys, dt):
        def step(u, obs, k):
            raise NonFinite("blow-up")

        return step

    assert max_tv_rise(build, sys_, u0, 0.5, 3) == np.inf


def test_tv_trace_records_every_stage():
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=0.0, n=64)
    rec = methods.get("eSSPRK+(3,3)")
    trace = tv_trace(ifrk_builder(rec), sys_, u0, 0.3, 4)
    assert len(trace.values) == 1 + 4 * rec.stages
    assert trace.values[0] == pytest.approx(2.0)


def test_observed_tvd_small_grid():
    # zero wavespeed: the integrating factor is the identity, so the
    # observed coefficient reduces to the method's own SSP coefficient
    rec = methods.get("eSSPRK+(2,2)")
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=0.0, n=200)
    obs = observed_tvd_lambda(ifrk_builder(rec), sys_, u0, 2.0, 5)
    assert obs.lambda_obs == pytest.approx(1.0, abs=0.05)
    assert obs.bisection_width == 1e-3


def test_observed_tvd_returns_hi_when_never_crossing():
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=0.0, n=64)
    rec = methods.get("eSSPRK+(9,2)")  # C = 8, far above the scan ceiling
    obs = observed_tvd_lambda(ifrk_builder(rec), sys_, u0, 2.0, 3)
    assert obs.lambda_obs == 2.0


def test_lambda_sweep_records():
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=0.0, n=64)
    build = ifrk_builder(methods.get("eSSPRK+(2,2)"))
    assert lambda_sweep(build, sys_, u0, [], 5) == []
    recs = lambda_sweep(build, sys_, u0, [0.0, 0.5, 1.5], 5)
    assert [r.lam for r in recs] == [0.0, 0.5, 1.5]
    assert recs[0].max_rise == 0.0
    assert recs[0].log10_rise == -300.0  # floored log of a zero rise
    assert recs[1].max_rise <= 1e-12
    assert recs[2].max_rise > 1e-6
    assert recs[2].log10_rise == pytest.approx(np.log10(recs[2].max_rise))
    assert sweep_transition(recs, 1e-10) == 1.5
    assert sweep_transition(recs[:2], 1e-10) is None


def test_plain_rk_builder_smoke():
    sys_, u0 = make_problem(LINEAR_ADVECTION_STEP, a=1.0, n=64)
    build = rk_builder(methods.get("eSSPRK(4,3)"))
    assert max_tv_rise(build, sys_, u0, 0.5, 3) <= 1e-10


def test_convergence_slope():
    dts = [0.1, 0.05, 0.025, 0.0125]
    assert convergence_slope([(d, d**2) for d in dts]) == pytest.approx(2.0)
    assert convergence_slope([(d, 7.3 * d**3) for d in dts]) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        convergence_slope([(0.1, 0.01), (0.05, 0.0025)])
    with pytest.raises(ValueError):
        convergence_slope([(d, -(d**2)) for d in dts])
