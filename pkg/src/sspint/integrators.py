"""Time steppers: plain Shu-Osher Runge-Kutta and integrating-factor RK.

The integrating-factor step evaluates

    u^(i) = sum_j e^(L (c_i - c_j) dt) (alpha[i,j] u^(j) + dt beta[i,j] N(u^(j)))

where stage abscissas come from the Butcher form and the output row acts
at abscissa 1.  Terms sharing the same exponential gap are grouped before
the (expensive) exponential is applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NegativeGap, NonFinite
from .expm import ExpCache, build_cache, expm, quantize_gap
from .methods import FAMILY_PLUS, MethodRecord
from .tableau import ButcherTableau, ShuOsherForm, abscissas_nondecreasing

StageObserver = Callable[[int, int, np.ndarray], None]
"""Callback (step index, stage index, stage vector); stage 0 of step 0 is
the initial state, and the final combination of each step is observed as
its last stage.  Observers must not mutate the vector they receive."""


@dataclass(frozen=True)
class SemiDiscretization:
    """A method-of-lines system u_t = L u + N(u)."""

    n: int
    L: np.ndarray
    N: Callable[[np.ndarray], np.ndarray]
    dx: float
    fe_dt_nonlinear: float = float("nan")
    fe_dt_linear: float = float("nan")


@dataclass(frozen=True)
class StepPlan:
    """An integrating-factor method bound to an operator and step size."""

    method: MethodRecord
    cache: ExpCache
    dt: float


def make_plan(method: MethodRecord, sys: SemiDiscretization, dt: float) -> StepPlan:
    """Build an IFRK plan; rejects methods with decreasing abscissas."""
    if method.family != FAMILY_PLUS and not abscissas_nondecreasing(method.tableau):
        raise NegativeGap(
            f"{method.name} has decreasing abscissas; integrating-factor "
            "plans require non-decreasing abscissas"
        )
    cache = build_cache(sys.L, dt, method.tableau.c)
    return StepPlan(method=method, cache=cache, dt=dt)


def _check_finite(u: np.ndarray, what: str):
    if not np.isfinite(u).all():
        raise NonFinite(f"{what} contains NaN or Inf")


def _so_arrays(method_or_so):
    if isinstance(method_or_so, MethodRecord):
        so = method_or_so.shu_osher
        if so is None:
            from .tableau import butcher_to_canonical_shu_osher
            from .ssp_radius import ssp_radius as _radius

            rec = method_or_so
            so = butcher_to_canonical_shu_osher(
                rec.tableau, _radius(rec.tableau).radius
            )
        return so.alpha, so.beta
    return method_or_so.alpha, method_or_so.beta


def rk_step(
    method: MethodRecord | ShuOsherForm,
    F: Callable[[np.ndarray], np.ndarray],
    u: np.ndarray,
    dt: float,
    obs: Optional[StageObserver] = None,
    step_index: int = 0,
) -> np.ndarray:
    """One explicit Runge-Kutta step in Shu-Osher form."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    alpha, beta = _so_arrays(method)
    s = alpha.shape[0] - 1
    stages = [np.asarray(u, dtype=float)]
    for i in range(1, s + 1):
        acc = np.zeros_like(stages[0])
        for j in range(i):
            a, b = alpha[i, j], beta[i, j]
            if a == 0.0 and b == 0.0:
                continue
            term = a * stages[j] if a != 0.0 else 0.0
            if b != 0.0:
                term = term + dt * b * F(stages[j])
            acc = acc + term
        _check_finite(acc, f"stage {i}")
        stages.append(acc)
        if obs is not None:
            obs(step_index, i, acc)
    return stages[-1]


def _if_stage_abscissas(c: np.ndarray) -> np.ndarray:
    """Effective abscissa of every Shu-Osher stage: stage i (1-based) sits
    at Butcher abscissa c_{i+1}; the output row acts at 1."""
    return np.append(c, 1.0)


def _ifrk_stages(alpha, beta, ceff, apply_exp, N, u, dt, obs, step_index):
    s = alpha.shape[0] - 1
    stages = [np.asarray(u, dtype=float)]
    for i in range(1, s + 1):
        grouped = {}
        for j in range(i):
            a, b = alpha[i, j], beta[i, j]
            if a == 0.0 and b == 0.0:
                continue
            g = quantize_gap(ceff[i] - ceff[j])
            term = a * stages[j]
            if b != 0.0:
                term = term + dt * b * N(stages[j])
            if g in grouped:
                grouped[g] = grouped[g] + term
            else:
                grouped[g] = term
        acc = np.zeros_like(stages[0])
        for g, w in grouped.items():
            acc = acc + apply_exp(g, w)
        _check_finite(acc, f"stage {i}")
        stages.append(acc)
        if obs is not None:
            obs(step_index, i, acc)
    return stages[-1]


def ifrk_step(
    plan: StepPlan,
    sys: SemiDiscretization,
    u: np.ndarray,
    obs: Optional[StageObserver] = None,
    step_index: int = 0,
) -> np.ndarray:
    """One integrating-factor Runge-Kutta step using the plan's cache."""
    alpha, beta = _so_arrays(plan.method)
    ceff = _if_stage_abscissas(plan.method.tableau.c)
    return _ifrk_stages(
        alpha, beta, ceff, plan.cache.apply, sys.N, u, plan.dt, obs, step_index
    )


def ifrk_step_general(
    so: ShuOsherForm,
    c: np.ndarray,
    sys: SemiDiscretization,
    u: np.ndarray,
    dt: float,
    obs: Optional[StageObserver] = None,
    step_index: int = 0,
) -> np.ndarray:
    """Integrating-factor step for arbitrary abscissa ordering.

    Exponentials of negative gaps are computed directly; this is the
    counterexample path showing why decreasing abscissas break the SSP
    property, so no cache or sign restriction is imposed.
    """
    ceff = _if_stage_abscissas(np.asarray(c, dtype=float))
    exps = {}
    eigs = None
    from .expm import _circulant_first_column

    col = _circulant_first_column(np.asarray(sys.L, dtype=float))
    if col is not None:
        eigs = np.fft.fft(col)

    def apply_exp(g, w):
        if g not in exps:
            if eigs is not None:
                exps[g] = np.exp(g * dt * eigs)
            else:
                exps[g] = expm(g * dt * np.asarray(sys.L, dtype=float))
        E = exps[g]
        if eigs is not None:
            return np.fft.ifft(E * np.fft.fft(w)).real
        return E @ w

    return _ifrk_stages(
        so.alpha, so.beta, ceff, apply_exp, sys.N, u, dt, obs, step_index
    )


def integrate(
    stepper: Callable[[np.ndarray, Optional[StageObserver], int], np.ndarray],
    u0: np.ndarray,
    n_steps: int,
    obs: Optional[StageObserver] = None,
) -> np.ndarray:
    """Apply a one-step map n_steps times; the observer sees the initial
    state as stage 0 of step 0 and then every stage of every step."""
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    u = np.asarray(u0, dtype=float)
    if obs is not None:
        obs(0, 0, u)
    for k in range(n_steps):
        u = stepper(u, obs, k)
    return u
