"""Explicit Runge-Kutta method representations and conversions.

Two equivalent representations are used throughout:

* Butcher form: a strictly lower triangular coefficient matrix ``A``,
  weights ``b`` and abscissas ``c = A @ e``.
* Shu-Osher form: ``(s+1) x (s+1)`` matrices ``alpha``, ``beta`` where
  stage 0 is the previous solution value, rows ``1..s-1`` are the
  intermediate stages and row ``s`` is the output combination::

      u^(i) = sum_j alpha[i,j] * u^(j) + dt * beta[i,j] * F(u^(j))

  Each ``alpha`` row sums to one, which is what exposes the
  convex-combination (SSP) structure of the method.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

_ROW_SUM_TOL = 1e-13
_C_TOL = 1e-13


def parse_coefficient(value):
    """Parse a coefficient that may be a number, a decimal string or an
    exact rational string like ``"59/128"``."""
    if isinstance(value, str):
        if "/" in value:
            return float(Fraction(value))
        return float(value)
    return float(value)


@dataclass(frozen=True)
class ButcherTableau:
    """Butcher form of an explicit Runge-Kutta method."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    name: str = ""
    order: int = 1

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        s = len(b)
        if A.shape != (s, s):
            raise ValueError(f"A must be {s}x{s}, got {A.shape}")
        if np.any(np.abs(A[np.triu_indices(s)]) > 0):
            raise ValueError("A must be strictly lower triangular (explicit method)")
        if abs(b.sum() - 1.0) > _ROW_SUM_TOL:
            raise ValueError(f"sum(b) = {b.sum()} != 1")
        if np.max(np.abs(A.sum(axis=1) - c)) > _C_TOL:
            raise ValueError("c must equal the row sums of A")
        A.setflags(write=False)
        b.setflags(write=False)
        c.setflags(write=False)

    @property
    def stages(self) -> int:
        return len(self.b)

    @classmethod
    def from_arrays(cls, A, b, c=None, name="", order=1):
        A = np.array([[parse_coefficient(x) for x in row] for row in A], dtype=float)
        b = np.array([parse_coefficient(x) for x in b], dtype=float)
        if c is None:
            c = A.sum(axis=1)
        else:
            c = np.array([parse_coefficient(x) for x in c], dtype=float)
        return cls(A=A, b=b, c=c, name=name, order=order)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "order": int(self.order),
            "A": [[float(x) for x in row] for row in self.A],
            "b": [float(x) for x in self.b],
            "c": [float(x) for x in self.c],
        }

    def dump_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, data: dict) -> "ButcherTableau":
        return cls.from_arrays(
            data["A"],
            data["b"],
            data.get("c"),
            name=data.get("name", ""),
            order=int(data.get("order", 1)),
        )

    @classmethod
    def load_json(cls, path) -> "ButcherTableau":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class ShuOsherForm:
    """Shu-Osher form (alpha, beta) of an explicit Runge-Kutta method."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if alpha.shape != beta.shape or alpha.shape[0] != alpha.shape[1]:
            raise ValueError("alpha and beta must be square and of equal shape")
        m = alpha.shape[0]
        if np.any(np.abs(alpha[np.triu_indices(m)]) > 0) or np.any(
            np.abs(beta[np.triu_indices(m)]) > 0
        ):
            raise ValueError("alpha and beta must be strictly lower triangular")
        rows = alpha[1:].sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-12:
            raise ValueError("each alpha row must sum to 1 (consistency)")

    @property
    def stages(self) -> int:
        return self.alpha.shape[0] - 1

    def is_ssp_admissible(self, tol: float = 1e-12) -> bool:
        """True when all coefficients are nonnegative and beta vanishes
        wherever alpha does."""
        if self.alpha.min() < -tol or self.beta.min() < -tol:
            return False
        zero_alpha = np.abs(self.alpha) <= tol
        return bool(np.all(np.abs(self.beta[zero_alpha]) <= tol))

    @classmethod
    def from_entries(cls, stages: int, alpha_entries: dict, beta_entries: dict):
        """Build from sparse ``{(i, j): value}`` maps; values may be
        rational strings."""
        alpha = np.zeros((stages + 1, stages + 1))
        beta = np.zeros((stages + 1, stages + 1))
        for (i, j), val in alpha_entries.items():
            alpha[i, j] = parse_coefficient(val)
        for (i, j), val in beta_entries.items():
            beta[i, j] = parse_coefficient(val)
        return cls(alpha=alpha, beta=beta)


@dataclass(frozen=True)
class OrderReport:
    """Order-condition residuals keyed by condition tag."""

    residuals: dict = field(default_factory=dict)
    achieved_order: int = 0


# Order conditions: tag -> (order, evaluator returning lhs - rhs).
_ORDER_CONDITIONS = (
    ("b.e", 1, lambda A, b, c: b.sum() - 1.0),
    ("b.c", 2, lambda A, b, c: b @ c - 1.0 / 2.0),
    ("b.cc", 3, lambda A, b, c: b @ (c * c) - 1.0 / 3.0),
    ("bAc", 3, lambda A, b, c: b @ (A @ c) - 1.0 / 6.0),
    ("b.ccc", 4, lambda A, b, c: b @ (c * c * c) - 1.0 / 4.0),
    ("b.cAc", 4, lambda A, b, c: b @ (c * (A @ c)) - 1.0 / 8.0),
    ("bA.cc", 4, lambda A, b, c: b @ (A @ (c * c)) - 1.0 / 12.0),
    ("bAAc", 4, lambda A, b, c: b @ (A @ (A @ c)) - 1.0 / 24.0),
)

ORDER_RESIDUAL_TOL = 1e-10


def order_residuals(t: ButcherTableau) -> OrderReport:
    """Evaluate all order conditions through order 4 and report the
    achieved order (largest p with all residuals through p below 1e-10)."""
    res = {
        tag: float(fn(t.A, t.b, t.c)) for tag, _, fn in _ORDER_CONDITIONS
    }
    achieved = 0
    for p in (1, 2, 3, 4):
        ok = all(
            abs(res[tag]) <= ORDER_RESIDUAL_TOL
            for tag, order, _ in _ORDER_CONDITIONS
            if order <= p
        )
        if ok:
            achieved = p
        else:
            break
    return OrderReport(residuals=res, achieved_order=achieved)


def abscissas_nondecreasing(t: ButcherTableau, tol: float = 1e-13) -> bool:
    """True iff c_1 <= c_2 <= ... <= c_s <= 1 (within tol)."""
    c = t.c
    if np.any(np.diff(c) < -tol):
        return False
    return bool(c[-1] <= 1.0 + tol)


def shu_osher_to_butcher(so: ShuOsherForm, name: str = "", order: int = 1) -> ButcherTableau:
    """Convert a Shu-Osher form to Butcher form by forward substitution.

    Each Shu-Osher stage is a linear combination of function evaluations;
    accumulating those combinations row by row yields the Butcher rows,
    with the final (output) row giving b.
    """
    s = so.stages
    al, be = so.alpha, so.beta
    K = np.zeros((s + 1, s))
    for i in range(1, s + 1):
        for j in range(i):
            if al[i, j] != 0.0:
                K[i] += al[i, j] * K[j]
            if be[i, j] != 0.0:
                K[i, j] += be[i, j]
    A = K[:s]
    b = K[s]
    return ButcherTableau(A=A, b=b, c=A.sum(axis=1), name=name, order=order)


def butcher_to_canonical_shu_osher(t: ButcherTableau, r: float) -> ShuOsherForm:
    """Canonical Shu-Osher form at parameter r.

    Uses the transform P = r (I + rS)^(-1) S, v = (I + rS)^(-1) e over the
    stacked stage matrix S = [[A, 0], [b^T, 0]].  When r is at most the SSP
    radius, the resulting (alpha, beta) pair is componentwise nonnegative.
    """
    from .ssp_radius import canonical_form  # local import to avoid a cycle

    can = canonical_form(t, r)
    s = t.stages
    alpha = np.zeros((s + 1, s + 1))
    beta = np.zeros((s + 1, s + 1))
    v, P = can.v, can.P
    for i in range(1, s + 1):
        alpha[i, 0] = v[i] + P[i, 0]
        if r > 0:
            beta[i, 0] = P[i, 0] / r
        for j in range(1, i):
            alpha[i, j] = P[i, j]
            if r > 0:
                beta[i, j] = P[i, j] / r
    if r == 0:
        # P vanishes at r = 0; use the trivial form alpha[i,0] = 1 with
        # beta rows taken straight from the Butcher coefficients.
        rows = np.vstack([t.A, t.b])
        alpha[:] = 0.0
        beta[:] = 0.0
        for i in range(1, s + 1):
            alpha[i, 0] = 1.0
            beta[i, :i] = rows[i, :i]
    return ShuOsherForm(alpha=alpha, beta=beta)
