"""Dense matrix exponential and the per-run exponential cache.

``expm`` implements scaling-and-squaring with the degree-13 diagonal Pade
approximant.  ``ExpCache`` precomputes one exponential per distinct
abscissa gap of an integrating-factor method so a constant-step run pays
for each exponential exactly once.  Circulant operators (the periodic 1D
upwind matrices used by the experiment harness) get an FFT fast path that
is exact to roundoff and avoids forming n x n exponentials.
"""

from __future__ import annotations

import numpy as np

from .errors import NegativeGap, NonFinite

#: gaps are quantized at this resolution so abscissas printed as repeated
#: decimals collapse onto a single cache entry.
GAP_QUANTUM = 1e-14

_NEG_GAP_TOL = 1e-13

# Pade-13 coefficients for expm.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
# 1-norm bound under which the unscaled Pade-13 approximant is accurate.
_THETA13 = 5.371920351148152


def expm(M: np.ndarray) -> np.ndarray:
    """Matrix exponential via Pade-13 scaling and squaring."""
    M = np.asarray(M, dtype=float)
    if not np.isfinite(M).all():
        raise NonFinite("expm input contains NaN or Inf")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expm requires a square matrix")
    n = M.shape[0]
    norm = np.linalg.norm(M, 1)
    squarings = 0
    if norm > _THETA13:
        squarings = int(np.ceil(np.log2(norm / _THETA13)))
        M = M / (2.0 ** squarings)
    ident = np.eye(n)
    M2 = M @ M
    M4 = M2 @ M2
    M6 = M4 @ M2
    b = _PADE13
    U = M @ (
        M6 @ (b[13] * M6 + b[11] * M4 + b[9] * M2)
        + b[7] * M6 + b[5] * M4 + b[3] * M2 + b[1] * ident
    )
    V = (
        M6 @ (b[12] * M6 + b[10] * M4 + b[8] * M2)
        + b[6] * M6 + b[4] * M4 + b[2] * M2 + b[0] * ident
    )
    F = np.linalg.solve(V - U, V + U)
    for _ in range(squarings):
        F = F @ F
    return F


def quantize_gap(g: float) -> float:
    """Snap a gap to the cache resolution."""
    return round(g / GAP_QUANTUM) * GAP_QUANTUM


def _circulant_first_column(L: np.ndarray):
    """Return the first column if L is circulant, else None."""
    n = L.shape[0]
    if n < 2:
        return None
    col = L[:, 0]
    # circulant: column j is column 0 rolled down by j
    for j in (1, n - 1):
        if not np.array_equal(L[:, j], np.roll(col, j)):
            return None
    step = max(2, n // 8)
    for j in range(2, n - 1, step):
        if not np.array_equal(L[:, j], np.roll(col, j)):
            return None
    return col


def required_gaps(c, quantum: float = GAP_QUANTUM):
    """All distinct quantized gaps (c_i - c_j, i > j) plus (1 - c_j)."""
    c = np.asarray(c, dtype=float)
    gaps = set()
    for i in range(len(c)):
        for j in range(i):
            gaps.add(quantize_gap(c[i] - c[j]))
        gaps.add(quantize_gap(1.0 - c[i]))
    return sorted(gaps)


class ExpCache:
    """Exponentials e^(g * dt * L) keyed by quantized abscissa gap g."""

    def __init__(self, L: np.ndarray, dt: float, gaps):
        L = np.asarray(L, dtype=float)
        if not np.isfinite(L).all():
            raise NonFinite("operator contains NaN or Inf")
        self.L = L
        self.dt = float(dt)
        neg = [g for g in gaps if g < -_NEG_GAP_TOL]
        if neg:
            raise NegativeGap(
                f"negative abscissa gaps {neg}; the integrating-factor "
                "construction requires non-decreasing abscissas"
            )
        self.gaps = sorted({quantize_gap(max(g, 0.0)) for g in gaps})
        self._eigs = None
        col = _circulant_first_column(L)
        if col is not None:
            self._eigs = np.fft.fft(col)
            self._entries = {
                g: np.exp(g * self.dt * self._eigs) for g in self.gaps
            }
        else:
            self._entries = {g: expm(g * self.dt * L) for g in self.gaps}
        self.construction_count = len(self.gaps)

    @property
    def circulant(self) -> bool:
        return self._eigs is not None

    def matrix(self, g: float) -> np.ndarray:
        """The cached exponential as a dense matrix."""
        g = quantize_gap(g)
        if self.circulant:
            spec = self._entries[g]
            n = len(spec)
            first_col = np.fft.ifft(spec).real
            return np.column_stack([np.roll(first_col, j) for j in range(n)])
        return self._entries[g]

    def apply(self, g: float, u: np.ndarray) -> np.ndarray:
        """Apply e^(g * dt * L) to a vector."""
        g = quantize_gap(g)
        if self.circulant:
            return np.fft.ifft(self._entries[g] * np.fft.fft(u)).real
        return self._entries[g] @ u


def build_cache(L: np.ndarray, dt: float, c) -> ExpCache:
    """Cache every exponential an integrating-factor step will need for
    abscissas c (plus the output row at abscissa 1)."""
    c = np.asarray(c, dtype=float)
    if len(c) and abs(c[0]) > 1e-13:
        raise ValueError("first abscissa must be 0")
    if np.any(np.diff(c) < -_NEG_GAP_TOL):
        raise NegativeGap("abscissas are not non-decreasing")
    return ExpCache(L, dt, required_gaps(c))
