"""Matrix-free time evolution, probability bookkeeping and growth classification.

The propagation kernel is compiled (Cython) when the extension is built and
falls back to a numpy implementation otherwise.  Set ``PTQWALK_BACKEND=python``
to force the fallback.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import _walkcore_py
from .errors import BoundaryOverflowError, InvalidParameterError, InvalidStateError
from .operators import WalkConfig

if os.environ.get("PTQWALK_BACKEND", "").lower() == "python":
    _kernel = _walkcore_py
    BACKEND = "python"
else:
    try:
        from . import _walkcore as _kernel
        BACKEND = "cython"
    except ImportError:
        _kernel = _walkcore_py
        BACKEND = "python"

__all__ = [
    "BACKEND",
    "WalkState",
    "EvolutionRecord",
    "GrowthRegime",
    "init_state",
    "step",
    "run",
    "auto_size",
    "classify_growth",
    "distribution_moments",
]


@dataclass(frozen=True, eq=False)
class WalkState:
    """Amplitudes ``psi[j, sigma]`` on a ring (column ``j`` is site ``j - N/2``) at time ``t``."""

    amplitudes: NDArray[np.complex128]
    t: int = 0

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.complex128)
        if amp.ndim != 2 or amp.shape[1] != 2:
            raise InvalidParameterError(f"amplitudes must have shape (N, 2), got {amp.shape}")
        if not np.all(np.isfinite(amp)):
            raise InvalidStateError("amplitudes must be finite")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def sites(self) -> NDArray[np.int64]:
        return np.arange(self.n_sites) - self.n_sites // 2

    def vector(self) -> NDArray[np.complex128]:
        """Flat vector in the dense-operator layout ``2 j + sigma``."""
        return self.amplitudes.reshape(-1).copy()

    def probability(self) -> NDArray[np.float64]:
        """``|psi_n|^2 = |psi_{n,L}|^2 + |psi_{n,R}|^2``."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def total(self) -> float:
        return float(self.probability().sum())


@dataclass(frozen=True, eq=False)
class EvolutionRecord:
    distributions: NDArray[np.float64]  # shape (T + 1, N)
    totals: NDArray[np.float64]  # P(t), shape (T + 1,)
    final: WalkState

    @property
    def steps(self) -> int:
        return len(self.totals) - 1


def init_state(n0: int, spinor, n_sites: int) -> WalkState:
    """Walker localized on site ``n0`` with normalized internal state ``spinor``."""
    spinor = np.asarray(spinor, dtype=np.complex128)
    if spinor.shape != (2,):
        raise InvalidParameterError("spinor must have two components")
    norm = np.linalg.norm(spinor)
    if norm == 0:
        raise InvalidParameterError("spinor must be nonzero")
    if not -(n_sites // 2) <= n0 < n_sites // 2:
        raise InvalidParameterError(f"site {n0} is outside the ring of {n_sites} sites")
    amp = np.zeros((n_sites, 2), dtype=np.complex128)
    amp[n0 + n_sites // 2] = spinor / norm
    return WalkState(amp)


def _kernel_args(c: WalkConfig):
    fac_l, fac_r = c.site_factors()
    return np.cos(c.theta), np.sin(c.theta), fac_l, fac_r


def _check_lattice(s: WalkState, c: WalkConfig):
    if s.n_sites != c.n_sites:
        raise InvalidParameterError(f"state has {s.n_sites} sites but the walk has {c.n_sites}")


def step(s: WalkState, c: WalkConfig) -> WalkState:
    """Apply one time step in O(N) without building the matrix."""
    _check_lattice(s, c)
    amp, _, _ = _kernel.propagate(s.amplitudes, *_kernel_args(c), 1, False)
    return WalkState(amp, s.t + 1)


def auto_size(steps: int) -> int:
    """Ring size that a walker starting at ``n = 0`` cannot wrap within ``steps``."""
    return 4 * steps + 8


def run(c: WalkConfig, s0: WalkState, steps: int, allow_wrap: bool = False) -> EvolutionRecord:
    """Propagate ``steps`` time steps, recording ``|psi_n(t)|^2`` and ``P(t)``.

    Raises
    ------
    BoundaryOverflowError
        If ``allow_wrap`` is false and amplitude reaches either edge site of
        the ring, i.e. the ring no longer stands in for an infinite line.
    """
    _check_lattice(s0, c)
    if steps < 0:
        raise InvalidParameterError("steps must be non-negative")
    amp, dist, totals = _kernel.propagate(s0.amplitudes, *_kernel_args(c), steps, True)
    if not allow_wrap:
        edge = (dist[:, 0] > 0) | (dist[:, -1] > 0)
        if edge.any():
            t = int(np.argmax(edge))
            raise BoundaryOverflowError(
                f"amplitude reached the ring edge at t={t}; use at least {auto_size(steps)} sites")
    return EvolutionRecord(dist, totals, WalkState(amp, s0.t + steps))


class GrowthRegime(str, enum.Enum):
    UNITARY = "unitary"
    BOUNDED = "bounded-oscillatory"
    LINEAR = "linear"
    EXPONENTIAL = "exponential"


def _fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 0.0
    return slope, r2


def classify_growth(totals) -> GrowthRegime:
    """Classify ``P(t)`` over the second half of the series.

    unitary
        ``max |P - 1| < 1e-10``.
    exponential
        least-squares fit of ``ln P`` has slope ``> 1e-3`` per step and
        ``R^2 > 0.99``, and fits at least as well as a straight line in ``P``.
    linear
        straight-line fit of ``P`` has ``R^2 > 0.99`` and a positive slope.
    bounded-oscillatory
        none of the above and ``max |P - 1| < 0.5``.
    """
    p = np.asarray(totals, dtype=float)
    if p.ndim != 1 or len(p) < 50:
        raise InvalidParameterError("growth classification needs a series of at least 50 points")
    if np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise InvalidParameterError("P(t) must be positive and finite")
    t_max = len(p) - 1
    t = np.arange(t_max // 2, t_max + 1, dtype=float)
    window = p[t_max // 2:]
    deviation = np.max(np.abs(window - 1))
    if deviation < 1e-10:
        return GrowthRegime.UNITARY
    log_slope, log_r2 = _fit(t, np.log(window))
    lin_slope, lin_r2 = _fit(t, window)
    if log_slope > 1e-3 and log_r2 > 0.99 and log_r2 >= lin_r2:
        return GrowthRegime.EXPONENTIAL
    if lin_r2 > 0.99 and lin_slope > 0:
        return GrowthRegime.LINEAR
    if deviation < 0.5:
        return GrowthRegime.BOUNDED
    raise InvalidParameterError(
        f"P(t) fits none of the growth regimes (max |P-1| = {deviation:.3g} in the window)")


def distribution_moments(s: WalkState) -> tuple[float, float, float]:
    """Mean, variance and excess kurtosis of the normalized ``|psi_n|^2`` over sites ``n``."""
    prob = s.probability()
    total = prob.sum()
    if total <= 0:
        raise InvalidStateError("state has zero norm")
    w = prob / total
    n = s.sites.astype(float)
    mean = float(np.dot(w, n))
    centred = n - mean
    var = float(np.dot(w, centred ** 2))
    if var == 0:
        return mean, 0.0, float("nan")
    kurt = float(np.dot(w, centred ** 4)) / var ** 2 - 3.0
    return mean, var, kurt
