"""Dense spectra of finite walk operators and quasi-energy diagnostics.

Eigenvalues come from LAPACK's general complex solver (balancing, Hessenberg
reduction, shifted QR).  A fixed sample of eigenpairs is re-derived by inverse
iteration to bound the residual ``|U v - lambda v| / |v|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import linear_sum_assignment

from .errors import SingularEigenvalueError, SolverFailureError
from .operators import Frame, HomogeneousParams, WalkConfig, assemble_dense, bloch_step, check_frame

__all__ = [
    "SpectrumResult",
    "eigenvalues",
    "spectrum_of",
    "quasienergies",
    "unimodularity",
    "multiset_distance",
    "closure_distance",
    "bloch_reference",
    "RESIDUAL_TOL",
]

RESIDUAL_TOL = 1e-8
_SAMPLES = 10


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """All eigenvalues of a one-step operator, sorted by ``(Re eps, Im eps)``.

    Attributes
    ----------
    eigenvalues : ndarray of complex
        The ``2N`` eigenvalues ``lambda = e^{-i eps}``.
    max_deviation : float
        ``max | |lambda| - 1 |``.
    entirely_real : bool
        Every quasi-energy has ``|Im eps| < tol``.
    tol : float
        Tolerance used for ``entirely_real``.
    residuals : ndarray of float
        ``|U v - lambda v| / |v|`` for the sampled eigenpairs.
    """

    eigenvalues: NDArray[np.complex128]
    frame: str
    max_deviation: float
    entirely_real: bool
    tol: float
    residuals: NDArray[np.float64]

    @property
    def quasienergies(self) -> NDArray[np.complex128]:
        return quasienergies(self)

    def __len__(self):
        return len(self.eigenvalues)


def _quasi(lam):
    lam = np.asarray(lam, dtype=np.complex128)
    if np.any(lam == 0):
        raise SingularEigenvalueError("zero eigenvalue has no quasi-energy")
    re = -np.angle(lam)
    re = np.where(re == -np.pi, np.pi, re)
    return re + 1j * np.log(np.abs(lam))


def quasienergies(s: SpectrumResult | NDArray[np.complex128]) -> NDArray[np.complex128]:
    """``eps = i ln(lambda)`` with ``Re eps`` in ``(-pi, pi]``.

    Raises
    ------
    SingularEigenvalueError
        If any eigenvalue is exactly zero.
    """
    lam = s.eigenvalues if isinstance(s, SpectrumResult) else s
    return _quasi(lam)


def _inverse_iteration(u, lam, rng_vec):
    n = len(u)
    scale = max(1.0, abs(lam)) * 1e-10
    lu = scipy.linalg.lu_factor(u - (lam + scale) * np.eye(n), check_finite=False)
    v = rng_vec
    for _ in range(3):
        v = scipy.linalg.lu_solve(lu, v, check_finite=False)
        v = v / np.linalg.norm(v)
    return float(np.linalg.norm(u @ v - lam * v))


def spectrum_of(u: NDArray[np.complex128], frame: str = "original", tol: float = 1e-6) -> SpectrumResult:
    """Eigen-decompose an explicit operator matrix."""
    try:
        lam = scipy.linalg.eigvals(u, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverFailureError(f"eigenvalue iteration failed: {exc}") from None
    eps = _quasi(lam)
    order = np.lexsort((eps.imag, eps.real))
    lam = lam[order]
    eps = eps[order]
    # fixed start vector and sample so repeated runs are bit-identical
    start = np.exp(1j * np.arange(len(u)))
    picks = np.unique(np.linspace(0, len(lam) - 1, min(_SAMPLES, len(lam))).astype(int))
    residuals = np.array([_inverse_iteration(u, lam[i], start) for i in picks])
    if np.any(residuals >= RESIDUAL_TOL) or not np.all(np.isfinite(residuals)):
        raise SolverFailureError(f"eigenpair residual {np.max(residuals):.3g} exceeds {RESIDUAL_TOL}")
    return SpectrumResult(
        eigenvalues=lam,
        frame=frame,
        max_deviation=float(np.max(np.abs(np.abs(lam) - 1))),
        entirely_real=bool(np.max(np.abs(eps.imag)) < tol),
        tol=tol,
        residuals=residuals,
    )


def eigenvalues(c: WalkConfig, frame: Frame = "original", tol: float = 1e-6) -> SpectrumResult:
    """All ``2N`` eigenvalues of the dense one-step operator of ``c``.

    Raises
    ------
    SolverFailureError
        If LAPACK does not converge or a sampled eigenpair residual is not
        below ``1e-8``.
    """
    check_frame(frame)
    return spectrum_of(assemble_dense(c, frame), frame, tol)


def unimodularity(s: SpectrumResult, tol: float) -> tuple[bool, float]:
    """``(max | |lambda| - 1 | < tol, max | |lambda| - 1 |)``."""
    dev = float(np.max(np.abs(np.abs(s.eigenvalues) - 1)))
    return dev < tol, dev


def multiset_distance(a, b) -> float:
    """Largest pair distance under the optimal one-to-one matching of ``a`` and ``b``."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    if a.shape != b.shape:
        return math.inf
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols])) if len(a) else 0.0


def closure_distance(values, mapping=np.conj) -> float:
    """``max_lambda min_mu |mapping(lambda) - mu|``: zero when the set is closed under ``mapping``."""
    v = np.asarray(values, dtype=np.complex128).ravel()
    image = mapping(v)
    return float(np.max(np.min(np.abs(image[:, None] - v[None, :]), axis=1)))


def bloch_reference(p: HomogeneousParams, n_sites: int, frame: Frame = "original") -> NDArray[np.complex128]:
    """Eigenvalues of the 2x2 Bloch matrices at ``k_m = 2 pi m / N``, ``m = 0..N-1``."""
    ks = 2 * np.pi * np.arange(n_sites) / n_sites
    return np.concatenate([np.linalg.eigvals(bloch_step(float(k), p, frame)) for k in ks])
