"""Closed-form band theory of the homogeneous walk and of the experiment's 4-site cell."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegeneracyError, InvalidParameterError, NoExceptionalPointError
from .operators import Frame, HomogeneousParams, assemble_dense, bloch_step, check_frame, coin_matrix
from .presets import experiment_config

__all__ = [
    "DispersionPoint",
    "BandScan",
    "dispersion",
    "eigenvectors",
    "exceptional_gamma",
    "experiment_dispersion",
    "experiment_cell_matrix",
    "scan_bz",
    "principal_arccos",
]

# |cos eps| may exceed 1 by a few ulp at a band touching; treat that as exactly 1
_EDGE_SLACK = 1e-14
_DEGENERATE_COS2XI = 1e-6


def principal_arccos(x: complex) -> complex:
    """Complex arccos with ``Re`` in ``[0, pi]``, snapping round-off at ``|x| = 1``."""
    x = complex(x)
    if x.imag == 0.0 and 1.0 < abs(x.real) <= 1.0 + _EDGE_SLACK:
        x = complex(math.copysign(1.0, x.real), 0.0)
    return complex(cmath.acos(x))


def _wrap_branch(eps: complex) -> complex:
    re = math.remainder(eps.real, 2 * math.pi)
    if re == -math.pi:
        re = math.pi
    return complex(re, eps.imag)


@dataclass(frozen=True)
class DispersionPoint:
    """Quasi-energies and the auxiliary eigenvector data at one wave number.

    ``d1, d2, d3`` are the Bloch-vector components with the ``+2 gamma`` branch
    in ``d2``.  ``eta`` and ``xi`` are the angles entering the analytic
    eigenvectors; they satisfy ``cos 2eta = d3/|d|``, ``sin 2eta = -d1/|d|`` and
    ``sin 2xi = -d2/|d|`` (the sign convention under which the eigenvector
    formula is exact for the coin ``exp(+i theta sigma_1)``).
    """

    k: float
    eps_plus: complex
    eps_minus: complex
    eta: float
    xi: complex
    d1: float
    d2: float
    d3: float
    d_abs: float

    @property
    def cos_eps(self) -> complex:
        return cmath.cos(self.eps_plus)

    @property
    def xi_real(self) -> bool:
        return self.d2 ** 2 <= self.d1 ** 2 + self.d3 ** 2

    @property
    def eigenvalues(self) -> tuple[complex, complex]:
        """``(e^{-i eps_plus}, e^{-i eps_minus})``."""
        return cmath.exp(-1j * self.eps_plus), cmath.exp(-1j * self.eps_minus)


def _rhs(k, p):
    return (math.cos(p.theta1) * math.cos(p.theta2) * math.cos(2 * (k + p.phi))
            - math.sin(p.theta1) * math.sin(p.theta2) * math.cosh(2 * p.gamma))


def dispersion(k: float, p: HomogeneousParams) -> DispersionPoint:
    """Quasi-energy pair at wave number ``k``.

    ``cos(eps) = cos th1 cos th2 cos 2(k+phi) - sin th1 sin th2 cosh 2gamma``;
    the principal complex arccos is used when the right-hand side leaves
    ``[-1, 1]`` and ``eps_minus = -eps_plus``.
    """
    eps = principal_arccos(_rhs(k, p))
    d1 = (math.sin(p.theta1) * math.cos(p.theta2) * math.cos(2 * (k + p.phi))
          + math.cos(p.theta1) * math.sin(p.theta2) * math.cosh(2 * p.gamma))
    d2 = -math.sin(p.theta2) * math.sinh(2 * p.gamma)
    d3 = -math.cos(p.theta2) * math.sin(2 * (k + p.phi))
    d_abs = math.hypot(d3, d1)
    if d_abs > 0:
        eta = 0.5 * math.atan2(-d1, d3)
        xi = 0.5 * complex(cmath.asin(-d2 / d_abs))
    else:
        eta, xi = 0.0, 0j
    return DispersionPoint(k=float(k), eps_plus=eps, eps_minus=_wrap_branch(-eps), eta=eta, xi=xi,
                           d1=d1, d2=d2, d3=d3, d_abs=d_abs)


def _analytic_pair(pt: DispersionPoint):
    if pt.d_abs < 1e-12:
        raise DegeneracyError(f"Bloch matrix is scalar at k={pt.k}; eigenvectors are arbitrary")
    cos2xi = cmath.cos(2 * pt.xi)
    if abs(cos2xi) < _DEGENERATE_COS2XI:
        raise DegeneracyError(f"exceptional point at k={pt.k}: cos(2 xi) = {cos2xi:.3g}")
    pref = cmath.exp(-1j * pt.eta) / (2 * cmath.sqrt(cos2xi))
    a_p = pt.eta + pt.xi
    a_m = pt.eta - pt.xi
    e_p, e_m = cmath.exp(1j * a_p), cmath.exp(1j * a_m)
    v_plus = pref * np.array([e_p + 1 / e_p, -1j * (e_p - 1 / e_p)])
    v_minus = pref * np.array([e_m - 1 / e_m, -1j * (e_m + 1 / e_m)])
    return v_plus, v_minus


def eigenvectors(k: float, p: HomogeneousParams, frame: Frame = "symmetry"
                 ) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Analytic right eigenvectors ``(|Psi_+>, |Psi_->)`` of the Bloch matrix.

    The pair is ordered so that ``|Psi_+>`` belongs to ``exp(-i eps_plus)``.
    Each analytic vector is checked against the Bloch matrix and the labels are
    exchanged when the residuals say the branch pairing is the other way round.

    Raises
    ------
    DegeneracyError
        At an exceptional point (``cos 2xi -> 0``) or where the Bloch matrix is
        a multiple of the identity.
    """
    check_frame(frame)
    pt = dispersion(k, p)
    v_plus, v_minus = _analytic_pair(pt)
    if frame == "original":
        back = coin_matrix(-p.theta1 / 2)
        v_plus, v_minus = back @ v_plus, back @ v_minus
    u = bloch_step(k, p, frame)
    lam_p, lam_m = pt.eigenvalues

    def res(v, lam):
        return np.linalg.norm(u @ v - lam * v) / np.linalg.norm(v)

    if res(v_plus, lam_m) + res(v_minus, lam_p) < res(v_plus, lam_p) + res(v_minus, lam_m):
        v_plus, v_minus = v_minus, v_plus
    return v_plus, v_minus


def exceptional_gamma(theta1: float, theta2: float) -> float:
    """Gain factor ``e^{gamma*}`` at which the quasi-energy gap at ``eps = 0`` closes.

    ``cosh(2 gamma*) = (cos th1 cos th2 - 1) / (sin th1 sin th2)``.
    """
    ss = math.sin(theta1) * math.sin(theta2)
    if abs(ss) < 1e-15:
        raise NoExceptionalPointError("sin(theta1) sin(theta2) vanishes")
    ratio = (math.cos(theta1) * math.cos(theta2) - 1) / ss
    if ratio < 1:
        raise NoExceptionalPointError(f"cosh(2 gamma) would have to equal {ratio:.6g} < 1")
    return math.exp(math.acosh(ratio) / 2)


def experiment_dispersion(k: float, gamma0: float, phi0: float) -> NDArray[np.complex128]:
    """The four quasi-energy branches of the experiment walk at reduced momentum ``k``.

    Solves ``cos(eps) = -cos(phi0) cosh(2 gamma0)/2 +- sqrt(f_k)`` with
    ``f_k = [cosh(4 gamma0)(cos^2 phi0 - 1) - 3 cos^2 phi0 + 4 + cos k] / 8``
    and returns ``[+a_+, -a_+, +a_-, -a_-]`` where ``a_+-`` are the principal
    arccos values.  Each branch is doubly degenerate in the 8x8 cell matrix.
    """
    for v in (k, gamma0, phi0):
        if not math.isfinite(v):
            raise InvalidParameterError("experiment_dispersion needs finite inputs")
    c2 = math.cos(phi0) ** 2
    f_k = (math.cosh(4 * gamma0) * (c2 - 1) - 3 * c2 + 4 + math.cos(k)) / 8
    root = cmath.sqrt(f_k)
    centre = -0.5 * math.cos(phi0) * math.cosh(2 * gamma0)
    a_p = principal_arccos(centre + root)
    a_m = principal_arccos(centre - root)
    return np.array([a_p, -a_p, a_m, -a_m], dtype=np.complex128)


def experiment_cell_matrix(k: float, gamma0: float, phi0: float, frame: Frame = "original"
                           ) -> NDArray[np.complex128]:
    """8x8 Bloch matrix of the experiment walk's 4-site unit cell."""
    return assemble_dense(experiment_config(4, gamma0, phi0), frame, twist=k)


@dataclass(frozen=True)
class BandScan:
    """Dispersion sampled on the uniform grid ``k_j = -pi + 2 pi (j + 1) / M``."""

    params: HomogeneousParams
    points: tuple[DispersionPoint, ...]

    @property
    def k(self) -> NDArray[np.float64]:
        return np.array([pt.k for pt in self.points])

    @property
    def eps_plus(self) -> NDArray[np.complex128]:
        return np.array([pt.eps_plus for pt in self.points])

    @property
    def eps_minus(self) -> NDArray[np.complex128]:
        return np.array([pt.eps_minus for pt in self.points])

    def max_imag(self) -> float:
        return float(np.max(np.abs(self.eps_plus.imag)))

    def complex_windows(self, tol: float = 1e-12) -> list[tuple[float, float]]:
        """Contiguous grid intervals ``(k_first, k_last)`` where ``|Im eps| > tol``."""
        mask = np.abs(self.eps_plus.imag) > tol
        k = self.k
        windows = []
        start = None
        for j, flag in enumerate(mask):
            if flag and start is None:
                start = j
            if not flag and start is not None:
                windows.append((float(k[start]), float(k[j - 1])))
                start = None
        if start is not None:
            windows.append((float(k[start]), float(k[-1])))
        return windows


def scan_bz(p: HomogeneousParams, m: int) -> BandScan:
    if m < 2:
        raise InvalidParameterError(f"grid needs at least 2 points, got {m}")
    grid = -math.pi + 2 * math.pi * (np.arange(m) + 1) / m
    return BandScan(p, tuple(dispersion(float(k), p) for k in grid))
