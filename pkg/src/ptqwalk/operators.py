"""Elemental operators and one-step evolution operators of the gain-loss walk.

Internal (spinor) matrices are plain ``(2, 2)`` complex128 arrays in the basis
``(L, R)``.  Position-space operators act on a ring of ``N`` sites labelled
``n = -N/2, ..., N/2 - 1``; amplitude ``psi[n, sigma]`` lives at flat index
``2 * (n + N/2) + sigma`` with ``sigma = 0`` for L and ``1`` for R.

The one-step operator is the ordered product

    U  = S G2 Phi2 C(theta2) S G1 Phi1 C(theta1)                 (original frame)
    U' = C(theta1/2) S G2 Phi2 C(theta2) S G1 Phi1 C(theta1/2)   (symmetry frame)

applied right to left, so ``C(theta1)`` acts first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidParameterError

Frame = Literal["original", "symmetry"]
FRAMES = ("original", "symmetry")

SIGMA0 = np.eye(2, dtype=np.complex128)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)

__all__ = [
    "Frame",
    "HomogeneousParams",
    "WalkConfig",
    "SIGMA0",
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "coin_matrix",
    "gain_matrix",
    "phase_matrix",
    "shift_bloch",
    "bloch_step",
    "bloch_step_folded",
    "coin_operator",
    "gain_operator",
    "phase_operator",
    "shift_operator",
    "assemble_dense",
]


def _finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise InvalidParameterError(f"{name} must be finite, got {v!r}")


def check_frame(frame: str) -> str:
    if frame not in FRAMES:
        raise InvalidParameterError(f"frame must be one of {FRAMES}, got {frame!r}")
    return frame


@dataclass(frozen=True)
class HomogeneousParams:
    """Position-independent walk parameters.

    The gain operators are ``G2 = G1^-1 = diag(e^gamma, e^-gamma)`` and both
    phase operators are ``diag(e^{i phi}, e^{-i phi})``.
    """

    theta1: float
    theta2: float
    gamma: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        for name in ("theta1", "theta2", "gamma", "phi"):
            value = float(getattr(self, name))
            _finite(name, value)
            object.__setattr__(self, name, value)


def coin_matrix(theta: float) -> NDArray[np.complex128]:
    """Return ``exp(i theta sigma_1) = [[cos, i sin], [i sin, cos]]``."""
    _finite("theta", theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)


def gain_matrix(g_left: float, g_right: float) -> NDArray[np.complex128]:
    """Return ``diag(g_left, g_right)``; both factors must be positive."""
    _finite("gain", g_left, g_right)
    if g_left <= 0 or g_right <= 0:
        raise InvalidParameterError(f"gain factors must be positive, got ({g_left}, {g_right})")
    return np.diag([g_left, g_right]).astype(np.complex128)


def phase_matrix(phi_left: float, phi_right: float) -> NDArray[np.complex128]:
    """Return ``diag(exp(i phi_left), exp(i phi_right))``."""
    _finite("phase", phi_left, phi_right)
    return np.diag([np.exp(1j * phi_left), np.exp(1j * phi_right)])


def shift_bloch(k: float) -> NDArray[np.complex128]:
    """Return the momentum-space shift ``diag(e^{ik}, e^{-ik})``."""
    _finite("k", k)
    return np.diag([np.exp(1j * k), np.exp(-1j * k)])


def bloch_step(k: float, p: HomogeneousParams, frame: Frame = "original") -> NDArray[np.complex128]:
    """Two-by-two Bloch matrix of one time step at wave number ``k``.

    Parameters
    ----------
    k : float
        Wave number in radians.
    p : HomogeneousParams
        Walk parameters.
    frame : {"original", "symmetry"}
        ``"symmetry"`` returns ``e^{i theta1 sigma1/2} U(k) e^{-i theta1 sigma1/2}``,
        built directly from the time-symmetric ordering of elemental operators.

    Returns
    -------
    ndarray, shape (2, 2)
        Unimodular matrix (det = 1).
    """
    check_frame(frame)
    s = shift_bloch(k)
    g = gain_matrix(math.exp(p.gamma), math.exp(-p.gamma))
    g_inv = gain_matrix(math.exp(-p.gamma), math.exp(p.gamma))
    ph = phase_matrix(p.phi, -p.phi)
    if frame == "original":
        return s @ g @ ph @ coin_matrix(p.theta2) @ s @ g_inv @ ph @ coin_matrix(p.theta1)
    half = coin_matrix(p.theta1 / 2)
    return half @ s @ g @ ph @ coin_matrix(p.theta2) @ s @ g_inv @ ph @ half


def bloch_step_folded(k: float, p: HomogeneousParams) -> NDArray[np.complex128]:
    """Symmetry-frame Bloch matrix with the phase absorbed into the shift.

    ``C(theta1/2) S(k+phi) G C(theta2) G^-1 S(k+phi) C(theta1/2)``; equal to
    ``bloch_step(k, p, "symmetry")`` because all sigma_3 exponentials commute.
    """
    half = coin_matrix(p.theta1 / 2)
    s = shift_bloch(k + p.phi)
    g = gain_matrix(math.exp(p.gamma), math.exp(-p.gamma))
    g_inv = gain_matrix(math.exp(-p.gamma), math.exp(p.gamma))
    return half @ s @ g @ coin_matrix(p.theta2) @ g_inv @ s @ half


def _field(name, value, n_sites):
    arr = np.array(value, dtype=float)
    if arr.ndim == 1:
        arr = np.broadcast_to(arr, (2, arr.shape[0]))
    if arr.shape != (2, n_sites):
        raise InvalidParameterError(f"{name} must have shape (2, {n_sites}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite entries")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WalkConfig:
    """Position-dependent walk on a periodic ring of ``n_sites`` sites.

    Every field has shape ``(2, n_sites)``: row 0 holds substep 1, row 1
    substep 2, and column ``j`` holds site ``n = j - n_sites // 2``.
    """

    n_sites: int
    theta: NDArray[np.float64]
    gain_l: NDArray[np.float64]
    gain_r: NDArray[np.float64]
    phi_l: NDArray[np.float64]
    phi_r: NDArray[np.float64]

    def __post_init__(self):
        n = self.n_sites
        if not isinstance(n, (int, np.integer)) or n < 4 or n % 2:
            raise InvalidParameterError(f"n_sites must be an even integer >= 4, got {n!r}")
        object.__setattr__(self, "n_sites", int(n))
        for name in ("theta", "gain_l", "gain_r", "phi_l", "phi_r"):
            object.__setattr__(self, name, _field(name, getattr(self, name), n))
        if np.any(self.gain_l <= 0) or np.any(self.gain_r <= 0):
            raise InvalidParameterError("gain factors must be positive on every site")

    @classmethod
    def homogeneous(cls, p: HomogeneousParams, n_sites: int) -> WalkConfig:
        """Embed homogeneous parameters on a ring."""
        eg = math.exp(p.gamma)
        ones = np.ones(n_sites)
        return cls(
            n_sites,
            theta=np.array([p.theta1 * ones, p.theta2 * ones]),
            gain_l=np.array([ones / eg, ones * eg]),
            gain_r=np.array([ones * eg, ones / eg]),
            phi_l=np.full((2, n_sites), p.phi),
            phi_r=np.full((2, n_sites), -p.phi),
        )

    @property
    def sites(self) -> NDArray[np.int64]:
        """Site labels ``n`` in storage order."""
        return np.arange(self.n_sites) - self.n_sites // 2

    def index(self, n: int) -> int:
        """Column of site ``n`` (taken modulo the ring size)."""
        return (n + self.n_sites // 2) % self.n_sites

    def site_factors(self) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
        """Combined diagonal factors ``g e^{i phi}`` for L and R, shape (2, N)."""
        return self.gain_l * np.exp(1j * self.phi_l), self.gain_r * np.exp(1j * self.phi_r)

    def to_homogeneous(self, atol: float = 1e-12) -> HomogeneousParams:
        """Recover homogeneous parameters; raise if the fields are not of that form."""
        def uniform(a):
            if np.ptp(a) > atol:
                raise InvalidParameterError("configuration is not homogeneous")
            return float(a[0])

        theta1, theta2 = uniform(self.theta[0]), uniform(self.theta[1])
        gamma = math.log(uniform(self.gain_l[1]))
        phi = uniform(self.phi_l[0])
        p = HomogeneousParams(theta1, theta2, gamma, phi)
        ref = WalkConfig.homogeneous(p, self.n_sites)
        for name in ("gain_l", "gain_r", "phi_l", "phi_r"):
            if np.max(np.abs(getattr(ref, name) - getattr(self, name))) > atol:
                raise InvalidParameterError(f"{name} is not of the homogeneous gain-loss form")
        return p


def coin_operator(theta_row: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Block-diagonal position-space coin for one substep."""
    n = len(theta_row)
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    idx = 2 * np.arange(n)
    c, s = np.cos(theta_row), 1j * np.sin(theta_row)
    out[idx, idx] = c
    out[idx + 1, idx + 1] = c
    out[idx, idx + 1] = s
    out[idx + 1, idx] = s
    return out


def gain_operator(g_l: NDArray[np.float64], g_r: NDArray[np.float64]) -> NDArray[np.complex128]:
    d = np.empty(2 * len(g_l), dtype=np.complex128)
    d[0::2], d[1::2] = g_l, g_r
    return np.diag(d)


def phase_operator(phi_l: NDArray[np.float64], phi_r: NDArray[np.float64]) -> NDArray[np.complex128]:
    d = np.empty(2 * len(phi_l), dtype=np.complex128)
    d[0::2], d[1::2] = np.exp(1j * phi_l), np.exp(1j * phi_r)
    return np.diag(d)


def shift_operator(n_sites: int, twist: float = 0.0) -> NDArray[np.complex128]:
    """Conditional shift on the ring: L moves one site left, R one site right.

    A nonzero ``twist`` imposes ``psi(n + N) = e^{i twist} psi(n)``, i.e. the
    Bloch matrix of an ``N``-site supercell at reduced momentum ``twist``.
    """
    out = np.zeros((2 * n_sites, 2 * n_sites), dtype=np.complex128)
    for j in range(n_sites):
        left = (j - 1) % n_sites
        right = (j + 1) % n_sites
        out[2 * left, 2 * j] = np.exp(1j * twist) if j == 0 else 1.0
        out[2 * right + 1, 2 * j + 1] = np.exp(-1j * twist) if j == n_sites - 1 else 1.0
    return out


def assemble_dense(c: WalkConfig, frame: Frame = "original", twist: float = 0.0) -> NDArray[np.complex128]:
    """Materialize the ``2N x 2N`` one-step operator as an explicit matrix product."""
    check_frame(frame)
    s = shift_operator(c.n_sites, twist)
    sub1 = s @ gain_operator(c.gain_l[0], c.gain_r[0]) @ phase_operator(c.phi_l[0], c.phi_r[0])
    sub2 = s @ gain_operator(c.gain_l[1], c.gain_r[1]) @ phase_operator(c.phi_l[1], c.phi_r[1])
    if frame == "original":
        return sub2 @ coin_operator(c.theta[1]) @ sub1 @ coin_operator(c.theta[0])
    half = coin_operator(c.theta[0] / 2)
    return half @ sub2 @ coin_operator(c.theta[1]) @ sub1 @ half
