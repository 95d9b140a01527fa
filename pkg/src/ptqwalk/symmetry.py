"""Symmetry operators and checkers for the gain-loss walk.

Three levels are provided:

* elemental conditions on the coin, shift, gain and phase matrices,
* Bloch-matrix identities of the homogeneous walk in the symmetry frame,
* conditions on position-dependent parameters, backed by a dense check of
  the one-step operator against the full position-space symmetry operator.

Anti-unitary operators are stored as a unitary matrix plus a conjugation
flag; complex conjugation acts first, so ``X v = M conj(v)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidParameterError
from .momentum import dispersion, eigenvectors
from .operators import (
    SIGMA0,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    HomogeneousParams,
    WalkConfig,
    assemble_dense,
    bloch_step,
    coin_matrix,
    gain_matrix,
    phase_matrix,
    shift_bloch,
)

__all__ = [
    "SymmetryKind",
    "Violation",
    "SymmetryReport",
    "PTEigenphase",
    "ELEMENTS",
    "DEFAULT_TOL",
    "PARAM_TOL",
    "check_bloch_symmetry",
    "check_table_conditions",
    "check_position_pt",
    "check_position_pcs",
    "find_modified_phs_shift",
    "symmetry_operator",
    "verify_dense_symmetry",
    "pt_eigenphase",
]

DEFAULT_TOL = 1e-9
PARAM_TOL = 1e-12


class SymmetryKind(enum.Enum):
    """The eight symmetries with their internal-space operator.

    ``ModifiedPCS`` pairs ``k`` with ``-k - 2 phi`` and ``ModifiedPHS``
    combines ``sigma_3 K`` with a translation by ``r`` sites.
    """

    PARITY = ("Parity", SIGMA1, False)
    TIME_REVERSAL = ("TimeReversal", SIGMA1, True)
    PT = ("PT", SIGMA0, True)
    CHIRAL = ("Chiral", 1j * SIGMA2, False)
    PHS = ("PHS", SIGMA3, True)
    PCS = ("PCS", SIGMA3, False)
    MODIFIED_PCS = ("ModifiedPCS", SIGMA3, False)
    MODIFIED_PHS = ("ModifiedPHS", SIGMA3, True)

    def __init__(self, label, matrix, antiunitary):
        self.label = label
        self.matrix = matrix
        self.antiunitary = antiunitary

    @classmethod
    def from_label(cls, label: str) -> SymmetryKind:
        for kind in cls:
            if kind.label.lower() == label.lower() or kind.name.lower() == label.lower():
                return kind
        raise InvalidParameterError(f"unknown symmetry kind {label!r}")

    def apply(self, v: NDArray[np.complex128]) -> NDArray[np.complex128]:
        """Act on a spinor (or stack of spinors along the first axis)."""
        v = np.asarray(v, dtype=np.complex128)
        return self.matrix @ (np.conj(v) if self.antiunitary else v)

    def transform(self, a: NDArray[np.complex128]) -> NDArray[np.complex128]:
        """``X A X^-1`` for a 2x2 matrix ``A``."""
        a = np.conj(a) if self.antiunitary else a
        return self.matrix @ a @ np.linalg.inv(self.matrix)

    def __repr__(self):
        return f"SymmetryKind.{self.name}"


@dataclass(frozen=True)
class Violation:
    """One failed condition: which field, at which site and substep, by how much."""

    parameter: str
    site: int | None
    substep: int | None
    residual: float

    def to_dict(self):
        return {"parameter": self.parameter, "site": self.site, "substep": self.substep,
                "residual": self.residual}


@dataclass(frozen=True)
class SymmetryReport:
    kind: SymmetryKind
    holds: bool
    witness: int | None
    max_residual: float
    violations: tuple[Violation, ...] = ()
    conditions: dict[str, bool] = field(default_factory=dict)

    def to_dict(self, max_violations: int = 20):
        out = {"holds": self.holds, "max_residual": self.max_residual}
        if self.witness is not None:
            key = "r" if self.kind in (SymmetryKind.PHS, SymmetryKind.MODIFIED_PHS) else "q"
            out[key] = self.witness
        if self.conditions:
            out["conditions"] = dict(self.conditions)
        out["violations"] = [v.to_dict() for v in self.violations[:max_violations]]
        out["violation_count"] = len(self.violations)
        return out


# Bloch-level identities, evaluated in the symmetry frame.

def _bloch_residual(kind: SymmetryKind, k: float, p: HomogeneousParams) -> float:
    u = bloch_step(k, p, "symmetry")
    eye = np.eye(2)
    if kind is SymmetryKind.PARITY:
        diff = SIGMA1 @ u @ SIGMA1 - bloch_step(-k, p, "symmetry")
    elif kind is SymmetryKind.TIME_REVERSAL:
        diff = SIGMA1 @ np.conj(u) @ SIGMA1 @ bloch_step(-k, p, "symmetry") - eye
    elif kind is SymmetryKind.PT:
        diff = np.conj(u) @ u - eye
    elif kind is SymmetryKind.CHIRAL:
        gamma = kind.matrix
        diff = gamma @ u @ np.linalg.inv(gamma) @ u - eye
    elif kind in (SymmetryKind.PHS, SymmetryKind.MODIFIED_PHS):
        diff = SIGMA3 @ np.conj(u) @ SIGMA3 - bloch_step(-k, p, "symmetry")
    elif kind is SymmetryKind.PCS:
        diff = SIGMA3 @ u @ SIGMA3 @ bloch_step(-k, p, "symmetry") - eye
    else:
        diff = SIGMA3 @ u @ SIGMA3 @ bloch_step(-k - 2 * p.phi, p, "symmetry") - eye
    return float(np.max(np.abs(diff)))


def check_bloch_symmetry(p: HomogeneousParams, kind: SymmetryKind, grid,
                         tol: float = DEFAULT_TOL) -> SymmetryReport:
    """Evaluate the defining Bloch identity of ``kind`` at every ``k`` in ``grid``.

    The identities are ``sigma1 U'(k) sigma1 = U'(-k)`` (parity),
    ``sigma1 U'(k)* sigma1 U'(-k) = 1`` (time reversal), ``U'(k)* U'(k) = 1`` (PT),
    ``Gamma U'(k) Gamma^-1 U'(k) = 1`` (chiral), ``sigma3 U'(k)* sigma3 = U'(-k)``
    (PHS and modified PHS), ``sigma3 U'(k) sigma3 U'(-k) = 1`` (PCS) and
    ``sigma3 U'(k) sigma3 U'(-k-2phi) = 1`` (modified PCS).
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise InvalidParameterError("k grid is empty")
    residuals = [_bloch_residual(kind, float(k), p) for k in grid]
    worst = max(residuals)
    violations = tuple(Violation("bloch", None, None, r) for r in residuals if r >= tol)
    return SymmetryReport(kind, worst < tol and not violations, None, worst, violations)


# Elemental conditions.

ELEMENTS = ("coin", "shift", "gain", "phase")

# (coin angle sign, shift momentum sign, gain target, phase target) per symmetry
_TARGETS = {
    SymmetryKind.PARITY: (+1, -1, "G", "Phi"),
    SymmetryKind.TIME_REVERSAL: (-1, +1, "G", "Phi*"),
    SymmetryKind.PT: (-1, -1, "G", "Phi*"),
    SymmetryKind.CHIRAL: (-1, -1, "G", "Phi*"),
    SymmetryKind.PHS: (+1, -1, "G", "Phi"),
    SymmetryKind.PCS: (-1, +1, "G", "Phi*"),
}
_TARGETS[SymmetryKind.MODIFIED_PHS] = _TARGETS[SymmetryKind.PHS]
_TARGETS[SymmetryKind.MODIFIED_PCS] = _TARGETS[SymmetryKind.PCS]

_SAMPLE_K = (-2.3, -0.7, 0.4, 1.9)


def check_table_conditions(p: HomogeneousParams, kind: SymmetryKind,
                           tol: float = DEFAULT_TOL) -> SymmetryReport:
    """Check ``X A X^-1 = target(A)`` for each elemental matrix ``A``.

    The targets are ``C(+-theta_i)``, ``S(+-k)``, ``G`` and ``Phi`` or ``Phi*``
    depending on ``kind``; the modified variants share the conditions of their
    parent symmetry.  ``conditions`` maps each element to yes/no.
    """
    coin_sign, shift_sign, _, phase_target = _TARGETS[kind]
    res = {}
    res["coin"] = max(
        np.max(np.abs(kind.transform(coin_matrix(t)) - coin_matrix(coin_sign * t)))
        for t in (p.theta1, p.theta2))
    res["shift"] = max(
        np.max(np.abs(kind.transform(shift_bloch(k)) - shift_bloch(shift_sign * k)))
        for k in _SAMPLE_K)
    eg = math.exp(p.gamma)
    res["gain"] = max(
        np.max(np.abs(kind.transform(g) - g))
        for g in (gain_matrix(eg, 1 / eg), gain_matrix(1 / eg, eg)))
    ph = phase_matrix(p.phi, -p.phi)
    target = ph if phase_target == "Phi" else np.conj(ph)
    res["phase"] = np.max(np.abs(kind.transform(ph) - target))
    conditions = {name: bool(res[name] < tol) for name in ELEMENTS}
    violations = tuple(Violation(name, None, None, float(res[name]))
                       for name in ELEMENTS if not conditions[name])
    worst = float(max(res.values()))
    return SymmetryReport(kind, not violations, None, worst, violations, conditions)


# Position-space parameter conditions.

def _angle_gap(a, b):
    return np.abs(np.remainder(a - b + np.pi, 2 * np.pi) - np.pi)


def _reflected(c: WalkConfig, q: int, offset: int):
    """Columns of sites ``q + offset - n`` for every stored site ``n``."""
    return (q + offset - c.sites + c.n_sites // 2) % c.n_sites


def _reflection_violations(c: WalkConfig, q: int, phase_sign: int):
    n = c.sites
    checks = []
    for i in (0, 1):
        checks.append(("theta", i, _angle_gap(c.theta[i], c.theta[i][_reflected(c, q, 0)])))
    log_l, log_r = np.log(c.gain_l), np.log(c.gain_r)
    idx_l, idx_r = _reflected(c, q, 1), _reflected(c, q, -1)
    checks.append(("gain_l", 0, np.abs(log_l[0] + log_l[1][idx_l])))
    checks.append(("gain_r", 0, np.abs(log_r[0] + log_r[1][idx_r])))
    checks.append(("phi_l", 0, _angle_gap(c.phi_l[0], phase_sign * c.phi_l[1][idx_l])))
    checks.append(("phi_r", 0, _angle_gap(c.phi_r[0], phase_sign * c.phi_r[1][idx_r])))
    return _collect(n, checks)


def _collect(n, checks):
    violations = []
    worst = 0.0
    for name, i, gap in checks:
        worst = max(worst, float(np.max(gap)))
        for j in np.flatnonzero(gap > PARAM_TOL):
            violations.append(Violation(name, int(n[j]), i + 1, float(gap[j])))
    return tuple(violations), worst


def _search(kind, c, candidates, violations_for):
    best = None
    for w in candidates:
        violations, worst = violations_for(w)
        if not violations:
            return SymmetryReport(kind, True, w, worst)
        if best is None or (len(violations), worst) < (len(best[1]), best[2]):
            best = (w, violations, worst)
    w, violations, worst = best
    return SymmetryReport(kind, False, w, worst, violations)


def check_position_pt(c: WalkConfig) -> SymmetryReport:
    """Search reflection points ``q = 0, ..., N-1`` for PT symmetry of the parameters.

    Conditions (indices mod ``N``): ``theta_i(n) = theta_i(q - n)``,
    ``g1L(n) g2L(q + 1 - n) = 1``, ``g1R(n) g2R(q - 1 - n) = 1``,
    ``phi1L(n) = phi2L(q + 1 - n)`` and ``phi1R(n) = phi2R(q - 1 - n)``.
    Angles are compared modulo ``2 pi`` and gains through their logarithms.

    Returns
    -------
    SymmetryReport
        With the first satisfying ``q`` as witness, or the ``q`` with the
        fewest violations when none works.
    """
    return _search(SymmetryKind.PT, c, range(c.n_sites),
                   lambda q: _reflection_violations(c, q, +1))


def check_position_pcs(c: WalkConfig) -> SymmetryReport:
    """As :func:`check_position_pt` but with ``phi1(n) = -phi2(q +- 1 - n)``.

    PT and PCS phase conditions can only hold together when every phase
    vanishes (modulo ``pi``).
    """
    return _search(SymmetryKind.PCS, c, range(c.n_sites),
                   lambda q: _reflection_violations(c, q, -1))


def _translation_violations(c: WalkConfig, r: int):
    moved = (np.arange(c.n_sites) + r) % c.n_sites
    checks = []
    for i in (0, 1):
        checks.append(("theta", i, _angle_gap(c.theta[i], c.theta[i][moved])))
        checks.append(("gain_l", i, np.abs(np.log(c.gain_l[i]) - np.log(c.gain_l[i][moved]))))
        checks.append(("gain_r", i, np.abs(np.log(c.gain_r[i]) - np.log(c.gain_r[i][moved]))))
        checks.append(("phi_l", i, _angle_gap(c.phi_l[i], -c.phi_l[i][moved])))
        checks.append(("phi_r", i, _angle_gap(c.phi_r[i], -c.phi_r[i][moved])))
    return _collect(c.sites, checks)


def find_modified_phs_shift(c: WalkConfig) -> SymmetryReport:
    """Search shifts ``r = 1, ..., N-1`` with ``phi(n) = -phi(n + r)``.

    Coins and gains must be ``r``-periodic for the translated ``sigma_3 K``
    to leave the walk invariant.
    """
    return _search(SymmetryKind.MODIFIED_PHS, c, range(1, c.n_sites),
                   lambda r: _translation_violations(c, r))


# Dense verification.

_REFLECTION = {SymmetryKind.PARITY, SymmetryKind.PT, SymmetryKind.PCS}
_TRANSLATION = {SymmetryKind.PHS, SymmetryKind.MODIFIED_PHS}
# relations of the form X U X^-1 = U; the rest are X U X^-1 U = 1
_COMMUTING = {SymmetryKind.PARITY, SymmetryKind.PHS, SymmetryKind.MODIFIED_PHS}


def _check_witness(c: WalkConfig, witness) -> int:
    if witness is None:
        return 0
    if isinstance(witness, bool) or not isinstance(witness, (int, np.integer)):
        raise InvalidParameterError(f"witness must be an integer, got {witness!r}")
    if not -c.n_sites < witness < c.n_sites:
        raise InvalidParameterError(f"witness {witness} out of range for N={c.n_sites}")
    return int(witness)


def symmetry_operator(c: WalkConfig, kind: SymmetryKind, witness: int | None = None
                      ) -> tuple[NDArray[np.complex128], bool]:
    """Position-space symmetry operator as ``(unitary matrix, conjugate)``.

    Reflection-type kinds use ``sum_n |q - n><n|``, translation-type kinds
    ``sum_n |n + r><n|``, time reversal and chiral act on-site only.
    """
    if kind is SymmetryKind.MODIFIED_PCS:
        raise InvalidParameterError("ModifiedPCS is defined for homogeneous walks only")
    w = _check_witness(c, witness)
    n = c.sites
    perm = np.zeros((c.n_sites, c.n_sites))
    if kind in _REFLECTION:
        perm[[c.index(w - m) for m in n], np.arange(c.n_sites)] = 1
    elif kind in _TRANSLATION:
        perm[[c.index(m + w) for m in n], np.arange(c.n_sites)] = 1
    else:
        perm = np.eye(c.n_sites)
    return np.kron(perm, kind.matrix), kind.antiunitary


def verify_dense_symmetry(c: WalkConfig, kind: SymmetryKind, witness: int | None = None) -> float:
    """Max-norm residual of the symmetry relation on the dense symmetry-frame operator.

    Returns ``max|X U' X^-1 - U'|`` for parity, PHS and modified PHS and
    ``max|X U' X^-1 U' - 1|`` otherwise.
    """
    m, conj = symmetry_operator(c, kind, witness)
    u = assemble_dense(c, "symmetry")
    # m is a signed permutation times a unitary, so m^-1 = m^dagger
    x_u = m @ (np.conj(u) if conj else u) @ m.conj().T
    if kind in _COMMUTING:
        diff = x_u - u
    else:
        diff = x_u @ u - np.eye(len(u))
    return float(np.max(np.abs(diff)))


# PT eigenphase.

@dataclass(frozen=True)
class PTEigenphase:
    """Action of ``sigma_0 K`` on the symmetry-frame eigenvectors at one ``k``.

    When unbroken, ``conj(v_pm) = phases[pm] * v_pm`` and ``expected`` holds
    ``(+e^{2i eta}, -e^{2i eta})``.  When broken, ``phases`` is ``None`` and
    ``swap_residual`` measures how well ``conj(v_+)`` is parallel to ``v_-``.
    """

    k: float
    broken: bool
    phases: tuple[complex, complex] | None
    expected: tuple[complex, complex]
    residual: float
    swap_residual: float | None = None


def _parallel(a, b):
    """Phase ``z`` with ``a = z b`` and the relative residual of that fit."""
    z = np.vdot(b, a) / np.vdot(b, b)
    return complex(z), float(np.linalg.norm(a - z * b) / np.linalg.norm(a))


def pt_eigenphase(k: float, p: HomogeneousParams) -> PTEigenphase:
    """Proportionality phases of ``PT |Psi'_pm>`` against ``|Psi'_pm>``.

    Raises
    ------
    DegeneracyError
        At an exceptional or scalar point.
    """
    pt = dispersion(k, p)
    v_plus, v_minus = eigenvectors(k, p, "symmetry")
    e2 = complex(np.exp(2j * pt.eta))
    expected = (e2, -e2)
    if not pt.xi_real:
        _, res = _parallel(np.conj(v_plus), v_minus)
        _, res_self = _parallel(np.conj(v_plus), v_plus)
        return PTEigenphase(float(k), True, None, expected, res_self, res)
    zp, rp = _parallel(np.conj(v_plus), v_plus)
    zm, rm = _parallel(np.conj(v_minus), v_minus)
    return PTEigenphase(float(k), False, (zp, zm), expected, max(rp, rm))
