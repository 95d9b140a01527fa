"""Acceptance suite: one or more tests per criterion, each at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from ptqwalk import evolution as ev
from ptqwalk.momentum import (
    eigenvectors,
    exceptional_gamma,
    experiment_cell_matrix,
    experiment_dispersion,
    scan_bz,
)
from ptqwalk.operators import HomogeneousParams, WalkConfig, assemble_dense, bloch_step
from ptqwalk.presets import experiment_config, four_region_config
from ptqwalk.spectral import bloch_reference, closure_distance, eigenvalues, multiset_distance
from ptqwalk.symmetry import (
    SymmetryKind as K,
    check_bloch_symmetry,
    check_position_pt,
    check_table_conditions,
    find_modified_phs_shift,
    pt_eigenphase,
    verify_dense_symmetry,
)

from conftest import THETA1, THETA2


def grid(m):
    return -math.pi + 2 * math.pi * (np.arange(m) + 1) / m


# 1 ---------------------------------------------------------------------------

C1 = "exceptional gain at theta=(pi/4, -pi/7) in [1.34, 1.35), matches cosh relation to 1e-10, < 1 ms"


@pytest.mark.criterion(1, C1)
def test_exceptional_gain_value_and_runtime():
    start = time.perf_counter()
    eg = exceptional_gamma(THETA1, THETA2)
    elapsed = time.perf_counter() - start
    assert 1.34 <= eg < 1.35
    ratio = (math.cos(THETA1) * math.cos(THETA2) - 1) / (math.sin(THETA1) * math.sin(THETA2))
    assert abs(math.cosh(2 * math.log(eg)) - ratio) < 1e-10
    assert elapsed < 1e-3


@pytest.mark.criterion(1, C1)
def test_exceptional_gain_matches_bloch_trace_root():
    # gap closing at k = 0: half-trace of the Bloch matrix reaches 1
    def half_trace_minus_one(g):
        p = HomogeneousParams(THETA1, THETA2, g, 0.0)
        return np.trace(bloch_step(0.0, p)).real / 2 - 1

    g_star = brentq(half_trace_minus_one, 0.0, 1.0, xtol=1e-15)
    assert abs(exceptional_gamma(THETA1, THETA2) - math.exp(g_star)) < 1e-10


# 2 ---------------------------------------------------------------------------

C2 = "band reality transition on a 401-point grid; complex window edge at |k|/pi = 0.10 +- 0.03, < 0.1 s"


def _central_window(scan):
    # cos 2k has period pi, so windows also open near |k| = pi; use the one around k = 0
    for lo, hi in scan.complex_windows(1e-12):
        if lo <= 0 <= hi:
            return lo, hi
    return None


@pytest.mark.criterion(2, C2)
@pytest.mark.parametrize("exp_gamma", [1.0, 1.1, 1.3])
def test_bands_real_below_threshold(fig_params, exp_gamma):
    scan = scan_bz(fig_params(exp_gamma), 401)
    assert scan.max_imag() < 1e-10


@pytest.mark.criterion(2, C2)
def test_complex_window_edges_at_stated_position(fig_params):
    start = time.perf_counter()
    for eg in (1.0, 1.1, 1.3):
        scan_bz(fig_params(eg), 401)
    scan = scan_bz(fig_params(1.5), 401)
    elapsed = time.perf_counter() - start
    window = _central_window(scan)
    assert window is not None
    edges = [abs(window[0]) / math.pi, abs(window[1]) / math.pi]
    assert elapsed < 0.1
    assert all(abs(e - 0.10) <= 0.03 for e in edges), f"window edges |k|/pi = {edges}"


def test_complex_window_edge_matches_closed_form(fig_params):
    p = fig_params(1.5)
    s1s2 = math.sin(THETA1) * math.sin(THETA2)
    c1c2 = math.cos(THETA1) * math.cos(THETA2)
    # cos eps = 1 at the window edge
    k_edge = 0.5 * math.acos((1 + s1s2 * math.cosh(2 * p.gamma)) / c1c2)
    lo, hi = _central_window(scan_bz(p, 401))
    spacing = 2 * math.pi / 401
    assert abs(hi - k_edge) < spacing and abs(-lo - k_edge) < spacing
    assert k_edge / math.pi < 0.1


# 3 ---------------------------------------------------------------------------

C3 = "dense spectrum equals Bloch eigenvalues (20 random homogeneous configs, N=16, 1e-8), < 1 s"


@pytest.mark.criterion(3, C3)
def test_bloch_dense_equivalence(rng):
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        p = HomogeneousParams(*rng.uniform(-math.pi, math.pi, 2), rng.uniform(-0.6, 0.6),
                              rng.uniform(-math.pi, math.pi))
        dense = eigenvalues(WalkConfig.homogeneous(p, 16)).eigenvalues
        worst = max(worst, multiset_distance(dense, bloch_reference(p, 16)))
    elapsed = time.perf_counter() - start
    assert worst < 1e-8
    assert elapsed < 1.0


# 4 ---------------------------------------------------------------------------

C4 = "elemental conditions reproduce all 24 yes/no cells, < 0.1 s"

#            coin  shift  gain   phase
EXPECTED_TABLE = {
    K.PARITY: (True, True, False, False),
    K.TIME_REVERSAL: (True, True, False, False),
    K.PT: (True, True, True, True),
    K.CHIRAL: (True, True, False, True),
    K.PHS: (True, True, True, False),
    K.PCS: (True, True, True, False),
}


@pytest.mark.criterion(4, C4)
def test_elemental_table():
    p = HomogeneousParams(THETA1, THETA2, 0.3, 0.4)
    start = time.perf_counter()
    got = {kind: tuple(check_table_conditions(p, kind).conditions[e] for e in ("coin", "shift", "gain", "phase"))
           for kind in EXPECTED_TABLE}
    elapsed = time.perf_counter() - start
    assert sum(len(v) for v in got.values()) == 24
    assert got == EXPECTED_TABLE
    assert elapsed < 0.1


# 5 ---------------------------------------------------------------------------

C5 = "homogeneous symmetry ladder on a 64-point grid at 1e-9"

ALL_KINDS = list(K)


@pytest.mark.criterion(5, C5)
@pytest.mark.parametrize("gamma,phi,holding", [
    (0.0, 0.0, {K.PARITY, K.TIME_REVERSAL, K.PT, K.CHIRAL, K.PHS, K.PCS}),
    (0.25, 0.0, {K.PT, K.PHS, K.PCS}),
    (0.25, 0.4, {K.PT, K.MODIFIED_PCS}),
], ids=["unitary", "gain", "gain-phase"])
def test_symmetry_ladder(gamma, phi, holding):
    p = HomogeneousParams(THETA1, THETA2, gamma, phi)
    k = grid(64)
    for kind in holding:
        assert check_bloch_symmetry(p, kind, k, 1e-9).holds, kind
    fails = {K.PARITY, K.TIME_REVERSAL, K.CHIRAL} if gamma else set()
    if phi:
        fails = set(ALL_KINDS) - holding
    for kind in fails:
        assert not check_bloch_symmetry(p, kind, k, 1e-9).holds, kind


# 6 ---------------------------------------------------------------------------

C6 = "experiment preset: PT at q=-1, modified PHS at r=2, dense residuals < 1e-9 at N=64, < 5 s"


@pytest.fixture(scope="module")
def experiment64():
    return experiment_config(64)


@pytest.mark.criterion(6, C6)
def test_experiment_pt_reflection_point(experiment64):
    rep = check_position_pt(experiment64)
    assert rep.holds
    assert rep.witness % 64 == (-1) % 64, f"PT holds at q={rep.witness}"


@pytest.mark.criterion(6, C6)
def test_experiment_modified_phs_shift(experiment64):
    start = time.perf_counter()
    rep = find_modified_phs_shift(experiment64)
    assert rep.holds and rep.witness == 2
    assert verify_dense_symmetry(experiment64, K.MODIFIED_PHS, 2) < 1e-9
    assert time.perf_counter() - start < 5


@pytest.mark.criterion(6, C6)
def test_experiment_dense_pt_at_q_minus_one(experiment64):
    start = time.perf_counter()
    residual = verify_dense_symmetry(experiment64, K.PT, -1)
    assert time.perf_counter() - start < 5
    assert residual < 1e-9, f"dense PT residual at q=-1: {residual:.3g}"


# 7 ---------------------------------------------------------------------------

C7 = "4-site cell dispersion formula vs 8x8 Bloch eigenphases over 101 k-points (1e-9)"


@pytest.mark.criterion(7, C7)
@pytest.mark.parametrize("exp_gamma0,expect_complex", [(1.1, False), (1.4, True)])
def test_experiment_dispersion_against_cell(exp_gamma0, expect_complex):
    g0, phi0 = math.log(exp_gamma0), 6 * math.pi / 5
    worst, any_complex = 0.0, False
    for k in np.linspace(-math.pi, math.pi, 101):
        eps = experiment_dispersion(float(k), g0, phi0)
        predicted = np.repeat(np.exp(-1j * eps), 2)
        cell = np.linalg.eigvals(experiment_cell_matrix(float(k), g0, phi0))
        worst = max(worst, multiset_distance(predicted, cell))
        any_complex |= bool(np.any(np.abs(eps.imag) > 1e-9))
    assert worst < 1e-9
    assert any_complex == expect_complex


# 8 ---------------------------------------------------------------------------

C8 = "growth regimes from |0,R> over 200 steps, < 10 s total"


@pytest.fixture(scope="module")
def growth_runs():
    start = time.perf_counter()
    eg_star = exceptional_gamma(THETA1, THETA2)
    n_sites = ev.auto_size(200)
    runs = {}
    for label, eg in (("unitary", 1.0), ("weak", 1.1), ("exceptional", eg_star), ("strong", 1.5)):
        c = WalkConfig.homogeneous(HomogeneousParams(THETA1, THETA2, math.log(eg)), n_sites)
        runs[label] = ev.run(c, ev.init_state(0, (0, 1), n_sites), 200)
    runs["elapsed"] = time.perf_counter() - start
    return runs


@pytest.mark.criterion(8, C8)
def test_growth_unitary(growth_runs):
    assert np.max(np.abs(growth_runs["unitary"].totals - 1)) < 1e-12


@pytest.mark.criterion(8, C8)
def test_growth_weak_gain_bounded(growth_runs):
    totals = growth_runs["weak"].totals
    assert ev.classify_growth(totals) is ev.GrowthRegime.BOUNDED
    assert np.max(np.abs(totals - 1)) < 0.5


@pytest.mark.criterion(8, C8)
def test_growth_exceptional_linear(growth_runs):
    assert ev.classify_growth(growth_runs["exceptional"].totals) is ev.GrowthRegime.LINEAR


@pytest.mark.criterion(8, C8)
def test_growth_strong_exponential_gaussian(growth_runs):
    rec = growth_runs["strong"]
    assert ev.classify_growth(rec.totals) is ev.GrowthRegime.EXPONENTIAL
    _, _, kurt = ev.distribution_moments(rec.final)
    assert abs(kurt) < 0.2


@pytest.mark.criterion(8, C8)
def test_growth_runtime(growth_runs):
    assert growth_runs["elapsed"] < 10


# 9 ---------------------------------------------------------------------------

C9 = "four-region walk at L=128: max||lambda|-1|| < 1e-6 and conjugation closure distance > 1e-3, < 60 s"


@pytest.fixture(scope="module")
def four_region_spectrum():
    start = time.perf_counter()
    s = eigenvalues(four_region_config(128))
    return s, time.perf_counter() - start


@pytest.mark.criterion(9, C9)
def test_four_region_unit_circle(four_region_spectrum):
    s, elapsed = four_region_spectrum
    assert len(s) == 512
    assert elapsed < 60
    assert s.max_deviation < 1e-6, f"max||lambda|-1|| = {s.max_deviation:.3g}"


@pytest.mark.criterion(9, C9)
def test_four_region_not_conjugation_closed(four_region_spectrum):
    s, _ = four_region_spectrum
    assert closure_distance(s.eigenvalues, np.conj) > 1e-3


# 10 --------------------------------------------------------------------------

C10 = "property suites: det 1, step vs dense, PT eigenphase, anti-unitary involution"


@pytest.mark.criterion(10, C10)
def test_determinant_one_on_random_bloch_steps(rng):
    worst = 0.0
    for _ in range(10_000):
        th1, th2, phi, k = rng.uniform(-math.pi, math.pi, 4)
        p = HomogeneousParams(th1, th2, rng.uniform(-1, 1), phi)
        frame = "original" if rng.random() < 0.5 else "symmetry"
        worst = max(worst, abs(np.linalg.det(bloch_step(k, p, frame)) - 1))
    assert worst < 1e-12


def _random_config(rng, n):
    return WalkConfig(
        n,
        theta=rng.uniform(-math.pi, math.pi, (2, n)),
        gain_l=np.exp(rng.uniform(-0.3, 0.3, (2, n))),
        gain_r=np.exp(rng.uniform(-0.3, 0.3, (2, n))),
        phi_l=rng.uniform(-math.pi, math.pi, (2, n)),
        phi_r=rng.uniform(-math.pi, math.pi, (2, n)),
    )


@pytest.mark.criterion(10, C10)
def test_step_matches_dense_on_random_configs(rng):
    for _ in range(5):
        c = _random_config(rng, 32)
        u = assemble_dense(c)
        for _ in range(20):
            amp = rng.normal(size=(32, 2)) + 1j * rng.normal(size=(32, 2))
            s = ev.WalkState(amp)
            assert np.max(np.abs(ev.step(s, c).vector() - u @ s.vector())) < 1e-12


@pytest.mark.criterion(10, C10)
def test_pt_eigenphase_on_unbroken_points(rng):
    checked = 0
    while checked < 100:
        p = HomogeneousParams(*rng.uniform(-math.pi, math.pi, 2), rng.uniform(-0.4, 0.4),
                              rng.uniform(-math.pi, math.pi))
        k = float(rng.uniform(-math.pi, math.pi))
        try:
            r = pt_eigenphase(k, p)
        except ArithmeticError:
            continue
        if r.broken:
            continue
        # independent: conj of the analytic vector against +-exp(2i eta) v
        v_plus, v_minus = eigenvectors(k, p, "symmetry")
        e2 = r.expected[0]
        assert np.max(np.abs(np.conj(v_plus) - e2 * v_plus)) / np.linalg.norm(v_plus) < 1e-9
        assert np.max(np.abs(np.conj(v_minus) + e2 * v_minus)) / np.linalg.norm(v_minus) < 1e-9
        assert abs(r.phases[0] - e2) < 1e-9 and abs(r.phases[1] + e2) < 1e-9
        checked += 1


@pytest.mark.criterion(10, C10)
def test_antiunitary_double_application(rng):
    for kind in (K.PT, K.PHS):
        for _ in range(100):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            assert np.max(np.abs(kind.apply(kind.apply(v)) - v)) < 1e-15
