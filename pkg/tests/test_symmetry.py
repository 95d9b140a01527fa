import math

import numpy as np
import pytest

from ptqwalk.errors import DegeneracyError, InvalidParameterError
from ptqwalk.operators import HomogeneousParams, WalkConfig
from ptqwalk.presets import experiment_config, four_region_config
from ptqwalk.spectral import closure_distance, eigenvalues
from ptqwalk.symmetry import (
    SymmetryKind as K,
    check_bloch_symmetry,
    check_position_pcs,
    check_position_pt,
    check_table_conditions,
    find_modified_phs_shift,
    pt_eigenphase,
    verify_dense_symmetry,
)

from conftest import THETA1, THETA2

GRID = np.linspace(-3.1, 3.1, 32)


def test_antiunitary_flags():
    anti = {k for k in K if k.antiunitary}
    assert anti == {K.TIME_REVERSAL, K.PT, K.PHS, K.MODIFIED_PHS}


def test_kind_lookup_by_label():
    assert K.from_label("ModifiedPHS") is K.MODIFIED_PHS
    assert K.from_label("pt") is K.PT
    with pytest.raises(InvalidParameterError):
        K.from_label("supersymmetry")


def test_empty_grid_rejected():
    with pytest.raises(InvalidParameterError):
        check_bloch_symmetry(HomogeneousParams(0.1, 0.2), K.PT, [])


@pytest.mark.parametrize("kind,holds", [(K.PT, True), (K.PARITY, False), (K.TIME_REVERSAL, False)])
def test_bloch_pt_survives_gain_and_phase(kind, holds):
    p = HomogeneousParams(THETA1, THETA2, 0.2, 0.5)
    assert check_bloch_symmetry(p, kind, GRID).holds is holds


@pytest.mark.parametrize("kind,holds", [(K.PHS, True), (K.CHIRAL, False), (K.PCS, True)])
def test_bloch_gain_without_phase(kind, holds):
    p = HomogeneousParams(THETA1, THETA2, 0.2, 0.0)
    assert check_bloch_symmetry(p, kind, GRID).holds is holds


def test_report_holds_iff_no_violations():
    p = HomogeneousParams(THETA1, THETA2, 0.2, 0.5)
    for kind in K:
        rep = check_bloch_symmetry(p, kind, GRID)
        assert rep.holds == (not rep.violations and rep.max_residual < 1e-9)


def test_table_rows_with_vanishing_gain_and_phase():
    # with G = Phi = 1 every elemental condition is trivially met
    p = HomogeneousParams(THETA1, THETA2, 0.0, 0.0)
    for kind in (K.PARITY, K.TIME_REVERSAL, K.PT, K.CHIRAL, K.PHS, K.PCS):
        assert check_table_conditions(p, kind).holds


def test_experiment_reflection_points():
    c = experiment_config(64)
    holding = [q for q in range(64) if check_position_pt_at(c, q)]
    assert holding == [q for q in range(64) if q % 4 == 2]


def check_position_pt_at(c, q):
    return verify_dense_symmetry(c, K.PT, q) < 1e-9


def test_experiment_reported_witness_is_dense_verified():
    c = experiment_config(64)
    rep = check_position_pt(c)
    assert rep.holds
    assert verify_dense_symmetry(c, K.PT, rep.witness) < 1e-9


def test_four_region_pt_at_origin():
    c = four_region_config(16)
    rep = check_position_pt(c)
    assert rep.holds and rep.witness == 0
    assert verify_dense_symmetry(c, K.PT, 0) < 1e-9


def test_four_region_breaks_pcs_and_phs():
    c = four_region_config(16)
    assert not check_position_pcs(c).holds
    assert not find_modified_phs_shift(c).holds
    assert verify_dense_symmetry(c, K.PHS, 0) > 0.1


def test_asymmetric_coins_fail_every_q():
    n = 16
    theta = np.array([np.arange(n) * 0.1, np.full(n, 0.3)])
    c = WalkConfig(n, theta, np.ones((2, n)), np.ones((2, n)), np.zeros((2, n)), np.zeros((2, n)))
    rep = check_position_pt(c)
    assert not rep.holds
    assert rep.violations
    assert {v.parameter for v in rep.violations} == {"theta"}


def test_zero_phases_pcs_matches_pt():
    c = WalkConfig.homogeneous(HomogeneousParams(THETA1, THETA2, 0.2, 0.0), 12)
    pt, pcs = check_position_pt(c), check_position_pcs(c)
    assert pt.holds and pcs.holds and pt.witness == pcs.witness


def test_homogeneous_phase_breaks_pcs():
    c = WalkConfig.homogeneous(HomogeneousParams(THETA1, THETA2, 0.2, 0.4), 12)
    assert not check_position_pcs(c).holds


def test_zero_phases_smallest_shift():
    c = WalkConfig.homogeneous(HomogeneousParams(THETA1, THETA2, 0.2, 0.0), 12)
    rep = find_modified_phs_shift(c)
    assert rep.holds and rep.witness == 1


def test_experiment_modified_phs_and_spectrum_pairing():
    c = experiment_config(32)
    rep = find_modified_phs_shift(c)
    assert rep.holds and rep.witness == 2
    lam = eigenvalues(c).eigenvalues
    assert closure_distance(lam, np.conj) < 1e-8


def test_composition_closure():
    # PT and PCS hold with zero phases, so PHS follows
    c = four_region_config(16)
    zero = np.zeros((2, c.n_sites))
    c0 = WalkConfig(c.n_sites, c.theta, c.gain_l, c.gain_r, zero, zero)
    pt, pcs = check_position_pt(c0), check_position_pcs(c0)
    assert pt.holds and pcs.holds
    assert verify_dense_symmetry(c0, K.PHS, 0) < 1e-9
    assert closure_distance(eigenvalues(c0).eigenvalues, np.conj) < 1e-8


def test_injected_violation_detected():
    c = four_region_config(16)
    theta = c.theta.copy()
    theta[0, 3] += 1e-3
    bad = WalkConfig(c.n_sites, theta, c.gain_l, c.gain_r, c.phi_l, c.phi_r)
    rep = check_position_pt(bad)
    assert not rep.holds
    assert verify_dense_symmetry(bad, K.PT, 0) > 1e-6


def test_witness_range():
    c = experiment_config(16)
    with pytest.raises(InvalidParameterError):
        verify_dense_symmetry(c, K.PT, 16)
    with pytest.raises(InvalidParameterError):
        verify_dense_symmetry(c, K.MODIFIED_PCS, 0)


def test_pt_eigenphase_unitary_unimodular():
    r = pt_eigenphase(0.7, HomogeneousParams(THETA1, THETA2))
    assert not r.broken
    assert all(abs(abs(z) - 1) < 1e-12 for z in r.phases)


def test_pt_eigenphase_weak_gain(fig_params):
    r = pt_eigenphase(0.5, fig_params(1.1))
    assert not r.broken
    assert abs(r.phases[0] - r.expected[0]) < 1e-9
    assert abs(r.phases[1] - r.expected[1]) < 1e-9


def test_pt_eigenphase_broken_swaps_vectors(fig_params):
    r = pt_eigenphase(0.0, fig_params(1.5))
    assert r.broken and r.phases is None
    assert r.swap_residual < 1e-9


def test_pt_eigenphase_degenerate():
    with pytest.raises(DegeneracyError):
        pt_eigenphase(0.0, HomogeneousParams(0.0, 0.0))


def test_report_serializes():
    d = check_position_pt(experiment_config(16)).to_dict()
    assert d["holds"] is True and "q" in d
    d = find_modified_phs_shift(experiment_config(16)).to_dict()
    assert d["r"] == 2
    assert math.isfinite(d["max_residual"])
