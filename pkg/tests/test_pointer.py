"""Tests for the exact von Neumann pointer chain."""

import math

import numpy as np
import pytest

from weaklab import hilbert, pointer
from weaklab.errors import (
    BasisMismatch,
    GridResolutionError,
    SelectionAnnihilated,
)
from weaklab.hilbert import GridConfig, gaussian_grid_state, make_grid_ops
from weaklab.pointer import (
    CouplingSpec,
    couple,
    default_pointer_grid,
    gaussian_pointer,
    measure_weakly,
    momentum_distribution,
    pointer_mean_momentum,
    pointer_mean_position,
    predicted_shifts,
    product_joint,
    run_ccr_protocol,
    select,
)
from weaklab.weakcorr import weak_value


GRID = GridConfig(1024, 40.0)


def two_hump_state(cfg):
    """Irregular mid-selection with complex weak values; non-Gaussian so
    the higher-order pointer corrections do not cancel."""
    x = cfg.positions()
    amps = np.exp(-((x - 2.0) ** 2) / (4 * 1.3**2) + 0.35j * x) + 0.6 * np.exp(
        -((x + 1.5) ** 2) / (4 * 1.1**2) - 0.15j * x
    )
    return hilbert.StateVector(cfg.basis_id, amps)


def test_gaussian_pointer_moments():
    phi = gaussian_pointer(GRID, 1.0)
    xs = GRID.positions()
    prob = np.abs(phi.wavefunction) ** 2 * GRID.spacing
    assert float(np.sum(prob)) == pytest.approx(1.0, abs=1e-12)
    assert float(np.sum(xs * prob)) == pytest.approx(0.0, abs=1e-10)
    var = float(np.sum(xs**2 * prob))
    assert var == pytest.approx(1.0, rel=1e-3)
    assert np.all(phi.wavefunction.real > -1e-300)  # real and positive
    assert np.max(np.abs(phi.wavefunction.imag)) == 0.0


def test_gaussian_pointer_resolution_guards():
    with pytest.raises(GridResolutionError):
        gaussian_pointer(GridConfig(16, 16.0), 0.5)  # spacing 1, needs >= 4
    with pytest.raises(GridResolutionError):
        gaussian_pointer(GRID, 10.0)  # > length/8


def test_couple_zero_strength_is_identity():
    up = hilbert.basis_state(2, 0, hilbert.PAULI_BASIS_ID)
    phi = gaussian_pointer(GRID, 1.0)
    joint = product_joint(up, phi)
    out = couple(joint, CouplingSpec(hilbert.pauli("z"), "momentum", 0.0))
    np.testing.assert_allclose(out.amplitudes, joint.amplitudes, atol=1e-15)


def test_couple_translates_eigenstate_by_g_lambda():
    # system in sigma_z eigenstate (+1); exp(-i sign g lam p_d/hbar)
    # translates the pointer by sign * g * lam
    up = hilbert.basis_state(2, 0, hilbert.PAULI_BASIS_ID)
    phi = gaussian_pointer(GRID, 1.0)
    g = 0.3
    joint = couple(
        product_joint(up, phi),
        CouplingSpec(hilbert.pauli("z"), "momentum", g, sign=+1),
    )
    cond, amp = select(joint, up)
    assert amp == pytest.approx(1.0, abs=1e-12)
    assert pointer_mean_position(cond) == pytest.approx(g, abs=1e-10)
    # translation-operator oracle: analytically shifted Gaussian
    x = GRID.positions()
    shifted = np.exp(-((x - g) ** 2) / 4.0)
    shifted /= math.sqrt(float(np.sum(np.abs(shifted) ** 2)) * GRID.spacing)
    assert np.max(np.abs(cond.wavefunction - shifted)) < 1e-12


def test_couple_preserves_norm():
    cfg = GridConfig(64, 20.0)
    xs_op, _ = make_grid_ops(cfg)
    i = gaussian_grid_state(cfg, width=1.5)
    phi = gaussian_pointer(GRID, 1.0)
    joint = couple(product_joint(i, phi), CouplingSpec(xs_op, "position", 0.7))
    total = float(np.sum(np.abs(joint.amplitudes) ** 2)) * GRID.spacing
    assert total == pytest.approx(1.0, abs=1e-10)


def test_couple_basis_mismatch():
    up = hilbert.basis_state(2, 0, "elsewhere")
    phi = gaussian_pointer(GRID, 1.0)
    with pytest.raises(BasisMismatch):
        couple(product_joint(up, phi), CouplingSpec(hilbert.pauli("z"), "position", 0.1))


def test_select_product_state_returns_pointer():
    up = hilbert.basis_state(2, 0, hilbert.PAULI_BASIS_ID)
    phi = gaussian_pointer(GRID, 1.0)
    cond, amp = select(product_joint(up, phi), up)
    assert amp == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(cond.wavefunction, phi.wavefunction, atol=1e-14)


def test_select_orthogonal_annihilates():
    up = hilbert.basis_state(2, 0, hilbert.PAULI_BASIS_ID)
    down = hilbert.basis_state(2, 1, hilbert.PAULI_BASIS_ID)
    phi = gaussian_pointer(GRID, 1.0)
    with pytest.raises(SelectionAnnihilated):
        select(product_joint(up, phi), down)


def test_weakly_coupled_fock_pointer_matches_closed_form():
    cfg = hilbert.FockConfig(dim=2)
    x_op, _ = hilbert.make_fock_ops(cfg)
    i = hilbert.basis_state(2, 0, cfg.basis_id)
    f = hilbert.StateVector(cfg.basis_id, np.array([1.0, 1.0]))
    g = 0.02
    stage = measure_weakly(i, f, x_op, sigma=1.0, g=g, grid=GRID)
    x_w = weak_value(i, f, x_op).value
    y = GRID.positions()
    closed = np.exp(1j * g * x_w * y) * np.exp(-(y**2) / 4.0)
    closed /= math.sqrt(float(np.sum(np.abs(closed) ** 2)) * GRID.spacing)
    ov = complex(np.vdot(closed, stage.pointer.wavefunction)) * GRID.spacing
    fidelity = abs(ov) ** 2
    assert fidelity >= 1.0 - 10.0 * g**2
    assert fidelity <= 1.0 + 1e-12


def test_mean_momentum_of_phase_modulated_gaussian():
    k = 0.8137  # deliberately not grid-commensurate
    phi = gaussian_pointer(GRID, 1.0)
    psi = pointer.PointerState(GRID, phi.wavefunction * np.exp(1j * k * GRID.positions()), 1.0)
    assert pointer_mean_momentum(psi) == pytest.approx(GRID.hbar * k, abs=1e-8)
    assert pointer_mean_position(psi) == pytest.approx(0.0, abs=1e-10)


def test_mean_position_of_shifted_gaussian():
    d = 1.37
    x = GRID.positions()
    psi = pointer.PointerState(GRID, np.exp(-((x - d) ** 2) / 4.0), 1.0)
    assert pointer_mean_position(psi) == pytest.approx(d, abs=1e-8)
    assert pointer_mean_momentum(psi) == pytest.approx(0.0, abs=1e-8)


def test_momentum_distribution_normalized():
    phi = gaussian_pointer(GRID, 2.0)
    _, probs = momentum_distribution(phi)
    assert float(np.sum(probs)) == pytest.approx(1.0, abs=1e-12)


def test_predicted_shifts_closed_forms():
    assert predicted_shifts(0.7, sigma=2.0) == (0.0, 0.7)  # real weak value
    dx, dp = predicted_shifts(1j, sigma=1.0, hbar=1.0)
    assert dx == pytest.approx(-2.0)
    assert predicted_shifts(1.0, sigma=1.0)[1] == pytest.approx(1.0)


def test_run_ccr_protocol_small_g_limit():
    cfg = GridConfig(128, 40.0)
    x_op, p_op = make_grid_ops(cfg)
    i = gaussian_grid_state(cfg, width=cfg.length / 24.0)
    f = two_hump_state(cfg)
    res = run_ccr_protocol(i, f, x_op, p_op, 1.0, 1.0, g=1e-7)
    assert abs(res.dx_d) < 1e-6
    assert abs(res.dx_d_prime) < 1e-6


def test_run_ccr_protocol_convergence_orders():
    # raw shift error is O(g^3): the centered symmetric pointer kills the
    # even-order terms by parity; per-unit-coupling error is O(g^2)
    cfg = GridConfig(128, 40.0)
    x_op, p_op = make_grid_ops(cfg)
    i = gaussian_grid_state(cfg, width=cfg.length / 24.0)
    f = two_hump_state(cfg)
    x_w = weak_value(i, f, x_op).value
    devs = {}
    for g in (0.02, 0.01):
        res = run_ccr_protocol(i, f, x_op, p_op, 1.0, 1.0, g)
        devs[g] = res.dx_d - res.predicted_dx
    raw_ratio = devs[0.02] / devs[0.01]
    assert raw_ratio == pytest.approx(8.0, rel=0.2)
    norm_ratio = (devs[0.02] / 0.02) / (devs[0.01] / 0.01)
    assert norm_ratio == pytest.approx(4.0, rel=0.2)
    assert abs(devs[0.01]) < abs(devs[0.02]) / 3.2


def test_run_ccr_protocol_momentum_eigen_midselection_exact():
    cfg = GridConfig(128, 40.0)
    x_op, p_op = make_grid_ops(cfg)
    i = gaussian_grid_state(cfg, width=cfg.length / 24.0)
    k = 2.0 * np.pi * 3 / cfg.length
    f = hilbert.StateVector(cfg.basis_id, np.exp(1j * k * cfg.positions()))
    g = 0.01
    res = run_ccr_protocol(i, f, x_op, p_op, 1.0, 1.0, g)
    # second-stage translation oracle: pointer moves by exactly g * (hbar k)
    assert res.dx_d_prime == pytest.approx(g * cfg.hbar * k, abs=1e-10)
    assert res.p_w_bar.imag == pytest.approx(0.0, abs=1e-12)


def test_run_ccr_protocol_wrap_guard():
    cfg = GridConfig(128, 40.0)
    x_op, p_op = make_grid_ops(cfg)
    i = gaussian_grid_state(cfg, width=cfg.length / 24.0)
    k = 2.0 * np.pi * 2 / cfg.length
    f = hilbert.StateVector(cfg.basis_id, np.exp(1j * k * cfg.positions()))
    with pytest.raises(GridResolutionError):
        # predicted translations far beyond a quarter box
        run_ccr_protocol(i, f, x_op, p_op, 1.0, 1.0, g=40.0)


def test_run_ccr_protocol_probabilities_near_born_weights():
    cfg = GridConfig(128, 40.0)
    x_op, p_op = make_grid_ops(cfg)
    i = gaussian_grid_state(cfg, width=cfg.length / 24.0)
    k = 2.0 * np.pi / cfg.length
    f = hilbert.StateVector(cfg.basis_id, np.exp(1j * k * cfg.positions()))
    w = abs(hilbert.inner(f, i)) ** 2
    res = run_ccr_protocol(i, f, x_op, p_op, 1.0, 1.0, g=0.01)
    assert res.prob_mid == pytest.approx(w, rel=1e-3)
    assert res.prob_post == pytest.approx(w, rel=1e-12)  # eigenvector stage exact
