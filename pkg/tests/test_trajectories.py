import numpy as np
import pytest
from scipy.linalg import expm

from noisyspins import qme, trajectories as tj
from noisyspins.params import ModelParams
from noisyspins.spinalg import embed, spin_half


def reference_step(rho, p, inc):
    """Independent oracle: dense matrix exponential of the full increment."""
    n = p.n_spins
    dH = sum(p.precessions[j] * embed(spin_half("z"), j, n, 2) for j in range(n)) * inc.dt
    totals = {a: sum(embed(spin_half(a), j, n, 2) for j in range(n)) for a in "xyz"}
    dH = dH + np.sqrt(p.g_plus) * (totals["x"] * inc.d_eta_x + totals["y"] * inc.d_eta_y)
    dH = dH + np.sqrt(p.g_zero) * totals["z"] * inc.d_eta_z
    U = expm(-1j * dH)
    return U @ rho @ U.conj().T


def test_step_matches_dense_exponential():
    rng = np.random.default_rng(2)
    p = ModelParams(2, 0.9, (0.25, -0.15), 1.0, 0.5)
    for _ in range(5):
        inc = tj.NoiseIncrement(*(rng.normal(size=3) * 0.05), dt=1e-3)
        rho = qme.random_density_matrix(2, rng)
        out = tj.step_unitary(rho, p, inc)
        assert np.abs(out - reference_step(rho, p, inc)).max() < 1e-13


def test_zero_noise_step_is_pure_precession():
    p = ModelParams(1, 1.3, (0.2,), 0.7, 0.4)
    rho = np.array([[0.7, 0.2], [0.2, 0.3]], dtype=complex)
    inc = tj.NoiseIncrement(0.0, 0.0, 0.0, dt=1e-3)
    out = tj.step_unitary(rho, p, inc)
    phi = (1.3 + 0.2) * 1e-3
    assert abs(out[0, 1] - rho[0, 1] * np.exp(-1j * phi)) < 1e-14


def test_step_preserves_purity():
    rng = np.random.default_rng(4)
    p = ModelParams(2, 0.9, (0.25, -0.15), 1.0, 0.5)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    inc = tj.NoiseIncrement(0.04, -0.02, 0.03, dt=1e-3)
    out = tj.step_unitary(rho, p, inc)
    assert abs(np.trace(out @ out).real - 1.0) < 1e-12
    assert abs(np.trace(out).real - 1.0) < 1e-12


def test_dephasing_only_step_keeps_populations():
    p = ModelParams(1, 0.0, (0.0,), 0.0, 2.0)
    rho = np.array([[0.7, 0.2], [0.2, 0.3]], dtype=complex)
    eta_z = 0.13
    inc = tj.NoiseIncrement(0.0, 0.0, eta_z, dt=1e-3)
    out = tj.step_unitary(rho, p, inc)
    assert abs(out[0, 0] - 0.7) < 1e-14
    phase = np.sqrt(2.0) * eta_z
    assert abs(out[0, 1] - rho[0, 1] * np.exp(-1j * phase)) < 1e-14


def test_average_reduces_to_deterministic_without_noise():
    p = ModelParams(2, 0.8, (0.3, -0.2), 0.0, 0.0)
    rho0 = qme.random_density_matrix(2, np.random.default_rng(0))
    cfg = tj.TrajectoryConfig(params=p, dt=1e-3, t_final=0.3, n_traj=8, seed=5)
    mean, err = tj.average_evolution(rho0, cfg)
    ref = qme.evolve_rk4(rho0, p, 0.3, 1e-3)
    assert np.abs(mean - ref).max() < 1e-8
    # identical trajectories: stderr is pure one-pass-variance roundoff
    assert err.max() < 1e-8


def test_average_is_seed_reproducible():
    p = ModelParams(1, 0.5, (0.1,), 0.8, 0.2)
    rho0 = np.diag([0.8, 0.2]).astype(complex)
    cfg = tj.TrajectoryConfig(params=p, dt=1e-3, t_final=0.1, n_traj=500, seed=77)
    m1, e1 = tj.average_evolution(rho0, cfg)
    m2, e2 = tj.average_evolution(rho0, cfg)
    assert np.array_equal(m1, m2) and np.array_equal(e1, e2)


def test_stderr_scales_with_trajectory_count():
    p = ModelParams(1, 0.5, (0.1,), 1.0, 0.3)
    rho0 = np.array([[0.6, 0.3], [0.3, 0.4]], dtype=complex)
    errs = {}
    for n_traj in (1000, 2000):
        cfg = tj.TrajectoryConfig(params=p, dt=2e-3, t_final=0.2, n_traj=n_traj, seed=3)
        _, err = tj.average_evolution(rho0, cfg)
        errs[n_traj] = np.median(err[err > 0])
    ratio = errs[1000] / errs[2000]
    assert abs(ratio - np.sqrt(2.0)) < 0.2 * np.sqrt(2.0)


def test_mini_equivalence_against_rk4():
    p = ModelParams(2, 0.9, (0.25, -0.15), 1.0, 0.5)
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[0, 0], rho0[3, 3] = 0.6, 0.4
    rho0[0, 3] = rho0[3, 0] = 0.35
    cfg = tj.TrajectoryConfig(params=p, dt=1e-3, t_final=0.25, n_traj=4000, seed=13)
    mean, err = tj.average_evolution(rho0, cfg)
    ref = qme.evolve_rk4(rho0, p, 0.25, 1e-3)
    z = np.abs(mean - ref) / np.maximum(err, 1e-15)
    assert np.mean(z <= 2.0) >= 0.95
    assert z.max() <= 5.0


def test_drift_matches_deterministic_commutator():
    p = ModelParams(1, 1.3, (0.0,), 0.0, 0.0)
    rho = qme.random_density_matrix(1, np.random.default_rng(2))
    res = tj.ito_drift_check(rho, p, 1e-3, 50, 0)
    assert res.max() < 1e-3  # only the O(dt) commutator correction remains


def test_drift_matches_dephasing_double_commutator():
    p = ModelParams(1, 0.0, (0.0,), 0.0, 1.0)
    rho = np.array([[0.65, 0.25 - 0.1j], [0.25 + 0.1j, 0.35]])
    res = tj.ito_drift_check(rho, p, 5e-4, 20000, 3)
    assert res.max() < 2e-3


def test_drift_residual_halves_with_dt():
    p = ModelParams(2, 0.9, (0.25, -0.15), 1.0, 0.5)
    rho = qme.random_density_matrix(2, np.random.default_rng(1))
    r1 = np.linalg.norm(tj.ito_drift_check(rho, p, 4e-3, 400000, 11))
    r2 = np.linalg.norm(tj.ito_drift_check(rho, p, 2e-3, 400000, 12))
    assert 1.6 < r1 / r2 < 2.4


def test_config_validation():
    p = ModelParams(1, 0.0, (0.0,), 1.0, 0.0)
    with pytest.raises(ValueError):
        tj.TrajectoryConfig(params=p, dt=-1.0, t_final=1.0, n_traj=10, seed=0)
    with pytest.raises(ValueError):
        tj.TrajectoryConfig(params=p, dt=1e-3, t_final=1.0, n_traj=0, seed=0)
