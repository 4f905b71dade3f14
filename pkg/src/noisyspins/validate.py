"""Acceptance harness: one callable per release criterion.

Each criterion returns a CriterionResult with pass/fail, runtime, and the
measured numbers; `run` executes a selection and is what the CLI's
`validate` subcommand and the pytest acceptance module share.  Every
criterion is deterministic (fixed seeds).
"""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, bethe, combinatorics, liouvillian as lv, qme, spectra, trajectories
from .params import ModelParams, uniform_ladder


@dataclass
class CriterionResult:
    cid: str
    name: str
    passed: bool
    runtime_s: float
    details: dict = field(default_factory=dict)


def _result(cid, name, passed, t0, **details) -> CriterionResult:
    return CriterionResult(
        cid=cid, name=name, passed=bool(passed),
        runtime_s=round(time.time() - t0, 3), details=details,
    )


@contextlib.contextmanager
def inject_fault(fault: str | None):
    """Negative-control hook: corrupt one ingredient to prove the harness bites.

    "bethe-sign" flips the sign of the coupling-field term in the root
    equations (residual shifted by -2/g_plus), which sends every Newton
    solve to the wrong branch or to divergence.
    """
    if fault is None:
        yield
        return
    if fault != "bethe-sign":
        raise ValueError(f"unknown fault {fault!r}")
    original = bethe.residual

    def flipped(roots, p, m=None):
        base = original(roots, p, m)
        return base - 2.0 * p.inv_g_plus

    bethe.residual = flipped
    try:
        yield
    finally:
        bethe.residual = original


def criterion_a1() -> CriterionResult:
    """Zero-mode counts at equal detunings match the Riordan numbers."""
    t0 = time.time()
    expected = {2: 1, 3: 1, 4: 3, 5: 6, 6: 15}
    counts = {}
    ok = True
    for n, g in [(n, g) for n in expected for g in (0.7, 80.0)]:
        p = ModelParams(n, 1.1, (0.0,) * n, g, 0.0)
        ev = lv.spectrum_by_sectors(p).eigenvalues
        count = int(np.sum(np.abs(ev) < 1e-8 * g * n))
        counts[f"n={n},g={g}"] = count
        ok &= count == expected[n] == combinatorics.riordan(n)
    return _result("A1", "Riordan zero-mode counts", ok, t0, counts=counts)


def criterion_a2() -> CriterionResult:
    """Equal-detuning spectrum matches the total-spin parabola formula."""
    t0 = time.time()
    Om, g = 0.7, 1.3
    worst = 0.0
    for n in range(1, 6):
        p = ModelParams(n, Om, (0.0,) * n, g, 0.0)
        ed = lv.spectrum_by_sectors(p).eigenvalues
        ana = np.array([
            lam
            for S, M, lam, mult in lv.omega_zero_spectrum(n, Om, g)
            for _ in range(mult)
        ])
        worst = max(worst, lv.multiset_defect(ana, ed))
    return _result("A2", "analytic equal-detuning spectrum", worst < 1e-8, t0,
                   max_defect=worst, tolerance=1e-8)


def criterion_a3() -> CriterionResult:
    """Correlator-block time derivative equals the spin-1 generator action."""
    t0 = time.time()
    p = ModelParams(3, 0.9, (0.4, -0.7, 0.2), 0.8, 0.3)
    gen = lv.correlator_generator(p, basis="cartesian").mat
    h = 1e-4
    worst = 0.0
    for seed in range(10):
        rho0 = qme.random_density_matrix(3, np.random.default_rng(seed))
        rho_h = qme.evolve_rk4(rho0, p, h, h / 10)
        rho_2h = qme.evolve_rk4(rho_h, p, h, h / 10)
        c0 = qme.rank_n_block(qme.correlation_tensor(rho0), (0, 1, 2))
        c2 = qme.rank_n_block(qme.correlation_tensor(rho_2h), (0, 1, 2))
        ch = qme.rank_n_block(qme.correlation_tensor(rho_h), (0, 1, 2))
        fd = (c2 - c0) / (2 * h)
        ref = gen @ ch
        worst = max(worst, float(np.linalg.norm(fd - ref) / np.linalg.norm(ref)))
    return _result("A3", "operator-mapping identity", worst < 1e-6, t0,
                   max_rel_error=worst, tolerance=1e-6)


def criterion_a4() -> CriterionResult:
    """Trajectory average agrees with the master equation within MC error."""
    t0 = time.time()
    p = ModelParams(2, 0.9, (0.25, -0.15), 1.0, 0.5)
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[0, 0], rho0[3, 3] = 0.6, 0.4
    rho0[0, 3] = rho0[3, 0] = 0.35
    cfg = trajectories.TrajectoryConfig(params=p, dt=1e-3, t_final=0.5,
                                        n_traj=20000, seed=20240521)
    mean, err = trajectories.average_evolution(rho0, cfg)
    ref = qme.evolve_rk4(rho0, p, 0.5, 1e-3)
    z = np.abs(mean - ref) / np.maximum(err, 1e-15)
    frac2 = float(np.mean(z <= 2.0))
    ok = frac2 >= 0.95 and bool(np.all(z <= 5.0))
    return _result("A4", "stochastic-unitary equivalence", ok, t0,
                   fraction_within_2se=frac2, max_z=float(z.max()),
                   n_traj=cfg.n_traj)


def criterion_a5() -> CriterionResult:
    """String-branch eigenvalues and eigenvectors agree with diagonalization."""
    t0 = time.time()
    g_grid = [1000.0, 100.0, 10.0]
    rows = []
    ok = True
    for n in (3, 4, 5, 6):
        p = uniform_ladder(n, 2.0, -(n + 3), 1.0)
        sols = bethe.continuation_string_state(p, g_grid)
        for sol, g in zip(sols, g_grid):
            pg = p.with_g_plus(g)
            ev = np.linalg.eigvals(lv.build_sector(pg, 0))
            dist = float(np.abs(ev - sol.eigenvalue).min())
            resid = bethe.eigenpair_residual(pg, sol)
            rows.append({"n": n, "g": g, "ed_dist": dist, "vec_resid": resid})
            ok &= dist < 1e-8 and resid < 1e-8
    n = 8
    p = uniform_ladder(n, 2.0, -(n + 3), 1.0)
    sols = bethe.continuation_string_state(p, g_grid)
    for sol, g in zip(sols, g_grid):
        pg = p.with_g_plus(g)
        ev = np.linalg.eigvals(lv.build_sector(pg, 0))
        dist = float(np.abs(ev - sol.eigenvalue).min())
        rows.append({"n": 8, "g": g, "ed_dist": dist})
        ok &= dist < 1e-6
    return _result("A5", "root-equation vs dense diagonalization", ok, t0,
                   cases=rows)


def criterion_a6() -> CriterionResult:
    """Finite-size string rates converge to the infinite-ladder limit.

    Convergence is measured per spin (rate/n against delta_minus -
    delta_plus); the absolute gap carries an O(1) boundary term that does
    not shrink with n, so the per-spin form is the meaningful one.
    """
    t0 = time.time()
    delta_y = 2.0
    grid = np.geomspace(0.001, 0.05, 20)
    rates = {}
    splits_ok = True
    for n in (20, 40, 60):
        p = uniform_ladder(n, delta_y, -(n + 3), 1.0)
        sols = bethe.continuation_string_state(p, list(1.0 / grid))
        rates[n] = np.array([-s.eigenvalue.real for s in sols])
        for s in sols:
            splits_ok &= int(np.sum(s.roots.real > 0)) == n // 2
    pred = np.array([
        asymptotics.solve_delta(delta_y, 1.0 / ig).delta_minus
        - asymptotics.solve_delta(delta_y, 1.0 / ig).delta_plus
        for ig in grid
    ])
    rel = {n: np.abs(rates[n] / n - pred) / pred for n in rates}
    monotone = bool(np.all(rel[20] > rel[40]) and np.all(rel[40] > rel[60]))
    within5 = bool(np.all(rel[60] < 0.05))
    formula_validated = monotone and within5 and splits_ok
    details = {
        "even_split": splits_ok,
        "monotone_per_spin": monotone,
        "n60_max_rel": float(rel[60].max()),
        "formula_validated": formula_validated,
    }
    if not formula_validated:
        # flagged fallback: report the finite-n extrapolation instead
        extrap = rates[60] + (rates[60] - rates[40])
        details["fallback_extrapolation_rate"] = extrap.tolist()
        details["flag"] = "asymptotic rate reconstruction failed validation"
    return _result("A6", "large-n convergence to the asymptotic rate",
                   formula_validated, t0, **details)


def criterion_a7() -> CriterionResult:
    """Strong-noise suppression: rate ~ omega^2 / g_plus."""
    t0 = time.time()
    rng = np.random.default_rng(7)
    omega = tuple(rng.uniform(-0.5, 0.5, 4))
    products = []
    for g in (1e2, 1e3, 1e4):
        p = ModelParams(4, 1.0, omega, g, 0.0)
        products.append(lv.dominant_rate(p) * g)
    spread = (max(products) - min(products)) / products[1]
    ok = spread < 0.02
    ratios = {}
    base = lv.dominant_rate(ModelParams(4, 1.0, omega, 1e3, 0.0))
    for s in (0.5, 2.0):
        scaled = tuple(s * w for w in omega)
        r = lv.dominant_rate(ModelParams(4, 1.0, scaled, 1e3, 0.0))
        ratios[s] = r / base
        ok &= abs(ratios[s] / s ** 2 - 1.0) < 0.02
    return _result("A7", "noise-suppressed decay scaling", ok, t0,
                   rate_times_g=products, scaling_ratios=ratios)


def criterion_a8() -> CriterionResult:
    """Conjugation symmetry and spectral stability over random draws."""
    t0 = time.time()
    rng = np.random.default_rng(88)
    worst_defect, worst_re = 0.0, -np.inf
    for k in range(50):
        n = int(rng.integers(2, 7))
        p = ModelParams(
            n, float(rng.uniform(-2, 2)), tuple(rng.uniform(-1, 1, n)),
            float(rng.uniform(0.5, 5.0)), float(rng.uniform(0.0, 1.0)),
        )
        ev = lv.spectrum_by_sectors(p).eigenvalues
        worst_defect = max(worst_defect, lv.conjugation_defect(ev))
        worst_re = max(worst_re, float(ev.real.max()))
    ok = worst_defect < 1e-8 and worst_re <= 1e-10
    return _result("A8", "conjugation symmetry and stability", ok, t0,
                   max_defect=worst_defect, max_real_part=worst_re)


def criterion_a9() -> CriterionResult:
    """Level statistics: Poissonian spacings, Wigner control, Weibull report."""
    t0 = time.time()
    groups = []
    for k in range(100):
        r = np.random.default_rng(5000 + k)
        p6 = ModelParams(6, 1.0, tuple(r.uniform(-0.2, 0.2, 6)), 800.0, 0.0)
        groups.append(spectra.singlet_cluster_levels(p6))
    w = spectra.CLUSTER_POOL_WINDOW
    _, p_pool = spectra.pooled_spacing_statistics(groups, window=w)
    # benchmark: exactly Poissonian draws of the same shape through the
    # same pipeline, to show the physical p sits at the pipeline's scale
    synth = [np.cumsum(np.random.default_rng(90000 + k).exponential(size=15))
             for k in range(100)]
    _, p_synth = spectra.pooled_spacing_statistics(synth, window=w)
    rng = np.random.default_rng(9)
    wigner_levels = np.cumsum(spectra.wigner_spacing_sample(400, rng))
    _, p_wigner = spectra.spacing_statistics(wigner_levels)
    sample = spectra.rate_distribution(
        5, spectra.OmegaSampler("uniform", 0.2), 800.0, 500, seed=42, omega_big=1.0
    )
    alpha, beta, ks_p = spectra.weibull_fit(sample)
    ok = p_pool > 0.001 and p_wigner < 0.01
    return _result("A9", "level statistics and rate-distribution report", ok, t0,
                   pooled_exponential_p=p_pool, poisson_benchmark_p=p_synth,
                   wigner_control_p=p_wigner,
                   weibull={"alpha": alpha, "beta": beta, "ks_p": ks_p})


def criterion_a10() -> CriterionResult:
    """Collective-enhancement scaling of the maximal-spin branch."""
    t0 = time.time()
    n, g = 6, 1.0
    analytic = [lam for S, M, lam, _ in lv.omega_zero_spectrum(n, 0.3, g)
                if S == n and M == 0]
    exact_ok = len(analytic) == 1 and analytic[0] == -g * n * (n + 1)
    p = uniform_ladder(n, 2.0, 0.3, g)
    lams = {}
    for s in (1e-3, 5e-4):
        ps = p.with_omega(s * p.omega_array)
        lams[s] = bethe.continuation_max_spin_state(ps, [g])[0].eigenvalue
    s1, s2 = 1e-3, 5e-4
    extrap = (s1 ** 2 * lams[s2] - s2 ** 2 * lams[s1]) / (s1 ** 2 - s2 ** 2)
    err = abs(extrap - (-g * n * (n + 1)))
    ok = exact_ok and err < 1e-6 * g * n ** 2
    return _result("A10", "maximal-spin branch collective scaling", ok, t0,
                   analytic_exact=exact_ok, extrapolated=complex(extrap),
                   error=float(err), tolerance=1e-6 * g * n ** 2)


CRITERIA = {
    "A1": criterion_a1,
    "A2": criterion_a2,
    "A3": criterion_a3,
    "A4": criterion_a4,
    "A5": criterion_a5,
    "A6": criterion_a6,
    "A7": criterion_a7,
    "A8": criterion_a8,
    "A9": criterion_a9,
    "A10": criterion_a10,
}


def run(criteria=None, fault: str | None = None) -> list[CriterionResult]:
    selected = list(CRITERIA) if criteria is None else list(criteria)
    unknown = [c for c in selected if c not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria: {unknown}")
    results = []
    with inject_fault(fault):
        for cid in selected:
            t0 = time.time()
            try:
                results.append(CRITERIA[cid]())
            except Exception as exc:  # a crashed criterion is a failed criterion
                results.append(CriterionResult(
                    cid=cid, name=CRITERIA[cid].__doc__.split("\n")[0],
                    passed=False, runtime_s=round(time.time() - t0, 3),
                    details={"error": f"{type(exc).__name__}: {exc}"},
                ))
    return results
