"""Acceptance suite: one test per criterion, each printing a PASS/FAIL summary line.

Monte Carlo criteria use the default seed so every run reproduces the same
numbers.  The summary lines are collected in the terminal report under
"acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

from hlrs import hfbm, leroy, rng, simulate, verify
from hlrs.specfun import leroy as leroy_fn
from hlrs.specfun import model_constants

from acceptance_log import record
from mc import mean_with_se, second_moments
from oracles import inner_product_oracle, square_integral

pytestmark = pytest.mark.acceptance

SEED = rng.DEFAULT_SEED
N_MC = 100_000


def test_variance_law():
    start = time.perf_counter()
    grid = [1.0, 2.0, 4.0]
    worst = 0.0
    for alpha in (0.25, 0.5, 1.5, 1.75):
        v = simulate.paths_factorization(alpha, grid, N_MC, SEED).values
        m, se = second_moments(v)
        worst = max(worst, float(np.max(np.abs(np.diag(m) - grid) / np.diag(se))))
    elapsed = time.perf_counter() - start
    ok = worst <= 3.0 and elapsed < 30.0
    record(1, "variance equals t", ok, f"max |var - t|/se = {worst:.2f} (limit 3), {elapsed:.1f} s")
    assert worst <= 3.0
    assert elapsed < 30.0


def test_covariance_against_quadrature():
    start = time.perf_counter()
    gen = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        alpha = gen.choice([gen.uniform(0.05, 0.95), gen.uniform(1.05, 1.95)])
        s, t = np.sort(gen.uniform(0.05, 5.0, 2))
        exact = inner_product_oracle(alpha, s, t)
        worst = max(worst, abs(hfbm.covariance(alpha, s, t) - exact) / abs(exact))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 10.0
    record(2, "covariance closed form vs quadrature", ok, f"max rel err {worst:.2e} (limit 1e-6), {elapsed:.1f} s")
    assert worst <= 1e-6
    assert elapsed < 10.0


def test_indicator_square_norms():
    worst = 0.0
    for alpha in (0.3, 0.7, 1.3, 1.7):
        _, k = model_constants(alpha)
        for b in (1.0, 5.0):
            # the closed form carries K_alpha; the target norm is stated without it
            numeric = square_integral(alpha, 0.0, b) / k**2
            target = b * math.gamma(alpha) / math.gamma((alpha + 1) / 2) ** 2
            worst = max(worst, abs(numeric - target) / target)
    record(3, "L2 norm of the operator on indicators", worst <= 1e-6, f"max rel err {worst:.2e} (limit 1e-6)")
    assert worst <= 1e-6


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_generator_cross_validation(alpha):
    grid = [0.5, 1.0, 2.0]
    n_steps = 1024
    exact = hfbm.covariance_matrix(alpha, grid).entries
    bias = {n: float(np.max(np.abs(simulate.kernel_quadrature_covariance(alpha, grid, n) - exact)))
            for n in (n_steps, 2 * n_steps)}
    halving = bias[n_steps] / bias[2 * n_steps]
    m_f, se_f = second_moments(simulate.paths_factorization(alpha, grid, N_MC, SEED).values)
    m_k, se_k = second_moments(simulate.paths_kernel_quadrature(alpha, grid, n_steps, N_MC, SEED + 1).values)
    excess = float(np.max(np.abs(m_f - m_k) - (3 * np.hypot(se_f, se_k) + bias[n_steps])))
    agree = excess <= 0.0
    ok = agree and halving >= 2.0
    record(4, f"kernel quadrature vs factorization, alpha={alpha}", ok,
           f"agreement {'ok' if agree else 'violated'} (excess {excess:.2e}); "
           f"bias {bias[n_steps]:.2e} -> {bias[2 * n_steps]:.2e}, ratio {halving:.2f} (need >= 2)")
    assert agree
    assert halving >= 2.0


def test_mixing_law_certificates(mixing_laws):
    worst_moment = worst_laplace = 0.0
    for beta in (0.3, 0.5, 0.7, 0.9):
        law = mixing_laws[beta]
        for r in range(5):
            target = math.factorial(r) ** (1 - beta)
            worst_moment = max(worst_moment, abs(law.moment(r) - target) / target)
        for s in (0.5, 1.0, 2.0):
            target = leroy_fn(beta, -s)
            worst_laplace = max(worst_laplace, abs(law.laplace(s) - target) / target)
    ok = worst_moment <= 1e-3 and worst_laplace <= 1e-3
    record(5, "mixing law moments and Laplace transform", ok,
           f"moments {worst_moment:.1e}, Laplace {worst_laplace:.1e} (limit 1e-3)")
    assert worst_moment <= 1e-3
    assert worst_laplace <= 1e-3


def test_one_dimensional_law_forgets_alpha(mixing_laws):
    beta, times, thetas = 0.5, [1.0, 2.0], (0.5, 1.0, 2.0)
    samples = {
        alpha: simulate.paths_lhm(alpha, beta, times, N_MC, SEED + k).values
        for k, alpha in enumerate((0.5, 1.5))
    }
    worst_target = worst_pair = 0.0
    for j, t in enumerate(times):
        for theta in thetas:
            target = leroy_fn(beta, -theta * theta * t / 2)
            est = {a: mean_with_se(np.cos(theta * v[:, j])) for a, v in samples.items()}
            for mean, se in est.values():
                worst_target = max(worst_target, abs(mean - target) / se)
            (m1, s1), (m2, s2) = est[0.5], est[1.5]
            worst_pair = max(worst_pair, abs(m1 - m2) / math.hypot(s1, s2))
    ok = worst_target <= 3.0 and worst_pair <= 2.0
    record(6, "one-dimensional law does not depend on alpha", ok,
           f"max z vs R_beta {worst_target:.2f} (limit 3), max z between alphas {worst_pair:.2f} (limit 2)")
    assert worst_target <= 3.0
    assert worst_pair <= 2.0


def test_heat_equation():
    t = np.linspace(0.1, 3.0, 30)
    rep = verify.check_pde_charfn(0.5, 0.5, 1.0, t)
    coarse = verify.check_pde_charfn(0.5, 0.5, 1.0, t, panels=8)
    reduction = coarse.details["reduction"]
    ok = rep.residual <= 1e-4 and reduction >= 4.0
    record(7, "fractional heat equation", ok,
           f"residual {rep.residual:.1e} at {2 * rep.params['panels']} panels (limit 1e-4); "
           f"reduction x{reduction:.0f} from 8 to 16 panels (need 4)")
    assert rep.residual <= 1e-4
    assert reduction >= 4.0


def test_eigenfunction():
    t = np.linspace(0.1, 3.0, 30)
    residuals = {beta: verify.check_eigenfunction(beta, 0.4, t).residual for beta in (0.4, 0.6, 0.9)}
    worst = max(residuals.values())
    record(8, "Le Roy eigenfunction relation", worst <= 1e-5,
           ", ".join(f"beta={b}: {r:.1e}" for b, r in residuals.items()) + " (limit 1e-5)")
    assert worst <= 1e-5


def test_stransform_identity():
    reps = {alpha: verify.check_stransform_identity(alpha, t_grid=np.linspace(0.5, 3.0, 11)) for alpha in (0.5, 1.5)}
    limits = {0.5: 1e-3, 1.5: 1e-4}
    ok = all(reps[a].residual <= limits[a] for a in reps)
    record(9, "S-transform and noise identity", ok,
           ", ".join(f"alpha={a}: {reps[a].residual:.1e} (limit {limits[a]:.0e})" for a in reps))
    for a in reps:
        assert reps[a].residual <= limits[a]


def test_memory_dichotomy():
    start = time.perf_counter()
    ms = np.unique(np.geomspace(10, 10_000, 61).round().astype(int))
    down, up, flat = (hfbm.memory_ratios(alpha, 2, ms) for alpha in (0.5, 1.5, 1.0))
    elapsed = time.perf_counter() - start
    anti = bool(np.all(np.diff(down) < 0) and down[-1] < 0.5 * down[0])
    persistent = bool(np.all(np.diff(up) > 0) and up[-1] > 2.0 * up[0])
    brownian = bool(np.all(flat == 1.0))
    ok = anti and persistent and brownian and elapsed < 1.0
    record(10, "memory dichotomy", ok,
           f"alpha=0.5 ratio {down[0]:.3f} -> {down[-1]:.3f}, alpha=1.5 {up[0]:.3f} -> {up[-1]:.3f}, "
           f"alpha=1 exact: {brownian}, {len(ms)} values of m in {elapsed:.2f} s")
    assert anti and persistent and brownian
    assert elapsed < 1.0


def test_product_defect():
    at_one = abs(leroy.product_defect(1.0))
    others = {b: leroy.product_defect(b) for b in (0.3, 0.5, 0.7)}
    oracle_gap = max(abs(leroy.product_defect(b) - leroy.product_defect_from_moments(b)) for b in (0.3, 0.5, 0.7, 1.0))
    ok = at_one <= 1e-12 and min(abs(v) for v in others.values()) > 1e-3 and oracle_gap <= 1e-10
    record(11, "product-measure defect", ok,
           f"|defect(1)| {at_one:.1e}; " + ", ".join(f"beta={b}: {v:.4f}" for b, v in others.items())
           + f"; oracle gap {oracle_gap:.1e}")
    assert at_one <= 1e-12
    assert all(abs(v) > 1e-3 for v in others.values())
    assert oracle_gap <= 1e-10


def test_sup_ordering():
    start = time.perf_counter()
    reps = [verify.check_sup_inequality(alpha, 1.0, (0.5, 1.0, 1.5), N_MC, 1024, SEED) for alpha in (0.5, 1.5)]
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in reps) and elapsed < 120.0
    record(12, "supremum ordering against Brownian motion", ok,
           "; ".join(f"alpha={r.params['alpha']}: worst z {r.residual:.2f} (limit 2)" for r in reps)
           + f", {elapsed:.0f} s")
    assert all(r.passed for r in reps)
    assert elapsed < 120.0


def test_ou_mean(mixing_laws):
    ou = simulate.OUParams(0.8, 1.0, 2.0)
    times = [0.5, 1.0, 2.0]
    v = simulate.paths_ou(0.5, 0.5, ou, times, N_MC, SEED).values
    worst = 0.0
    for j, t in enumerate(times):
        mean, se = mean_with_se(v[:, j])
        worst = max(worst, abs(mean - 2.0 * math.exp(-0.8 * t)) / se)
    record(13, "Ornstein-Uhlenbeck mean", worst <= 3.0, f"max z {worst:.2f} (limit 3)")
    assert worst <= 3.0
