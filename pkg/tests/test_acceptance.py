"""Acceptance suite: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
PASS/FAIL lines. Three bounds are asserted exactly as stated although the
exact stochastic model is known not to meet them (marked known_gap; the
assertion messages carry the mathematical reason): the discrete first
passage overshoots the threshold, which biases the winter sample mean a few
days past tau/alpha (criterion 4a); at sigma/alpha = 10 the hitting law is
still visibly skewed at these thresholds, keeping its KS distance from the
fitted normal above 0.05 at the alpha=2 winter cells for any seed (3a); and
under the sharper standardization the spring cells' KS already sits at the
Monte Carlo noise floor, so "agreement improves with tau" holds structurally
only for the 2 winter pairs of 4 (3b). Deselect with -m "not known_gap".
"""

import time
from itertools import product
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from thermalsum import checks, fitting, model, reference, simulate
from thermalsum.cli import main as cli_main

ACCEPTANCE_SEED = 7
RUNTIME_BUDGET_S = 60.0


def report(tag: str, ok: bool, detail: str) -> str:
    line = f"CRITERION {tag}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    return line


@pytest.fixture(scope="session")
def sim2_grid():
    t0 = time.perf_counter()
    grid = simulate.run_simulation_2(seed=ACCEPTANCE_SEED, threads=1)
    return grid, time.perf_counter() - t0


@pytest.fixture(scope="session")
def sim1_results():
    results = {}
    cells = list(product(simulate.SIM1_ALPHAS, simulate.SIM1_BETAS, simulate.SIM1_TAUS))
    for cell, (a, b, tau) in enumerate(cells):
        results[(a, b, tau)] = simulate.run_simulation_1(
            a, b, tau, seed=ACCEPTANCE_SEED, cell=cell
        )
    return results


@pytest.fixture(scope="session")
def walnut_fit():
    return fitting.fit_winter_wls(fitting.load_walnut_observations())


def test_criterion_1_seasonal_mean_grid(sim2_grid):
    grid, elapsed = sim2_grid
    outcomes = checks.sim2_mean_checks(grid)
    failures = [c for c in outcomes if not c.ok]
    worst = max(
        abs(grid.mean(*k) - v) for k, v in reference.SIM2_MEANS.items()
    )
    runtime_ok = elapsed < RUNTIME_BUDGET_S
    detail = (
        f"18/18 cells within {reference.SIM2_MEAN_TOL_DAYS} days "
        f"(worst |diff| {worst:.3f}); grid runtime {elapsed:.1f}s < {RUNTIME_BUDGET_S:.0f}s"
        if not failures and runtime_ok
        else f"failing: {[c.name for c in failures]}; runtime {elapsed:.1f}s"
    )
    line = report("1", not failures and runtime_ok, detail)
    assert not failures and runtime_ok, line


def test_criterion_2_seasonal_sd_grid(sim2_grid):
    grid, _ = sim2_grid
    outcomes = checks.sim2_sd_checks(grid)
    failures = [c for c in outcomes if not c.ok]
    worst = max(
        abs(grid.sd(*k) / v - 1.0) for k, v in reference.SIM2_SDS.items()
    )
    detail = (
        f"18/18 cells within {reference.SIM2_SD_REL_TOL:.0%} relative (worst {worst:.2%})"
        if not failures
        else f"failing: {[c.name for c in failures]}"
    )
    line = report("2", not failures, detail)
    assert not failures, line


@pytest.mark.known_gap
def test_criterion_3_standardized_normality(sim1_results):
    outcomes = checks.sim1_ks_checks(sim1_results)
    failures = [c for c in outcomes if not c.ok]
    table = ", ".join(
        f"(a={a:g},b={b:g},tau={t:g})={r.ks:.4f}" for (a, b, t), r in sorted(sim1_results.items())
    )
    detail = f"KS < {reference.SIM1_KS_BOUND} at all 8 cells; {table}"
    if failures:
        detail = (
            f"{len(failures)} of 8 cells at or above {reference.SIM1_KS_BOUND}: {table}. "
            "The alpha=2 winter cells are structurally non-normal at these "
            "thresholds (hitting-law skewness ~1.3 at tau=1000, ~0.95 at "
            "tau=2000 for sigma/alpha=10); no affine standardization removes skew."
        )
    line = report("3a", not failures, detail)
    assert not failures, line


@pytest.mark.known_gap
def test_criterion_3_agreement_improves_with_tau(sim1_results):
    # structurally 2/4 under the sharper (linearized) standardization: the
    # winter cells improve with tau, while the spring cells sit at the Monte
    # Carlo noise floor (~0.02) where the small residual mean bias grows
    # slightly with tau; threshold growth cannot push this to 3/4
    outcome = checks.sim1_improvement_check(sim1_results)
    line = report("3b", outcome.ok, outcome.detail)
    assert outcome.ok, line


@pytest.mark.known_gap
def test_criterion_4_winter_mean(sim1_results):
    result = sim1_results[(4.0, 0.0, 2000.0)]
    c = checks.winter_agreement_checks(result, tau=2000.0, alpha=4.0, sigma=20.0)[0]
    detail = c.detail + (
        ""
        if c.ok
        else (
            " [the strict first passage overshoots tau by ~0.64*sigma "
            "degree-days on average (Wald: E[nu] = (tau + E[overshoot])/alpha), "
            "placing E[nu] near 503.3; a 0.55-day band around 500.0 cannot "
            "contain the sample mean at any seed]"
        )
    )
    line = report("4a", c.ok, detail)
    assert c.ok, line


def test_criterion_4_winter_variance(sim1_results):
    result = sim1_results[(4.0, 0.0, 2000.0)]
    c = checks.winter_agreement_checks(result, tau=2000.0, alpha=4.0, sigma=20.0)[1]
    line = report("4b", c.ok, c.detail)
    assert c.ok, line


def _grid_search_min(f, lo: float, hi: float, rounds: int = 6, points: int = 2001) -> float:
    xs = np.linspace(lo, hi, points)
    for _ in range(rounds):
        i = int(np.argmin(f(xs)))
        lo, hi = xs[max(0, i - 1)], xs[min(len(xs) - 1, i + 1)]
        xs = np.linspace(lo, hi, points)
    return float(xs[np.argmin(f(xs))])


def test_criterion_5_walnut_fit(walnut_fit):
    fit = walnut_fit
    obs = fitting.load_walnut_observations()
    alpha = np.array([o.alpha for o in obs])
    n = np.array([o.n for o in obs], dtype=float)
    mean = np.array([o.mean_days for o in obs])
    var = np.array([o.sd_days for o in obs]) ** 2

    # independent oracle: brute-force minimization of the same two weighted
    # stage objectives over a refining grid
    w = n * alpha**3
    tau_oracle = _grid_search_min(
        lambda ts: np.sum(w * (mean[None, :] - ts[:, None] / alpha[None, :]) ** 2, axis=1),
        1.0, 3000.0,
    )
    u = (n - 1) * alpha**6
    v = tau_oracle / alpha**3
    sig2_oracle = _grid_search_min(
        lambda ss: np.sum(u * (var[None, :] - ss[:, None] * v[None, :]) ** 2, axis=1),
        1.0, 3000.0,
    )
    tau_rel = abs(fit.tau_hat - tau_oracle) / tau_oracle
    sig_rel = abs(fit.sigma_hat**2 - sig2_oracle) / sig2_oracle
    means_dec = all(x > y for x, y in zip(fit.fitted_means, fit.fitted_means[1:]))
    sds_dec = all(x > y for x, y in zip(fit.fitted_sds, fit.fitted_sds[1:]))
    r2_ok = fit.r_squared_weighted >= 0.95
    ok = means_dec and sds_dec and tau_rel < 1e-4 and sig_rel < 1e-4 and r2_ok
    detail = (
        f"tau_hat {fit.tau_hat:.4g} vs oracle {tau_oracle:.4g} (rel {tau_rel:.2e}); "
        f"sigma_hat^2 {fit.sigma_hat**2:.4g} vs oracle {sig2_oracle:.4g} (rel {sig_rel:.2e}); "
        f"means decreasing={means_dec}, sds decreasing={sds_dec}, "
        f"weighted R^2 {fit.r_squared_weighted:.4f} >= 0.95"
    )
    line = report("5", ok, detail)
    assert ok, line


def _two_point_exact(tau: float, alpha: float, sigma: float, nmax: int) -> dict[int, float]:
    frontier = {0.0: 1.0}
    probs: dict[int, float] = {}
    for n in range(1, nmax + 1):
        nxt: dict[float, float] = {}
        pn = 0.0
        for s, p in frontier.items():
            for inc in (alpha + sigma, alpha - sigma):
                s2 = s + inc
                if s2 > tau:
                    pn += 0.5 * p
                else:
                    nxt[s2] = nxt.get(s2, 0.0) + 0.5 * p
        probs[n] = pn
        frontier = nxt
    return probs


def test_criterion_6_two_point_exactness():
    r = 100_000
    nmax = 12
    exact = _two_point_exact(tau=3.0, alpha=1.0, sigma=1.0, nmax=nmax)
    spec = simulate.TemperatureProcessSpec.linear_trend(1.0, 0.0, 1.0, noise_law="two_point")
    times = simulate.simulate_hitting_times(spec, 3.0, r, seed=ACCEPTANCE_SEED)

    atoms = {n: p for n, p in exact.items() if p > 0}
    atoms[nmax + 1] = 1.0 - sum(exact.values())  # tail lump: nu > nmax
    emp = {n: float(np.mean(times == n)) for n in range(1, nmax + 1)}
    emp[nmax + 1] = float(np.mean(times > nmax))

    per_atom_ok = True
    worst = 0.0
    for n, p in atoms.items():
        se = np.sqrt(p * (1 - p) / r)
        worst = max(worst, abs(emp[n] - p) / se)
        per_atom_ok &= abs(emp[n] - p) <= 3 * se
    tv = 0.5 * sum(abs(emp[n] - p) for n, p in atoms.items())
    se_tv = 0.5 * np.sqrt(sum(p * (1 - p) for p in atoms.values()) / r)
    tv_ok = tv < 3 * se_tv
    ok = per_atom_ok and tv_ok
    line = report(
        "6",
        ok,
        f"every atom within 3 MC standard errors (worst {worst:.2f} SE); "
        f"TV {tv:.5f} < 3*SE_TV {3 * se_tv:.5f} at R={r}",
    )
    assert ok, line


def test_criterion_7_sensitivity_finite_differences():
    h = 1e-3
    alphas = (2.0, 3.0, 4.0, 6.0, 8.0)
    betas = (0.1, 0.2, 0.4, 0.8, 1.6)
    tau, sigma = 2000.0, 20.0
    worst = 0.0
    for a, b in product(alphas, betas):
        winter = model.RegimeParams(alpha=a, beta=0.0, sigma=sigma, tau=tau)
        fd_a = (
            model.approx_winter(model.RegimeParams(a + h, 0.0, sigma, tau)).mean
            - model.approx_winter(model.RegimeParams(a - h, 0.0, sigma, tau)).mean
        ) / (2 * h)
        rel_a = abs(fd_a - model.sensitivity(winter, "alpha")) / abs(fd_a)

        def law(beta: float) -> float:
            p = model.RegimeParams(a, beta, sigma, tau)
            return model.approx_spring(p).mean + p.gamma

        fd_b = (law(b + h) - law(b - h)) / (2 * h)
        spring = model.RegimeParams(alpha=a, beta=b, sigma=sigma, tau=tau)
        rel_b = abs(fd_b - model.sensitivity(spring, "beta")) / abs(fd_b)
        worst = max(worst, rel_a, rel_b)
    ok = worst < 1e-4
    line = report("7", ok, f"5x5 grid, worst relative FD mismatch {worst:.2e} < 1e-4")
    assert ok, line


def test_criterion_8_binning_pipeline_on_synthetic_grid(sim2_grid):
    grid, _ = sim2_grid
    triples = []
    for (a, b, tau), res in sorted(grid.cells.items()):
        if tau != 1000.0:
            continue
        triples.extend((a, b, float(t)) for t in res.hitting_times)
    binned = fitting.bin_location_scale(
        triples, alpha_edges=(3.0, 6.0, 9.0, 11.0), beta_edges=(0.1, 0.3, 0.6, 0.9)
    )
    assert binned.n_total() == 9 * grid.replicates
    outcomes = checks.synthetic_binning_checks(binned)
    failures = [c for c in outcomes if not c.ok]
    detail = (
        "9/9 binned cell means on the tau=1000 reference grid within "
        f"{reference.SIM2_MEAN_TOL_DAYS} days"
        if not failures
        else f"failing: {[c.detail for c in failures]}"
    )
    line = report("8", not failures, detail)
    assert not failures, line


def test_criterion_9_byte_identical_reruns(tmp_path):
    runner = CliRunner()
    outputs = []
    for sub in ("runA", "runB"):
        result = runner.invoke(
            cli_main,
            ["reproduce", "sim2", "--seed", str(ACCEPTANCE_SEED), "--threads", "2",
             "--out", str(tmp_path / sub)],
        )
        assert result.exit_code == 0, result.output
        run_dir = tmp_path / sub / f"sim2-seed{ACCEPTANCE_SEED}"
        outputs.append({p.name: p.read_bytes() for p in sorted(run_dir.iterdir())})
    ok = outputs[0] == outputs[1] and set(outputs[0]) == {"summary.csv", "tables.txt"}
    line = report("9a", ok, "rerun with identical seed and flags is byte-identical")
    assert ok, line


def test_criterion_9_thread_count_invariance(sim2_grid):
    grid_serial, _ = sim2_grid
    grid_threaded = simulate.run_simulation_2(seed=ACCEPTANCE_SEED, threads=8)
    same = all(
        np.array_equal(
            grid_serial.cells[key].hitting_times, grid_threaded.cells[key].hitting_times
        )
        for key in grid_serial.cells
    )
    line = report("9b", same, "hitting-time multisets identical for 1 vs 8 worker threads")
    assert same, line
