"""Exact stochastic simulation of daily temperature paths and hitting times.

The engine draws daily effective temperatures X_i = mu_i + eps_i and records
the first day n with Z_n = sum_{i<=n} X_i strictly exceeding the threshold
tau (ties at Z_n == tau continue). Replicates are reproducible and
order-independent: replicate i of cell c under master seed s always consumes
the substream SeedSequence((s, c, i)), so serial and thread-parallel runs
produce bit-identical hitting times.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import ndtr

from . import model
from .errors import HorizonExceeded, ParameterError

DEFAULT_MAX_HORIZON = 10_000
DEFAULT_SIGMA = 20.0
DEFAULT_REPLICATES = 10_000

# Grids of the two bundled verification runs.
SIM1_ALPHAS = (2.0, 4.0)
SIM1_BETAS = (0.0, 0.1)
SIM1_TAUS = (1000.0, 2000.0)
SIM2_ALPHAS = (4.0, 8.0, 10.0)
SIM2_BETAS = (0.2, 0.4, 0.8)
SIM2_TAUS = (1000.0, 2000.0)

_START_BLOCK = 256
_MAX_BLOCK = 4096


@dataclass(frozen=True)
class TemperatureProcessSpec:
    """Daily temperature process: trend shape, noise law, optional base clipping.

    trend "linear": mu_i = alpha + beta*i for all i >= 1.
    trend "piecewise": mu_i = alpha for i <= breakpoint_day, then
    alpha + beta*(i - breakpoint_day), extended linearly without end.
    noise_law "gaussian" draws Normal(0, sigma^2); "two_point" draws +-sigma
    with equal probability (mean 0, variance sigma^2), which admits exact
    enumeration of small instances. clip_at_base clips each day's value at 0
    before accumulation; verification runs leave it off.
    """

    alpha: float
    beta: float
    noise_sigma: float
    trend: str = "linear"
    breakpoint_day: int = 90
    noise_law: str = "gaussian"
    clip_at_base: bool = False

    def __post_init__(self) -> None:
        if self.trend not in ("linear", "piecewise"):
            raise ParameterError(f"trend must be 'linear' or 'piecewise', got {self.trend!r}")
        if self.noise_law not in ("gaussian", "two_point"):
            raise ParameterError(
                f"noise_law must be 'gaussian' or 'two_point', got {self.noise_law!r}"
            )
        if self.noise_sigma < 0:
            raise ParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.trend == "piecewise" and self.breakpoint_day < 1:
            raise ParameterError(f"breakpoint_day must be >= 1, got {self.breakpoint_day}")

    @classmethod
    def linear_trend(cls, alpha: float, beta: float, noise_sigma: float,
                     **kwargs) -> "TemperatureProcessSpec":
        return cls(alpha=alpha, beta=beta, noise_sigma=noise_sigma, trend="linear", **kwargs)

    @classmethod
    def piecewise_seasonal(cls, alpha: float, beta: float, noise_sigma: float,
                           breakpoint_day: int = 90, **kwargs) -> "TemperatureProcessSpec":
        return cls(alpha=alpha, beta=beta, noise_sigma=noise_sigma, trend="piecewise",
                   breakpoint_day=breakpoint_day, **kwargs)

    def mean_at(self, days: np.ndarray) -> np.ndarray:
        """Trend value mu_i for an array of day indices (1-based)."""
        days = np.asarray(days, dtype=float)
        if self.trend == "linear":
            return self.alpha + self.beta * days
        return np.where(
            days <= self.breakpoint_day,
            self.alpha,
            self.alpha + self.beta * (days - self.breakpoint_day),
        )


@dataclass
class SimulationResult:
    """Replicate hitting times with summary statistics and normality diagnostics.

    z_values standardizes the hitting times against the closed-form
    approximation for the matching regime ((nu - mean_theory) / sd_theory);
    it is None when sigma == 0, where the theoretical spread is zero and
    standardization is undefined. ks is the sup-norm distance between the
    empirical z distribution and the standard normal CDF.
    """

    hitting_times: np.ndarray
    replicate_count: int
    mean: float
    sd: float
    seed: int
    max_horizon: int
    z_values: np.ndarray | None = None
    ks: float | None = None
    theory: model.HittingTimeApprox | None = None

    def __post_init__(self) -> None:
        if len(self.hitting_times) != self.replicate_count:
            raise ParameterError("hitting_times length must equal replicate_count")


def substream(seed: int, cell: int, replicate: int) -> np.random.Generator:
    """Independent RNG stream for one replicate of one grid cell.

    The (seed, cell, replicate) tuple is the entire identity of the stream;
    chunking across threads cannot change the draws.
    """
    return np.random.default_rng(np.random.SeedSequence((seed, cell, replicate)))


def _draw_noise(spec: TemperatureProcessSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    if spec.noise_law == "gaussian":
        return spec.noise_sigma * rng.standard_normal(n)
    return spec.noise_sigma * (2.0 * rng.integers(0, 2, size=n) - 1.0)


def simulate_hitting_time(
    spec: TemperatureProcessSpec,
    tau: float,
    rng: np.random.Generator,
    max_horizon: int = DEFAULT_MAX_HORIZON,
) -> int:
    """First day n with cumulative temperature strictly above tau.

    Draws the path day by day (in blocks) from rng and returns the smallest n
    with Z_n > tau, so Z_{n-1} <= tau < Z_n. Raises HorizonExceeded if the
    path has not crossed by max_horizon (possible with clipping and low alpha).
    """
    if tau <= 0:
        raise ParameterError(f"tau must be > 0, got {tau}")
    carry = 0.0
    day0 = 0
    block = _START_BLOCK
    while day0 < max_horizon:
        n = min(block, max_horizon - day0)
        days = np.arange(day0 + 1, day0 + n + 1)
        values = spec.mean_at(days) + _draw_noise(spec, rng, n)
        if spec.clip_at_base:
            values = np.maximum(values, 0.0)
        z = carry + np.cumsum(values)
        crossed = z > tau
        if crossed.any():
            return day0 + int(np.argmax(crossed)) + 1
        carry = float(z[-1])
        day0 += n
        block = min(block * 2, _MAX_BLOCK)
    raise HorizonExceeded(
        f"no crossing of tau={tau} within {max_horizon} days "
        f"(alpha={spec.alpha}, beta={spec.beta}, sigma={spec.noise_sigma}, "
        f"clip_at_base={spec.clip_at_base})"
    )


def simulate_hitting_times(
    spec: TemperatureProcessSpec,
    tau: float,
    replicates: int,
    seed: int,
    cell: int = 0,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    threads: int = 1,
) -> np.ndarray:
    """Hitting times for `replicates` independent paths, in replicate order.

    Identical (seed, cell) always yields identical output regardless of
    `threads`; replicate i reads only its own substream.
    """
    if replicates < 1:
        raise ParameterError(f"replicates must be >= 1, got {replicates}")
    out = np.empty(replicates, dtype=np.int64)
    errors: list[Exception] = []

    def run_range(lo: int, hi: int) -> None:
        try:
            for i in range(lo, hi):
                out[i] = simulate_hitting_time(
                    spec, tau, substream(seed, cell, i), max_horizon
                )
        except HorizonExceeded as exc:  # surfaced after the pool drains
            errors.append(exc)

    if threads <= 1:
        run_range(0, replicates)
    else:
        chunk = max(1, math.ceil(replicates / (threads * 4)))
        bounds = [(lo, min(lo + chunk, replicates)) for lo in range(0, replicates, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: run_range(*b), bounds))
    if errors:
        raise errors[0]
    return out


def verify_stopping(
    spec: TemperatureProcessSpec,
    tau: float,
    seed: int,
    cell: int,
    hitting_times: np.ndarray,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    sample: Sequence[int] = (0, 1, -1),
) -> None:
    """Re-derive a few replicates' paths and assert Z_{nu-1} <= tau < Z_nu.

    max_horizon must match the generating run: the replay consumes each
    substream on the same block schedule.
    """
    r = len(hitting_times)
    for idx in sample:
        i = idx % r
        nu = int(hitting_times[i])
        rng = substream(seed, cell, i)
        # replay enough whole blocks to cover day nu
        days_needed, block, chunks = 0, _START_BLOCK, []
        while days_needed < nu:
            n = min(block, max_horizon - days_needed)
            days = np.arange(days_needed + 1, days_needed + n + 1)
            vals = spec.mean_at(days) + _draw_noise(spec, rng, n)
            if spec.clip_at_base:
                vals = np.maximum(vals, 0.0)
            chunks.append(vals)
            days_needed += n
            block = min(block * 2, _MAX_BLOCK)
        z = np.cumsum(np.concatenate(chunks))
        if not z[nu - 1] > tau:
            raise AssertionError(f"replicate {i}: Z_nu={z[nu-1]} not > tau={tau}")
        if nu > 1 and not z[nu - 2] <= tau:
            raise AssertionError(f"replicate {i}: Z_(nu-1)={z[nu-2]} not <= tau={tau}")


def ks_distance(samples: Iterable[float], cdf: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """Sup-norm distance between the empirical CDF of samples and a reference CDF.

    The reference defaults to the standard normal CDF. Requires at least one
    sample; the usual diagnostic use supplies two or more.
    """
    x = np.sort(np.asarray(list(samples), dtype=float))
    n = len(x)
    if n == 0:
        raise ParameterError("ks_distance requires a non-empty sample")
    ref = ndtr(x) if cdf is None else np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - ref
    lower = ref - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def run_simulation_1(
    alpha: float,
    beta: float,
    tau: float,
    sigma: float = DEFAULT_SIGMA,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    cell: int = 0,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    threads: int = 1,
) -> SimulationResult:
    """Linear-trend verification run for one (alpha, beta, tau) grid point.

    Hitting times are standardized against the matching regime approximation
    (winter closed form when beta == 0, linearized spring form when beta > 0)
    and the KS distance of the standardized values from Normal(0,1) is
    attached. With sigma == 0 the path is deterministic: all hitting times
    coincide and z/ks are None.
    """
    spec = TemperatureProcessSpec.linear_trend(alpha, beta, sigma)
    times = simulate_hitting_times(spec, tau, replicates, seed, cell, max_horizon, threads)
    verify_stopping(spec, tau, seed, cell, times, max_horizon)
    result = SimulationResult(
        hitting_times=times,
        replicate_count=replicates,
        mean=float(times.mean()),
        sd=float(times.std(ddof=1)) if replicates > 1 else 0.0,
        seed=seed,
        max_horizon=max_horizon,
    )
    if sigma > 0:
        params = model.RegimeParams(alpha=alpha, beta=beta, sigma=sigma, tau=tau)
        theory = model.theory_approx(params)
        z = (times - theory.mean) / theory.sd
        result.z_values = z
        result.ks = ks_distance(z)
        result.theory = theory
    return result


@dataclass
class Simulation2Grid:
    """Replicate means and sds over the seasonal (alpha, beta, tau) grid."""

    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    taus: tuple[float, ...]
    sigma: float
    replicates: int
    seed: int
    cells: dict[tuple[float, float, float], SimulationResult] = field(default_factory=dict)

    def mean(self, alpha: float, beta: float, tau: float) -> float:
        return self.cells[(alpha, beta, tau)].mean

    def sd(self, alpha: float, beta: float, tau: float) -> float:
        return self.cells[(alpha, beta, tau)].sd

    def format_tables(self) -> str:
        """Aligned text: one mean table and one sd table per threshold."""
        blocks = []
        for tau in self.taus:
            for kind in ("mean", "sd"):
                lines = [f"{kind}, tau={tau:g}"]
                header = "alpha\\beta" + "".join(f"{b:>9g}" for b in self.betas)
                lines.append(header)
                for a in self.alphas:
                    vals = [getattr(self.cells[(a, b, tau)], kind) for b in self.betas]
                    lines.append(f"{a:<10g}" + "".join(f"{v:9.2f}" for v in vals))
                blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n"


def run_simulation_2(
    seed: int,
    alphas: Sequence[float] = SIM2_ALPHAS,
    betas: Sequence[float] = SIM2_BETAS,
    taus: Sequence[float] = SIM2_TAUS,
    sigma: float = DEFAULT_SIGMA,
    replicates: int = DEFAULT_REPLICATES,
    breakpoint_day: int = 90,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    threads: int = 1,
) -> Simulation2Grid:
    """Seasonal verification run: piecewise trend, no clipping, full grid.

    The trend is flat at alpha through breakpoint_day and rises at beta
    thereafter (continuing past day 180 without modification). Daily values
    are not clipped at the base temperature: the reference tables this run
    reproduces are generated from unclipped sums. Each cell uses its own
    substream family, so the grid is reproducible cell by cell.
    """
    grid = Simulation2Grid(
        alphas=tuple(alphas), betas=tuple(betas), taus=tuple(taus),
        sigma=sigma, replicates=replicates, seed=seed,
    )
    cell_index = 0
    for a in grid.alphas:
        for b in grid.betas:
            for tau in grid.taus:
                spec = TemperatureProcessSpec.piecewise_seasonal(
                    a, b, sigma, breakpoint_day=breakpoint_day
                )
                times = simulate_hitting_times(
                    spec, tau, replicates, seed, cell_index, max_horizon, threads
                )
                verify_stopping(spec, tau, seed, cell_index, times, max_horizon)
                grid.cells[(a, b, tau)] = SimulationResult(
                    hitting_times=times,
                    replicate_count=replicates,
                    mean=float(times.mean()),
                    sd=float(times.std(ddof=1)) if replicates > 1 else 0.0,
                    seed=seed,
                    max_horizon=max_horizon,
                )
                cell_index += 1
    return grid


def summary_csv_rows(
    results: dict[tuple[float, float, float], SimulationResult], sigma: float
) -> list[str]:
    """CSV lines (with header) for a mapping of (alpha, beta, tau) -> result."""
    lines = ["alpha,beta,tau,sigma,R,seed,mean,sd,ks"]
    for (a, b, tau) in sorted(results):
        r = results[(a, b, tau)]
        ks = "" if r.ks is None else f"{r.ks:.6g}"
        lines.append(
            f"{a:.6g},{b:.6g},{tau:.6g},{sigma:.6g},{r.replicate_count},{r.seed},"
            f"{r.mean:.6g},{r.sd:.6g},{ks}"
        )
    return lines


def histogram_csv_rows(
    values: np.ndarray, lo: float = -5.0, hi: float = 5.0, bins: int = 40
) -> list[str]:
    """(bin_left,bin_right,count) CSV lines for plot-ready histograms."""
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins, range=(lo, hi))
    lines = ["bin_left,bin_right,count"]
    for i, c in enumerate(counts):
        lines.append(f"{edges[i]:.6g},{edges[i + 1]:.6g},{int(c)}")
    return lines
