"""Monte Carlo replication of a survey: draw, randomize, estimate, summarize.

Reproducibility contract: replicate ``i`` of a run seeded with ``seed`` always
uses the generator ``default_rng(SeedSequence(entropy=seed, spawn_key=(i,)))``
and consumes, in order, one block of n uniforms for the true values and one
block of n uniforms for the device. Results are collected into a slot per
replicate and reduced in replicate order, so the summary is byte-identical no
matter how many worker threads ran (see ``RRKIT_THREADS``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import estimation
from .device import draw_responses
from .model import (
    Device,
    PopulationModel,
    ResponseSample,
    SupportSpec,
    ValidationError,
    _require_same_m,
)

THREADS_ENV_VAR = "RRKIT_THREADS"


def thread_count(replicates: int) -> int:
    """Worker threads to use: RRKIT_THREADS if set, else one per CPU, capped at the replicate count."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        workers = os.cpu_count() or 1
    else:
        try:
            workers = int(raw)
        except ValueError:
            raise ValidationError(
                "BAD_ARGS", f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}"
            ) from None
        if workers < 1:
            raise ValidationError(
                "BAD_ARGS", f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}"
            )
    return max(1, min(workers, replicates))


@dataclass(frozen=True)
class SimulationConfig:
    """One fully specified Monte Carlo run."""

    support: SupportSpec
    population: PopulationModel
    device: Device
    n: int
    replicates: int
    seed: int

    def __post_init__(self) -> None:
        _require_same_m(self.support.m, self.population.m)
        _require_same_m(self.support.m, self.device.m)
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValidationError("BAD_N", f"sample size must be a positive integer, got {self.n!r}")
        if (
            not isinstance(self.replicates, int)
            or isinstance(self.replicates, bool)
            or self.replicates < 1
        ):
            raise ValidationError(
                "BAD_REPLICATES", f"replicates must be a positive integer, got {self.replicates!r}"
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ValidationError("BAD_SEED", f"seed must be a non-negative integer, got {self.seed!r}")


def replicate_stream(seed: int, replicate: int) -> np.random.Generator:
    """The dedicated generator for one replicate of a seeded run."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(replicate,)))


def sample_true_indices(
    population: PopulationModel, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw n true-value indices from the population by inverse CDF."""
    cum = np.cumsum(population.pi_array)
    u = rng.random(n)
    return np.minimum(np.searchsorted(cum, u, side="right"), population.m - 1)


def simulate_survey(config: SimulationConfig, replicate: int) -> ResponseSample:
    """Response counts for one replicate: truth draws first, then device draws."""
    rng = replicate_stream(config.seed, replicate)
    true_indices = sample_true_indices(config.population, config.n, rng)
    responses = draw_responses(config.device, true_indices, rng)
    counts = np.bincount(responses, minlength=config.support.m)
    return ResponseSample(counts=tuple(int(c) for c in counts))


@dataclass(frozen=True)
class ReplicateRecord:
    replicate: int
    mu_hat: float
    counts: tuple[int, ...]


@dataclass(frozen=True)
class SimulationSummary:
    """Run-level results; ``records`` is populated only when per-replicate detail was requested."""

    n: int
    replicates: int
    seed: int
    mu_x: float
    mean_mu_hat: float
    var_mu_hat_empirical: float | None
    var_mu_theoretical: float
    variance_ratio: float | None
    mc_se_mean: float | None
    records: tuple[ReplicateRecord, ...] = field(default=(), repr=False)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "replicates": self.replicates,
            "seed": self.seed,
            "mu_x": self.mu_x,
            "mean_mu_hat": self.mean_mu_hat,
            "var_mu_hat_empirical": self.var_mu_hat_empirical,
            "var_mu_theoretical": self.var_mu_theoretical,
            "variance_ratio": self.variance_ratio,
            "mc_se_mean": self.mc_se_mean,
        }


def run_replicates(config: SimulationConfig, keep_replicates: bool = False) -> SimulationSummary:
    """Run every replicate, estimate the mean from each, and reduce in index order."""
    R = config.replicates

    def one(i: int) -> tuple[float, tuple[int, ...]]:
        sample = simulate_survey(config, i)
        mu = estimation.estimate_mean(sample, config.device, config.support)
        return mu, sample.counts

    workers = thread_count(R)
    results: list[tuple[float, tuple[int, ...]] | None] = [None] * R
    if workers == 1:
        for i in range(R):
            results[i] = one(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, res in enumerate(pool.map(one, range(R))):
                results[i] = res

    mu_hats = np.asarray([res[0] for res in results if res is not None], dtype=float)
    mean_mu = float(mu_hats.mean())
    var_theoretical = estimation.variance_mean_theoretical(
        config.device, config.support, config.population, config.n
    )
    if R >= 2:
        var_mu = float(mu_hats.var(ddof=1))
        variance_ratio = var_mu / var_theoretical
        mc_se = float(np.sqrt(var_mu / R))
    else:
        var_mu = None
        variance_ratio = None
        mc_se = None

    records: tuple[ReplicateRecord, ...] = ()
    if keep_replicates:
        records = tuple(
            ReplicateRecord(replicate=i, mu_hat=res[0], counts=res[1])
            for i, res in enumerate(results)
            if res is not None
        )
    return SimulationSummary(
        n=config.n,
        replicates=R,
        seed=config.seed,
        mu_x=config.population.mean(config.support),
        mean_mu_hat=mean_mu,
        var_mu_hat_empirical=var_mu,
        var_mu_theoretical=var_theoretical,
        variance_ratio=variance_ratio,
        mc_se_mean=mc_se,
        records=records,
    )
