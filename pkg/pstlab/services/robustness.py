"""Robustness Service.

Seeded Monte-Carlo coupling disorder: every coupling in a contiguous
region gets an independent uniform(±δ) offset and the chain is evaluated
at the unperturbed t₀. Sample i draws from its own Philox stream keyed by
(seed, i), so serial and threaded runs produce identical reports.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog

from pstlab.core.config import settings
from pstlab.core.exceptions import InvalidInput, RegionError
from pstlab.models.schemas import ChainSpec, PerturbationReport
from pstlab.services.chain_core import eigensystem

logger = structlog.get_logger()

QUANTILE_LEVELS = (0.25, 0.5, 0.75)


def central_region(n_couplings: int, count: int) -> tuple[int, int]:
    """0-based half-open range of the central ``count`` couplings."""
    if not 1 <= count <= n_couplings:
        raise RegionError(f"cannot take {count} central couplings out of {n_couplings}")
    start = (n_couplings - count) // 2
    return start, start + count


def _check_region(chain: ChainSpec, region: tuple[int, int]) -> None:
    lo, hi = region
    if not 0 <= lo < hi <= chain.n - 1:
        raise RegionError(f"coupling region [{lo}, {hi}) outside 0..{chain.n - 1}")


def sample_generator(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for sample ``index``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def perturbed_couplings(
    chain: ChainSpec, delta: float, region: tuple[int, int], seed: int, index: int
) -> tuple[np.ndarray, int]:
    """Couplings of sample ``index`` and the number of redraws needed to keep them positive."""
    lo, hi = region
    base = np.asarray(chain.couplings, dtype=float)
    rng = sample_generator(seed, index)
    for attempt in range(settings.MAX_RESAMPLES + 1):
        couplings = base.copy()
        couplings[lo:hi] += rng.uniform(-delta, delta, hi - lo)
        if np.all(couplings > 0):
            return couplings, attempt
    raise InvalidInput(
        f"sample {index}: couplings stayed non-positive after {settings.MAX_RESAMPLES} redraws "
        f"(delta={delta} is too large for this chain)"
    )


def _infidelity(chain: ChainSpec, couplings: np.ndarray, t0: float) -> float:
    sample = ChainSpec(
        n=chain.n, couplings=tuple(couplings), diagonal=chain.diagonal, label=chain.label
    )
    modulus = abs(complex(eigensystem(sample).amplitude(t0)))
    return min(max(1.0 - modulus, 0.0), 1.0)


def perturb_ensemble(
    chain: ChainSpec,
    t0: float,
    delta: float,
    region: tuple[int, int] | None = None,
    samples: int | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> PerturbationReport:
    """Quantiles and mean of 1 − √F_e(t₀) over ``samples`` disordered copies."""
    samples = settings.DEFAULT_SAMPLES if samples is None else samples
    region = (0, chain.n - 1) if region is None else tuple(region)
    if delta < 0:
        raise InvalidInput(f"delta must be nonnegative, got {delta}")
    if samples < 1:
        raise InvalidInput(f"samples must be at least 1, got {samples}")
    if seed < 0:
        raise InvalidInput(f"seed must be nonnegative, got {seed}")
    _check_region(chain, region)

    def run(index: int) -> tuple[float, int]:
        couplings, redraws = perturbed_couplings(chain, delta, region, seed, index)
        if redraws:
            logger.warning("robustness.sample_resampled", index=index, redraws=redraws, delta=delta)
        return _infidelity(chain, couplings, t0), redraws

    with ThreadPoolExecutor(max_workers=threads or settings.THREADS) as pool:
        outcomes = list(pool.map(run, range(samples)))

    values = np.sort(np.array([v for v, _ in outcomes]))
    q25, q50, q75 = np.quantile(values, QUANTILE_LEVELS)
    stderr = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return PerturbationReport(
        chain_label=chain.label,
        delta=delta,
        samples=samples,
        seed=seed,
        q25=float(q25),
        q50=float(q50),
        q75=float(q75),
        mean=float(values.mean()),
        stderr=stderr,
        resampled=sum(r for _, r in outcomes),
        region=region,
    )


def delta_sweep(
    chain_a: ChainSpec,
    chain_b: ChainSpec,
    t0_a: float,
    t0_b: float,
    delta_list: list[float],
    central_count: int | None = None,
    samples: int | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> list[tuple[PerturbationReport, PerturbationReport]]:
    """Paired ensembles for two chains over a δ grid (same seed for both)."""

    def region_for(chain: ChainSpec) -> tuple[int, int]:
        if central_count is None:
            return 0, chain.n - 1
        return central_region(chain.n - 1, central_count)

    reports = []
    for delta in delta_list:
        report_a = perturb_ensemble(
            chain_a, t0_a, delta, region_for(chain_a), samples, seed, threads
        )
        report_b = perturb_ensemble(
            chain_b, t0_b, delta, region_for(chain_b), samples, seed, threads
        )
        logger.info(
            "robustness.delta_done",
            delta=delta,
            upper_quartile_a=report_a.q75,
            upper_quartile_b=report_b.q75,
        )
        reports.append((report_a, report_b))
    return reports
