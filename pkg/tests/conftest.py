"""Shared fixtures: reference chains and randomized PST spectra."""

from __future__ import annotations

import numpy as np
import pytest
import structlog

from pstlab.models.schemas import ChainSpec, Spectrum, TRexParams
from pstlab.services.synthesis import krawtchouk, trex_chain

ODD_GAPS = np.array([1, 3, 5, 7, 9])


def random_pst_spectrum(rng: np.random.Generator, n_min: int = 4, n_max: int = 12) -> Spectrum:
    """Symmetric spectrum with odd gaps and base gap exactly 1 (one unit gap always present)."""
    n = int(rng.integers(n_min, n_max + 1))
    positive = [0.5] if n % 2 == 0 else [1.0]
    for _ in range(n // 2 - 1):
        positive.append(positive[-1] + float(rng.choice(ODD_GAPS)))
    middle = [] if n % 2 == 0 else [0.0]
    values = sorted([-x for x in positive] + middle + positive)
    return Spectrum(values=tuple(values), base_gap=1.0)


@pytest.fixture(scope="session")
def pst_spectra() -> list[Spectrum]:
    rng = np.random.default_rng(20240611)
    return [random_pst_spectrum(rng) for _ in range(200)]


@pytest.fixture(scope="session")
def kraw8() -> ChainSpec:
    return krawtchouk(8, 1.0)


@pytest.fixture(scope="session")
def trex149() -> ChainSpec:
    """Exact T-Rex chain n=8, r=4, γ=149 (t₀ = π)."""
    return trex_chain(TRexParams(n=8, r=4, gamma=149))


@pytest.fixture(autouse=True)
def _reset_logging():
    """CLI runs bind structlog to the captured stderr; restore defaults afterwards."""
    yield
    structlog.reset_defaults()
