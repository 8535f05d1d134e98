"""Encoded Transfer Service.

Spreads the input over a prefix region A = {1..m} and reads it out from
the mirrored suffix B = {N−m+1..N}. For a PST chain e^{-iH₀t₀} acts as the
flip S up to a phase, so every encoding arrives perfectly at t₀; what the
encoding changes is how fast fidelity falls off around t₀, governed to
leading order by ⟨ψ|H₀²|ψ⟩.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
import structlog
from scipy.linalg import eigh, null_space, svd

from pstlab.core.exceptions import InvalidInput, RegionError, SpectrumError
from pstlab.models.schemas import ChainSpec, ReceiverWindow
from pstlab.services.chain_core import Eigensystem, eigensystem, pst_check
from pstlab.services.dynamics import (
    EvolutionTrace,
    plateau_width,
    scan_step,
    window_average_matrix,
)

logger = structlog.get_logger()

NORM_TOL = 1e-12


@dataclass(frozen=True)
class EncodingPair:
    """Encoder on the prefix region and its decoder on the mirrored suffix."""

    encoder: np.ndarray
    decoder: np.ndarray
    objective: float
    region_size: int
    method: str = "restricted"

    def __post_init__(self) -> None:
        n, m = self.encoder.size, self.region_size
        for name, vec, outside in (
            ("encoder", self.encoder, slice(m, n)),
            ("decoder", self.decoder, slice(0, n - m)),
        ):
            if abs(np.linalg.norm(vec) - 1.0) > NORM_TOL:
                raise ValueError(f"{name} is not unit norm")
            if np.any(vec[outside] != 0):
                raise ValueError(f"{name} has support outside its region")


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate so the largest component is real and positive, then drop the imaginary part."""
    pivot = vec[int(np.argmax(np.abs(vec)))]
    rotated = vec * (abs(pivot) / pivot)
    return np.real(rotated) if np.iscomplexobj(rotated) else rotated


def _embed(chain: ChainSpec, local: np.ndarray) -> np.ndarray:
    full = np.zeros(chain.n)
    full[: local.size] = local
    full /= np.linalg.norm(full)
    return full


def _pair(chain: ChainSpec, local: np.ndarray, objective: float, method: str) -> EncodingPair:
    encoder = _embed(chain, local)
    return EncodingPair(
        encoder=encoder,
        decoder=encoder[::-1].copy(),
        objective=float(objective),
        region_size=local.size,
        method=method,
    )


def _check_region(chain: ChainSpec, m: int, *, mirrored: bool) -> None:
    if m < 1 or m % 2 == 0:
        raise RegionError(f"region size must be a positive odd integer, got {m}")
    if mirrored and 2 * m >= chain.n:
        raise RegionError(f"regions overlap: m={m} needs m < n/2 for n={chain.n}")
    if m >= chain.n:
        raise RegionError(f"region size {m} must be smaller than n={chain.n}")


def _require_pst(chain: ChainSpec) -> float:
    verdict = pst_check(chain)
    if not verdict.is_pst:
        raise SpectrumError("encoded transfer needs a perfect-state-transfer chain")
    return verdict.t0


def region_sites(chain: ChainSpec, m: int) -> tuple[list[int], list[int]]:
    """1-based sites of A = {1..m} and B = {N−m+1..N}."""
    return list(range(1, m + 1)), list(range(chain.n - m + 1, chain.n + 1))


# ─── Operators ─── #


def windowed_operator(
    chain: ChainSpec,
    window: ReceiverWindow,
    t0: float,
    region_a: list[int],
    region_b: list[int],
) -> np.ndarray:
    """M = ∫p(t−t₀)·Π_B e^{-iH₀t} Π_A dt as a |B|×|A| complex matrix."""
    if len(region_a) != len(region_b) or not region_a:
        raise RegionError("regions must be non-empty and of equal size")
    for site in (*region_a, *region_b):
        if not 1 <= site <= chain.n:
            raise RegionError(f"site {site} outside 1..{chain.n}")
    system = eigensystem(chain)
    rows = system.vectors[np.asarray(region_b) - 1]
    cols = system.vectors[np.asarray(region_a) - 1]

    def propagator_block(t: float) -> np.ndarray:
        return (rows * np.exp(-1j * system.values * t)) @ cols.T

    return np.atleast_2d(window_average_matrix(propagator_block, window, t0))


def timing_operator(chain: ChainSpec, m: int, t0: float) -> np.ndarray:
    """Π_B H₀² e^{-iH₀t₀} Π_A, the cross-region form of the timing objective."""
    system = eigensystem(chain)
    h2 = chain.hamiltonian() @ chain.hamiltonian()
    propagator = (system.vectors * np.exp(-1j * system.values * t0)) @ system.vectors.T
    full = h2 @ propagator
    return full[chain.n - m :, :m]


# ─── Encodings ─── #


def optimal_timing_encoding(
    chain: ChainSpec, m: int, method: Literal["restricted", "literal"] = "restricted"
) -> EncodingPair:
    """Encoder minimizing ⟨ψ|H₀²|ψ⟩ over unit vectors on sites 1..m.

    "restricted" takes the lowest eigenvector of (H₀²)_AA; "literal" takes the
    smallest singular triple of Π_B H₀² e^{-iH₀t₀} Π_A. Both agree on PST chains.
    """
    _check_region(chain, m, mirrored=True)
    t0 = _require_pst(chain)
    h = chain.hamiltonian()
    h2 = h @ h

    if method == "restricted":
        values, vectors = eigh(h2[:m, :m])
        return _pair(chain, _fix_phase(vectors[:, 0]), values[0], method)
    if method == "literal":
        _, sigma, vh = svd(timing_operator(chain, m, t0))
        return _pair(chain, _fix_phase(vh[-1].conj()), sigma[-1], method)
    raise InvalidInput(f"unknown encoding method {method!r}")


def eigenvector_orthogonal_encoding(chain: ChainSpec, m: int) -> EncodingPair:
    """Unit vector on sites 1..m orthogonal to the (m−1)/2 largest-|λ| eigenvector pairs."""
    _check_region(chain, m, mirrored=False)
    _require_pst(chain)
    if m == 1:
        local = np.ones(1)
    else:
        system = eigensystem(chain)
        excluded = np.argsort(-np.abs(system.values), kind="stable")[: m - 1]
        constraints = system.vectors[:m, excluded].T
        basis = null_space(constraints)
        if basis.shape[1] != 1:
            raise RegionError(
                f"degenerate region: constraint null space has dimension {basis.shape[1]}"
            )
        local = basis[:, 0]
        if local[0] < 0:
            local = -local
    encoder = _embed(chain, local)
    objective = float(encoder @ chain.hamiltonian() @ chain.hamiltonian() @ encoder)
    return EncodingPair(
        encoder=encoder,
        decoder=encoder[::-1].copy(),
        objective=objective,
        region_size=m,
        method="eigenvector-orthogonal",
    )


# ─── Encoded dynamics ─── #


def _encoded_amplitude_fn(
    chain: ChainSpec, pair: EncodingPair
) -> tuple[Eigensystem, Callable[[np.ndarray], np.ndarray]]:
    system = eigensystem(chain)
    coeff = (system.vectors.T @ pair.decoder).conj() * (system.vectors.T @ pair.encoder)

    def amplitude(ts: np.ndarray) -> np.ndarray:
        return np.exp(-1j * np.multiply.outer(np.asarray(ts, dtype=float), system.values)) @ coeff

    return system, amplitude


def encoded_trace(chain: ChainSpec, pair: EncodingPair, t_max: float, steps: int) -> EvolutionTrace:
    """⟨ψ_dec|e^{-iH₀t}|ψ_enc⟩ on a uniform grid over [0, t_max]."""
    if steps < 2 or t_max <= 0:
        raise InvalidInput("an encoded trace needs t_max > 0 and at least 2 steps")
    _, amplitude = _encoded_amplitude_fn(chain, pair)
    times = np.linspace(0.0, t_max, steps)
    return EvolutionTrace.from_amplitudes(times, amplitude(times))


def encoded_arrival_width(chain: ChainSpec, pair: EncodingPair, t0: float, epsilon: float) -> float:
    """Arrival-peak width of |⟨ψ_dec|e^{-iH₀t}|ψ_enc⟩|² at level 1 − ε."""
    system, amplitude = _encoded_amplitude_fn(chain, pair)
    return plateau_width(lambda ts: np.abs(amplitude(ts)) ** 2, t0, epsilon, scan_step(system))
