"""Fractional Revival Service.

Two ways to turn a PST chain into one that splits the excitation between
the end sites at t₀:

- central-coupling conversion for odd N: the two equal central couplings J
  become √2·J·cosθ and √2·J·sinθ, giving P₁ = cos²2θ, P_N = sin²2θ;
- spectral shift: eigenvalues of the antisymmetric sector move by
  (π − φ)/t₀ and the chain is resynthesized, giving P₁ = cos²(φ/2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import structlog

from pstlab.core.config import settings
from pstlab.core.exceptions import (
    DegenerateAfterShift,
    InvalidInput,
    NumericalFailure,
    ParityError,
    SpectrumError,
)
from pstlab.models.schemas import ChainSpec, Spectrum
from pstlab.services.chain_core import eigensystem, is_mirror_symmetric
from pstlab.services.synthesis import chain_from_spectral_data, end_weights_from_spectrum

logger = structlog.get_logger()


@dataclass(frozen=True)
class RevivalTarget:
    """Amplitudes left on site 1 and delivered to site N at t₀ (up to a global phase)."""

    stay_amplitude: complex
    go_amplitude: complex
    theta: float | None = None

    def __post_init__(self) -> None:
        norm = abs(self.stay_amplitude) ** 2 + abs(self.go_amplitude) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"revival target is not normalized (|stay|²+|go|² = {norm})")

    @property
    def probabilities(self) -> tuple[float, float]:
        return abs(self.stay_amplitude) ** 2, abs(self.go_amplitude) ** 2


@dataclass
class RevivalTrace:
    times: np.ndarray
    p_first: np.ndarray
    p_last: np.ndarray

    def rows(self) -> list[tuple[float, float, float]]:
        return [
            (float(t), float(a), float(b))
            for t, a, b in zip(self.times, self.p_first, self.p_last, strict=True)
        ]


def revival_target(theta: float) -> RevivalTarget:
    """Target of the central-coupling conversion: amplitudes cos2θ and sin2θ."""
    return RevivalTarget(
        stay_amplitude=complex(math.cos(2 * theta)),
        go_amplitude=complex(math.sin(2 * theta)),
        theta=theta,
    )


def phase_target(phase: float) -> RevivalTarget:
    """Target of the spectral shift: ½(1 + e^{iφ}) on site 1, ½(1 − e^{iφ}) on site N."""
    rotor = cmath.exp(1j * phase)
    return RevivalTarget(stay_amplitude=(1 + rotor) / 2, go_amplitude=(1 - rotor) / 2)


# ─── Central-coupling conversion ─── #


def _clamp_theta(theta: float) -> float:
    if not 0.0 <= theta <= math.pi / 2:
        raise InvalidInput(f"theta must lie in [0, π/2], got {theta}")
    lo, hi = settings.THETA_CLAMP, math.pi / 2 - settings.THETA_CLAMP
    clamped = min(max(theta, lo), hi)
    if clamped != theta:
        logger.warning("revival.theta_clamped", requested=theta, used=clamped)
    return clamped


def central_coupling_revival(chain: ChainSpec, theta: float) -> ChainSpec:
    """Replace the equal central pair J, J of an odd chain by √2J·cosθ, √2J·sinθ."""
    if chain.n % 2 == 0:
        raise ParityError(f"central-coupling revival needs odd n, got n={chain.n}")
    if chain.n < 3:
        raise InvalidInput("central-coupling revival needs n ≥ 3")
    left, right = (chain.n - 1) // 2 - 1, (chain.n + 1) // 2 - 1
    j_left, j_right = chain.couplings[left], chain.couplings[right]
    tol = settings.MIRROR_RTOL * chain.max_coupling
    if not is_mirror_symmetric(chain) or abs(j_left - j_right) > tol:
        raise SpectrumError("central couplings are unequal; the chain is not mirror-symmetric")

    theta = _clamp_theta(theta)
    couplings = list(chain.couplings)
    couplings[left] = math.sqrt(2.0) * j_left * math.cos(theta)
    couplings[right] = math.sqrt(2.0) * j_left * math.sin(theta)
    converted = chain.with_couplings(couplings, generator="revival-central", theta=theta)
    suffix = f"revival-theta{theta:.6g}"
    return converted.model_copy(
        update={"label": f"{chain.label}-{suffix}" if chain.label else suffix}
    )


# ─── Spectral shift ─── #


def _antisymmetric_mask(n: int) -> np.ndarray:
    """Ascending order; the top eigenvalue is symmetric and parities alternate below it."""
    from_top = np.arange(n)[::-1]
    return from_top % 2 == 1


def _shifted(values: np.ndarray, mask: np.ndarray, shift: float) -> np.ndarray | None:
    moved = values.copy()
    moved[mask] += shift
    gaps = np.diff(moved)
    span = float(moved.max() - moved.min())
    if np.any(gaps <= settings.DEGENERACY_RTOL * span):
        return None
    return moved


def spectral_shift_revival(spectrum: Spectrum, phase: float) -> ChainSpec:
    """Resynthesize a chain whose two parity sectors revive with relative phase e^{iφ} at t₀."""
    if spectrum.base_gap is None:
        raise SpectrumError("spectral-shift revival needs an odd-gap (PST) spectrum")
    t0 = spectrum.transfer_time
    values = spectrum.as_array()
    mask = _antisymmetric_mask(values.size)

    phi = math.fmod(phase, 2 * math.pi)
    if phi < 0:
        phi += 2 * math.pi
    base_shift = (math.pi - phi) / t0
    candidates = [base_shift]
    if math.isclose(phi, 0.0, abs_tol=1e-12) or math.isclose(phi, 2 * math.pi, abs_tol=1e-12):
        candidates = [math.pi / t0, -math.pi / t0]

    moved = None
    for shift in candidates:
        moved = _shifted(values, mask, shift)
        if moved is not None:
            break
    if moved is None:
        raise DegenerateAfterShift(
            f"shifting the antisymmetric sector by {candidates} collides or reorders eigenvalues"
        )

    shifted = Spectrum(values=tuple(float(x) for x in moved))
    weights = end_weights_from_spectrum(shifted)
    chain = chain_from_spectral_data(shifted.values, weights.weights)

    system = eigensystem(chain)
    expected = np.where(mask, -1.0, 1.0)
    if np.any(np.abs(system.parities - expected) > 1e-6):
        raise NumericalFailure("resynthesized chain does not have the alternating parity pattern")

    return chain.model_copy(
        update={
            "label": f"revival-shift-phi{phase:.6g}",
            "provenance": {
                "generator": "revival-shift",
                "phase": phase,
                "shift": float(moved[mask][0] - values[mask][0]),
                "t0": t0,
            },
        }
    )


# ─── Diagnostics ─── #


def revival_probabilities(chain: ChainSpec, t: float) -> tuple[float, float]:
    """(|⟨1|e^{-iHt}|1⟩|², |⟨N|e^{-iHt}|1⟩|²)."""
    system = eigensystem(chain)
    p_first = abs(complex(system.amplitude(t, 1, 1))) ** 2
    p_last = abs(complex(system.amplitude(t, 1, chain.n))) ** 2
    return p_first, p_last


def revival_trace(chain: ChainSpec, t_max: float, steps: int) -> RevivalTrace:
    if steps < 2 or t_max <= 0:
        raise InvalidInput("a revival trace needs t_max > 0 and at least 2 steps")
    system = eigensystem(chain)
    times = np.linspace(0.0, t_max, steps)
    return RevivalTrace(
        times=times,
        p_first=np.clip(np.abs(system.amplitude(times, 1, 1)) ** 2, 0.0, 1.0),
        p_last=np.clip(np.abs(system.amplitude(times, 1, chain.n)) ** 2, 0.0, 1.0),
    )
