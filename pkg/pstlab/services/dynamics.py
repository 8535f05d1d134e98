"""Dynamics Service.

Single-excitation evolution ⟨target|e^{-iH₀t}|source⟩ from the chain's
eigendecomposition, fidelity functionals, receiver-window averages and
arrival-profile metrics (plateau width, fitted sin^{2m} exponent).
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import structlog
from scipy.integrate import IntegrationWarning, quad, quad_vec

from pstlab.core.config import settings
from pstlab.core.exceptions import InvalidInput, NoArrivalPlateau, QuadratureFailure, RegionError
from pstlab.models.schemas import ChainSpec, ReceiverWindow
from pstlab.services.chain_core import Eigensystem, eigensystem

logger = structlog.get_logger()

# Points evaluated per vectorized chunk while scanning for a plateau edge
SCAN_CHUNK = 1024
# Fit range for the arrival-profile exponent, as fractions of t₀
PROFILE_FIT_RANGE = (0.5, 0.95)
MIN_FIT_SAMPLES = 8


@dataclass
class EvolutionTrace:
    """Sampled transfer amplitude with its excitation and qubit fidelities."""

    times: np.ndarray
    amplitudes: np.ndarray
    fe: np.ndarray
    f: np.ndarray

    @classmethod
    def from_amplitudes(cls, times: np.ndarray, amplitudes: np.ndarray) -> EvolutionTrace:
        fe = np.clip(np.abs(amplitudes) ** 2, 0.0, 1.0)
        return cls(times=times, amplitudes=amplitudes, fe=fe, f=_qubit_fidelity(fe))

    def rows(self) -> list[tuple[float, float, float, float, float]]:
        return [
            (float(t), float(a.real), float(a.imag), float(e), float(q))
            for t, a, e, q in zip(self.times, self.amplitudes, self.fe, self.f, strict=True)
        ]


def _qubit_fidelity(fe: np.ndarray) -> np.ndarray:
    return 1.0 / 3.0 + (1.0 + np.sqrt(fe)) ** 2 / 6.0


def _check_site(chain: ChainSpec, site: int) -> None:
    if not 1 <= site <= chain.n:
        raise RegionError(f"site {site} outside 1..{chain.n}")


# ─── Evolution ─── #


def transfer_amplitude(
    chain: ChainSpec, t: float, source: int = 1, target: int | None = None
) -> complex:
    """⟨target|e^{-iH₀t}|source⟩ (1-based sites, target defaults to N)."""
    target = chain.n if target is None else target
    _check_site(chain, source)
    _check_site(chain, target)
    return complex(eigensystem(chain).amplitude(t, source, target))


def amplitude_column(chain: ChainSpec, t: float, source: int = 1) -> np.ndarray:
    """e^{-iH₀t}|source⟩ over every site."""
    _check_site(chain, source)
    system = eigensystem(chain)
    phases = np.exp(-1j * system.values * t)
    return system.vectors @ (phases * system.vectors[source - 1])


def trace(chain: ChainSpec, t_max: float, steps: int) -> EvolutionTrace:
    """Amplitude ⟨N|e^{-iH₀t}|1⟩ on a uniform grid over [0, t_max]."""
    if steps < 2:
        raise InvalidInput(f"a trace needs at least 2 steps, got {steps}")
    if t_max <= 0:
        raise InvalidInput(f"t_max must be positive, got {t_max}")
    times = np.linspace(0.0, t_max, steps)
    return EvolutionTrace.from_amplitudes(times, eigensystem(chain).amplitude(times))


def qubit_fidelity(fe: float) -> float:
    """F = 1/3 + (1+√F_e)²/6."""
    if not 0.0 <= fe <= 1.0:
        raise InvalidInput(f"excitation fidelity must lie in [0, 1], got {fe}")
    return float(_qubit_fidelity(np.asarray(fe)))


# ─── Receiver windows ─── #


def _integration_range(window: ReceiverWindow, t0: float) -> tuple[float, float]:
    lo, hi = window.support()
    return t0 + lo, t0 + hi


def _breakpoints(window: ReceiverWindow, t0: float, a: float, b: float) -> list[float]:
    candidates = [0.0, t0]
    if window.kind == "tabulated":
        candidates += [t0 + x for x in window.times]
    return [x for x in candidates if a < x < b]


def window_average(fn: Callable[[float], float], window: ReceiverWindow, t0: float) -> float:
    """∫p(t−t₀)·fn(t) dt by adaptive quadrature (fn(t₀) for the delta window)."""
    if t0 <= 0:
        raise InvalidInput(f"t0 must be positive, got {t0}")
    if window.kind == "delta":
        return float(fn(t0))

    a, b = _integration_range(window, t0)

    def integrand(t: float) -> float:
        return float(window.density(t - t0)) * fn(t)

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(
                integrand,
                a,
                b,
                epsabs=settings.QUAD_ABS_TOL,
                epsrel=settings.QUAD_ABS_TOL,
                limit=settings.QUAD_LIMIT,
                points=_breakpoints(window, t0, a, b) or None,
            )
        except IntegrationWarning as exc:
            raise QuadratureFailure(f"window quadrature did not converge: {exc}") from exc
    return float(value)


def window_average_matrix(
    fn: Callable[[float], np.ndarray], window: ReceiverWindow, t0: float
) -> np.ndarray:
    """Complex-matrix version of window_average (real and imaginary parts stacked)."""
    if t0 <= 0:
        raise InvalidInput(f"t0 must be positive, got {t0}")
    if window.kind == "delta":
        return np.asarray(fn(t0))

    a, b = _integration_range(window, t0)
    shape = np.asarray(fn(t0)).shape

    def integrand(t: float) -> np.ndarray:
        m = np.asarray(fn(t)) * float(window.density(t - t0))
        return np.concatenate([m.real.ravel(), m.imag.ravel()])

    result, _, info = quad_vec(
        integrand,
        a,
        b,
        epsabs=settings.QUAD_ABS_TOL,
        epsrel=settings.QUAD_ABS_TOL,
        norm="max",
        limit=settings.QUAD_LIMIT,
        points=_breakpoints(window, t0, a, b) or None,
        full_output=True,
    )
    if info.status == 1:
        raise QuadratureFailure(f"operator quadrature hit the subdivision limit: {info.message}")
    if info.status == 2:
        logger.warning("dynamics.quadrature_roundoff", message=str(info.message))
    size = int(np.prod(shape))
    return (result[:size] + 1j * result[size:]).reshape(shape)


def windowed_transfer(chain: ChainSpec, window: ReceiverWindow, t0: float) -> float:
    """F̃_e = ∫p(t−t₀)|⟨N|e^{-iH₀t}|1⟩| dt."""
    system = eigensystem(chain)
    value = window_average(lambda t: abs(complex(system.amplitude(t))), window, t0)
    return min(max(value, 0.0), 1.0)


def expected_fidelity(chain: ChainSpec, window: ReceiverWindow, t0: float) -> float:
    """F̄ = ½ + (1/6)∫p(t−t₀)(2√F_e + F_e) dt."""
    system = eigensystem(chain)

    def integrand(t: float) -> float:
        modulus = abs(complex(system.amplitude(t)))
        return 2.0 * modulus + modulus**2

    value = 0.5 + window_average(integrand, window, t0) / 6.0
    return min(max(value, 0.5), 1.0)


# ─── Arrival profile ─── #


def _find_edge(
    fe_fn: Callable[[np.ndarray], np.ndarray],
    t0: float,
    threshold: float,
    step: float,
    limit: float,
) -> float:
    """First crossing of ``threshold`` moving from t₀ toward ``limit``, bisected."""
    direction = 1.0 if limit > t0 else -1.0
    inside = t0
    offset = 0
    while True:
        ks = np.arange(offset + 1, offset + SCAN_CHUNK + 1)
        ts = t0 + direction * step * ks
        past_limit = direction * (ts - limit) >= 0
        ts = np.where(past_limit, limit, ts)
        below = np.asarray(fe_fn(ts)) < threshold
        if below.any():
            first = int(np.argmax(below))
            outside = float(ts[first])
            if first > 0:
                inside = float(ts[first - 1])
            break
        if past_limit.any():
            return limit
        inside = float(ts[-1])
        offset += SCAN_CHUNK

    while abs(outside - inside) > settings.WIDTH_BISECTION_TOL:
        mid = 0.5 * (inside + outside)
        if float(np.asarray(fe_fn(np.array([mid])))[0]) >= threshold:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def plateau_width(
    fe_fn: Callable[[np.ndarray], np.ndarray],
    t0: float,
    epsilon: float,
    step: float,
) -> float:
    """Length of the connected interval around t₀ on which fe_fn ≥ 1 − ε.

    ``fe_fn`` takes an array of times. The scan walks outward in increments of
    ``step`` (bounded by 0 on the left and 2t₀ on the right), then bisects.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidInput(f"epsilon must lie in (0, 1), got {epsilon}")
    threshold = 1.0 - epsilon
    at_t0 = float(np.asarray(fe_fn(np.array([t0])))[0])
    if at_t0 < threshold:
        raise NoArrivalPlateau(at_t0, threshold)
    right = _find_edge(fe_fn, t0, threshold, step, 2.0 * t0)
    left = _find_edge(fe_fn, t0, threshold, step, 0.0)
    return right - left


def scan_step(system: Eigensystem) -> float:
    spread = float(system.values[-1] - system.values[0])
    return settings.WIDTH_SCAN_RESOLUTION / spread


def arrival_width(chain: ChainSpec, t0: float, epsilon: float) -> float:
    """Width of the arrival peak of F_e at level 1 − ε."""
    system = eigensystem(chain)
    return plateau_width(
        lambda ts: np.abs(system.amplitude(ts)) ** 2, t0, epsilon, scan_step(system)
    )


def fit_profile_exponent(times: np.ndarray, values: np.ndarray, t0: float) -> float:
    """Slope of ln(values) against 2·ln sin(πt/(2t₀)) over [0.5t₀, 0.95t₀]."""
    lo, hi = PROFILE_FIT_RANGE
    mask = (times >= lo * t0) & (times <= hi * t0) & (values > 0)
    if int(mask.sum()) < MIN_FIT_SAMPLES:
        raise InvalidInput(
            f"only {int(mask.sum())} usable samples in [{lo}t0, {hi}t0]; need {MIN_FIT_SAMPLES}"
        )
    x = 2.0 * np.log(np.sin(math.pi * times[mask] / (2.0 * t0)))
    y = np.log(values[mask])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def profile_exponent(trace: EvolutionTrace, t0: float) -> float:
    """Fitted m in F_e ≈ sin^{2m}(πt/(2t₀))."""
    return fit_profile_exponent(trace.times, trace.fe, t0)
