"""Speed-limit and optimality bounds.

Mandelstam–Tamm time, the sin²(J₁t) arrival envelope, the minimal first
coupling for PST in time t₀, and the T-Rex trade-off sweep.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
import structlog

from pstlab.core.config import settings
from pstlab.core.exceptions import InvalidInput, PstLabError
from pstlab.models.schemas import ChainSpec, TradeoffPoint, TRexParams
from pstlab.services.dynamics import EvolutionTrace
from pstlab.services.synthesis import trex_chain

logger = structlog.get_logger()


def mandelstam_tamm_time(chain: ChainSpec) -> float:
    """π/(2J₁): for a field-free chain ⟨1|H₀²|1⟩ − ⟨1|H₀|1⟩² = J₁²."""
    if not chain.is_field_free:
        raise InvalidInput("the first-coupling form of the speed limit needs a field-free chain")
    return math.pi / (2.0 * chain.j1)


def state_speed_limit(chain: ChainSpec, state: np.ndarray) -> float:
    """π/(2ΔH) for an arbitrary normalized start state."""
    psi = np.asarray(state, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    h = chain.hamiltonian()
    h_psi = h @ psi
    mean = float(np.real(np.vdot(psi, h_psi)))
    spread_sq = float(np.real(np.vdot(h_psi, h_psi))) - mean**2
    if spread_sq <= 0:
        return math.inf
    return math.pi / (2.0 * math.sqrt(spread_sq))


def anandan_envelope_check(chain: ChainSpec, trace: EvolutionTrace) -> float:
    """Worst F_e(t) − sin²(J₁t) over trace samples with t ≤ π/(2J₁)."""
    j1 = chain.j1
    mask = trace.times <= math.pi / (2.0 * j1)
    if not mask.any():
        raise InvalidInput("trace has no samples before the Mandelstam–Tamm time")
    excess = trace.fe[mask] - np.sin(j1 * trace.times[mask]) ** 2
    return float(excess.max())


def theorem_bound(n_parity: Literal["even", "odd"], t0: float) -> float:
    """Smallest first coupling permitting PST in time t₀.

    even N: √3·π/(2t₀); odd N: π/t₀.
    """
    if t0 <= 0:
        raise InvalidInput(f"t0 must be positive, got {t0}")
    if n_parity == "even":
        return math.sqrt(3.0) * math.pi / (2.0 * t0)
    if n_parity == "odd":
        return math.pi / t0
    raise InvalidInput(f"n_parity must be 'even' or 'odd', got {n_parity!r}")


def trex_asymptotics(params: TRexParams) -> dict[str, float]:
    """Large-γ predictions at unit maximum coupling (R ≥ 4, N > R)."""
    n, r, gamma = params.n, params.r, params.gamma
    if r < 4 or n <= r:
        raise InvalidInput("asymptotic forms need r ≥ 4 and n > r")
    j1 = 2.0 * math.sqrt(r - 1) / (gamma * (n - r))
    t0 = math.pi * gamma * (n - r) / 4.0
    return {"j1": j1, "t0": t0, "j1_t0": math.pi * math.sqrt(r - 1) / 2.0}


def _sweep_point(n: int, r: int, gamma: float) -> TradeoffPoint:
    params = TRexParams(n=n, r=r, gamma=gamma)
    chain = trex_chain(params, rescale_to_unit_max_coupling=True)
    return TradeoffPoint.build(gamma=params.gamma, t0=chain.provenance["t0"], j1=chain.j1)


def tradeoff_sweep(
    n: int, r: int, gamma_list: list[float], threads: int | None = None
) -> list[TradeoffPoint]:
    """Rescaled (t₀, J₁, J₁t₀) per γ, ordered by γ; failing points are skipped and logged."""
    gammas = sorted(set(gamma_list))
    if n == r:
        gammas = gammas[:1] or [float(r + 1)]

    def evaluate(gamma: float) -> TradeoffPoint | None:
        try:
            return _sweep_point(n, r, gamma)
        except (PstLabError, ValueError) as exc:
            logger.warning("bounds.sweep_point_skipped", n=n, r=r, gamma=gamma, error=str(exc))
            return None

    with ThreadPoolExecutor(max_workers=threads or settings.THREADS) as pool:
        results = list(pool.map(evaluate, gammas))
    return [p for p in results if p is not None]
