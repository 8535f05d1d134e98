"""Chain Synthesis Service.

Builds chains: the Krawtchouk family, the inverse eigenvalue solver that
turns a spectrum into a mirror-symmetric chain, the T-Rex spectra with
their exact and three-element approximate chains, and extremal-pair
pruning.

The inverse solver runs Lanczos on diag(λ) from the start vector (√a_n)
with full reorthogonalization; the tridiagonal matrix it produces has
exactly the requested eigenvalues and end weights.
"""

from __future__ import annotations

import math

import numpy as np
import structlog

from pstlab.core.config import settings
from pstlab.core.exceptions import (
    IllConditionedSpectrum,
    InvalidInput,
    LanczosBreakdown,
    NumericalFailure,
    ParityError,
    SpectrumError,
)
from pstlab.models.schemas import (
    ChainSpec,
    EndWeights,
    Spectrum,
    TRexParams,
    admissible_gamma,
)
from pstlab.services.chain_core import eigensystem, is_mirror_symmetric, pst_check

logger = structlog.get_logger()


def _smallest_odd_at_least(x: float) -> int:
    k = max(1, math.ceil(x - 1e-9))
    return k if k % 2 else k + 1


# ─── Krawtchouk ─── #


def krawtchouk(n: int, j: float = 1.0) -> ChainSpec:
    """J_k = j·√(k(n−k)); spectrum j·{−(n−1), …, n−1}, PST at π/(2j)."""
    if n < 2:
        raise InvalidInput(f"chain length must be at least 2, got {n}")
    if j <= 0:
        raise InvalidInput(f"coupling scale must be positive, got {j}")
    couplings = tuple(j * math.sqrt(k * (n - k)) for k in range(1, n))
    return ChainSpec.from_couplings(
        couplings,
        label=f"krawtchouk-n{n}",
        provenance={"generator": "krawtchouk", "params": {"n": n, "j": j}, "t0": math.pi / (2 * j)},
    )


# ─── Inverse eigenvalue problem ─── #


def end_weights_from_spectrum(spectrum: Spectrum) -> EndWeights:
    """a_n ∝ 1/|q′(λ_n)|, evaluated in log space."""
    lam = spectrum.as_array()
    gaps = np.diff(lam)
    if gaps.min() < settings.DEGENERACY_RTOL * spectrum.span:
        raise IllConditionedSpectrum(
            f"ill-conditioned spectrum: smallest gap {gaps.min():.3e} vs span {spectrum.span:.3e}"
        )
    diff = np.abs(np.subtract.outer(lam, lam))
    np.fill_diagonal(diff, 1.0)
    log_w = -np.log(diff).sum(axis=1)
    w = np.exp(log_w - log_w.max())
    w /= math.fsum(w)
    return EndWeights(weights=tuple(float(x) for x in w))


def chain_from_spectral_data(
    values: np.ndarray | tuple[float, ...],
    weights: np.ndarray | tuple[float, ...],
    label: str = "",
) -> ChainSpec:
    """Jacobi matrix with eigenvalues ``values`` and end weights ``weights``.

    Lanczos on diag(values) from start vector √weights, reorthogonalizing twice
    against every previous basis vector. The diagonal is returned as computed.
    """
    lam = np.asarray(values, dtype=float)
    a = np.asarray(weights, dtype=float)
    n = lam.size
    if n < 2 or a.size != n:
        raise InvalidInput("need at least two eigenvalues and one weight per eigenvalue")
    if np.any(a <= 0):
        raise IllConditionedSpectrum("every end weight must be strictly positive")

    scale = float(np.abs(lam).max())
    basis = np.zeros((n, n))
    basis[:, 0] = np.sqrt(a / a.sum())
    alpha = np.zeros(n)
    beta = np.zeros(n - 1)

    for k in range(n):
        w = lam * basis[:, k]
        alpha[k] = basis[:, k] @ w
        if k == n - 1:
            break
        w -= alpha[k] * basis[:, k]
        if k > 0:
            w -= beta[k - 1] * basis[:, k - 1]
        q = basis[:, : k + 1]
        for _ in range(2):
            w -= q @ (q.T @ w)
        b = float(np.linalg.norm(w))
        if b <= n * np.finfo(float).eps * scale:
            raise LanczosBreakdown(k + 1, "Krylov space exhausted (zero coupling)")
        beta[k] = b
        basis[:, k + 1] = w / b

        overlap = basis[:, : k + 2].T @ basis[:, k + 1]
        overlap[-1] -= 1.0
        drift = float(np.abs(overlap).max())
        if drift > settings.LANCZOS_ORTHOGONALITY_TOL:
            raise LanczosBreakdown(k + 1, f"loss of orthogonality {drift:.3e}")

    return ChainSpec(
        n=n,
        couplings=tuple(float(x) for x in beta),
        diagonal=tuple(float(x) for x in alpha),
        label=label,
        provenance={"generator": "spectral-data"},
    )


def _mirror_half(couplings: np.ndarray) -> np.ndarray:
    """Keep J_1..J_{⌈(N−1)/2⌉} (the half seen from site 1) and reflect it."""
    half = (couplings.size + 1) // 2
    return np.concatenate([couplings[:half], couplings[: couplings.size - half][::-1]])


def chain_from_spectrum(spectrum: Spectrum, label: str = "") -> ChainSpec:
    """Mirror-symmetric, field-free chain realizing a symmetric spectrum.

    Weights 1/|q′| make the Jacobi matrix persymmetric, so only the first half
    of the Lanczos couplings is kept and reflected; the far half is where the
    smallest end weights would otherwise limit accuracy.
    """
    if not spectrum.is_symmetric:
        raise SpectrumError("spectrum must be symmetric under λ → −λ")
    weights = end_weights_from_spectrum(spectrum)
    raw = chain_from_spectral_data(spectrum.values, weights.weights)

    j = np.asarray(raw.couplings)
    j_max = float(j.max())
    field = float(np.abs(raw.diagonal[: (raw.n + 1) // 2]).max())
    if field > settings.FIELD_FREE_RTOL * max(j_max, spectrum.span):
        raise NumericalFailure(f"reconstructed diagonal {field:.3e} is not field-free")
    logger.debug("synthesis.mirror_drift", asymmetry=float(np.abs(j - j[::-1]).max()), n=raw.n)

    provenance: dict = {"generator": "from-spectrum"}
    if spectrum.transfer_time is not None:
        provenance["t0"] = spectrum.transfer_time
    chain = ChainSpec.from_couplings(_mirror_half(j), label=label, provenance=provenance)

    rebuilt = eigensystem(chain).values
    error = float(np.abs(rebuilt - spectrum.as_array()).max())
    if error > settings.FIELD_FREE_RTOL * spectrum.span:
        raise NumericalFailure(
            f"synthesized chain misses the target spectrum by {error:.3e} "
            f"(span {spectrum.span:.3e})"
        )
    return chain


def rescale_to_unit_max(chain: ChainSpec) -> ChainSpec:
    """Divide couplings by J_max; the recorded t₀ is multiplied by the same factor."""
    factor = chain.max_coupling
    provenance = {**chain.provenance, "rescale_factor": factor, "rescaled": True}
    if "t0" in provenance:
        provenance["t0"] = provenance["t0"] * factor
    return ChainSpec(
        n=chain.n,
        couplings=tuple(j / factor for j in chain.couplings),
        diagonal=tuple(h / factor for h in chain.diagonal),
        label=chain.label,
        provenance=provenance,
    )


# ─── T-Rex ─── #


def snap_gamma(r: int, gamma: float, variant: str = "clear_out") -> float:
    """The admissible γ closest to the requested one (ties round up)."""
    return admissible_gamma(r, gamma, variant)


def special_r2_spectrum(n: int, gamma: int) -> Spectrum:
    """{±1, ±(1+2γ), …, ±(1+(n−2)γ)} with base gap 2."""
    if n < 2 or n % 2:
        raise ParityError(f"the r2 ladder needs an even length, got n={n}")
    if gamma != int(gamma) or int(gamma) % 2 == 0 or gamma < 1:
        raise ParityError(f"gamma must be a positive odd integer, got {gamma}")
    positive = [1 + 2 * k * int(gamma) for k in range(n // 2)]
    values = sorted([-x for x in positive] + positive)
    return Spectrum(values=tuple(float(x) for x in values), base_gap=2.0)


def trex_spectrum(params: TRexParams) -> Spectrum:
    """R evenly spaced central eigenvalues plus (N−R)/2 cleared-out pairs."""
    n, r, g = params.n, params.r, params.base_gap
    if params.variant == "r2":
        ladder = special_r2_spectrum(n, int(params.gamma))
        return Spectrum(values=tuple(x * g / 2 for x in ladder.values), base_gap=g)

    if r % 2 == 0:
        central = [(2 * k + 1) * g / 2 for k in range(r // 2)]
    else:
        central = [k * g for k in range(1, (r - 1) // 2 + 1)]
    top = (r - 1) * g / 2

    outer: list[float] = []
    if n > r:
        first = top + _smallest_odd_at_least((params.gamma - r + 1) / 2) * g
        stride = _smallest_odd_at_least(params.gamma) * g
        outer = [first + j * stride for j in range((n - r) // 2)]

    positive = central + outer
    values = sorted([-x for x in positive] + positive + ([0.0] if r % 2 else []))
    return Spectrum(values=tuple(values), base_gap=g)


def _trex_label(params: TRexParams) -> str:
    if params.variant == "r2":
        return f"trex-r2-n{params.n}-gamma{params.gamma:g}"
    return f"trex-n{params.n}-r{params.r}-gamma{params.gamma:g}"


def trex_chain(params: TRexParams, rescale_to_unit_max_coupling: bool = False) -> ChainSpec:
    """Exact T-Rex chain, optionally rescaled to unit maximum coupling."""
    spectrum = trex_spectrum(params)
    chain = chain_from_spectrum(spectrum, label=_trex_label(params))
    provenance = {
        **chain.provenance,
        "generator": "trex",
        "params": params.describe(),
        "rescaled": False,
    }
    if params.snapped_from is not None:
        provenance["snap_warning"] = (
            f"gamma {params.snapped_from:g} snapped to admissible {params.gamma:g}"
        )
    chain = chain.model_copy(update={"provenance": provenance})
    if rescale_to_unit_max_coupling:
        chain = rescale_to_unit_max(chain)
    return chain


def trex_central_coupling(params: TRexParams) -> float:
    """J_{N/2} = ½(γg(N−R)/2 + (−1)^{(N−R)/2}·Rg/2), i.e. ½·Tr(H₀S), for even N."""
    if params.n % 2 or params.variant != "clear_out":
        raise ParityError("the central coupling formula needs even n and the standard variant")
    n, r, g, gamma = params.n, params.r, params.base_gap, params.gamma
    sign = -1 if ((n - r) // 2) % 2 else 1
    return 0.5 * (gamma * g * (n - r) / 2 + sign * r * g / 2)


def trex_approximation(params: TRexParams) -> ChainSpec:
    """Three-element approximation: Krawtchouk arms, a γ-scale central block and connectors."""
    n, r, g, gamma = params.n, params.r, params.base_gap, params.gamma
    if params.variant != "clear_out" or r < 4:
        raise InvalidInput("the three-element approximation needs the standard variant and r ≥ 4")
    if r % 2:
        raise ParityError(
            "approximation undefined for odd r: an odd central block has a zero eigenvalue"
        )
    if n == r:
        return krawtchouk(n, g / 2)

    arms = [(g / 2) * math.sqrt(k * (r - k)) for k in range(1, (r - 2) // 2 + 1)]
    m = n - r
    centre = [(gamma * g / 2) * math.sqrt(k * (m - k)) for k in range(1, m)]

    block = np.diag(centre, 1) + np.diag(centre, -1)
    try:
        corner = float(np.linalg.solve(block, np.eye(m)[:, -1])[0])
    except np.linalg.LinAlgError as exc:
        raise ParityError("approximation undefined for odd central block") from exc
    connector = math.sqrt((r * g / 4) / abs(corner))

    couplings = arms + [connector] + centre + [connector] + arms[::-1]
    return ChainSpec.from_couplings(
        couplings,
        label=f"trex-approx-n{n}-r{r}-gamma{gamma:g}",
        provenance={
            "generator": "trex-approx",
            "params": params.describe(),
            "connector": connector,
            "t0": math.pi / g,
        },
    )


# ─── Pruning ─── #


def prune_extremal_pair(chain: ChainSpec) -> tuple[ChainSpec, float]:
    """Drop ±λ_max from a PST chain's spectrum and resynthesize.

    Returns the shorter chain and the predicted J̃₁² = J₁² − J₁²J₂²/Γ,
    Γ = λ_max² − J₁².
    """
    if chain.n < 4:
        raise InvalidInput(f"pruning needs n ≥ 4, got n={chain.n}")
    verdict = pst_check(chain)
    if not verdict.is_pst:
        raise SpectrumError("pruning needs a perfect-state-transfer chain")
    system = eigensystem(chain)
    spectrum = system.spectrum
    if not spectrum.is_symmetric:
        raise SpectrumError("pruning needs a symmetric spectrum")

    lam_max = float(system.values[-1])
    j1_sq = chain.couplings[0] ** 2
    j2_sq = chain.couplings[1] ** 2
    predicted = j1_sq - j1_sq * j2_sq / (lam_max**2 - j1_sq)

    reduced = Spectrum(values=spectrum.values[1:-1], base_gap=verdict.base_gap)
    pruned = chain_from_spectrum(reduced, label=f"{chain.label}-pruned" if chain.label else "")
    pruned = pruned.model_copy(
        update={
            "provenance": {
                **pruned.provenance,
                "generator": "prune",
                "removed_eigenvalue": lam_max,
                "predicted_j1_sq": predicted,
            }
        }
    )
    if not is_mirror_symmetric(pruned):
        raise NumericalFailure("pruned chain lost mirror symmetry")
    return pruned, predicted
