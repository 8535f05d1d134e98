"""Pydantic domain types shared by every service and by the file formats."""

from __future__ import annotations

import math
from typing import Any, Literal

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from pstlab.core.config import settings
from pstlab.core.exceptions import ParityError, SpectrumError

logger = structlog.get_logger()

FORMAT_VERSION = 1


# ─── Odd-gap arithmetic ─── #


def odd_multiple(gap: float, g: float, rtol: float | None = None) -> int | None:
    """Return k if gap = k·g with k an odd positive integer (to rtol), else None."""
    rtol = settings.ODD_GAP_RTOL if rtol is None else rtol
    ratio = gap / g
    k = round(ratio)
    if k < 1 or k % 2 == 0:
        return None
    if abs(ratio - k) > rtol * max(1.0, ratio):
        return None
    return k


def detect_base_gap(values: tuple[float, ...] | list[float]) -> float | None:
    """Find g such that every consecutive gap is an odd multiple of g.

    Tries the minimum gap first, then min_gap/m for odd m up to MAX_GAP_DIVISOR.
    """
    gaps = np.diff(np.asarray(values, dtype=float))
    if gaps.size == 0 or np.any(gaps <= 0):
        return None
    smallest = float(gaps.min())
    for m in range(1, settings.MAX_GAP_DIVISOR + 1, 2):
        g = smallest / m
        if all(odd_multiple(float(gap), g) is not None for gap in gaps):
            return g
    return None


# ─── Chains ─── #


class ChainSpec(BaseModel):
    """A nearest-neighbour chain Hamiltonian H₀ given by couplings and on-site fields.

    ``couplings[k]`` couples sites k+1 and k+2 (1-based sites).
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    couplings: tuple[float, ...]
    diagonal: tuple[float, ...] = ()
    label: str = ""
    provenance: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _default_diagonal(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("diagonal") is None and "n" in data:
            data = {**data, "diagonal": (0.0,) * int(data["n"])}
        return data

    @model_validator(mode="after")
    def _check_shape(self) -> ChainSpec:
        if len(self.couplings) != self.n - 1:
            raise ValueError(
                f"expected {self.n - 1} couplings for n={self.n}, got {len(self.couplings)}"
            )
        if len(self.diagonal) != self.n:
            raise ValueError(f"expected {self.n} diagonal entries, got {len(self.diagonal)}")
        if not all(math.isfinite(x) for x in (*self.couplings, *self.diagonal)):
            raise ValueError("couplings and diagonal must be finite")
        if any(j <= 0 for j in self.couplings):
            raise ValueError("all couplings must be positive (zero disconnects the chain)")
        return self

    @classmethod
    def from_couplings(
        cls,
        couplings: Any,
        diagonal: Any = None,
        label: str = "",
        provenance: dict[str, Any] | None = None,
    ) -> ChainSpec:
        couplings = tuple(float(j) for j in couplings)
        n = len(couplings) + 1
        diag = tuple(float(h) for h in diagonal) if diagonal is not None else (0.0,) * n
        return cls(
            n=n, couplings=couplings, diagonal=diag, label=label, provenance=provenance or {}
        )

    @property
    def j1(self) -> float:
        return self.couplings[0]

    @property
    def max_coupling(self) -> float:
        return max(self.couplings)

    @property
    def is_field_free(self) -> bool:
        return all(h == 0.0 for h in self.diagonal)

    def hamiltonian(self) -> np.ndarray:
        """Dense N×N matrix of H₀."""
        j = np.asarray(self.couplings)
        return np.diag(np.asarray(self.diagonal)) + np.diag(j, 1) + np.diag(j, -1)

    def flip(self) -> np.ndarray:
        """The mirror operator S = Σ |N+1−n⟩⟨n|."""
        return np.fliplr(np.eye(self.n))

    def with_couplings(self, couplings: Any, **provenance: Any) -> ChainSpec:
        return ChainSpec(
            n=self.n,
            couplings=tuple(float(j) for j in couplings),
            diagonal=self.diagonal,
            label=self.label,
            provenance={**self.provenance, **provenance},
        )

    def scaled(self, factor: float) -> ChainSpec:
        """Multiply every coupling and field by ``factor``."""
        return ChainSpec(
            n=self.n,
            couplings=tuple(j * factor for j in self.couplings),
            diagonal=tuple(h * factor for h in self.diagonal),
            label=self.label,
            provenance=dict(self.provenance),
        )


# ─── Spectra ─── #


class Spectrum(BaseModel):
    """Strictly increasing eigenvalues with an optional certified odd-gap base gap."""

    model_config = ConfigDict(frozen=True)

    values: tuple[float, ...]
    base_gap: float | None = None

    @model_validator(mode="after")
    def _check_values(self) -> Spectrum:
        if len(self.values) < 2:
            raise ValueError("a spectrum needs at least two eigenvalues")
        if not all(math.isfinite(x) for x in self.values):
            raise ValueError("eigenvalues must be finite")
        if any(b <= a for a, b in zip(self.values, self.values[1:], strict=False)):
            raise ValueError("eigenvalues must be strictly increasing")
        if self.base_gap is not None:
            if self.base_gap <= 0:
                raise ValueError("base_gap must be positive")
            for a, b in zip(self.values, self.values[1:], strict=False):
                if odd_multiple(b - a, self.base_gap) is None:
                    raise ValueError(
                        f"gap {b - a:.12g} is not an odd multiple of base_gap {self.base_gap:.12g}"
                    )
        return self

    @classmethod
    def from_values(cls, values: Any, base_gap: float | None = None) -> Spectrum:
        """Sort-free constructor that certifies a base gap when none is given."""
        values = tuple(float(x) for x in values)
        if base_gap is None and len(values) >= 2:
            base_gap = detect_base_gap(values)
        return cls(values=values, base_gap=base_gap)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def transfer_time(self) -> float | None:
        return math.pi / self.base_gap if self.base_gap else None

    @property
    def span(self) -> float:
        return self.values[-1] - self.values[0]

    @property
    def is_symmetric(self) -> bool:
        tol = settings.SPECTRUM_SYMMETRY_TOL * max(1.0, abs(self.values[-1]), abs(self.values[0]))
        return all(
            abs(a + b) <= tol for a, b in zip(self.values, reversed(self.values), strict=False)
        )

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


class EndWeights(BaseModel):
    """a_n = |⟨1|λ_n⟩|², in spectrum order."""

    model_config = ConfigDict(frozen=True)

    weights: tuple[float, ...]

    @model_validator(mode="after")
    def _check_weights(self) -> EndWeights:
        if any(w < 0 for w in self.weights):
            raise ValueError("end weights must be nonnegative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-10:
            raise ValueError("end weights must sum to 1")
        return self

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)


class PstVerdict(BaseModel):
    """Outcome of a perfect-state-transfer check."""

    is_mirror_symmetric: bool
    has_odd_gap_spectrum: bool
    t0: float | None = None
    base_gap: float | None = None
    phase_angle: float | None = None  # arg of ⟨N|e^{-iH₀t₀}|1⟩
    arrival_modulus: float | None = None

    @model_validator(mode="after")
    def _t0_iff_pst(self) -> PstVerdict:
        pst = self.is_mirror_symmetric and self.has_odd_gap_spectrum
        if pst != (self.t0 is not None):
            raise ValueError("t0 must be present exactly when both PST conditions hold")
        return self

    @property
    def is_pst(self) -> bool:
        return self.t0 is not None

    @property
    def phase(self) -> complex | None:
        if self.phase_angle is None:
            return None
        return complex(math.cos(self.phase_angle), math.sin(self.phase_angle))


# ─── T-Rex parameters ─── #


def admissible_gamma(r: int, gamma: float, variant: str = "clear_out") -> float:
    """Nearest γ for which the outer eigenvalue placement is odd-gap valid.

    Even r: γ ≡ r+1 (mod 4), so that γg/2 − (r−1)g/2 is an odd multiple of g.
    Odd r and the r2 ladder: nearest odd integer. Ties round up.
    """
    if variant == "r2" or r % 2 == 1:
        base, modulus = 1, 2
    else:
        base, modulus = (r + 1) % 4, 4
    below = math.floor((gamma - base) / modulus) * modulus + base
    above = below + modulus
    snapped = below if gamma - below < above - gamma else above
    while snapped <= 0:
        snapped += modulus
    return float(snapped)


class TRexParams(BaseModel):
    """Parameters of a T-Rex chain: length n, retained central count r, clear-out scale γ."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    r: int = Field(ge=2)
    gamma: float = Field(gt=0)
    base_gap: float = Field(default=1.0, gt=0)
    variant: Literal["clear_out", "r2"] = "clear_out"
    snapped_from: float | None = None

    @model_validator(mode="before")
    @classmethod
    def _snap_gamma(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("snapped_from") is not None:
            return data
        try:
            n, r, gamma = int(data["n"]), int(data["r"]), float(data["gamma"])
        except (KeyError, TypeError, ValueError):
            return data
        if n == r or gamma <= 0:
            return data
        snapped = admissible_gamma(r, gamma, data.get("variant", "clear_out"))
        if snapped != gamma:
            logger.warning("synthesis.gamma_snapped", requested=gamma, snapped=snapped, n=n, r=r)
            data = {**data, "gamma": snapped, "snapped_from": gamma}
        return data

    @model_validator(mode="after")
    def _check_parity(self) -> TRexParams:
        if self.r > self.n:
            raise ParityError(f"r={self.r} cannot exceed n={self.n}")
        if (self.n - self.r) % 2:
            raise ParityError(f"parity error: n={self.n} and r={self.r} must have the same parity")
        if self.variant == "r2":
            if self.r != 2 or self.n % 2:
                raise ParityError("the r2 ladder needs r=2 and even n")
        elif self.n > self.r and self.gamma <= self.r:
            raise SpectrumError(f"gamma={self.gamma} must exceed r={self.r}")
        return self

    def describe(self) -> dict[str, Any]:
        return self.model_dump(exclude_none=True)


# ─── Receiver windows ─── #


class ReceiverWindow(BaseModel):
    """Probability density p(t) of the reception time around the nominal t₀."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["delta", "box", "gaussian", "tabulated"]
    width: float | None = Field(default=None, gt=0)
    times: tuple[float, ...] = ()
    density_table: tuple[float, ...] = ()

    @model_validator(mode="after")
    def _check_kind(self) -> ReceiverWindow:
        if self.kind in ("box", "gaussian") and self.width is None:
            raise ValueError(f"a {self.kind} window needs a width")
        if self.kind == "delta" and self.width is not None:
            raise ValueError("a delta window has no width")
        if self.kind == "tabulated":
            if len(self.times) < 2 or len(self.times) != len(self.density_table):
                raise ValueError("a tabulated window needs matching times and densities")
            if any(b <= a for a, b in zip(self.times, self.times[1:], strict=False)):
                raise ValueError("tabulated times must be strictly increasing")
            if any(p < 0 for p in self.density_table):
                raise ValueError("tabulated densities must be nonnegative")
        return self

    @classmethod
    def delta(cls) -> ReceiverWindow:
        return cls(kind="delta")

    @classmethod
    def box(cls, width: float) -> ReceiverWindow:
        return cls(kind="box", width=width)

    @classmethod
    def gaussian(cls, sigma: float) -> ReceiverWindow:
        return cls(kind="gaussian", width=sigma)

    def support(self) -> tuple[float, float]:
        """Offsets (relative to t₀) outside which p vanishes."""
        if self.kind == "delta":
            return 0.0, 0.0
        if self.kind == "box":
            return -self.width / 2, self.width / 2
        if self.kind == "gaussian":
            cut = settings.GAUSSIAN_TRUNCATION * self.width
            return -cut, cut
        return self.times[0], self.times[-1]

    def density(self, offset: np.ndarray | float) -> np.ndarray:
        """Normalised p evaluated at offsets t − t₀ (not defined for delta)."""
        x = np.asarray(offset, dtype=float)
        lo, hi = self.support()
        inside = (x >= lo) & (x <= hi)
        if self.kind == "box":
            return np.where(inside, 1.0 / self.width, 0.0)
        if self.kind == "gaussian":
            from scipy.special import erf

            sigma = self.width
            cut = settings.GAUSSIAN_TRUNCATION
            norm = sigma * math.sqrt(2 * math.pi) * erf(cut / math.sqrt(2))
            return np.where(inside, np.exp(-0.5 * (x / sigma) ** 2) / norm, 0.0)
        if self.kind == "tabulated":
            from scipy.integrate import trapezoid

            table = np.asarray(self.density_table)
            total = trapezoid(table, np.asarray(self.times))
            return np.where(inside, np.interp(x, self.times, table) / total, 0.0)
        raise ValueError("a delta window has no density")


# ─── Sweep / ensemble records ─── #


class TradeoffPoint(BaseModel):
    """One γ of a transfer-time versus first-coupling trade-off sweep (unit max coupling)."""

    gamma: float
    t0: float
    j1: float
    j1_t0: float

    @model_validator(mode="after")
    def _check_product(self) -> TradeoffPoint:
        if abs(self.j1_t0 - self.j1 * self.t0) > 1e-12 * max(1.0, abs(self.j1_t0)):
            raise ValueError("j1_t0 must equal j1 * t0")
        return self

    @classmethod
    def build(cls, gamma: float, t0: float, j1: float) -> TradeoffPoint:
        return cls(gamma=gamma, t0=t0, j1=j1, j1_t0=j1 * t0)


class PerturbationReport(BaseModel):
    """Quantiles of 1 − √F_e(t₀) over a seeded coupling-disorder ensemble."""

    chain_label: str = ""
    delta: float = Field(ge=0)
    samples: int = Field(ge=1)
    seed: int
    q25: float
    q50: float
    q75: float
    mean: float
    stderr: float
    resampled: int = 0
    region: tuple[int, int]

    @model_validator(mode="after")
    def _check_quantiles(self) -> PerturbationReport:
        if not (self.q25 <= self.q50 <= self.q75):
            raise ValueError("quantiles must be weakly increasing")
        for value in (self.q25, self.q50, self.q75, self.mean):
            if not 0.0 <= value <= 1.0:
                raise ValueError("1 - sqrt(F_e) values must lie in [0, 1]")
        return self

    @property
    def quantiles(self) -> dict[float, float]:
        return {0.25: self.q25, 0.5: self.q50, 0.75: self.q75}


# ─── Files ─── #


class ChainFile(BaseModel):
    """On-disk JSON form of a ChainSpec."""

    format_version: int = FORMAT_VERSION
    n: int
    couplings: list[float]
    diagonal: list[float]
    label: str = ""
    provenance: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_chain(cls, chain: ChainSpec) -> ChainFile:
        return cls(
            n=chain.n,
            couplings=list(chain.couplings),
            diagonal=list(chain.diagonal),
            label=chain.label,
            provenance=dict(chain.provenance),
        )

    def to_chain(self) -> ChainSpec:
        return ChainSpec(
            n=self.n,
            couplings=tuple(self.couplings),
            diagonal=tuple(self.diagonal),
            label=self.label,
            provenance=self.provenance,
        )


class SpectrumFile(BaseModel):
    """On-disk JSON form of a Spectrum."""

    format_version: int = FORMAT_VERSION
    values: list[float]
    base_gap: float | None = None
    label: str = ""
