"""Custom exception classes for pstlab.

Every error carries the process exit code the CLI reports for it:
2 for invalid input, 3 for numerical failure.
"""

from __future__ import annotations

EXIT_INVALID_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3


class PstLabError(Exception):
    """Base exception for pstlab."""

    exit_code: int = EXIT_INVALID_INPUT

    def __init__(self, detail: str) -> None:
        self.detail = detail
        super().__init__(detail)


# ─── Invalid input (exit 2) ─── #


class InvalidInput(PstLabError):
    """Raised when arguments violate an operation's preconditions."""

    exit_code = EXIT_INVALID_INPUT


class ParityError(InvalidInput):
    """Raised when chain length, retained count or γ have the wrong parity."""


class SpectrumError(InvalidInput):
    """Raised when a spectrum is not usable for the requested construction."""


class RegionError(InvalidInput):
    """Raised when encoding regions or perturbation ranges are malformed."""


class NoArrivalPlateau(InvalidInput):
    """Raised when F_e(t0) is already below the requested threshold."""

    def __init__(self, fe_at_t0: float, threshold: float) -> None:
        self.fe_at_t0 = fe_at_t0
        self.threshold = threshold
        super().__init__(
            f"no arrival plateau: F_e(t0)={fe_at_t0:.12g} is below threshold {threshold:.12g}"
        )


class ChainFileError(InvalidInput):
    """Raised when a chain, spectrum or trace file cannot be parsed."""

    def __init__(self, detail: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})" if column is not None else f" (line {line})"
        super().__init__(f"{detail}{where}")


# ─── Numerical failure (exit 3) ─── #


class NumericalFailure(PstLabError):
    """Raised when a numerical routine cannot meet its accuracy contract."""

    exit_code = EXIT_NUMERICAL_FAILURE


class IllConditionedSpectrum(NumericalFailure):
    """Raised when eigenvalues are too close to resolve end weights."""


class LanczosBreakdown(NumericalFailure):
    """Raised when the inverse-eigenvalue Lanczos run loses orthogonality."""

    def __init__(self, step: int, reason: str) -> None:
        self.step = step
        super().__init__(f"numerical failure at Lanczos step {step}: {reason}")


class QuadratureFailure(NumericalFailure):
    """Raised when adaptive quadrature does not converge."""


class DegenerateAfterShift(NumericalFailure):
    """Raised when a spectral shift makes two eigenvalues collide or reorder."""
