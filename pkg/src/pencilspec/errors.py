"""Exception hierarchy; ``exit_code`` is what the command-line tool returns."""
from __future__ import annotations

from .integrators import BracketError, IntegrationOverflow  # noqa: F401  (re-export)


class PencilSpecError(Exception):
    exit_code = 1


class InputError(PencilSpecError):
    """Malformed or unreadable input file."""
    exit_code = 2


class NotHyperbolic(PencilSpecError):
    """The pencil T1(p, r) is not hyperbolic: no real point where it is negative."""
    exit_code = 3


class NotInSD(PencilSpecError):
    """Spectral data violate a condition of the admissible class."""
    exit_code = 4

    def __init__(self, condition: str, detail: str = "", index: int | None = None):
        self.condition = condition
        self.index = index
        msg = f"not admissible ({condition}"
        if index is not None:
            msg += f", k={index}"
        msg += ")"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NonConvergence(PencilSpecError):
    exit_code = 5

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"fit did not converge after {iterations} iterations (rms residual {residual:.3e})")


class QuantizationError(PencilSpecError):
    """Gauge angle at x=1 is not a multiple of pi: the gauge would break isospectrality."""
    exit_code = 6

    def __init__(self, defect: float, threshold: float):
        self.defect = defect
        self.threshold = threshold
        super().__init__(f"gauge angle quantization defect {defect:.3e} exceeds {threshold:.1e}")


class RoundTripFailure(PencilSpecError):
    exit_code = 7
