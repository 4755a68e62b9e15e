# wiener_lab/errors.py

from typing import List, Optional


class ParameterError(ValueError):
    """A numeric parameter is outside its admissible range."""


class InputError(ValueError):
    """An input sequence is malformed (ordering, lengths, codeword format)."""


class NumericalError(RuntimeError):
    """A numerical routine failed: bracketing, divergence, grid overflow."""


class SimulationError(RuntimeError):
    """One or more Monte Carlo replications failed."""

    def __init__(self, message: str, failed: Optional[List[int]] = None):
        super().__init__(message)
        self.failed = list(failed or [])


__all__ = ["ParameterError", "InputError", "NumericalError", "SimulationError"]
