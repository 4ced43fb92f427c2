"""Exception types shared across the package."""

from __future__ import annotations


class WaveDecayError(Exception):
    """Base class for all package errors."""


class NonAdmissibleState(WaveDecayError):
    """A state left the configured small-total-variation region."""


class NoConvergence(WaveDecayError):
    """The Riemann solver's Newton iteration did not converge."""


class BudgetExceeded(WaveDecayError):
    """Front tracking exceeded its total-variation, front or event caps."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class ScenarioError(WaveDecayError):
    """A scenario file failed to parse or validate."""
