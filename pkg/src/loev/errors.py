"""Exceptions shared by the solvers and the command line."""

from __future__ import annotations


class HypothesisViolation(ValueError):
    """A theorem's hypothesis fails on the instance; ``witness`` names a point."""

    def __init__(self, message: str, witness=None, details=None):
        super().__init__(message)
        self.witness = witness
        self.details = details or {}


class LongOrbitError(RuntimeError):
    """The orbit ran out of budget before reaching an empty value."""

    def __init__(self, orbit, outcome):
        super().__init__(
            "long orbit: hypotheses violated or budget too small "
            f"({outcome.steps_taken} steps, length {outcome.accumulated_length!r}, "
            f"limit hit: {outcome.reason})"
        )
        self.orbit = orbit
        self.outcome = outcome
