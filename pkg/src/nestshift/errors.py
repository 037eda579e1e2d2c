"""Shared exception types."""
from __future__ import annotations


class NestshiftError(Exception):
    """Base class for package-specific failures."""


class ConfigError(NestshiftError):
    """Invalid run configuration.

    Carries the full list of problems so a bad file is reported in one shot.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DataError(NestshiftError):
    """Malformed dataset file; collects per-line diagnostics."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SearchBudgetExhausted(NestshiftError):
    """The constrained search ran out of its global try budget."""

    def __init__(self, threshold: float, tries: int):
        self.threshold = threshold
        self.tries = tries
        super().__init__(
            f"no replacement above logL={threshold:.6g} after {tries} tries"
        )
