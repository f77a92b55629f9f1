"""Domain errors.

Every error carries a distinct process exit code so the CLI can map
failures to documented statuses without a lookup table elsewhere.
"""

from __future__ import annotations


class DualismError(Exception):
    """Base class for all domain errors raised by this package."""

    exit_code = 1

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__class__.__name__)
        self.details = details

    def to_dict(self) -> dict:
        out = {"error": type(self).__name__, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


class ConfigError(DualismError):
    exit_code = 2


class InvalidState(DualismError):
    exit_code = 3


class ZeroState(DualismError):
    exit_code = 10


class ExclusionViolation(DualismError):
    exit_code = 11


class StatisticsMismatch(DualismError):
    exit_code = 12


class NotEprForm(DualismError):
    exit_code = 13


class SpeciesSuperpositionForbidden(DualismError):
    """A B-labeled rewrite of a two-species state would put two species in one slot."""

    exit_code = 14


class SettingsNotInPlane(DualismError):
    exit_code = 15


class InsufficientShots(DualismError):
    exit_code = 16


class OracleDisagreement(DualismError):
    """Two independent evaluation routes returned different answers."""

    exit_code = 17


ALL_ERRORS = (
    ConfigError,
    InvalidState,
    ZeroState,
    ExclusionViolation,
    StatisticsMismatch,
    NotEprForm,
    SpeciesSuperpositionForbidden,
    SettingsNotInPlane,
    InsufficientShots,
    OracleDisagreement,
)
