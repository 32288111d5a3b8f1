"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ElBacktestError(Exception):
    """Base class for all package errors."""


class LedgerError(ElBacktestError, ValueError):
    """Input data does not describe a valid snapshot or period ledger."""


class DuplicateAccount(LedgerError):
    pass


class FieldOutOfRange(LedgerError):
    pass


class MissingDefaultDate(LedgerError):
    pass


class InconsistentDates(LedgerError):
    pass


class InconsistentEvents(LedgerError):
    pass


class NonMonotoneDates(LedgerError):
    pass


class ZeroExposure(ElBacktestError, ZeroDivisionError):
    """A ratio was requested over an empty exposure base."""


class MissingAtDefaultData(ElBacktestError):
    """A new default lacks the at-default EAD/LGD needed for the delta split."""


class UnknownDimension(ElBacktestError, KeyError):
    def __init__(self, dimension: str):
        super().__init__(dimension)
        self.dimension = dimension

    def __str__(self) -> str:
        return f"unknown segment dimension {self.dimension!r}"


class ConfigInvalid(ElBacktestError, ValueError):
    pass


class IdentityBreach(ElBacktestError):
    """Two routes to the same quantity disagree beyond tolerance."""

    def __init__(self, name: str, lhs: float, rhs: float, tol: float, scale: float):
        self.name = name
        self.lhs = lhs
        self.rhs = rhs
        self.tol = tol
        self.scale = scale
        super().__init__(
            f"{name}: {lhs!r} != {rhs!r} (|diff|={abs(lhs - rhs):.3e}, "
            f"allowed {tol:.1e} x {scale:.6g})"
        )


def check_identity(name: str, lhs: float, rhs: float, *, scale: float = 0.0,
                   tol: float = 1e-9) -> None:
    """Raise IdentityBreach unless ``lhs`` and ``rhs`` agree relative to ``scale``.

    ``scale`` is the gross magnitude of the terms entering the identity; the
    larger of it, ``|lhs|``, ``|rhs|`` and 1.0 is used so that identities
    whose net value is near zero are still judged against their inputs.
    """
    bound = tol * max(abs(scale), abs(lhs), abs(rhs), 1.0)
    if not abs(lhs - rhs) <= bound:
        raise IdentityBreach(name, lhs, rhs, tol, max(abs(scale), abs(lhs), abs(rhs), 1.0))
