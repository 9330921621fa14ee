"""Shared exception types.

The CLI maps these onto exit codes: DomainError -> 1, usage errors -> 2
(argparse native), CapacityError -> 3.
"""

from __future__ import annotations


class QtransitError(Exception):
    """Base class for package errors."""


class CapacityError(QtransitError):
    """Problem exceeds a documented size cap (enumeration, SDP dimensions)."""


class DomainError(QtransitError):
    """Input is well-formed but outside the mathematical domain of the call."""


class SignalingError(DomainError):
    """A correlation violates no-signaling beyond tolerance."""


class IncompatibleMarginalsError(DomainError):
    """No joint state reproduces the requested marginals.

    Carries the infeasibility certificate produced by the solver so the
    refusal is checkable.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class SolverFailure(QtransitError):
    """The numerical backend returned neither a solution nor a certificate."""
