"""Exception taxonomy and process exit codes.

Exit-code contract: 0 success, 2 a substance-backed property check failed,
3 numeric degeneracy (resolution/tolerance trouble), 4 usage error.
"""


class RotorbitError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidArgumentError(RotorbitError):
    """Malformed or out-of-range argument."""

    exit_code = 4


class ConfigError(RotorbitError):
    """Unparseable or invalid run configuration; names the offending key."""

    exit_code = 4


class OutOfRangeError(RotorbitError):
    """A requested target lies outside the computed admissible range."""

    exit_code = 4


class NotMonotoneError(RotorbitError):
    """A fibre map expected to be monotone shows a sampled decrease."""

    exit_code = 2


class PropertyViolationError(RotorbitError):
    """A checked dynamical identity or bound failed beyond tolerance."""

    exit_code = 2


class CertificateFailureError(RotorbitError):
    """An entropy certificate could not be established within its horizon."""

    exit_code = 2


class InconsistentCertificateError(RotorbitError):
    """A certificate failed its own consistency re-check."""

    exit_code = 2


class NumericDegeneracyError(RotorbitError):
    """A computation collapsed in a way valid inputs cannot produce."""

    exit_code = 3


class ContinuationFailureError(RotorbitError):
    """Curve continuation jumped more than half a period between grid points."""

    exit_code = 3


class DepthInsufficientError(RotorbitError):
    """Orbit coincidence broke down; survivor depth too small for the orbit length."""

    exit_code = 3
