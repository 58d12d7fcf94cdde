"""Exception hierarchy shared by the whole package.

The CLI maps these onto exit codes: InputError (and subclasses) -> 2,
CapabilityError -> 3, ApplicabilityError -> 4.
"""


class RelmarginError(Exception):
    """Base class for all package errors."""


class InputError(RelmarginError, ValueError):
    """Invalid argument, malformed config, or inconsistent inputs."""


class DataError(InputError):
    """Data-dependent failure (non-finite losses, out-of-range entries)."""


class DomainError(InputError):
    """A closed-form formula was evaluated outside its stated domain."""


class CapabilityError(RelmarginError):
    """Request exceeds a documented size cap (exact enumeration limits)."""


class ApplicabilityError(RelmarginError):
    """Bound is outside its applicable regime (reported, never silently clamped)."""
