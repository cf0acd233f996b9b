"""Exception types shared across the package."""


class PinlockError(Exception):
    """Base class for all pinlock errors."""


class InputError(PinlockError):
    """Malformed, inconsistent, or out-of-contract caller input."""


class NumericalError(PinlockError):
    """An iterative routine failed to converge within its cap."""


class CapacityError(PinlockError):
    """Problem size exceeds a hard enumeration guard."""
