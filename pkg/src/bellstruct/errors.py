"""Exception hierarchy shared by the library and the command line."""


class BellStructError(Exception):
    pass


class InputError(BellStructError, ValueError):
    """Malformed or out-of-range input (bad shapes, unsupported d, bad JSON)."""


class InvalidInequalityError(BellStructError, ValueError):
    """Coefficients do not describe a real-valued Bell functional."""


class InvariantViolation(BellStructError, RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class AppendixBoundViolation(InvariantViolation):
    """A sampled SLK Bell operator exceeded the proven quantum bound d - 1."""
