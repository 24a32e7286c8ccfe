class HarnessError(Exception):
    """Base class for tournament and experiment errors."""


class InsufficientPositions(HarnessError, ValueError):
    pass


class InvalidOpening(HarnessError, ValueError):
    pass


class PolicyFault(HarnessError, RuntimeError):
    """A policy returned an illegal move."""
