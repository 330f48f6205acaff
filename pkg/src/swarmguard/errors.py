"""Exception hierarchy shared by every swarmguard module."""


class SwarmGuardError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(SwarmGuardError, ValueError):
    pass


class FeasibilityError(SwarmGuardError, ValueError):
    """An action set holds more than one action for some robot."""


class CapacityError(SwarmGuardError):
    """An exhaustive computation would exceed its enumeration cap."""

    def __init__(self, message: str, cap: int, required: int):
        super().__init__(f"{message} (required {required}, cap {cap})")
        self.cap = cap
        self.required = required


class ScenarioFormatError(SwarmGuardError, ValueError):
    """A scenario or log file could not be parsed."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class SchemaVersionError(ScenarioFormatError):
    pass


class InvalidStateError(SwarmGuardError, ValueError):
    """A Kalman state or motion model violates its PSD/finiteness invariants."""
