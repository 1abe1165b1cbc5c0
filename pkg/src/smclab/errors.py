"""Exception hierarchy shared by all smclab modules."""


class SlidingModeError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(SlidingModeError):
    """A state, gradient, or vector has the wrong length for its plant."""


class ParameterError(SlidingModeError):
    """A scalar argument violates its precondition (sign, range, finiteness)."""


class NumericsError(SlidingModeError):
    """An evaluation produced a non-finite or inconsistent numerical result."""


class SingularSurfaceGain(SlidingModeError):
    """|grad(s) . b| fell below the invertibility threshold, so no control exists.

    When raised while a simulation is running, the partial trajectory is
    attached as the ``trajectory`` attribute.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class DivergenceError(SlidingModeError):
    """The closed-loop state left the admissible region (max-norm > 1e12).

    Carries the partial trajectory as the ``trajectory`` attribute.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class DataError(SlidingModeError):
    """A trajectory or report is empty or structurally unusable."""


class NotReachedError(SlidingModeError):
    """Post-reach analysis was requested but the band was never reached."""


class ConfigSyntaxError(SlidingModeError):
    """The configuration file is not valid JSON."""


class ConfigValidationError(SlidingModeError):
    """One or more configuration fields violate their invariants.

    ``failures`` lists every violation as a "field.path: reason" string.
    """

    def __init__(self, failures):
        if isinstance(failures, str):
            failures = [failures]
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))
