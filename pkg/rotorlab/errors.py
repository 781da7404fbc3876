"""Exceptions and warnings raised by rotorlab.

Every exception carries the offending parameter (or mesh node, or series name)
in ``detail`` so callers and the harness can report it without parsing text.
"""


class RotorlabError(Exception):
    exit_code = 1

    def __init__(self, message, **detail):
        super().__init__(message)
        self.detail = detail


class ConfigError(RotorlabError):
    exit_code = 2


class UsageError(ConfigError):
    """Caller violated an operation's precondition."""


class DataError(RotorlabError):
    exit_code = 2


class NumericalError(RotorlabError):
    exit_code = 3


class DomainError(NumericalError):
    pass


class RangeError(NumericalError):
    pass


class FitError(NumericalError):
    pass


class ProfileError(FitError):
    pass


class DegenerateStateError(NumericalError):
    pass


class PoleError(NumericalError):
    pass


class SingularPotentialError(NumericalError):
    pass


class ExtendedStateError(NumericalError):
    pass


class TruncationError(NumericalError):
    pass


class CapacityError(NumericalError):
    def __init__(self, message, retained_weight, **detail):
        super().__init__(message, retained_weight=retained_weight, **detail)
        self.retained_weight = retained_weight


class ChernUndefinedError(NumericalError):
    pass


class StateError(NumericalError):
    pass


class NoRatchetError(NumericalError):
    pass


class PartialSweepFailure(RotorlabError):
    exit_code = 4


class RotorlabWarning(UserWarning):
    pass


class SpillWarning(RotorlabWarning):
    pass


class GapClosureWarning(RotorlabWarning):
    pass


class AdiabaticityWarning(RotorlabWarning):
    pass


class TruncationWarning(RotorlabWarning):
    pass
