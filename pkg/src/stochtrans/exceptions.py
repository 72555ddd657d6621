"""Exception types raised by the package."""


class StochTransError(ValueError):
    """Base class for all validation and precondition errors."""


class NotSquareError(StochTransError):
    pass


class EntryOutOfRangeError(StochTransError):
    def __init__(self, i, j, value):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"entry ({i + 1},{j + 1}) = {value!r} lies outside [0, 1]")


class SkewViolationError(StochTransError):
    def __init__(self, i, j, value, mirror):
        self.i, self.j = i, j
        super().__init__(
            f"entry ({i + 1},{j + 1}) = {value!r} but 1 - entry ({j + 1},{i + 1}) = {1 - mirror!r}"
        )


class DiagonalNotHalfError(StochTransError):
    def __init__(self, i, value):
        self.i = i
        super().__init__(f"diagonal entry ({i + 1},{i + 1}) = {value!r}, expected 0.5")


class SizeMismatchError(StochTransError):
    pass


class InvalidPermutationError(StochTransError):
    pass


class InvalidWeightVectorError(StochTransError):
    pass


class LevelOutOfRangeError(StochTransError):
    pass


class NotDivisibleByError(StochTransError):
    pass


class ProbabilitiesDoNotSumToOneError(StochTransError):
    pass


class UnknownFixtureError(StochTransError, KeyError):
    pass


class PObsOutOfRangeError(StochTransError):
    pass


class ModeMismatchError(StochTransError):
    pass


class SOutOfRangeError(StochTransError):
    pass


class NTooSmallError(StochTransError):
    pass


class NTooLargeForBruteForceError(StochTransError):
    pass


class NoObservationsError(StochTransError):
    pass


class EpsOutOfRangeError(StochTransError):
    pass
