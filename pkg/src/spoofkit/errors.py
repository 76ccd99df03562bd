"""Exception types raised across the toolkit.

Every error carries an ``exit_code`` used by the command line front end:
1 for usage/configuration problems, 2 for bad or missing data and
3 for numerical failures.
"""


class SpoofkitError(Exception):
    exit_code = 2


class UsageError(SpoofkitError):
    exit_code = 1


class InvalidParams(SpoofkitError, ValueError):
    exit_code = 1


class DataError(SpoofkitError):
    exit_code = 2


class NumericalError(SpoofkitError, ArithmeticError):
    exit_code = 3


# audio
class MalformedContainer(DataError):
    pass


class UnsupportedEncoding(DataError):
    pass


class EmptyAudio(DataError):
    pass


# features
class ClipTooShort(DataError):
    pass


class DegenerateFilter(InvalidParams):
    pass


class KernelTooLong(InvalidParams):
    pass


class InvalidGeometry(InvalidParams):
    pass


# models
class InsufficientData(DataError):
    pass


class DegenerateComponent(NumericalError):
    pass


class DimensionMismatch(DataError):
    pass


class SingleClassData(DataError):
    pass


class NonFiniteInput(DataError):
    pass


class CorruptModel(DataError):
    pass


# metrics
class EmptyScoreSet(DataError):
    pass


class MissingClass(DataError):
    pass


# protocol
class MalformedLine(DataError):
    def __init__(self, lineno, message=""):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if message else f"line {lineno}")


class UnknownKey(MalformedLine):
    pass


class DuplicateUttId(DataError):
    pass


class CorruptCache(DataError):
    pass


class MissingEntry(DataError, KeyError):
    def __init__(self, utt_id):
        self.utt_id = utt_id
        super().__init__(utt_id)

    def __str__(self):
        return f"no cache entry for utterance {self.utt_id!r}"
