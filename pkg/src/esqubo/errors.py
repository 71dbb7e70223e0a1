"""Exception types raised by esqubo.

Every error derives from :class:`EsQuboError` (itself a ``ValueError``) so
callers can catch the whole family at once.
"""


class EsQuboError(ValueError):
    pass


# ingestion / windows
class MalformedCSVError(EsQuboError):
    pass


class MissingBenchmarkError(EsQuboError):
    pass


class MissingCellError(EsQuboError):
    pass


class NonFiniteCellError(EsQuboError):
    pass


class DuplicateDateError(EsQuboError):
    pass


class DuplicateAssetError(EsQuboError):
    pass


class DateOrderError(EsQuboError):
    pass


class WindowError(EsQuboError):
    pass


# risk
class EmptySampleError(EsQuboError):
    pass


class DegenerateVolatilityError(EsQuboError):
    pass


class ZeroTargetError(EsQuboError):
    pass


# encoding / qubo / solver
class LengthMismatchError(EsQuboError):
    pass


class WeightRangeError(EsQuboError):
    pass


class DimensionError(EsQuboError):
    pass


class NegativePenaltyError(EsQuboError):
    pass


class ProblemTooLargeError(EsQuboError):
    pass


class UnknownBackendError(EsQuboError):
    pass
