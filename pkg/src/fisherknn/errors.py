"""Exception hierarchy. Every error raised on purpose derives from RecognitionError."""


class RecognitionError(Exception):
    pass


# linalg
class ShapeError(RecognitionError, ValueError):
    pass


class NotSymmetricError(RecognitionError, ValueError):
    pass


class ConvergenceError(RecognitionError, ArithmeticError):
    def __init__(self, message: str, off_norm: float):
        super().__init__(message)
        self.off_norm = off_norm


class SingularScatterError(RecognitionError, ArithmeticError):
    pass


# ingestion
class PgmError(RecognitionError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class PgmNotFoundError(PgmError, FileNotFoundError):
    pass


class PgmMagicError(PgmError, ValueError):
    pass


class PgmHeaderError(PgmError, ValueError):
    pass


class PgmMaxvalError(PgmError, ValueError):
    pass


class PgmTruncatedError(PgmError, ValueError):
    pass


class GalleryError(RecognitionError, ValueError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# fitting
class DegenerateDataError(RecognitionError, ValueError):
    pass


class DimensionError(RecognitionError, ValueError):
    """Requested dimension, neighbour count or vector length is out of range."""


# model files
class ModelFormatError(RecognitionError, ValueError):
    pass


class BadMagicError(ModelFormatError):
    pass


class UnsupportedVersionError(ModelFormatError):
    pass


class TruncatedModelError(ModelFormatError):
    def __init__(self, message: str, expected: int, actual: int):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class ModelInvariantError(ModelFormatError):
    pass


class ModelIOError(RecognitionError, OSError):
    pass
