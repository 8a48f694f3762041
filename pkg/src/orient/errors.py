"""Exception hierarchy.

Everything raised on purpose derives from :class:`OrientError`. Input
problems are also ``ValueError`` subclasses and numerical failures are
``ArithmeticError`` subclasses, so callers can catch them without importing
this module.
"""


class OrientError(Exception):
    pass


class InputError(OrientError, ValueError):
    """Bad file contents, bad arguments or unusable data."""


class NumericalError(OrientError, ArithmeticError):
    """A decomposition or solve that could not produce a trustworthy result."""


class EmbeddingFormatError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class MalformedLine(EmbeddingFormatError):
    pass


class MalformedFloat(EmbeddingFormatError):
    pass


class NonFiniteValue(EmbeddingFormatError):
    pass


class InconsistentDimension(EmbeddingFormatError):
    pass


class DuplicateToken(EmbeddingFormatError):
    def __init__(self, token, line=None):
        self.token = token
        super().__init__(f"duplicate token {token!r}", line=line)


class InvalidToken(InputError):
    pass


class EmptyIntersection(InputError):
    pass


class DimMismatch(InputError):
    pass


class OutOfRange(InputError, IndexError):
    pass


class EmptyEvaluation(InputError):
    """Nothing left to score after skipping out-of-vocabulary items."""


class IllConditioned(NumericalError):
    """SVD did not converge within the sweep cap."""


class SingularNormalMatrix(NumericalError):
    pass
