"""
Exceptions for banachsvd.
"""

__all__ = ["DecompositionException", "NormSpecError", "DimensionMismatchError", "ZeroVectorError",
           "InfeasibleSystemError", "ConvergenceError", "DegenerateBasisError",
           "DependentFunctionalsError", "ZeroRestrictionError", "ExtensionError",
           "BiorthogonalityError", "MonotonicityError", "CertificateError", "EigenClassError",
           "UnsupportedOracleError", "SerializationError", "IndexRangeError", "ConfigError"]


class DecompositionException(Exception):
    """
    The base class for ALL exceptions.

    Catch this if you wish to catch any custom exception raised inside the lib.
    """


class NormSpecError(DecompositionException, ValueError):
    """
    Raised when a norm description is invalid (bad exponent, bad split index, bad kind).
    """


class DimensionMismatchError(DecompositionException, ValueError):
    """
    Raised when the lengths or shapes of vectors, functionals and matrices disagree.
    """


class ZeroVectorError(DecompositionException):
    """
    Raised when a duality selection is requested for the zero vector.
    """


class InfeasibleSystemError(DecompositionException):
    """
    Raised when an affine constraint system has no solution.
    """


class ConvergenceError(DecompositionException):
    """
    Raised when an iterative method exhausts its iteration budget.
    """


class DegenerateBasisError(DecompositionException):
    """
    Raised when the columns of a subspace basis are linearly dependent.
    """


class DependentFunctionalsError(DecompositionException):
    """
    Raised when functionals that should be independent are not (or there are too many).
    """


class ZeroRestrictionError(DecompositionException):
    """
    Raised when an operator restricted to a subspace is zero.

    During a deflation this signals that the rank has been exhausted.
    """


class ExtensionError(DecompositionException):
    """
    Raised when a norm-preserving extension misses its constraints or its norm.
    """


class BiorthogonalityError(DecompositionException):
    """
    Raised when the xi functionals fail to be biorthogonal to the deflation vectors.
    """


class MonotonicityError(DecompositionException):
    """
    Raised when the deflation norm sequence increases, which means the optimizer failed.
    """


class CertificateError(DecompositionException):
    """
    Raised when an optimality certificate gap exceeds the abort threshold.
    """


class EigenClassError(DecompositionException):
    """
    Raised when a norm attainer is not an eigenvector, so the operator is outside the eigen class.
    """


class UnsupportedOracleError(DecompositionException):
    """
    Raised when an exact reference computation is requested for a case it does not cover.
    """


class SerializationError(DecompositionException, ValueError):
    """
    Raised when a JSON document cannot be decoded into library objects.
    """


class IndexRangeError(DecompositionException, ValueError):
    """
    Raised when a truncation index is outside the number of computed steps.
    """


class ConfigError(DecompositionException, ValueError):
    """
    Raised when a config value has the wrong type or lies outside its range.
    """
