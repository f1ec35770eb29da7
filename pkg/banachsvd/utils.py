"""
Miscellaneous utilities used throughout the library.
"""
import typing

import numpy as np


def as_array(values: typing.Any, *, complex_ok: bool = True) -> np.ndarray:
    """
    Converts a sequence of scalars into a float (or complex) numpy array.

    :param values: The values to convert.
    :param complex_ok: If False, complex input with a nonzero imaginary part is rejected.
    :return: A new array, never a view of the input.
    """
    arr = np.array(values)
    if np.iscomplexobj(arr):
        if not complex_ok and np.any(arr.imag != 0):
            raise TypeError("Complex values are not supported here")
        return arr.astype(complex)

    return arr.astype(float)


def frozen(arr: np.ndarray) -> np.ndarray:
    """
    Marks an array read-only and returns it.
    """
    arr.setflags(write=False)
    return arr


def phase(values: np.ndarray) -> np.ndarray:
    """
    Computes the unimodular phase of every entry, with 0 for zero entries.

    For real input this is simply :func:`numpy.sign`.
    """
    if not np.iscomplexobj(values):
        return np.sign(values)

    mags = np.abs(values)
    out = np.zeros_like(values)
    nz = mags > 0
    out[nz] = values[nz] / mags[nz]
    return out


def leading_index(x: np.ndarray, tol: float = 1e-9) -> int:
    """
    Finds the first entry whose magnitude is not negligible relative to the largest one.

    :return: The index, or -1 for the zero vector.
    """
    mags = np.abs(x)
    top = mags.max(initial=0.0)
    if top == 0:
        return -1

    return int(np.flatnonzero(mags > tol * top)[0])


def sign_normalize(x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """
    Multiplies a vector by a unimodular scalar so that its first non-negligible entry is real and
    positive.
    """
    idx = leading_index(x, tol)
    if idx < 0:
        return x.copy()

    lead = x[idx]
    return x * (np.conj(lead) / abs(lead))


def tie_key(x: np.ndarray) -> tuple:
    """
    The ordering key used to break ties between equally good maximizers.

    The smallest key belongs to the vector whose leading coordinates are largest, which puts mass
    on the lowest index first.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return tuple(v for pair in zip(-x.real, -x.imag) for v in pair)

    return tuple(-x)


def numerical_rank(matrix: np.ndarray, tol: float = 1e-10) -> int:
    """
    Computes the numerical rank of a matrix, relative to its largest singular value.
    """
    if matrix.size == 0:
        return 0

    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0:
        return 0

    return int(np.count_nonzero(s > tol * s[0]))


def make_rng(seed: typing.Union[int, typing.Sequence[int], np.random.Generator, None]) \
        -> np.random.Generator:
    """
    Gets a numpy random generator from a seed (or passes an existing generator through).
    """
    if isinstance(seed, np.random.Generator):
        return seed

    return np.random.default_rng(seed)


def random_direction(rng: np.random.Generator, size: int, is_complex: bool = False) -> np.ndarray:
    """
    Draws a standard gaussian vector (complex gaussian if requested).
    """
    if is_complex:
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)

    return rng.standard_normal(size)
