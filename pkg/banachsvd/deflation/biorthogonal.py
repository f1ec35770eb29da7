"""
The biorthogonal functionals ξₙ and the projections built from them.

Given unit vectors ``x_1, x_2, …`` and functionals ``f_1, f_2, …`` with ``f_i(x_i) = 1`` and
``f_i(x_j) = 0`` for ``i < j``, the recursion

.. code-block:: text

    ξ_1 = f_1
    ξ_{n+1} = f_{n+1} - Σ_{j<=n} f_{n+1}(x_j) ξ_j

gives ``ξ_i(x_j) = δ_ij``. Then ``S_{n+1} x = Σ_{j<=n} ξ_j(x) x_j`` is a projection onto
``lin{x_1, …, x_n}`` whose kernel is the annihilator of ``f_1, …, f_n``, and
``R_{n+1} f = Σ_{i<=n} f(x_i) ξ_i`` is its dual.
"""
import logging
import typing

import numpy as np

from banachsvd.exc import BiorthogonalityError, DimensionMismatchError, IndexRangeError
from banachsvd.spaces import norms as md_norms

logger = logging.getLogger(__name__)


def _check_n(n: int, count: int):
    if not 0 <= n <= count:
        raise IndexRangeError("Projection index {} outside 0..{}".format(n, count))


def _stack(elements: typing.Sequence['md_norms._Element'], d: int) -> np.ndarray:
    if not elements:
        return np.zeros((0, d))

    return np.array([e.entries for e in elements])


def biorthogonality_error(xi: typing.Sequence['md_norms.Functional'],
                          xs: typing.Sequence['md_norms.Vector']) -> float:
    """
    Computes ``max |ξ_i(x_j) - δ_ij|``.
    """
    if not xi:
        return 0.0

    d = xs[0].space.d
    gram = _stack(xi, d) @ _stack(xs, d).T
    return float(np.abs(gram - np.eye(len(xi))).max())


def xi_recursion(fs: typing.Sequence['md_norms.Functional'],
                 xs: typing.Sequence['md_norms.Vector'],
                 tol: float = 1e-9) -> typing.List['md_norms.Functional']:
    """
    Computes the functionals ξₙ from the nested pairs ``(f_n, x_n)``.

    :param fs: The functionals, with ``f_i(x_i) = 1`` and ``f_i(x_j) = 0`` for ``i < j``.
    :param xs: The vectors.
    :param tol: ``ξ_i(x_j)`` may deviate from ``δ_ij`` by at most ``100 tol``.
    :return: The list ``[ξ_1, …, ξ_r]``.
    """
    if len(fs) != len(xs):
        raise DimensionMismatchError("{} functionals for {} vectors".format(len(fs), len(xs)))

    xi = []
    for f in fs:
        entries = np.array(f.entries)
        for x, previous in zip(xs, xi):
            entries = entries - f(x) * previous.entries
        xi.append(md_norms.Functional(entries, f.space))

    error = biorthogonality_error(xi, xs)
    logger.debug("Biorthogonality error of {} functionals: {:.3e}".format(len(xi), error))
    if error > 100 * tol:
        raise BiorthogonalityError("max |ξ_i(x_j) - δ_ij| = {:.3e} exceeds {:.3e}"
                                   .format(error, 100 * tol))

    return xi


def projection_matrix(xi: typing.Sequence['md_norms.Functional'],
                      xs: typing.Sequence['md_norms.Vector'], n: int,
                      d: int = None) -> np.ndarray:
    """
    The matrix of ``S_{n+1} = Σ_{j<=n} x_j ⊗ ξ_j``.

    :param d: The dimension, needed only when the sequences are empty.
    """
    _check_n(n, len(xi))
    d = xs[0].space.d if xs else d
    if n == 0:
        return np.zeros((d, d))

    return _stack(xs[:n], d).T @ _stack(xi[:n], d)


def dual_projection_matrix(xi: typing.Sequence['md_norms.Functional'],
                           xs: typing.Sequence['md_norms.Vector'], n: int,
                           d: int = None) -> np.ndarray:
    """
    The matrix of ``R_{n+1}`` acting on functional coordinates; the transpose of ``S_{n+1}``.
    """
    return projection_matrix(xi, xs, n, d).T


def projection_S(xi: typing.Sequence['md_norms.Functional'],
                 xs: typing.Sequence['md_norms.Vector'], n: int,
                 x: 'md_norms.Vector') -> 'md_norms.Vector':
    """
    Computes ``S_{n+1} x = Σ_{j<=n} ξ_j(x) x_j``; ``S_1 = 0``.
    """
    _check_n(n, len(xi))
    entries = np.zeros(x.space.d, dtype=complex if x.is_complex else float)
    for functional, vector in zip(xi[:n], xs[:n]):
        entries = entries + functional(x) * vector.entries

    return md_norms.Vector(entries, x.space)


def dual_projection_R(xi: typing.Sequence['md_norms.Functional'],
                      xs: typing.Sequence['md_norms.Vector'], n: int,
                      f: 'md_norms.Functional') -> 'md_norms.Functional':
    """
    Computes ``R_{n+1} f = Σ_{i<=n} f(x_i) ξ_i``; ``R_1 = 0``.
    """
    _check_n(n, len(xi))
    entries = np.zeros(f.space.d, dtype=complex if f.is_complex else float)
    for functional, vector in zip(xi[:n], xs[:n]):
        entries = entries + f(vector) * functional.entries

    return md_norms.Functional(entries, f.space)
