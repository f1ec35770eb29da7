"""
Reference values of operator norms, for the cases where they can be computed independently of
the power iteration.
"""
import logging
import math

import numpy as np
from scipy import linalg, optimize

from banachsvd.exc import UnsupportedOracleError
from banachsvd.operators import dense as md_dense
from banachsvd.spaces import norms as md_norms

logger = logging.getLogger(__name__)

#: The number of sphere points sampled by the brute force oracle.
GRID_POINTS = 100000


def _is_lp(spec: 'md_norms.NormSpec', p: float) -> bool:
    return spec.kind is md_norms.NormKind.LP and spec.p == p


def _ratio(A: np.ndarray, source: 'md_norms.NormSpec', target: 'md_norms.NormSpec',
           directions: np.ndarray) -> np.ndarray:
    """
    ``‖Ax‖ / ‖x‖`` for every column ``x`` of ``directions``.
    """
    return target.evaluate(A @ directions) / source.evaluate(directions)


def _grid_2d(A, source, target) -> float:
    def directions(theta):
        theta = np.atleast_1d(theta)
        return np.vstack([np.cos(theta), np.sin(theta)])

    # x and -x have the same ratio, half a turn is enough
    thetas = np.linspace(0, math.pi, GRID_POINTS, endpoint=False)
    values = _ratio(A, source, target, directions(thetas))
    best = int(np.argmax(values))
    spacing = math.pi / GRID_POINTS

    polished = optimize.minimize_scalar(
        lambda t: -_ratio(A, source, target, directions(t))[0],
        bounds=(thetas[best] - spacing, thetas[best] + spacing), method="bounded",
        options={"xatol": 1e-12}
    )
    return max(float(values[best]), -float(polished.fun))


def _grid_3d(A, source, target) -> float:
    def directions(angles):
        angles = np.atleast_2d(angles)
        theta, phi = angles[:, 0], angles[:, 1]
        return np.vstack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi),
                          np.cos(theta)])

    # a Fibonacci lattice on the upper hemisphere
    i = np.arange(GRID_POINTS) + 0.5
    theta = np.arccos(1 - i / GRID_POINTS)
    phi = math.pi * (1 + math.sqrt(5)) * i
    grid = np.column_stack([theta, phi])
    values = _ratio(A, source, target, directions(grid))
    best = int(np.argmax(values))

    polished = optimize.minimize(
        lambda angles: -_ratio(A, source, target, directions(angles))[0],
        grid[best], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14}
    )
    return max(float(values[best]), -float(polished.fun))


def has_closed_form(T: 'md_dense.DenseOperator') -> bool:
    """
    True when :func:`op_norm_oracle` is exact without a grid search.
    """
    source, target = T.source, T.target
    if _is_lp(source, 2) and _is_lp(target, 2):
        return True

    return not T.is_complex and (_is_lp(source, 1) or _is_lp(target, math.inf))


def op_norm_oracle(T: 'md_dense.DenseOperator') -> float:
    """
    Computes ``‖T‖`` by a method independent of the power iteration.

    The supported cases, tried in this order:

     - ℓ² to ℓ²: the largest singular value, from the eigenvalues of ``AᴴA``.
     - source ℓ¹: the largest target norm of a column.
     - target ℓ∞: the largest dual source norm of a row.
     - at most 3 source dimensions: a dense sphere grid followed by a local polish (real only).

    :raises UnsupportedOracleError: Outside these cases.
    """
    A = np.array(T.entries)
    source, target = T.source, T.target

    if _is_lp(source, 2) and _is_lp(target, 2):
        return math.sqrt(max(float(linalg.eigvalsh(A.conj().T @ A)[-1]), 0.0))

    if T.is_complex:
        raise UnsupportedOracleError("Complex operators only have the l2 -> l2 oracle")

    if _is_lp(source, 1):
        return float(np.max(target.evaluate(A)))

    if _is_lp(target, math.inf):
        return float(np.max(source.dual().evaluate(A.T)))

    if source.d == 1:
        return float(_ratio(A, source, target, np.ones((1, 1)))[0])

    if source.d == 2:
        logger.debug("Brute force oracle on a 2-dimensional sphere")
        return _grid_2d(A, source, target)

    if source.d == 3:
        logger.debug("Brute force oracle on a 3-dimensional sphere")
        return _grid_3d(A, source, target)

    raise UnsupportedOracleError("No exact oracle for {!r} -> {!r}".format(source, target))
