"""
The representation ``Tx = Σ ξₙ(x) Txₙ``: reconstruction, truncation errors, the dual
representation ``T'g = Σ (T'g)(xₙ) ξₙ`` and the comparison with the singular value decomposition.

.. code-block:: python3

    D = run_deflation(T)
    reconstruct(D, T, D.rank, x)  # equals T.apply(x)
    truncation_error(D, T, 1).error  # ‖T S_2 - T‖

"""
import logging
import typing

import numpy as np
from scipy import linalg

from banachsvd import config as md_config
from banachsvd.exc import IndexRangeError, UnsupportedOracleError
from banachsvd.operators import dense as md_dense
from banachsvd.operators import power as md_power
from banachsvd.spaces import norms as md_norms

logger = logging.getLogger(__name__)

#: The absolute slack allowed in the truncation bounds, relative to ``max(1, ‖T‖)``.
BOUND_SLACK = 1e-6


def _check_m(D: 'Decomposition', m: int):
    if not 0 <= m <= D.rank:
        raise IndexRangeError("Truncation index {} outside 0..{}".format(m, D.rank))


def reconstruct(D: 'Decomposition', T: 'md_dense.DenseOperator', m: int,
                x: 'md_norms.Vector') -> 'md_norms.Vector':
    """
    Computes ``Σ_{n<=m} ξₙ(x) Txₙ``.
    """
    _check_m(D, m)
    entries = np.zeros(T.target.d, dtype=complex if T.is_complex or x.is_complex else float)
    for functional, vector in zip(D.xi[:m], D.xs[:m]):
        entries = entries + functional(x) * T.apply(vector).entries

    return md_norms.Vector(entries, T.target)


class TruncationResult(object):
    """
    The error of the ``m``-term truncation and the bound it must satisfy.
    """
    __slots__ = ("m", "error", "bound", "s_hat_norm", "tail_norm", "bound_holds")

    def __init__(self, m: int, error: float, bound: float, s_hat_norm: float, tail_norm: float,
                 bound_holds: bool):
        self.m = m
        #: ``‖T S_{m+1} - T‖``.
        self.error = error
        #: ``‖T_{m+1}‖ (‖S_{m+1}‖ + 1)``.
        self.bound = bound
        #: The norm of ``S_{m+1}``, an upper bound of the norm of its quotient map.
        self.s_hat_norm = s_hat_norm
        #: ``‖T_{m+1}‖``, 0 once the rank is exhausted.
        self.tail_norm = tail_norm
        self.bound_holds = bound_holds

    def __repr__(self):
        return "<TruncationResult m={} error={} bound={}>".format(self.m, self.error, self.bound)


def _difference(D: 'Decomposition', T: 'md_dense.DenseOperator', m: int) -> np.ndarray:
    A = np.array(T.entries)
    return A @ D.projection_matrix(m) - A


def truncation_error(D: 'Decomposition', T: 'md_dense.DenseOperator', m: int,
                     cfg: 'md_config.DecompositionConfig' = None) -> TruncationResult:
    """
    Computes ``‖T S_{m+1} - T‖`` and checks it against ``‖T_{m+1}‖ (‖S_{m+1}‖ + 1)``.

    For ℓ² to ℓ² the error is the exact spectral norm; it equals σ_{m+1}.
    """
    cfg = cfg or md_config.DecompositionConfig()
    _check_m(D, m)
    difference = md_dense.DenseOperator(_difference(D, T, m), T.source, T.target)
    error = md_power.operator_norm(difference, cfg)

    tail = D.norms[m] if m < D.rank else 0.0
    if m == 0:
        s_norm = 0.0
    else:
        S = md_dense.DenseOperator(D.projection_matrix(m), T.source, T.source)
        s_norm = md_power.operator_norm(S, cfg)

    bound = tail * (s_norm + 1)
    holds = error <= bound + BOUND_SLACK * max(1.0, D.norms[0] if D.rank else 1.0)
    if not holds:
        logger.warning("Truncation error {} exceeds its bound {} at m={}".format(error, bound, m))

    return TruncationResult(m, error, bound, s_norm, tail, holds)


def dual_truncation_error(D: 'Decomposition', T: 'md_dense.DenseOperator', m: int,
                          cfg: 'md_config.DecompositionConfig' = None) -> float:
    """
    Computes ``‖R_{m+1} T' - T'‖`` as an operator from the dual of the target to the dual of
    the source.
    """
    cfg = cfg or md_config.DecompositionConfig()
    _check_m(D, m)
    difference = md_dense.DenseOperator(_difference(D, T, m).T, T.target.dual(),
                                        T.source.dual())
    return md_power.operator_norm(difference, cfg)


class DualRepresentationResult(object):
    """
    The outcome of :func:`dual_representation_check`.
    """
    __slots__ = ("deviation", "dual_errors", "primal_errors", "bound_holds")

    def __init__(self, deviation: float, dual_errors: typing.List[float],
                 primal_errors: typing.List[float], bound_holds: bool):
        #: ``‖T'g - Σ (T'g)(xₙ) ξₙ‖*``.
        self.deviation = deviation
        #: ``‖R_{n+1} T' - T'‖`` for ``n = 0, …, r``.
        self.dual_errors = dual_errors
        #: ``‖T S_{n+1} - T‖`` for ``n = 0, …, r``.
        self.primal_errors = primal_errors
        #: Whether every dual error is at most the primal one.
        self.bound_holds = bound_holds


def dual_representation_check(D: 'Decomposition', T: 'md_dense.DenseOperator',
                              g: 'md_norms.Functional', m: int = None,
                              cfg: 'md_config.DecompositionConfig' = None, *,
                              check_bounds: bool = True) -> DualRepresentationResult:
    """
    Measures how well ``Σ_{n<=m} (T'g)(xₙ) ξₙ`` represents ``T'g``.

    :param g: A functional on the target.
    :param m: The number of terms; the whole decomposition by default.
    :param check_bounds: Also compare ``‖R_{n+1} T' - T'‖`` with ``‖T S_{n+1} - T‖`` for every n.
    """
    cfg = cfg or md_config.DecompositionConfig()
    m = D.rank if m is None else m
    _check_m(D, m)
    image = T.adjoint_apply(g)
    deviation = (image - D.R(m, image)).norm()

    dual_errors, primal_errors = [], []
    holds = True
    if check_bounds:
        slack = BOUND_SLACK * max(1.0, D.norms[0] if D.rank else 1.0)
        for n in range(D.rank + 1):
            dual_errors.append(dual_truncation_error(D, T, n, cfg))
            primal_errors.append(truncation_error(D, T, n, cfg).error)
            holds = holds and dual_errors[-1] <= primal_errors[-1] + slack

    return DualRepresentationResult(deviation, dual_errors, primal_errors, holds)


class SVDComparison(object):
    """
    The agreement between a decomposition and the singular value decomposition.
    """
    __slots__ = ("singular_values", "norms", "max_value_error", "max_angle", "matched")

    def __init__(self, singular_values, norms, max_value_error, max_angle, matched):
        #: The singular values, descending.
        self.singular_values = singular_values
        #: The deflation norms.
        self.norms = norms
        #: The largest ``|‖T_j‖ - σ_j|``.
        self.max_value_error = max_value_error
        #: The largest principal angle between matching (clusters of) singular vectors.
        self.max_angle = max_angle
        self.matched = matched

    def __repr__(self):
        return "<SVDComparison value_error={:.2e} angle={:.2e} matched={}>".format(
            self.max_value_error, self.max_angle, self.matched)


def _clusters(values: np.ndarray, tol: float) -> typing.List[typing.List[int]]:
    clusters = []
    for i, value in enumerate(values):
        if clusters and abs(values[clusters[-1][-1]] - value) <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    return clusters


def compare_svd(D: 'Decomposition', T: 'md_dense.DenseOperator',
                tol: float = 1e-7) -> SVDComparison:
    """
    Compares the deflation of an ℓ² to ℓ² operator with its singular value decomposition.

    Values are matched in order; vectors are matched cluster by cluster through the principal
    angles between the spans, since singular vectors of repeated values are not unique.

    :raises UnsupportedOracleError: Unless both norms are ℓ².
    """
    if not (T.source.is_euclidean and T.target.is_euclidean):
        raise UnsupportedOracleError("SVD comparison needs l2 norms on both sides")

    _, sigma, vh = linalg.svd(np.array(T.entries))
    scale = max(float(sigma[0]), 1.0) if sigma.size else 1.0
    count = min(D.rank, sigma.size)
    norms = np.array(D.norms)

    value_errors = np.abs(norms[:count] - sigma[:count])
    # singular values the deflation did not reach must be negligible
    missed = sigma[count:]
    max_value_error = float(max(value_errors.max(initial=0.0), missed.max(initial=0.0)))

    v = vh.conj().T
    xs = np.array([x.entries for x in D.xs[:count]]).T.reshape(T.source.d, count)
    max_angle = 0.0
    for cluster in _clusters(sigma[:count], tol * scale):
        angles = linalg.subspace_angles(v[:, cluster], xs[:, cluster])
        max_angle = max(max_angle, float(np.max(angles)))

    matched = max_value_error <= tol * scale and max_angle <= 1e-3
    if not matched:
        logger.warning("Deflation disagrees with the SVD: value error {:.2e}, angle {:.2e}"
                       .format(max_value_error, max_angle))

    return SVDComparison(sigma, list(norms), max_value_error, max_angle, matched)
