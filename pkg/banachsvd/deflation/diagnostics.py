"""
Diagnostics of a decomposition.

These measure, on a finished :class:`.Decomposition`, the properties the construction promises:
biorthogonality, the nesting of the functionals, linear independence, boundedness of the
projections ``S_n``, reconstruction, the kernel and the metric projection property.
"""
import logging
import typing

import numpy as np
from scipy import linalg

from banachsvd import config as md_config
from banachsvd.deflation import biorthogonal as md_biorthogonal
from banachsvd.exc import IndexRangeError
from banachsvd.operators import dense as md_dense
from banachsvd.operators import power as md_power
from banachsvd.spaces import minnorm as md_minnorm
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import make_rng, numerical_rank, random_direction

logger = logging.getLogger(__name__)

#: The number of random vectors used for the sampled diagnostics.
SAMPLES = 8


def nesting_errors(D: 'Decomposition', T: 'md_dense.DenseOperator') -> typing.Tuple[float, float]:
    """
    :return: ``max |f_i(x_j)|`` and ``max |g_i(Tx_j)|`` over ``i < j``.
    """
    f_err = g_err = 0.0
    images = [T.apply(x) for x in D.xs]
    for j in range(D.rank):
        for i in range(j):
            f_err = max(f_err, abs(D.fs[i](D.xs[j])))
            g_err = max(g_err, abs(D.gs[i](images[j])))

    return f_err, g_err


def _smallest_normalized_singular(columns: np.ndarray) -> float:
    if columns.shape[1] == 0:
        return 1.0

    scale = np.linalg.norm(columns, axis=0)
    scale[scale == 0] = 1.0
    return float(linalg.svdvals(columns / scale)[-1])


def independence(D: 'Decomposition', T: 'md_dense.DenseOperator') -> typing.Tuple[float, float]:
    """
    :return: The smallest singular values of ``[x_1 … x_r]`` and ``[Tx_1 … Tx_r]`` after
        normalizing their columns.
    """
    xs = np.array([x.entries for x in D.xs]).T.reshape(D.source.d, D.rank)
    images = T.entries @ xs
    return _smallest_normalized_singular(xs), _smallest_normalized_singular(images)


def s_norm_estimates(D: 'Decomposition', cfg: 'md_config.DecompositionConfig' = None) \
        -> typing.List[float]:
    """
    :return: ``‖S_{n+1}‖`` for ``n = 1, …, r``, as operators of the source space.
    """
    estimates = []
    for n in range(1, D.rank + 1):
        S = md_dense.DenseOperator(D.projection_matrix(n), D.source, D.source)
        estimates.append(md_power.operator_norm(S, cfg))

    return estimates


def reconstruction_errors(D: 'Decomposition', T: 'md_dense.DenseOperator',
                          samples: int = SAMPLES, seed: int = 0) -> typing.List[float]:
    """
    :return: ``‖Tx - Σ ξ_n(x) Tx_n‖ / (‖T‖ ‖x‖)`` for random vectors ``x``.
    """
    if not D.rank:
        return []

    rng = make_rng(seed)
    scale = D.norms[0]
    images = [T.apply(x) for x in D.xs]
    errors = []
    for _ in range(samples):
        x = md_norms.Vector(random_direction(rng, D.source.d, T.is_complex), D.source)
        total = T.apply(x).entries.copy()
        for functional, image in zip(D.xi, images):
            total = total - functional(x) * image.entries
        errors.append(D.target.evaluate(total) / (scale * x.norm()))

    return errors


def kernel_check(D: 'Decomposition', T: 'md_dense.DenseOperator') -> typing.Dict[str, float]:
    """
    Compares ``X_{r+1}`` with the kernel of ``T``.

    :return: A record with the kernel dimension found by the deflation, the one from
        :func:`scipy.linalg.null_space`, ``max ‖Tv‖ / (‖T‖ ‖v‖)`` over the kernel basis and
        ``max |f_i(v)|`` over an orthonormal basis of the null space.
    """
    null = linalg.null_space(T.entries)
    scale = D.norms[0] if D.rank else 1.0

    image_max = 0.0
    for i in range(D.kernel_basis.dim):
        v = md_norms.Vector(D.kernel_basis.columns[:, i], D.source)
        image_max = max(image_max, T.apply(v).norm() / (scale * v.norm()))

    annihilation_max = 0.0
    for i in range(null.shape[1]):
        v = md_norms.Vector(null[:, i], D.source)
        for f in D.fs:
            annihilation_max = max(annihilation_max, abs(f(v)))

    return {
        "kernel_dim": D.kernel_basis.dim,
        "expected_dim": null.shape[1],
        "image_max": image_max,
        "annihilation_max": annihilation_max,
    }


def metric_projection_check(D: 'Decomposition', x: 'md_norms.Vector', n: int,
                            cfg: 'md_config.DecompositionConfig' = None) -> float:
    """
    Measures ``| |ξ_n(x)| - dist(x - S_n x, X_{n+1}) |``.

    ``x - S_{n+1} x`` is a best approximation of ``x - S_n x`` from ``X_{n+1}`` and the two differ
    by ``ξ_n(x) x_n``, so the measured value is 0 up to solver accuracy.

    :param n: The 1-based index, ``1 <= n <= rank``.
    """
    cfg = cfg or md_config.DecompositionConfig()
    if not 1 <= n <= D.rank:
        raise IndexRangeError("Metric projection index {} outside 1..{}".format(n, D.rank))

    residual = x - D.S(n - 1, x)
    distance, _ = md_minnorm.dist_to_subspace(residual, D.subspace(n), cfg=cfg.solver)
    return abs(abs(D.xi[n - 1](x)) - distance)


def compute_diagnostics(D: 'Decomposition', T: 'md_dense.DenseOperator',
                        cfg: 'md_config.DecompositionConfig' = None) -> typing.Dict[str, typing.Any]:
    """
    Builds the diagnostics record stored with a decomposition.
    """
    cfg = cfg or md_config.DecompositionConfig()
    f_err, g_err = nesting_errors(D, T)
    x_indep, tx_indep = independence(D, T)
    s_norms = s_norm_estimates(D, cfg)
    record = {
        "biortho_max_err": md_biorthogonal.biorthogonality_error(D.xi, D.xs),
        "nesting_f_max_err": f_err,
        "nesting_g_max_err": g_err,
        "norm_sequence": D.norms,
        "S_norm_estimates": s_norms,
        "S_sup": max(s_norms, default=0.0),
        "reconstruction_errors": reconstruction_errors(D, T, seed=cfg.seed),
        "independence": [x_indep, tx_indep],
        "kernel_dim": D.kernel_basis.dim,
        "rank_oracle": numerical_rank(np.array(T.entries), cfg.rank_tol),
    }
    logger.debug("Diagnostics: biorthogonality {:.2e}, nesting {:.2e}/{:.2e}, sup S {}".format(
        record["biortho_max_err"], f_err, g_err, record["S_sup"]))
    return record
