"""
Operator norms by generalized power iteration.

One run alternates ``x -> g = J(Tx) -> φ = T'g -> x' = argmax φ`` over the unit ball of the
(sub)space, which never decreases ``‖Tx‖``. The run stops once both the value and the iterate
settle. Runs start from the basis directions, from the maximizers of the transposed target
coordinate functionals (which makes target ℓ∞ exact, as the basis starts make source ℓ¹ exact),
and from random points; the best result wins. Between Euclidean spaces the winner is projected
onto the leading right singular subspace of the restriction.

.. code-block:: python3

    T = DenseOperator([[3, 0], [0, 1]], NormSpec.lp(2, 2), NormSpec.lp(2, 2))
    result = op_norm_power(T)
    result.value  # 3.0
    result.maximizer.entries  # array([1., 0.])

"""
import concurrent.futures
import logging
import math
import typing

import numpy as np
from scipy import linalg

from banachsvd import config as md_config
from banachsvd.exc import ConvergenceError, InfeasibleSystemError, ZeroRestrictionError
from banachsvd.operators import dense as md_dense
from banachsvd.operators import oracle as md_oracle
from banachsvd.spaces import duality as md_duality
from banachsvd.spaces import minnorm as md_minnorm
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import make_rng, random_direction, sign_normalize, tie_key

logger = logging.getLogger(__name__)

# consecutive iterations without value progress after which a run counts as settled
_PATIENCE = 5

# cap of the estimated contraction ratio of ℓ² runs
_MAX_RATIO = 0.999


class NormAttainResult(object):
    """
    The outcome of :func:`op_norm_power`.
    """
    __slots__ = ("maximizer", "value", "certificate_gap", "restarts_used", "converged_runs",
                 "history")

    def __init__(self, maximizer: 'md_norms.Vector', value: float, certificate_gap: float,
                 restarts_used: int, converged_runs: int, history: typing.List[float]):
        #: The unit vector (in the source space) on which the norm is attained.
        self.maximizer = maximizer
        #: The value ``‖Tx‖`` reached by the iteration; within ``tol`` of ``‖T maximizer‖``.
        self.value = value
        #: The optimality gap, see :func:`duality_certificate`.
        self.certificate_gap = certificate_gap
        #: The number of runs started.
        self.restarts_used = restarts_used
        #: The number of runs that settled within the iteration budget.
        self.converged_runs = converged_runs
        #: The objective values of the winning run, one per iteration.
        self.history = history

    def __repr__(self):
        return "<NormAttainResult value={} gap={:.2e} restarts={}>".format(
            self.value, self.certificate_gap, self.restarts_used
        )


class _Run(object):
    __slots__ = ("x", "value", "history", "converged")

    def __init__(self, x, value, history, converged):
        self.x = x
        self.value = value
        self.history = history
        self.converged = converged


def _induced_dual_norm(phi: np.ndarray, B: 'md_dense.SubspaceBasis',
                       cfg: 'md_config.DecompositionConfig') -> float:
    """
    The norm of the functional ``phi`` restricted to ``span(B)``.
    """
    if B.is_full:
        return B.parent.dual().evaluate(phi)

    return md_minnorm.minimal_extension(B.columns.T @ phi, B.columns, B.parent,
                                        cfg.solver).value


def _linear_max(phi: np.ndarray, B: 'md_dense.SubspaceBasis',
                cfg: 'md_config.DecompositionConfig') -> typing.Optional[np.ndarray]:
    """
    Maximizes ``Re φ(x)`` over the unit vectors of ``span(B)``.

    :return: The maximizer, or None if ``φ`` vanishes on the subspace.
    """
    source = B.parent
    if B.is_full:
        if not np.any(phi):
            return None
        functional = md_norms.Functional(phi, source)
        return np.array(md_duality.predual_select(functional, cfg.duality).entries)

    if np.linalg.norm(B.columns.T @ phi) <= 1e-14 * max(np.linalg.norm(phi), 1e-300):
        return None

    # the least-norm x in span(B) with φ(x) = 1, rescaled to the unit sphere
    p = B.complement.conj().T
    rows = np.vstack([p, phi[np.newaxis, :]])
    rhs = np.zeros(rows.shape[0], dtype=rows.dtype)
    rhs[-1] = 1
    try:
        solution = md_minnorm.solve_min_norm(source, rows, rhs, cfg.solver)
    except InfeasibleSystemError:
        return None

    return solution.z / solution.value


def _single_run(A: np.ndarray, B: 'md_dense.SubspaceBasis', target: 'md_norms.NormSpec',
                x0: np.ndarray, cfg: 'md_config.DecompositionConfig') -> typing.Optional[_Run]:
    source = B.parent
    size = source.evaluate(x0)
    if size == 0:
        return None

    x = x0 / size
    value = target.evaluate(A @ x)
    if value == 0:
        return None

    history = [value]
    stalled = 0
    # between ℓ² spaces the value converges linearly; the remaining error is estimated from the
    # ratio of successive changes
    euclidean = source.is_euclidean and target.is_euclidean
    previous = 0.0
    for iteration in range(cfg.max_iter):
        g = md_duality.select_entries(A @ x, target, cfg.duality)
        x_new = _linear_max(A.T @ g, B, cfg)
        if x_new is None:
            return _Run(x, value, history, True)

        new_value = target.evaluate(A @ x_new)
        if new_value < value:
            # no ascent left at working precision
            return _Run(x, value, history, True)

        change = (new_value - value) / value
        step = np.linalg.norm(sign_normalize(x_new) - sign_normalize(x))
        x, value = x_new, new_value
        history.append(value)

        remaining = change
        if euclidean and change > 0:
            ratio = min(change / previous, _MAX_RATIO) if previous > 0 else _MAX_RATIO
            remaining = change * ratio / (1 - ratio)
        previous = change

        if remaining < cfg.tol:
            stalled += 1
            if step < math.sqrt(cfg.tol) or stalled >= _PATIENCE:
                logger.debug("Run settled after {} iterations at {}".format(iteration + 1,
                                                                            value))
                return _Run(x, value, history, True)
        else:
            stalled = 0

    logger.warning("Power iteration run did not settle within {} iterations (value {})"
                   .format(cfg.max_iter, value))
    return _Run(x, value, history, False)


def _starts(A: np.ndarray, B: 'md_dense.SubspaceBasis', cfg: 'md_config.DecompositionConfig',
            rng: np.random.Generator) -> typing.List[np.ndarray]:
    starts = [np.array(B.columns[:, i]) for i in range(B.dim)]

    # maximizers of the coordinate functionals of the target, pulled back through T
    for row in A:
        x = _linear_max(np.array(row), B, cfg)
        if x is not None:
            starts.append(x)

    is_complex = np.iscomplexobj(A) or B.is_complex
    for _ in range(cfg.restarts):
        starts.append(B.columns @ random_direction(rng, B.dim, is_complex))

    return starts


def _reduce(runs: typing.List[_Run], tol: float) -> _Run:
    """
    Picks the best run: largest value, then the smallest tie key among near-equal values.
    """
    best_value = max(run.value for run in runs)
    window = tol * max(1.0, best_value)
    contenders = [run for run in runs if run.value >= best_value - window]
    return min(contenders, key=lambda run: tie_key(sign_normalize(run.x, tol)))


def _euclidean_refine(T: 'md_dense.DenseOperator', B: 'md_dense.SubspaceBasis', x: np.ndarray,
                      tol: float) -> np.ndarray:
    """
    Projects an ℓ² to ℓ² maximizer onto the leading right singular subspace of the restriction.

    The projection keeps the phase (and, for repeated singular values, the direction) the
    multistart settled on. Only the vector is polished; the value stays the one the iteration
    reached.
    """
    q = linalg.orth(B.columns)
    _, s, vh = linalg.svd(T.entries @ q, full_matrices=False)
    top = vh[s >= s[0] * (1 - tol)].conj().T
    coords = top.conj().T @ (q.conj().T @ x)
    if np.linalg.norm(coords) == 0:
        coords = np.eye(top.shape[1])[0]

    v = q @ (top @ coords)
    return v / np.linalg.norm(v)


def duality_certificate(T: 'md_dense.DenseOperator', a: 'md_norms.Vector',
                        B: 'md_dense.SubspaceBasis' = None,
                        cfg: 'md_config.DecompositionConfig' = None) -> float:
    """
    Measures how far a unit vector is from attaining the norm of ``T`` on a subspace.

    With ``v = ‖Ta‖`` and ``g = J(Ta)``, a norm attainer satisfies ``‖T'g‖ = v`` (measured on
    ``span(B)``) and ``(T'g)(a) = v``. The returned gap is the larger of the two discrepancies.
    """
    cfg = cfg or md_config.DecompositionConfig()
    B = B or md_dense.SubspaceBasis.full(T.source)
    y = T.apply(a)
    value = y.norm()
    if value == 0:
        raise ZeroRestrictionError("T vanishes at the given vector")

    g = md_duality.duality_select(y, cfg.duality)
    phi = T.adjoint_apply(g)
    restricted = _induced_dual_norm(np.array(phi.entries), B, cfg)
    return max(abs(restricted - value), abs(phi(a) - value))


def op_norm_power(T: 'md_dense.DenseOperator', B: 'md_dense.SubspaceBasis' = None,
                  cfg: 'md_config.DecompositionConfig' = None, *,
                  rng: typing.Union[np.random.Generator, int, None] = None) -> NormAttainResult:
    """
    Computes the norm of ``T`` restricted to ``span(B)``, and a unit vector attaining it.

    :param T: The operator.
    :param B: The subspace of the source; the whole source by default.
    :param cfg: The settings (restarts, tolerances, workers, duality policy, solver).
    :param rng: The random generator (or seed) of the random starts; ``cfg.seed`` by default.
    :return: A :class:`.NormAttainResult` whose maximizer is sign-normalized.
    """
    cfg = cfg or md_config.DecompositionConfig()
    B = B or md_dense.SubspaceBasis.full(T.source)
    rng = make_rng(cfg.seed if rng is None else rng)

    A = np.array(T.entries)
    restricted = T.restrict(B)
    zero_tol = 100 * np.finfo(float).eps * np.abs(A).max(initial=0.0)
    if B.dim == 0 or np.abs(restricted).max(initial=0.0) <= zero_tol:
        raise ZeroRestrictionError("Operator vanishes on the subspace (dimension {})"
                                   .format(B.dim))

    starts = _starts(A, B, cfg, rng)
    logger.debug("Running {} starts on a subspace of dimension {}".format(len(starts), B.dim))

    def run(x0):
        return _single_run(A, B, T.target, x0, cfg)

    if cfg.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(x0) for x0 in starts]

    runs = [r for r in runs if r is not None]
    converged = [r for r in runs if r.converged]
    if not converged:
        raise ConvergenceError("No power iteration run settled within {} iterations"
                               .format(cfg.max_iter))

    best = _reduce(converged, cfg.tol)
    x, value = best.x, best.value
    if T.source.is_euclidean and T.target.is_euclidean:
        x = _euclidean_refine(T, B, x, cfg.tol)

    maximizer = md_norms.Vector(sign_normalize(x, cfg.tol), T.source)
    gap = duality_certificate(T, maximizer, B, cfg)
    logger.debug("Attained {} (gap {:.2e}, {} of {} runs settled)".format(
        value, gap, len(converged), len(runs)))
    return NormAttainResult(maximizer, value, gap, len(starts), len(converged),
                            best.history)


def restriction_bound(T: 'md_dense.DenseOperator', B: 'md_dense.SubspaceBasis') -> float:
    """
    A cheap upper bound of the norm of ``T`` on ``span(B)``, from the largest singular value and
    the equivalence constants of the two norms with ℓ².
    """
    if B.dim == 0:
        return 0.0

    lower, _ = T.source.euclidean_bounds
    _, upper = T.target.euclidean_bounds
    q = linalg.orth(B.columns)
    return upper * float(linalg.svdvals(T.entries @ q)[0]) / lower


def operator_norm(T: 'md_dense.DenseOperator',
                  cfg: 'md_config.DecompositionConfig' = None) -> float:
    """
    The norm of ``T`` on its whole source, from a closed form when one exists (ℓ² to ℓ², source
    ℓ¹, target ℓ∞) and from :func:`op_norm_power` otherwise. The zero operator has norm 0.
    """
    if T.is_zero():
        return 0.0

    if md_oracle.has_closed_form(T):
        return md_oracle.op_norm_oracle(T)

    try:
        return op_norm_power(T, cfg=cfg).value
    except ZeroRestrictionError:
        return 0.0
