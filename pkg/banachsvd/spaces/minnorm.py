"""
The minimum-norm kernel: ``min N(z) subject to Az = b``.

This one convex problem powers Hahn–Banach extensions (minimum dual norm interpolation), linear
maximization over the unit ball of a subspace, and distances to subspaces. Three backends:

 - ℓ²: closed form (the pseudo-inverse solution).
 - ``conic`` (default): an interior point solve through cvxpy. When the norm is not strictly
   convex the minimizer need not be unique, so a second solve picks, among the (near-)minimizers,
   the one minimizing ``Σ (i+1) |zᵢ|``; this pushes mass onto the lowest indices and zeroes out
   free coordinates, e.g. ``p=1, A=[1 1], b=[2]`` gives ``(2, 0)``.
 - ``smoothed``: projected gradient descent with backtracking on the feasible affine set, with
   ``|t| ≈ sqrt(t² + ε²)`` and ε driven down to :attr:`.SolverConfig.smoothing`.

Every backend finishes with a Euclidean correction onto ``{Az = b}`` so that the constraint
residual is at round-off level.
"""
import logging
import math
import threading
import typing

import cvxpy as cp
import numpy as np

from banachsvd import config as md_config
from banachsvd.exc import ConvergenceError, DegenerateBasisError, DimensionMismatchError, \
    InfeasibleSystemError
from banachsvd.operators import dense as md_dense
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import as_array, numerical_rank

logger = logging.getLogger(__name__)

# compiled cvxpy problems are parametrized and reused, one cache per thread
_local = threading.local()


class MinNormSolution(object):
    """
    The result of a minimum-norm solve.
    """
    __slots__ = ("z", "value", "residual", "iterations", "method")

    def __init__(self, z: np.ndarray, value: float, residual: float, iterations: int,
                 method: str):
        #: The minimizer.
        self.z = z
        #: The norm of the minimizer.
        self.value = value
        #: The constraint residual ``‖Az - b‖₂``.
        self.residual = residual
        #: The iterations used by the backend (0 for closed forms).
        self.iterations = iterations
        #: The backend that produced this solution.
        self.method = method

    def __repr__(self):
        return "<MinNormSolution value={} residual={} method={}>".format(self.value,
                                                                        self.residual,
                                                                        self.method)


def _orthonormal_constraints(A: np.ndarray, b: np.ndarray, tol: float) \
        -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Rewrites ``Az = b`` as an equivalent system ``Qz = c`` whose rows are orthonormal.
    """
    u, s, vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > max(A.shape) * np.finfo(float).eps * s[0]))

    ur = u[:, :rank]
    # the part of b outside the range of A cannot be matched
    outside = b - ur @ (ur.conj().T @ b)
    if np.linalg.norm(outside) > tol * max(1.0, np.linalg.norm(b)):
        raise InfeasibleSystemError("Constraint system is inconsistent (residual {:.3e})"
                                    .format(np.linalg.norm(outside)))

    if rank < A.shape[0]:
        logger.debug("Dropping {} dependent constraint rows".format(A.shape[0] - rank))

    c = (ur.conj().T @ b) / s[:rank]
    return vh[:rank], c


def _cvx_norm(spec: 'md_norms.NormSpec', z: cp.Expression, is_complex: bool) -> cp.Expression:
    if spec.kind is md_norms.NormKind.LP:
        if spec.p == 1:
            return cp.norm1(z)
        if math.isinf(spec.p):
            return cp.norm_inf(z)
        if spec.p == 2:
            return cp.norm(z, 2)
        return cp.pnorm(cp.abs(z) if is_complex else z, spec.p)

    head, tail = z[:spec.k], z[spec.k:]
    if spec.kind is md_norms.NormKind.MIXED_K1:
        return cp.norm1(head) + cp.norm(tail, 2)

    return cp.maximum(cp.norm_inf(head), cp.norm(tail, 2))


def _build_problem(spec: 'md_norms.NormSpec', rows: int, stage: int, is_complex: bool,
                   constants: typing.Tuple[np.ndarray, np.ndarray, float] = None):
    z = cp.Variable(spec.d, complex=is_complex)
    if constants is None:
        q = cp.Parameter((rows, spec.d))
        c = cp.Parameter(rows)
        cap = cp.Parameter(nonneg=True)
    else:
        q, c, cap = constants

    objective = _cvx_norm(spec, z, is_complex)
    if stage == 1:
        problem = cp.Problem(cp.Minimize(objective), [q @ z == c])
    else:
        weights = np.arange(1, spec.d + 1, dtype=float)
        problem = cp.Problem(cp.Minimize(weights @ cp.abs(z)), [q @ z == c, objective <= cap])

    return problem, z, q, c, cap


def _get_problem(spec: 'md_norms.NormSpec', rows: int, stage: int):
    cache = getattr(_local, "problems", None)
    if cache is None:
        cache = _local.problems = {}

    key = (spec, rows, stage)
    if key not in cache:
        logger.debug("Compiling stage {} min-norm problem for {!r} with {} rows"
                     .format(stage, spec, rows))
        cache[key] = _build_problem(spec, rows, stage, False)

    return cache[key]


def _solve(problem: cp.Problem, cfg: 'md_config.SolverConfig', what: str) -> int:
    """
    Solves a compiled problem with Clarabel and checks its status.

    :return: The number of solver iterations.
    """
    accuracy = max(cfg.tol * 0.1, 1e-11)
    try:
        problem.solve(solver=cp.CLARABEL, tol_gap_abs=accuracy, tol_gap_rel=accuracy,
                      tol_feas=accuracy, max_iter=min(cfg.max_iter, 500))
    except cp.error.SolverError as e:
        raise ConvergenceError("Conic solver failed: {}".format(e)) from e

    if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        raise InfeasibleSystemError("{} is infeasible".format(what))

    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise ConvergenceError("Conic solver ended with status {}".format(problem.status))

    if problem.status == cp.OPTIMAL_INACCURATE:
        logger.debug("{} solved with reduced accuracy".format(what))

    return problem.solver_stats.num_iters or 0


def _run_conic(spec: 'md_norms.NormSpec', q: np.ndarray, c: np.ndarray, stage: int,
               cap: float, cfg: 'md_config.SolverConfig') -> typing.Tuple[np.ndarray, int]:
    is_complex = np.iscomplexobj(q) or np.iscomplexobj(c)
    if is_complex:
        # complex parameters are not cached, the problem is built around constants
        problem, z, *_ = _build_problem(spec, q.shape[0], stage, True, (q, c, cap))
    else:
        problem, z, q_param, c_param, cap_param = _get_problem(spec, q.shape[0], stage)
        q_param.value = q
        c_param.value = c
        cap_param.value = cap

    iterations = _solve(problem, cfg, "Stage {} minimum-norm problem".format(stage))
    if z.value is None:
        raise ConvergenceError("Conic solver returned no minimizer")

    return np.array(z.value), iterations


def _solve_conic(spec: 'md_norms.NormSpec', q: np.ndarray, c: np.ndarray,
                 cfg: 'md_config.SolverConfig') -> typing.Tuple[np.ndarray, int]:
    z, iterations = _run_conic(spec, q, c, 1, 0.0, cfg)
    if spec.strictly_convex or q.shape[0] >= spec.d:
        return z, iterations

    # pick a deterministic member of the optimal face
    value = spec.evaluate(z)
    cap = value + cfg.tol * max(1.0, value)
    try:
        z2, more = _run_conic(spec, q, c, 2, cap, cfg)
    except ConvergenceError as e:
        logger.debug("Tie-break solve failed ({}), keeping the first minimizer".format(e))
        return z, iterations

    return z2, iterations + more


def _softmax(values: np.ndarray, tau: float) -> typing.Tuple[float, np.ndarray]:
    top = values.max()
    weights = np.exp((values - top) / tau)
    total = weights.sum()
    return top + tau * math.log(total), weights / total


def _smoothed(spec: 'md_norms.NormSpec', z: np.ndarray, eps: float) \
        -> typing.Tuple[float, np.ndarray]:
    """
    The smoothed norm and its gradient (with respect to ``conj(z)`` for complex ``z``).
    """
    s = np.sqrt(np.abs(z) ** 2 + eps ** 2)
    if spec.kind is md_norms.NormKind.LP:
        if spec.p == 1:
            return float(s.sum()), z / s

        if math.isinf(spec.p):
            value, weights = _softmax(s, eps)
            return value, weights * z / s

        # scaled to avoid overflow for large p
        top = s.max()
        r = s / top
        value = top * float((r ** spec.p).sum()) ** (1 / spec.p)
        grad = r ** (spec.p - 1) * (z / s) * (value / top) ** (1 - spec.p)
        return value, grad

    k = spec.k
    tail = z[k:]
    t = math.sqrt(float(np.vdot(tail, tail).real) + eps ** 2)
    grad = np.zeros_like(z)
    if spec.kind is md_norms.NormKind.MIXED_K1:
        grad[:k] = z[:k] / s[:k]
        grad[k:] = tail / t
        return float(s[:k].sum()) + t, grad

    value, weights = _softmax(np.append(s[:k], t), eps)
    grad[:k] = weights[:k] * z[:k] / s[:k]
    grad[k:] = weights[k] * tail / t
    return value, grad


def _solve_smoothed(spec: 'md_norms.NormSpec', q: np.ndarray, c: np.ndarray,
                    cfg: 'md_config.SolverConfig') -> typing.Tuple[np.ndarray, int]:
    def project(g):
        return g - q.conj().T @ (q @ g)

    z = q.conj().T @ c
    eps = max(1e-2 * max(spec.evaluate(z), 1.0), cfg.smoothing)
    iterations = 0
    while True:
        value, grad = _smoothed(spec, z, eps)
        step = eps
        converged = False
        while iterations < cfg.max_iter:
            iterations += 1
            direction = project(grad)
            size = float(np.vdot(direction, direction).real)
            if size == 0:
                converged = True
                break

            # backtracking on the sufficient decrease condition
            while True:
                candidate = z - step * direction
                new_value, new_grad = _smoothed(spec, candidate, eps)
                if new_value <= value - 0.5 * step * size:
                    break
                step *= 0.5
                if step < 1e-300:
                    candidate, new_value, new_grad = z, value, grad
                    break

            change = (value - new_value) / max(value, np.finfo(float).tiny)
            z, value, grad = candidate, new_value, new_grad
            step *= 1.25
            if change < cfg.tol:
                converged = True
                break

        if not converged:
            raise ConvergenceError("Smoothed solver exhausted {} iterations at eps={:.1e}"
                                   .format(cfg.max_iter, eps))

        if eps <= cfg.smoothing:
            return z, iterations

        eps = max(eps * 0.1, cfg.smoothing)


def solve_min_norm(spec: 'md_norms.NormSpec', A: typing.Any, b: typing.Any,
                   cfg: 'md_config.SolverConfig' = None) -> MinNormSolution:
    """
    Solves ``min spec(z)`` subject to ``Az = b`` at the array level.

    :param spec: The norm to minimize.
    :param A: An ``r × d`` constraint matrix. Dependent rows are allowed if consistent.
    :param b: The right hand side, of length ``r``.
    :param cfg: The solver settings.
    :return: A :class:`.MinNormSolution`.
    """
    cfg = cfg or md_config.SolverConfig()
    A = np.atleast_2d(as_array(A))
    b = np.atleast_1d(as_array(b))
    if A.size == 0:
        A = A.reshape(0, spec.d)

    if A.shape[1] != spec.d or A.shape[0] != b.shape[0]:
        raise DimensionMismatchError("Constraint shapes {} and {} do not fit dimension {}"
                                     .format(A.shape, b.shape, spec.d))

    dtype = complex if np.iscomplexobj(A) or np.iscomplexobj(b) else float
    if A.shape[0] == 0:
        return MinNormSolution(np.zeros(spec.d, dtype=dtype), 0.0, 0.0, 0, "closed")

    q, c = _orthonormal_constraints(A, b, cfg.tol)
    if q.shape[0] == 0:
        return MinNormSolution(np.zeros(spec.d, dtype=dtype), 0.0, 0.0, 0, "closed")

    if spec.is_euclidean:
        z, iterations, method = q.conj().T @ c, 0, "closed"
    elif cfg.method == "smoothed":
        z, iterations = _solve_smoothed(spec, q, c, cfg)
        method = "smoothed"
    else:
        z, iterations = _solve_conic(spec, q, c, cfg)
        method = "conic"

    # land exactly on the affine set
    z = z + q.conj().T @ (c - q @ z)
    residual = float(np.linalg.norm(A @ z - b))
    value = spec.evaluate(z)
    logger.debug("Min-norm solve ({}) for {!r}: value={} residual={:.2e} iterations={}"
                 .format(method, spec, value, residual, iterations))
    return MinNormSolution(z, value, residual, iterations, method)


def min_norm_affine(N: 'md_norms.NormSpec', A: typing.Any, b: typing.Any, tol: float = None,
                    cfg: 'md_config.SolverConfig' = None) -> 'md_norms.Vector':
    """
    Finds a point of least norm on an affine set.

    .. code-block:: python3

        z = min_norm_affine(NormSpec.lp(1, 2), [[1, 1]], [2])
        z.entries  # array([2., 0.])

    :param N: The norm to minimize.
    :param A: An ``r × d`` matrix of full row rank.
    :param b: The right hand side, of length ``r``.
    :param tol: The accuracy; overrides ``cfg.tol`` if given.
    :param cfg: The solver settings.
    :return: The minimizer, as a :class:`.Vector` of ``N``.
    """
    cfg = cfg or md_config.SolverConfig()
    if tol is not None:
        cfg = md_config.SolverConfig(tol=tol, max_iter=cfg.max_iter, method=cfg.method,
                                     smoothing=cfg.smoothing)

    solution = solve_min_norm(N, A, b, cfg)
    return md_norms.Vector(solution.z, N)


def minimal_extension(coefficients: typing.Any, columns: np.ndarray, space: 'md_norms.NormSpec',
                      cfg: 'md_config.SolverConfig' = None) -> MinNormSolution:
    """
    Finds the functional of least dual norm that takes prescribed values on a set of vectors.

    With ``columns`` a basis of a subspace ``M`` and ``coefficients[i] = φ(columns[:, i])``, the
    minimum equals the norm of ``φ`` on ``M`` (Hahn–Banach), so the solution is a norm-preserving
    extension of ``φ``.

    :param coefficients: The prescribed values, one per column.
    :param columns: A ``d × m`` matrix whose columns span the subspace.
    :param space: The space the functional acts on.
    :param cfg: The solver settings.
    """
    return solve_min_norm(space.dual(), np.asarray(columns).T, coefficients, cfg)


def dist_to_subspace(v: 'md_norms.Vector', B: 'md_dense.SubspaceBasis', tol: float = None,
                     cfg: 'md_config.SolverConfig' = None) \
        -> typing.Tuple[float, 'md_norms.Vector']:
    """
    Computes the distance from a vector to a subspace, and a nearest point.

    The nearest point is ``v - w`` where ``w`` is the least-norm point of the coset ``v + M``,
    written as ``{w : Pw = Pv}`` with ``P`` the orthogonal complement of ``M``.

    :param v: The vector.
    :param B: The subspace.
    :return: The distance δ and a point z* of the subspace with ``‖v - z*‖ = δ``.
    """
    cfg = cfg or md_config.SolverConfig()
    if tol is not None:
        cfg = md_config.SolverConfig(tol=tol, max_iter=cfg.max_iter, method=cfg.method,
                                     smoothing=cfg.smoothing)

    if B.parent.d != v.space.d:
        raise DimensionMismatchError("Subspace of dimension {} and vector of length {}"
                                     .format(B.parent.d, v.space.d))

    if numerical_rank(B.columns) != B.dim:
        raise DegenerateBasisError("Subspace basis columns are linearly dependent")

    if B.dim == 0:
        return v.space.evaluate(v.entries), md_norms.zero_vector(v.space, v.is_complex)

    if B.is_full:
        return 0.0, v

    complement = B.complement
    p = complement.conj().T
    solution = solve_min_norm(v.space, p, p @ v.entries, cfg)
    return solution.value, md_norms.Vector(v.entries - solution.z, v.space)


def _build_face_problem(dual: 'md_norms.NormSpec', rows: int, is_complex: bool,
                        constants: typing.Tuple[np.ndarray, np.ndarray, np.ndarray,
                                                float] = None):
    f = cp.Variable(dual.d, complex=is_complex)
    if constants is None:
        q = cp.Parameter((rows, dual.d))
        w = cp.Parameter(dual.d)
        h = cp.Parameter(rows)
        level = cp.Parameter()
    else:
        q, w, h, level = constants

    problem = cp.Problem(cp.Minimize(cp.norm(q @ f - h, 2)),
                         [w @ f == level, _cvx_norm(dual, f, is_complex) <= 1])
    return problem, f, q, w, h, level


def project_duality_face(h: typing.Any, columns: np.ndarray, a_coords: typing.Any, level: float,
                         space: 'md_norms.NormSpec',
                         cfg: 'md_config.SolverConfig' = None) -> np.ndarray:
    """
    Finds the nearest point (Euclidean, in coordinates) of the set of functionals on a subspace
    ``M`` with ``ψ(a) = level`` and ``‖ψ‖*_M <= 1``.

    A functional on ``M`` is given by its values ``ψ = columns.T @ f`` on the basis columns; its
    norm on ``M`` is at most 1 exactly when some ``f`` with ``‖f‖* <= 1`` restricts to it, so the
    projection is solved over ``f``. With ``level = ‖a‖`` the set is the duality set of ``a`` in
    ``M*``, which is nonempty, convex and compact.

    :param h: The point to project, one value per column.
    :param columns: A ``d × m`` basis of ``M``.
    :param a_coords: The coordinates of ``a`` in that basis.
    :param level: The prescribed value ``ψ(a)``.
    :param space: The space ``M`` lives in.
    :return: The projection, one value per column.
    """
    cfg = cfg or md_config.SolverConfig()
    columns = np.asarray(columns)
    h = as_array(h)
    a_coords = as_array(a_coords)
    if h.shape != (columns.shape[1],) or a_coords.shape != h.shape:
        raise DimensionMismatchError("Projection of {} values onto a subspace of dimension {}"
                                     .format(h.shape, columns.shape[1]))

    dual = space.dual()
    w = columns @ a_coords
    is_complex = any(np.iscomplexobj(v) for v in (h, columns, w)) or isinstance(level, complex)
    if is_complex:
        problem, f, *_ = _build_face_problem(dual, h.size, True, (columns.T, w, h, level))
    else:
        cache = getattr(_local, "problems", None)
        if cache is None:
            cache = _local.problems = {}

        key = ("face", dual, h.size)
        if key not in cache:
            logger.debug("Compiling duality face projection for {!r} on {} coordinates"
                         .format(space, h.size))
            cache[key] = _build_face_problem(dual, h.size, False)

        problem, f, q_param, w_param, h_param, level_param = cache[key]
        q_param.value = columns.T
        w_param.value = w
        h_param.value = h
        level_param.value = float(level)

    _solve(problem, cfg, "Duality face projection")
    if f.value is None:
        raise ConvergenceError("Conic solver returned no projection")

    psi = columns.T @ np.array(f.value)
    # restore the prescribed value exactly
    return psi + (level - psi @ a_coords) * np.conj(a_coords) / np.vdot(a_coords, a_coords).real
