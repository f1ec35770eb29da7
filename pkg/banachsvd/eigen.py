"""
Eigen-deflation of operators on a single space whose restrictions attain their norm at
eigenvectors.

For such an operator each norm attainer satisfies ``Tx_j = γ_j ‖T_j‖ x_j`` with ``|γ_j| = 1``, the
functional ``f_j`` can be taken as a fixed point of ``f -> (γ̄_j / ‖T_j‖) T'f`` inside the duality
set of ``x_j``, and the representation becomes ``Tx = Σ λₙ ξₙ(x) xₙ`` with ``λₙ = γₙ ‖Tₙ‖``.

The class membership is checked step by step: an attainer that is not an eigenvector (within
``eig_tol``) rejects the operator with :class:`.EigenClassError`.
"""
import logging
import typing

import numpy as np
import tqdm
from scipy import linalg

from banachsvd import config as md_config
from banachsvd.deflation import biorthogonal as md_biorthogonal
from banachsvd.deflation import construction as md_construction
from banachsvd.deflation import diagnostics as md_diagnostics
from banachsvd.deflation import extension as md_extension
from banachsvd.exc import ConvergenceError, DimensionMismatchError, EigenClassError, \
    MonotonicityError, ZeroRestrictionError
from banachsvd.operators import dense as md_dense
from banachsvd.operators import power as md_power
from banachsvd.spaces import duality as md_duality
from banachsvd.spaces import minnorm as md_minnorm
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import as_array, make_rng, random_direction

logger = logging.getLogger(__name__)

#: The largest fixed-point residual accepted by :func:`eigen_deflate`, relative to ``‖T‖``.
FIXED_POINT_TOLERANCE = 1e-6


class EigenStep(md_construction.DeflationStep):
    """
    A deflation step whose attainer is an eigenvector.
    """

    def __init__(self, index: int, x: 'md_norms.Vector', f: 'md_norms.Functional',
                 g: 'md_norms.Functional', norm: float, certificate_gap: float, *,
                 gamma: complex, fixed_point_residual: float = 0.0):
        super().__init__(index, x, f, g, norm, certificate_gap)
        #: The unimodular factor ``γ_j``.
        self.gamma = gamma
        #: The residual ``‖T'f_j - γ_j ‖T_j‖ f_j‖`` on ``X_j``.
        self.fixed_point_residual = fixed_point_residual

    @property
    def lambda_(self) -> typing.Union[float, complex]:
        """
        The eigenvalue ``λ_j = γ_j ‖T_j‖``.
        """
        return self.gamma * self.norm


class EigenDecomposition(md_construction.Decomposition):
    """
    A decomposition made of :class:`.EigenStep`.
    """

    @property
    def lambdas(self) -> typing.List[typing.Union[float, complex]]:
        return [step.lambda_ for step in self.steps]

    @property
    def representation_residual(self) -> float:
        """
        ``max ‖Tx - Σ λₙ ξₙ(x) xₙ‖ / (‖T‖ ‖x‖)`` over random vectors, as recorded at construction.
        """
        return self.diagnostics.get("representation_residual", 0.0)


class FixedPointResult(object):
    """
    The outcome of :func:`fixed_point_functional`.
    """
    __slots__ = ("functional", "residual", "iterations", "converged")

    def __init__(self, functional: 'md_norms.Functional', residual: float, iterations: int,
                 converged: bool):
        #: The functional ``f`` on the whole space, a norm one extension of the fixed point.
        self.functional = functional
        #: ``‖T'f - γ‖T‖f‖`` measured on the subspace.
        self.residual = residual
        self.iterations = iterations
        self.converged = converged

    def __repr__(self):
        return "<FixedPointResult residual={:.2e} iterations={} converged={}>".format(
            self.residual, self.iterations, self.converged)


def _canonical(gamma: complex) -> typing.Union[float, complex]:
    gamma = complex(gamma)
    if gamma.imag == 0:
        return gamma.real

    return gamma


def _restricted_dual_norm(psi: np.ndarray, B: 'md_dense.SubspaceBasis',
                          cfg: 'md_config.DecompositionConfig') -> float:
    if B.is_full:
        # coordinates of the full basis are the entries themselves up to the basis change
        return B.parent.dual().evaluate(np.linalg.solve(B.columns.T, psi))

    return md_minnorm.minimal_extension(psi, B.columns, B.parent, cfg.solver).value


def fixed_point_functional(T: 'md_dense.DenseOperator', a: 'md_norms.Vector', gamma: complex,
                           cfg: 'md_config.DecompositionConfig' = None, *,
                           B: 'md_dense.SubspaceBasis' = None,
                           value: float = None) -> FixedPointResult:
    """
    Finds ``f`` in the duality set of ``a`` with ``T'f = γ‖T‖f`` on ``span(B)``.

    The iteration is ``ψ <- (1 - θ) ψ + θ Π((γ̄ / ‖T‖) T'ψ)`` on the coordinates ``ψ`` of ``f``
    restricted to the subspace, starting from the duality selection of ``a``. ``Π`` is the nearest
    point map onto the duality set ``{ψ : ψ(a) = ‖a‖, ‖ψ‖* <= 1}``
    (:func:`.project_duality_face`). Points already in the set (after restoring ``ψ(a) = ‖a‖``)
    are kept as they are, and on smooth spaces the set is the single starting functional.

    :param T: An operator of one space to itself leaving ``span(B)`` invariant.
    :param a: A unit eigenvector, ``Ta = γ‖T‖a``, in ``span(B)``.
    :param gamma: The unimodular factor.
    :param cfg: The settings (``damping``, ``fixed_point_max_iter``, ``tol``).
    :param B: The subspace; the whole space by default.
    :param value: The norm of ``T`` on the subspace; ``‖Ta‖`` by default.
    """
    cfg = cfg or md_config.DecompositionConfig()
    B = B or md_dense.SubspaceBasis.full(T.source)
    value = T.apply(a).norm() if value is None else value
    if value == 0:
        raise ZeroRestrictionError("Fixed point of the zero operator")

    q = linalg.orth(B.columns) if not B.is_full else np.array(B.columns)
    basis = md_dense.SubspaceBasis(q, B.parent)
    # T restricted to the invariant subspace, in coordinates: T q = q M
    m = q.conj().T @ T.entries @ q
    a_z = q.conj().T @ a.entries
    level = a.norm()
    psi0 = q.T @ md_duality.duality_select(a, cfg.duality).entries
    scale = np.conj(gamma) / value
    smooth = B.parent.dual().strictly_convex

    def project(h):
        if smooth:
            return psi0

        corrected = h + (level - h @ a_z) / level * psi0
        if _restricted_dual_norm(corrected, basis, cfg) <= 1 + cfg.tol:
            return corrected

        return md_minnorm.project_duality_face(h, q, a_z, level, B.parent, cfg.solver)

    psi = psi0.astype(complex) if np.iscomplexobj(m) or np.iscomplexobj(scale) else psi0
    converged = False
    iterations = 0
    while iterations < cfg.fixed_point_max_iter:
        iterations += 1
        update = project(scale * (m.T @ psi))
        new = (1 - cfg.damping) * psi + cfg.damping * update
        change = float(np.abs(new - psi).max())
        psi = new
        if change < cfg.tol:
            converged = True
            break

    if np.iscomplexobj(psi) and not np.iscomplexobj(T.entries) and np.isreal(gamma):
        psi = psi.real

    residual = _restricted_dual_norm(m.T @ psi - gamma * value * psi, basis, cfg)
    if not converged:
        logger.warning("Fixed-point iteration did not settle in {} iterations (residual {:.2e})"
                       .format(iterations, residual))

    f = md_extension.hahn_banach_extend(psi, basis, cfg=cfg.solver,
                                        bound=1 + cfg.abort_gap * cfg.tol)
    return FixedPointResult(f, residual, iterations, converged)


def _eigen_step(T, B, cfg, index, floor, reference, rng) -> EigenStep:
    if B.dim == 0 or md_power.restriction_bound(T, B) < floor:
        raise ZeroRestrictionError("Restriction to X_{} is zero".format(index))

    result = md_power.op_norm_power(T, B, cfg, rng=rng)
    x, value = result.maximizer, result.value
    reference = reference or value
    y = T.apply(x)

    rayleigh = np.vdot(x.entries, y.entries) / np.vdot(x.entries, x.entries)
    if abs(rayleigh) == 0:
        raise EigenClassError("Norm attainer of X_{} is not an eigenvector".format(index))

    gamma = _canonical(rayleigh / abs(rayleigh))
    residual = md_norms.Vector(y.entries - gamma * value * x.entries, T.target).norm()
    if residual > cfg.eig_tol * reference:
        raise EigenClassError("Norm attainer of X_{} is not an eigenvector (residual {:.3e})"
                              .format(index, residual / reference))

    fixed = fixed_point_functional(T, x, gamma, cfg, B=B, value=value)
    if fixed.residual > FIXED_POINT_TOLERANCE * reference:
        raise ConvergenceError("Fixed point of step {} has residual {:.3e}"
                               .format(index, fixed.residual))

    f = fixed.functional
    g = md_norms.Functional(np.conj(gamma) * f.entries, T.target)
    logger.info("Eigen step {}: lambda {} (gap {:.2e})".format(index, gamma * value,
                                                            result.certificate_gap))
    return EigenStep(index, x, f, g, value, result.certificate_gap, gamma=gamma,
                     fixed_point_residual=fixed.residual)


def eigen_representation(D: EigenDecomposition, x: 'md_norms.Vector',
                         m: int = None) -> 'md_norms.Vector':
    """
    Computes ``Σ_{n<=m} λₙ ξₙ(x) xₙ``.
    """
    m = D.rank if m is None else m
    entries = np.zeros(D.source.d, dtype=complex if x.is_complex else float)
    for step, functional in zip(D.steps[:m], D.xi[:m]):
        entries = entries + step.lambda_ * functional(x) * step.x.entries

    return md_norms.Vector(entries, D.source)


def _representation_residual(D: EigenDecomposition, T: 'md_dense.DenseOperator',
                             samples: int, seed: int) -> float:
    if not D.rank:
        return 0.0

    rng = make_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = md_norms.Vector(random_direction(rng, T.source.d, T.is_complex), T.source)
        difference = T.apply(x) - eigen_representation(D, x)
        worst = max(worst, difference.norm() / (D.norms[0] * x.norm()))

    return worst


def eigen_deflate(T: 'md_dense.DenseOperator', cfg: 'md_config.DecompositionConfig' = None, *,
                  progress: bool = False) -> EigenDecomposition:
    """
    Runs the eigen-deflation of an operator of a space to itself.

    :raises EigenClassError: If a norm attainer is not an eigenvector.
    """
    cfg = cfg or md_config.DecompositionConfig()
    if not T.is_square:
        raise DimensionMismatchError("Eigen deflation needs an operator of one space to itself")

    if T.is_zero():
        raise ZeroRestrictionError("Cannot decompose the zero operator")

    rng = make_rng(cfg.seed)
    B = md_dense.SubspaceBasis.full(T.source)
    steps = []
    with tqdm.tqdm(total=T.source.d, desc="Eigen deflating", unit="steps",
                   disable=not progress) as bar:
        while len(steps) < T.source.d:
            index = len(steps) + 1
            reference = steps[0].norm if steps else None
            floor = cfg.rank_tol * reference if steps else 0.0
            try:
                step = _eigen_step(T, B, cfg, index, floor, reference, rng)
            except ZeroRestrictionError:
                break

            if steps:
                if step.norm < floor:
                    break

                slack = max(1e-9, cfg.soft_gap * cfg.tol) * max(1.0, reference)
                if step.norm > steps[-1].norm + slack:
                    raise MonotonicityError("Norm of step {} ({}) exceeds step {} ({})"
                                            .format(index, step.norm, index - 1,
                                                    steps[-1].norm))

            steps.append(step)
            bar.update(1)
            fs = [s.f for s in steps]
            if len(fs) >= T.source.d:
                B = md_dense.SubspaceBasis.zero(T.source)
            else:
                B = md_dense.annihilator_basis(fs, T.source)

    xi = md_biorthogonal.xi_recursion([s.f for s in steps], [s.x for s in steps], cfg.tol)
    decomposition = EigenDecomposition(steps, xi, B, T.source, T.target, config=cfg.to_dict())
    diagnostics = md_diagnostics.compute_diagnostics(decomposition, T, cfg)
    diagnostics["lambdas"] = decomposition.lambdas
    diagnostics["representation_residual"] = _representation_residual(
        decomposition, T, md_diagnostics.SAMPLES, cfg.seed)
    decomposition.diagnostics = diagnostics
    return decomposition


class NonnegativeEigenReport(object):
    """
    The real eigenvalues of an operator and whether they are all nonnegative.
    """
    __slots__ = ("eigenvalues", "minimum", "passed")

    def __init__(self, eigenvalues: typing.List[float], minimum: float, passed: bool):
        self.eigenvalues = eigenvalues
        self.minimum = minimum
        self.passed = passed

    def __repr__(self):
        return "<NonnegativeEigenReport minimum={} passed={}>".format(self.minimum, self.passed)


def nonneg_eigen_check(T: 'md_dense.DenseOperator', tol: float = 1e-9) -> NonnegativeEigenReport:
    """
    Checks that every real eigenvalue of ``T`` is nonnegative.

    Operators whose restrictions all attain their norm at eigenvalue ``+‖T_M‖`` have no negative
    eigenvalues; a negative one places ``T`` outside that class.
    """
    if T.shape[0] != T.shape[1]:
        raise DimensionMismatchError("Eigenvalues need a square matrix")

    values = linalg.eigvals(np.array(T.entries))
    real = sorted(float(v.real) for v in values if abs(v.imag) <= tol * max(1.0, abs(v)))
    minimum = real[0] if real else 0.0
    passed = minimum >= -tol * max(1.0, float(np.abs(values).max(initial=0.0)))
    return NonnegativeEigenReport(real, minimum, passed)


def injectivity_check(T: 'md_dense.DenseOperator', mu: float) -> float:
    """
    :return: The smallest singular value of ``μI + T``; positive for ``μ > 0`` when ``T`` has no
        negative eigenvalues.
    """
    if T.shape[0] != T.shape[1]:
        raise DimensionMismatchError("Injectivity check needs a square matrix")

    shifted = mu * np.eye(T.shape[0]) + np.array(T.entries)
    return float(linalg.svdvals(shifted)[-1])


def make_mixed_diagonal(alpha: typing.Sequence[float], k: int) -> 'md_dense.DenseOperator':
    """
    Builds ``T(x_1, x_2, …) = (α_1 x_1, α_2 x_2, …)`` on ``(Kᵈ, ‖·‖_(k,1))``.

    :param alpha: The diagonal, of length ``d``.
    :param k: The split index of the mixed norm, ``1 <= k < d``.
    """
    alpha = np.atleast_1d(as_array(alpha))
    space = md_norms.NormSpec.mixed_k1(k, alpha.size)
    return md_dense.DenseOperator(np.diag(alpha), space, space)


def example_ground_truth(alpha: typing.Sequence[float]) -> typing.Dict[str, typing.Any]:
    """
    The closed-form decomposition of the diagonal operator.

    Steps pick the coordinates by decreasing ``|α|`` (the lowest index first among equal
    magnitudes) and stop at the zeros; ``x_j = f_j = ξ_j = e_{n_j}`` and ``λ_j = α_{n_j}``.

    :return: A record with the 1-based ``order``, the ``lambdas`` and the ``functionals``.
    """
    alpha = np.atleast_1d(as_array(alpha))
    order = sorted((i for i in range(alpha.size) if alpha[i] != 0),
                   key=lambda i: (-abs(alpha[i]), i))
    functionals = []
    for i in order:
        e = np.zeros(alpha.size)
        e[i] = 1.0
        functionals.append(e.tolist())

    return {
        "order": [i + 1 for i in order],
        "lambdas": [alpha[i].item() for i in order],
        "functionals": functionals,
    }
