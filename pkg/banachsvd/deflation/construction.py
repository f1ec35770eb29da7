"""
The deflation: norm attainers of ``T`` on a decreasing chain of subspaces.

Step ``j`` works on ``X_j``, the annihilator of ``f_1, …, f_{j-1}``, and produces

 - ``x_j``, a unit vector of ``X_j`` with ``‖Tx_j‖ = ‖T_j‖`` (the norm of ``T`` on ``X_j``),
 - ``g_j``, a duality selection of ``Tx_j`` in the target,
 - ``f_j``, a norm-one extension of ``(1 / ‖T_j‖) g_j T`` from ``X_j`` to the whole source.

Then ``f_j(x_j) = 1``, every later ``x`` is annihilated by ``f_j`` and every later ``Tx`` by
``g_j``. For a rank ``k`` operator the chain stops after ``k`` steps and ``X_{k+1} = ker T``.
"""
import logging
import typing

import numpy as np
import tqdm

from banachsvd import config as md_config
from banachsvd.deflation import biorthogonal as md_biorthogonal
from banachsvd.deflation import diagnostics as md_diagnostics
from banachsvd.deflation import extension as md_extension
from banachsvd.exc import CertificateError, IndexRangeError, MonotonicityError, \
    ZeroRestrictionError
from banachsvd.operators import dense as md_dense
from banachsvd.operators import power as md_power
from banachsvd.spaces import duality as md_duality
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import make_rng

logger = logging.getLogger(__name__)


class DeflationStep(object):
    """
    The output of one deflation step.
    """

    def __init__(self, index: int, x: 'md_norms.Vector', f: 'md_norms.Functional',
                 g: 'md_norms.Functional', norm: float, certificate_gap: float):
        #: The 1-based step number ``j``.
        self.index = index
        #: The unit norm attainer ``x_j``.
        self.x = x
        #: The functional ``f_j`` on the source, with ``f_j(x_j) = 1``.
        self.f = f
        #: The functional ``g_j`` on the target, with ``g_j(Tx_j) = ‖T_j‖``.
        self.g = g
        #: The restricted norm ``‖T_j‖``.
        self.norm = norm
        #: The optimality gap of ``x_j``.
        self.certificate_gap = certificate_gap

    def __repr__(self):
        return "<{} j={} norm={}>".format(type(self).__name__, self.index, self.norm)


class Decomposition(object):
    """
    A finished deflation: the steps, the biorthogonal functionals ξₙ and the kernel.

    .. code-block:: python3

        D = run_deflation(T)
        D.norms  # [‖T_1‖, ‖T_2‖, …]
        D.S(2, x)  # ξ_1(x) x_1 + ξ_2(x) x_2

    """

    def __init__(self, steps: typing.Sequence[DeflationStep],
                 xi: typing.Sequence['md_norms.Functional'],
                 kernel_basis: 'md_dense.SubspaceBasis',
                 source: 'md_norms.NormSpec', target: 'md_norms.NormSpec', *,
                 config: typing.Dict[str, typing.Any] = None,
                 diagnostics: typing.Dict[str, typing.Any] = None):
        if len(steps) != len(xi):
            raise ValueError("{} steps but {} functionals".format(len(steps), len(xi)))

        #: The steps, in order.
        self.steps = list(steps)
        #: The functionals ξ_1, …, ξ_r.
        self.xi = list(xi)
        #: A basis of ``X_{r+1}``, the kernel for exact rank ``r``.
        self.kernel_basis = kernel_basis
        #: The norm of the source space.
        self.source = source
        #: The norm of the target space.
        self.target = target
        #: The config snapshot the decomposition was computed with.
        self.config = dict(config or {})
        #: The diagnostics record.
        self.diagnostics = dict(diagnostics or {})

    def __repr__(self):
        return "<{} rank={} norms={}>".format(type(self).__name__, self.rank, self.norms)

    @property
    def rank(self) -> int:
        return len(self.steps)

    @property
    def norms(self) -> typing.List[float]:
        return [step.norm for step in self.steps]

    @property
    def xs(self) -> typing.List['md_norms.Vector']:
        return [step.x for step in self.steps]

    @property
    def fs(self) -> typing.List['md_norms.Functional']:
        return [step.f for step in self.steps]

    @property
    def gs(self) -> typing.List['md_norms.Functional']:
        return [step.g for step in self.steps]

    def S(self, n: int, x: 'md_norms.Vector') -> 'md_norms.Vector':
        """
        :return: ``S_{n+1} x``.
        """
        return md_biorthogonal.projection_S(self.xi, self.xs, n, x)

    def R(self, n: int, f: 'md_norms.Functional') -> 'md_norms.Functional':
        """
        :return: ``R_{n+1} f``.
        """
        return md_biorthogonal.dual_projection_R(self.xi, self.xs, n, f)

    def projection_matrix(self, n: int) -> np.ndarray:
        return md_biorthogonal.projection_matrix(self.xi, self.xs, n, self.source.d)

    def subspace(self, n: int) -> 'md_dense.SubspaceBasis':
        """
        :return: ``X_{n+1}``, the annihilator of ``f_1, …, f_n``.
        """
        if not 0 <= n <= self.rank:
            raise IndexRangeError("Subspace index {} outside 0..{}".format(n, self.rank))

        if n >= self.source.d:
            return md_dense.SubspaceBasis.zero(self.source)

        return md_dense.annihilator_basis(self.fs[:n], self.source)


def _check_gap(gap: float, value: float, cfg: 'md_config.DecompositionConfig', what: str):
    scale = cfg.tol * max(1.0, value)
    if gap > cfg.abort_gap * scale:
        raise CertificateError("{} certificate gap {:.3e} exceeds the abort threshold {:.3e}"
                               .format(what, gap, cfg.abort_gap * scale))

    if gap > cfg.soft_gap * scale:
        logger.warning("{} certificate gap {:.3e} above {:.3e}".format(what, gap,
                                                                       cfg.soft_gap * scale))


def _next_basis(functionals, space):
    if len(functionals) >= space.d:
        return md_dense.SubspaceBasis.zero(space)

    return md_dense.annihilator_basis(functionals, space)


def deflate_step(T: 'md_dense.DenseOperator', B: 'md_dense.SubspaceBasis',
                 C: 'md_dense.SubspaceBasis' = None,
                 cfg: 'md_config.DecompositionConfig' = None, *,
                 index: int = 1, floor: float = 0.0,
                 rng: np.random.Generator = None) -> DeflationStep:
    """
    Performs one deflation step on ``X_j = span(B)``.

    :param T: The operator.
    :param B: The source subspace ``X_j``.
    :param C: The target subspace ``Y_j``; ``Tx_j`` is checked to lie in it.
    :param cfg: The settings.
    :param index: The step number ``j``.
    :param floor: Restrictions whose norm is provably below this count as zero.
    :param rng: The random generator of the multistart.
    :raises ZeroRestrictionError: If ``T`` vanishes on the subspace.
    """
    cfg = cfg or md_config.DecompositionConfig()
    if B.dim == 0 or md_power.restriction_bound(T, B) < floor:
        raise ZeroRestrictionError("Restriction to X_{} is zero".format(index))

    result = md_power.op_norm_power(T, B, cfg, rng=rng)
    x, value = result.maximizer, result.value
    _check_gap(result.certificate_gap, value, cfg, "Norm attainer")

    y = T.apply(x)
    if C is not None and not C.contains(y, cfg.soft_gap * cfg.tol):
        logger.warning("Tx_{} leaves Y_{}".format(index, index))

    g = md_duality.duality_select(y, cfg.duality)
    phi = T.adjoint_apply(g).entries / value
    f = md_extension.hahn_banach_extend(B.columns.T @ phi, B, cfg=cfg.solver,
                                        bound=1 + cfg.abort_gap * cfg.tol)
    _check_gap(abs(f.norm() - 1), 1.0, cfg, "Extension")

    logger.info("Step {}: norm {} (gap {:.2e})".format(index, value, result.certificate_gap))
    return DeflationStep(index, x, f, g, value, result.certificate_gap)


def run_deflation(T: 'md_dense.DenseOperator', cfg: 'md_config.DecompositionConfig' = None, *,
                  progress: bool = False) -> Decomposition:
    """
    Runs the deflation until the rank is exhausted and builds the decomposition.

    :param T: A nonzero operator.
    :param cfg: The settings.
    :param progress: Whether to show a progress bar on stderr.
    :raises MonotonicityError: If a restricted norm exceeds the previous one beyond tolerance.
    """
    cfg = cfg or md_config.DecompositionConfig()
    if T.is_zero():
        raise ZeroRestrictionError("Cannot decompose the zero operator")

    rng = make_rng(cfg.seed)
    B = md_dense.SubspaceBasis.full(T.source)
    C = md_dense.SubspaceBasis.full(T.target)
    limit = min(T.source.d, T.target.d)
    steps = []

    with tqdm.tqdm(total=limit, desc="Deflating", unit="steps", disable=not progress) as bar:
        while len(steps) < limit:
            index = len(steps) + 1
            floor = cfg.rank_tol * steps[0].norm if steps else 0.0
            try:
                step = deflate_step(T, B, C, cfg, index=index, floor=floor, rng=rng)
            except ZeroRestrictionError:
                logger.info("Restriction to X_{} vanishes, rank {}".format(index, len(steps)))
                break

            if steps:
                if step.norm < floor:
                    logger.info("Norm {} below the rank cutoff, rank {}".format(step.norm,
                                                                              len(steps)))
                    break

                slack = max(1e-9, cfg.soft_gap * cfg.tol) * max(1.0, steps[0].norm)
                if step.norm > steps[-1].norm + slack:
                    raise MonotonicityError("Norm of step {} ({}) exceeds step {} ({})"
                                            .format(index, step.norm, index - 1,
                                                    steps[-1].norm))

            steps.append(step)
            bar.update(1)
            B = _next_basis([s.f for s in steps], T.source)
            C = _next_basis([s.g for s in steps], T.target)

    xi = md_biorthogonal.xi_recursion([s.f for s in steps], [s.x for s in steps], cfg.tol)
    decomposition = Decomposition(steps, xi, B, T.source, T.target, config=cfg.to_dict())
    decomposition.diagnostics = md_diagnostics.compute_diagnostics(decomposition, T, cfg)
    return decomposition
