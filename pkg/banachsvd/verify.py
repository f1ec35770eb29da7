"""
The verification suite run by ``banachsvd verify``.

Every property is measured, compared with its tolerance and recorded as a
:class:`.PropertyResult`; the suite never stops at the first failure.
"""
import logging
import typing

import numpy as np

from banachsvd import config as md_config
from banachsvd import representation as md_representation
from banachsvd.deflation import biorthogonal as md_biorthogonal
from banachsvd.deflation import diagnostics as md_diagnostics
from banachsvd.exc import DimensionMismatchError
from banachsvd.operators import dense as md_dense
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import make_rng, random_direction

logger = logging.getLogger(__name__)

BIORTHOGONALITY_TOL = 1e-7
NESTING_TOL = 1e-7
KERNEL_TOL = 1e-7
INDEPENDENCE_TOL = 1e-8
METRIC_PROJECTION_TOL = 1e-5
RECONSTRUCTION_TOL = 1e-7
TRUNCATION_TOL = 1e-6
DUAL_REPRESENTATION_TOL = 1e-7


class PropertyResult(object):
    """
    One measured property.
    """
    __slots__ = ("name", "passed", "measured", "tolerance", "detail")

    def __init__(self, name: str, passed: bool, measured: float, tolerance: float,
                 detail: str = ""):
        self.name = name
        self.passed = bool(passed)
        self.measured = float(measured)
        self.tolerance = float(tolerance)
        self.detail = detail

    def __repr__(self):
        return "<PropertyResult {} passed={} measured={:.3e}>".format(self.name, self.passed,
                                                                      self.measured)

    def to_dict(self) -> typing.Dict[str, typing.Any]:
        return {"name": self.name, "passed": self.passed, "measured": self.measured,
                "tolerance": self.tolerance, "detail": self.detail}


class VerificationReport(object):
    """
    The results of the whole suite.
    """

    def __init__(self, results: typing.List[PropertyResult]):
        self.results = results

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> typing.List[PropertyResult]:
        return [result for result in self.results if not result.passed]

    def __getitem__(self, name: str) -> PropertyResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_dict(self) -> typing.Dict[str, typing.Any]:
        return {"passed": self.passed, "properties": [r.to_dict() for r in self.results]}


def _at_most(name: str, measured: float, tolerance: float, detail: str = "") -> PropertyResult:
    return PropertyResult(name, measured <= tolerance, measured, tolerance, detail)


def verify_decomposition(D: 'Decomposition', T: 'md_dense.DenseOperator',
                         cfg: 'md_config.DecompositionConfig' = None, *,
                         samples: int = 2) -> VerificationReport:
    """
    Checks a decomposition of ``T`` against every property the construction guarantees.

    :param samples: The number of random vectors per sampled property.
    :raises DimensionMismatchError: If the decomposition does not belong to an operator of the
        shape of ``T``.
    """
    cfg = cfg or md_config.DecompositionConfig()
    if D.source.d != T.source.d or D.target.d != T.target.d:
        raise DimensionMismatchError("Decomposition of a {}x{} operator checked against {}x{}"
                                     .format(D.target.d, D.source.d, T.target.d, T.source.d))

    rng = make_rng(cfg.seed)
    scale = max(1.0, D.norms[0] if D.rank else 1.0)
    results = []

    results.append(_at_most("biorthogonality", md_biorthogonal.biorthogonality_error(D.xi, D.xs),
                            BIORTHOGONALITY_TOL))

    f_err, g_err = md_diagnostics.nesting_errors(D, T)
    results.append(_at_most("nesting_f", f_err, NESTING_TOL))
    results.append(_at_most("nesting_g", g_err, NESTING_TOL * scale))

    increases = [b - a for a, b in zip(D.norms, D.norms[1:])]
    results.append(_at_most("monotone_norms", max(increases, default=0.0), 1e-9 * scale))

    kernel = md_diagnostics.kernel_check(D, T)
    measured = max(kernel["image_max"], kernel["annihilation_max"])
    detail = "kernel dimension {}, null space dimension {}".format(kernel["kernel_dim"],
                                                                   kernel["expected_dim"])
    results.append(PropertyResult("kernel", measured <= KERNEL_TOL and
                                  kernel["kernel_dim"] == kernel["expected_dim"],
                                  measured, KERNEL_TOL, detail))

    x_indep, tx_indep = md_diagnostics.independence(D, T)
    smallest = min(x_indep, tx_indep)
    results.append(PropertyResult("independence", smallest > INDEPENDENCE_TOL, smallest,
                                  INDEPENDENCE_TOL, "smallest normalized singular value"))

    worst = 0.0
    for _ in range(samples):
        x = md_norms.Vector(random_direction(rng, D.source.d, T.is_complex), D.source)
        for n in range(1, D.rank + 1):
            worst = max(worst, md_diagnostics.metric_projection_check(D, x, n, cfg) / x.norm())
    results.append(_at_most("metric_projection", worst, METRIC_PROJECTION_TOL))

    errors = md_diagnostics.reconstruction_errors(D, T, samples, cfg.seed)
    results.append(_at_most("reconstruction", max(errors, default=0.0), RECONSTRUCTION_TOL))

    truncations = [md_representation.truncation_error(D, T, m, cfg) for m in range(D.rank + 1)]
    excess = max(t.error - t.bound for t in truncations)
    results.append(_at_most("truncation_bound", excess, TRUNCATION_TOL * scale))

    values = [t.error for t in truncations]
    rises = max([b - a for a, b in zip(values, values[1:])] + [values[-1]])
    results.append(_at_most("truncation_monotone", rises, TRUNCATION_TOL * scale,
                            "largest increase, or the final error"))

    g = md_norms.Functional(random_direction(rng, D.target.d, T.is_complex), D.target)
    g = g * (1 / g.norm())
    dual = md_representation.dual_representation_check(D, T, g, cfg=cfg)
    results.append(_at_most("dual_representation", dual.deviation,
                            DUAL_REPRESENTATION_TOL * scale))
    slack = max(np.subtract(dual.dual_errors, dual.primal_errors), default=0.0)
    results.append(_at_most("dual_truncation_bound", float(slack), TRUNCATION_TOL * scale))

    report = VerificationReport(results)
    for failure in report.failures:
        logger.warning("Property {} failed: measured {:.3e}, tolerance {:.3e}".format(
            failure.name, failure.measured, failure.tolerance))

    return report
