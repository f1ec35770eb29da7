"""
Norm-preserving extension of functionals from a subspace.
"""
import logging
import typing

import numpy as np

from banachsvd import config as md_config
from banachsvd.exc import ExtensionError, InfeasibleSystemError
from banachsvd.operators import dense as md_dense
from banachsvd.spaces import minnorm as md_minnorm
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import as_array

logger = logging.getLogger(__name__)


def hahn_banach_extend(phi: typing.Any, B: 'md_dense.SubspaceBasis', tol: float = None,
                       cfg: 'md_config.SolverConfig' = None, *,
                       bound: float = None) -> 'md_norms.Functional':
    """
    Extends a functional on ``span(B)`` to the whole space without increasing its norm.

    The extension is the functional of least dual norm among those with ``f(Bz) = φ(z)``; by the
    Hahn–Banach theorem the least dual norm equals the norm of ``φ`` on the subspace.

    :param phi: The functional in subspace coordinates, ``phi[i] = φ(B[:, i])``.
    :param B: The subspace.
    :param tol: The accuracy; ``cfg.tol`` by default.
    :param cfg: The solver settings.
    :param bound: The largest acceptable dual norm of the extension; ``1 + 10 tol`` by default,
        for functionals of norm one.
    :return: The extension, a :class:`.Functional` on ``B.parent``.
    """
    cfg = cfg or md_config.SolverConfig()
    tol = cfg.tol if tol is None else tol
    bound = 1 + 10 * tol if bound is None else bound
    phi = np.atleast_1d(as_array(phi))
    if phi.shape != (B.dim,):
        raise ExtensionError("Expected {} subspace coordinates, got shape {}"
                             .format(B.dim, phi.shape))

    if B.is_full:
        entries = np.linalg.solve(B.columns.T, phi)
    else:
        try:
            entries = md_minnorm.minimal_extension(phi, B.columns, B.parent, cfg).z
        except InfeasibleSystemError as e:
            raise ExtensionError("Extension constraints are infeasible") from e

    f = md_norms.Functional(entries, B.parent)
    residual = float(np.max(np.abs(B.columns.T @ f.entries - phi), initial=0.0))
    if residual > tol * max(1.0, float(np.abs(phi).max(initial=0.0))):
        raise ExtensionError("Extension misses its prescribed values by {:.3e}".format(residual))

    size = f.norm()
    if size > bound:
        raise ExtensionError("Extension has dual norm {}, above {}".format(size, bound))

    logger.debug("Extended a functional from dimension {} to {} with dual norm {}"
                 .format(B.dim, B.parent.d, size))
    return f
