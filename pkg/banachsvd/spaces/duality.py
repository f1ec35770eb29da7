"""
Selections from the duality map.

For ``x != 0`` the set ``J_x = {f : ‖f‖* = 1, f(x) = ‖x‖}`` is nonempty (Hahn–Banach) but is a
singleton only when the dual norm is strictly convex. :func:`duality_select` returns one member,
chosen by a fixed policy:

 - ℓᵖ, ``1 < p < ∞``: ``fᵢ = conj(sign xᵢ) |xᵢ|^(p-1) / ‖x‖^(p-1)`` (unique).
 - ℓ¹ (and the head block of ``mixed_k1``): ``fᵢ = conj(sign xᵢ)``, and 0 where ``xᵢ`` is
   negligible.
 - ℓ∞ (and the head block of ``mixed_kinf``): all mass on the lowest-index maximal coordinate
   (``LOWEST_INDEX``), or spread equally over the maximal coordinates (``ZERO_FILL``).
 - the ℓ² tail of the mixed norms: ``conj(tail) / ‖tail‖``, or 0 if the tail is negligible.

Because the dual of every supported norm is again a supported norm, the same routine applied in
the dual space gives :func:`predual_select`: the unit vector on which a functional attains its
norm, which is the exact maximizer of a linear functional over the unit ball.
"""
import enum
import logging
import math

import numpy as np

from banachsvd.exc import ZeroVectorError
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import phase

logger = logging.getLogger(__name__)


class TieBreak(enum.Enum):
    """
    How flat faces of ℓ∞ type are resolved.
    """
    #: All mass on the lowest-index maximal coordinate.
    LOWEST_INDEX = "lowest_index"
    #: Mass spread equally over all maximal coordinates, zero elsewhere.
    ZERO_FILL = "zero_fill"


class DualityConfig(object):
    """
    The selection policy of :func:`duality_select`.
    """
    __slots__ = ("tie_break", "tol")

    def __init__(self, tie_break: TieBreak = TieBreak.LOWEST_INDEX, tol: float = 1e-9):
        """
        :param tie_break: How ties between maximal coordinates are resolved.
        :param tol: Relative threshold below which coordinates count as zero, and within which
            coordinates count as maximal.
        """
        if tol <= 0:
            raise ValueError("Duality tolerance must be positive, got {}".format(tol))

        self.tie_break = TieBreak(tie_break)
        self.tol = float(tol)

    def __repr__(self):
        return "<DualityConfig tie_break={} tol={}>".format(self.tie_break.value, self.tol)


#: The policy used when none is given.
DEFAULT_DUALITY = DualityConfig()


def _l1_face(x: np.ndarray, threshold: float) -> np.ndarray:
    f = np.conj(phase(x))
    f[np.abs(x) <= threshold] = 0
    return f


def _linf_face(x: np.ndarray, cfg: DualityConfig) -> np.ndarray:
    mags = np.abs(x)
    top = mags.max()
    maximal = np.flatnonzero(mags >= top * (1 - cfg.tol))
    f = np.zeros_like(x)
    if cfg.tie_break is TieBreak.LOWEST_INDEX:
        maximal = maximal[:1]

    f[maximal] = np.conj(phase(x[maximal])) / len(maximal)
    return f


def _l2_block(x: np.ndarray, threshold: float) -> np.ndarray:
    size = np.linalg.norm(x)
    if size <= threshold:
        return np.zeros_like(x)

    return np.conj(x) / size


def select_entries(x: np.ndarray, spec: 'md_norms.NormSpec',
                   cfg: DualityConfig = DEFAULT_DUALITY) -> np.ndarray:
    """
    The coordinate-level duality selection.

    :param x: The (nonzero) coordinates of a vector.
    :param spec: The norm of the space ``x`` lives in.
    :param cfg: The selection policy.
    :return: The coordinates of a functional ``f`` with ``‖f‖* = 1`` and ``f(x) = ‖x‖``.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        x = x.astype(complex)
    else:
        x = x.astype(float)

    top = np.abs(x).max(initial=0.0)
    if top == 0:
        raise ZeroVectorError("The duality map of the zero vector is not a selection")

    # rescaling by a power of two is exact, so x and 2ᵏx give identical selections
    x = x * 2.0 ** -int(np.frexp(top)[1])
    value = spec.evaluate(x)
    # negligible coordinates, relative to the largest one
    threshold = cfg.tol * np.abs(x).max()

    if spec.kind is md_norms.NormKind.LP:
        if spec.p == 1:
            return _l1_face(x, threshold)

        if math.isinf(spec.p):
            return _linf_face(x, cfg)

        if spec.p == 2:
            return np.conj(x) / value

        return np.conj(phase(x)) * (np.abs(x) / value) ** (spec.p - 1)

    k = spec.k
    head, tail = x[:k], x[k:]
    f = np.zeros_like(x)
    if spec.kind is md_norms.NormKind.MIXED_K1:
        f[:k] = _l1_face(head, threshold)
        f[k:] = _l2_block(tail, threshold)
        return f

    # mixed_kinf: whichever block attains the max carries all the mass, the head wins ties
    head_max = np.abs(head).max()
    tail_size = np.linalg.norm(tail)
    if head_max >= tail_size - cfg.tol * value:
        f[:k] = _linf_face(head, cfg)
    else:
        f[k:] = np.conj(tail) / tail_size

    return f


def duality_select(x: 'md_norms.Vector', cfg: DualityConfig = None) -> 'md_norms.Functional':
    """
    Selects a member of the duality map ``J_x``.

    The selection is deterministic, invariant under positive scaling of ``x``, and picks up a
    factor ``conj(γ)`` under unimodular scaling ``x -> γx``.

    :param x: A nonzero vector.
    :param cfg: The selection policy; defaults to :data:`DEFAULT_DUALITY`.
    :return: A :class:`.Functional` ``f`` on ``x.space`` with ``‖f‖* = 1`` and ``f(x) = ‖x‖``.
    """
    cfg = cfg or DEFAULT_DUALITY
    return md_norms.Functional(select_entries(x.entries, x.space, cfg), x.space)


def predual_select(f: 'md_norms.Functional', cfg: DualityConfig = None) -> 'md_norms.Vector':
    """
    Finds a unit vector on which a functional attains its norm.

    This is the duality map of the dual space, read back in the primal space: the returned ``x``
    has ``‖x‖ = 1`` and ``f(x) = ‖f‖*``, so it maximizes ``Re f`` over the unit ball.

    :param f: A nonzero functional.
    :param cfg: The selection policy.
    """
    cfg = cfg or DEFAULT_DUALITY
    return md_norms.Vector(select_entries(f.entries, f.space.dual(), cfg), f.space)
