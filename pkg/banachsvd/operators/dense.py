"""
Dense operators between normed coordinate spaces, and subspaces given by a column basis.
"""
import logging
import typing

import numpy as np
from cached_property import cached_property
from scipy import linalg

from banachsvd.exc import DegenerateBasisError, DependentFunctionalsError, DimensionMismatchError
from banachsvd.spaces import norms as md_norms
from banachsvd.utils import as_array, frozen, numerical_rank

logger = logging.getLogger(__name__)


class SubspaceBasis(object):
    """
    A subspace of a coordinate space, held as the span of linearly independent columns.

    The norm on the subspace is the one induced by the parent space: ``N_B(z) = ‖Bz‖``.
    """

    def __init__(self, columns: typing.Any, parent: 'md_norms.NormSpec', *,
                 rank_tol: float = 1e-10):
        """
        :param columns: A ``d × m`` matrix whose columns span the subspace (``m`` may be 0).
        :param parent: The norm of the ambient space.
        :param rank_tol: The relative singular value below which columns count as dependent.
        """
        arr = as_array(columns)
        if arr.size == 0:
            arr = arr.reshape(parent.d, 0)

        if arr.ndim != 2 or arr.shape[0] != parent.d:
            raise DimensionMismatchError("Basis of shape {} does not fit {!r}"
                                         .format(arr.shape, parent))

        if numerical_rank(arr, rank_tol) != arr.shape[1]:
            raise DegenerateBasisError("Basis columns are linearly dependent")

        #: The ``d × m`` basis matrix.
        self.columns = frozen(arr)
        #: The norm of the ambient space.
        self.parent = parent

    @classmethod
    def full(cls, spec: 'md_norms.NormSpec') -> 'SubspaceBasis':
        """
        :return: The whole space, spanned by the coordinate vectors.
        """
        return cls(np.eye(spec.d), spec)

    @classmethod
    def zero(cls, spec: 'md_norms.NormSpec') -> 'SubspaceBasis':
        """
        :return: The zero subspace.
        """
        return cls(np.zeros((spec.d, 0)), spec)

    def __repr__(self):
        return "<SubspaceBasis dim={} of {!r}>".format(self.dim, self.parent)

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    @property
    def is_full(self) -> bool:
        return self.dim == self.parent.d

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.columns)

    @cached_property
    def complement(self) -> np.ndarray:
        """
        An orthonormal basis (``d × (d - m)``) of the Euclidean orthogonal complement.

        The subspace is exactly ``{x : Pᴴx = 0}`` for this matrix ``P``.
        """
        if self.dim == 0:
            return frozen(np.eye(self.parent.d))

        return frozen(linalg.null_space(self.columns.conj().T))

    def coordinates(self, v: 'md_norms.Vector') -> np.ndarray:
        """
        Gets the coordinates ``z`` with ``Bz = v`` (least squares if ``v`` is outside).
        """
        if v.space.d != self.parent.d:
            raise DimensionMismatchError("Vector of length {} for a subspace of {!r}"
                                         .format(v.space.d, self.parent))

        z, *_ = np.linalg.lstsq(self.columns, v.entries, rcond=None)
        return z

    def embed(self, z: typing.Any) -> 'md_norms.Vector':
        """
        Maps subspace coordinates to a vector of the parent space.
        """
        z = as_array(z)
        if z.shape != (self.dim,):
            raise DimensionMismatchError("Expected {} coordinates, got shape {}"
                                         .format(self.dim, z.shape))

        return md_norms.Vector(self.columns @ z, self.parent)

    def contains(self, v: 'md_norms.Vector', tol: float = 1e-9) -> bool:
        """
        Checks whether a vector lies in the subspace, up to a relative tolerance.
        """
        outside = self.complement.conj().T @ v.entries
        return np.linalg.norm(outside) <= tol * max(1.0, np.linalg.norm(v.entries))


def annihilator_basis(fs: typing.Sequence['md_norms.Functional'],
                      space: 'md_norms.NormSpec', *, rank_tol: float = 1e-10) -> SubspaceBasis:
    """
    Computes an orthonormal basis of ``{x : f(x) = 0 for every f in fs}``.

    :param fs: Linearly independent functionals on ``space``, fewer than its dimension.
    :param space: The space the functionals act on.
    :return: A :class:`.SubspaceBasis` of dimension ``d - len(fs)``.
    """
    if not fs:
        return SubspaceBasis.full(space)

    if len(fs) >= space.d:
        raise DependentFunctionalsError("{} functionals cannot leave a nonzero annihilator in "
                                        "dimension {}".format(len(fs), space.d))

    for f in fs:
        if f.space.d != space.d:
            raise DimensionMismatchError("Functional of length {} on a space of dimension {}"
                                         .format(f.space.d, space.d))

    rows = np.array([f.entries for f in fs])
    if numerical_rank(rows, rank_tol) != len(fs):
        raise DependentFunctionalsError("Functionals are linearly dependent")

    basis = linalg.null_space(rows)
    if basis.shape[1] != space.d - len(fs):
        # null_space uses its own cutoff, which can disagree on borderline input
        raise DependentFunctionalsError("Annihilator has dimension {}, expected {}"
                                        .format(basis.shape[1], space.d - len(fs)))

    return SubspaceBasis(basis, space)


class DenseOperator(object):
    """
    A matrix acting between two normed coordinate spaces.

    .. code-block:: python3

        T = DenseOperator([[3, 0], [0, 1]], NormSpec.lp(2, 2), NormSpec.lp(2, 2))
        T.apply(Vector([1, 1], T.source)).entries  # array([3., 1.])

    """

    def __init__(self, entries: typing.Any, source: 'md_norms.NormSpec',
                 target: 'md_norms.NormSpec'):
        """
        :param entries: The ``d_out × d_in`` matrix.
        :param source: The norm of the domain, of dimension ``d_in``.
        :param target: The norm of the codomain, of dimension ``d_out``.
        """
        arr = np.atleast_2d(as_array(entries))
        if arr.shape != (target.d, source.d):
            raise DimensionMismatchError("Matrix of shape {} does not map {!r} to {!r}"
                                         .format(arr.shape, source, target))

        if not np.all(np.isfinite(arr)):
            raise ValueError("Operator entries must be finite")

        #: The matrix, read-only.
        self.entries = frozen(arr)
        #: The norm of the domain.
        self.source = source
        #: The norm of the codomain.
        self.target = target

    def __repr__(self):
        return "<DenseOperator {}x{} from {!r} to {!r}>".format(self.target.d, self.source.d,
                                                                self.source, self.target)

    @property
    def shape(self) -> typing.Tuple[int, int]:
        return self.entries.shape

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.entries)

    @property
    def is_square(self) -> bool:
        """
        True when the operator maps a space to itself.
        """
        return self.source == self.target

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.abs(self.entries).max(initial=0.0) <= tol)

    def apply(self, x: 'md_norms.Vector') -> 'md_norms.Vector':
        """
        Computes ``Tx``.
        """
        if x.space.d != self.source.d:
            raise DimensionMismatchError("Operator with {} columns applied to a vector of length {}"
                                         .format(self.source.d, x.space.d))

        return md_norms.Vector(self.entries @ x.entries, self.target)

    def adjoint_apply(self, g: 'md_norms.Functional') -> 'md_norms.Functional':
        """
        Computes ``T'g = g ∘ T``, so that ``(T'g)(x) = g(Tx)``.

        Under the bilinear pairing this is the plain transpose, for complex scalars too.
        """
        if g.space.d != self.target.d:
            raise DimensionMismatchError("Operator with {} rows applied to a functional of length {}"
                                         .format(self.target.d, g.space.d))

        return md_norms.Functional(self.entries.T @ g.entries, self.source)

    @cached_property
    def transpose(self) -> 'DenseOperator':
        """
        The adjoint ``T'`` as an operator from the dual of the target to the dual of the source.
        """
        return type(self)(self.entries.T, self.target.dual(), self.source.dual())

    def compose(self, other: 'DenseOperator') -> 'DenseOperator':
        """
        :return: The composition ``self ∘ other``.
        """
        if other.target.d != self.source.d:
            raise DimensionMismatchError("Cannot compose {!r} after {!r}".format(self, other))

        return type(self)(self.entries @ other.entries, other.source, self.target)

    def difference(self, other: 'DenseOperator') -> 'DenseOperator':
        """
        :return: The operator ``self - other`` between the spaces of ``self``.
        """
        if other.shape != self.shape:
            raise DimensionMismatchError("Shapes {} and {} differ".format(self.shape, other.shape))

        return type(self)(self.entries - other.entries, self.source, self.target)

    def restrict(self, B: SubspaceBasis) -> np.ndarray:
        """
        The matrix of ``T`` in the coordinates of a subspace: ``T B``, of shape ``d_out × m``.
        """
        if B.parent.d != self.source.d:
            raise DimensionMismatchError("Subspace of {!r} for an operator on {!r}"
                                         .format(B.parent, self.source))

        return self.entries @ B.columns


def identity_operator(spec: 'md_norms.NormSpec') -> DenseOperator:
    """
    :return: The identity operator of a space.
    """
    return DenseOperator(np.eye(spec.d), spec, spec)
