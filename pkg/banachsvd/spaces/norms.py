"""
Norms on coordinate spaces, and the vectors and functionals that live on them.

Three families are supported:

 - ``lp``: the usual ℓᵖ norm, ``1 <= p <= inf``.
 - ``mixed_k1``: ``‖x‖ = ‖(x_1, …, x_k)‖_1 + ‖(x_{k+1}, …)‖_2``.
 - ``mixed_kinf``: ``‖x‖ = max(‖(x_1, …, x_k)‖_∞, ‖(x_{k+1}, …)‖_2)``, the dual of ``mixed_k1``.

Functionals pair with vectors through ``f(x) = Σ fᵢxᵢ`` (no conjugation); the duality selections
put the conjugation into the functional so that ``f(x)`` is real at the duality point.
"""
import enum
import math
import typing

import numpy as np

from banachsvd.exc import DimensionMismatchError, NormSpecError
from banachsvd.utils import as_array, frozen


class NormKind(enum.Enum):
    """
    The families of norms a :class:`.NormSpec` can describe.
    """
    LP = "lp"
    MIXED_K1 = "mixed_k1"
    MIXED_KINF = "mixed_kinf"


class NormSpec(object):
    """
    Describes the norm on a coordinate space of dimension ``d``.

    .. code-block:: python3

        euclid = NormSpec.lp(2, d=8)
        mixed = NormSpec.mixed_k1(k=3, d=8)
        assert mixed.dual().dual() == mixed

    """
    __slots__ = ("kind", "p", "k", "d")

    def __init__(self, kind: typing.Union[NormKind, str], d: int, *,
                 p: float = None, k: int = None):
        """
        :param kind: The norm family.
        :param d: The dimension of the space.
        :param p: The exponent, for ``lp`` norms.
        :param k: The split index, for mixed norms.
        """
        try:
            kind = NormKind(kind)
        except ValueError:
            raise NormSpecError("Unknown norm kind {!r}".format(kind))

        if int(d) != d or d < 1:
            raise NormSpecError("Dimension must be a positive integer, got {}".format(d))

        if kind is NormKind.LP:
            if p is None:
                raise NormSpecError("lp norms need an exponent")
            p = float(p)
            if math.isnan(p) or p < 1:
                raise NormSpecError("lp exponent must be in [1, inf], got {}".format(p))
            k = None
        else:
            if k is None or int(k) != k or not 1 <= k < d:
                raise NormSpecError("Split index must satisfy 1 <= k < d, got k={} d={}"
                                    .format(k, d))
            k = int(k)
            p = None

        self.kind = kind
        self.p = p
        self.k = k
        self.d = int(d)

    @classmethod
    def lp(cls, p: float, d: int) -> 'NormSpec':
        """
        Creates an ℓᵖ norm spec.
        """
        return cls(NormKind.LP, d, p=p)

    @classmethod
    def mixed_k1(cls, k: int, d: int) -> 'NormSpec':
        """
        Creates a (k,1) mixed norm spec.
        """
        return cls(NormKind.MIXED_K1, d, k=k)

    @classmethod
    def mixed_kinf(cls, k: int, d: int) -> 'NormSpec':
        """
        Creates a (k,∞) mixed norm spec.
        """
        return cls(NormKind.MIXED_KINF, d, k=k)

    def __eq__(self, other):
        if not isinstance(other, NormSpec):
            return NotImplemented

        return (self.kind, self.p, self.k, self.d) == (other.kind, other.p, other.k, other.d)

    def __hash__(self):
        return hash((self.kind, self.p, self.k, self.d))

    def __repr__(self):
        if self.kind is NormKind.LP:
            return "<NormSpec lp p={} d={}>".format(self.p, self.d)

        return "<NormSpec {} k={} d={}>".format(self.kind.value, self.k, self.d)

    def with_dimension(self, d: int) -> 'NormSpec':
        """
        :return: The same family of norm on a space of another dimension.
        """
        return type(self)(self.kind, d, p=self.p, k=self.k)

    @property
    def conjugate_exponent(self) -> float:
        """
        The exponent ``p*`` with ``1/p + 1/p* = 1``.
        """
        if self.kind is not NormKind.LP:
            raise NormSpecError("Only lp norms have an exponent")

        if self.p == 1:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1)

    def dual(self) -> 'NormSpec':
        """
        :return: The spec of the dual norm (``lp p`` <-> ``lp p*``, ``mixed_k1`` <-> ``mixed_kinf``).
        """
        if self.kind is NormKind.LP:
            return type(self).lp(self.conjugate_exponent, self.d)

        if self.kind is NormKind.MIXED_K1:
            return type(self).mixed_kinf(self.k, self.d)

        return type(self).mixed_k1(self.k, self.d)

    @property
    def is_euclidean(self) -> bool:
        """
        True for the ℓ² norm, where every computation has a closed form.
        """
        return self.kind is NormKind.LP and self.p == 2

    @property
    def strictly_convex(self) -> bool:
        """
        True when the unit sphere contains no segments (so minimum-norm points are unique).
        """
        return self.kind is NormKind.LP and 1 < self.p < math.inf

    @property
    def euclidean_bounds(self) -> typing.Tuple[float, float]:
        """
        The constants ``(a, b)`` with ``a‖x‖₂ <= ‖x‖ <= b‖x‖₂`` for every ``x``.
        """
        if self.kind is NormKind.LP:
            if self.p <= 2:
                return 1.0, self.d ** (1 / self.p - 0.5)
            return self.d ** (1 / self.p - 0.5), 1.0

        if self.kind is NormKind.MIXED_K1:
            return 1.0, math.sqrt(self.k) + 1

        return 1 / math.sqrt(self.k + 1), 1.0

    def evaluate(self, entries: np.ndarray) -> typing.Union[float, np.ndarray]:
        """
        Evaluates the norm.

        :param entries: A vector of length ``d``, or a ``d × n`` array whose columns are vectors.
        :return: The norm (a float), or an array of ``n`` norms.
        """
        entries = np.asarray(entries)
        if entries.shape[0] != self.d:
            raise DimensionMismatchError("Expected {} coordinates, got {}"
                                         .format(self.d, entries.shape[0]))

        if self.kind is NormKind.LP:
            result = np.linalg.norm(entries, ord=self.p, axis=0)
        else:
            head = np.abs(entries[:self.k])
            tail = np.linalg.norm(entries[self.k:], axis=0)
            if self.kind is NormKind.MIXED_K1:
                result = head.sum(axis=0) + tail
            else:
                result = np.maximum(head.max(axis=0), tail)

        if entries.ndim == 1:
            return float(result)

        return result


class _Element(object):
    """
    Shared behaviour of :class:`.Vector` and :class:`.Functional`.
    """
    __slots__ = ("entries", "space")

    def __init__(self, entries: typing.Any, space: NormSpec):
        arr = as_array(entries)
        if arr.ndim != 1 or arr.shape[0] != space.d:
            raise DimensionMismatchError("{} of length {} does not fit {!r}"
                                         .format(type(self).__name__, arr.size, space))

        if not np.all(np.isfinite(arr)):
            raise ValueError("Entries must be finite")

        #: The coordinates, as a read-only numpy array.
        self.entries = frozen(arr)
        #: The :class:`.NormSpec` of the space this element is paired with.
        self.space = space

    def __len__(self):
        return self.space.d

    def __repr__(self):
        return "<{} {} in {!r}>".format(type(self).__name__, np.array2string(self.entries),
                                       self.space)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.entries)

    def _check_same(self, other: '_Element'):
        if type(other) is not type(self):
            raise TypeError("Cannot combine {} with {}".format(type(self).__name__,
                                                               type(other).__name__))

        if other.space.d != self.space.d:
            raise DimensionMismatchError("Dimensions {} and {} differ"
                                         .format(self.space.d, other.space.d))

    def __add__(self, other):
        self._check_same(other)
        return type(self)(self.entries + other.entries, self.space)

    def __sub__(self, other):
        self._check_same(other)
        return type(self)(self.entries - other.entries, self.space)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented

        return type(self)(self.entries * scalar, self.space)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-self.entries, self.space)


class Vector(_Element):
    """
    An element ``x`` of a normed coordinate space.
    """

    def norm(self) -> float:
        return norm(self)


class Functional(_Element):
    """
    A linear functional on a normed coordinate space.

    The :attr:`space` is the space the functional acts on; its own norm is measured under
    :attr:`dual_space`. Calling a functional on a vector evaluates the pairing.

    .. code-block:: python3

        f = Functional([1, -1], NormSpec.lp(1, 2))
        f(Vector([3, 4], f.space))  # -1.0
        dual_norm(f)  # 1.0 (the ℓ∞ norm)

    """

    @property
    def dual_space(self) -> NormSpec:
        """
        The spec of the norm this functional is measured in.
        """
        return self.space.dual()

    def __call__(self, x: Vector) -> typing.Union[float, complex]:
        if x.space.d != self.space.d:
            raise DimensionMismatchError("Functional of length {} applied to a vector of length {}"
                                         .format(self.space.d, x.space.d))

        value = np.dot(self.entries, x.entries)
        if np.iscomplexobj(value):
            return complex(value)

        return float(value)

    def norm(self) -> float:
        return dual_norm(self)


def zero_vector(space: NormSpec, is_complex: bool = False) -> Vector:
    """
    :return: The zero vector of a space.
    """
    return Vector(np.zeros(space.d, dtype=complex if is_complex else float), space)


def zero_functional(space: NormSpec, is_complex: bool = False) -> Functional:
    """
    :return: The zero functional on a space.
    """
    return Functional(np.zeros(space.d, dtype=complex if is_complex else float), space)


def unit_vector(space: NormSpec, index: int) -> Vector:
    """
    :return: The coordinate vector ``e_index`` (zero-based).
    """
    entries = np.zeros(space.d)
    entries[index] = 1.0
    return Vector(entries, space)


def norm(v: Vector) -> float:
    """
    Computes the norm of a vector under its space.
    """
    return v.space.evaluate(v.entries)


def dual_norm(f: Functional) -> float:
    """
    Computes the norm of a functional, i.e. its norm under the dual of the space it acts on.
    """
    return f.space.dual().evaluate(f.entries)
