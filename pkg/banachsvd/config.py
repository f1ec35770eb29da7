"""
Configuration objects for the numerical routines.

Every routine that iterates or compares floating point values takes one of these. They are built
from keyword arguments, from a mapping (the JSON ``--config`` file of the CLI), and can be merged
with overrides, where overrides that are :data:`~.sentinels.NO_VALUE` are skipped. A config is
read-only once built; :meth:`.DecompositionConfig.merged` returns a new one.

.. code-block:: python3

    cfg = DecompositionConfig.from_mapping({"restarts": 4, "seed": 7})
    cfg = cfg.merged(tol=1e-10, rank_tol=NO_VALUE)  # rank_tol keeps its value

"""
import math
import numbers
import typing

from banachsvd.exc import ConfigError, SerializationError
from banachsvd.sentinels import NO_VALUE
from banachsvd.spaces import duality as md_duality

#: The keys accepted by :meth:`.DecompositionConfig.from_mapping`.
CONFIG_KEYS = ("restarts", "tol", "rank_tol", "seed", "max_iter", "eig_tol", "damping",
               "fixed_point_max_iter", "soft_gap", "abort_gap", "workers", "tie_break",
               "solver_method", "smoothing")

_INT_KEYS = frozenset({"restarts", "seed", "max_iter", "fixed_point_max_iter", "workers"})
_STR_KEYS = frozenset({"tie_break", "solver_method"})


def _coerce(key: str, value: typing.Any) -> typing.Any:
    """
    Checks the type of one config value, converting integral floats for the integer keys.

    :raises ConfigError: If the value has the wrong type.
    """
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError("{} must be a string, got {!r}".format(key, value))
        return value

    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError("{} must be a number, got {!r}".format(key, value))

    if math.isnan(value):
        raise ConfigError("{} must not be NaN".format(key))

    if key in _INT_KEYS:
        if isinstance(value, numbers.Integral):
            return int(value)
        if not math.isfinite(value) or not float(value).is_integer():
            raise ConfigError("{} must be an integer, got {!r}".format(key, value))
        return int(value)

    return float(value)


class _Frozen(object):
    """
    Rejects attribute assignment once ``__init__`` has finished.
    """
    __slots__ = ()

    def __setattr__(self, key, value):
        raise AttributeError("{} is read-only; use merged()".format(type(self).__name__))

    def _set(self, key: str, value: typing.Any):
        object.__setattr__(self, key, value)


class SolverConfig(_Frozen):
    """
    Settings of the minimum-norm kernel (:func:`.min_norm_affine`).
    """
    __slots__ = ("tol", "max_iter", "method", "smoothing")

    METHODS = ("conic", "smoothed")

    def __init__(self, tol: float = 1e-9, max_iter: int = 10000, method: str = "conic",
                 smoothing: float = 1e-12):
        """
        :param tol: The target accuracy of the optimal value and the constraint residual.
        :param max_iter: The iteration budget.
        :param method: ``conic`` (interior point through cvxpy) or ``smoothed`` (projected
            first-order method on a smoothed norm).
        :param smoothing: The final smoothing parameter of the ``smoothed`` method.
        """
        if tol <= 0:
            raise ConfigError("Solver tolerance must be positive, got {}".format(tol))

        if method not in self.METHODS:
            raise ConfigError("Unknown solver method {!r}".format(method))

        self._set("tol", float(tol))
        self._set("max_iter", int(max_iter))
        self._set("method", method)
        self._set("smoothing", float(smoothing))

    def __repr__(self):
        return "<SolverConfig method={} tol={} max_iter={}>".format(self.method, self.tol,
                                                                   self.max_iter)


class DecompositionConfig(_Frozen):
    """
    Settings of the norm computations, deflations and verifications.
    """
    __slots__ = ("restarts", "tol", "rank_tol", "seed", "max_iter", "eig_tol", "damping",
                 "fixed_point_max_iter", "soft_gap", "abort_gap", "workers", "duality", "solver")

    def __init__(self, *,
                 restarts: int = 16,
                 tol: float = 1e-9,
                 rank_tol: float = 1e-10,
                 seed: int = 0,
                 max_iter: int = 10000,
                 eig_tol: float = 1e-7,
                 damping: float = 0.5,
                 fixed_point_max_iter: int = 5000,
                 soft_gap: float = 10.0,
                 abort_gap: float = 1e3,
                 workers: int = 1,
                 duality: 'md_duality.DualityConfig' = None,
                 solver: SolverConfig = None):
        """
        :param restarts: The number of random starting points of the power iteration, on top of
            the basis directions.
        :param tol: The stopping tolerance of the iterations.
        :param rank_tol: A deflation stops once ``norm_j < rank_tol * norm_1``.
        :param seed: The seed of the random starting points.
        :param max_iter: The iteration budget of the power iteration.
        :param eig_tol: The eigen-residual accepted by the eigen deflation.
        :param damping: The damping factor of the fixed-point iteration.
        :param fixed_point_max_iter: The iteration budget of the fixed-point iteration.
        :param soft_gap: Certificate gaps above ``soft_gap * tol`` are logged.
        :param abort_gap: Certificate gaps above ``abort_gap * tol`` abort the run.
        :param workers: The number of threads used for multistart runs.
        :param duality: The duality selection policy.
        :param solver: The minimum-norm kernel settings.
        """
        if restarts < 0:
            raise ConfigError("restarts must be nonnegative")

        if tol <= 0 or rank_tol <= 0 or eig_tol <= 0:
            raise ConfigError("tolerances must be positive")

        if not 0 < damping <= 1:
            raise ConfigError("damping must be in (0, 1], got {}".format(damping))

        if workers < 1:
            raise ConfigError("workers must be at least 1")

        if max_iter < 1 or fixed_point_max_iter < 1:
            raise ConfigError("iteration budgets must be positive")

        self._set("restarts", int(restarts))
        self._set("tol", float(tol))
        self._set("rank_tol", float(rank_tol))
        self._set("seed", int(seed))
        self._set("max_iter", int(max_iter))
        self._set("eig_tol", float(eig_tol))
        self._set("damping", float(damping))
        self._set("fixed_point_max_iter", int(fixed_point_max_iter))
        self._set("soft_gap", float(soft_gap))
        self._set("abort_gap", float(abort_gap))
        self._set("workers", int(workers))
        self._set("duality", duality if duality is not None
                  else md_duality.DualityConfig(tol=self.tol))
        self._set("solver", solver if solver is not None
                  else SolverConfig(tol=self.tol, max_iter=self.max_iter))

    def __repr__(self):
        return "<DecompositionConfig restarts={} tol={} rank_tol={} seed={}>".format(
            self.restarts, self.tol, self.rank_tol, self.seed
        )

    def __eq__(self, other):
        if not isinstance(other, DecompositionConfig):
            return NotImplemented

        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))

    @classmethod
    def from_mapping(cls, data: typing.Mapping[str, typing.Any]) -> 'DecompositionConfig':
        """
        Creates a config from a flat mapping, such as a decoded ``--config`` file.

        :param data: A mapping whose keys are members of :data:`.CONFIG_KEYS`.
        :raises SerializationError: On unknown keys.
        :raises ConfigError: On values of the wrong type or outside their range.
        """
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise SerializationError("Unknown config keys: {}".format(", ".join(sorted(unknown))))

        return cls().merged(**data)

    def to_dict(self) -> typing.Dict[str, typing.Any]:
        """
        :return: The flat snapshot of this config, as stored in a decomposition.
        """
        return {
            "restarts": self.restarts,
            "tol": self.tol,
            "rank_tol": self.rank_tol,
            "seed": self.seed,
            "max_iter": self.max_iter,
            "eig_tol": self.eig_tol,
            "damping": self.damping,
            "fixed_point_max_iter": self.fixed_point_max_iter,
            "soft_gap": self.soft_gap,
            "abort_gap": self.abort_gap,
            "workers": self.workers,
            "tie_break": self.duality.tie_break.value,
            "solver_method": self.solver.method,
            "smoothing": self.solver.smoothing,
        }

    def merged(self, **overrides) -> 'DecompositionConfig':
        """
        Creates a new config with some values replaced.

        Overrides that are :data:`~.sentinels.NO_VALUE` or None are ignored, so that unset CLI
        flags fall through to the config file.
        """
        flat = self.to_dict()
        for key, value in overrides.items():
            if key not in CONFIG_KEYS:
                raise SerializationError("Unknown config key {!r}".format(key))

            if value is NO_VALUE or value is None:
                continue

            flat[key] = _coerce(key, value)

        try:
            tie_break = md_duality.TieBreak(flat.pop("tie_break"))
        except ValueError as e:
            raise ConfigError(str(e)) from e

        # the selection and the solver share the main tolerance
        method = flat.pop("solver_method")
        smoothing = flat.pop("smoothing")
        if flat["tol"] <= 0:
            raise ConfigError("tolerances must be positive")

        duality = md_duality.DualityConfig(tie_break=tie_break, tol=flat["tol"])
        solver = SolverConfig(tol=flat["tol"], max_iter=flat["max_iter"], method=method,
                              smoothing=smoothing)
        return type(self)(duality=duality, solver=solver, **flat)
