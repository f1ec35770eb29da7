"""
JSON documents for norm specs, operators, decompositions and reports.

.. code-block:: json

    {"kind": "lp", "p": 2.0, "d": 8}
    {"rows": 2, "cols": 2, "data": [3, 0, 0, 1],
     "source": {"kind": "lp", "p": 2.0, "d": 2}, "target": {"kind": "lp", "p": 2.0, "d": 2}}

Matrices are stored row-major and flat; a complex number is written as a ``[re, im]`` pair. Floats
are written in their shortest round-trip form, which reads back bit for bit, and keys are
sorted, so identical objects always give identical text.
"""
import json
import logging
import math
import typing

import numpy as np

from banachsvd import eigen as md_eigen
from banachsvd.deflation import construction as md_construction
from banachsvd.exc import DecompositionException, DimensionMismatchError, NormSpecError, \
    SerializationError
from banachsvd.operators import dense as md_dense
from banachsvd.spaces import norms as md_norms

logger = logging.getLogger(__name__)


def to_builtin(obj: typing.Any) -> typing.Any:
    """
    Converts numpy values (and complex numbers) into JSON-compatible builtins, recursively.
    """
    if isinstance(obj, dict):
        return {str(key): to_builtin(value) for key, value in obj.items()}

    if isinstance(obj, (list, tuple)):
        return [to_builtin(value) for value in obj]

    if isinstance(obj, np.ndarray):
        return [to_builtin(value) for value in obj.tolist()]

    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)

    if isinstance(obj, (int, np.integer)):
        return int(obj)

    if isinstance(obj, (complex, np.complexfloating)):
        return [to_builtin(obj.real), to_builtin(obj.imag)]

    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            raise SerializationError("Cannot serialize the non-finite value {}".format(value))
        return value

    return obj


def dumps(obj: typing.Any) -> str:
    """
    Serializes a document deterministically.
    """
    return json.dumps(to_builtin(obj), sort_keys=True, indent=2)


def _reject_constant(name: str):
    raise SerializationError("Non-finite number {} in document".format(name))


def loads(text: str) -> typing.Any:
    """
    Parses JSON text, raising :class:`.SerializationError` on malformed input (including the
    ``NaN`` and ``Infinity`` extensions).
    """
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except (json.JSONDecodeError, TypeError) as e:
        raise SerializationError("Malformed JSON: {}".format(e)) from e


def _field(data: typing.Mapping, key: str) -> typing.Any:
    if not isinstance(data, dict):
        raise SerializationError("Expected a JSON object, got {}".format(type(data).__name__))

    try:
        return data[key]
    except KeyError:
        raise SerializationError("Missing field {!r}".format(key))


def _decode_array(values: typing.Any) -> np.ndarray:
    """
    Decodes a flat list of numbers and ``[re, im]`` pairs.
    """
    if not isinstance(values, list):
        raise SerializationError("Expected a list of numbers")

    if any(isinstance(v, list) for v in values):
        try:
            return np.array([complex(*v) if isinstance(v, list) else complex(v) for v in values])
        except TypeError as e:
            raise SerializationError("Malformed complex entry: {}".format(e)) from e

    try:
        return np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise SerializationError("Malformed numeric entries: {}".format(e)) from e


# norm specs

def dump_norm_spec(spec: 'md_norms.NormSpec') -> typing.Dict[str, typing.Any]:
    if spec.kind is md_norms.NormKind.LP:
        return {"kind": "lp", "p": "inf" if math.isinf(spec.p) else spec.p, "d": spec.d}

    return {"kind": spec.kind.value, "k": spec.k, "d": spec.d}


def load_norm_spec(data: typing.Mapping) -> 'md_norms.NormSpec':
    kind = _field(data, "kind")
    d = _field(data, "d")
    if isinstance(d, bool) or not isinstance(d, int):
        raise SerializationError("Dimension must be an integer, got {!r}".format(d))

    if kind == "lp":
        p = _field(data, "p")
        p = math.inf if p in ("inf", "Infinity") else p
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise SerializationError("Exponent must be a number or \"inf\"")
        return md_norms.NormSpec.lp(p, d)

    k = _field(data, "k")
    if isinstance(k, bool) or not isinstance(k, int):
        raise SerializationError("Split index must be an integer, got {!r}".format(k))

    return md_norms.NormSpec(kind, d, k=k)


# operators

def _dump_matrix(matrix: np.ndarray) -> typing.Dict[str, typing.Any]:
    return {"rows": matrix.shape[0], "cols": matrix.shape[1], "data": matrix.ravel().tolist()}


def _load_matrix(data: typing.Mapping) -> np.ndarray:
    rows, cols = _field(data, "rows"), _field(data, "cols")
    entries = _decode_array(_field(data, "data"))
    if not isinstance(rows, int) or not isinstance(cols, int) or entries.size != rows * cols:
        raise SerializationError("{} entries do not fill a {}x{} matrix"
                                 .format(entries.size, rows, cols))

    return entries.reshape(rows, cols)


def dump_operator(T: 'md_dense.DenseOperator') -> typing.Dict[str, typing.Any]:
    document = _dump_matrix(np.array(T.entries))
    document["source"] = dump_norm_spec(T.source)
    document["target"] = dump_norm_spec(T.target)
    return document


def load_operator(data: typing.Mapping) -> 'md_dense.DenseOperator':
    matrix = _load_matrix(data)
    source = load_norm_spec(_field(data, "source"))
    target = load_norm_spec(_field(data, "target"))
    return md_dense.DenseOperator(matrix, source, target)


# decompositions

def _dump_step(step: 'md_construction.DeflationStep') -> typing.Dict[str, typing.Any]:
    document = {
        "index": step.index,
        "x": step.x.entries,
        "f": step.f.entries,
        "g": step.g.entries,
        "norm": step.norm,
        "certificate_gap": step.certificate_gap,
    }
    if isinstance(step, md_eigen.EigenStep):
        document["gamma"] = step.gamma
        document["lambda"] = step.lambda_
        document["fixed_point_residual"] = step.fixed_point_residual

    return document


def _scalar(value: typing.Any) -> typing.Union[float, complex]:
    if isinstance(value, list):
        if len(value) != 2:
            raise SerializationError("Complex scalars are [re, im] pairs")
        return complex(*value)

    if not isinstance(value, (int, float)):
        raise SerializationError("Expected a number, got {!r}".format(value))

    return float(value)


def _load_step(data: typing.Mapping, source: 'md_norms.NormSpec', target: 'md_norms.NormSpec',
               eigen: bool) -> 'md_construction.DeflationStep':
    x = md_norms.Vector(_decode_array(_field(data, "x")), source)
    f = md_norms.Functional(_decode_array(_field(data, "f")), source)
    g = md_norms.Functional(_decode_array(_field(data, "g")), target)
    args = (int(_field(data, "index")), x, f, g, _scalar(_field(data, "norm")),
            _scalar(_field(data, "certificate_gap")))
    if eigen:
        return md_eigen.EigenStep(*args, gamma=_scalar(_field(data, "gamma")),
                                  fixed_point_residual=_scalar(data.get("fixed_point_residual",
                                                                        0.0)))

    return md_construction.DeflationStep(*args)


def dump_decomposition(D: 'md_construction.Decomposition') -> typing.Dict[str, typing.Any]:
    return {
        "kind": "eigen" if isinstance(D, md_eigen.EigenDecomposition) else "deflation",
        "source": dump_norm_spec(D.source),
        "target": dump_norm_spec(D.target),
        "steps": [_dump_step(step) for step in D.steps],
        "xi": [functional.entries for functional in D.xi],
        "kernel_basis": _dump_matrix(np.array(D.kernel_basis.columns)),
        "config": D.config,
        "diagnostics": D.diagnostics,
    }


def load_decomposition(data: typing.Mapping) -> 'md_construction.Decomposition':
    try:
        eigen = _field(data, "kind") == "eigen"
        source = load_norm_spec(_field(data, "source"))
        target = load_norm_spec(_field(data, "target"))
        steps = [_load_step(step, source, target, eigen) for step in _field(data, "steps")]
        xi = [md_norms.Functional(_decode_array(entries), source)
              for entries in _field(data, "xi")]
        kernel = md_dense.SubspaceBasis(_load_matrix(_field(data, "kernel_basis")), source)
        cls = md_eigen.EigenDecomposition if eigen else md_construction.Decomposition
        return cls(steps, xi, kernel, source, target, config=data.get("config"),
                   diagnostics=data.get("diagnostics"))
    except (DimensionMismatchError, NormSpecError, SerializationError):
        raise
    except (DecompositionException, TypeError, ValueError) as e:
        raise SerializationError("Malformed decomposition: {}".format(e)) from e
