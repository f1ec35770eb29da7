"""
Tests the configuration objects and the JSON documents.
"""
import math

import numpy as np
import pytest

from banachsvd import DecompositionConfig, DenseOperator, NormSpec, TieBreak, run_deflation
from banachsvd.exc import ConfigError, NormSpecError, SerializationError
from banachsvd.sentinels import NO_VALUE
from banachsvd.serialization import dump_decomposition, dump_norm_spec, dump_operator, dumps, \
    load_decomposition, load_norm_spec, load_operator, loads


def test_config_defaults():
    cfg = DecompositionConfig()
    assert cfg.restarts == 16
    assert cfg.tol == 1e-9
    assert cfg.duality.tie_break is TieBreak.LOWEST_INDEX
    assert cfg.solver.method == "conic"
    assert cfg.solver.tol == cfg.tol


def test_config_from_mapping():
    cfg = DecompositionConfig.from_mapping({"restarts": 4, "tol": 1e-8,
                                            "tie_break": "zero_fill"})
    assert cfg.restarts == 4
    assert cfg.duality.tie_break is TieBreak.ZERO_FILL
    # the selection and the solver follow the main tolerance
    assert cfg.duality.tol == cfg.solver.tol == 1e-8

    with pytest.raises(SerializationError):
        DecompositionConfig.from_mapping({"restart": 4})


def test_config_merged():
    cfg = DecompositionConfig(seed=3)
    merged = cfg.merged(seed=NO_VALUE, restarts=None, rank_tol=1e-6)
    assert merged.seed == 3
    assert merged.restarts == cfg.restarts
    assert merged.rank_tol == 1e-6
    assert cfg.rank_tol == 1e-10

    with pytest.raises(SerializationError):
        cfg.merged(colour="blue")


@pytest.mark.parametrize("values", [
    {"restarts": -1}, {"tol": 0}, {"damping": 1.5}, {"workers": 0}, {"solver_method": "newton"},
    {"tie_break": "highest_index"}, {"tol": "abc"}, {"restarts": "many"}, {"seed": [1, 2]},
    {"restarts": 2.5}, {"workers": True}, {"tol": float("nan")}, {"tie_break": 1},
])
def test_config_rejects_bad_values(values):
    with pytest.raises(ConfigError):
        DecompositionConfig.from_mapping(values)


def test_config_coerces_integral_values():
    cfg = DecompositionConfig.from_mapping({"restarts": 4.0, "seed": 7, "tol": 1})
    assert cfg.restarts == 4 and isinstance(cfg.restarts, int)
    assert cfg.tol == 1.0 and isinstance(cfg.tol, float)


def test_config_is_read_only():
    cfg = DecompositionConfig()
    with pytest.raises(AttributeError):
        cfg.tol = 1e-3

    with pytest.raises(AttributeError):
        cfg.solver.method = "smoothed"

    assert cfg.merged(tol=1e-3).tol == 1e-3
    assert cfg.tol == 1e-9
    assert cfg == DecompositionConfig.from_mapping(cfg.to_dict())


def test_config_snapshot():
    cfg = DecompositionConfig(restarts=2, seed=9, damping=0.25)
    snapshot = cfg.to_dict()
    assert DecompositionConfig.from_mapping(snapshot).to_dict() == snapshot


def test_norm_spec_documents():
    assert dump_norm_spec(NormSpec.lp(math.inf, 3)) == {"kind": "lp", "p": "inf", "d": 3}
    assert load_norm_spec({"kind": "lp", "p": "inf", "d": 3}) == NormSpec.lp(math.inf, 3)
    assert load_norm_spec({"kind": "mixed_k1", "k": 3, "d": 8}) == NormSpec.mixed_k1(3, 8)

    with pytest.raises(NormSpecError):
        load_norm_spec({"kind": "mixed_kinf", "k": 8, "d": 8})

    with pytest.raises(SerializationError):
        load_norm_spec({"kind": "lp", "d": 3})

    with pytest.raises(SerializationError):
        load_norm_spec({"kind": "lp", "p": "two", "d": 3})


def test_operator_documents():
    space = NormSpec.lp(2, 2)
    T = DenseOperator([[1 + 2j, 0], [0.5, -1]], space, space)
    document = loads(dumps(dump_operator(T)))
    assert document["data"][0] == [1.0, 2.0]
    assert np.array_equal(load_operator(document).entries, T.entries)

    with pytest.raises(SerializationError):
        load_operator({"rows": 2, "cols": 2, "data": [1, 2, 3],
                       "source": dump_norm_spec(space), "target": dump_norm_spec(space)})

    with pytest.raises(SerializationError):
        loads("[1, 2")


def test_dumps_is_deterministic():
    text = dumps({"b": np.float64(0.1), "a": [np.int64(1), 1j]})
    assert text == dumps({"a": [1, 1j], "b": 0.1})
    assert loads(text) == {"a": [1, [0.0, 1.0]], "b": 0.1}

    with pytest.raises(SerializationError):
        dumps({"value": float("nan")})


def test_decomposition_documents(diag31, cfg):
    D = run_deflation(diag31, cfg)
    restored = load_decomposition(loads(dumps(dump_decomposition(D))))
    assert restored.norms == D.norms
    assert restored.config == D.config
    for a, b in zip(restored.xi, D.xi):
        assert np.array_equal(a.entries, b.entries)

    with pytest.raises(SerializationError):
        load_decomposition({"kind": "deflation"})
