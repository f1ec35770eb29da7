"""
Tests dense operators, subspaces and operator norms.
"""
import math

import numpy as np
import pytest

from banachsvd import DecompositionConfig, DenseOperator, Functional, NormSpec, SubspaceBasis, \
    Vector, annihilator_basis, op_norm_oracle, op_norm_power, operator_norm
from banachsvd.exc import DependentFunctionalsError, DimensionMismatchError, \
    UnsupportedOracleError, ZeroRestrictionError
from banachsvd.operators.dense import identity_operator
from banachsvd.operators.power import duality_certificate, restriction_bound
from banachsvd.spaces.norms import unit_vector


def test_apply():
    space = NormSpec.lp(3, 3)
    x = Vector([1, -2, 0.5], space)
    assert np.array_equal(identity_operator(space).apply(x).entries, x.entries)

    T = DenseOperator(np.diag([2.0, -1.0, 0.5]), space, space)
    assert np.allclose(T.apply(unit_vector(space, 1)).entries, [0, -1, 0])

    Z = DenseOperator(np.zeros((2, 3)), space, NormSpec.lp(1, 2))
    assert not np.any(Z.apply(x).entries)
    assert Z.is_zero()

    with pytest.raises(DimensionMismatchError):
        T.apply(Vector([1, 2], NormSpec.lp(2, 2)))


def test_adjoint_identity(rng):
    source, target = NormSpec.lp(1.5, 2), NormSpec.mixed_k1(1, 3)
    T = DenseOperator(rng.standard_normal((3, 2)), source, target)
    g = Functional(rng.standard_normal(3), target)
    phi = T.adjoint_apply(g)
    for _ in range(100):
        x = Vector(rng.standard_normal(2), source)
        assert phi(x) == pytest.approx(g(T.apply(x)), abs=1e-12)

    assert T.transpose.source == target.dual()
    assert T.transpose.target == source.dual()


def test_adjoint_of_diagonal():
    space = NormSpec.lp(2, 3)
    T = DenseOperator(np.diag([1 + 1j, 2, 3]), space, space)
    g = Functional([1, 0, 0], space)
    assert np.allclose(T.adjoint_apply(g).entries, [1 + 1j, 0, 0])


def test_annihilator_examples():
    space = NormSpec.lp(2, 3)
    B = annihilator_basis([Functional([1, 0, 0], space)], space)
    assert B.dim == 2
    assert np.allclose(B.columns[0], 0)
    assert B.contains(Vector([0, 1, 0], space))
    assert B.contains(Vector([0, 0, 1], space))

    assert annihilator_basis([], space).is_full

    plane = NormSpec.lp(2, 2)
    B = annihilator_basis([Functional([1, 1], plane)], plane)
    column = B.columns[:, 0]
    assert np.allclose(np.abs(column), 1 / math.sqrt(2))
    assert column[0] * column[1] < 0


def test_annihilator_errors():
    space = NormSpec.lp(2, 2)
    with pytest.raises(DependentFunctionalsError):
        annihilator_basis([Functional([1, 0], space), Functional([0, 1], space)], space)

    with pytest.raises(DependentFunctionalsError):
        annihilator_basis([Functional([1, 1, 0], NormSpec.lp(2, 3)),
                           Functional([2, 2, 0], NormSpec.lp(2, 3))], NormSpec.lp(2, 3))


def test_power_diagonal(diag31, cfg):
    result = op_norm_power(diag31, cfg=cfg)
    assert result.value == pytest.approx(3, rel=1e-12)
    assert np.allclose(result.maximizer.entries, [1, 0], atol=1e-8)
    assert result.restarts_used >= cfg.restarts
    assert result.certificate_gap < 1e-9


def test_power_history_is_monotone(rng, cfg):
    space = NormSpec.lp(3, 4)
    T = DenseOperator(rng.standard_normal((4, 4)), space, NormSpec.lp(1.5, 4))
    result = op_norm_power(T, cfg=cfg)
    assert all(b >= a for a, b in zip(result.history, result.history[1:]))
    assert result.certificate_gap < 1e-5 * max(1.0, result.value)
    assert result.maximizer.norm() == pytest.approx(1, abs=1e-9)


def test_power_source_l1(rng, cfg):
    for _ in range(5):
        A = rng.standard_normal((3, 4))
        T = DenseOperator(A, NormSpec.lp(1, 4), NormSpec.lp(3, 3))
        expected = max(np.linalg.norm(A[:, j], 3) for j in range(4))
        assert op_norm_power(T, cfg=cfg).value == pytest.approx(expected, rel=1e-9)
        assert op_norm_oracle(T) == pytest.approx(expected, rel=1e-12)


def test_power_target_linf(rng, cfg):
    for _ in range(5):
        A = rng.standard_normal((3, 4))
        T = DenseOperator(A, NormSpec.lp(1.5, 4), NormSpec.lp(math.inf, 3))
        expected = max(np.linalg.norm(A[i], 3) for i in range(3))
        assert op_norm_power(T, cfg=cfg).value == pytest.approx(expected, rel=1e-9)
        assert op_norm_oracle(T) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("shape", [(5, 5), (4, 6), (6, 3)])
def test_power_spectral(shape, cfg):
    rng = np.random.default_rng(sum(shape))
    A = rng.standard_normal(shape)
    T = DenseOperator(A, NormSpec.lp(2, shape[1]), NormSpec.lp(2, shape[0]))
    result = op_norm_power(T, cfg=cfg)
    # the value is the one the iteration reached, checked against two independent references
    assert result.value == result.history[-1]
    assert result.value == pytest.approx(op_norm_oracle(T), rel=1e-8)
    assert result.value == pytest.approx(math.sqrt(np.linalg.eigvalsh(A.T @ A)[-1]), rel=1e-8)
    assert np.linalg.norm(A @ result.maximizer.entries) >= result.value * (1 - 1e-12)


def test_power_spectral_loose_tolerance():
    rng = np.random.default_rng(3)
    space = NormSpec.lp(2, 3)
    A = rng.standard_normal((3, 3))
    result = op_norm_power(DenseOperator(A, space, space),
                           cfg=DecompositionConfig(tol=1e-3, restarts=2, seed=1))
    assert result.value == result.history[-1]
    assert result.value <= np.linalg.norm(A, 2) * (1 + 1e-12)
    assert result.value == pytest.approx(np.linalg.norm(A, 2), rel=1e-2)


def test_power_on_subspace_is_smaller(rng, cfg):
    space = NormSpec.mixed_k1(2, 4)
    T = DenseOperator(rng.standard_normal((4, 4)), space, space)
    full = op_norm_power(T, cfg=cfg)
    B = annihilator_basis([Functional(rng.standard_normal(4), space)], space)
    restricted = op_norm_power(T, B, cfg=cfg)
    assert restricted.value <= full.value + 1e-9
    assert B.contains(restricted.maximizer, 1e-7)
    assert restricted.value <= restriction_bound(T, B) * (1 + 1e-12)


def test_power_zero_restriction(cfg):
    space = NormSpec.lp(2, 2)
    T = DenseOperator(np.diag([1.0, 0.0]), space, space)
    with pytest.raises(ZeroRestrictionError):
        op_norm_power(T, SubspaceBasis([[0], [1]], space), cfg)


def test_certificate_detects_bad_vector(diag31, cfg):
    assert duality_certificate(diag31, Vector([1, 0], diag31.source), cfg=cfg) < 1e-12
    assert duality_certificate(diag31, Vector([1, 1], diag31.source) * (1 / math.sqrt(2)),
                               cfg=cfg) > 0.5


def test_workers_are_deterministic(rng):
    space = NormSpec.lp(3, 3)
    T = DenseOperator(rng.standard_normal((3, 3)), space, space)
    serial = op_norm_power(T, cfg=DecompositionConfig(restarts=4, seed=5))
    threaded = op_norm_power(T, cfg=DecompositionConfig(restarts=4, seed=5, workers=3))
    assert threaded.value == pytest.approx(serial.value, rel=1e-12)
    assert np.allclose(threaded.maximizer.entries, serial.maximizer.entries, atol=1e-10)


def test_oracle_examples():
    T = DenseOperator([[1, 0], [0, 2]], NormSpec.lp(1, 2), NormSpec.lp(2, 2))
    assert op_norm_oracle(T) == pytest.approx(2)

    T = DenseOperator([[1, 1], [1, 1]], NormSpec.lp(2, 2), NormSpec.lp(2, 2))
    assert op_norm_oracle(T) == pytest.approx(2)


@pytest.mark.parametrize("columns", [2, 3])
def test_oracle_grid_agrees_with_power(rng, columns):
    cfg = DecompositionConfig(restarts=8, seed=3)
    source = NormSpec.mixed_k1(1, columns)
    target = NormSpec.mixed_kinf(1, 3)
    for _ in range(3):
        T = DenseOperator(rng.standard_normal((3, columns)), source, target)
        assert op_norm_power(T, cfg=cfg).value == pytest.approx(op_norm_oracle(T), abs=1e-4)


def test_oracle_unsupported(rng):
    space = NormSpec.mixed_k1(2, 4)
    with pytest.raises(UnsupportedOracleError):
        op_norm_oracle(DenseOperator(rng.standard_normal((4, 4)), space, space))

    complex_space = NormSpec.lp(3, 2)
    with pytest.raises(UnsupportedOracleError):
        op_norm_oracle(DenseOperator([[1j, 0], [0, 1]], complex_space, complex_space))


def test_operator_norm(diag31, cfg):
    assert operator_norm(diag31, cfg) == pytest.approx(3)
    space = NormSpec.lp(3, 2)
    assert operator_norm(DenseOperator(np.zeros((2, 2)), space, space), cfg) == 0
