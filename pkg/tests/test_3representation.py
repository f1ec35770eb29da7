"""
Tests the representation, truncation errors, the dual representation and the SVD comparison.
"""
import numpy as np
import pytest

from banachsvd import Decomposition, DenseOperator, Functional, NormSpec, Vector, compare_svd, \
    reconstruct, run_deflation, truncation_error, verify_decomposition
from banachsvd.exc import DimensionMismatchError, IndexRangeError, UnsupportedOracleError
from banachsvd.representation import dual_representation_check


@pytest.fixture(scope="module")
def example_decomposition(example_operator, cfg) -> Decomposition:
    return run_deflation(example_operator, cfg)


@pytest.fixture(scope="module")
def spectral(cfg):
    rng = np.random.default_rng(11)
    space = NormSpec.lp(2, 4)
    T = DenseOperator(rng.standard_normal((4, 4)), space, space)
    return T, run_deflation(T, cfg)


def test_reconstruct_full_rank(rng, example_operator, example_decomposition):
    T, D = example_operator, example_decomposition
    for _ in range(5):
        x = Vector(rng.standard_normal(T.source.d), T.source)
        assert np.allclose(reconstruct(D, T, D.rank, x).entries, T.apply(x).entries, atol=1e-8)
        assert not np.any(reconstruct(D, T, 0, x).entries)

    with pytest.raises(IndexRangeError):
        reconstruct(D, T, D.rank + 1, x)


def test_reconstruct_kernel_vector(rank2_operator, cfg):
    D = run_deflation(rank2_operator, cfg)
    for column in D.kernel_basis.columns.T:
        x = Vector(column, rank2_operator.source)
        assert np.abs(reconstruct(D, rank2_operator, D.rank, x).entries).max() < 1e-8
        assert np.abs(rank2_operator.apply(x).entries).max() < 1e-7 * D.norms[0]


def test_truncation_spectral(spectral):
    T, D = spectral
    sigma = np.linalg.svd(T.entries, compute_uv=False)
    assert D.rank == 4
    for m in range(D.rank):
        result = truncation_error(D, T, m)
        assert result.error == pytest.approx(sigma[m], rel=1e-6)
        assert result.bound_holds

    assert truncation_error(D, T, D.rank).error == pytest.approx(0, abs=1e-7 * sigma[0])


def test_truncation_example(example_operator, example_decomposition, cfg):
    T, D = example_operator, example_decomposition
    errors = []
    for m in range(D.rank + 1):
        result = truncation_error(D, T, m, cfg)
        assert result.bound_holds
        errors.append(result.error)

    assert errors[0] == pytest.approx(D.norms[0], rel=1e-7)
    assert errors[-1] == pytest.approx(0, abs=1e-7)
    # the diagonal example truncates exactly onto the remaining coordinates
    assert np.allclose(errors[:-1], D.norms, atol=1e-6)


def test_dual_representation(rng, example_operator, example_decomposition, cfg):
    T, D = example_operator, example_decomposition
    g = Functional(rng.standard_normal(T.target.d), T.target)
    result = dual_representation_check(D, T, g, cfg=cfg)
    assert result.deviation < 1e-7
    assert result.bound_holds
    assert len(result.dual_errors) == D.rank + 1

    nothing = dual_representation_check(D, T, g, 0, cfg, check_bounds=False)
    assert nothing.deviation == pytest.approx(T.adjoint_apply(g).norm(), rel=1e-12)
    assert nothing.dual_errors == []


def test_compare_svd_diagonal(cfg):
    space = NormSpec.lp(2, 3)
    T = DenseOperator(np.diag([3.0, 2.0, 1.0]), space, space)
    comparison = compare_svd(run_deflation(T, cfg), T)
    assert comparison.matched
    assert np.allclose(comparison.norms, [3, 2, 1])
    assert comparison.max_angle < 1e-6


def test_compare_svd_rectangular(cfg):
    rng = np.random.default_rng(5)
    T = DenseOperator(rng.standard_normal((6, 4)), NormSpec.lp(2, 4), NormSpec.lp(2, 6))
    D = run_deflation(T, cfg)
    comparison = compare_svd(D, T)
    assert D.rank == 4
    assert comparison.matched
    assert comparison.max_value_error < 1e-7 * comparison.singular_values[0]


def test_compare_svd_repeated_values(cfg):
    space = NormSpec.lp(2, 3)
    T = DenseOperator(np.diag([2.0, 2.0, 1.0]), space, space)
    comparison = compare_svd(run_deflation(T, cfg), T)
    assert comparison.matched


def test_compare_svd_needs_euclidean(example_operator, example_decomposition):
    with pytest.raises(UnsupportedOracleError):
        compare_svd(example_decomposition, example_operator)


def test_verify_passes(example_operator, example_decomposition, cfg):
    report = verify_decomposition(example_decomposition, example_operator, cfg)
    assert report.passed, [r.name for r in report.failures]
    assert report["biorthogonality"].measured < 1e-7

    document = report.to_dict()
    assert document["passed"]
    assert {p["name"] for p in document["properties"]} >= {
        "biorthogonality", "kernel", "reconstruction", "truncation_bound", "dual_representation"
    }


def test_verify_rank_deficient(rank2_operator, cfg):
    report = verify_decomposition(run_deflation(rank2_operator, cfg), rank2_operator, cfg)
    assert report.passed, [r.name for r in report.failures]


def test_verify_detects_corruption(example_operator, example_decomposition, cfg):
    D = example_decomposition
    xi = list(D.xi)
    xi[0] = xi[0] + D.fs[1] * 0.1
    broken = Decomposition(D.steps, xi, D.kernel_basis, D.source, D.target)
    report = verify_decomposition(broken, example_operator, cfg)
    assert not report.passed
    assert not report["biorthogonality"].passed
    assert report["biorthogonality"].measured == pytest.approx(0.1, abs=1e-6)


def test_verify_dimension_mismatch(example_decomposition, diag31, cfg):
    with pytest.raises(DimensionMismatchError):
        verify_decomposition(example_decomposition, diag31, cfg)
