"""
End to end checks of the decompositions against closed forms and the properties they promise.
"""
import math

import numpy as np
import pytest
from scipy import linalg

from banachsvd import DecompositionConfig, DenseOperator, Functional, NormSpec, SolverConfig, \
    annihilator_basis, compare_svd, eigen_deflate, fixed_point_functional, hahn_banach_extend, \
    make_mixed_diagonal, op_norm_oracle, op_norm_power, reconstruct, run_deflation, \
    truncation_error
from banachsvd.deflation.biorthogonal import biorthogonality_error
from banachsvd.deflation.diagnostics import kernel_check, metric_projection_check, \
    nesting_errors
from banachsvd.eigen import example_ground_truth
from banachsvd.representation import dual_representation_check
from banachsvd.spaces.minnorm import minimal_extension
from banachsvd.spaces.norms import Vector

from conftest import EXAMPLE_ALPHA


@pytest.fixture(scope="module")
def suite(cfg):
    """
    Decompositions of a few operators between different spaces.
    """
    rng = np.random.default_rng(99)
    operators = [
        DenseOperator(rng.standard_normal((3, 3)), NormSpec.lp(1.5, 3), NormSpec.lp(3, 3)),
        DenseOperator(rng.standard_normal((4, 3)), NormSpec.mixed_k1(1, 3), NormSpec.lp(2, 4)),
        DenseOperator(rng.standard_normal((3, 4)), NormSpec.lp(2, 4), NormSpec.lp(1.5, 3)),
        DenseOperator(rng.standard_normal((4, 4)), NormSpec.lp(3, 4), NormSpec.mixed_kinf(2, 4)),
        DenseOperator(rng.standard_normal((5, 4)), NormSpec.lp(2, 4), NormSpec.lp(2, 5)),
        make_mixed_diagonal([0.3, -0.7, 0.5, 0.9], 2),
    ]
    return [(T, run_deflation(T, cfg)) for T in operators]


@pytest.mark.parametrize("seed", range(20))
def test_hilbert_specialization(seed, cfg):
    rng = np.random.default_rng(seed)
    shape = (int(rng.integers(2, 13)), int(rng.integers(2, 9)))
    T = DenseOperator(rng.standard_normal(shape), NormSpec.lp(2, shape[1]),
                      NormSpec.lp(2, shape[0]))
    D = run_deflation(T, cfg)
    sigma = linalg.svdvals(T.entries)
    assert D.rank == min(shape)
    assert np.max(np.abs(np.array(D.norms) - sigma) / sigma) <= 1e-7
    assert compare_svd(D, T).max_value_error <= 1e-7 * sigma[0]
    for m in range(D.rank):
        assert truncation_error(D, T, m, cfg).error == pytest.approx(sigma[m], abs=1e-6)


def test_exact_endpoints(rng, cfg):
    for _ in range(20):
        A = rng.standard_normal((3, 4))
        T = DenseOperator(A, NormSpec.lp(1, 4), NormSpec.mixed_k1(1, 3))
        expected = max(T.target.evaluate(A[:, j]) for j in range(4))
        assert op_norm_power(T, cfg=cfg).value == pytest.approx(expected, abs=1e-9)

        T = DenseOperator(A, NormSpec.lp(3, 4), NormSpec.lp(math.inf, 3))
        expected = max(T.source.dual().evaluate(row) for row in A)
        assert op_norm_power(T, cfg=cfg).value == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("source, target", [
    (NormSpec.lp(2, 4), NormSpec.lp(2, 3)),
    (NormSpec.lp(1, 4), NormSpec.lp(3, 3)),
    (NormSpec.lp(1, 3), NormSpec.mixed_k1(2, 5)),
    (NormSpec.lp(1.5, 4), NormSpec.lp(math.inf, 3)),
    (NormSpec.mixed_kinf(1, 3), NormSpec.lp(math.inf, 4)),
], ids=repr)
def test_adjoint_has_the_same_norm(source, target, rng):
    for _ in range(5):
        T = DenseOperator(rng.standard_normal((target.d, source.d)), source, target)
        assert op_norm_oracle(T.transpose) == pytest.approx(op_norm_oracle(T), rel=1e-10)


@pytest.mark.parametrize("d, k", [(d, k) for d in (4, 6, 10) for k in (1, 2, 3)])
def test_example_reproduction(d, k, cfg):
    rng = np.random.default_rng(d * 10 + k)
    alpha = rng.permutation(np.linspace(1.0, 1.0 / d, d)) * rng.choice([-1.0, 1.0], size=d)
    T = make_mixed_diagonal(alpha, k)
    D = eigen_deflate(T, cfg)
    truth = example_ground_truth(alpha)

    order = [int(np.argmax(np.abs(x.entries))) + 1 for x in D.xs]
    assert order == truth["order"]
    assert np.allclose(D.lambdas, truth["lambdas"], atol=1e-8)
    for f, xi, e in zip(D.fs, D.xi, truth["functionals"]):
        assert np.allclose(f.entries, e, atol=1e-7)
        assert np.allclose(xi.entries, e, atol=1e-7)

    assert D.diagnostics["S_sup"] <= 1 + 1e-6
    x = Vector(rng.standard_normal(d), T.source)
    assert np.allclose(reconstruct(D, T, D.rank, x).entries, T.apply(x).entries, atol=1e-8)


def test_example_dual_representation(example_operator, cfg):
    D = eigen_deflate(example_operator, cfg)
    truth = example_ground_truth(EXAMPLE_ALPHA)
    identity = np.eye(len(EXAMPLE_ALPHA))
    for j, (n, lam) in enumerate(zip(truth["order"], truth["lambdas"])):
        # the norming functional of T x_j = λ_j e_n
        g = Functional(np.sign(lam) * identity[n - 1], example_operator.target)
        image = example_operator.adjoint_apply(g)
        assert np.allclose(image.entries, abs(lam) * identity[n - 1])

        before = dual_representation_check(D, example_operator, g, j, cfg, check_bounds=False)
        after = dual_representation_check(D, example_operator, g, j + 1, cfg,
                                          check_bounds=False)
        assert before.deviation == pytest.approx(abs(lam), abs=1e-7)
        assert after.deviation <= 1e-7


def test_biorthogonality_and_nesting(suite):
    for T, D in suite:
        assert biorthogonality_error(D.xi, D.xs) <= 1e-7
        f_err, g_err = nesting_errors(D, T)
        assert f_err <= 1e-7
        assert g_err <= 1e-7 * max(1.0, D.norms[0])


@pytest.mark.parametrize("space", [
    NormSpec.lp(1.5, 4), NormSpec.lp(2, 4), NormSpec.lp(3, 4), NormSpec.mixed_k1(2, 4)
], ids=repr)
def test_kernel_characterization(space, cfg):
    rng = np.random.default_rng(17)
    for i in range(10):
        k = i % 3 + 1
        matrix = rng.standard_normal((4, k)) @ rng.standard_normal((k, 4))
        T = DenseOperator(matrix, space, space)
        D = run_deflation(T, cfg)
        assert D.rank == k
        assert D.kernel_basis.dim == 4 - k
        record = kernel_check(D, T)
        assert record["image_max"] <= 1e-7
        assert record["annihilation_max"] <= 1e-7


def test_metric_projection(rng, suite, cfg):
    pairs = 0
    while pairs < 50:
        for T, D in suite:
            x = Vector(rng.standard_normal(T.source.d), T.source)
            for n in range(1, D.rank + 1):
                assert metric_projection_check(D, x, n, cfg) <= 1e-5 * x.norm()
                pairs += 1


def test_truncation_bounds(rng, suite, cfg):
    for T, D in suite:
        for m in range(D.rank + 1):
            result = truncation_error(D, T, m, cfg)
            assert result.error <= result.bound + 1e-6

        g = Functional(rng.standard_normal(T.target.d), T.target)
        dual = dual_representation_check(D, T, g, cfg=cfg)
        assert dual.bound_holds
        assert all(a <= b + 1e-6 for a, b in zip(dual.dual_errors, dual.primal_errors))


@pytest.mark.parametrize("p", [2, 4])
def test_fixed_point_diagonal(p, cfg):
    rng = np.random.default_rng(p)
    space = NormSpec.lp(p, 3)
    for _ in range(10):
        alpha = rng.uniform(0.1, 1.0, 3)
        T = DenseOperator(np.diag(alpha), space, space)
        top = int(np.argmax(alpha))
        a = Vector(np.eye(3)[top], space)
        result = fixed_point_functional(T, a, 1.0, cfg)
        assert result.residual <= 1e-6


def _symmetric_psd(rng: np.random.Generator, p: int):
    if p == 2:
        half = rng.standard_normal((4, 4))
        values, vectors = np.linalg.eigh(half @ half.T)
        return values, vectors

    # orthonormal eigenvectors with entries ±1/2, so their duality maps stay eigenvectors
    hadamard = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]) / 2
    signs = rng.choice([-1.0, 1.0], size=4)
    vectors = (signs[:, None] * hadamard)[rng.permutation(4)]
    values = np.sort(rng.uniform(0.1, 1.0, 4))
    return values, vectors


@pytest.mark.parametrize("p", [2, 4])
def test_fixed_point_symmetric(p, cfg):
    rng = np.random.default_rng(8 + p)
    space = NormSpec.lp(p, 4)
    for _ in range(10):
        values, vectors = _symmetric_psd(rng, p)
        T = DenseOperator(vectors @ np.diag(values) @ vectors.T, space, space)
        a = Vector(vectors[:, -1], space)
        a = Vector(a.entries / a.norm(), space)
        result = fixed_point_functional(T, a, 1.0, cfg)
        assert result.residual <= 1e-6 * values[-1]


@pytest.mark.parametrize("p", [1.5, 2, 3])
def test_hahn_banach_extension(p):
    rng = np.random.default_rng(int(10 * p))
    space = NormSpec.lp(p, 4)
    solver = SolverConfig()
    for _ in range(17):
        B = annihilator_basis([Functional(rng.standard_normal(4), space)], space)
        phi = rng.standard_normal(B.dim)
        phi /= minimal_extension(phi, B.columns, space, solver).value
        f = hahn_banach_extend(phi, B, cfg=solver)
        assert 1 - 1e-7 <= f.norm() <= 1 + 1e-6
        assert np.abs(B.columns.T @ f.entries - phi).max() <= 1e-9
        if p == 2:
            assert np.allclose(f.entries, np.linalg.pinv(B.columns.T) @ phi, atol=1e-10)


@pytest.mark.parametrize("columns", [2, 3])
def test_brute_force_agreement(columns):
    rng = np.random.default_rng(columns)
    cfg = DecompositionConfig(restarts=8, seed=21)
    source = NormSpec.mixed_kinf(1, columns)
    target = NormSpec.mixed_k1(1, 3)
    for _ in range(10):
        T = DenseOperator(rng.standard_normal((3, columns)), source, target)
        assert op_norm_power(T, cfg=cfg).value == pytest.approx(op_norm_oracle(T), abs=1e-4)
