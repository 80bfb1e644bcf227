import numpy as np
import pytest

from oracles import EQ13, cholesky_lower, singular_values
from normfact.errors import MetricNotPD, ZeroMatrix
from normfact.factorization import decompose, reconstruct
from normfact.gsvd import MetricPair, eigen_residuals, gsvd_decompose, gsvd_step

V1 = np.array([-0.4197, 0.8393, 0.3455])


def random_pd(rng, k):
    G = rng.normal(size=(k, k))
    return G.T @ G + np.eye(k)


def up_to_sign(x, y):
    return min(np.abs(x - y).max(), np.abs(x + y).max())


def test_identity_metrics_reduce_to_svd():
    s = gsvd_step(EQ13, MetricPair.identity(3, 2))
    assert s.lam == pytest.approx(5.3191, abs=5e-5)
    assert up_to_sign(s.v, V1) <= 5e-5


def test_diagonal_row_metric():
    s = gsvd_step(np.eye(2), MetricPair(np.diag([4.0, 1.0]), np.eye(2)))
    assert s.lam == pytest.approx(2.0, rel=1e-12)
    assert abs(s.v[1]) <= 1e-12 * abs(s.v[0])


def test_zero_matrix():
    with pytest.raises(ZeroMatrix):
        gsvd_step(np.zeros((3, 2)), MetricPair.identity(3, 2))


@pytest.mark.parametrize("M", [
    np.array([[1.0, 2.0], [2.0, 1.0]]),
    np.array([[1.0, 0.5], [0.0, 1.0]]),
    np.zeros((2, 2)),
])
def test_metric_not_pd(M):
    with pytest.raises(MetricNotPD):
        MetricPair(M, np.eye(2))


def test_identity_decompose_matches_svd_steps(rng):
    for A in [EQ13] + [rng.integers(-5, 6, size=(4, 3)).astype(float) for _ in range(10)]:
        g = gsvd_decompose(A, MetricPair.identity(*A.shape))
        d = decompose(A, 2, 2)
        assert len(g) == len(d)
        for s, t in zip(g.steps, d.steps):
            for name in "abuv":
                np.testing.assert_allclose(getattr(s, name), getattr(t, name), atol=1e-8)
            assert s.lam == pytest.approx(t.lam, rel=1e-8)


def test_diagonal_identity_steps():
    d = gsvd_decompose(np.diag([5.0, 2.0]), MetricPair.identity(2, 2))
    np.testing.assert_allclose(d.lambdas, [5, 2])
    np.testing.assert_allclose(np.abs(d.steps[0].u), [1, 0], atol=1e-12)
    np.testing.assert_allclose(np.abs(d.steps[1].u), [0, 1], atol=1e-12)


def test_whitening_oracle_and_eigen_equations(rng):
    for _ in range(10):
        A = rng.normal(size=(4, 3))
        M, N = random_pd(rng, 4), random_pd(rng, 3)
        mp = MetricPair(M, N)
        d = gsvd_decompose(A, mp)
        LM, LN = cholesky_lower(M), cholesky_lower(N)
        np.testing.assert_allclose(d.lambdas, singular_values(LM.T @ A @ LN), rtol=1e-7)
        np.testing.assert_allclose(reconstruct(d), A, atol=1e-10)
        R = A.copy()
        for s in d.steps:
            res = eigen_residuals(R, mp, s)
            assert max(res.values()) <= 1e-8
            assert np.allclose(s.v, M @ s.a / np.sqrt(s.a @ M @ s.a), atol=1e-9)
            assert np.allclose(s.u, N @ s.b / np.sqrt(s.b @ N @ s.b), atol=1e-9)
            assert s.a @ M @ s.a == pytest.approx(s.b @ N @ s.b, rel=1e-9)
            assert s.a @ M @ s.a == pytest.approx(s.lam**2, rel=1e-9)
            R = R - np.outer(s.a, s.b) / s.lam
        for i, s in enumerate(d.steps):
            for t in d.steps[i + 1:]:
                assert abs(s.a @ M @ t.a) <= 1e-8 * s.lam * t.lam
                assert abs(s.b @ N @ t.b) <= 1e-8 * s.lam * t.lam


def test_column_metric_equation_needs_leading_metric_removed(rng):
    # N A'M A N b equals lam^2 N b, so it matches lam^2 b only when N = I
    A = rng.normal(size=(4, 3))
    M, N = random_pd(rng, 4), random_pd(rng, 3)
    s = gsvd_step(A, MetricPair(M, N))
    lhs = N @ A.T @ M @ A @ N @ s.b
    np.testing.assert_allclose(lhs, s.lam**2 * N @ s.b, rtol=1e-8)
    assert np.linalg.norm(lhs - s.lam**2 * s.b) > 1e-3 * s.lam**2 * np.linalg.norm(s.b)
