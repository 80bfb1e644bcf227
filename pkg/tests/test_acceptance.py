"""Exit criteria for the package, one test per criterion."""
import math
import timeit

import numpy as np
import pytest

from oracles import (
    EQ13,
    brute_1_to_p,
    brute_inf_to_p,
    cholesky_lower,
    exact_rank,
    jacobi_eigh,
    pairwise_distances,
    random_int_matrix,
    singular_values,
)
from normfact import (
    MetricPair,
    conjugate,
    decompose,
    double_center,
    eigen_residuals,
    gsvd_decompose,
    induced_norm,
    mds_embed,
    multi_start,
    norming_functional,
    p_norm,
    power_iterate,
    reconstruct,
    wedderburn_diagnostics,
)

INF = math.inf
S5 = math.sqrt(5)


def max_rel(actual, expected):
    actual, expected = np.asarray(actual, float), np.asarray(expected, float)
    return float(np.abs(actual - expected).max() / np.abs(expected).max())


def up_to_sign(x, y):
    x, y = np.asarray(x), np.asarray(y)
    return float(min(np.abs(x - y).max(), np.abs(x + y).max()))


def step_errors(step, lam, a, b, u, v):
    return max(
        abs(step.lam - lam) / lam,
        max_rel(step.a, a), max_rel(step.b, b), max_rel(step.u, u), max_rel(step.v, v),
    )


def test_criterion_01_norming_functionals(criterion):
    x = np.array([1.0, 2.0, -1.0, -2.0])
    cases = {
        2: (math.sqrt(10), x / math.sqrt(10)),
        1: (6.0, [1, 1, -1, -1]),
        3: (18 ** (1 / 3), np.array([1, 4, -1, -4]) / 18 ** (2 / 3)),
        INF: (2.0, [0, 1, 0, 0]),
    }
    err = 0.0
    for p, (norm, phi) in cases.items():
        res = norming_functional(x, p)
        err = max(err, abs(res.norm_value - norm) / norm, max_rel(res.phi, phi),
                  abs(res.phi @ x - norm) / norm)
    criterion(1, "norming functionals for p = 1, 2, 3, inf", err <= 1e-12, f"max rel err {err:.1e}")


def test_criterion_02_taxicab(criterion):
    d = decompose(EQ13, INF, 1)
    s1, s2 = d.steps
    err = max(
        step_errors(s1, 11, [3, -6, -2], [3, -8], [1, -1], [1, -1, -1]),
        step_errors(s2, 24 / 11, np.array([1, -2, 3]) * 4 / 11, np.array([1, 1]) * 12 / 11, [1, 1], [1, -1, 1]),
        max_rel(s1.term(), np.outer([3, -6, -2], [3, -8]) / 11),
        max_rel(s2.term(), np.outer([1, -2, 3], [1, 1]) * 2 / 11),
    )
    seconds = min(timeit.repeat(lambda: decompose(EQ13, INF, 1), number=20, repeat=5)) / 20
    ok = len(d) == 2 and err <= 1e-12 and seconds < 1e-3
    criterion(2, "taxicab decomposition (11, 24/11)", ok, f"max rel err {err:.1e}, {seconds * 1e3:.3f} ms")


def test_criterion_03_centroid(criterion):
    s1, s2 = decompose(EQ13, INF, 2).steps
    a2 = np.array([2, -4, 15]) * 4 / 49
    err = max(
        step_errors(s1, 7, [3, -6, -2], np.array([15, -34]) / 7, [1, -1], np.array([3, -6, -2]) / 7),
        step_errors(s2, 4 * S5 / 7, a2, np.array([1, 1]) * 2 * S5 / 7, [1, 1], np.array([2, -4, 15]) / (7 * S5)),
        max_rel(s1.term(), np.outer([3, -6, -2], [15, -34]) / 49),
        max_rel(s2.term(), np.outer([2, -4, 15], [1, 1]) * 2 / 49),
    )
    criterion(3, "centroid decomposition (7, 4*sqrt(5)/7)", err <= 1e-12, f"max rel err {err:.1e}")


def test_criterion_04_extreme(criterion):
    s1, s2 = decompose(EQ13, 1, INF).steps
    err = max(
        step_errors(s1, 4, [-2, 4, 2], [-2, 4], [0, 1], [0, 1, 0]),
        step_errors(s2, 1, [0, 0, 1], [1, 0], [1, 0], [0, 0, 1]),
        max_rel(s1.term(), np.outer([-2, 4, 2], [-2, 4]) / 4),
        max_rel(s2.term(), np.outer([0, 0, 1], [1, 0])),
    )
    criterion(4, "extreme 1->inf decomposition (4, 1)", err <= 1e-12, f"max rel err {err:.1e}")


SVD_PRINTED = [
    (5.3191, [-0.4197, 0.8393, 0.3455], [-0.3945, 0.9189]),
    (0.8408, [-0.1545, 0.3090, -0.9384], [-0.9189, -0.3945]),
]


def svd_error(steps):
    err = 0.0
    for s, (lam, v, u) in zip(steps, SVD_PRINTED):
        joint = min(max(np.abs(s.v - v).max(), np.abs(s.u - u).max()),
                    max(np.abs(s.v + v).max(), np.abs(s.u + u).max()))
        err = max(err, abs(s.lam - lam), joint)
    return err


def test_criterion_05_svd(criterion):
    d = decompose(EQ13, 2, 2)
    err = svd_error(d.steps)
    criterion(5, "SVD (5.3191, 0.8408) and singular vectors", len(d) == 2 and err <= 5e-5, f"max abs err {err:.1e}")


def test_criterion_06_duality(criterion):
    rng = np.random.default_rng(6)
    pairs = [(INF, 1), (INF, 2), (2, 2), (1, INF), (1, 2)]
    worst, uncertified, oracle_err = 0.0, 0, 0.0
    for _ in range(200):
        A = random_int_matrix(rng, 8, 8)
        for r, p in pairs:
            rep = induced_norm(A, r, p)
            dual = induced_norm(A.T, conjugate(p), conjugate(r))
            uncertified += (not rep.certified) + (not dual.certified)
            worst = max(worst, abs(rep.step.lam - dual.step.lam) / rep.step.lam)
            if r == INF:
                ref = brute_inf_to_p(A, p)
            elif r == 1:
                ref = brute_1_to_p(A, p)
            else:
                ref = singular_values(A)[0]
            oracle_err = max(oracle_err, abs(rep.step.lam - ref) / ref)
    ok = worst <= 1e-9 and uncertified == 0 and oracle_err <= 1e-9
    criterion(6, "duality on 200 random integer matrices, five exact pairs", ok,
              f"max rel gap {worst:.1e}, vs brute force {oracle_err:.1e}")


def test_criterion_07_wedderburn(criterion):
    rng = np.random.default_rng(7)
    eq89, recon, rank_mismatch, count = 0.0, 0.0, 0, 0
    for r, p in [(INF, 1), (INF, 2), (1, INF), (2, 2)]:
        for _ in range(50):
            X = random_int_matrix(rng)
            d = decompose(X, r, p)
            diag = wedderburn_diagnostics(X, d)
            eq89 = max(eq89, diag["eq8_max"], diag["eq9_max"])
            recon = max(recon, np.abs(reconstruct(d) - X).max() / np.abs(X).max())
            rank_mismatch += len(d) != exact_rank(X)
            count += 1
    ok = eq89 <= 1e-9 and recon <= 1e-8 and rank_mismatch == 0
    criterion(7, f"Wedderburn identities on {count} decompositions", ok,
              f"eq8/9 {eq89:.1e}, recon {recon:.1e}, rank mismatches {rank_mismatch}")


def test_criterion_08_monotonicity(criterion):
    rng = np.random.default_rng(8)
    runs = violations = 0
    pairs = [(INF, 1), (INF, 2), (2, 2), (3, 3), (1.5, 4), (2, 1), (4, 1.25), (1.1, INF)]
    for _ in range(25):
        A = rng.normal(size=tuple(rng.integers(1, 7, size=2)))
        for r, p in pairs:
            starts = list(A) + [A.T @ norming_functional(c, p).phi for c in A.T if np.any(c)]
            for b0 in starts:
                if not np.any(b0):
                    continue
                h = np.array(power_iterate(A, r, p, b0, max_iter=2000).history)
                runs += 1
                violations += int(np.sum(np.diff(h) < -1e-12 * np.maximum(1.0, h[:-1])))
    criterion(8, f"power-method values nondecreasing over {runs} runs", violations == 0,
              f"{violations} violations")


def test_criterion_09_mds(criterion):
    rng = np.random.default_rng(9)
    dist_err = gram_err = oracle_err = 0.0
    min_eig = 0.0
    for _ in range(20):
        n, dim = int(rng.integers(2, 11)), int(rng.integers(1, 5))
        D = pairwise_distances(rng.normal(size=(n, dim)))
        Q = double_center(D)
        norm2 = np.linalg.eigvalsh(Q)[-1]
        emb = mds_embed(D, 2)
        dist_err = max(dist_err, np.abs(emb.distances() - D).max())
        w, V = jacobi_eigh(Q)
        k = emb.k
        oracle_err = max(oracle_err, np.abs(emb.gram() - (V[:, :k] * w[:k]) @ V[:, :k].T).max())
        for r in (INF, 1):
            emb = mds_embed(D, r)
            gram_err = max(gram_err, np.abs(emb.gram() - Q).max())
            R = Q.copy()
            for f in emb.coordinates.T:
                R = R - np.outer(f, f)
                min_eig = min(min_eig, np.linalg.eigvalsh(R)[0] / norm2)
    ok = dist_err <= 1e-8 and gram_err <= 1e-8 and oracle_err <= 1e-8 and min_eig >= -1e-9
    criterion(9, "MDS family on 20 random point clouds", ok,
              f"dist {dist_err:.1e}, gram {gram_err:.1e}, eigen oracle {oracle_err:.1e}, min eig {min_eig:.1e}")


def test_criterion_10_gsvd(criterion):
    ident = gsvd_decompose(EQ13, MetricPair.identity(3, 2))
    svd = decompose(EQ13, 2, 2)
    step_gap = max(max(np.abs(getattr(s, f) - getattr(t, f)).max() for f in "abuv")
                   for s, t in zip(ident.steps, svd.steps))
    printed = svd_error(ident.steps)
    rng = np.random.default_rng(10)
    sv_err = eig_err = 0.0
    for _ in range(20):
        m, n = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        A = rng.normal(size=(m, n))
        Gm, Gn = rng.normal(size=(m, m)), rng.normal(size=(n, n))
        M, N = Gm.T @ Gm + np.eye(m), Gn.T @ Gn + np.eye(n)
        mp = MetricPair(M, N)
        d = gsvd_decompose(A, mp)
        ref = singular_values(cholesky_lower(M).T @ A @ cholesky_lower(N))[: len(d)]
        sv_err = max(sv_err, float(np.abs(d.lambdas - ref).max() / ref[0]))
        R = A.copy()
        for s in d.steps:
            eig_err = max(eig_err, max(eigen_residuals(R, mp, s).values()))
            R = R - np.outer(s.a, s.b) / s.lam
    ok = len(ident) == 2 and step_gap <= 1e-8 and printed <= 5e-5 and sv_err <= 1e-7 and eig_err <= 1e-8
    criterion(10, "GSVD identity reduction, whitening oracle, eigen-equations", ok,
              f"identity gap {step_gap:.1e}, printed {printed:.1e}, sv {sv_err:.1e}, eigen {eig_err:.1e}")


def test_criterion_11_excluded(criterion):
    pytest.skip("criterion 11: the published correlation table needs an external dataset; "
                "criterion 9 covers the MDS machinery")
