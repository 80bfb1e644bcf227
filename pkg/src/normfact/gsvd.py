"""Generalized SVD of a triple ``(A, M, N)`` with positive definite metrics.

The transition formulas become ``a = A u``, ``v = M a / sqrt(a'Ma)``,
``b = A' v``, ``u = N b / sqrt(b'Nb)``; at a fixed point ``a'Ma = b'Nb =
lam**2``.  The dispersion values are the singular values of ``L_M' A L_N``
where ``M = L_M L_M'`` and ``N = L_N L_N'``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, MetricNotPD, NoConvergence, ZeroMatrix
from .factorization import Decomposition, deflate
from .induced import FactorStep, _is_top_eigenvalue, _largest_v_positive, as_matrix

__all__ = ["MetricPair", "eigen_residuals", "gsvd_decompose", "gsvd_step"]


def _cholesky(S, name):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise MetricNotPD(f"metric {name} must be square, got shape {S.shape}")
    if not np.all(np.isfinite(S)) or np.abs(S - S.T).max() > 1e-12 * max(1.0, np.abs(S).max()):
        raise MetricNotPD(f"metric {name} is not symmetric")
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise MetricNotPD(f"metric {name} is not positive definite") from exc
    if np.diag(L).min() <= 1e-14 * np.sqrt(np.abs(S).max()):
        raise MetricNotPD(f"metric {name} is numerically singular")
    return L


@dataclass(frozen=True)
class MetricPair:
    """Row metric ``m_metric`` (m x m) and column metric ``n_metric`` (n x n)."""

    m_metric: np.ndarray
    n_metric: np.ndarray
    _lm: np.ndarray = field(init=False, repr=False, compare=False)
    _ln: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        M = np.asarray(self.m_metric, dtype=float)
        N = np.asarray(self.n_metric, dtype=float)
        object.__setattr__(self, "m_metric", M)
        object.__setattr__(self, "n_metric", N)
        object.__setattr__(self, "_lm", _cholesky(M, "M"))
        object.__setattr__(self, "_ln", _cholesky(N, "N"))

    @classmethod
    def identity(cls, m: int, n: int) -> "MetricPair":
        return cls(np.eye(m), np.eye(n))

    def whiten(self, A) -> np.ndarray:
        """``L_M' A L_N``, whose ordinary SVD carries the generalized one."""
        return self._lm.T @ A @ self._ln

    def check_shape(self, A):
        m, n = A.shape
        if self.m_metric.shape != (m, m) or self.n_metric.shape != (n, n):
            raise DimensionMismatch(
                f"metrics of shapes {self.m_metric.shape}, {self.n_metric.shape} "
                f"do not fit a {m}x{n} matrix"
            )


def _iterate(A, M, N, b, tol, max_iter):
    u = None
    for it in range(1, max_iter + 1):
        Nb = N @ b
        u_new = Nb / np.sqrt(b @ Nb)
        a = A @ u_new
        Ma = M @ a
        aMa = a @ Ma
        if aMa <= 0:
            return None, it
        v = Ma / np.sqrt(aMa)
        b = A.T @ v
        if u is not None and np.linalg.norm(u_new - u) <= tol * np.linalg.norm(u_new):
            u = u_new
            break
        u = u_new
    else:
        raise NoConvergence(f"metric transition formulas did not converge in {max_iter} iterations")
    return FactorStep(a=a, b=b, u=u, v=v, lam=float(v @ a)), it


def gsvd_step(A, metrics: MetricPair, b_start=None, tol: float = 1e-12, max_iter: int = 100_000) -> FactorStep:
    """Dominant generalized singular quintuple of ``A`` under ``(M, N)``.

    Alternates the metric transition formulas until the axis ``u`` moves by
    at most ``tol`` (relative).  The result is checked against the top
    eigenvalue of the whitened cross-product; if the start converged to a
    subdominant pair, the iteration restarts from the canonical basis.
    The pair is flipped so the largest entry of ``|v|`` is positive.
    """
    A = as_matrix(A)
    metrics.check_shape(A)
    if not np.any(A):
        raise ZeroMatrix("the zero matrix has no dominant term")
    M, N = metrics.m_metric, metrics.n_metric
    n = A.shape[1]
    W = metrics.whiten(A)
    G = W.T @ W
    first = np.ones(n) if b_start is None else np.asarray(b_start, dtype=float)
    if first.shape != (n,):
        raise DimensionMismatch(f"b_start must have length {n}")
    for b0 in [first] + [np.eye(n)[j] for j in range(n)]:
        if not np.any(b0):
            continue
        step, _ = _iterate(A, M, N, b0, tol, max_iter)
        if step is None or not step.lam > 0:
            continue
        if _is_top_eigenvalue(G, step.lam**2):
            return _largest_v_positive(step)
    raise NoConvergence("no start reached the dominant generalized singular pair")


def gsvd_decompose(
    A,
    metrics: MetricPair,
    max_steps: int | None = None,
    rank_tol: float = 1e-10,
    tol: float = 1e-12,
    max_iter: int = 100_000,
) -> Decomposition:
    """Stepwise generalized SVD with ``X - a b' / lam`` deflation."""
    A = as_matrix(A)
    metrics.check_shape(A)
    m, n = A.shape
    limit = min(m, n) if max_steps is None else min(max_steps, m, n)
    scale = float(np.abs(A).max())
    steps = []
    R = A.copy()
    while len(steps) < limit and scale > 0 and np.abs(R).max() > rank_tol * scale:
        s = gsvd_step(R, metrics, tol=tol, max_iter=max_iter)
        steps.append(s)
        R = deflate(R, s)
    method = {"kind": "gsvd", "tol": tol, "rank_tol": rank_tol}
    return Decomposition(steps, (m, n), method, float(np.abs(R).max()), True)


def eigen_residuals(A, metrics: MetricPair, step: FactorStep) -> dict:
    """Relative residuals of the four generalized eigen-equations at ``step``.

    The eigenvalue is ``lam**2``.  Keys: ``v`` for ``M A N A' v``, ``u`` for
    ``N A' M A u``, ``a`` for ``A N A' M a`` and ``b`` for ``A' M A N b``.
    """
    A = as_matrix(A)
    M, N = metrics.m_metric, metrics.n_metric
    l2 = step.lam**2

    def rel(lhs, x):
        return float(np.linalg.norm(lhs - l2 * x) / (l2 * np.linalg.norm(x)))

    return {
        "v": rel(M @ A @ N @ A.T @ step.v, step.v),
        "u": rel(N @ A.T @ M @ A @ step.u, step.u),
        "a": rel(A @ N @ A.T @ M @ step.a, step.a),
        "b": rel(A.T @ M @ A @ N @ step.b, step.b),
    }
