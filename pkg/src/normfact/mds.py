"""Euclidean multidimensional scaling driven by ``||F||_{r->2}``.

Squared dissimilarities are double centered into a Gram matrix ``Q``, and
each dimension maximizes ``u' Q u`` over the unit ``r``-sphere: ``r = 2``
gives classical MDS, ``r = inf`` centroid MDS and ``r = 1`` dominant MDS.
Dimensions are peeled off by the Schur-complement deflation
``Q - Q u u' Q / (u' Q u)``, which keeps every residual positive
semidefinite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDissimilarity, NotPSD, TooLarge
from .induced import DEFAULT_CAP, dominant_eigenpair, multi_start, sign_vectors
from .norms import Exponent, ExponentLike, as_exponent, p_norm

__all__ = [
    "Embedding",
    "double_center",
    "maximize_quadratic",
    "mds_embed",
    "validate_dissimilarity",
]

_EPS = np.finfo(float).eps


@dataclass
class Embedding:
    """Coordinates (one column per dimension), values ``u'Qu`` and axes.

    ``axes[k]`` is the unit ``r``-sphere vector selected for dimension ``k``.
    ``values`` are reported in extraction order and are not sorted.
    """

    coordinates: np.ndarray
    values: np.ndarray
    axes: np.ndarray
    r: Exponent
    certified: bool = True

    @property
    def k(self) -> int:
        return self.coordinates.shape[1]

    def gram(self) -> np.ndarray:
        return self.coordinates @ self.coordinates.T

    def distances(self) -> np.ndarray:
        # explicit differences avoid the cancellation of |f_i|^2 + |f_j|^2 - 2 f_i'f_j
        F = self.coordinates
        diff = F[:, None, :] - F[None, :, :]
        return np.sqrt(np.sum(diff**2, axis=2))


def validate_dissimilarity(delta, tol: float = 1e-12) -> np.ndarray:
    """Check symmetry, nonnegativity and zero diagonal; name the first offender."""
    D = np.asarray(delta, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.size == 0:
        raise InvalidDissimilarity(f"dissimilarity matrix must be square, got shape {D.shape}")
    n = D.shape[0]
    scale = max(1.0, float(np.abs(D).max())) if np.all(np.isfinite(D)) else 1.0
    for i in range(n):
        for j in range(n):
            x = D[i, j]
            if not np.isfinite(x):
                raise InvalidDissimilarity(f"entry ({i}, {j}) is not finite: {x!r}")
            if x < 0:
                raise InvalidDissimilarity(f"entry ({i}, {j}) is negative: {x!r}")
            if i == j and x != 0:
                raise InvalidDissimilarity(f"diagonal entry ({i}, {i}) is nonzero: {x!r}")
            if abs(x - D[j, i]) > tol * scale:
                raise InvalidDissimilarity(
                    f"entry ({i}, {j}) = {x!r} differs from entry ({j}, {i}) = {D[j, i]!r}"
                )
    return D


def double_center(delta) -> np.ndarray:
    """``Q = -1/2 H (delta**2) H`` with ``H = I - 11'/n``."""
    D = validate_dissimilarity(delta)
    n = D.shape[0]
    D2 = D**2
    # H D2 H without forming H
    C = D2 - D2.mean(axis=0, keepdims=True)
    C = C - C.mean(axis=1, keepdims=True)
    Q = -0.5 * C
    return 0.5 * (Q + Q.T)


def _max_quadratic_signs(Q, cap, chunk=1 << 14):
    n = Q.shape[0]
    if n > cap:
        raise TooLarge(f"sign enumeration over n={n} objects exceeds cap={cap}")
    total = 1 << (n - 1)
    best_val, best_u = -np.inf, None
    for start in range(0, total, chunk):
        S = sign_vectors(n, start, min(start + chunk, total))
        vals = np.einsum("ij,ij->i", S @ Q, S)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_u = float(vals[j]), S[j].copy()
    return best_u


def maximize_quadratic(Q, r: ExponentLike, cap: int = DEFAULT_CAP, tol: float = 1e-12):
    """Maximize ``u' Q u`` over the unit ``r``-sphere for PSD ``Q``.

    Returns ``(u, certified)``.  ``r`` in ``{1, 2, inf}`` is solved exactly;
    any other ``r`` runs the multi-start power method on ``Q**(1/2)``.
    """
    r = as_exponent(r)
    Q = np.asarray(Q, dtype=float)
    if r.is_inf:
        return _max_quadratic_signs(Q, cap), True
    if r.value == 1.0:
        u = np.zeros(Q.shape[0])
        u[int(np.argmax(np.diag(Q)))] = 1.0
        return u, True
    if r.value == 2.0:
        _, u, _, _ = dominant_eigenpair(Q, tol=tol)
        if u[int(np.argmax(np.abs(u)))] < 0:
            u = -u
        return u, True
    w, V = np.linalg.eigh(Q)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    rep = multi_start(root, r, 2)
    u = rep.step.u / p_norm(rep.step.u, r)
    return u, False


def mds_embed(
    delta,
    r: ExponentLike = 2,
    k: int | None = None,
    tol: float = 1e-12,
    strict: bool = True,
    cap: int = DEFAULT_CAP,
) -> Embedding:
    """Embed ``n`` objects in ``k`` dimensions from their dissimilarities.

    Extraction stops early once the largest diagonal entry of the residual
    Gram matrix, or the next value ``u'Qu``, falls to ``tol`` times the
    largest diagonal entry of ``Q``.

    With ``strict=True`` a Gram matrix whose smallest eigenvalue is below
    ``-n * eps * ||Q||_2`` raises ``NotPSD``; with ``strict=False`` it is
    embedded anyway and dimensions stop at the first nonpositive value.
    """
    r = as_exponent(r)
    Q = double_center(delta)
    n = Q.shape[0]
    k = n if k is None else int(k)
    if not 0 <= k <= n:
        raise ValueError(f"number of dimensions k={k} must lie in [0, {n}]")
    if strict and n > 1:
        w = np.linalg.eigvalsh(Q)
        norm2 = max(abs(w[0]), abs(w[-1]))
        if w[0] < -n * _EPS * norm2:
            raise NotPSD(
                f"Gram matrix has eigenvalue {w[0]:.3e} < 0: dissimilarities are not Euclidean"
            )
    scale = float(np.diag(Q).max()) if n else 0.0
    coords, values, axes = [], [], []
    certified = True
    R = Q.copy()
    while len(values) < k and scale > 0 and np.diag(R).max() > tol * scale:
        u, cert = maximize_quadratic(R, r, cap=cap)
        Ru = R @ u
        lam = float(u @ Ru)
        if lam <= tol * scale:
            break
        f = Ru / np.sqrt(lam)
        R = R - np.outer(f, f)
        R = 0.5 * (R + R.T)
        certified = certified and cert
        coords.append(f)
        values.append(lam)
        axes.append(u)
    F = np.column_stack(coords) if coords else np.zeros((n, 0))
    A = np.vstack(axes) if axes else np.zeros((0, n))
    return Embedding(F, np.array(values), A, r, certified)
