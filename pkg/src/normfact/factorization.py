"""Stepwise biconjugate decomposition by Wedderburn rank-one deflation.

Each step extracts a quintuple from the current residual and subtracts the
rank-one term ``a b' / lam``.  The sum of the extracted terms reconstitutes
the input.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NoExactSolver,
    NormingOfZero,
    NotSymmetric,
    NotTranspositionInvariant,
)
from .induced import (
    DEFAULT_CAP,
    FactorStep,
    as_matrix,
    exact_route,
    induced_norm,
    multi_start,
)
from .norms import ExponentLike, as_exponent

__all__ = [
    "Decomposition",
    "SymmetricDecomposition",
    "decompose",
    "decompose_symmetric",
    "deflate",
    "projector_a",
    "projector_b",
    "reconstruct",
    "symmetry_defect",
    "wedderburn_diagnostics",
]


@dataclass
class Decomposition:
    steps: list
    shape: tuple
    method: dict = field(default_factory=dict)
    residual_norm: float = 0.0
    certified: bool = True

    @property
    def m(self) -> int:
        return self.shape[0]

    @property
    def n(self) -> int:
        return self.shape[1]

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([s.lam for s in self.steps])

    def __len__(self) -> int:
        return len(self.steps)

    def truncated(self, k: int) -> "Decomposition":
        return Decomposition(self.steps[:k], self.shape, dict(self.method), float("nan"), self.certified)

    def reconstruct(self) -> np.ndarray:
        return reconstruct(self)


@dataclass
class SymmetricDecomposition(Decomposition):
    symmetry_defects: list = field(default_factory=list)


def deflate(X, step: FactorStep) -> np.ndarray:
    """Residual ``X - a b' / lam``; it annihilates ``u`` on the right and ``v`` on the left."""
    X = np.asarray(X, dtype=float)
    m, n = X.shape
    if step.a.shape != (m,) or step.b.shape != (n,):
        raise DimensionMismatch(
            f"step factors of lengths ({step.a.size}, {step.b.size}) do not fit a {m}x{n} matrix"
        )
    if not step.lam > 0:
        raise ValueError("deflation needs a positive dispersion value")
    return X - np.outer(step.a, step.b) / step.lam


def projector_a(step: FactorStep) -> np.ndarray:
    """Oblique projector ``a v' / lam`` onto the row factor."""
    return np.outer(step.a, step.v) / step.lam


def projector_b(step: FactorStep) -> np.ndarray:
    return np.outer(step.b, step.u) / step.lam


def reconstruct(d: Decomposition) -> np.ndarray:
    X = np.zeros(d.shape)
    for s in d.steps:
        X += np.outer(s.a, s.b) / s.lam
    return X


def _solver(r, p, exact, cap, tol, max_iter):
    r, p = as_exponent(r), as_exponent(p)

    def solve(R):
        if exact:
            return induced_norm(R, r, p, cap=cap, tol=tol, max_iter=max_iter, heuristic=False)
        return multi_start(R, r, p, tol=tol, max_iter=max_iter)

    return solve


def decompose(
    X,
    r: ExponentLike,
    p: ExponentLike,
    max_steps: int | None = None,
    rank_tol: float = 1e-10,
    exact: bool = True,
    cap: int = DEFAULT_CAP,
    tol: float = 1e-12,
    max_iter: int = 500,
) -> Decomposition:
    """Factor ``X`` into ``sum_k a_k b_k' / lam_k`` under the ``r -> p`` norm.

    Extraction stops once the residual's largest absolute entry drops to
    ``rank_tol`` times that of ``X``, after ``max_steps`` terms, or after
    ``min(m, n)`` terms.  ``exact=True`` demands a certified solver for every
    step (``NoExactSolver`` / ``TooLarge`` otherwise); ``exact=False`` runs
    the multi-start power method throughout.
    """
    X = as_matrix(X)
    r, p = as_exponent(r), as_exponent(p)
    m, n = X.shape
    if exact and exact_route(X.shape, r, p, cap) is None:
        raise NoExactSolver(f"no certified solver for r={r}, p={p}; use exact=False")
    limit = min(m, n) if max_steps is None else min(max_steps, m, n)
    method = {
        "r": str(r),
        "p": str(p),
        "solver": "exact" if exact else "multi_start",
        "tol": tol,
        "rank_tol": rank_tol,
    }
    scale = float(np.abs(X).max())
    solve = _solver(r, p, exact, cap, tol, max_iter)
    steps = []
    certified = True
    R = X.copy()
    while len(steps) < limit and np.abs(R).max() > rank_tol * scale:
        try:
            rep = solve(R)
        except NormingOfZero:
            break
        if not rep.step.lam > 0:
            break
        certified = certified and rep.certified
        steps.append(rep.step)
        R = deflate(R, rep.step)
    return Decomposition(steps, (m, n), method, float(np.abs(R).max()), certified)


def wedderburn_diagnostics(X, d: Decomposition) -> dict:
    """Largest annihilation and biconjugacy violations, each relative to ``lam``.

    ``eq8_max`` covers ``||X_k u_k||_inf`` and ``||X_k' v_k||_inf`` after
    every deflation; ``eq9_max`` covers ``|u_k' b_{k+1}|`` and
    ``|v_k' a_{k+1}|`` for consecutive steps.
    """
    R = as_matrix(X).copy()
    eq8 = 0.0
    for s in d.steps:
        R = deflate(R, s)
        eq8 = max(eq8, np.abs(R @ s.u).max() / s.lam, np.abs(R.T @ s.v).max() / s.lam)
    eq9 = 0.0
    for s, t in zip(d.steps, d.steps[1:]):
        eq9 = max(eq9, abs(s.u @ t.b) / s.lam, abs(s.v @ t.a) / s.lam)
    return {"eq8_max": float(eq8), "eq9_max": float(eq9)}


def symmetry_defect(step: FactorStep) -> float:
    """Distance between the directions of ``a`` and ``b``, up to sign."""
    a = step.a / np.linalg.norm(step.a)
    b = step.b / np.linalg.norm(step.b)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def decompose_symmetric(X, r: ExponentLike, p: ExponentLike, sym_tol: float = 1e-12, **kwargs) -> SymmetricDecomposition:
    """Decompose a symmetric ``X`` under a transposition-invariant norm pair.

    Requires ``r1 == p``.  Factors are not forced to be symmetric; the
    per-step defect between the ``a`` and ``b`` directions is reported in
    ``symmetry_defects``.
    """
    X = as_matrix(X)
    r, p = as_exponent(r), as_exponent(p)
    if X.shape[0] != X.shape[1] or np.abs(X - X.T).max() > sym_tol * max(1.0, np.abs(X).max()):
        raise NotSymmetric("decompose_symmetric needs a symmetric matrix")
    if not r.conjugate().isclose(p):
        raise NotTranspositionInvariant(f"(r, p) = ({r}, {p}) is not transposition invariant")
    d = decompose(X, r, p, **kwargs)
    return SymmetricDecomposition(
        d.steps, d.shape, d.method, d.residual_norm, d.certified,
        symmetry_defects=[symmetry_defect(s) for s in d.steps],
    )
