"""Induced norms ``||A||_{r->p}`` and their maximizing quintuples.

Closed-form (certified) solvers exist for ``r = inf`` (sign enumeration),
``r = 1`` (largest column norm) and ``r = p = 2`` (spectral norm).  By the
duality ``||A||_{r->p} = ||A'||_{p1->r1}`` a few more pairs reduce to these.
Everything else goes through the criss-cross power method, whose answer is a
critical point and only a lower bound on the norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NoExactSolver,
    NormingOfZero,
    TooLarge,
    ZeroMatrix,
)
from .norms import Exponent, ExponentLike, as_exponent, norming_functional, p_norm

__all__ = [
    "DEFAULT_CAP",
    "FactorStep",
    "PowerTrace",
    "SolveReport",
    "as_matrix",
    "dominant_eigenpair",
    "exact_1_to_p",
    "exact_2_to_2",
    "exact_inf_to_p",
    "exact_route",
    "induced_norm",
    "multi_start",
    "power_iterate",
    "power_method",
]

DEFAULT_CAP = 25
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FactorStep:
    """One extracted term ``(a, b, u, v, lam)``.

    ``a = A u`` is the projected row factor, ``b = A' v`` the projected
    column factor, ``u`` lies on the unit ``r``-sphere, ``v`` on the unit
    ``p1``-sphere and ``lam = v' A u`` is the dispersion value.
    """

    a: np.ndarray
    b: np.ndarray
    u: np.ndarray
    v: np.ndarray
    lam: float

    def flipped(self) -> "FactorStep":
        return FactorStep(-self.a, -self.b, -self.u, -self.v, self.lam)

    def transposed(self) -> "FactorStep":
        """The same term seen as a step of the adjoint problem on ``A'``."""
        return FactorStep(self.b, self.a, self.v, self.u, self.lam)

    def term(self) -> np.ndarray:
        return np.outer(self.a, self.b) / self.lam


@dataclass(frozen=True)
class SolveReport:
    step: FactorStep
    certified: bool
    iterations: int
    starts_tried: int
    solver: str
    converged: bool = True


@dataclass
class PowerTrace:
    """Full record of one power-method run.

    ``history`` interleaves ``||a||_p`` and ``||b||_{r1}`` in the order they
    were computed; it is nondecreasing in exact arithmetic.
    """

    step: FactorStep
    history: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2 or A.size == 0:
        raise DimensionMismatch("expected a nonempty two-dimensional matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def _require_nonzero(A):
    if not np.any(A):
        raise ZeroMatrix("the zero matrix has no dominant term")


def _first_nonzero_positive(step: FactorStep) -> FactorStep:
    nz = np.flatnonzero(step.u)
    if nz.size and step.u[nz[0]] < 0:
        return step.flipped()
    return step


def _largest_v_positive(step: FactorStep) -> FactorStep:
    if step.v[int(np.argmax(np.abs(step.v)))] < 0:
        return step.flipped()
    return step


def _step_from_u(A, u, p: Exponent) -> FactorStep:
    a = A @ u
    v = norming_functional(a, p).phi
    b = A.T @ v
    return FactorStep(a=a, b=b, u=u, v=v, lam=float(v @ a))


# -- power method -----------------------------------------------------------

def power_iterate(A, r: ExponentLike, p: ExponentLike, b_start, tol=1e-12, max_iter=500) -> PowerTrace:
    """Run the criss-cross iteration from ``b_start`` and keep every value.

    Each sweep sets ``u = phi(b)``, ``a = A u``, then ``v = phi(a)``,
    ``b = A' v``, and stops once ``||b||_{r1} - ||a||_p`` is at most
    ``tol * max(1, ||a||_p)``.  Hitting ``max_iter`` returns the last
    iterate with ``converged=False``.
    """
    A = as_matrix(A)
    _require_nonzero(A)
    r, p = as_exponent(r), as_exponent(p)
    r1 = r.conjugate()
    b = np.asarray(b_start, dtype=float)
    if b.shape != (A.shape[1],):
        raise DimensionMismatch(f"b_start must have length {A.shape[1]}")

    u = norming_functional(b, r1).phi
    a = A @ u
    lam_a = p_norm(a, p)
    history = [lam_a]
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        v = norming_functional(a, p).phi
        b = A.T @ v
        lam_b = p_norm(b, r1)
        history.append(lam_b)
        if lam_b - lam_a <= tol * max(1.0, lam_a):
            converged = True
            break
        u = norming_functional(b, r1).phi
        a = A @ u
        lam_a = p_norm(a, p)
        history.append(lam_a)
    else:
        v = norming_functional(a, p).phi
        b = A.T @ v

    step = FactorStep(a=a, b=b, u=u, v=v, lam=float(v @ a))
    return PowerTrace(_first_nonzero_positive(step), history, it, converged)


def power_method(A, r: ExponentLike, p: ExponentLike, b_start, tol=1e-12, max_iter=500) -> FactorStep:
    """Critical point of ``max ||A u||_p`` over the unit ``r``-sphere.

    Raises ``NoConvergence`` (carrying the last step and trace) when the
    iteration budget runs out, and ``NormingOfZero`` when ``A u`` or
    ``A' v`` vanishes along the way.
    """
    trace = power_iterate(A, r, p, b_start, tol=tol, max_iter=max_iter)
    if not trace.converged:
        raise NoConvergence(
            f"power method did not converge in {max_iter} iterations",
            step=trace.step,
            trace=trace,
        )
    return trace.step


def _prefer(cand: FactorStep, best: FactorStep | None, rel=1e-12) -> bool:
    if best is None:
        return True
    if cand.lam > best.lam * (1 + rel) + rel:
        return True
    if cand.lam >= best.lam * (1 - rel) - rel:
        return tuple(np.abs(cand.u)) < tuple(np.abs(best.u))
    return False


def multi_start(A, r: ExponentLike, p: ExponentLike, tol=1e-12, max_iter=500) -> SolveReport:
    """Best power-method critical point over rows and columns of ``A`` as starts.

    Rows of ``A`` are used directly as ``b`` starts; columns are used as ``a``
    starts and pushed through one transition (``v = phi(a)``, ``b = A' v``).
    Ties in ``lam`` go to the lexicographically smallest ``|u|``.
    """
    A = as_matrix(A)
    _require_nonzero(A)
    r, p = as_exponent(r), as_exponent(p)

    starts = [row for row in A if np.any(row)]
    for col in A.T:
        if np.any(col):
            b0 = A.T @ norming_functional(col, p).phi
            if np.any(b0):
                starts.append(b0)

    best = None
    converged = True
    iterations = 0
    tried = 0
    for b0 in starts:
        try:
            trace = power_iterate(A, r, p, b0, tol=tol, max_iter=max_iter)
        except NormingOfZero:
            continue
        tried += 1
        iterations += trace.iterations
        if _prefer(trace.step, best):
            best = trace.step
            converged = trace.converged
    if best is None:
        raise NoConvergence("every start collapsed to the zero vector")
    return SolveReport(best, False, iterations, tried, "multi_start", converged)


# -- exact solvers ------------------------------------------------------------

def _rows_p_norm(Y, p: Exponent) -> np.ndarray:
    aY = np.abs(Y)
    if p.is_inf:
        return aY.max(axis=1)
    if p.value == 1.0:
        return aY.sum(axis=1)
    if p.value == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", Y, Y))
    return np.sum(aY ** p.value, axis=1) ** (1.0 / p.value)


def sign_vectors(n: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop-1`` of the half-cube of sign vectors with ``u[0] = +1``.

    Bit ``j`` of the row index flips the sign of entry ``j + 1``.
    """
    idx = np.arange(start, stop, dtype=np.int64)
    S = np.ones((idx.size, n))
    if n > 1:
        bits = (idx[:, None] >> np.arange(n - 1, dtype=np.int64)) & 1
        S[:, 1:] = 1.0 - 2.0 * bits
    return S


def exact_inf_to_p(A, p: ExponentLike, cap: int = DEFAULT_CAP, chunk: int = 1 << 15) -> SolveReport:
    """``||A||_{inf->p}`` by enumerating the ``2**(n-1)`` sign vectors.

    ``u`` and ``-u`` give the same value, so ``u[0]`` is fixed to ``+1``.
    The problem is NP-hard; inputs with more than ``cap`` columns raise
    ``TooLarge``.
    """
    A = as_matrix(A)
    _require_nonzero(A)
    p = as_exponent(p)
    m, n = A.shape
    if n > cap:
        raise TooLarge(f"sign enumeration over n={n} columns exceeds cap={cap}")
    total = 1 << (n - 1)
    best_val, best_u = -1.0, None
    for start in range(0, total, chunk):
        S = sign_vectors(n, start, min(start + chunk, total))
        vals = _rows_p_norm(S @ A.T, p)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_u = float(vals[j]), S[j].copy()
    step = _step_from_u(A, best_u, p)
    return SolveReport(step, True, total, 1, "exact_inf_to_p")


def exact_1_to_p(A, p: ExponentLike) -> SolveReport:
    """``||A||_{1->p}``: the largest ``p``-norm among the columns of ``A``."""
    A = as_matrix(A)
    _require_nonzero(A)
    p = as_exponent(p)
    norms = _rows_p_norm(A.T, p)
    alpha = int(np.argmax(norms))
    u = np.zeros(A.shape[1])
    u[alpha] = 1.0
    step = _step_from_u(A, u, p)
    return SolveReport(step, True, A.shape[1], 1, "exact_1_to_p")


def _is_top_eigenvalue(G, mu, rel=1e-9) -> bool:
    # mu(1+rel) I - G is positive definite exactly when mu(1+rel) > lambda_max(G)
    n = G.shape[0]
    shift = mu * (1.0 + rel) + n * _EPS * np.abs(G).max()
    try:
        np.linalg.cholesky(shift * np.eye(n) - G)
    except np.linalg.LinAlgError:
        return False
    return True


def dominant_eigenpair(G, tol=1e-12, max_iter=100_000):
    """Top eigenpair of a symmetric PSD matrix by power iteration.

    Starts from the all-ones vector.  A start that lands in the null space,
    or settles on an eigenvector that is not dominant, is detected by a
    Cholesky test of ``mu (1 + 1e-9) I - G`` and the iteration restarts from
    the canonical basis vectors in turn.  Iteration stops when the residual
    ``||G x - mu x||`` is at most ``tol * mu``.

    Returns ``(mu, x, iterations, starts_tried)``.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    scale = np.abs(G).max()
    if scale == 0.0:
        raise ZeroMatrix("the zero matrix has no dominant eigenvector")
    starts = [np.ones(n)] + [np.eye(n)[j] for j in range(n)]
    total_iter = 0
    for tried, x0 in enumerate(starts, start=1):
        x = x0 / np.linalg.norm(x0)
        y = G @ x
        if np.linalg.norm(y) <= n * _EPS * scale:
            continue
        ok = False
        for _ in range(max_iter):
            total_iter += 1
            x = y / np.linalg.norm(y)
            y = G @ x
            mu = float(x @ y)
            if np.linalg.norm(y - mu * x) <= tol * abs(mu):
                ok = True
                break
        if not ok:
            raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")
        if _is_top_eigenvalue(G, mu):
            return mu, x, total_iter, tried
    raise NoConvergence("no start reached the dominant eigenvector")


def exact_2_to_2(A, tol=1e-12, max_iter=100_000) -> SolveReport:
    """Spectral norm and dominant singular pair via power iteration on ``A'A``.

    The pair ``(u, v)`` is flipped jointly so that the largest entry of
    ``|v|`` carries a positive sign.
    """
    A = as_matrix(A)
    _require_nonzero(A)
    _, x, iters, tried = dominant_eigenpair(A.T @ A, tol=tol, max_iter=max_iter)
    a = A @ x
    lam = float(np.linalg.norm(a))
    v = a / lam
    b = A.T @ v
    step = FactorStep(a=a, b=b, u=x, v=v, lam=float(v @ a))
    return SolveReport(_largest_v_positive(step), True, iters, tried, "exact_2_to_2")


# -- dispatch ---------------------------------------------------------------

def exact_route(shape, r: ExponentLike, p: ExponentLike, cap: int = DEFAULT_CAP):
    """Name the certified route for ``(r, p)`` on a matrix of ``shape``.

    Returns one of ``"inf"``, ``"one"``, ``"spectral"``, ``"adjoint-inf"``,
    ``"adjoint-one"``, or ``None`` when only the heuristic applies.  When an
    exact family exists but enumeration exceeds ``cap``, returns ``"too-large"``.
    """
    m, n = shape
    r, p = as_exponent(r), as_exponent(p)
    p1 = p.conjugate()
    if r.is_inf and n <= cap:
        return "inf"
    if r.value == 1.0:
        return "one"
    if r.value == 2.0 and p.value == 2.0:
        return "spectral"
    if p1.is_inf and m <= cap:
        return "adjoint-inf"
    if p1.value == 1.0:
        return "adjoint-one"
    if r.is_inf or p1.is_inf:
        return "too-large"
    return None


def induced_norm(
    A,
    r: ExponentLike,
    p: ExponentLike,
    cap: int = DEFAULT_CAP,
    tol: float = 1e-12,
    max_iter: int = 500,
    heuristic: bool | None = None,
) -> SolveReport:
    """``||A||_{r->p}`` with the quintuple attaining it.

    ``heuristic=None`` uses the exact solver when one applies, the power
    method for pairs without one, and raises ``TooLarge`` when an exact
    family exists but exceeds ``cap``.  ``heuristic=True`` falls back to the
    power method in that last case too; ``heuristic=False`` never uses it.
    """
    A = as_matrix(A)
    _require_nonzero(A)
    r, p = as_exponent(r), as_exponent(p)
    route = exact_route(A.shape, r, p, cap)
    if route == "inf":
        return exact_inf_to_p(A, p, cap=cap)
    if route == "one":
        return exact_1_to_p(A, p)
    if route == "spectral":
        return exact_2_to_2(A, tol=tol)
    if route in ("adjoint-inf", "adjoint-one"):
        r1 = r.conjugate()
        if route == "adjoint-inf":
            rep = exact_inf_to_p(A.T, r1, cap=cap)
        else:
            rep = exact_1_to_p(A.T, r1)
        return replace(rep, step=rep.step.transposed(), solver=rep.solver + "(adjoint)")
    if route == "too-large" and not heuristic:
        raise TooLarge(
            f"sign enumeration for shape {A.shape} exceeds cap={cap}; "
            "pass heuristic=True to accept a power-method lower bound"
        )
    if route is None and heuristic is False:
        raise NoExactSolver(f"no certified solver for r={r}, p={p}")
    return multi_start(A, r, p, tol=tol, max_iter=max_iter)
