"""Vector p-norms, conjugate exponents and the norming functional.

Every transition formula in the package reduces to two primitives defined
here: the p-norm of a vector and the unit vector of the dual sphere that
attains it (the norming functional).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NormingOfZero

__all__ = [
    "Exponent",
    "ExponentLike",
    "NormingResult",
    "as_exponent",
    "conjugate",
    "norming_functional",
    "p_norm",
    "sgn",
]

_INF_NAMES = {"inf", "infinity", "∞", "+inf"}


@dataclass(frozen=True)
class Exponent:
    """A norm order ``p`` in ``[1, inf]``.

    ``math.inf`` is the distinguished value for the max-norm.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 1.0:
            raise ValueError(f"norm exponent must lie in [1, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text: str) -> "Exponent":
        t = text.strip()
        if t.lower() in _INF_NAMES:
            return cls(math.inf)
        try:
            value = float(t)
        except ValueError as exc:
            raise ValueError(f"cannot parse norm exponent {text!r}") from exc
        return cls(value)

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.value)

    def conjugate(self) -> "Exponent":
        if self.is_inf:
            return Exponent(1.0)
        if self.value == 1.0:
            return Exponent(math.inf)
        return Exponent(self.value / (self.value - 1.0))

    def isclose(self, other: "ExponentLike", rel: float = 1e-12) -> bool:
        o = as_exponent(other)
        if self.is_inf or o.is_inf:
            return self.is_inf and o.is_inf
        return math.isclose(self.value, o.value, rel_tol=rel)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.is_inf:
            return "inf"
        return str(int(self.value)) if self.value.is_integer() else repr(self.value)


ExponentLike = Union[Exponent, float, int, str]


def as_exponent(p: ExponentLike) -> Exponent:
    if isinstance(p, Exponent):
        return p
    if isinstance(p, str):
        return Exponent.parse(p)
    return Exponent(p)


def conjugate(p: ExponentLike) -> Exponent:
    """Return ``p1`` with ``1/p + 1/p1 = 1``."""
    return as_exponent(p).conjugate()


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a nonempty one-dimensional vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


def sgn(x) -> np.ndarray:
    """Elementwise sign with the convention ``sgn(0) = +1``."""
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, 1.0, -1.0)


def p_norm(x, p: ExponentLike) -> float:
    x = _as_vector(x)
    p = as_exponent(p)
    ax = np.abs(x)
    if p.is_inf:
        return float(ax.max())
    if p.value == 1.0:
        return float(ax.sum())
    if p.value == 2.0:
        return float(np.linalg.norm(x))
    scale = ax.max()
    if scale == 0.0:
        return 0.0
    return float(scale * np.sum((ax / scale) ** p.value) ** (1.0 / p.value))


@dataclass(frozen=True)
class NormingResult:
    phi: np.ndarray
    norm_value: float


def norming_functional(x, p: ExponentLike) -> NormingResult:
    """Unit vector of the conjugate sphere attaining ``<phi, x> = ||x||_p``.

    For ``p = inf`` the maximizer is not unique when ``|x|`` has tied
    maxima; the smallest maximizing index is used.

    Raises
    ------
    NormingOfZero
        If ``x`` is the zero vector.
    """
    x = _as_vector(x)
    p = as_exponent(p)
    norm = p_norm(x, p)
    if norm == 0.0:
        raise NormingOfZero("norming functional of the zero vector is undefined")
    if p.value == 1.0:
        phi = sgn(x)
    elif p.is_inf:
        alpha = int(np.argmax(np.abs(x)))
        phi = np.zeros_like(x)
        phi[alpha] = 1.0 if x[alpha] >= 0 else -1.0
    else:
        phi = sgn(x) * (np.abs(x) / norm) ** (p.value - 1.0)
    return NormingResult(phi=phi, norm_value=norm)
