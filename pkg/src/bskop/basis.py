"""Bernstein and Stancu fundamental functions and the discrete BSB operator.

The Stancu functions with shift parameter ``r`` are

    w_{n,k,r}(x) = (1 - x) p_{n-r,k}(x) + x p_{n-r,k-r}(x),

where ``p_{m,j}`` is the Bernstein basis extended by zero outside ``0 <= j <= m``.
For ``n >= 2r`` this single expression reproduces the three-branch definition
(the first term vanishes for ``k > n - r``, the second for ``k < r``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from bskop.errors import DomainError, RegimeError


@dataclass(frozen=True)
class OperatorParams:
    """Degree ``n``, shift ``r`` and dimension ``d`` of a BSB/BSK operator."""

    n: int
    r: int = 0
    d: int = 1

    def __post_init__(self):
        for name in ("n", "r", "d"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise DomainError(f"{name} must be an integer, got {value!r}")
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if self.r < 0:
            raise DomainError(f"r must be non-negative, got {self.r}")
        if self.d < 1:
            raise DomainError(f"d must be positive, got {self.d}")
        if self.n < self.r:
            raise DomainError(f"n must satisfy n >= r, got n={self.n}, r={self.r}")

    @property
    def strict_regime(self) -> bool:
        return self.n > 2 * self.r

    def require_strict(self) -> None:
        """Raise :class:`RegimeError` unless ``n > 2r``."""
        if not self.strict_regime:
            raise RegimeError(
                f"operation requires n > 2r, got n={self.n}, r={self.r}"
            )


def _check_unit(x, what: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{what} must lie in [0, 1]")
    return arr


def bernstein_matrix(m: int, x) -> np.ndarray:
    """All Bernstein basis values ``p_{m,k}(x)``, ``k = 0..m``.

    Uses the ratio recurrence ``p_{m,k+1} = p_{m,k} (m-k)/(k+1) * x/(1-x)``
    started from the end of the basis nearer to ``x`` so no binomial
    coefficient is ever formed.

    Parameters
    ----------
    m : int
        Degree, ``m >= 0``.
    x : array_like
        Points in [0, 1], any shape.

    Returns
    -------
    ndarray
        Array of shape ``x.shape + (m + 1,)``.
    """
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    x = _check_unit(x)
    flip = x > 0.5
    y = np.where(flip, 1.0 - x, x).reshape(-1)
    out = np.empty((y.size, m + 1))
    out[:, 0] = (1.0 - y) ** m
    if m > 0:
        ratio = y / (1.0 - y)
        for k in range(m):
            out[:, k + 1] = out[:, k] * ((m - k) / (k + 1)) * ratio
    flat_flip = flip.reshape(-1)
    out[flat_flip] = out[flat_flip, ::-1]
    return out.reshape(x.shape + (m + 1,))


def bernstein_basis(n: int, k: int, x: float) -> float:
    """Bernstein fundamental function ``C(n,k) x^k (1-x)^(n-k)``; zero for k outside [0, n]."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    _check_unit(x)
    if k < 0 or k > n:
        return 0.0
    return float(bernstein_matrix(n, float(x))[k])


def stancu_matrix(params: OperatorParams, x) -> np.ndarray:
    """All Stancu fundamental values ``w_{n,k,r}(x)``, ``k = 0..n``.

    Returns an array of shape ``x.shape + (n + 1,)``.
    """
    n, r = params.n, params.r
    x = _check_unit(x)
    p = bernstein_matrix(n - r, x)
    xe = x[..., None]
    w = np.zeros(x.shape + (n + 1,))
    w[..., : n - r + 1] += (1.0 - xe) * p
    w[..., r:] += xe * p
    return w


def stancu_basis(params: OperatorParams, k: int, x: float) -> float:
    """Stancu fundamental function ``w_{n,k,r}(x)`` for ``0 <= k <= n``."""
    if k < 0 or k > params.n:
        raise DomainError(f"k must lie in [0, {params.n}], got {k}")
    return float(stancu_matrix(params, float(x))[k])


def stancu_integral_vector(params: OperatorParams) -> np.ndarray:
    """Exact integrals over [0, 1] of all ``w_{n,k,r}``, ``k = 0..n``."""
    n, r = params.n, params.r
    m = n - r
    denom = (m + 2) * (m + 1)
    out = np.zeros(n + 1)
    k = np.arange(n + 1)
    left = k <= m
    out[left] += (m - k[left] + 1) / denom
    right = k >= r
    out[right] += (k[right] - r + 1) / denom
    return out


def stancu_basis_integral(params: OperatorParams, k: int) -> float:
    """Closed-form ``integral_0^1 w_{n,k,r}(x) dx``.

    For ``n >= 2r`` the three cases are ``(n-r-k+1)/D`` for ``k < r``,
    ``(n-2r+2)/D`` for ``r <= k <= n-r`` and ``(k-r+1)/D`` for ``k > n-r``
    with ``D = (n-r+2)(n-r+1)``.
    """
    if k < 0 or k > params.n:
        raise DomainError(f"k must lie in [0, {params.n}], got {k}")
    return float(stancu_integral_vector(params)[k])


def bsb_apply(params: OperatorParams, f: Callable, x: float) -> float:
    """Brass-Stancu-Bernstein operator ``L_{n,r}(f; x)`` on [0, 1].

    Evaluated in the two-sample form
    ``sum_k p_{n-r,k}(x) [(1-x) f(k/n) + x f((k+r)/n)]``, valid for ``n >= r``.
    ``f`` may be a one-dimensional :class:`~bskop.fields.ScalarField` or any
    vectorised callable of one array argument.
    """
    n, r = params.n, params.r
    x = float(_check_unit(x))
    m = n - r
    p = bernstein_matrix(m, x)
    k = np.arange(m + 1)
    lo = np.asarray(f(k / n), dtype=float)
    hi = np.asarray(f((k + r) / n), dtype=float)
    return float(np.sum(p * ((1.0 - x) * lo + x * hi)))
