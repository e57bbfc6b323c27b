"""Gauss-Legendre rules on the unit interval and composite tensor-product integration."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre rule on [0, 1]; weights sum to one."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    @classmethod
    def gauss_legendre(cls, order: int = 8) -> "QuadratureRule":
        return _gauss_legendre(int(order))

    def __eq__(self, other):
        return isinstance(other, QuadratureRule) and self.order == other.order

    def __hash__(self):
        return hash(self.order)


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> QuadratureRule:
    if order < 1:
        raise ValueError(f"quadrature order must be positive, got {order}")
    t, w = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (t + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, order)


def partition(n_cells: int, extra=(), lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Uniform breakpoints of ``[lo, hi]`` merged with ``extra`` points strictly inside."""
    base = np.linspace(lo, hi, n_cells + 1)
    extra = np.asarray(list(extra), dtype=float)
    extra = extra[(extra > lo) & (extra < hi)]
    pts = np.unique(np.concatenate([base, extra]))
    # drop slivers created by points that coincide with grid nodes up to rounding
    keep = np.concatenate([[True], np.diff(pts) > 1e-14 * max(1.0, hi - lo)])
    pts = pts[keep]
    pts[-1] = hi
    return pts


def composite(breaks: np.ndarray, rule: QuadratureRule) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of ``rule`` applied on every sub-interval of ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    a = breaks[:-1, None]
    h = np.diff(breaks)[:, None]
    return (a + h * rule.nodes).ravel(), (h * rule.weights).ravel()


def split_interval_rule(lo, hi, cuts, rule: QuadratureRule) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on ``[lo, hi]`` split at ``cuts``, vectorised over intervals.

    ``lo`` and ``hi`` are arrays of shape ``(m,)``; ``cuts`` is a sequence of
    scalars. Cuts are clipped into each interval, so sub-intervals that fall
    outside collapse to zero length and carry zero weight. The result has a
    fixed shape ``(m, (len(cuts) + 1) * rule.order)`` regardless of where the
    cuts land.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    cuts = np.sort(np.asarray(list(cuts), dtype=float))
    clipped = np.clip(cuts[None, :], lo[:, None], hi[:, None])
    edges = np.concatenate([lo[:, None], clipped, hi[:, None]], axis=1)
    a = edges[:, :-1, None]
    h = np.diff(edges, axis=1)[:, :, None]
    nodes = (a + h * rule.nodes).reshape(lo.size, -1)
    weights = (h * rule.weights).reshape(lo.size, -1)
    return nodes, weights


def tensor_points(axes: list[np.ndarray]) -> np.ndarray:
    """Cartesian product of per-axis coordinates, shape ``(len0, ..., lend-1, d)``."""
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack(grids, axis=-1)


def tensor_integrate(values: np.ndarray, weights: list[np.ndarray]) -> float:
    """Contract a tensor of samples against per-axis weights."""
    out = values
    for w in reversed(weights):
        out = out @ w
    return float(out)
