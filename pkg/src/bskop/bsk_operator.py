"""Univariate and multivariate Brass-Stancu-Kantorovich operators.

``K^d_{n,r}(f; x) = sum_k prod_i w_{n,k_i,r}(x_i) * mean(f over Q_{n,k})`` where
``Q_{n,k}`` is the cell ``prod_i [k_i/(n+1), (k_i+1)/(n+1)]``.

The weights factor over the axes, so evaluation on many points contracts the
array of cell means one axis at a time instead of forming all ``(n+1)**d``
products per point. Single-point evaluation (:func:`bsk_apply`) does form them
and sums with ``math.fsum``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from bskop.basis import OperatorParams, stancu_basis, stancu_integral_vector, stancu_matrix
from bskop.errors import BudgetExceededError, DomainError
from bskop.fields import ScalarField
from bskop.quadrature import QuadratureRule, composite, partition, split_interval_rule

DEFAULT_BUDGET = 10**7
DEFAULT_ORDER = 8
_CHUNK_POINTS = 2_000_000


@dataclass(frozen=True)
class Cell:
    """Axis-aligned box ``prod_i [lower_i, upper_i]``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @classmethod
    def of(cls, n: int, k: Sequence[int]) -> "Cell":
        """The cell ``Q_{n,k}`` of side ``1/(n+1)``."""
        k = tuple(int(ki) for ki in k)
        if any(ki < 0 or ki > n for ki in k):
            raise DomainError(f"multi-index {k} outside {{0..{n}}}^d")
        return cls(tuple(ki / (n + 1) for ki in k), tuple((ki + 1) / (n + 1) for ki in k))

    @property
    def d(self) -> int:
        return len(self.lower)


def _as_point(x, d: int) -> np.ndarray:
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.shape != (d,):
        raise DomainError(f"expected a point with {d} coordinates, got shape {pt.shape}")
    if np.any(~np.isfinite(pt)) or np.any(pt < 0.0) or np.any(pt > 1.0):
        raise DomainError("point outside the unit hypercube")
    return pt


def _check_k(params: OperatorParams, k) -> tuple[int, ...]:
    k = tuple(int(ki) for ki in np.atleast_1d(k))
    if len(k) != params.d:
        raise DomainError(f"multi-index must have {params.d} components, got {len(k)}")
    if any(ki < 0 or ki > params.n for ki in k):
        raise DomainError(f"multi-index {k} outside {{0..{params.n}}}^d")
    return k


def tensor_weight(params: OperatorParams, k, x) -> float:
    """Product weight ``prod_i w_{n,k_i,r}(x_i)``."""
    params.require_strict()
    k = _check_k(params, k)
    pt = _as_point(x, params.d)
    return math.prod(stancu_basis(params, ki, xi) for ki, xi in zip(k, pt))


def cell_mean(f: ScalarField, cell: Cell, rule: QuadratureRule | None = None) -> float:
    """Mean value of ``f`` over ``cell`` by a tensor Gauss-Legendre rule.

    Cells are split at the singularities ``f`` declares, so piecewise smooth
    catalog functions are integrated to quadrature precision.
    """
    rule = rule or QuadratureRule.gauss_legendre(DEFAULT_ORDER)
    if cell.d != f.d:
        raise DomainError("cell and field dimensions differ")
    lo = np.asarray(cell.lower)
    hi = np.asarray(cell.upper)
    if np.any(lo < 0.0) or np.any(hi > 1.0) or np.any(hi <= lo):
        raise DomainError("cell must be a non-degenerate box inside the unit hypercube")
    nodes, weights = [], []
    for i in range(f.d):
        x, w = split_interval_rule(lo[i], hi[i], f.singular_points(i), rule)
        nodes.append(x[0])
        weights.append(w[0] / (hi[i] - lo[i]))
    values = f.values(np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1))
    for w in reversed(weights):
        values = values @ w
    return float(values)


def weight_hypercube_integral(params: OperatorParams, k) -> float:
    """``integral over Q_d of w_{n,k,r}``: product of the one-dimensional closed forms."""
    params.require_strict()
    k = _check_k(params, k)
    ints = stancu_integral_vector(params)
    return math.prod(float(ints[ki]) for ki in k)


def _axis_index(params: OperatorParams, i: int) -> int:
    if not 1 <= i <= params.d:
        raise DomainError(f"axis must lie in 1..{params.d}, got {i}")
    return i - 1


def _coordinate(params: OperatorParams, i: int, x) -> float:
    params.require_strict()
    return float(_as_point(x, params.d)[_axis_index(params, i)])


def moment_first(params: OperatorParams, i: int, x) -> float:
    """``K(pr_i; x) = n/(n+1) x_i + 1/(2(n+1))`` (axis ``i`` is 1-based)."""
    t = _coordinate(params, i, x)
    n = params.n
    return n / (n + 1) * t + 1.0 / (2 * (n + 1))


def moment_second(params: OperatorParams, i: int, x) -> float:
    """``K(pr_i^2; x)`` in closed form."""
    t = _coordinate(params, i, x)
    n, r = params.n, params.r
    bsb = t * t + (1.0 + r * (r - 1) / n) * t * (1.0 - t) / n
    return n * n / (n + 1) ** 2 * bsb + (3 * n * t + 1) / (3 * (n + 1) ** 2)


def central_second_moment(params: OperatorParams, i: int, x) -> float:
    """``K((pr_i - x_i)^2; x) = (n-1+r(r-1))/(n+1)^2 x_i(1-x_i) + 1/(3(n+1)^2)``."""
    t = _coordinate(params, i, x)
    n, r = params.n, params.r
    return (n - 1 + r * (r - 1)) / (n + 1) ** 2 * t * (1.0 - t) + 1.0 / (3 * (n + 1) ** 2)


class BSKOperator:
    """``K^d_{n,r}`` with a fixed cell-mean quadrature rule and term budget.

    The univariate operator is accepted for every ``n >= r``; the
    multivariate one requires ``n > 2r``.
    """

    def __init__(self, params: OperatorParams, rule: QuadratureRule | None = None,
                 budget: int = DEFAULT_BUDGET):
        if params.d > 1:
            params.require_strict()
        terms = (params.n + 1) ** params.d
        if terms > budget:
            raise BudgetExceededError(
                f"(n+1)^d = {terms} summation terms exceed the budget of {budget}"
            )
        self.params = params
        self.rule = rule or QuadratureRule.gauss_legendre(DEFAULT_ORDER)
        self.budget = budget

    def __repr__(self):
        p = self.params
        return f"BSKOperator(n={p.n}, r={p.r}, d={p.d}, order={self.rule.order})"

    def _check_field(self, f: ScalarField):
        if f.d != self.params.d:
            raise DomainError(f"field has d={f.d}, operator has d={self.params.d}")

    def cell_means(self, f: ScalarField) -> np.ndarray:
        """Means of ``f`` over all cells ``Q_{n,k}``; shape ``(n+1,)*d``."""
        self._check_field(f)
        n, d = self.params.n, self.params.d
        h = 1.0 / (n + 1)
        lo = np.arange(n + 1) * h
        hi = (np.arange(n + 1) + 1) * h
        hi[-1] = 1.0
        axes = []
        for i in range(d):
            x, w = split_interval_rule(lo, hi, f.singular_points(i), self.rule)
            axes.append((x, w / (hi - lo)[:, None]))
        q = [x.shape[1] for x, _ in axes]
        # evaluate in slabs of whole first-axis cells to bound memory
        per_cell = int(np.prod(q)) * (n + 1) ** (d - 1)
        step = max(1, _CHUNK_POINTS // max(per_cell, 1))
        flat_rest = [x.ravel() for x, _ in axes[1:]]
        out = np.empty((n + 1,) * d)
        for start in range(0, n + 1, step):
            stop = min(n + 1, start + step)
            first = axes[0][0][start:stop].ravel()
            pts = np.stack(np.meshgrid(first, *flat_rest, indexing="ij"), axis=-1)
            vals = f.values(pts)
            shape = [stop - start, q[0]]
            for qi in q[1:]:
                shape += [n + 1, qi]
            vals = vals.reshape(shape)
            # contract node axes against per-cell mean weights
            labels = list(range(2 * d))
            for i in range(d):
                w = axes[i][1] if i else axes[0][1][start:stop]
                kept = [a for a in labels if a != 2 * i + 1]
                vals = np.einsum(vals, labels, w, [2 * i, 2 * i + 1], kept)
                labels = kept
            out[start:stop] = vals
        return out

    def apply(self, f: ScalarField, x, means: np.ndarray | None = None) -> float:
        """``K(f; x)`` at a single point with compensated summation over all terms."""
        pt = _as_point(x, self.params.d)
        c = self.cell_means(f) if means is None else means
        w = stancu_matrix(self.params, pt)
        full = w[0]
        for i in range(1, self.params.d):
            full = np.multiply.outer(full, w[i])
        return math.fsum((full * c).ravel())

    def evaluate(self, f: ScalarField, points, means: np.ndarray | None = None) -> np.ndarray:
        """``K(f; x)`` at points of shape ``(..., d)``."""
        d = self.params.d
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != d:
            raise DomainError(f"points must have trailing dimension {d}")
        shape = pts.shape[:-1]
        pts = pts.reshape(-1, d)
        c = self.cell_means(f) if means is None else means
        t = np.einsum("na,a...->n...", stancu_matrix(self.params, pts[:, 0]), c)
        for i in range(1, d):
            t = np.einsum("na,na...->n...", stancu_matrix(self.params, pts[:, i]), t)
        return t.reshape(shape)

    def on_grid(self, f: ScalarField, axes: Sequence[np.ndarray],
                means: np.ndarray | None = None) -> np.ndarray:
        """``K(f)`` on the tensor grid ``axes[0] x ... x axes[d-1]``."""
        if len(axes) != self.params.d:
            raise DomainError("one coordinate array per axis is required")
        t = self.cell_means(f) if means is None else means
        for x in axes:
            t = np.tensordot(t, stancu_matrix(self.params, x), axes=([0], [1]))
        return t


def bsk_apply(params: OperatorParams, f: ScalarField, x, rule: QuadratureRule | None = None,
              budget: int = DEFAULT_BUDGET) -> float:
    """Evaluate ``K^d_{n,r}(f; x)`` at one point."""
    return BSKOperator(params, rule, budget).apply(f, x)


def kantorovich_apply(n: int, f: ScalarField, x: float, rule: QuadratureRule | None = None) -> float:
    """Classical univariate Kantorovich operator ``K_n(f; x)``."""
    return bsk_apply(OperatorParams(n, 0, 1), f, x, rule)


# -- L^p norms on the cell partition -------------------------------------------------


def _lp(values: np.ndarray, weights: Sequence[np.ndarray], p: float) -> float:
    t = np.abs(values) ** p
    for w in reversed(weights):
        t = t @ w
    return float(t) ** (1.0 / p)


def _root_breaks(g, breaks: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Add sign changes of a univariate ``g`` to ``breaks``."""
    nodes, _ = composite(breaks, rule)
    xs = np.unique(np.concatenate([breaks, nodes]))
    gs = g(xs)
    roots = []
    for a, b, ga, gb in zip(xs[:-1], xs[1:], gs[:-1], gs[1:]):
        if ga * gb < 0.0:
            roots.append(brentq(lambda t: float(g(np.array([t]))[0]), a, b, xtol=1e-14))
    if not roots:
        return breaks
    return np.unique(np.concatenate([breaks, roots]))


def _axis_rules(f: ScalarField, n_cells: int, rule: QuadratureRule, extra_by_axis=None):
    out = []
    for i in range(f.d):
        extra = list(f.singular_points(i))
        if extra_by_axis is not None:
            extra += list(extra_by_axis[i])
        out.append(partition(n_cells, extra))
    return out


def field_lp_norm(f: ScalarField, p: float, n_cells: int = 256,
                  rule: QuadratureRule | None = None) -> float:
    """``||f||_p`` on ``Q_d`` by a composite rule split at singularities (and roots in 1-D)."""
    rule = rule or QuadratureRule.gauss_legendre(DEFAULT_ORDER)
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    breaks = _axis_rules(f, n_cells, rule)
    if f.d == 1:
        breaks[0] = _root_breaks(lambda t: f.values(t[:, None]), breaks[0], rule)
    axes = [composite(b, rule) for b in breaks]
    vals = f.values(np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), axis=-1))
    return _lp(vals, [a[1] for a in axes], p)


def operator_norms(op: BSKOperator, f: ScalarField, ps: Iterable[float],
                   means: np.ndarray | None = None) -> dict[float, dict[str, float]]:
    """L^p norms of ``K f``, ``f`` and ``K f - f`` on the (n+1)-cell partition.

    Returns ``{p: {"image": ||Kf||_p, "field": ||f||_p, "error": ||Kf - f||_p}}``.
    In one dimension the partition is refined at sign changes of each
    integrand so ``|.|**p`` is smooth on every sub-interval.
    """
    ps = [float(p) for p in ps]
    if any(p < 1 for p in ps):
        raise DomainError("p must be >= 1")
    c = op.cell_means(f) if means is None else means
    rule = op.rule
    n = op.params.n
    base = _axis_rules(f, n + 1, rule)
    out = {p: {} for p in ps}
    if f.d == 1:
        integrands = {
            "image": lambda t: op.evaluate(f, t[:, None], c),
            "field": lambda t: f.values(t[:, None]),
            "error": lambda t: op.evaluate(f, t[:, None], c) - f.values(t[:, None]),
        }
        for key, g in integrands.items():
            x, w = composite(_root_breaks(g, base[0], rule), rule)
            vals = g(x)
            for p in ps:
                out[p][key] = _lp(vals, [w], p)
        return out
    axes = [composite(b, rule) for b in base]
    kf = op.on_grid(f, [a[0] for a in axes], c)
    fv = f.values(np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), axis=-1))
    ws = [a[1] for a in axes]
    for p in ps:
        out[p] = {"image": _lp(kf, ws, p), "field": _lp(fv, ws, p), "error": _lp(kf - fv, ws, p)}
    return out


def sup_error(op: BSKOperator, f: ScalarField, points_per_axis: int = 257,
              means: np.ndarray | None = None) -> float:
    """Max of ``|K f - f|`` on a uniform tensor grid (singularities inserted)."""
    axes = []
    for i in range(f.d):
        base = np.linspace(0.0, 1.0, points_per_axis)
        axes.append(np.unique(np.concatenate([base, f.singular_points(i)])))
    kf = op.on_grid(f, axes, means)
    fv = f.values(np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1))
    return float(np.max(np.abs(kf - fv)))


def all_multi_indices(n: int, d: int):
    return itertools.product(range(n + 1), repeat=d)
