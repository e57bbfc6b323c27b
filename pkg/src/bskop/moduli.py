"""First-order smoothness measures on the unit hypercube.

Suprema are taken over finite sample sets and integrals by composite
Gauss-Legendre rules. Declared singularities of a field, and every point
where the integrand's structure changes (window clipping, shifted
singularities), are inserted into the grids.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from bskop.bsk_operator import field_lp_norm
from bskop.errors import DomainError, EmptyCandidateError, UnavailableDerivativeError
from bskop.fields import ScalarField
from bskop.quadrature import QuadratureRule, composite, partition, split_interval_rule

_CHUNK_POINTS = 2_000_000
DEFAULT_RADII = tuple(np.geomspace(1e-3, 0.25, 12))


@dataclass(frozen=True)
class ModulusGrid:
    """Sampling resolution for suprema and integrals.

    ``x_points`` is the number of uniform breakpoints per axis of the outer
    integration partition, ``h_points`` the number of shift samples per axis
    (symmetric about zero), ``t_points`` the samples per axis inside each
    local window, and ``order`` the Gauss-Legendre order per sub-interval.
    """

    x_points: int = 257
    h_points: int = 65
    t_points: int = 257
    order: int = 4

    @classmethod
    def default(cls, d: int) -> "ModulusGrid":
        if d == 1:
            return cls()
        if d == 2:
            return cls(x_points=33, h_points=17, t_points=17, order=3)
        return cls(x_points=9, h_points=9, t_points=9, order=2)

    def refined(self) -> "ModulusGrid":
        """Grid with every resolution roughly doubled."""
        return ModulusGrid(2 * self.x_points - 1, 2 * self.h_points - 1,
                           2 * self.t_points - 1, self.order)

    @property
    def rule(self) -> QuadratureRule:
        return QuadratureRule.gauss_legendre(self.order)


@dataclass
class ModulusReport:
    kind: str
    delta: float
    p: float
    value: float
    grid_spec: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _grid(f: ScalarField, grid: ModulusGrid | None) -> ModulusGrid:
    return grid if grid is not None else ModulusGrid.default(f.d)


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1.0 or not np.isfinite(p):
        raise DomainError(f"p must satisfy 1 <= p < inf, got {p}")
    return p


# -- integral modulus --------------------------------------------------------------


def _shift_integral(f: ScalarField, h: np.ndarray, p: float, grid: ModulusGrid) -> float:
    """``int |f(x+h) - f(x)|^p`` over ``{x : x, x+h in Q_d}``."""
    axes = []
    for i in range(f.d):
        lo, hi = max(0.0, -h[i]), min(1.0, 1.0 - h[i])
        if hi <= lo:
            return 0.0
        sing = f.singular_points(i)
        extra = list(sing) + [s - h[i] for s in sing]
        axes.append(composite(partition(grid.x_points - 1, extra, lo, hi), grid.rule))
    pts = np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), axis=-1)
    shifted = np.clip(pts + h, 0.0, 1.0)
    t = np.abs(f.values(shifted) - f.values(pts)) ** p
    for _, w in reversed(axes):
        t = t @ w
    return float(t)


def _shifts(d: int, delta: float, h_points: int) -> np.ndarray:
    m = max(1, (h_points - 1) // 2)
    steps = delta * np.arange(-m, m + 1) / m
    out = []
    for h in itertools.product(steps, repeat=d):
        nz = [c for c in h if c != 0.0]
        # f(x+h)-f(x) and f(x)-f(x-h) integrate to the same value: keep one sign
        if nz and nz[0] > 0.0:
            out.append(h)
    return np.asarray(out)


def lp_modulus(f: ScalarField, delta: float, p: float = 1.0, grid: ModulusGrid | None = None) -> float:
    """``omega_1(f; delta)_p``: sup over sampled shifts ``0 < |h|_inf <= delta``.

    Shifts are ``delta * j / m`` per axis, so the axis endpoints ``+-delta``
    are always sampled.
    """
    p = _check_p(p)
    delta = float(delta)
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    if delta > 1.0:
        raise DomainError(f"delta = {delta} exceeds the domain diameter 1")
    grid = _grid(f, grid)
    best = 0.0
    for h in _shifts(f.d, delta, grid.h_points):
        best = max(best, _shift_integral(f, h, p, grid))
    return best ** (1.0 / p)


def lp_modulus_profile(f: ScalarField, deltas: Sequence[float], p: float = 1.0,
                       grid: ModulusGrid | None = None) -> list[float]:
    """``omega_1`` at each of ``deltas`` (ascending), each a sup over the union of
    the shift sets of all smaller steps; non-decreasing by construction."""
    deltas = [float(x) for x in deltas]
    if any(b < a for a, b in zip(deltas, deltas[1:])):
        raise DomainError("deltas must be sorted ascending")
    out, running = [], 0.0
    for delta in deltas:
        running = max(running, lp_modulus(f, delta, p, grid))
        out.append(running)
    return out


# -- local and averaged moduli ------------------------------------------------------


def _window_samples(f: ScalarField, axis: int, centers: np.ndarray, delta: float,
                    t_points: int) -> np.ndarray:
    """Sample coordinates of ``[c - delta/2, c + delta/2] cap [0, 1]`` for each center.

    Returns shape ``(len(centers), t_points + extras)``. Singular locations are
    clipped into every window (a clipped copy is just a repeated endpoint);
    jumps also contribute the float just below the jump.
    """
    lo = np.maximum(0.0, centers - delta / 2)
    hi = np.minimum(1.0, centers + delta / 2)
    u = np.linspace(0.0, 1.0, t_points)
    cols = [lo[:, None] + (hi - lo)[:, None] * u[None, :]]
    for s in f.singular_points(axis):
        cols.append(np.clip(s, lo, hi)[:, None])
    for s in f.jump_points(axis):
        cols.append(np.clip(np.nextafter(s, -np.inf), lo, hi)[:, None])
    return np.concatenate(cols, axis=1)


def _tensor_windows(f: ScalarField, samples: Sequence[np.ndarray],
                    reduce: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Evaluate ``f`` on every product window and reduce over the window axes.

    ``samples[i]`` has shape ``(M_i, T_i)``: per-center sample coordinates on
    axis ``i``. ``reduce`` maps values of shape ``(c, T_0, ..., T_{d-1})`` to
    ``(c, ...)``. Returns the reduced values for every center combination,
    shaped ``(M_0, ..., M_{d-1}, ...)``.
    """
    d = len(samples)
    m = [s.shape[0] for s in samples]
    t = [s.shape[1] for s in samples]
    per_center = int(np.prod(t))
    chunk = max(1, _CHUNK_POINTS // per_center)
    centers = np.array(list(np.ndindex(*m))) if d > 1 else np.arange(m[0])[:, None]
    pieces = []
    for start in range(0, len(centers), chunk):
        idx = centers[start:start + chunk]
        c = len(idx)
        coords = []
        for i in range(d):
            shape = [c] + [1] * d
            shape[1 + i] = t[i]
            coords.append(np.broadcast_to(samples[i][idx[:, i]].reshape(shape), [c] + t))
        pts = np.stack(coords, axis=-1)
        pieces.append(reduce(f.values(pts)))
    out = np.concatenate(pieces, axis=0)
    return out.reshape(tuple(m) + out.shape[1:])


def _oscillation(values: np.ndarray) -> np.ndarray:
    flat = values.reshape(values.shape[0], -1)
    return flat.max(axis=1) - flat.min(axis=1)


def local_modulus(f: ScalarField, x, delta: float, grid: ModulusGrid | None = None) -> float:
    """``omega_1(f, x; delta)``: oscillation of ``f`` over the window
    ``{t in Q_d : |t - x|_inf <= delta/2}``, since both ends of a difference
    range over the same window."""
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.shape != (f.d,) or np.any(pt < 0.0) or np.any(pt > 1.0):
        raise DomainError("x must be a point of the unit hypercube")
    delta = float(delta)
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    grid = _grid(f, grid)
    samples = [_window_samples(f, i, pt[i:i + 1], delta, grid.t_points) for i in range(f.d)]
    return float(_tensor_windows(f, samples, _oscillation).ravel()[0])


def _tau_axes(f: ScalarField, delta: float, grid: ModulusGrid):
    axes = []
    for i in range(f.d):
        sing = f.singular_points(i)
        extra = list(sing) + [s - delta / 2 for s in sing] + [s + delta / 2 for s in sing]
        extra += [delta / 2, 1.0 - delta / 2]
        axes.append(composite(partition(grid.x_points - 1, extra), grid.rule))
    return axes


def local_modulus_grid(f: ScalarField, delta: float, grid: ModulusGrid | None = None):
    """Local modulus at the quadrature nodes used by :func:`tau_modulus`.

    Returns ``(axes, values)`` with ``axes`` a list of ``(nodes, weights)``.
    """
    grid = _grid(f, grid)
    axes = _tau_axes(f, delta, grid)
    samples = [_window_samples(f, i, x, delta, grid.t_points) for i, (x, _) in enumerate(axes)]
    return axes, _tensor_windows(f, samples, _oscillation)


def tau_modulus(f: ScalarField, delta: float, p: float = 1.0, grid: ModulusGrid | None = None) -> float:
    """``tau_1(f, delta)_p``: the L^p norm of ``x -> omega_1(f, x; delta)``."""
    p = _check_p(p)
    delta = float(delta)
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    axes, osc = local_modulus_grid(f, delta, grid)
    t = osc ** p
    for _, w in reversed(axes):
        t = t @ w
    return float(t) ** (1.0 / p)


# -- derivatives and Sobolev seminorm -------------------------------------------------


def _check_alpha(f: ScalarField, alpha) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != f.d or any(a not in (0, 1) for a in alpha):
        raise DomainError(f"multi-index {alpha} must have {f.d} entries in {{0, 1}}")
    if sum(alpha) < 1:
        raise DomainError("multi-index must have |alpha| >= 1")
    return alpha


def _difference(func: Callable, axis: int, step: float) -> Callable:
    """Second-order difference quotient along ``axis``; one-sided within ``2*step`` of the boundary."""

    def g(x):
        x = np.asarray(x, dtype=float)
        e = np.zeros(x.shape[-1])
        e[axis] = step
        t = x[..., axis]
        out = np.empty(x.shape[:-1])
        left = t < step
        right = t > 1.0 - step
        mid = ~(left | right)
        if np.any(mid):
            xm = x[mid]
            out[mid] = (func(xm + e) - func(xm - e)) / (2 * step)
        if np.any(left):
            xl = x[left]
            out[left] = (-3 * func(xl) + 4 * func(xl + e) - func(xl + 2 * e)) / (2 * step)
        if np.any(right):
            xr = x[right]
            out[right] = (3 * func(xr) - 4 * func(xr - e) + func(xr - 2 * e)) / (2 * step)
        return out

    return g


def mixed_partial(f: ScalarField, alpha, fd_step: float = 1e-5) -> ScalarField:
    """``D^alpha f`` for a multi-index with entries 0 or 1.

    Exact when ``f`` carries derivative information; otherwise nested
    difference quotients with step ``fd_step``, permitted only for fields
    flagged smooth.
    """
    alpha = _check_alpha(f, alpha)
    if f.has_partials:
        return f.partial(alpha)
    if not f.smooth:
        raise UnavailableDerivativeError(f"{f.label} has no partials and is not flagged smooth")
    func = f.values
    for axis, a in enumerate(alpha):
        if a:
            func = _difference(func, axis, fd_step)
    return ScalarField(f.d, func, f"D{alpha}{f.label}", smooth=True)


def first_order_indices(d: int) -> list[tuple[int, ...]]:
    return [tuple(int(j == i) for j in range(d)) for i in range(d)]


def binary_indices(d: int) -> list[tuple[int, ...]]:
    """All ``alpha in {0,1}^d`` with ``|alpha| >= 1``."""
    return [a for a in itertools.product((0, 1), repeat=d) if any(a)]


def sobolev_seminorm(f: ScalarField, p: float = 1.0, grid: ModulusGrid | None = None) -> float:
    """``|f|_{W_1^p}``: sum of the L^p norms of the first partials."""
    p = _check_p(p)
    grid = _grid(f, grid)
    return sum(
        field_lp_norm(mixed_partial(f, a), p, grid.x_points - 1, QuadratureRule.gauss_legendre(8))
        for a in first_order_indices(f.d)
    )


def derivative_norms(f: ScalarField, p: float = 1.0, grid: ModulusGrid | None = None) -> dict:
    """``||D^alpha f||_p`` for every ``alpha in {0,1}^d`` with ``|alpha| >= 1``."""
    p = _check_p(p)
    grid = _grid(f, grid)
    rule = QuadratureRule.gauss_legendre(8)
    return {a: field_lp_norm(mixed_partial(f, a), p, grid.x_points - 1, rule)
            for a in binary_indices(f.d)}


# -- K-functional upper estimate --------------------------------------------------


def _steklov_terms(f: ScalarField, radius: float, p: float, grid: ModulusGrid) -> tuple[float, float]:
    """``(||f - g||_p, |g|_{W_1^p})`` for the moving average ``g`` of side ``radius``.

    The window ``prod_i [c_i - radius/2, c_i + radius/2]`` has its center
    clamped into ``[radius/2, 1 - radius/2]``, so it never leaves ``Q_d``.
    Along axis ``i`` the average is then constant near the faces and, in
    the interior, its partial derivative is the difference of the two face
    means divided by ``radius``.
    """
    half = radius / 2
    rule = QuadratureRule.gauss_legendre(8)
    outer, window = [], []
    for i in range(f.d):
        sing = f.singular_points(i)
        extra = list(sing) + [s - half for s in sing] + [s + half for s in sing] + [half, 1.0 - half]
        x, w = composite(partition(grid.x_points - 1, extra), grid.rule)
        c = np.clip(x, half, 1.0 - half)
        nodes, weights = split_interval_rule(c - half, c + half, sing, rule)
        outer.append((x, w, c))
        window.append((nodes, weights / radius))

    d = f.d
    m = [len(o[0]) for o in outer]
    # g on the outer grid: weighted sum over the product window
    gvals = _window_average(f, [wn for wn, _ in window], [ww for _, ww in window])
    fvals = f.values(np.stack(np.meshgrid(*[o[0] for o in outer], indexing="ij"), axis=-1))
    ws = [o[1] for o in outer]
    err = _norm(fvals - gvals, ws, p)
    semi = 0.0
    for i in range(d):
        x, _, c = outer[i]
        faces = np.stack([c - half, c + half], axis=1)
        nodes = [wn for wn, _ in window]
        weights = [ww for _, ww in window]
        nodes[i] = faces
        weights[i] = np.tile([-1.0 / radius, 1.0 / radius], (m[i], 1))
        grad = _window_average(f, nodes, weights)
        interior = (x > half) & (x < 1.0 - half)
        shape = [1] * d
        shape[i] = m[i]
        grad = grad * interior.reshape(shape)
        semi += _norm(grad, ws, p)
    return err, semi


def _window_average(f: ScalarField, nodes: Sequence[np.ndarray], weights: Sequence[np.ndarray]) -> np.ndarray:
    """Per-center weighted sums of ``f`` over product windows.

    ``nodes[i]`` and ``weights[i]`` have shape ``(M_i, T_i)``; the result has
    shape ``(M_0, ..., M_{d-1})``.
    """
    d = len(nodes)

    m = [n.shape[0] for n in nodes]
    t = [n.shape[1] for n in nodes]
    per_center = int(np.prod(t))
    chunk = max(1, _CHUNK_POINTS // per_center)
    centers = np.array(list(np.ndindex(*m))) if d > 1 else np.arange(m[0])[:, None]
    out = np.empty(len(centers))
    for start in range(0, len(centers), chunk):
        idx = centers[start:start + chunk]
        c = len(idx)
        coords = []
        for i in range(d):
            shape = [c] + [1] * d
            shape[1 + i] = t[i]
            coords.append(np.broadcast_to(nodes[i][idx[:, i]].reshape(shape), [c] + t))
        vals = f.values(np.stack(coords, axis=-1))
        for i in reversed(range(d)):
            vals = np.einsum("c...k,ck->c...", vals, weights[i][idx[:, i]])
        out[start:start + c] = vals
    return out.reshape(m)


def _norm(values: np.ndarray, weights: Sequence[np.ndarray], p: float) -> float:
    t = np.abs(values) ** p
    for w in reversed(weights):
        t = t @ w
    return float(t) ** (1.0 / p)


def kfunctional_candidates(f: ScalarField, t: float, p: float = 1.0,
                           radii: Sequence[float] = DEFAULT_RADII,
                           grid: ModulusGrid | None = None) -> list[tuple[str, float]]:
    """Values ``||f - g||_p + t |g|_{W_1^p}`` for each candidate ``g``."""
    p = _check_p(p)
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if len(radii) == 0:
        raise DomainError("at least one smoothing radius is required")
    grid = _grid(f, grid)
    out = []
    try:
        out.append(("f", t * sobolev_seminorm(f, p, grid)))
    except UnavailableDerivativeError:
        pass
    for radius in radii:
        radius = float(radius)
        if not 0.0 < radius <= 1.0:
            continue
        err, semi = _steklov_terms(f, radius, p, grid)
        out.append((f"steklov({radius:.6g})", err + t * semi))
    if not out:
        raise EmptyCandidateError(f"no admissible candidate for {f.label}")
    return out


def kfunctional_upper(f: ScalarField, t: float, p: float = 1.0,
                      radii: Sequence[float] = DEFAULT_RADII,
                      grid: ModulusGrid | None = None) -> float:
    """Upper estimate of ``K_{1,p}(f; t)``: the best of ``f`` itself (when
    differentiable) and moving averages of ``f`` at each radius."""
    return min(v for _, v in kfunctional_candidates(f, t, p, radii, grid))


# -- tau properties -----------------------------------------------------------------


@dataclass
class TauPropertyReport:
    """Outcome of the monotonicity, scaling and derivative-bound checks.

    ``derivative_bound`` is ``None`` when the partials are unavailable.
    """

    monotone: bool
    scaling: bool
    derivative_bound: bool | None
    deltas: list[float]
    tau: list[float]
    tau_scaled: list[float]
    scaling_factor: float
    derivative_rhs: list[float] | None

    @property
    def passed(self) -> bool:
        return self.monotone and self.scaling and self.derivative_bound is not False


def _le(a: float, b: float, rtol: float = 1e-12) -> bool:
    return a <= b * (1.0 + rtol) + 1e-15


def tau_property_check(f: ScalarField, p: float, deltas: Sequence[float], lam: float = 2.0,
                       grid: ModulusGrid | None = None) -> TauPropertyReport:
    """Check the three tau-modulus properties on the computed values.

    Comparisons allow a relative slack of ``1e-12`` for rounding.
    """
    p = _check_p(p)
    deltas = [float(x) for x in deltas]
    if not deltas or any(x <= 0 for x in deltas):
        raise DomainError("deltas must be positive")
    if any(b < a for a, b in zip(deltas, deltas[1:])):
        raise DomainError("deltas must be sorted ascending")
    if not lam > 0:
        raise DomainError("lambda must be positive")
    grid = _grid(f, grid)
    tau = [tau_modulus(f, x, p, grid) for x in deltas]
    monotone = all(_le(a, b) for a, b in zip(tau, tau[1:]))
    factor = float((2 * np.floor(lam) + 2) ** (f.d + 1))
    scaled = [tau_modulus(f, lam * x, p, grid) for x in deltas]
    scaling = all(_le(s, factor * v) for s, v in zip(scaled, tau))
    try:
        norms = derivative_norms(f, p, grid)
    except UnavailableDerivativeError:
        rhs = None
        bound = None
    else:
        rhs = [2.0 * sum(x ** sum(a) * v for a, v in norms.items()) for x in deltas]
        bound = all(_le(v, r) for v, r in zip(tau, rhs))
    return TauPropertyReport(monotone, scaling, bound, deltas, tau, scaled, factor, rhs)


def compute_modulus(kind: str, f: ScalarField, delta: float = 0.1, p: float = 1.0,
                    grid: ModulusGrid | None = None, x=None,
                    radii: Sequence[float] = DEFAULT_RADII) -> ModulusReport:
    """Dispatch by ``kind`` and wrap the value with its grid metadata."""
    grid = _grid(f, grid)
    if kind == "omega_lp":
        value = lp_modulus(f, delta, p, grid)
    elif kind == "tau":
        value = tau_modulus(f, delta, p, grid)
    elif kind == "local":
        value = local_modulus(f, x if x is not None else [0.5] * f.d, delta, grid)
    elif kind == "sobolev_seminorm":
        value = sobolev_seminorm(f, p, grid)
    elif kind == "kfunctional_upper":
        value = kfunctional_upper(f, delta, p, radii, grid)
    else:
        raise DomainError(f"unknown modulus kind {kind!r}")
    return ModulusReport(kind, float(delta), float(p), float(value), asdict(grid))
