"""Real-valued fields on the unit hypercube and the built-in function catalog."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from bskop.errors import DomainError, UnavailableDerivativeError

Alpha = tuple[int, ...]


@dataclass(frozen=True)
class Singularity:
    """Axis-aligned jump or kink of a field at ``x[axis] == location`` (axis is 0-based)."""

    axis: int
    location: float
    kind: str = "jump"

    def __post_init__(self):
        if self.kind not in ("jump", "kink"):
            raise DomainError(f"unknown singularity kind {self.kind!r}")


class ScalarField:
    """A function ``Q_d -> R`` evaluated on arrays of points.

    Parameters
    ----------
    d : int
        Number of variables.
    func : callable
        Maps an array of shape ``(..., d)`` to values of shape ``(...)``.
    label : str
        Identifier used in reports.
    singularities : sequence of Singularity
        Known jump/kink hyperplanes; integration and sup grids insert them.
    partials : callable or mapping, optional
        Exact mixed partial derivatives. A callable receives a multi-index and
        returns a function of points (or raises
        :class:`UnavailableDerivativeError`); a mapping is looked up by
        multi-index.
    smooth : bool
        Whether finite differences may stand in for missing partials.
    """

    def __init__(
        self,
        d: int,
        func: Callable[[np.ndarray], np.ndarray],
        label: str = "f",
        singularities: Sequence[Singularity] = (),
        partials: Callable | Mapping | None = None,
        smooth: bool = False,
    ):
        if d < 1:
            raise DomainError(f"dimension must be positive, got {d}")
        self.d = int(d)
        self._func = func
        self.label = label
        self.singularities = tuple(s for s in singularities if 0.0 < s.location < 1.0)
        self._partials = partials
        self.smooth = smooth

    def __repr__(self):
        return f"ScalarField(d={self.d}, label={self.label!r})"

    def values(self, points) -> np.ndarray:
        """Evaluate at points of shape ``(..., d)`` without domain checks."""
        pts = np.asarray(points, dtype=float)
        out = np.asarray(self._func(pts), dtype=float)
        return np.broadcast_to(out, pts.shape[:-1]).copy() if out.shape != pts.shape[:-1] else out

    def __call__(self, *coords):
        """Evaluate at ``f(x1, ..., xd)``; coordinates broadcast and must lie in [0, 1]."""
        if len(coords) != self.d:
            raise DomainError(f"{self.label} takes {self.d} coordinates, got {len(coords)}")
        arrays = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in coords])
        pts = np.stack(arrays, axis=-1)
        if np.any(~np.isfinite(pts)) or np.any(pts < 0.0) or np.any(pts > 1.0):
            raise DomainError(f"point outside the unit hypercube for {self.label}")
        out = self.values(pts)
        if np.any(~np.isfinite(out)):
            raise DomainError(f"{self.label} is not finite at the requested point")
        return float(out) if out.ndim == 0 else out

    def singular_points(self, axis: int) -> list[float]:
        return sorted({s.location for s in self.singularities if s.axis == axis})

    def jump_points(self, axis: int) -> list[float]:
        return sorted({s.location for s in self.singularities if s.axis == axis and s.kind == "jump"})

    @property
    def has_partials(self) -> bool:
        return self._partials is not None

    def partial(self, alpha: Alpha) -> "ScalarField":
        """Exact mixed partial ``D^alpha f`` from the attached derivative information."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.d:
            raise DomainError(f"multi-index {alpha} has wrong length for d={self.d}")
        if not any(alpha):
            return self
        if self._partials is None:
            raise UnavailableDerivativeError(f"{self.label} carries no exact partials")
        if callable(self._partials):
            func = self._partials(alpha)
        else:
            try:
                func = self._partials[alpha]
            except KeyError:
                raise UnavailableDerivativeError(
                    f"partial {alpha} of {self.label} is not available"
                ) from None
        sing = [s for s in self.singularities if alpha[s.axis] == 0]
        return ScalarField(self.d, func, f"D{alpha}{self.label}", sing)


def _const(c: float):
    return lambda x: np.full(x.shape[:-1], c)


def _zero_partials(alpha):
    return _const(0.0)


def constant(d: int, c: float = 1.0) -> ScalarField:
    return ScalarField(d, _const(float(c)), "one" if c == 1.0 else f"const{c:g}",
                       partials=_zero_partials, smooth=True)


def coordinate(d: int, j: int) -> ScalarField:
    """The coordinate function ``pr_j`` (``j`` is 1-based)."""
    i = _axis(d, j)

    def partials(alpha):
        if sum(alpha) == 1 and alpha[i] == 1:
            return _const(1.0)
        return _const(0.0)

    return ScalarField(d, lambda x: x[..., i].copy(), f"pr{j}", partials=partials, smooth=True)


def coordinate_square(d: int, j: int) -> ScalarField:
    """``pr_j**2`` (``j`` is 1-based)."""
    i = _axis(d, j)

    def partials(alpha):
        if any(a > 1 for a in alpha):
            raise UnavailableDerivativeError("only multi-indices with entries 0 or 1 are supported")
        if sum(alpha) == 1 and alpha[i] == 1:
            return lambda x: 2.0 * x[..., i]
        return _const(0.0)

    return ScalarField(d, lambda x: x[..., i] ** 2, f"sq{j}", partials=partials, smooth=True)


def _binary_only(alpha):
    if any(a > 1 for a in alpha):
        raise UnavailableDerivativeError("only multi-indices with entries 0 or 1 are supported")


def product(d: int) -> ScalarField:
    """``x_1 * ... * x_d``."""

    def partials(alpha):
        _binary_only(alpha)
        rest = [i for i in range(d) if alpha[i] == 0]
        return lambda x: np.prod(x[..., rest], axis=-1)

    return ScalarField(d, lambda x: np.prod(x, axis=-1), "prod", partials=partials, smooth=True)


def exponential(d: int) -> ScalarField:
    """``exp(x_1 + ... + x_d)``; every mixed partial equals the function."""

    def func(x):
        return np.exp(np.sum(x, axis=-1))

    def partials(alpha):
        _binary_only(alpha)
        return func

    return ScalarField(d, func, "exp", partials=partials, smooth=True)


def cosine(d: int) -> ScalarField:
    """``prod_i cos(pi x_i)``, a sign-changing smooth field."""

    def func(x):
        return np.prod(np.cos(np.pi * x), axis=-1)

    def partials(alpha):
        _binary_only(alpha)
        a = np.asarray(alpha, dtype=bool)

        def g(x):
            factors = np.where(a, -np.pi * np.sin(np.pi * x), np.cos(np.pi * x))
            return np.prod(factors, axis=-1)

        return g

    return ScalarField(d, func, "cos", partials=partials, smooth=True)


def _singular_partials(i: int, label: str):
    def partials(alpha):
        if alpha[i] != 0:
            raise UnavailableDerivativeError(f"{label} is not differentiable along axis {i + 1}")
        return _const(0.0)

    return partials


def step(d: int, j: int = 1, location: float = 0.5) -> ScalarField:
    """Unit jump ``1[x_j >= location]``."""
    i = _axis(d, j)
    label = f"step{j}@{location:g}"
    return ScalarField(
        d,
        lambda x: (x[..., i] >= location).astype(float),
        label,
        [Singularity(i, float(location), "jump")],
        partials=_singular_partials(i, label),
    )


def kink(d: int, j: int = 1, location: float = 0.5) -> ScalarField:
    """``|x_j - location|``."""
    i = _axis(d, j)
    label = f"kink{j}@{location:g}"
    return ScalarField(
        d,
        lambda x: np.abs(x[..., i] - location),
        label,
        [Singularity(i, float(location), "kink")],
        partials=_singular_partials(i, label),
    )


def _axis(d: int, j: int) -> int:
    if not 1 <= j <= d:
        raise DomainError(f"coordinate index {j} outside 1..{d}")
    return j - 1


_NAME = re.compile(r"^(?P<base>[a-z]+)(?P<j>\d+)?(?:@(?P<loc>[-+0-9.eE]+))?$")


def catalog(name: str, d: int) -> ScalarField:
    """Build a catalog field by name.

    Names: ``one``, ``pr<j>``, ``sq<j>``, ``prod``, ``exp``, ``cos``,
    ``step[<j>][@a]`` and ``kink[<j>][@a]`` (``j`` is 1-based, ``a``
    defaults to 0.5).
    """
    m = _NAME.match(name.strip())
    if not m:
        raise KeyError(f"unknown catalog function {name!r}")
    base, j, loc = m["base"], m["j"], m["loc"]
    j = int(j) if j is not None else None
    if loc is not None and base not in ("step", "kink"):
        raise KeyError(f"catalog function {base!r} takes no location")
    if base == "one" and j is None:
        return constant(d)
    if base == "pr" and j is not None:
        return coordinate(d, j)
    if base == "sq" and j is not None:
        return coordinate_square(d, j)
    if base in ("prod", "exp", "cos") and j is None:
        return {"prod": product, "exp": exponential, "cos": cosine}[base](d)
    if base in ("step", "kink"):
        a = float(loc) if loc is not None else 0.5
        if not 0.0 < a < 1.0:
            raise DomainError(f"singularity location {a} must lie inside (0, 1)")
        return (step if base == "step" else kink)(d, j or 1, a)
    raise KeyError(f"unknown catalog function {name!r}")


def catalog_names(d: int) -> list[str]:
    """Default catalog used by sweeps and tests."""
    names = ["one"] + [f"pr{j}" for j in range(1, d + 1)] + ["sq1"]
    if d > 1:
        names.append("prod")
    return names + ["exp", "cos", "step", "kink"]


def differentiable_names(d: int) -> list[str]:
    return [name for name in catalog_names(d) if not name.startswith(("step", "kink"))]
