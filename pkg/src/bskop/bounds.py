"""Closed-form bound quantities and empirical bound-ratio reports.

Only the operator-norm bound comes with an explicit constant. The estimate
theorems hold up to constants that are never quantified, so a report lists
``lhs / rhs`` per degree and the largest ratio stands in for the constant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from bskop.basis import OperatorParams
from bskop.bsk_operator import BSKOperator, operator_norms
from bskop.errors import DomainError
from bskop.fields import ScalarField
from bskop.moduli import ModulusGrid, derivative_norms, lp_modulus, tau_modulus
from bskop.quadrature import QuadratureRule

THEOREMS = ("tau_estimate", "smooth_estimate", "omega_estimate", "lp_norm_bound")

# a left side this small is rounding noise: the bound holds with any constant
ZERO_LHS = 1e-12


def compute_a_nr(params: OperatorParams) -> float:
    """``(3n + 1 + 3r(r-1)) / (12 (n+1)^2)``, the sup over ``x`` of the central second moment."""
    params.require_strict()
    n, r = params.n, params.r
    return (3 * n + 1 + 3 * r * (r - 1)) / (12 * (n + 1) ** 2)


def a_nr_exact(params: OperatorParams) -> Fraction:
    """:func:`compute_a_nr` as an exact rational."""
    params.require_strict()
    n, r = params.n, params.r
    return Fraction(3 * n + 1 + 3 * r * (r - 1), 12 * (n + 1) ** 2)


def b_r_exact(r: int) -> Fraction:
    """:func:`compute_b_r` as an exact rational."""
    if r < 0:
        raise DomainError(f"r must be non-negative, got {r}")
    return Fraction(1, 4) if r <= 1 else Fraction(3 * r * r + 3 * r + 4, 24 * (r + 1))


def compute_m_r(r: int, d: int) -> float:
    """Operator-norm constant: ``((2r+2)/(r+3))^d`` for ``r > 1``, else 1."""
    if r < 0 or d < 1:
        raise DomainError(f"need r >= 0 and d >= 1, got r={r}, d={d}")
    if r <= 1:
        return 1.0
    return ((2 * r + 2) / (r + 3)) ** d


def compute_b_r(r: int) -> float:
    """Step-size constant: ``(3r^2 + 3r + 4) / (24 (r+1))`` for ``r > 1``, else 1/4."""
    if r < 0:
        raise DomainError(f"r must be non-negative, got {r}")
    if r <= 1:
        return 0.25
    return (3 * r * r + 3 * r + 4) / (24 * (r + 1))


@dataclass
class BoundQuantities:
    a_nr: float
    m_r: float
    b_r: float
    params: OperatorParams

    @classmethod
    def of(cls, params: OperatorParams) -> "BoundQuantities":
        return cls(compute_a_nr(params), compute_m_r(params.r, params.d),
                   compute_b_r(params.r), params)


@dataclass
class RatioRow:
    n: int
    lhs: float
    rhs: float
    ratio: float | None


@dataclass
class BoundRatioReport:
    theorem_id: str
    p: float
    r: int
    d: int
    function: str
    rows: list[RatioRow] = field(default_factory=list)

    @property
    def max_ratio(self) -> float | None:
        ratios = [row.ratio for row in self.rows if row.ratio is not None]
        return max(ratios) if ratios else None

    def ratios(self) -> list[float | None]:
        return [row.ratio for row in self.rows]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["max_ratio"] = self.max_ratio
        return out


def theorem_rhs(theorem_id: str, f: ScalarField, params: OperatorParams, p: float,
                grid: ModulusGrid | None = None, field_norm: float | None = None,
                deriv_norms: dict | None = None) -> float:
    """Right-hand side of a theorem with its unknown constant dropped."""
    n, d = params.n, params.d
    if theorem_id == "tau_estimate":
        return tau_modulus(f, compute_a_nr(params) ** (1.0 / (2 * d)), p, grid)
    if theorem_id == "omega_estimate":
        return lp_modulus(f, (n + 1) ** (-1.0 / (2 * d)), p, grid)
    if theorem_id == "smooth_estimate":
        norms = deriv_norms if deriv_norms is not None else derivative_norms(f, p, grid)
        scale = (n + 1) ** (-1.0 / (2 * d))
        return sum(scale ** sum(a) * v for a, v in norms.items())
    if theorem_id == "lp_norm_bound":
        if field_norm is None:
            raise DomainError("lp_norm_bound needs ||f||_p")
        return compute_m_r(params.r, d) ** (1.0 / p) * field_norm
    raise DomainError(f"unknown theorem {theorem_id!r}; expected one of {THEOREMS}")


def verify_theorem(theorem_id: str, f: ScalarField, r: int, n_values: Sequence[int],
                   p: float = 1.0, grid: ModulusGrid | None = None,
                   rule: QuadratureRule | None = None) -> BoundRatioReport:
    """Bound-ratio report over a sweep of degrees.

    ``lhs`` is ``||K f - f||_p`` for the estimate theorems and ``||K f||_p``
    for ``lp_norm_bound``. When the right side vanishes the ratio is 0 if the
    left side is below :data:`ZERO_LHS` (constant fields) and ``None``
    otherwise.
    """
    if theorem_id not in THEOREMS:
        raise DomainError(f"unknown theorem {theorem_id!r}; expected one of {THEOREMS}")
    n_values = [int(n) for n in n_values]
    if not n_values:
        raise DomainError("the degree sweep is empty")
    d = f.d
    report = BoundRatioReport(theorem_id, float(p), int(r), d, f.label)
    deriv = derivative_norms(f, p, grid) if theorem_id == "smooth_estimate" else None
    for n in n_values:
        params = OperatorParams(n, r, d)
        params.require_strict()
        op = BSKOperator(params, rule)
        norms = operator_norms(op, f, [p])[float(p)]
        lhs = norms["image"] if theorem_id == "lp_norm_bound" else norms["error"]
        rhs = theorem_rhs(theorem_id, f, params, p, grid, norms["field"], deriv)
        report.rows.append(RatioRow(n, lhs, rhs, bound_ratio(lhs, rhs)))
    return report


def bound_ratio(lhs: float, rhs: float) -> float | None:
    """``lhs / rhs``; for ``rhs == 0`` see :func:`verify_theorem`."""
    if rhs > 0.0:
        return lhs / rhs
    return 0.0 if lhs <= ZERO_LHS else None


def chain_holds(params: OperatorParams) -> bool:
    """``A_{n,r} <= B_r / (n+1)``, decided in exact arithmetic.

    Both sides coincide at ``n = 2r + 1``, where rounded floats may land
    either way.
    """
    return a_nr_exact(params) <= b_r_exact(params.r) / (params.n + 1)


def central_moment_sup(params: OperatorParams, points: int = 1001) -> float:
    """Max over a uniform grid of the closed-form central second moment."""
    params.require_strict()
    x = np.linspace(0.0, 1.0, points)
    n, r = params.n, params.r
    vals = (n - 1 + r * (r - 1)) / (n + 1) ** 2 * x * (1 - x) + 1.0 / (3 * (n + 1) ** 2)
    return float(vals.max())


def geometric_degrees(start: int, stop: int) -> list[int]:
    """``start, 2 start, 4 start, ...`` up to ``stop`` (inclusive)."""
    if start < 1 or stop < start:
        raise DomainError(f"invalid geometric range {start}:{stop}")
    out = []
    n = start
    while n <= stop:
        out.append(n)
        n *= 2
    return out


def default_sweep(d: int) -> list[int]:
    return {1: [8, 16, 32, 64, 128, 256], 2: [8, 16, 32]}.get(d, [8, 16])


def is_finite(x: float | None) -> bool:
    return x is not None and math.isfinite(x)
