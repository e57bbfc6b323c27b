"""Convergence sweeps over the degree ``n`` and their CSV/JSON reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from bskop.basis import OperatorParams
from bskop.bounds import bound_ratio, compute_a_nr
from bskop.bsk_operator import BSKOperator, DEFAULT_BUDGET, operator_norms, sup_error
from bskop.errors import DomainError
from bskop.expr import parse_function
from bskop.fields import ScalarField, catalog
from bskop.moduli import ModulusGrid, lp_modulus, tau_modulus
from bskop.quadrature import QuadratureRule

# errors at or below this level are rounding noise and carry no rate information
NOISE_FLOOR = 1e-13

CSV_COLUMNS = ("n", "p", "error_lp", "error_sup", "a_nr", "tau_scale", "omega_scale",
               "ratio_tau", "ratio_omega")


@dataclass(frozen=True)
class FunctionSpec:
    """A catalog name (``"kink@0.3"``) or an expression prefixed with ``expr:``."""

    source: str
    d: int = 1

    def build(self) -> ScalarField:
        return resolve_function(self.source, self.d)

    @property
    def declared_singularities(self) -> list[dict]:
        return [asdict(s) for s in self.build().singularities]


def resolve_function(source: str, d: int) -> ScalarField:
    source = source.strip()
    if source.startswith("expr:"):
        return parse_function(source[len("expr:"):], d)
    try:
        return catalog(source, d)
    except KeyError as exc:
        raise DomainError(str(exc)) from None


@dataclass
class ConvergenceRow:
    n: int
    p: float
    error_lp: float
    error_sup: float
    a_nr: float
    tau_scale: float
    omega_scale: float
    ratio_tau: float | None
    ratio_omega: float | None


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow] = field(default_factory=list)
    fitted_order: dict[str, float | None] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def errors(self, p: float) -> list[float]:
        return [row.error_lp for row in self.rows if row.p == float(p)]

    def to_dict(self) -> dict:
        return {
            "rows": [asdict(row) for row in self.rows],
            "fitted_order": dict(self.fitted_order),
            "config": dict(self.config),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceReport":
        rows = [ConvergenceRow(**row) for row in data.get("rows", [])]
        return cls(rows, dict(data.get("fitted_order", {})), dict(data.get("config", {})))


def fit_order(ns: Sequence[int], errors: Sequence[float]) -> float | None:
    """Least-squares slope of ``log error`` against ``log n``.

    Needs three errors above :data:`NOISE_FLOOR`; returns ``None`` otherwise.
    """
    pairs = [(n, e) for n, e in zip(ns, errors) if e > NOISE_FLOOR and math.isfinite(e)]
    if len(pairs) < 3:
        return None
    x = np.log([n for n, _ in pairs])
    y = np.log([e for _, e in pairs])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def run_convergence(spec: FunctionSpec | ScalarField, r: int, n_values: Sequence[int],
                    ps: Sequence[float] = (1.0,), quad_order: int = 8,
                    grid: ModulusGrid | None = None, sup_points: int | None = None,
                    budget: int = DEFAULT_BUDGET) -> ConvergenceReport:
    """Error norms, bound quantities and moduli at the theorem scales for each ``n``."""
    f = spec.build() if isinstance(spec, FunctionSpec) else spec
    d = f.d
    n_values = [int(n) for n in n_values]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise DomainError("n-list must be strictly increasing")
    ps = [float(p) for p in ps]
    grid = grid or ModulusGrid.default(d)
    if sup_points is None:
        sup_points = 257 if d == 1 else 33
    rule = QuadratureRule.gauss_legendre(quad_order)
    for n in n_values:
        OperatorParams(n, r, d).require_strict()
    rows = []
    for n in n_values:
        params = OperatorParams(n, r, d)
        op = BSKOperator(params, rule, budget)
        means = op.cell_means(f)
        norms = operator_norms(op, f, ps, means)
        esup = sup_error(op, f, sup_points, means)
        a_nr = compute_a_nr(params)
        for p in ps:
            tau = tau_modulus(f, a_nr ** (1.0 / (2 * d)), p, grid)
            omega = lp_modulus(f, (n + 1) ** (-1.0 / (2 * d)), p, grid)
            err = norms[p]["error"]
            rows.append(ConvergenceRow(n, p, err, esup, a_nr, tau, omega,
                                       bound_ratio(err, tau), bound_ratio(err, omega)))
    fitted = {}
    for p in ps:
        sel = [row for row in rows if row.p == p]
        fitted[_pkey(p)] = fit_order([row.n for row in sel], [row.error_lp for row in sel])
    config = {
        "function": f.label,
        "d": d,
        "r": int(r),
        "n_list": n_values,
        "p_list": ps,
        "quad_order": quad_order,
        "grid": asdict(grid),
        "sup_points": sup_points,
        "singularities": [asdict(s) for s in f.singularities],
    }
    return ConvergenceReport(rows, fitted, config)


def _pkey(p: float) -> str:
    return repr(float(p))


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def report_csv(report: ConvergenceReport) -> str:
    """CSV text with the fixed header; one row per ``(n, p)``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def report_json(report: ConvergenceReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def emit_report(report: ConvergenceReport, fmt: str = "csv", path: str | Path | None = None) -> str:
    """Render ``report`` as ``csv`` or ``json``; write it to ``path`` when given."""
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = report_json(report)
    else:
        raise DomainError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def load_report(path: str | Path) -> ConvergenceReport:
    return ConvergenceReport.from_dict(json.loads(Path(path).read_text()))
