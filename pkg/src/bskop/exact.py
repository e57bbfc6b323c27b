"""Exact rational evaluation of the BSK operator on polynomials.

Only meant as an independent ground truth in tests: the Stancu weights are
built from integer binomials and the cell means of monomials from their
antiderivatives, all in :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from bskop.basis import OperatorParams

Polynomial = Mapping[tuple[int, ...], Fraction]


def bernstein_exact(m: int, k: int, x: Fraction) -> Fraction:
    if k < 0 or k > m:
        return Fraction(0)
    return comb(m, k) * x**k * (1 - x) ** (m - k)


def stancu_exact(params: OperatorParams, k: int, x: Fraction) -> Fraction:
    m = params.n - params.r
    return (1 - x) * bernstein_exact(m, k, x) + x * bernstein_exact(m, k - params.r, x)


def monomial_cell_mean(n: int, k: int, e: int) -> Fraction:
    """Mean of ``t**e`` over ``[k/(n+1), (k+1)/(n+1)]``."""
    return Fraction((k + 1) ** (e + 1) - k ** (e + 1), (e + 1) * (n + 1) ** e)


def bsk_apply_exact(params: OperatorParams, poly: Polynomial, x: Sequence) -> Fraction:
    """``K^d_{n,r}(poly; x)`` with rational ``x``; ``poly`` maps exponent tuples to coefficients."""
    x = [Fraction(xi) for xi in x]
    d, n = params.d, params.n
    weights = [[stancu_exact(params, k, xi) for k in range(n + 1)] for xi in x]
    total = Fraction(0)
    for k in all_k(params):
        w = Fraction(1)
        for i in range(d):
            w *= weights[i][k[i]]
        if w == 0:
            continue
        mean = Fraction(0)
        for exps, coeff in poly.items():
            term = Fraction(coeff)
            for i in range(d):
                term *= monomial_cell_mean(n, k[i], exps[i])
            mean += term
        total += w * mean
    return total


def poly_eval_exact(poly: Polynomial, x: Sequence) -> Fraction:
    x = [Fraction(xi) for xi in x]
    total = Fraction(0)
    for exps, coeff in poly.items():
        term = Fraction(coeff)
        for xi, e in zip(x, exps):
            term *= xi**e
        total += term
    return total


def stancu_partition_exact(params: OperatorParams, x: Fraction) -> Fraction:
    return sum((stancu_exact(params, k, Fraction(x)) for k in range(params.n + 1)), Fraction(0))


def all_k(params: OperatorParams):
    return itertools.product(range(params.n + 1), repeat=params.d)
