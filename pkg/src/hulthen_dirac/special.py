"""Jacobi, Laguerre and Kummer 1F1 functions with complex parameters.

All evaluators accept scalar or array arguments and return complex values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, PoleAtB, RecurrenceBreakdown

_BREAKDOWN_RTOL = 1e-13

HYP1F1_RTOL = 1e-16
HYP1F1_MAX_TERMS = 10_000
HYP1F1_QUIET_TERMS = 3


@dataclass(frozen=True)
class JacobiParams:
    a: complex
    b: complex


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _ret(z_in, value):
    return complex(value) if np.ndim(z_in) == 0 else value


def gbinom(x: complex, r: int) -> complex:
    """Generalized binomial x choose r for complex x and integer r >= 0 (product form)."""
    out = 1 + 0j
    for j in range(r):
        out *= (x - j) / (j + 1)
    return out


def jacobi_endpoint(n: int, a: complex) -> complex:
    """P_n^(a,b)(1) = prod_{j=1..n} (a + j)/j."""
    return gbinom(n + a, n)


def jacobi_p_sum(n: int, a: complex, b: complex, z):
    """P_n^(a,b)(z) from the explicit finite sum; never breaks down."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    zz = _as_complex(z)
    u = (zz - 1) / 2
    w = (zz + 1) / 2
    total = np.zeros_like(zz)
    for k in range(n + 1):
        total = total + gbinom(n + a, n - k) * gbinom(n + b, k) * u**k * w ** (n - k)
    return _ret(z, total)


def _jacobi_recurrence(n, a, b, zz):
    p_prev = np.ones_like(zz)
    if n == 0:
        return p_prev
    p = (a + 1) + (a + b + 2) * (zz - 1) / 2
    for k in range(2, n + 1):
        c = 2 * k + a + b
        den = 2 * k * (k + a + b) * (c - 2)
        if abs(den) <= _BREAKDOWN_RTOL * max(1.0, abs(c) ** 3):
            raise RecurrenceBreakdown(f"vanishing recurrence denominator at degree {k}")
        p_next = ((c - 1) * (c * (c - 2) * zz + a * a - b * b) * p
                  - 2 * (k + a - 1) * (k + b - 1) * c * p_prev) / den
        p_prev, p = p, p_next
    return p


def jacobi_p(n: int, a: complex, b: complex, z):
    """Jacobi polynomial P_n^(a,b)(z), standard normalization.

    Three-term recurrence in n; if a recurrence denominator vanishes the
    explicit sum is used instead.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    a, b = complex(a), complex(b)
    zz = _as_complex(z)
    try:
        val = _jacobi_recurrence(n, a, b, zz)
    except RecurrenceBreakdown:
        val = _as_complex(jacobi_p_sum(n, a, b, zz))
    return _ret(z, val)


def jacobi_p_deriv(n: int, a: complex, b: complex, z, order: int = 1):
    """d^order/dz^order P_n^(a,b)(z) via the parameter-shift identity.

    d/dz P_n^(a,b) = (n + a + b + 1)/2 * P_{n-1}^(a+1,b+1).
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > n:
        return _ret(z, np.zeros_like(_as_complex(z)))
    factor = 1 + 0j
    for j in range(1, order + 1):
        factor *= (n + a + b + j) / 2
    return _ret(z, factor * _as_complex(jacobi_p(n - order, a + order, b + order, z)))


def laguerre_l(n: int, a: complex, x):
    """Associated Laguerre polynomial L_n^(a)(x) by forward recurrence."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    xx = _as_complex(x)
    prev = np.ones_like(xx)
    if n == 0:
        return _ret(x, prev)
    cur = 1 + a - xx
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - xx) * cur - (k + a) * prev) / (k + 1)
    return _ret(x, cur)


def laguerre_l_sum(n: int, a: complex, x):
    """L_n^(a)(x) = sum_k binom(n+a, n-k) (-x)^k / k!."""
    xx = _as_complex(x)
    total = np.zeros_like(xx)
    for k in range(n + 1):
        total = total + gbinom(n + a, n - k) * (-xx) ** k / math.factorial(k)
    return _ret(x, total)


def _check_b(b: complex) -> None:
    r = round(b.real)
    if r <= 0 and abs(b - r) <= 1e-14 * max(1.0, abs(b)):
        raise PoleAtB(f"1F1 undefined for b = {b} (nonpositive integer)")


def hyp1f1_with_error(a: complex, b: complex, z):
    """Kummer M(a; b; z) by its Maclaurin series.

    Terms and partial sums are carried in extended precision.  Summation stops
    once HYP1F1_QUIET_TERMS consecutive terms fall below HYP1F1_RTOL times the
    partial sum, or when the series terminates.  Returns (value, last_term_abs).
    """
    a, b = complex(a), complex(b)
    _check_b(b)
    zz = _as_complex(z)
    shape = zz.shape
    zl = zz.ravel().astype(np.clongdouble)
    al, bl = np.clongdouble(a), np.clongdouble(b)
    term = np.ones_like(zl)
    total = np.ones_like(zl)
    quiet = np.zeros(zl.shape, dtype=int)
    last = np.zeros(zl.shape, dtype=np.longdouble)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(HYP1F1_MAX_TERMS):
            term = term * (al + k) / (bl + k) * zl / (k + 1)
            total = total + term
            last = np.abs(term)
            small = np.isfinite(total) & (last <= HYP1F1_RTOL * np.abs(total))
            quiet = np.where(small, quiet + 1, 0)
            if np.all(quiet >= HYP1F1_QUIET_TERMS):
                break
        else:
            raise NonConvergence(
                f"1F1({a}; {b}; z) series not converged after {HYP1F1_MAX_TERMS} terms",
                estimate=total.astype(complex).reshape(shape),
            )
        value = total.astype(complex).reshape(shape)
        err = last.astype(float).reshape(shape)
    if not np.all(np.isfinite(value)):
        raise NonConvergence(f"1F1({a}; {b}; z) overflows double precision", estimate=value)
    if np.ndim(z) == 0:
        return complex(value), float(err)
    return value, err


def hyp1f1(a: complex, b: complex, z):
    return hyp1f1_with_error(a, b, z)[0]


def hyp1f1_deriv(a: complex, b: complex, z, order: int = 1):
    """d^order/dz^order M(a; b; z) = (a)_order/(b)_order M(a+order; b+order; z)."""
    factor = 1 + 0j
    for j in range(order):
        factor *= (a + j) / (b + j)
    val = hyp1f1(a + order, b + order, z)
    return factor * val
