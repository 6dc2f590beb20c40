"""Special-function kernels on the complex plane.

Continued fractions are evaluated with the modified Lentz algorithm.  Gauss
hypergeometric functions are available as a plain power series (only used
inside the unit disk) and as the ratio ``2F1(a,b;c;y) / 2F1(a,b+1;c+1;y)``
from its T-fraction expansion, which also works outside the disk away from
the cut ``[1, inf)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError

TINY = 1e-30
DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 10000
SERIES_MAX_TERMS = 100000

__all__ = [
    "CFTerms",
    "CFResult",
    "Hyp2F1Params",
    "eval_continued_fraction",
    "hyp2f1_series",
    "hyp2f1_ratio",
    "tfraction",
    "assoc_laguerre",
    "is_nonpositive_integer",
]


def is_nonpositive_integer(c: complex, atol: float = 1e-12) -> bool:
    """True if ``c`` lies within ``atol`` of 0, -1, -2, ..."""
    c = complex(c)
    if abs(c.imag) > atol or c.real > atol:
        return False
    return abs(c.real - round(c.real)) <= atol


@dataclass(frozen=True)
class CFTerms:
    """``b0 + a(1)/(b(1) + a(2)/(b(2) + ...))`` with index rules ``a`` and ``b``."""

    b0: complex
    a: Callable[[int], complex]
    b: Callable[[int], complex]


@dataclass(frozen=True)
class CFResult:
    value: complex
    iterations: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class Hyp2F1Params:
    a: complex
    b: complex
    c: complex
    y: complex

    def __post_init__(self):
        if is_nonpositive_integer(self.c):
            raise ValueError(f"c = {self.c} is a nonpositive integer; 2F1 is undefined")


def eval_continued_fraction(
    terms: CFTerms, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> CFResult:
    """Evaluate a continued fraction by the modified Lentz method.

    Iteration stops once the multiplicative update differs from one by at most
    ``tol``.  Reaching ``max_iter`` is not an error: the last approximant is
    returned with ``converged=False``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if int(max_iter) != max_iter or max_iter < 1:
        raise ValueError(f"max_iter must be a positive integer, got {max_iter}")

    f = complex(terms.b0)
    if f == 0:
        f = TINY
    C = f
    D = 0j
    residual = np.inf
    for p in range(1, int(max_iter) + 1):
        a_p = terms.a(p)
        b_p = terms.b(p)
        D = b_p + a_p * D
        if abs(D) < TINY:
            D = TINY
        C = b_p + a_p / C
        if abs(C) < TINY:
            C = TINY
        D = 1.0 / D
        delta = C * D
        f *= delta
        residual = abs(delta - 1.0)
        if residual <= tol:
            return CFResult(complex(f), p, float(residual), True)
    return CFResult(complex(f), int(max_iter), float(residual), False)


def _hyp2f1_sum(p: Hyp2F1Params, tol: float) -> tuple[complex, int]:
    a, b, c, y = complex(p.a), complex(p.b), complex(p.c), complex(p.y)
    if abs(y) >= 1:
        raise ValueError(f"|y| = {abs(y)} >= 1 is outside the series domain")
    term = 1 + 0j
    total = 1 + 0j
    for n in range(SERIES_MAX_TERMS):
        # (a)_n (b)_n / ((c)_n n!) updated multiplicatively
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * y
        term *= ratio
        if term == 0:
            return total, n + 1
        total += term
        # only trust a small term once the terms are actually decreasing
        if abs(ratio) < 1 and abs(term) <= tol * abs(total):
            return total, n + 1
    raise ConvergenceError(
        f"2F1 series did not converge in {SERIES_MAX_TERMS} terms",
        iterations=SERIES_MAX_TERMS,
        residual=abs(term) / abs(total) if total else np.inf,
    )


def hyp2f1_series(p: Hyp2F1Params, tol: float = DEFAULT_TOL) -> complex:
    """Sum the Gauss series ``sum_n (a)_n (b)_n / ((c)_n n!) y**n`` for |y| < 1.

    >>> hyp2f1_series(Hyp2F1Params(-1, 3, 2, 0.25))
    (0.625+0j)
    """
    return _hyp2f1_sum(p, tol)[0]


def _on_cut(y: complex) -> bool:
    y = complex(y)
    return y.imag == 0 and y.real >= 1


def tfraction(p: Hyp2F1Params, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> CFResult:
    """T-fraction whose value is ``c 2F1(a,b;c;y) / 2F1(a,b+1;c+1;y)``."""
    a, b, c, y = complex(p.a), complex(p.b), complex(p.c), complex(p.y)
    if _on_cut(y):
        raise ValueError(f"y = {y} lies on the branch cut [1, inf)")
    s = b - a + 1
    terms = CFTerms(
        b0=c + s * y,
        a=lambda k: -(c - a + k) * (b + k) * y,
        b=lambda k: c + k + (s + k) * y,
    )
    return eval_continued_fraction(terms, tol, max_iter)


def hyp2f1_ratio(p: Hyp2F1Params, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> complex:
    """Return ``2F1(a,b;c;y) / 2F1(a,b+1;c+1;y)`` from the T-fraction.

    Raises ConvergenceError (carrying iterations and residual) when the
    fraction does not settle within ``max_iter`` steps.
    """
    res = tfraction(p, tol, max_iter)
    if not res.converged:
        raise ConvergenceError(
            f"T-fraction not converged after {res.iterations} iterations "
            f"(residual {res.residual:.3g})",
            iterations=res.iterations,
            residual=res.residual,
        )
    return res.value / complex(p.c)


def assoc_laguerre(n: int, alpha: float, x):
    """Associated Laguerre polynomial ``L_n^alpha(x)`` by upward recurrence.

    ``x`` may be a scalar or an array.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for k in range(1, int(n)):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)
