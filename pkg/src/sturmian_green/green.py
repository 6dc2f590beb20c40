"""Tail continued fraction C_N and the Coulomb-Sturmian Green's matrix.

C_N = -(1/J_{N,N-1}) G_{N,m} / G_{N-1,m} is independent of m.  It is computed
either directly from the J-matrix continued fraction or in closed form as a
ratio of Gauss hypergeometric functions; the Green's matrix is then built by
recursion (``greens_matrix_recursive``) or by inverting the tail-corrected
truncated J-matrix (``jacobi.greens_matrix_by_inversion``).
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    CutProximity,
    DegenerateEnergy,
    NearCutWarning,
    NearSingular,
    PoleAtEnergy,
)
from .jacobi import (
    ComplexEnergy,
    GreensMatrix,
    PhysicalParams,
    Route,
    _diag_element,
    _upper_element,
    greens_matrix_by_inversion,
)
from .specfun import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    CFResult,
    CFTerms,
    Hyp2F1Params,
    _hyp2f1_sum,
    eval_continued_fraction,
    tfraction,
)

SERIES_RADIUS = 0.9
CUT_GUARD = 1e-12
NEAR_CUT = 1e-4
POLE_ATOL = 1e-10
INVERSE_FLOOR = 1e-280

__all__ = [
    "TFractionMatch",
    "match_tfraction_params",
    "energy_from_y",
    "cn_direct",
    "cn_closed_form",
    "cn_closed_form_result",
    "euler_transform_check",
    "euler_residual",
    "g00",
    "g00_result",
    "cn_forward_recursion",
    "tail_values",
    "greens_matrix_recursive",
    "greens_matrix_inversion_exact",
    "is_near_cut",
]


@dataclass(frozen=True)
class TFractionMatch:
    """Parameters with ``T(a,b;c;y) = d / C_N``."""

    a: complex
    b: complex
    c: complex
    y: complex
    d: complex

    def residuals(self, N: int, e: ComplexEnergy, p: PhysicalParams) -> list[float]:
        """Relative residuals of the five matching equations."""
        q2 = ((e.k2 + p.bs**2) / (4 * p.bs)) ** 2
        s = (e.k2 - p.bs**2) / (2 * p.bs)
        a, b, c, y, d = self.a, self.b, self.c, self.y, self.d
        L = p.L
        pairs = [
            (y, d**2 * q2),
            (1 + y, d * s),
            (y * (b + c - a), d**2 * q2 * (2 * N + 2 * L + 1)),
            (y * b * (c - a), d**2 * q2 * N * (N + 2 * L + 1)),
            (c + (b - a + 1) * y, d * (-p.Z + s * (N + L + 1))),
        ]
        out = []
        for lhs, rhs in pairs:
            scale = max(abs(lhs), abs(rhs))
            out.append(abs(lhs - rhs) / scale if scale > 0 else 0.0)
        return out


def _d_and_y(e: ComplexEnergy, p: PhysicalParams) -> tuple[complex, complex]:
    w = p.bs - 1j * e.k
    return -4 * p.bs / w**2, ((p.bs + 1j * e.k) / w) ** 2


def is_near_cut(e: ComplexEnergy, p: PhysicalParams, margin: float = NEAR_CUT) -> bool:
    """True when ``1 - |y| < margin``, i.e. z is close to the positive real axis."""
    return 1 - abs(_d_and_y(e, p)[1]) < margin


def match_tfraction_params(N: int, e: ComplexEnergy, p: PhysicalParams) -> TFractionMatch:
    """Solve the matching equations, first solution branch."""
    d, y = _d_and_y(e, p)
    if abs(y) >= 1 - CUT_GUARD:
        raise CutProximity(f"|y| = {abs(y):.15g} is on or too close to the unit circle (z = {e.z})")
    return TFractionMatch(
        a=-p.L + e.i_gamma,
        b=complex(N),
        c=N + p.L + 1 + e.i_gamma,
        y=y,
        d=d,
    )


def energy_from_y(y: complex, p: PhysicalParams) -> ComplexEnergy:
    """An energy whose hypergeometric argument equals ``y`` (|y| < 1)."""
    w = cmath.sqrt(complex(y))
    ik = p.bs * (w - 1) / (w + 1)
    k = -1j * ik
    return ComplexEnergy.from_z(k * k / 2, p.Z)


def _check_pole(c: complex, e: ComplexEnergy, p: PhysicalParams, N: int = 0) -> None:
    # c = N + L + 1 + i_gamma at a nonpositive integer -j means n_r = N + j
    c = complex(c)
    if abs(c.imag) < POLE_ATOL and c.real < POLE_ATOL and abs(c.real - round(c.real)) < POLE_ATOL:
        n_r = N - int(round(c.real))
        raise PoleAtEnergy(
            f"z = {e.z} is the bound-state pole n_r = {n_r}", n_r=n_r, energy=e.z
        )


def cn_direct(
    N: int,
    e: ComplexEnergy,
    p: PhysicalParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    depth_cap: int | None = None,
) -> CFResult:
    """C_N from the J-matrix continued fraction for 1/C_N.

    ``depth_cap``, when given, additionally limits the number of partial
    fractions used.  The returned CFResult carries C_N itself.
    """
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    if depth_cap is not None:
        max_iter = min(max_iter, depth_cap)
    terms = CFTerms(
        b0=_diag_element(N, e, p),
        a=lambda j: -(_upper_element(N + j - 1, e, p) ** 2),
        b=lambda j: _diag_element(N + j, e, p),
    )
    res = eval_continued_fraction(terms, tol, max_iter)
    if abs(res.value) < INVERSE_FLOOR:
        raise PoleAtEnergy(f"1/C_{N} vanishes at z = {e.z}", energy=e.z)
    return CFResult(1.0 / res.value, res.iterations, res.residual, res.converged)


def cn_closed_form_result(
    N: int,
    e: ComplexEnergy,
    p: PhysicalParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CFResult:
    """Closed-form C_N with bookkeeping on how much work the 2F1 evaluation took.

    Inside |y| < 0.9 both 2F1 factors are summed as series; outside, their
    ratio comes from the T-fraction.
    """
    m = match_tfraction_params(N, e, p)
    _check_pole(m.c, e, p, N)
    if 1 - abs(m.y) < NEAR_CUT:
        warnings.warn(
            f"closed form evaluated near the cut (|y| = {abs(m.y):.12g}); "
            "the direct continued fraction is authoritative here",
            NearCutWarning,
            stacklevel=2,
        )
    if abs(m.y) < SERIES_RADIUS:
        num, n1 = _hyp2f1_sum(Hyp2F1Params(m.a, m.b + 1, m.c + 1, m.y), tol)
        den, n2 = _hyp2f1_sum(Hyp2F1Params(m.a, m.b, m.c, m.y), tol)
        if den == 0:
            raise PoleAtEnergy(f"C_{N} is singular at z = {e.z}", energy=e.z)
        return CFResult(m.d / m.c * num / den, max(n1, n2), 0.0, True)
    res = tfraction(Hyp2F1Params(m.a, m.b, m.c, m.y), tol, max_iter)
    if not res.converged:
        raise ConvergenceError(
            f"T-fraction for C_{N} not converged after {res.iterations} iterations",
            iterations=res.iterations,
            residual=res.residual,
        )
    # the T-fraction value is c F(a,b;c)/F(a,b+1;c+1) = d / C_N
    if abs(res.value) < INVERSE_FLOOR:
        raise PoleAtEnergy(f"1/C_{N} vanishes at z = {e.z}", energy=e.z)
    return CFResult(m.d / res.value, res.iterations, res.residual, True)


def cn_closed_form(
    N: int,
    e: ComplexEnergy,
    p: PhysicalParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> complex:
    """C_N = d/c * 2F1(a, N+1; c+1; y) / 2F1(a, N; c; y), with
    a = -L + i gamma, c = N + L + 1 + i gamma."""
    return cn_closed_form_result(N, e, p, tol, max_iter).value


def euler_residual(L: float, i_gamma: complex, N: int, y: complex, tol: float = DEFAULT_TOL) -> float:
    """Relative mismatch in Euler's transformation linking the two parameter
    branches: 2F1(-L+ig, N; c; y) = (1-y)**(2L+1) 2F1(L+1+ig, N+2L+1; c; y)."""
    c = N + L + 1 + i_gamma
    lhs = _hyp2f1_sum(Hyp2F1Params(-L + i_gamma, N, c, y), tol)[0]
    rhs = _hyp2f1_sum(Hyp2F1Params(L + 1 + i_gamma, N + 2 * L + 1, c, y), tol)[0]
    rhs *= (1 - complex(y)) ** (2 * L + 1)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale > 0 else 0.0


def euler_transform_check(N: int, e: ComplexEnergy, p: PhysicalParams) -> float:
    m = match_tfraction_params(N, e, p)
    if abs(m.y) >= SERIES_RADIUS:
        raise ValueError(f"|y| = {abs(m.y):.6g} is outside the series check region")
    _check_pole(m.c, e, p, N)
    return euler_residual(p.L, e.i_gamma, N, m.y)


def g00_result(
    e: ComplexEnergy,
    p: PhysicalParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CFResult:
    """G00 together with the number of series terms or fraction steps used."""
    d, y = _d_and_y(e, p)
    if abs(y) >= 1 - CUT_GUARD:
        raise CutProximity(f"|y| = {abs(y):.15g} is on or too close to the unit circle (z = {e.z})")
    a = -p.L + e.i_gamma
    c = p.L + 1 + e.i_gamma
    _check_pole(c, e, p)
    if abs(y) < SERIES_RADIUS:
        f, n = _hyp2f1_sum(Hyp2F1Params(a, 1, c + 1, y), tol)
        return CFResult(d / c * f, n, 0.0, True)
    # 2F1(a,0;c;y) = 1, so the T-fraction is c / 2F1(a,1;c+1;y)
    res = tfraction(Hyp2F1Params(a, 0, c, y), tol, max_iter)
    if not res.converged:
        raise ConvergenceError(
            f"T-fraction for G00 not converged after {res.iterations} iterations",
            iterations=res.iterations,
            residual=res.residual,
        )
    return CFResult(d / res.value, res.iterations, res.residual, True)


def g00(
    e: ComplexEnergy,
    p: PhysicalParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> complex:
    """G_{0,0} = d/(L+1+i gamma) * 2F1(-L + i gamma, 1; L + 2 + i gamma; y)."""
    return g00_result(e, p, tol, max_iter).value


def cn_forward_recursion(c_prev: complex, N: int, e: ComplexEnergy, p: PhysicalParams) -> complex:
    """C_{N+1} = (J_{N,N} - 1/C_N) / J_{N,N+1}**2.

    Each step loses roughly a factor 1/|y| in relative accuracy, so long
    chains are only usable close to the cut.
    """
    if c_prev == 0:
        raise ZeroDivisionError("C_N must be nonzero")
    coupling2 = _upper_element(N, e, p) ** 2
    if coupling2 == 0:
        raise DegenerateEnergy(
            f"z = {e.z} = -bs**2/2 makes every off-diagonal J element vanish"
        )
    return (_diag_element(N, e, p) - 1.0 / c_prev) / coupling2


def tail_values(
    count: int,
    e: ComplexEnergy,
    p: PhysicalParams,
    route: str = "closed-form",
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """C_0 .. C_{count-1}, each evaluated independently.

    ``route`` is ``"closed-form"`` or ``"direct"``.
    """
    out = np.empty(count, dtype=complex)
    for n in range(count):
        if route == "closed-form":
            out[n] = cn_closed_form(n, e, p, tol, max_iter)
        elif route == "direct":
            res = cn_direct(n, e, p, tol, max_iter)
            if not res.converged:
                raise ConvergenceError(
                    f"C_{n} continued fraction not converged after {res.iterations} iterations",
                    iterations=res.iterations,
                    residual=res.residual,
                )
            out[n] = res.value
        else:
            raise ValueError(f"unknown tail route {route!r}")
    return out


def greens_matrix_recursive(
    Nsize: int,
    e: ComplexEnergy,
    p: PhysicalParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    tail_route: str = "closed-form",
    check_symmetry: bool = False,
) -> GreensMatrix:
    """Build G^(Nsize) column by column from the tails C_0 .. C_Nsize.

    Entries below and on the diagonal follow G_{n,m} = -C_n J_{n,n-1} G_{n-1,m},
    starting from G_{m,m} = (1 - J_{m,m-1} G_{m-1,m}) C_m.  With
    ``check_symmetry`` the entries above the diagonal are recomputed from the
    upward (regular-solution) recursion instead of copied, and the largest
    relative mismatch is stored in ``meta["symmetry_discrepancy"]``.
    """
    if Nsize < 1:
        raise ValueError(f"Nsize must be >= 1, got {Nsize}")
    C = tail_values(Nsize + 1, e, p, tail_route, tol, max_iter)
    idx = np.arange(Nsize + 1, dtype=float)
    diag = _diag_element(idx, e, p) * np.ones(Nsize + 1, dtype=complex)
    upper = _upper_element(idx[:-1], e, p) * np.ones(Nsize, dtype=complex)

    G = np.zeros((Nsize, Nsize), dtype=complex)
    for m in range(Nsize):
        if m == 0:
            G[0, 0] = C[0]
        else:
            G[m, m] = (1 - upper[m - 1] * G[m - 1, m]) * C[m]
        for n in range(m + 1, Nsize):
            G[n, m] = -C[n] * upper[n - 1] * G[n - 1, m]
        G[m, m + 1 :] = G[m + 1 :, m]
        if not np.isfinite(G[m, m]):
            raise NearSingular(f"diagonal element G[{m},{m}] is not finite", pivot_index=m)

    meta = {"tail_route": tail_route}
    if check_symmetry:
        meta["symmetry_discrepancy"] = _upper_triangle_discrepancy(G, diag, upper, C)
    return GreensMatrix(G, Route.CLOSED_FORM_RECURSION, e, p, c_tail=complex(C[Nsize]), meta=meta)


def _upper_triangle_discrepancy(G, diag, upper, C) -> float:
    # Column m above the diagonal solves the homogeneous rows 0..m-1, so the
    # ratios D_n = G[n,m]/G[n+1,m] follow from row 0 upward without symmetry.
    n_size = G.shape[0]
    worst = 0.0
    for m in range(1, n_size):
        D = np.empty(m, dtype=complex)
        D[0] = -upper[0] / diag[0]
        for n in range(1, m):
            D[n] = -upper[n] / (diag[n] + upper[n - 1] * D[n - 1])
        gmm = 1.0 / (1.0 / C[m] + upper[m - 1] * D[m - 1])
        col = np.empty(m + 1, dtype=complex)
        col[m] = gmm
        for n in range(m - 1, -1, -1):
            col[n] = D[n] * col[n + 1]
        ref = G[: m + 1, m]
        scale = np.maximum(np.abs(ref), np.abs(col))
        scale[scale == 0] = 1.0
        worst = max(worst, float(np.max(np.abs(ref - col) / scale)))
    return worst


def greens_matrix_inversion_exact(
    N: int,
    e: ComplexEnergy,
    p: PhysicalParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    tail_route: str = "closed-form",
) -> GreensMatrix:
    """Tail-corrected inversion with the exact tail C_N."""
    if tail_route == "closed-form":
        tail = cn_closed_form(N, e, p, tol, max_iter)
    else:
        res = cn_direct(N, e, p, tol, max_iter)
        if not res.converged:
            raise ConvergenceError(
                f"C_{N} continued fraction not converged", res.iterations, res.residual
            )
        tail = res.value
    g = greens_matrix_by_inversion(N, e, p, tail)
    g.meta["tail_route"] = tail_route
    return g
