"""Coulomb-Sturmian basis, Coulomb J-matrix and tridiagonal linear algebra.

Units are hbar = m = 1 and all basis indices are 0-based.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NearSingular
from .specfun import assoc_laguerre

PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Problem definition: charge ``Z`` (attractive if negative), Sturmian
    scale ``bs``, orbital number ``l`` and dimension ``D``."""

    Z: float
    bs: float = 1.0
    l: int = 0
    D: int = 3

    def __post_init__(self):
        if not self.bs > 0:
            raise ValueError(f"bs must be positive, got {self.bs}")
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a nonnegative integer, got {self.l}")
        if int(self.D) != self.D or self.D < 2:
            raise ValueError(f"D must be an integer >= 2, got {self.D}")

    @property
    def L(self) -> float:
        return self.l + (self.D - 3) / 2

    @property
    def alpha(self) -> int:
        """Laguerre index 2L+1, always a nonnegative integer."""
        return 2 * int(self.l) + int(self.D) - 2


@dataclass(frozen=True)
class ComplexEnergy:
    """Energy ``z`` with momentum ``k = sqrt(2z)`` taken on the Im k > 0 branch
    and ``i_gamma = i Z / k``."""

    z: complex
    k: complex
    i_gamma: complex
    on_cut: bool

    @classmethod
    def from_z(cls, z, Z: float) -> "ComplexEnergy":
        z = complex(z)
        if z == 0:
            raise ValueError("z = 0 is the branch point; k would vanish")
        k = cmath.sqrt(2 * z)
        if k.imag < 0:
            k = -k
        return cls(z=z, k=k, i_gamma=1j * Z / k, on_cut=(k.imag == 0))

    @property
    def k2(self) -> complex:
        """k**2, computed exactly as 2z."""
        return 2 * self.z


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Complex symmetric tridiagonal matrix with a single off-diagonal array."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=complex))
        object.__setattr__(self, "offdiag", np.asarray(self.offdiag, dtype=complex))
        if self.diag.ndim != 1 or self.offdiag.shape != (max(self.n - 1, 0),):
            raise ValueError("offdiag must have exactly n-1 entries")

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Product with a vector or with each column of a 2-D array."""
        x = np.asarray(x, dtype=complex)
        d = self.diag if x.ndim == 1 else self.diag[:, None]
        e = self.offdiag if x.ndim == 1 else self.offdiag[:, None]
        y = d * x
        y[:-1] += e * x[1:]
        y[1:] += e * x[:-1]
        return y

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())

    def with_corner(self, shift: complex) -> "TridiagonalMatrix":
        """Copy with ``shift`` added to the last diagonal element."""
        diag = self.diag.copy()
        diag[-1] += shift
        return TridiagonalMatrix(diag, self.offdiag.copy())


class Route(str, enum.Enum):
    CLOSED_FORM_RECURSION = "closed-form-recursion"
    TAIL_CORRECTED_INVERSION = "tail-corrected-inversion"
    PLAIN_TRUNCATION = "plain-truncation"


@dataclass
class GreensMatrix:
    """Upper-left ``n x n`` block of the Green's matrix and how it was made."""

    entries: np.ndarray
    route: Route
    energy: ComplexEnergy
    params: PhysicalParams
    c_tail: Optional[complex] = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _gamma_ratio(n: int, alpha: int) -> float:
    # Gamma(n+1) / Gamma(n+alpha+1) with integer alpha >= 0
    if n + alpha + 1 > 20:
        return math.exp(math.lgamma(n + 1) - math.lgamma(n + alpha + 1))
    out = 1.0
    for j in range(1, alpha + 1):
        out /= n + j
    return out


def cs_basis_function(n: int, p: PhysicalParams, r):
    """Coulomb-Sturmian function psi_n(r); ``r`` may be an array."""
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    x = 2 * p.bs * r
    norm = math.sqrt(_gamma_ratio(int(n), p.alpha))
    out = norm * np.exp(-p.bs * r) * x ** (p.L + 1) * assoc_laguerre(int(n), p.alpha, x)
    return out if out.ndim else float(out)


def _diag_element(n, e: ComplexEnergy, p: PhysicalParams):
    return (e.k2 - p.bs**2) / (2 * p.bs) * (n + p.L + 1) - p.Z


def _upper_element(n, e: ComplexEnergy, p: PhysicalParams):
    # element (n, n+1); (n+1, n) reuses this so symmetry is exact
    return -(e.k2 + p.bs**2) / (4 * p.bs) * np.sqrt((n + 1) * (n + 2 * p.L + 2))


def jmatrix_element(n: int, m: int, e: ComplexEnergy, p: PhysicalParams) -> complex:
    """Element J_{n,m} of ``z - H`` in the Coulomb-Sturmian basis."""
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    if n == m:
        return complex(_diag_element(n, e, p))
    if m == n + 1:
        return complex(_upper_element(n, e, p))
    if m == n - 1:
        return complex(_upper_element(m, e, p))
    return 0j


def truncated_jmatrix(N: int, e: ComplexEnergy, p: PhysicalParams) -> TridiagonalMatrix:
    """Upper-left N x N corner J^(N) of the infinite J-matrix."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    idx = np.arange(N, dtype=float)
    return TridiagonalMatrix(
        _diag_element(idx, e, p) * np.ones(N, dtype=complex),
        _upper_element(idx[:-1], e, p) * np.ones(N - 1, dtype=complex),
    )


def solve_tridiagonal(m: TridiagonalMatrix, rhs) -> np.ndarray:
    """Solve ``m x = rhs`` by LU elimination along the band, without pivoting.

    ``rhs`` may be a vector or a 2-D array of right-hand-side columns.
    Raises NearSingular when a pivot drops below ``PIVOT_RTOL`` times the
    magnitude of its row.
    """
    rhs = np.asarray(rhs, dtype=complex)
    n = m.n
    if rhs.shape[0] != n:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, matrix has {n}")
    d, e = m.diag, m.offdiag
    row_scale = np.abs(d).copy()
    row_scale[:-1] += np.abs(e)
    row_scale[1:] += np.abs(e)

    pivots = np.empty(n, dtype=complex)
    x = rhs.copy()
    pivots[0] = d[0]
    for i in range(n):
        if i > 0:
            mult = e[i - 1] / pivots[i - 1]
            pivots[i] = d[i] - mult * e[i - 1]
            x[i] -= mult * x[i - 1]
        if abs(pivots[i]) <= PIVOT_RTOL * row_scale[i]:
            raise NearSingular(f"near-singular pivot {pivots[i]!r} at index {i}", pivot_index=i)
    x[n - 1] /= pivots[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (x[i] - e[i] * x[i + 1]) / pivots[i]
    return x


def invert_tridiagonal(m: TridiagonalMatrix) -> np.ndarray:
    """Dense inverse from column solves on unit vectors, symmetrized."""
    g = solve_tridiagonal(m, np.eye(m.n, dtype=complex))
    return 0.5 * (g + g.T)


def greens_matrix_by_inversion(
    N: int, e: ComplexEnergy, p: PhysicalParams, c_tail: complex
) -> GreensMatrix:
    """G^(N) as the inverse of J^(N) with its last diagonal element corrected
    by ``-J_{N-1,N}**2 * c_tail``; ``c_tail`` is C_N for the first omitted index."""
    J = truncated_jmatrix(N, e, p)
    coupling = _upper_element(N - 1, e, p)
    corrected = J.with_corner(-(coupling**2) * c_tail)
    return GreensMatrix(
        invert_tridiagonal(corrected),
        Route.TAIL_CORRECTED_INVERSION,
        e,
        p,
        c_tail=complex(c_tail),
    )


def greens_matrix_plain(N: int, e: ComplexEnergy, p: PhysicalParams) -> GreensMatrix:
    """Inverse of the bare truncation J^(N) (no tail correction)."""
    return GreensMatrix(
        invert_tridiagonal(truncated_jmatrix(N, e, p)), Route.PLAIN_TRUNCATION, e, p
    )
