"""Bound-state spectrum: analytic levels and numerically located poles of G00."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NoSignChange, PoleAtEnergy
from .green import g00
from .jacobi import ComplexEnergy, PhysicalParams

SCAN_POINTS = 256


@dataclass(frozen=True)
class BoundState:
    n_r: int
    energy: float
    principal_combination: float


def analytic_spectrum(p: PhysicalParams, n_max: int) -> list[BoundState]:
    """Lowest ``n_max`` levels E = -Z**2 / (2 (n_r + L + 1)**2)."""
    if p.Z >= 0:
        raise ValueError(f"no bound states for Z = {p.Z} >= 0")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    out = []
    for n_r in range(n_max):
        nu = n_r + p.L + 1
        out.append(BoundState(n_r, -(p.Z**2) / (2 * nu**2), nu))
    return out


def inverse_g00(x: float, p: PhysicalParams) -> float:
    """Real part of 1/G00 at the real energy ``x``; exactly 0 on a pole."""
    try:
        return (1.0 / g00(ComplexEnergy.from_z(complex(x, 0.0), p.Z), p)).real
    except PoleAtEnergy:
        return 0.0


def locate_pole(p: PhysicalParams, bracket: tuple[float, float], tol: float = 1e-12) -> float:
    """Find a bound-state pole of G00 inside ``bracket`` on the negative axis.

    1/G00 is increasing in z between its own poles (the zeros of G00), so a true
    root shows up as a negative-to-positive sign change while the zeros of G00
    show up as positive-to-negative jumps.  The bracket is scanned on a grid
    and only rising crossings are refined; if several roots are present the
    lowest one is returned.
    """
    if p.Z >= 0:
        raise ValueError(f"no bound states for Z = {p.Z} >= 0")
    lo, hi = sorted(float(v) for v in bracket)
    if hi >= 0:
        raise ValueError("bracket must lie on the negative real axis")
    xs = np.linspace(lo, hi, SCAN_POINTS)
    fs = np.array([inverse_g00(x, p) for x in xs])
    for x, f in zip(xs, fs):
        if f == 0.0:
            return float(x)
    for i in range(len(xs) - 1):
        if fs[i] < 0 < fs[i + 1]:
            root = brentq(inverse_g00, xs[i], xs[i + 1], args=(p,), xtol=tol)
            return float(root)
    raise NoSignChange(f"1/G00 has no rising sign change in [{lo}, {hi}]")


def pole_order_probe(p: PhysicalParams, z0: float, radii) -> float:
    """Slope of log|G00(z0 + delta)| against log(delta); -1 for a simple pole."""
    radii = np.asarray(radii, dtype=float)
    vals = []
    for r in radii:
        g = g00(ComplexEnergy.from_z(complex(z0 + r, 0.0), p.Z), p)
        vals.append(abs(g))
    slope, _ = np.polyfit(np.log(radii), np.log(vals), 1)
    return float(slope)
