"""Cross-validation battery run by ``sturmian-green verify``.

Every check measures one residual or discrepancy against a fixed threshold.
Checks that cannot be evaluated at the requested energy (a bound-state pole,
the cut region, the series domain) are reported as skipped rather than failed.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, CutProximity, NearCutWarning, NearSingular, PoleAtEnergy
from .green import (
    cn_closed_form,
    cn_direct,
    euler_transform_check,
    greens_matrix_inversion_exact,
    greens_matrix_recursive,
    is_near_cut,
    match_tfraction_params,
)
from .jacobi import (
    ComplexEnergy,
    GreensMatrix,
    PhysicalParams,
    greens_matrix_plain,
    jmatrix_element,
    truncated_jmatrix,
)
from .specfun import DEFAULT_MAX_ITER, DEFAULT_TOL

BRUTE_FORCE_SIZE = 400
NEAR_CUT_MAX_ITER = 1_000_000

PASS, FAIL, SKIPPED, FLAGGED = "pass", "fail", "skipped", "flagged"


@dataclass
class Check:
    name: str
    threshold: float
    measured: float | None = None
    status: str = SKIPPED
    note: str = ""


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)
    region: str = "regular"
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)


def rel_discrepancy(a, b) -> float:
    """Largest entrywise |a - b| / max(|a|, |b|)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scale = np.maximum(np.abs(a), np.abs(b))
    diff = np.abs(a - b)
    mask = scale > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(diff[mask] / scale[mask]))


def identity_residual(g: GreensMatrix) -> float:
    """max |J^(N) G^(N) - 1| over all rows but the last."""
    J = truncated_jmatrix(g.n, g.energy, g.params)
    R = J.matvec(g.entries) - np.eye(g.n)
    if g.n == 1:
        return 0.0
    return float(np.max(np.abs(R[:-1])))


def tail_ratios(G: np.ndarray, N: int, e: ComplexEnergy, p: PhysicalParams, columns) -> np.ndarray:
    """-(1/J_{N+1,N}) G_{N+1,m} / G_{N,m} for each column m."""
    j = jmatrix_element(N + 1, N, e, p)
    return np.array([-G[N + 1, m] / (j * G[N, m]) for m in columns])


def _run(check: Check, fn) -> Check:
    try:
        value, note = fn()
    except (PoleAtEnergy, NearSingular) as exc:
        check.status, check.note = SKIPPED, f"pole: {exc}"
        return check
    except (CutProximity, ConvergenceError, ValueError) as exc:
        check.status, check.note = SKIPPED, str(exc)
        return check
    check.measured = float(value)
    check.status = PASS if value <= check.threshold else FAIL
    check.note = note
    return check


def run_battery(
    e: ComplexEnergy,
    p: PhysicalParams,
    size: int = 8,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    near_cut: bool = False,
) -> Report:
    """Run every check at energy ``e``.

    Close to the cut (or with ``near_cut``) only the direct continued fraction
    is evaluated, with the iteration cap raised to ``NEAR_CUT_MAX_ITER`` unless
    ``max_iter`` is given explicitly.
    """
    report = Report()
    if near_cut or e.on_cut or is_near_cut(e, p):
        cap = NEAR_CUT_MAX_ITER if max_iter is None else max_iter
        return _near_cut_battery(e, p, size, tol, cap, report)
    if max_iter is None:
        max_iter = DEFAULT_MAX_ITER

    def parameter_equations():
        worst = 0.0
        for N in range(size + 1):
            worst = max(worst, max(match_tfraction_params(N, e, p).residuals(N, e, p)))
        return worst, f"N = 0..{size}"

    def cn_routes():
        worst = 0.0
        for N in range(size + 1):
            direct = cn_direct(N, e, p, tol, max_iter)
            if not direct.converged:
                raise ConvergenceError(f"C_{N} direct fraction did not converge")
            worst = max(worst, rel_discrepancy(direct.value, cn_closed_form(N, e, p, tol, max_iter)))
        return worst, f"N = 0..{size}"

    def euler():
        return max(euler_transform_check(N, e, p) for N in (0, 2, 7)), "N in {0, 2, 7}"

    cache = {}

    def recursive():
        if "rec" not in cache:
            cache["rec"] = greens_matrix_recursive(size, e, p, tol, max_iter, check_symmetry=True)
        return cache["rec"]

    def matrix_routes():
        inv = greens_matrix_inversion_exact(size, e, p, tol, max_iter)
        return rel_discrepancy(recursive().entries, inv.entries), f"N = {size}"

    def identity():
        return identity_residual(recursive()), f"N = {size}, rows 0..{size - 2}"

    def symmetry():
        return recursive().meta["symmetry_discrepancy"], "upward vs downward recursion"

    def plain():
        if "plain" not in cache:
            if abs(match_tfraction_params(0, e, p).y) > 0.95:
                raise ValueError("|y| > 0.95: plain truncation at 400 is not converged")
            cache["plain"] = greens_matrix_plain(BRUTE_FORCE_SIZE, e, p).entries
        return cache["plain"]

    def brute_force():
        return rel_discrepancy(plain()[:size, :size], recursive().entries), f"{BRUTE_FORCE_SIZE}x{BRUTE_FORCE_SIZE}"

    def m_independence():
        N = 6
        ratios = tail_ratios(plain(), N, e, p, range(6))
        return rel_discrepancy(ratios, np.full_like(ratios, ratios[0])), f"N = {N}, m = 0..5"

    for name, thr, fn in [
        ("parameter_equations", 1e-11, parameter_equations),
        ("cn_route_equivalence", 1e-9, cn_routes),
        ("euler_transform", 1e-10, euler),
        ("matrix_route_equivalence", 1e-9, matrix_routes),
        ("defining_identity", 1e-9, identity),
        ("symmetry_recursion", 1e-10, symmetry),
        ("brute_force_truncation", 1e-6, brute_force),
        ("tail_m_independence", 1e-8, m_independence),
    ]:
        report.checks.append(_run(Check(name, thr), fn))
    return report


def _near_cut_battery(e, p, size, tol, max_iter, report: Report) -> Report:
    report.region = "near-cut"
    report.notes.append(
        "near the positive real axis the direct continued fraction is authoritative; "
        "the closed-form route is flagged and matrix checks are skipped"
    )

    def parameter_equations():
        worst = 0.0
        for N in range(size + 1):
            worst = max(worst, max(match_tfraction_params(N, e, p).residuals(N, e, p)))
        return worst, f"N = 0..{size}"

    report.checks.append(_run(Check("parameter_equations", 1e-11), parameter_equations))

    direct = cn_direct(0, e, p, tol, max_iter)
    report.checks.append(
        Check(
            "cn_direct_near_cut",
            tol,
            measured=direct.residual,
            status=PASS if direct.converged else FLAGGED,
            note=f"C_0 = {direct.value!r}, iterations = {direct.iterations}, converged = {direct.converged}",
        )
    )
    closed = Check("cn_closed_form_near_cut", 1e-9, status=FLAGGED)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NearCutWarning)
            value = cn_closed_form(0, e, p, tol, max_iter)
        closed.measured = rel_discrepancy(value, direct.value)
        closed.note = f"closed form C_0 = {value!r}; not authoritative in this region"
    except (ConvergenceError, CutProximity, PoleAtEnergy) as exc:
        closed.note = f"closed form unavailable: {exc}"
    report.checks.append(closed)
    for name, thr in [
        ("euler_transform", 1e-10),
        ("matrix_route_equivalence", 1e-9),
        ("defining_identity", 1e-9),
        ("symmetry_recursion", 1e-10),
        ("brute_force_truncation", 1e-6),
        ("tail_m_independence", 1e-8),
    ]:
        report.checks.append(Check(name, thr, note="skipped in the near-cut region"))
    return report
