"""
Command-line interface.

Usage:
    sturmian-green green-matrix -Z -1 --bs 1 --energy -0.3 --n 8
    sturmian-green g00-scan -Z -1 --grid -0.6,-0.05,200 --format csv
    sturmian-green spectrum -Z -1 -l 0 --n 3
    sturmian-green verify --energy -0.3

Exit codes: 0 success, 1 usage or I/O error, 2 numerical or physical failure.
Numbers are written with 17 significant digits; JSON documents carry
``"schema": 1``.  The continued-fraction iteration cap can be overridden with
the STURMIAN_GREEN_MAX_ITER environment variable.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import warnings

import click
import numpy as np

from .errors import (
    ConvergenceError,
    CutProximity,
    NearCutWarning,
    NoSignChange,
    PoleAtEnergy,
    SturmianGreenError,
)
from .green import (
    g00_result,
    greens_matrix_inversion_exact,
    greens_matrix_recursive,
    is_near_cut,
)
from .jacobi import ComplexEnergy, PhysicalParams
from .specfun import DEFAULT_MAX_ITER, DEFAULT_TOL
from .spectrum import analytic_spectrum, locate_pole
from .verification import rel_discrepancy, run_battery

SCHEMA = 1
MAX_ITER_ENV = "STURMIAN_GREEN_MAX_ITER"
SPECTRUM_MAX_DIFF = 1e-6

SCAN_COLUMNS = ["z_re", "z_im", "G00_re", "G00_im", "converged", "iterations", "flag"]
MATRIX_COLUMNS = ["i", "j", "G_re", "G_im"]
VERIFY_COLUMNS = ["check", "measured", "threshold", "status", "note"]

__all__ = ["cli", "main", "dump_json", "parse_complex"]


class NumericalFailure(click.ClickException):
    exit_code = 2


# -- serialization -----------------------------------------------------------------


def format_number(x) -> str:
    text = format(float(x), ".17g")
    # keep a float marker so that a reload does not turn 2.0 into an int
    if not any(ch in text for ch in ".ein"):
        text += ".0"
    return text


def dump_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        return format_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dump_json(v, indent + 1) for v in obj) + "]"
        items = [pad + dump_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _complex_obj(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _params_obj(p: PhysicalParams) -> dict:
    return {"Z": float(p.Z), "bs": float(p.bs), "l": int(p.l), "D": int(p.D), "L": float(p.L)}


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_number(v) if math.isfinite(v) else ""
    return str(v)


def _csv_text(columns, rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise click.ClickException(f"cannot write {out}: {exc}") from exc


# -- parsing -----------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re,im`` or a literal such as ``0.4+1e-6i``."""
    s = text.strip().replace(" ", "")
    try:
        if "," in s:
            re_part, im_part = s.split(",")
            return complex(float(re_part), float(im_part))
        return complex(s.replace("i", "j"))
    except ValueError:
        raise click.BadParameter(f"not a complex number: {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise click.BadParameter(f"grid must be start,stop,count, got {text!r}")
    start, stop = parse_complex(parts[0]), parse_complex(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise click.BadParameter(f"grid count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise click.BadParameter("grid must have at least one point")
    return np.linspace(start, stop, count)


def _max_iter(default=DEFAULT_MAX_ITER):
    raw = os.environ.get(MAX_ITER_ENV)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise click.ClickException(f"{MAX_ITER_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise click.ClickException(f"{MAX_ITER_ENV} must be positive")
    return value


def _make_params(Z, bs, l, D) -> PhysicalParams:
    try:
        return PhysicalParams(Z=Z, bs=bs, l=l, D=D)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def physical_options(f):
    for opt in reversed(
        [
            click.option("-Z", "Z", type=float, default=-1.0, show_default=True,
                         help="Coulomb strength, attractive if negative."),
            click.option("--bs", type=float, default=1.0, show_default=True,
                         help="Coulomb-Sturmian scale parameter b_S."),
            click.option("-l", "l", type=int, default=0, show_default=True, help="Orbital quantum number."),
            click.option("-D", "D", type=int, default=3, show_default=True, help="Spatial dimension (>= 2)."),
            click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True,
                         help="Relative tolerance of series and continued fractions."),
            click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
                         show_default=True),
            click.option("--out", type=click.Path(dir_okay=False), default=None,
                         help="Output file (default: stdout)."),
        ]
    ):
        f = opt(f)
    return f


def _check_tol(tol):
    if not tol > 0:
        raise click.BadParameter(f"--tol must be positive, got {tol}")


# -- commands ----------------------------------------------------------------------


@click.group()
def cli():
    """Coulomb-Sturmian matrix elements of the Coulomb Green's operator."""


@cli.command("green-matrix")
@physical_options
@click.option("--energy", required=True, help="Complex energy: re, re,im or 0.4+1e-6i.")
@click.option("--n", "size", type=int, default=8, show_default=True, help="Matrix size N.")
@click.option("--cross-check", is_flag=True, help="Also build the tail-corrected inversion and report the discrepancy.")
def green_matrix(Z, bs, l, D, tol, fmt, out, energy, size, cross_check):
    """Write the N x N Green's matrix G^(N).

    CSV columns: i, j, G_re, G_im (one row per entry), preceded by '#'
    metadata lines with the route and the tail C_N.
    """
    _check_tol(tol)
    if size < 1:
        raise click.BadParameter("--n must be >= 1")
    p = _make_params(Z, bs, l, D)
    try:
        e = ComplexEnergy.from_z(parse_complex(energy), p.Z)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc
    max_iter = _max_iter()
    tail_route = "direct" if is_near_cut(e, p) else "closed-form"
    try:
        g = greens_matrix_recursive(size, e, p, tol, max_iter, tail_route=tail_route)
        inv = greens_matrix_inversion_exact(size, e, p, tol, max_iter, tail_route) if cross_check else None
    except PoleAtEnergy as exc:
        raise NumericalFailure(f"energy {e.z} is on the pole n_r = {exc.n_r}: {exc}") from exc
    except (ConvergenceError, CutProximity, ArithmeticError) as exc:
        raise NumericalFailure(str(exc)) from exc

    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "command": "green-matrix",
            "params": _params_obj(p),
            "energy": _complex_obj(e.z),
            "n": size,
            "route": g.route.value,
            "tail_route": tail_route,
            "c_tail": _complex_obj(g.c_tail),
            "matrix": {
                "re": g.entries.real.tolist(),
                "im": g.entries.imag.tolist(),
            },
        }
        if inv is not None:
            doc["cross_check"] = {
                "route": inv.route.value,
                "max_rel_discrepancy": rel_discrepancy(g.entries, inv.entries),
            }
        _emit(dump_json(doc), out)
    else:
        comments = [
            f"schema={SCHEMA}",
            f"route={g.route.value}",
            f"tail_route={tail_route}",
            f"c_tail_re={format_number(g.c_tail.real)}",
            f"c_tail_im={format_number(g.c_tail.imag)}",
        ]
        if inv is not None:
            comments.append(f"cross_check_max_rel_discrepancy={format_number(rel_discrepancy(g.entries, inv.entries))}")
        rows = [
            (i, j, g.entries[i, j].real, g.entries[i, j].imag)
            for i in range(size)
            for j in range(size)
        ]
        _emit(_csv_text(MATRIX_COLUMNS, rows, comments), out)


def _scan_row(z: complex, p: PhysicalParams, tol, max_iter):
    try:
        e = ComplexEnergy.from_z(z, p.Z)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NearCutWarning)
            res = g00_result(e, p, tol, max_iter)
    except PoleAtEnergy:
        return [z.real, z.imag, None, None, False, 0, "pole"]
    except (CutProximity, ValueError):
        return [z.real, z.imag, None, None, False, 0, "cut"]
    except ConvergenceError as exc:
        return [z.real, z.imag, None, None, False, exc.iterations or 0, "unconverged"]
    return [z.real, z.imag, res.value.real, res.value.imag, res.converged, res.iterations, ""]


@cli.command("g00-scan")
@physical_options
@click.option("--grid", "grids", multiple=True, help="start,stop,count; start/stop may be complex.")
@click.option("--energy", "energies", multiple=True, help="Individual energy point (repeatable).")
def g00_scan(Z, bs, l, D, tol, fmt, out, grids, energies):
    """Evaluate G00 over a set of energies.

    Columns: z_re, z_im, G00_re, G00_im, converged, iterations, flag.
    Rows at a pole or on the cut have empty G00 values and flag 'pole' or
    'cut'.
    """
    _check_tol(tol)
    p = _make_params(Z, bs, l, D)
    points = [parse_complex(s) for s in energies]
    for g in grids:
        points.extend(complex(z) for z in parse_grid(g))
    if not points:
        raise click.BadParameter("give at least one --grid or --energy")
    max_iter = _max_iter()
    rows = [_scan_row(complex(z), p, tol, max_iter) for z in points]
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "command": "g00-scan",
            "params": _params_obj(p),
            "columns": SCAN_COLUMNS,
            "rows": rows,
        }
        _emit(dump_json(doc), out)
    else:
        _emit(_csv_text(SCAN_COLUMNS, rows), out)


@cli.command("spectrum")
@physical_options
@click.option("--n", "levels", type=int, default=3, show_default=True, help="Number of levels.")
def spectrum_cmd(Z, bs, l, D, tol, fmt, out, levels):
    """Analytic bound-state energies next to the located poles of G00.

    Columns: n_r, analytic, located, abs_diff.  Exit 2 if any difference
    exceeds 1e-6.
    """
    _check_tol(tol)
    p = _make_params(Z, bs, l, D)
    if p.Z >= 0:
        raise click.ClickException(f"no bound states for Z = {p.Z} >= 0")
    if levels < 1:
        raise click.BadParameter("--n must be >= 1")
    states = analytic_spectrum(p, levels + 1)
    energies = [s.energy for s in states]
    rows = []
    for n_r in range(levels):
        lo = 2 * energies[0] if n_r == 0 else 0.5 * (energies[n_r - 1] + energies[n_r])
        hi = 0.5 * (energies[n_r] + energies[n_r + 1])
        try:
            located = locate_pole(p, (lo, hi), tol=min(tol, 1e-12))
        except (NoSignChange, ConvergenceError, ArithmeticError) as exc:
            raise NumericalFailure(f"level n_r = {n_r}: {exc}") from exc
        rows.append([n_r, energies[n_r], located, abs(located - energies[n_r])])
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "command": "spectrum",
            "params": _params_obj(p),
            "columns": ["n_r", "analytic", "located", "abs_diff"],
            "rows": rows,
        }
        _emit(dump_json(doc), out)
    else:
        _emit(_csv_text(["n_r", "analytic", "located", "abs_diff"], rows), out)
    worst = max(r[3] for r in rows)
    if worst > SPECTRUM_MAX_DIFF:
        raise NumericalFailure(f"located pole differs from the analytic level by {worst:.3g}")


@cli.command("verify")
@physical_options
@click.option("--energy", default="-0.3", show_default=True, help="Complex energy of the checks.")
@click.option("--n", "size", type=int, default=8, show_default=True, help="Matrix size of the checks.")
@click.option("--near-cut", is_flag=True, help="Apply the near-cut policy: direct fraction authoritative.")
def verify(Z, bs, l, D, tol, fmt, out, energy, size, near_cut):
    """Run the cross-validation battery and report each check.

    CSV columns: check, measured, threshold, status, note.  Exit 2 if any
    check fails; skipped and flagged checks do not fail the run.
    """
    _check_tol(tol)
    if size < 2:
        raise click.BadParameter("--n must be >= 2")
    p = _make_params(Z, bs, l, D)
    try:
        e = ComplexEnergy.from_z(parse_complex(energy), p.Z)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc
    report = run_battery(e, p, size, tol, _max_iter(None), near_cut=near_cut)
    rows = [[c.name, c.measured, c.threshold, c.status, c.note] for c in report.checks]
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "command": "verify",
            "params": _params_obj(p),
            "energy": _complex_obj(e.z),
            "region": report.region,
            "notes": report.notes,
            "columns": VERIFY_COLUMNS,
            "rows": rows,
            "ok": report.ok,
        }
        _emit(dump_json(doc), out)
    else:
        comments = [f"region={report.region}"] + [f"note={n}" for n in report.notes]
        _emit(_csv_text(VERIFY_COLUMNS, rows, comments), out)
    if not report.ok:
        failed = ", ".join(c.name for c in report.checks if c.status == "fail")
        raise NumericalFailure(f"failed checks: {failed}")


def main(argv=None) -> int:
    """Entry point with the 0/1/2 exit-code contract."""
    try:
        rv = cli.main(args=argv, prog_name="sturmian-green", standalone_mode=False)
    except NumericalFailure as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except SturmianGreenError as exc:
        click.echo(f"Error: {exc}", err=True)
        return 2
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
