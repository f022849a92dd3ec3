"""Command-line front end.

    hulthen-dirac spectrum      closed-form levels for one potential
    hulthen-dirac scan          levels along a sweep of one parameter
    hulthen-dirac wavefunction  sampled upper/lower spinor components
    hulthen-dirac verify        invariant suite; exit 1 on any failure
    hulthen-dirac oracle        finite-difference Dirac spectrum

Exit status: 0 success, 1 verification failure, 2 usage or runtime error.
Output is deterministic: rows are sorted and floats are written round-trip
exactly, so identical invocations give byte-identical files.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import shlex
import sys
import tempfile
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .errors import DegenerateShape, EmptyWindow, HulthenDiracError
from .hulthen import (
    PotentialSpec,
    Variant,
    bound_window,
    energy_closed_form,
    q0_state,
    spinor_state,
)

COMMANDS = ("spectrum", "scan", "wavefunction", "verify", "oracle")
SCAN_PARAMS = ("V0", "alpha", "q", "m")
SCAN_COLUMNS = ("param_value", "n", "branch", "E_re", "E_im", "is_real", "outside_window")


class UsageError(Exception):
    """Invalid invocation; maps to exit status 2."""


@dataclass(frozen=True)
class ScanRange:
    param: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class Output:
    path: str | None = None  # None writes to stdout
    fmt: str = "csv"


@dataclass(frozen=True)
class RunPlan:
    command: str
    spec: PotentialSpec
    levels: tuple[int, ...] = ()
    scan: ScanRange | None = None
    output: Output = field(default_factory=Output)
    tol_scale: float = 1.0
    criteria: tuple[int, ...] | None = None
    branch: int = 1
    energy: float | None = None
    x_min: float = 0.0
    x_max: float = 10.0
    points: int = 201
    staggered: bool = True
    keep_outside: bool = False
    command_line: str = ""


def parse_levels(text: str) -> tuple[int, ...]:
    """'0..3' (inclusive range), '0,1,2' or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            levels = tuple(range(int(lo), int(hi) + 1))
        else:
            levels = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"cannot parse levels {text!r}; use '0..3' or '0,1,2'") from None
    if not levels or min(levels) < 0:
        raise UsageError(f"levels must be a nonempty set of nonnegative integers, got {text!r}")
    return tuple(sorted(set(levels)))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hulthen-dirac", description="Dirac bound states of the generalized Hulthen potential.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def potential_args(p, default_variant="pt"):
        p.add_argument("--variant", default=default_variant,
                       help="real, pt, pseudo or exp (default %(default)s)")
        p.add_argument("--V0", type=float, default=2.5, help="coupling, units of m")
        p.add_argument("--q", type=float, default=1.0, help="shape parameter")
        p.add_argument("--alpha", type=float, default=1.0, help="range parameter, units of m")
        p.add_argument("--m", type=float, default=1.0, help="mass (energy unit)")

    def output_args(p):
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("spectrum", help="closed-form levels")
    potential_args(p)
    p.add_argument("--n", default="0", help="levels, e.g. 0..3 or 0,1,2")
    output_args(p)

    p = sub.add_parser("scan", help="levels along a parameter sweep")
    potential_args(p)
    p.add_argument("--vary", required=True, choices=SCAN_PARAMS)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--n", default="0")
    p.add_argument("--keep-outside", action="store_true",
                   help="also write energies at points outside the reality window")
    output_args(p)

    p = sub.add_parser("wavefunction", help="sampled spinor components")
    potential_args(p)
    p.add_argument("--n", default="0", help="a single level")
    p.add_argument("--branch", choices=("plus", "minus"), default="plus")
    p.add_argument("--energy", type=float, default=None, help="energy for the exp variant")
    p.add_argument("--x-min", type=float, default=0.05)
    p.add_argument("--x-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=201)
    output_args(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--tol-scale", type=float, default=1.0,
                   help="multiply every upper-bound tolerance by this factor")
    p.add_argument("--criteria", default=None, help="subset of check groups, e.g. 1,2,6")
    output_args(p)

    p = sub.add_parser("oracle", help="finite-difference Dirac spectrum")
    potential_args(p, default_variant="exp")
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=40.0)
    p.add_argument("--points", type=int, default=2000, help="number of grid cells")
    p.add_argument("--collocated", action="store_true", help="unstaggered grid (shows doublers)")
    output_args(p)
    return parser


def _make_spec(args) -> PotentialSpec:
    try:
        variant = Variant.parse(args.variant)
        q = 0.0 if variant is Variant.EXPONENTIAL else args.q
        return PotentialSpec(args.V0, q, args.alpha, args.m, variant)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_invocation(argv: list[str]) -> RunPlan:
    args = build_parser().parse_args(argv)
    output = Output(args.out, args.format)
    common = dict(command=args.command, output=output, command_line=shlex.join(["hulthen-dirac", *argv]))
    if args.command == "verify":
        criteria = None
        if args.criteria:
            criteria = parse_levels(args.criteria)
        if not args.tol_scale > 0:
            raise UsageError("--tol-scale must be positive")
        return RunPlan(spec=PotentialSpec(2.5, 1.0, 1.0), tol_scale=args.tol_scale, criteria=criteria, **common)

    spec = _make_spec(args)
    if args.command == "oracle":
        if args.points < 8:
            raise UsageError("--points must be at least 8")
        if not args.x_min < args.x_max:
            raise UsageError("--x-min must be smaller than --x-max")
        return RunPlan(spec=spec, x_min=args.x_min, x_max=args.x_max, points=args.points,
                       staggered=not args.collocated, **common)

    levels = parse_levels(args.n)
    if args.command == "spectrum":
        if spec.variant is Variant.EXPONENTIAL:
            raise UsageError("the exp variant has no closed-form spectrum; use the oracle command")
        return RunPlan(spec=spec, levels=levels, **common)
    if args.command == "scan":
        if args.steps < 2:
            raise UsageError("--steps must be at least 2")
        if spec.variant is Variant.EXPONENTIAL:
            raise UsageError("the exp variant has no closed-form spectrum to scan")
        return RunPlan(spec=spec, levels=levels, scan=ScanRange(args.vary, args.start, args.stop, args.steps),
                       keep_outside=args.keep_outside, **common)
    # wavefunction
    if len(levels) != 1:
        raise UsageError("wavefunction takes a single level")
    if spec.variant is Variant.EXPONENTIAL and args.energy is None:
        raise UsageError("the exp variant needs --energy")
    if args.points < 2 or not args.x_min < args.x_max:
        raise UsageError("need --points >= 2 and --x-min < --x-max")
    return RunPlan(spec=spec, levels=levels, branch=1 if args.branch == "plus" else -1, energy=args.energy,
                   x_min=args.x_min, x_max=args.x_max, points=args.points, **common)


# -- formatting --------------------------------------------------------------

def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _params(spec: PotentialSpec) -> dict:
    return {"variant": spec.variant.value, "V0": spec.V0, "q": spec.q, "alpha": spec.alpha, "m": spec.m}


def _csv_text(plan: RunPlan, columns, rows, extra_header=()) -> str:
    buf = io.StringIO()
    buf.write(f"# hulthen-dirac {__version__}\n")
    buf.write(f"# command: {plan.command_line}\n")
    for key, val in _params(plan.spec).items():
        buf.write(f"# {key} = {val if isinstance(val, str) else fmt(val)}\n")
    for line in extra_header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json_text(plan: RunPlan, results: list, params: dict | None = None) -> str:
    doc = {
        "params": _params(plan.spec) if params is None else params,
        "results": results,
        "provenance": {"version": __version__, "command_line": plan.command_line},
    }
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=True) + "\n"


def write_output(output: Output, text: str) -> None:
    """Write atomically: a temporary file in the target directory is renamed into place."""
    if output.path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(output.path))
    fd, tmp = tempfile.mkstemp(prefix=".hulthen-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, output.path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


# -- commands ----------------------------------------------------------------

def _in_window(spec: PotentialSpec, n: int, is_real: bool) -> bool:
    if spec.variant is Variant.REAL:
        return is_real
    try:
        return n in bound_window(spec)
    except EmptyWindow:
        return False


def spectrum_records(spec: PotentialSpec, levels) -> list[dict]:
    out = []
    for n in sorted(levels):
        for sg in (1, -1):
            st = energy_closed_form(spec, n, sg)
            out.append({"n": n, "branch": st.branch, "E": {"re": st.energy.real, "im": st.energy.imag},
                        "is_real": st.is_real_spectrum, "in_window": _in_window(spec, n, st.is_real_spectrum)})
    return out


def run_spectrum(plan: RunPlan) -> str:
    records = spectrum_records(plan.spec, plan.levels)
    if plan.output.fmt == "json":
        return _json_text(plan, records)
    rows = [(r["n"], r["branch"], r["E"]["re"], r["E"]["im"], int(r["is_real"]), int(r["in_window"]))
            for r in records]
    return _csv_text(plan, ("n", "branch", "E_re", "E_im", "is_real", "in_window"), rows)


def scan_rows(plan: RunPlan) -> list[tuple]:
    """One row per (parameter value, level, branch), sorted.

    Points where the level is not real carry outside_window = 1 and empty
    energy fields unless keep_outside is set.  Points where the energy
    formula is singular are always written with empty energy fields.
    """
    rng = plan.scan
    rows = []
    for value in rng.values():
        value = float(value)
        try:
            spec = replace(plan.spec, **{rng.param: value})
        except ValueError as exc:
            raise UsageError(f"{rng.param} = {value}: {exc}") from None
        for n in plan.levels:
            for sg in (1, -1):
                try:
                    st = energy_closed_form(spec, n, sg)
                except DegenerateShape:
                    # the energy formula is singular here; such points lie outside the window
                    branch = "plus" if sg > 0 else "minus"
                    rows.append((value, n, branch, "", "", 0, 1))
                    continue
                outside = not st.is_real_spectrum
                if outside and not plan.keep_outside:
                    E_re, E_im = "", ""
                else:
                    E_re, E_im = st.energy.real, st.energy.imag
                rows.append((value, n, st.branch, E_re, E_im, int(st.is_real_spectrum), int(outside)))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


def run_scan(plan: RunPlan) -> str:
    rows = scan_rows(plan)
    rng = plan.scan
    header = [f"vary = {rng.param} from {fmt(rng.start)} to {fmt(rng.stop)} in {rng.steps} steps "
              f"(overrides the {rng.param} line above)"]
    if plan.output.fmt == "csv":
        return _csv_text(plan, SCAN_COLUMNS, rows, header)
    results = [{"param_value": r[0], "n": r[1], "branch": r[2],
                "E": None if r[3] == "" else {"re": r[3], "im": r[4]},
                "is_real": bool(r[5]), "in_window": not r[6]} for r in rows]
    params = _params(plan.spec) | {"vary": rng.param, "from": rng.start, "to": rng.stop, "steps": rng.steps}
    return _json_text(plan, results, params)


def run_wavefunction(plan: RunPlan) -> str:
    spec = plan.spec
    n = plan.levels[0]
    if spec.variant is Variant.EXPONENTIAL:
        state = q0_state(spec, plan.energy)
        E = complex(plan.energy)
    else:
        st = energy_closed_form(spec, n, plan.branch)
        state = spinor_state(spec, st)
        E = st.energy
    x = np.linspace(plan.x_min, plan.x_max, plan.points)
    ev = state(x)
    lower = ev.lower / spec.m if spec.m else ev.lower
    rows = [(float(xi), float(u.real), float(u.imag), float(t.real), float(t.imag))
            for xi, u, t in zip(x, ev.upper, lower)]
    cols = ("x", "upper_re", "upper_im", "lower_re", "lower_im")
    header = [f"n = {n}", f"E = {fmt(E.real)} {fmt(E.imag)}i", "lower component is theta (m times theta when m = 0)"]
    if plan.output.fmt == "csv":
        return _csv_text(plan, cols, rows, header)
    results = [dict(zip(cols, r)) for r in rows]
    return _json_text(plan, results, _params(spec) | {"n": n, "E": {"re": E.real, "im": E.imag}})


def run_oracle(plan: RunPlan) -> str:
    from .verification import GridSpec, fd_dirac_spectrum

    spec = plan.spec
    spectrum = fd_dirac_spectrum(spec, GridSpec(plan.x_min, plan.x_max, plan.points, plan.staggered))
    ev = spectrum.eigenvalues
    in_gap = (np.abs(ev.imag) <= 1e-9 * max(spec.m, 1.0)) & (np.abs(ev.real) < spec.m)
    rows = [(i, float(e.real), float(e.imag), int(g)) for i, (e, g) in enumerate(zip(ev, in_gap))]
    cols = ("index", "E_re", "E_im", "in_gap")
    header = [f"grid [{fmt(plan.x_min)}, {fmt(plan.x_max)}] with {plan.points} cells, h = {fmt(spectrum.h)}",
              f"staggered = {int(plan.staggered)}, boundary = {spectrum.boundary}"]
    if plan.output.fmt == "csv":
        return _csv_text(plan, cols, rows, header)
    results = [dict(zip(cols, r)) for r in rows]
    params = _params(spec) | {"x_min": plan.x_min, "x_max": plan.x_max, "n_points": plan.points,
                              "staggered": plan.staggered}
    return _json_text(plan, results, params)


def run_verify(plan: RunPlan) -> tuple[str, int]:
    from .suite import GROUPS, run_suite

    groups = plan.criteria
    if groups is not None and not set(groups) <= set(GROUPS):
        raise UsageError(f"unknown check groups {sorted(set(groups) - set(GROUPS))}")
    checks = run_suite(plan.tol_scale, groups)
    failed = [c for c in checks if c.gating and not c.passed]
    status = 1 if failed else 0
    if plan.output.fmt == "json":
        results = [{"criterion": c.criterion, "name": c.name, "measured": c.measured, "op": c.op,
                    "tolerance": c.tolerance, "passed": c.passed, "gating": c.gating, "detail": c.detail}
                   for c in checks]
        text = _json_text(plan, results, {"tol_scale": plan.tol_scale})
    else:
        lines = [c.line() for c in checks]
        lines.append(f"{len(checks) - len(failed)} of {len(checks)} checks passed or recorded as findings; "
                     f"{len(failed)} failed")
        text = "\n".join(lines) + "\n"
    return text, status


def execute(plan: RunPlan) -> int:
    status = 0
    if plan.command == "verify":
        text, status = run_verify(plan)
    else:
        runner = {"spectrum": run_spectrum, "scan": run_scan,
                  "wavefunction": run_wavefunction, "oracle": run_oracle}[plan.command]
        text = runner(plan)
    write_output(plan.output, text)
    return status


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        plan = parse_invocation(argv)
        return execute(plan)
    except UsageError as exc:
        print(f"hulthen-dirac: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except (HulthenDiracError, ValueError, ArithmeticError, OSError) as exc:
        print(f"hulthen-dirac: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
