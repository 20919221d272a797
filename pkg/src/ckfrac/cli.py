"""Command-line front end.

Subcommands write CSV (header ``t,x,exact,abs_err``; ``study`` writes
``N,sup_error`` and a trailing ``# fitted_slope=...`` comment). Exit codes:
0 success, 2 usage error, 3 solver error, 4 selftest failure.
"""

from __future__ import annotations

import argparse
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ckfrac.decomposition import approx_derivative
from ckfrac.errors import CKError
from ckfrac.operators import Interval, OrderParams, ck_derivative, katugampola_integral
from ckfrac.problems import (
    builtin_problem,
    example1_derivative,
    example1_function,
    example1_integral,
)
from ckfrac.selftest import run_selftest
from ckfrac.solver import (
    DecompSolveConfig,
    PicardConfig,
    SolutionGrid,
    convergence_horizon,
    convergence_study,
    fit_slope,
    solve_decomposition,
    solve_picard,
    solve_reference,
)

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_SELFTEST = 0, 2, 3, 4
#: number of uniform output points for deriv, integ and solve
OUTPUT_POINTS = 201
DEFAULT_INTERVALS = {"example1": (1.0, 2.0), "example2": (1.0, 2.0), "example3": (0.0, 1.0)}


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    command: str
    problem: str | None = None
    alpha: float = 0.5
    rho: float = 1.0
    a: float | None = None
    b: float | None = None
    N: list[int] = field(default_factory=list)
    step: float = 1e-3
    method: str | None = None
    output_path: str | None = None
    tol: float | None = None

    def validate(self) -> None:
        if self.command in ("deriv", "integ", "solve", "study") and self.problem is None:
            raise UsageError(f"{self.command} requires --problem")
        if self.command in ("deriv", "integ") and self.problem != "example1":
            raise UsageError(f"{self.command} supports --problem example1 only")
        if self.command == "solve":
            if self.method is None:
                raise UsageError("solve requires --method")
            if self.problem not in ("example2", "example3"):
                raise UsageError("solve supports --problem example2 or example3")
            if self.method == "decomp" and len(self.N) > 1:
                raise UsageError("solve takes a single --N")
        if self.command == "study" and len(set(self.N)) < 3:
            raise UsageError("study requires at least three distinct --N values")

    def params(self) -> OrderParams:
        return OrderParams(self.alpha, self.rho)

    def interval(self) -> Interval:
        lo, hi = DEFAULT_INTERVALS.get(self.problem or "", (None, None))
        a = self.a if self.a is not None else lo
        b = self.b if self.b is not None else hi
        if a is None or b is None:
            raise UsageError("--a and --b are required")
        return Interval(a, b)


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    return f"{float(v):.17g}"


def grid_csv(grid: SolutionGrid) -> str:
    out = io.StringIO()
    out.write("t,x,exact,abs_err\n")
    for i in range(len(grid.t)):
        ex = None if grid.exact is None else grid.exact[i]
        err = None if grid.abs_err is None else grid.abs_err[i]
        out.write(f"{_fmt(grid.t[i])},{_fmt(grid.x[i])},{_fmt(ex)},{_fmt(err)}\n")
    return out.getvalue()


def study_csv(Ns, errors, slope: float) -> str:
    lines = ["N,sup_error"]
    lines += [f"{n},{_fmt(e)}" for n, e in zip(Ns, errors)]
    lines.append(f"# fitted_slope={_fmt(slope)}")
    return "\n".join(lines) + "\n"


def read_grid_csv(text: str) -> SolutionGrid:
    """Parse :func:`grid_csv` output back into a grid."""
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    cols = list(zip(*(r.split(",") for r in rows[1:])))
    num = lambda c: np.array([float(v) for v in c])  # noqa: E731
    opt = lambda c: None if all(v == "" for v in c) else num(c)  # noqa: E731
    return SolutionGrid(t=num(cols[0]), x=num(cols[1]), exact=opt(cols[2]), abs_err=opt(cols[3]))


def _deriv(spec: RunSpec) -> str:
    p, iv = spec.params(), spec.interval()
    x = example1_function(p, iv.a)
    t = np.linspace(iv.a, iv.b, OUTPUT_POINTS)
    if spec.N:
        vals = np.array([approx_derivative(x, p, iv, ti, spec.N[0]).value for ti in t])
    else:
        vals = ck_derivative(x, p, iv, t)
    grid = SolutionGrid(t=t, x=vals).with_exact(lambda s: example1_derivative(p, s, iv))
    return grid_csv(grid)


def _integ(spec: RunSpec) -> str:
    p, iv = spec.params(), spec.interval()
    x = example1_function(p, iv.a)
    t = np.linspace(iv.a, iv.b, OUTPUT_POINTS)
    grid = SolutionGrid(t=t, x=katugampola_integral(x, p, iv, t)).with_exact(lambda s: example1_integral(p, s, iv))
    return grid_csv(grid)


def _problem(spec: RunSpec):
    prob, exact = builtin_problem(spec.problem, spec.params())
    if spec.a is not None or spec.b is not None:
        raise UsageError("built-in Cauchy problems have fixed intervals; drop --a/--b")
    return prob, exact


def _solve(spec: RunSpec) -> str:
    prob, exact = _problem(spec)
    t = np.linspace(prob.iv.a, prob.iv.b, OUTPUT_POINTS)
    if spec.method == "picard":
        cfg = PicardConfig() if spec.tol is None else PicardConfig(tol=spec.tol)
        grid = solve_picard(prob, cfg, t_out=t)
    elif spec.method == "reference":
        grid = solve_reference(prob, t_out=t)
    else:
        N = spec.N[0] if spec.N else 15
        grid = solve_decomposition(prob, DecompSolveConfig(N=N, step=spec.step), t_out=t)
    return grid_csv(grid.with_exact(exact))


def _study(spec: RunSpec) -> str:
    Ns = sorted(set(spec.N))
    p = spec.params()
    if spec.problem == "example1":
        iv = spec.interval()
        x = example1_function(p, iv.a)
        t = np.linspace(iv.a, iv.b, 51)[1:]
        exact = example1_derivative(p, t, iv)
        errors = [
            float(np.max(np.abs(np.array([approx_derivative(x, p, iv, ti, N).value for ti in t]) - exact)))
            for N in Ns
        ]
        return study_csv(Ns, errors, fit_slope(Ns, errors))
    prob, exact = _problem(spec)
    res = convergence_study(prob, exact, Ns, DecompSolveConfig(step=spec.step))
    return study_csv(res.Ns, res.sup_errors, res.slope) + f"# horizon={_fmt(convergence_horizon(prob))}\n"


def _selftest(spec: RunSpec) -> tuple[str, bool]:
    lines, ok = [], True
    for name, passed, detail in run_selftest():
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return "\n".join(lines) + "\n", ok


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=0.5, help="fractional order in (0, 1)")
    common.add_argument("--rho", type=float, default=1.0, help="scale exponent rho > 0")
    common.add_argument("--a", type=float, default=None, help="left end of the interval")
    common.add_argument("--b", type=float, default=None, help="right end of the interval")
    common.add_argument("--N", type=int, action="append", default=[], help="truncation order (repeat for study)")
    common.add_argument("--step", type=float, default=1e-3, help="ODE output step of the decomposition solver")
    common.add_argument("--method", choices=("picard", "decomp", "reference"), default=None)
    common.add_argument("--problem", choices=("example1", "example2", "example3"), default=None)
    common.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    common.add_argument("--tol", type=float, default=None, help="Picard fixed-point tolerance")

    parser = argparse.ArgumentParser(prog="ckfrac", description="Caputo-Katugampola fractional calculus toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("deriv", parents=[common], help="CK derivative of the example1 test function")
    sub.add_parser("integ", parents=[common], help="Katugampola integral of the example1 test function")
    sub.add_parser("solve", parents=[common], help="solve a built-in Cauchy problem")
    sub.add_parser("study", parents=[common], help="convergence study over several N")
    sub.add_parser("selftest", parents=[common], help="run the quick invariant checks")
    return parser


def run(spec: RunSpec) -> tuple[int, str]:
    """Execute ``spec``; returns the exit status and the text that was produced."""
    spec.validate()
    if spec.command == "selftest":
        text, ok = _selftest(spec)
        status = EXIT_OK if ok else EXIT_SELFTEST
    else:
        handler = {"deriv": _deriv, "integ": _integ, "solve": _solve, "study": _study}[spec.command]
        text = handler(spec)
        status = EXIT_OK
    if spec.output_path and spec.command != "selftest":
        Path(spec.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return status, text


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = RunSpec(
        command=args.command,
        problem=args.problem,
        alpha=args.alpha,
        rho=args.rho,
        a=args.a,
        b=args.b,
        N=args.N,
        step=args.step,
        method=args.method,
        output_path=args.out,
        tol=args.tol,
    )
    try:
        status, _ = run(spec)
    except UsageError as exc:
        print(f"ckfrac: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CKError, ValueError) as exc:
        print(f"ckfrac: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if status == EXIT_SELFTEST:
        print("ckfrac: selftest failed", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
