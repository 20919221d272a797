"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the table alone, or via
pytest, where the lines are repeated in the terminal summary.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import NINE, PAIRS, exp_func, poly_in_trho, random_poly  # noqa: E402
from ckfrac.decomposition import approx_derivative  # noqa: E402
from ckfrac.operators import (  # noqa: E402
    Func1,
    Interval,
    OrderParams,
    QuadSpec,
    ck_derivative,
    derivative_as_func1,
    integral_as_func1,
    integral_norm_constant,
    katugampola_integral,
)
from ckfrac.problems import builtin_problem, example1_derivative, example1_function  # noqa: E402
from ckfrac.solver import (  # noqa: E402
    DecompSolveConfig,
    convergence_horizon,
    fit_slope,
    solve_decomposition,
    solve_picard,
    solve_reference,
)
from ckfrac.specfun import coeff_seq, gamma  # noqa: E402

IV = Interval(1.0, 2.0)
RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} | {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _sup(grid, exact) -> float:
    return float(np.max(np.abs(grid.x - exact(grid.t))))


def test_c01_closed_form_derivative():
    worst = 0.0
    t = np.linspace(1.0, 2.0, 52)[1:-1]
    for alpha, rho in PAIRS:
        p = OrderParams(alpha, rho)
        rel = np.abs(ck_derivative(example1_function(p), p, IV, t) / example1_derivative(p, t) - 1.0)
        worst = max(worst, float(rel.max()))
    report(1, "closed-form derivative, 3 pairs x 50 points", worst <= 1e-7, f"max rel err {worst:.2e} (tol 1e-7)")


def test_c02_decomposition_containment():
    t = np.linspace(1.0, 2.0, 51)[1:]
    checked = violations = 0
    worst = 0.0
    for alpha, rho in PAIRS:
        p = OrderParams(alpha, rho)
        x = example1_function(p)
        exact = example1_derivative(p, t)
        for N in (2, 5, 10, 15):
            for ti, ei in zip(t, exact):
                r = approx_derivative(x, p, IV, ti, N)
                err = abs(r.value - ei)
                checked += 1
                violations += err > r.bound
                worst = max(worst, err / r.bound)
    report(2, "error within bound, N in {2,5,10,15}", violations == 0,
           f"{violations}/{checked} violations, max err/bound {worst:.3f}")


def test_c03_decomposition_rate():
    p = OrderParams(0.5, 0.6)
    x = example1_function(p)
    t = np.linspace(1.0, 2.0, 51)[1:]
    exact = example1_derivative(p, t)
    Ns = [5, 10, 20, 40, 80]
    errs = [float(np.max(np.abs([approx_derivative(x, p, IV, ti, N).value for ti in t] - exact))) for N in Ns]
    slope = fit_slope(Ns, errs)
    lo, hi = p.alpha - 1.0 - 0.25, p.alpha - 1.0 + 0.25
    report(3, "fitted log-log slope in [alpha-1.25, alpha-0.75]", lo <= slope <= hi,
           f"slope {slope:.3f}, window [{lo:.2f}, {hi:.2f}], errors {', '.join(f'{e:.2e}' for e in errs)}")


def test_c04_inversion_identities():
    t = np.linspace(1.0, 2.0, 22)[1:-1]
    worst_di = worst_id = 0.0
    for i, (alpha, rho) in enumerate(NINE):
        p = OrderParams(alpha, rho)
        x = random_poly(100 + i, rho)
        y = integral_as_func1(x, p, IV)
        di = ck_derivative(y, p, IV, t, q=QuadSpec(lower_exponent=alpha - 1.0))
        worst_di = max(worst_di, float(np.max(np.abs(di - x(t)))))
        d = derivative_as_func1(x, p, IV)
        idv = katugampola_integral(d, p, IV, t, q=QuadSpec(lower_exponent=1.0 - alpha))
        worst_id = max(worst_id, float(np.max(np.abs(idv - (x(t) - x(1.0))))))
    ok = worst_di <= 1e-6 and worst_id <= 1e-6
    report(4, "D(I x) = x and I(D x) = x - x(a), 9 combos", ok, f"max abs err {worst_di:.2e} / {worst_id:.2e} (tol 1e-6)")


def test_c05_example2():
    p = OrderParams(0.5, 0.6)
    prob, exact = builtin_problem("example2", p)
    e_pic = _sup(solve_picard(prob, t_out=np.linspace(1.0, 2.0, 1001)), exact)
    T = convergence_horizon(prob)
    errs = [_sup(solve_decomposition(prob, DecompSolveConfig(N=N, step=1e-3)).restrict(T), exact) for N in (5, 10, 15)]
    decreasing = errs[1] < 1.05 * errs[0] and errs[2] < 1.05 * errs[1]
    ok = e_pic <= 1e-6 and errs[2] <= 5e-3 and decreasing
    report(5, "example 2, alpha=0.5 rho=0.6", ok,
           f"picard {e_pic:.2e} (tol 1e-6); decomp on [1, {T:.4f}] N=5/10/15: {', '.join(f'{e:.2e}' for e in errs)} (tol 5e-3)")


def test_c06_example3():
    parts, ok = [], True
    for alpha, rho in ((0.9, 1.5), (0.5, 5.0)):
        prob, exact = builtin_problem("example3", OrderParams(alpha, rho))
        T = min(1.0, convergence_horizon(prob))
        errs = [_sup(solve_decomposition(prob, DecompSolveConfig(N=N)).restrict(T), exact) for N in (5, 10, 15)]
        ok &= errs[2] <= 1e-2 and errs[0] > errs[1] > errs[2]
        parts.append(f"({alpha},{rho}) on [0, {T:.4f}]: {', '.join(f'{e:.2e}' for e in errs)}")
    report(6, "example 3 vs Mittag-Leffler, N=5/10/15", ok, "; ".join(parts) + " (tol 1e-2)")


def test_c07_coefficient_identity():
    worst = 0.0
    for alpha in (0.1, 0.3, 0.5, 0.7, 0.9):
        c = coeff_seq(alpha, 40, "solution").c
        for N in range(1, 41):
            closed = math.exp(math.lgamma(N + 1 - alpha) - math.lgamma(N + 1)) / (alpha * abs(gamma(-alpha)))
            worst = max(worst, abs(abs(math.fsum(c[: N + 1])) / closed - 1.0))
    report(7, "solution-mode partial sums, N <= 40", worst <= 1e-10, f"max rel err {worst:.2e} (tol 1e-10)")


def test_c08_norm_bound():
    p, iv = OrderParams(0.4, 0.8), Interval(1.0, 3.0)
    K = integral_norm_constant(p, iv)
    t = np.linspace(iv.a, iv.b, 41)
    fine = np.linspace(iv.a, iv.b, 4001)
    worst, fails = 0.0, 0
    for seed in range(100):
        x = random_poly(seed, p.rho)
        lhs = float(np.max(np.abs(katugampola_integral(x, p, iv, t))))
        rhs = K * float(np.max(np.abs(x(fine))))
        fails += lhs > rhs + 1e-9
        worst = max(worst, lhs / rhs)
    report(8, "||I x|| <= K ||x||, 100 random polynomials", fails == 0, f"{fails} failures, max ratio {worst:.3f}")


def test_c09_cross_solver_agreement():
    p = OrderParams(0.5, 0.6)
    prob, _ = builtin_problem("example2", p)
    T = convergence_horizon(prob)
    t = np.linspace(1.0, T, 201)
    pic = solve_picard(prob, t_out=t).x
    dec = solve_decomposition(prob, DecompSolveConfig(N=25), t_out=t).x
    ref = solve_reference(prob, nodes=4096, t_out=t).x
    d = [float(np.max(np.abs(u - v))) for u, v in ((pic, dec), (pic, ref), (dec, ref))]
    report(9, "picard / decomp(N=25) / reference agree", max(d) <= 1e-3,
           f"pairwise sup diff {d[0]:.2e}, {d[1]:.2e}, {d[2]:.2e} (tol 1e-3)")


def test_c10_endpoint_law():
    values = []
    params = [(al, rh) for al in (0.1, 0.5, 0.9) for rh in (0.3, 1.0, 2.5)]
    for alpha, rho in params:
        p = OrderParams(alpha, rho)
        funcs = [exp_func(), example1_function(p), random_poly(int(alpha * 10), rho), poly_in_trho([1.0, -2.0, 0.5], rho),
                 Func1(np.sin, np.cos)]
        for iv in (IV, Interval(0.5, 3.0)):
            for x in funcs:
                values.append(ck_derivative(x, p, iv, iv.a))
                values.append(ck_derivative(x, p, iv, iv.b, "right"))
    nonzero = sum(v != 0.0 for v in values)
    report(10, "derivative is exactly 0 at the base point", nonzero == 0, f"{nonzero}/{len(values)} nonzero")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
