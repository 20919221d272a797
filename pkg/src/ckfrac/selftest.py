"""Quick invariant checks run by ``ckfrac selftest``.

Each check returns ``(name, passed, detail)``. The set is a cheap subset of the
test suite, sized to finish in a few seconds.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ckfrac.decomposition import approx_derivative
from ckfrac.operators import (
    Func1,
    Interval,
    OrderParams,
    QuadSpec,
    ck_derivative,
    integral_as_func1,
    integral_norm_constant,
    katugampola_integral,
)
from ckfrac.problems import builtin_problem, example1_derivative, example1_function
from ckfrac.solver import DecompSolveConfig, convergence_horizon, solve_decomposition, solve_picard
from ckfrac.specfun import coeff_seq, mittag_leffler, solution_partial_sum_magnitude

Check = Callable[[], tuple[str, bool, str]]


def _coefficients():
    worst = 0.0
    for alpha in (0.1, 0.3, 0.5, 0.7, 0.9):
        c = coeff_seq(alpha, 40, "solution").c
        partial = np.abs(np.cumsum(c))
        exact = np.array([solution_partial_sum_magnitude(alpha, n) for n in range(41)])
        worst = max(worst, float(np.max(np.abs(partial / exact - 1.0))))
    return "coefficient partial sums", worst <= 1e-10, f"max rel err {worst:.2e}"


def _mittag_leffler():
    xs = np.linspace(-5, 5, 41)
    worst = max(abs(mittag_leffler(1.0, 1.0, x) / math.exp(x) - 1.0) for x in xs)
    return "E_1 = exp", worst <= 1e-12, f"max rel err {worst:.2e}"


def _closed_form():
    worst = 0.0
    for alpha, rho in ((0.5, 0.6), (0.7, 0.2), (0.4, 1.5)):
        p = OrderParams(alpha, rho)
        t = np.linspace(1.0, 2.0, 52)[1:-1]
        num = ck_derivative(example1_function(p), p, Interval(1.0, 2.0), t)
        worst = max(worst, float(np.max(np.abs(num / example1_derivative(p, t) - 1.0))))
    return "derivative closed form", worst <= 1e-7, f"max rel err {worst:.2e}"


def _endpoint():
    p, iv = OrderParams(0.3, 0.7), Interval(0.5, 2.0)
    x = Func1(np.exp, np.exp)
    left = ck_derivative(x, p, iv, iv.a, "left")
    right = ck_derivative(x, p, iv, iv.b, "right")
    return "endpoint law", left == 0.0 and right == 0.0, f"left {left}, right {right}"


def _inversion():
    p, iv = OrderParams(0.5, 1.5), Interval(1.0, 2.0)
    rho = p.rho
    x = Func1(lambda t: 1.0 + t**rho, lambda t: rho * t ** (rho - 1.0))
    t = np.linspace(1.0, 2.0, 12)[1:-1]
    y = integral_as_func1(x, p, iv)
    err = float(np.max(np.abs(ck_derivative(y, p, iv, t, q=QuadSpec(lower_exponent=p.alpha - 1.0)) - x(t))))
    return "derivative of integral", err <= 1e-6, f"max abs err {err:.2e}"


def _norm_bound():
    p, iv = OrderParams(0.4, 0.8), Interval(1.0, 3.0)
    rng = np.random.default_rng(7)
    K = integral_norm_constant(p, iv)
    t = np.linspace(iv.a, iv.b, 41)
    ok = True
    for _ in range(10):
        poly = np.polynomial.Polynomial(rng.normal(size=4))
        lhs = np.max(np.abs(katugampola_integral(poly, p, iv, t)))
        ok &= bool(lhs <= K * np.max(np.abs(poly(np.linspace(iv.a, iv.b, 2001)))) + 1e-9)
    return "integral norm bound", ok, f"K = {K:.4f}"


def _containment():
    p, iv = OrderParams(0.5, 0.6), Interval(1.0, 2.0)
    x = example1_function(p)
    ok = True
    for t in (1.25, 1.5, 1.75, 2.0):
        r = approx_derivative(x, p, iv, t, 15)
        ok &= abs(r.value - example1_derivative(p, t)) <= r.bound
    return "expansion error bound", ok, "N = 15"


def _solvers():
    p = OrderParams(0.5, 0.6)
    prob, exact = builtin_problem("example2", p)
    pic = solve_picard(prob)
    e_pic = float(np.max(np.abs(pic.x - exact(pic.t))))
    T = convergence_horizon(prob)
    errs = []
    for N in (5, 10, 15):
        g = solve_decomposition(prob, DecompSolveConfig(N=N)).restrict(T)
        errs.append(float(np.max(np.abs(g.x - exact(g.t)))))
    ok = e_pic <= 1e-6 and errs[2] <= 5e-3 and errs[1] < 1.05 * errs[0] and errs[2] < 1.05 * errs[1]
    return "example 2 solvers", ok, f"picard {e_pic:.2e}, decomp {', '.join(f'{e:.2e}' for e in errs)}"


CHECKS: tuple[Check, ...] = (
    _coefficients,
    _mittag_leffler,
    _closed_form,
    _endpoint,
    _inversion,
    _norm_bound,
    _containment,
    _solvers,
)


def run_selftest() -> list[tuple[str, bool, str]]:
    results = []
    for check in CHECKS:
        try:
            results.append(check())
        except Exception as exc:  # a crash is a failed check
            results.append((check.__name__.lstrip("_"), False, f"{type(exc).__name__}: {exc}"))
    return results
