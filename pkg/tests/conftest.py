from __future__ import annotations

import numpy as np

from ckfrac.operators import Func1

PAIRS = [(0.5, 0.6), (0.7, 0.2), (0.4, 1.5)]
NINE = [(al, rh) for al in (0.25, 0.5, 0.75) for rh in (0.5, 1.0, 1.5)]


def poly_in_trho(coeffs, rho: float) -> Func1:
    """``sum_j coeffs[j] (t^rho)^j`` with exact first and second derivatives."""
    P = np.polynomial.Polynomial(coeffs)
    dP, d2P = P.deriv(), P.deriv(2)

    def value(t):
        return P(np.asarray(t, dtype=float) ** rho)

    def deriv1(t):
        t = np.asarray(t, dtype=float)
        return dP(t**rho) * rho * t ** (rho - 1.0)

    def deriv2(t):
        t = np.asarray(t, dtype=float)
        u = t**rho
        return d2P(u) * (rho * t ** (rho - 1.0)) ** 2 + dP(u) * rho * (rho - 1.0) * t ** (rho - 2.0)

    return Func1(value, deriv1, deriv2)


def random_poly(seed: int, rho: float, degree: int = 4) -> Func1:
    return poly_in_trho(np.random.default_rng(seed).normal(size=degree + 1), rho)


def exp_func() -> Func1:
    return Func1(np.exp, np.exp, np.exp)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
