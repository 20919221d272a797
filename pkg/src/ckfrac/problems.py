"""Built-in test function and Cauchy problems with known closed forms."""

from __future__ import annotations

import numpy as np

from ckfrac.operators import Func1, Interval, OrderParams, power_closed_form, power_integral_closed_form
from ckfrac.solver import CauchyProblem
from ckfrac.specfun import gamma, mittag_leffler_array

NAMES = ("example1", "example2", "example3")


def example1_function(p: OrderParams, a: float = 1.0) -> Func1:
    """``x(t) = (t^rho - a^rho)^2`` with both derivatives (``a = 1`` by default)."""
    rho = p.rho
    c = a**rho

    def value(t):
        return (t**rho - c) ** 2

    def deriv1(t):
        return 2.0 * rho * (t**rho - c) * t ** (rho - 1.0)

    def deriv2(t):
        return 2.0 * rho**2 * t ** (2.0 * rho - 2.0) + 2.0 * rho * (rho - 1.0) * (t**rho - c) * t ** (rho - 2.0)

    return Func1(value, deriv1, deriv2)


def example1_derivative(p: OrderParams, t, iv: Interval = Interval(1.0, 2.0)):
    """Exact CK derivative ``2 rho^alpha / Gamma(3 - alpha) (t^rho - a^rho)^(2 - alpha)``."""
    return power_closed_form(2.0, p, iv, t, normalized=False)


def example1_integral(p: OrderParams, t, iv: Interval = Interval(1.0, 2.0)):
    """Exact Katugampola integral of the example1 test function."""
    return power_integral_closed_form(2.0, p, iv, t)


def example2(p: OrderParams) -> CauchyProblem:
    """Linear problem on ``[1, 2]`` whose solution is ``(t^rho - 1)^2``."""
    alpha, rho = p.alpha, p.rho
    k = 2.0 * rho**alpha / gamma(3.0 - alpha)

    def f(t, x):
        s = np.maximum(np.asarray(t, dtype=float) ** rho - 1.0, 0.0)
        return x + k * s ** (2.0 - alpha) - s**2

    return CauchyProblem(f=f, p=p, iv=Interval(1.0, 2.0), x_a=0.0, L=1.0)


def example2_exact(p: OrderParams, t):
    return (np.asarray(t, dtype=float) ** p.rho - 1.0) ** 2


def example3(p: OrderParams) -> CauchyProblem:
    """``D x = rho^alpha x`` on ``[0, 1]``, ``x(0) = 1``."""
    lam = p.rho**p.alpha

    def f(t, x):
        return lam * x

    return CauchyProblem(f=f, p=p, iv=Interval(0.0, 1.0), x_a=1.0, L=lam)


def example3_exact(p: OrderParams, t):
    """``E_alpha(t^(rho alpha))``."""
    return mittag_leffler_array(p.alpha, 1.0, np.asarray(t, dtype=float) ** (p.rho * p.alpha))


def builtin_problem(name: str, p: OrderParams) -> tuple[CauchyProblem, callable]:
    """Cauchy problem and exact solution for ``example2`` or ``example3``."""
    if name == "example2":
        return example2(p), lambda t: example2_exact(p, t)
    if name == "example3":
        return example3(p), lambda t: example3_exact(p, t)
    raise KeyError(f"{name!r} is not a built-in Cauchy problem")
