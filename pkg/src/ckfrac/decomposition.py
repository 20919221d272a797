"""Expansion of the CK derivative into ``x'`` plus moment functions.

For a ``C^2`` function the left derivative is approximated by::

    A_N (t^rho - a^rho)^(1-alpha) t^(1-rho) x'(t)
        - sum_k B_{N,k} (t^rho - a^rho)^(1-alpha-k) V_k(t)

with ``V_k(t) = int_a^t (tau^rho - a^rho)^(k-1) x'(tau) dtau``; the right
derivative mirrors it with ``W_k``. The truncation error decays like
``N^(alpha-1)`` times the explicit bound in :func:`error_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ckfrac.errors import DomainError, MissingDerivativeError
from ckfrac.operators import (
    DEFAULT_QUAD,
    Func1,
    Interval,
    OrderParams,
    QuadSpec,
    Side,
    gauss_panels,
)
from ckfrac.specfun import Mode, coeff_seq, gamma

#: below this value of t^rho - a^rho the moment sum is replaced by its limit 0
SPAN_EPS = 1e-10
#: grid size for the sampled maximum M(t)
M_GRID = 64


@dataclass(frozen=True)
class DecompCoeffs:
    """``A_N`` and ``B_{N,1..N}`` for one truncation order."""

    N: int
    mode: Mode
    A: float
    B: np.ndarray = field(repr=False)
    alpha: float
    rho: float
    c: np.ndarray = field(repr=False)


def decomp_coeffs(p: OrderParams, N: int, mode: Mode | str = Mode.DERIVATIVE) -> DecompCoeffs:
    mode = Mode(mode)
    seq = coeff_seq(p.alpha, N, mode)
    c = seq.c
    k = np.arange(1, N + 1)
    if mode is Mode.DERIVATIVE:
        lead = 1.0 / gamma(2.0 - p.alpha)
        A = lead * p.rho ** (p.alpha - 1.0) * math.fsum(c)
        B = lead * p.rho**p.alpha * c[1:] * k
    else:
        lead = 1.0 / gamma(1.0 + p.alpha)
        A = lead * p.rho ** (-p.alpha) * math.fsum(c)
        B = lead * p.rho ** (1.0 - p.alpha) * c[1:] * k
    return DecompCoeffs(N=N, mode=mode, A=A, B=B, alpha=p.alpha, rho=p.rho, c=c)


def _frame(p: OrderParams, iv: Interval, t: float, side: Side) -> tuple[float, float]:
    if side is Side.LEFT:
        base = iv.a**p.rho
        return base, max(t**p.rho - base, 0.0)
    base = iv.b**p.rho
    return base, max(base - t**p.rho, 0.0)


def scaled_moments(
    xprime: Callable[[np.ndarray], np.ndarray],
    p: OrderParams,
    iv: Interval,
    t: float,
    N: int,
    side: Side | str = Side.LEFT,
    q: QuadSpec = DEFAULT_QUAD,
) -> np.ndarray:
    """``V_k(t) / S^k`` for ``k = 1..N`` where ``S`` is the span in ``tau^rho``.

    Scaling by ``S^k`` keeps every entry of order ``|x'|`` for any ``N``, so
    high orders neither overflow nor underflow near the base point.
    """
    side = Side(side)
    base, span = _frame(p, iv, t, side)
    if span == 0.0:
        return np.zeros(N)
    u, w = gauss_panels(q.nodes_per_panel, q.panels)
    sign = 1.0 if side is Side.LEFT else -1.0
    tau = np.maximum(base + sign * span * u, 0.0) ** (1.0 / p.rho)
    # |dtau| = S du tau^(1-rho) / rho on either side
    g = xprime(tau) * tau ** (1.0 - p.rho) / p.rho * w
    powers = u[None, :] ** np.arange(N)[:, None]
    return powers @ g


def moments(
    xprime: Callable[[np.ndarray], np.ndarray],
    p: OrderParams,
    iv: Interval,
    t: float,
    N: int,
    side: Side | str = Side.LEFT,
    q: QuadSpec = DEFAULT_QUAD,
) -> np.ndarray:
    """``V_1(t) .. V_N(t)`` (left) or ``W_1(t) .. W_N(t)`` (right)."""
    side = Side(side)
    if not iv.contains(t):
        raise DomainError(f"t = {t} outside [{iv.a}, {iv.b}]")
    _, span = _frame(p, iv, t, side)
    scaled = scaled_moments(xprime, p, iv, t, N, side, q)
    return scaled * span ** np.arange(1, N + 1)


def sampled_M(x: Func1, p: OrderParams, lo: float, hi: float) -> float:
    """Maximum of ``|d/dtau (tau^(1-rho) x'(tau))|`` sampled on ``[lo, hi]``.

    Uses ``x.deriv2`` when present, otherwise a central difference of
    ``tau^(1-rho) x'(tau)``. A sampled maximum, not a certified bound.
    """
    if x.deriv1 is None:
        raise MissingDerivativeError("the error bound needs x.deriv1")
    if hi <= lo:
        return 0.0
    tau = np.linspace(lo, hi, M_GRID)
    if x.deriv2 is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = (1.0 - p.rho) * tau ** (-p.rho) * x.deriv1(tau) + tau ** (1.0 - p.rho) * x.deriv2(tau)
    else:
        h = 1e-5 * (hi - lo)
        pts = np.clip(tau, lo + h, hi - h)
        g = lambda s: s ** (1.0 - p.rho) * x.deriv1(s)  # noqa: E731
        vals = (g(pts + h) - g(pts - h)) / (2.0 * h)
    vals = np.abs(vals)
    if np.any(np.isnan(vals)):
        return math.inf
    return float(np.max(vals))


def error_bound(
    Mt: float,
    p: OrderParams,
    iv: Interval,
    t: float,
    N: int,
    mode: Mode | str = Mode.DERIVATIVE,
    side: Side | str = Side.LEFT,
) -> float:
    """Truncation-error bound of the order-``N`` expansion at ``t``.

    Derivative mode bounds the error of :func:`approx_derivative` given
    ``Mt = max |d/dtau (tau^(1-rho) x'(tau))|``; solution mode bounds the
    remainder of the integral-form expansion given ``Mt = max |d/dtau f(tau, x(tau))|``.
    """
    if Mt < 0.0:
        raise DomainError("Mt must be non-negative")
    mode, side = Mode(mode), Side(side)
    a, alpha, rho = iv.a, p.alpha, p.rho
    _, span = _frame(p, iv, t, side)
    dist = (t - a) if side is Side.LEFT else (iv.b - t)
    if Mt == 0.0 or dist <= 0.0:
        return 0.0
    if mode is Mode.DERIVATIVE:
        e = math.exp((1.0 - alpha) ** 2 + 1.0 - alpha)
        return Mt * e * rho ** (alpha - 1.0) / (N ** (1.0 - alpha) * (1.0 - alpha) * gamma(2.0 - alpha)) * span ** (1.0 - alpha) * dist
    e = math.exp(alpha**2 + alpha)
    return Mt * e * rho ** (-alpha) / (alpha * N**alpha * gamma(1.0 + alpha)) * span**alpha * dist


@dataclass(frozen=True)
class Approximation:
    value: float
    bound: float


def approx_derivative(
    x: Func1,
    p: OrderParams,
    iv: Interval,
    t: float,
    N: int,
    side: Side | str = Side.LEFT,
    q: QuadSpec = DEFAULT_QUAD,
    Mt: float | None = None,
) -> Approximation:
    """Order-``N`` truncated expansion of the CK derivative at ``t``.

    ``bound`` is :func:`error_bound` with ``M(t)`` sampled over the integration
    range (from ``x.deriv2``, or finite differences when absent) unless ``Mt``
    is given.
    """
    if x.deriv1 is None:
        raise MissingDerivativeError("approx_derivative needs x.deriv1")
    side = Side(side)
    t = float(t)
    if not iv.contains(t):
        raise DomainError(f"t = {t} outside [{iv.a}, {iv.b}]")
    co = decomp_coeffs(p, N, Mode.DERIVATIVE)
    _, span = _frame(p, iv, t, side)
    if span < SPAN_EPS:
        return Approximation(0.0, 0.0)

    lead = span ** (1.0 - p.alpha)
    local = co.A * lead * t ** (1.0 - p.rho) * float(x.deriv1(np.asarray(t)))
    # B_k S^(1-alpha-k) V_k = B_k S^(1-alpha) (V_k / S^k)
    tail = lead * float(co.B @ scaled_moments(x.deriv1, p, iv, t, N, side, q))
    value = local - tail if side is Side.LEFT else tail - local

    if Mt is None:
        lo, hi = (iv.a, t) if side is Side.LEFT else (t, iv.b)
        Mt = sampled_M(x, p, lo, hi)
    return Approximation(value=value, bound=error_bound(Mt, p, iv, t, N, Mode.DERIVATIVE, side))
