"""Katugampola fractional integrals and Caputo-Katugampola derivatives.

All operators are evaluated in the scaled variable ``u = (tau^rho - a^rho) /
(t^rho - a^rho)`` (left side) or its mirror image (right side). In that
variable every kernel becomes ``(1 - u)^(kappa - 1)`` times a function that is
smooth whenever ``x`` is smooth in ``t^rho``; the remaining endpoint
singularity is removed exactly by ``w = (1 - u)^kappa`` before composite
Gauss-Legendre quadrature is applied.

Callbacks inside :class:`Func1` must accept and return numpy arrays of any
shape (elementwise evaluation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from ckfrac.errors import DomainError, MissingDerivativeError, QuadratureError
from ckfrac.specfun import gamma, mittag_leffler_array

ArrayFn = Callable[[np.ndarray], np.ndarray]

#: relative tolerance of the panels-vs-2*panels consistency check
QUAD_REL_TOL = 1e-6
#: distance (relative to b - a) below which the derivative is set to its limit 0
ENDPOINT_EPS = 1e-12


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class OrderParams:
    """Fractional order ``alpha`` in (0, 1) and scale exponent ``rho > 0``."""

    alpha: float
    rho: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.rho > 0.0 or not math.isfinite(self.rho):
            raise DomainError(f"rho must be positive and finite, got {self.rho}")


@dataclass(frozen=True)
class Interval:
    """Working interval ``[a, b]`` with ``0 <= a < b < inf``.

    ``a = 0`` is admitted: for ``rho < 1`` the weight ``tau^(rho - 1)`` is
    singular there, but it is absorbed by the change to the ``tau^rho``
    variable.
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.a < self.b < math.inf):
            raise DomainError(f"need 0 <= a < b < inf, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        slack = 1e-14 * max(1.0, abs(self.b))
        return bool(np.all((t >= self.a - slack) & (t <= self.b + slack)))


@dataclass(frozen=True)
class Func1:
    """A real function on ``[a, b]`` with optional first and second derivatives."""

    value: ArrayFn
    deriv1: ArrayFn | None = None
    deriv2: ArrayFn | None = None

    def __call__(self, t):
        return self.value(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class QuadSpec:
    """Composite Gauss-Legendre layout.

    ``lower_exponent`` declares that the integrand behaves like
    ``u**lower_exponent`` at the lower end of the scaled variable (``u = 0``,
    i.e. at ``a`` for left operators). When it is non-zero a Gauss-Jacobi rule
    with ``nodes_per_panel * panels`` nodes that carries both endpoint factors
    exactly replaces the composite rule. Derivatives of Katugampola integrals of
    functions with ``x(a) != 0`` need ``lower_exponent = alpha - 1``.
    """

    nodes_per_panel: int = 16
    panels: int = 8
    lower_exponent: float = 0.0
    check: bool = True

    def __post_init__(self) -> None:
        if self.nodes_per_panel < 2 or self.panels < 1:
            raise ValueError("need nodes_per_panel >= 2 and panels >= 1")
        if self.lower_exponent <= -1.0:
            raise ValueError("lower_exponent must exceed -1 for an integrable singularity")


DEFAULT_QUAD = QuadSpec()


# ----------------------------------------------------------------------------
# quadrature core


@lru_cache(maxsize=64)
def gauss_panels(n: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite ``n``-point Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@lru_cache(maxsize=64)
def _singular_rule(kappa: float, n: int, panels: int, lower: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``u_i`` and weights ``W_i`` with ``sum W_i g(u_i)`` approximating
    ``int_0^1 (1 - u)^(kappa - 1) g(u) du`` when ``g(u) / u^lower`` is smooth."""
    if lower == 0.0:
        x, w = gauss_panels(n, panels)
        # w = (1 - u)^kappa maps [0, 1] onto [0, 1] and cancels the weight
        return 1.0 - x ** (1.0 / kappa), w / kappa
    # Jacobi weight (1 - z)^A (1 + z)^B on [-1, 1] with u = (1 + z) / 2
    with np.errstate(invalid="ignore", divide="ignore"):
        # scipy divides 0/0 in an unused recurrence entry when A + B = -1
        z, wz = roots_jacobi(n * panels, kappa - 1.0, lower)
    u = 0.5 * (1.0 + z)
    w = wz * 0.5 ** (kappa + lower) / u**lower
    return u, w


def _checked_sum(integrand: Callable[[np.ndarray], np.ndarray], kappa: float, q: QuadSpec, what: str) -> np.ndarray:
    """Evaluate ``int_0^1 (1-u)^(kappa-1) g(u) du`` for a batch.

    ``integrand(u)`` receives ``u`` of shape ``(m,)`` and returns ``(nt, m)``.
    Returns shape ``(nt,)``.
    """
    u_f, w_f = _singular_rule(kappa, q.nodes_per_panel, 2 * q.panels, q.lower_exponent)
    g_f = integrand(u_f)
    fine = g_f @ w_f
    if not q.check:
        return fine
    u_c, w_c = _singular_rule(kappa, q.nodes_per_panel, q.panels, q.lower_exponent)
    coarse = integrand(u_c) @ w_c
    scale = np.maximum(np.abs(g_f) @ np.abs(w_f), np.abs(fine))
    bad = np.abs(fine - coarse) > QUAD_REL_TOL * scale + 1e-300
    if np.any(~np.isfinite(fine)) or np.any(bad):
        idx = int(np.argmax(np.abs(fine - coarse) - QUAD_REL_TOL * scale))
        raise QuadratureError(
            f"{what}: panel-doubling estimate {abs(fine[idx] - coarse[idx]):.3e} "
            f"exceeds {QUAD_REL_TOL:g} relative (value {fine[idx]:.6e})"
        )
    return fine


def _scaled_frame(p: OrderParams, iv: Interval, t: np.ndarray, side: Side):
    """Base point ``c`` of ``tau^rho``, signed direction and span ``S >= 0``."""
    if side is Side.LEFT:
        base = iv.a**p.rho
        span = t**p.rho - base
        return base, 1.0, np.maximum(span, 0.0)
    base = iv.b**p.rho
    span = base - t**p.rho
    return base, -1.0, np.maximum(span, 0.0)


def _tau(base: float, sign: float, span: np.ndarray, u: np.ndarray, rho: float) -> np.ndarray:
    s = base + sign * span[:, None] * u[None, :]
    return np.maximum(s, 0.0) ** (1.0 / rho)


def _as_batch(t, iv: Interval) -> tuple[np.ndarray, tuple]:
    arr = np.asarray(t, dtype=float)
    if not iv.contains(arr):
        raise DomainError(f"evaluation point outside [{iv.a}, {iv.b}]")
    return np.clip(arr.ravel(), iv.a, iv.b), arr.shape


def _finish(values: np.ndarray, shape: tuple):
    out = values.reshape(shape)
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# operators


def katugampola_integral(
    x: Func1 | ArrayFn,
    p: OrderParams,
    iv: Interval,
    t,
    side: Side | str = Side.LEFT,
    q: QuadSpec = DEFAULT_QUAD,
):
    """Left or right Katugampola fractional integral of order ``p.alpha``.

    ``t`` may be a scalar or an array; the result has the same shape. The
    value at ``t = a`` (left) or ``t = b`` (right) is exactly zero.
    """
    side = Side(side)
    fn = x.value if isinstance(x, Func1) else x
    tt, shape = _as_batch(t, iv)
    base, sign, span = _scaled_frame(p, iv, tt, side)
    out = np.zeros_like(tt)
    live = span > 0.0
    if np.any(live):
        sp = span[live]

        def integrand(u):
            return fn(_tau(base, sign, sp, u, p.rho))

        integral = _checked_sum(integrand, p.alpha, q, "katugampola_integral")
        out[live] = p.rho ** (-p.alpha) / gamma(p.alpha) * sp**p.alpha * integral
    return _finish(out, shape)


def ck_derivative(
    x: Func1,
    p: OrderParams,
    iv: Interval,
    t,
    side: Side | str = Side.LEFT,
    q: QuadSpec = DEFAULT_QUAD,
):
    """Caputo-Katugampola derivative of a ``C^1`` function.

    Evaluated through the first-derivative form, which for the left side reads
    ``rho^alpha / Gamma(1 - alpha) * int_a^t (t^rho - tau^rho)^(-alpha) x'(tau) dtau``.
    Returns exactly zero at the base point of the operator.
    """
    if x.deriv1 is None:
        raise MissingDerivativeError("ck_derivative needs x.deriv1")
    side = Side(side)
    tt, shape = _as_batch(t, iv)
    base, sign, span = _scaled_frame(p, iv, tt, side)
    dist = tt - iv.a if side is Side.LEFT else iv.b - tt
    out = np.zeros_like(tt)
    live = (dist >= ENDPOINT_EPS * iv.length) & (span > 0.0)
    if np.any(live):
        sp = span[live]
        d1 = x.deriv1

        def integrand(u):
            tau = _tau(base, sign, sp, u, p.rho)
            return d1(tau) * tau ** (1.0 - p.rho)

        integral = _checked_sum(integrand, 1.0 - p.alpha, q, "ck_derivative")
        lead = p.rho ** (p.alpha - 1.0) / gamma(1.0 - p.alpha)
        if side is Side.RIGHT:
            lead = -lead
        out[live] = lead * sp ** (1.0 - p.alpha) * integral
    return _finish(out, shape)


def integral_as_func1(x: Func1, p: OrderParams, iv: Interval, q: QuadSpec = DEFAULT_QUAD) -> Func1:
    """The left Katugampola integral ``y = I x`` packaged with its derivative.

    ``y'`` is obtained by differentiating the scaled integral form analytically,
    ``dy/dS = rho^-alpha / Gamma(alpha) * (S^(alpha-1) x(a) + int_0^S r^(alpha-1) X'(S - r) dr)``
    with ``S = t^rho - a^rho`` and ``X(s) = x((a^rho + s)^(1/rho))``, so no finite
    differences are involved. Needs ``x.deriv1``.
    """
    if x.deriv1 is None:
        raise MissingDerivativeError("integral_as_func1 needs x.deriv1")
    alpha, rho = p.alpha, p.rho
    xa = float(x(iv.a))
    d1 = x.deriv1

    def value(t):
        return katugampola_integral(x, p, iv, t, Side.LEFT, q)

    def deriv1(t):
        tt, shape = _as_batch(t, iv)
        span = np.maximum(tt**rho - iv.a**rho, 0.0)
        out = np.full_like(tt, np.inf if xa != 0.0 else 0.0)
        live = span > 0.0
        if np.any(live):
            sp = span[live]

            def integrand(u):
                tau = _tau(iv.a**rho, 1.0, sp, u, rho)
                return d1(tau) * tau ** (1.0 - rho) / rho

            smooth = _checked_sum(integrand, alpha, q, "integral_as_func1")
            dyds = (sp ** (alpha - 1.0) * xa + sp**alpha * smooth) / gamma(alpha) * rho ** (-alpha)
            out[live] = dyds * rho * tt[live] ** (rho - 1.0)
        return _finish(out, shape)

    return Func1(value=value, deriv1=deriv1)


def derivative_as_func1(x: Func1, p: OrderParams, iv: Interval, q: QuadSpec = DEFAULT_QUAD) -> Func1:
    """The left CK derivative of ``x`` as an evaluable function of ``t``."""
    return Func1(value=lambda t: ck_derivative(x, p, iv, t, Side.LEFT, q))


# ----------------------------------------------------------------------------
# closed forms


def power_closed_form(
    v: float,
    p: OrderParams,
    iv: Interval,
    t,
    side: Side | str = Side.LEFT,
    normalized: bool = True,
):
    """CK derivative of a power of ``t^rho - a^rho`` (or ``b^rho - t^rho``).

    With ``normalized=True`` the function is ``((t^rho - a^rho) / rho)^v`` and
    the result ``rho^(alpha - v) Gamma(1 + v) / Gamma(1 - alpha + v) (t^rho - a^rho)^(v - alpha)``.
    With ``normalized=False`` the function is ``(t^rho - a^rho)^v`` itself, which
    only rescales the result by ``rho^v``.
    """
    if v <= 0.0:
        raise DomainError(f"power exponent must be positive, got {v}")
    side = Side(side)
    tt = np.asarray(t, dtype=float)
    if side is Side.LEFT:
        span = np.maximum(tt**p.rho - iv.a**p.rho, 0.0)
    else:
        span = np.maximum(iv.b**p.rho - tt**p.rho, 0.0)
    lead = p.rho ** (p.alpha - v) if normalized else p.rho**p.alpha
    out = lead * gamma(1.0 + v) / gamma(1.0 - p.alpha + v) * span ** (v - p.alpha)
    return float(out) if np.ndim(out) == 0 else out


def power_integral_closed_form(v: float, p: OrderParams, iv: Interval, t, side: Side | str = Side.LEFT):
    """Katugampola integral of ``(t^rho - a^rho)^v`` (left) or ``(b^rho - t^rho)^v``
    (right): ``rho^-alpha Gamma(1 + v) / Gamma(1 + alpha + v) S^(v + alpha)``."""
    if v <= -1.0:
        raise DomainError(f"power exponent must exceed -1, got {v}")
    side = Side(side)
    tt = np.asarray(t, dtype=float)
    if side is Side.LEFT:
        span = np.maximum(tt**p.rho - iv.a**p.rho, 0.0)
    else:
        span = np.maximum(iv.b**p.rho - tt**p.rho, 0.0)
    out = p.rho ** (-p.alpha) * gamma(1.0 + v) / gamma(1.0 + p.alpha + v) * span ** (v + p.alpha)
    return float(out) if np.ndim(out) == 0 else out


def ml_closed_form(
    mu: float,
    beta: float,
    lam: float,
    p: OrderParams,
    iv: Interval,
    t,
    side: Side | str = Side.LEFT,
):
    """CK derivative of ``S^(beta-1) E_{mu,beta}(lam S^mu)`` with ``S = t^rho - a^rho``
    (left) or ``S = b^rho - t^rho`` (right).

    Only ``beta >= 1`` is covered; the ``beta = 1`` case uses the shifted series
    because the constant term is annihilated.
    """
    if mu <= 0.0:
        raise DomainError(f"mu must be positive, got {mu}")
    if beta < 1.0:
        raise DomainError(f"closed form needs beta >= 1, got {beta}")
    side = Side(side)
    tt = np.asarray(t, dtype=float)
    if side is Side.LEFT:
        span = np.maximum(tt**p.rho - iv.a**p.rho, 0.0)
    else:
        span = np.maximum(iv.b**p.rho - tt**p.rho, 0.0)
    arg = lam * span**mu
    if beta > 1.0:
        out = p.rho**p.alpha * span ** (beta - p.alpha - 1.0) * mittag_leffler_array(mu, beta - p.alpha, arg)
    else:
        out = lam * p.rho**p.alpha * span ** (mu - p.alpha) * mittag_leffler_array(mu, mu - p.alpha + 1.0, arg)
    return float(out) if np.ndim(out) == 0 else out


# ----------------------------------------------------------------------------
# operator-norm constants


def integral_norm_constant(p: OrderParams, iv: Interval) -> float:
    """Bound ``K`` with ``||I x||_C <= K ||x||_C`` on ``C([a, b])``."""
    span = iv.b**p.rho - iv.a**p.rho
    return p.rho ** (-p.alpha) * span**p.alpha / gamma(p.alpha + 1.0)


def derivative_norm_constant(p: OrderParams, iv: Interval) -> float:
    """Bound ``M`` with ``||D x||_C <= M ||x||_{C^1}``.

    Undefined for ``a = 0`` with ``rho > 1`` because ``a^(1 - rho)`` diverges.
    """
    if iv.a == 0.0 and p.rho > 1.0:
        raise DomainError("derivative_norm_constant: a = 0 with rho > 1 makes a^(1-rho) infinite")
    span = iv.b**p.rho - iv.a**p.rho
    ends = max(iv.a ** (1.0 - p.rho), iv.b ** (1.0 - p.rho))
    return p.rho ** (p.alpha - 1.0) * span ** (1.0 - p.alpha) / gamma(2.0 - p.alpha) * ends
