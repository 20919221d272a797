"""Special functions and the Gamma-ratio coefficient sequences.

Everything here works in 64-bit floats. The coefficient sequences are built by
their three-term recurrences so that no Gamma value at a negative argument is
ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ckfrac.errors import ConvergenceError, DomainError


class Mode(str, Enum):
    """Which of the two binomial expansions a coefficient set belongs to."""

    DERIVATIVE = "derivative"
    SOLUTION = "solution"


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-14
    max_terms: int = 500

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1): {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be positive: {self.max_terms}")


@dataclass(frozen=True)
class CoeffSeq:
    """Coefficients ``c_0 .. c_N`` of a truncated binomial series.

    In derivative mode ``c_k = Gamma(k - 1 + alpha) / (Gamma(alpha - 1) k!)``,
    the coefficients of ``(1 - u)^(1 - alpha)``. In solution mode
    ``c_k = Gamma(k - alpha) / (Gamma(-alpha) k!)``, those of ``(1 - u)^alpha``.
    """

    alpha: float
    mode: Mode
    c: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.c) - 1


def gamma(x: float) -> float:
    """Gamma function for real ``x``.

    Raises :class:`DomainError` at the poles ``0, -1, -2, ...`` and
    :class:`OverflowError` when the result is not representable.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma needs a finite argument, got {x}")
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma has a pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise OverflowError(f"gamma({x}) overflows double precision") from None


def beta(p: float, q: float) -> float:
    if p <= 0.0 or q <= 0.0:
        raise DomainError(f"beta needs p > 0 and q > 0, got ({p}, {q})")
    if p + q < 170.0:
        return gamma(p) * gamma(q) / gamma(p + q)
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"order alpha must lie in (0, 1), got {alpha}")


def coeff_seq(alpha: float, N: int, mode: Mode | str = Mode.DERIVATIVE) -> CoeffSeq:
    """Build ``c_0 .. c_N`` by recurrence.

    Examples
    --------
    >>> coeff_seq(0.5, 2, "derivative").c.tolist()
    [1.0, -0.5, -0.125]
    """
    _check_alpha(alpha)
    if N < 1:
        raise DomainError(f"truncation order must be >= 1, got {N}")
    mode = Mode(mode)
    # derivative: c_k = c_{k-1} (k - 2 + alpha) / k ; solution: (k - 1 - alpha) / k
    shift = alpha - 2.0 if mode is Mode.DERIVATIVE else -1.0 - alpha
    c = np.empty(N + 1)
    c[0] = 1.0
    for k in range(1, N + 1):
        c[k] = c[k - 1] * (k + shift) / k
    return CoeffSeq(alpha=alpha, mode=mode, c=c)


def solution_partial_sum_magnitude(alpha: float, N: int) -> float:
    """Closed form of ``|sum_{k<=N} c_k|`` for the solution-mode sequence.

    Equals ``Gamma(N + 1 - alpha) / (alpha Gamma(N + 1) |Gamma(-alpha)|)``;
    written with ``alpha |Gamma(-alpha)| = Gamma(1 - alpha)`` and log-Gamma so
    that large ``N`` does not overflow.
    """
    _check_alpha(alpha)
    return math.exp(math.lgamma(N + 1 - alpha) - math.lgamma(N + 1) - math.lgamma(1 - alpha))


def mittag_leffler(
    mu: float, beta: float, x: float, ctl: SeriesControl | None = None
) -> float:
    """Two-parameter Mittag-Leffler function by direct power series.

    Summation stops once two consecutive terms are both below
    ``ctl.rel_tol`` times the running sum in magnitude. Meant for moderate
    arguments (``|x|`` up to a few tens); strongly negative arguments lose
    accuracy to cancellation.
    """
    if mu <= 0.0 or beta <= 0.0:
        raise DomainError(f"mittag_leffler needs mu > 0 and beta > 0, got ({mu}, {beta})")
    ctl = ctl or SeriesControl()
    x = float(x)
    total = 1.0 / gamma(beta) if beta < 170.0 else 0.0
    if x == 0.0:
        return total

    logx = math.log(abs(x))
    negative = x < 0.0
    terms = [total]
    small_run = 0
    for k in range(1, ctl.max_terms):
        arg = mu * k + beta
        if arg < 170.0 and abs(k * logx) < 700.0:
            term = x**k / math.gamma(arg)
        else:
            term = math.exp(k * logx - math.lgamma(arg))
            if negative and k % 2 == 1:
                term = -term
        terms.append(term)
        total += term
        if abs(term) <= ctl.rel_tol * abs(total):
            small_run += 1
            if small_run == 2:
                return math.fsum(terms)
        else:
            small_run = 0
    raise ConvergenceError(
        f"Mittag-Leffler series E_{{{mu},{beta}}}({x}) did not settle in "
        f"{ctl.max_terms} terms"
    )


def mittag_leffler_array(mu: float, beta: float, x, ctl: SeriesControl | None = None) -> np.ndarray:
    """Elementwise :func:`mittag_leffler` over an array of arguments."""
    x = np.asarray(x, dtype=float)
    out = np.array([mittag_leffler(mu, beta, v, ctl) for v in x.ravel()])
    return out.reshape(x.shape)
