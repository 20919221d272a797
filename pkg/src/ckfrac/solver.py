"""Solvers for the Caputo-Katugampola Cauchy problem

    D^{alpha,rho}_{a+} x(t) = f(t, x(t)),   x(a) = x_a,

through its equivalent Volterra equation of the second kind

    x(t) = x_a + rho^(1-alpha) / Gamma(alpha) * int_a^t tau^(rho-1) (t^rho - tau^rho)^(alpha-1) f(tau, x(tau)) dtau.

Three independent routes are provided:

* :func:`solve_picard` - successive approximations on a chain of subintervals,
  each short enough for the integral operator to contract;
* :func:`solve_decomposition` - the expansion of the derivative into ``x'`` and
  ``N`` moment functions, integrated as a system of ``N + 1`` ODEs;
* :func:`solve_reference` - a step-by-step product-integration scheme used as
  an oracle.

In the variable ``s = t^rho - a^rho`` the kernel is ``rho^-alpha / Gamma(alpha)
(S - s)^(alpha - 1)``, so the integral solvers work on ``s`` throughout.
``f`` must accept numpy arrays as well as scalars.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ckfrac.decomposition import decomp_coeffs
from ckfrac.errors import ConvergenceError, DomainError, SolverError
from ckfrac.operators import Interval, OrderParams
from ckfrac.specfun import Mode, gamma

log = logging.getLogger(__name__)

RHS = Callable[[np.ndarray, np.ndarray], np.ndarray]

#: refuse to build more subintervals than this in the Picard chain
MAX_SUBINTERVALS = 100_000


@dataclass(frozen=True)
class CauchyProblem:
    """Right-hand side ``f(t, x)``, order parameters, interval and initial value.

    ``L`` is the Lipschitz constant of ``f`` in ``x``; it is taken as given and
    never estimated.
    """

    f: RHS
    p: OrderParams
    iv: Interval
    x_a: float
    L: float

    def __post_init__(self) -> None:
        if not self.L > 0.0:
            raise DomainError(f"Lipschitz constant must be positive, got {self.L}")


@dataclass
class SolutionGrid:
    t: np.ndarray
    x: np.ndarray
    exact: np.ndarray | None = None
    abs_err: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def with_exact(self, exact: Callable[[np.ndarray], np.ndarray]) -> SolutionGrid:
        ex = np.asarray(exact(self.t), dtype=float)
        return replace(self, exact=ex, abs_err=np.abs(self.x - ex))

    def restrict(self, upper: float) -> SolutionGrid:
        """Sub-grid with ``t <= upper``."""
        keep = self.t <= upper * (1.0 + 1e-14)
        pick = lambda v: None if v is None else v[keep]  # noqa: E731
        return SolutionGrid(self.t[keep], self.x[keep], pick(self.exact), pick(self.abs_err), self.info)


@dataclass(frozen=True)
class PicardConfig:
    contraction_target: float = 0.5
    tol: float = 1e-10
    max_iter: int = 200
    grid_per_subinterval: int = 256

    def __post_init__(self) -> None:
        if not 0.0 < self.contraction_target < 1.0:
            raise ValueError("contraction_target must lie in (0, 1)")
        if self.grid_per_subinterval < 1 or self.max_iter < 1:
            raise ValueError("grid_per_subinterval and max_iter must be positive")


@dataclass(frozen=True)
class DecompSolveConfig:
    """Truncation order, output step and start offset of the ODE route.

    ``delta_start`` defaults to ``1e-6 * (b - a)``.
    """

    N: int = 15
    step: float = 1e-3
    delta_start: float | None = None

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not self.step > 0.0:
            raise ValueError("step must be positive")

    def delta_for(self, iv: Interval) -> float:
        delta = 1e-6 * iv.length if self.delta_start is None else self.delta_start
        if not 0.0 < delta < min(self.step, iv.length):
            raise ValueError(f"need 0 < delta_start < step, got {delta}")
        return delta


# ----------------------------------------------------------------------------
# product integration in s = t^rho - a^rho


def pw_linear_weights(nodes: np.ndarray, S: float, alpha: float) -> np.ndarray:
    """Weights ``w`` with ``int_{nodes[0]}^{nodes[-1]} (S - s)^(alpha-1) phi(s) ds = w @ phi(nodes)``
    for ``phi`` piecewise linear on ``nodes`` and ``S >= nodes[-1]``."""
    n = len(nodes)
    w = np.zeros(n)
    if n < 2:
        return w
    left, right = nodes[:-1], nodes[1:]
    h = right - left
    A = S - left
    B = np.maximum(S - right, 0.0)
    I0 = (A**alpha - B**alpha) / alpha
    I1 = (A ** (alpha + 1.0) - B ** (alpha + 1.0)) / (alpha + 1.0)
    w[:-1] += (I1 - B * I0) / h
    w[1:] += (A * I0 - I1) / h
    return w


def _s_of_t(p: OrderParams, iv: Interval, t) -> np.ndarray:
    return np.maximum(np.asarray(t, dtype=float) ** p.rho - iv.a**p.rho, 0.0)


def _t_of_s(p: OrderParams, iv: Interval, s) -> np.ndarray:
    return (iv.a**p.rho + np.asarray(s, dtype=float)) ** (1.0 / p.rho)


def volterra_evaluate(prob: CauchyProblem, s_nodes: np.ndarray, F: np.ndarray, t_query) -> np.ndarray:
    """Nystrom interpolation: evaluate the right-hand side of the Volterra
    equation at arbitrary ``t`` from values ``F = f(t_j, x_j)`` on ``s_nodes``."""
    p = prob.p
    c = p.rho ** (-p.alpha) / gamma(p.alpha)
    tq = np.atleast_1d(np.asarray(t_query, dtype=float))
    Sq = _s_of_t(p, prob.iv, tq)
    out = np.empty_like(tq)
    for i, S in enumerate(Sq):
        j = int(np.searchsorted(s_nodes, S, side="right"))
        if j >= len(s_nodes):
            nodes, vals = s_nodes, F
        elif S == s_nodes[j - 1]:
            nodes, vals = s_nodes[:j], F[:j]
        else:
            # partial last interval: F linear between s_{j-1} and s_j
            lam = (S - s_nodes[j - 1]) / (s_nodes[j] - s_nodes[j - 1])
            nodes = np.append(s_nodes[:j], S)
            vals = np.append(F[:j], F[j - 1] + lam * (F[j] - F[j - 1]))
        out[i] = prob.x_a + c * pw_linear_weights(nodes, S, p.alpha) @ vals
    return out


# ----------------------------------------------------------------------------
# Picard iteration


def subinterval_width(prob: CauchyProblem, target: float) -> float:
    """Largest increment ``Delta s`` of ``t^rho`` with
    ``L rho^-alpha Delta s^alpha / Gamma(alpha + 1) <= target``."""
    p = prob.p
    return (target * gamma(p.alpha + 1.0) * p.rho**p.alpha / prob.L) ** (1.0 / p.alpha)


def contraction_constant(prob: CauchyProblem, t0: float, t1: float) -> float:
    p = prob.p
    return prob.L * p.rho ** (-p.alpha) * (t1**p.rho - t0**p.rho) ** p.alpha / gamma(p.alpha + 1.0)


def solve_picard(prob: CauchyProblem, cfg: PicardConfig = PicardConfig(), t_out=None) -> SolutionGrid:
    """Successive approximations on a chain of contracting subintervals.

    The ``t^rho`` range is cut into pieces on which the integral operator has
    Lipschitz constant at most ``cfg.contraction_target``. On each piece the
    iterates live on a uniform grid in ``t^rho`` (piecewise-linear between
    nodes); the contribution of earlier pieces is frozen history. Iteration
    stops when successive iterates differ by at most ``cfg.tol``.

    With ``t_out`` the converged solution is sampled there by Nystrom
    interpolation instead of returning the native grid.
    """
    p, iv = prob.p, prob.iv
    alpha = p.alpha
    c = p.rho ** (-alpha) / gamma(alpha)
    s_end = float(_s_of_t(p, iv, iv.b))
    width = subinterval_width(prob, cfg.contraction_target)
    n_sub = math.ceil(s_end / width * (1.0 - 1e-12)) if width > 0.0 else math.inf
    if not n_sub <= MAX_SUBINTERVALS:
        raise ConvergenceError(
            f"contraction needs {n_sub} subintervals (L = {prob.L}); refusing beyond {MAX_SUBINTERVALS}"
        )
    n_sub = max(n_sub, 1)
    edges = np.minimum(np.arange(n_sub + 1) * width, s_end)
    edges[-1] = s_end

    m = cfg.grid_per_subinterval
    s_all = np.zeros(1)
    x_all = np.array([float(prob.x_a)])
    F_all = np.atleast_1d(np.asarray(prob.f(_t_of_s(p, iv, 0.0), prob.x_a), dtype=float))
    records = []
    max_resid = 0.0

    for k in range(n_sub):
        s_loc = np.linspace(edges[k], edges[k + 1], m + 1)
        t_loc = _t_of_s(p, iv, s_loc)
        n_prev = len(s_all)
        nodes = np.concatenate([s_all, s_loc[1:]])
        # history over [a, t_{k-1}] and local weights over [t_{k-1}, t] for each new node
        hist = np.empty(m)
        W_loc = np.zeros((m, m + 1))
        for i in range(1, m + 1):
            S = s_loc[i]
            w = pw_linear_weights(nodes[: n_prev + i], S, alpha)
            hist[i - 1] = w[: n_prev - 1] @ F_all[:-1] if n_prev > 1 else 0.0
            W_loc[i - 1, : i + 1] = w[n_prev - 1 :]
        hist = prob.x_a + c * hist
        W_loc *= c

        x_loc = np.full(m + 1, x_all[-1])
        F0 = F_all[-1]
        for it in range(1, cfg.max_iter + 1):
            F_loc = np.asarray(prob.f(t_loc, x_loc), dtype=float)
            F_loc[0] = F0
            x_new = np.empty_like(x_loc)
            x_new[0] = x_loc[0]
            x_new[1:] = hist + W_loc @ F_loc
            diff = float(np.max(np.abs(x_new - x_loc)))
            x_loc = x_new
            if not np.all(np.isfinite(x_loc)):
                raise SolverError(f"Picard iterates became non-finite on subinterval {k}")
            if diff <= cfg.tol:
                break
        else:
            raise ConvergenceError(
                f"Picard iteration on subinterval {k} did not reach tol {cfg.tol:g} in {cfg.max_iter} iterations"
            )
        F_loc = np.asarray(prob.f(t_loc, x_loc), dtype=float)
        F_loc[0] = F0
        resid = float(np.max(np.abs(x_loc[1:] - hist - W_loc @ F_loc)))
        max_resid = max(max_resid, resid)
        records.append(
            {
                "t_start": float(t_loc[0]),
                "t_end": float(t_loc[-1]),
                "contraction": contraction_constant(prob, float(t_loc[0]), float(t_loc[-1])),
                "iterations": it,
            }
        )
        s_all = nodes
        x_all = np.concatenate([x_all, x_loc[1:]])
        F_all = np.concatenate([F_all, F_loc[1:]])

    info = {"method": "picard", "subintervals": records, "max_residual": max_resid}
    log.debug("picard: %d subintervals, max residual %.3e", n_sub, max_resid)
    t_all = _t_of_s(p, iv, s_all)
    t_all[0], t_all[-1] = iv.a, iv.b
    if t_out is None:
        return SolutionGrid(t=t_all, x=x_all, info=info)
    tq = np.asarray(t_out, dtype=float)
    info["native"] = SolutionGrid(t=t_all, x=x_all)
    return SolutionGrid(t=tq, x=volterra_evaluate(prob, s_all, F_all, tq), info=info)


# ----------------------------------------------------------------------------
# product-integration reference


def solve_reference(
    prob: CauchyProblem, nodes: int = 4096, t_out=None, sweeps: int = 50, tol: float = 1e-12
) -> SolutionGrid:
    """Step-by-step product-trapezoidal scheme on a uniform grid in ``t``.

    The kernel is integrated exactly against the piecewise-linear (in
    ``t^rho``) interpolant of ``f(t, x(t))``; the implicit value at each new
    node is found by fixed-point sweeps.
    """
    if nodes < 16:
        raise ValueError("solve_reference needs at least 16 nodes")
    p, iv = prob.p, prob.iv
    c = p.rho ** (-p.alpha) / gamma(p.alpha)
    t = np.linspace(iv.a, iv.b, nodes)
    s = _s_of_t(p, iv, t)
    x = np.empty(nodes)
    F = np.empty(nodes)
    x[0] = prob.x_a
    F[0] = float(prob.f(t[0], x[0]))
    for i in range(1, nodes):
        w = c * pw_linear_weights(s[: i + 1], s[i], p.alpha)
        known = prob.x_a + w[:-1] @ F[:i]
        xi = x[i - 1]
        for _ in range(sweeps):
            nxt = known + w[-1] * float(prob.f(t[i], xi))
            if not math.isfinite(nxt):
                raise ConvergenceError(f"reference sweep diverged at t = {t[i]:.6g}")
            done = abs(nxt - xi) <= tol * max(1.0, abs(nxt))
            xi = nxt
            if done:
                break
        else:
            raise ConvergenceError(f"reference fixed point did not settle at t = {t[i]:.6g}")
        x[i] = xi
        F[i] = float(prob.f(t[i], xi))
    info = {"method": "reference", "nodes": nodes}
    if t_out is None:
        return SolutionGrid(t=t, x=x, info=info)
    tq = np.asarray(t_out, dtype=float)
    return SolutionGrid(t=tq, x=volterra_evaluate(prob, s, F, tq), info=info)


# ----------------------------------------------------------------------------
# decomposition into N + 1 ODEs


def _rk4(rhs, y, sigma, h, n):
    for _ in range(n):
        k1 = rhs(sigma, y)
        k2 = rhs(sigma + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(sigma + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(sigma + h, y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        sigma += h
    return y


def solve_decomposition(prob: CauchyProblem, cfg: DecompSolveConfig = DecompSolveConfig(), t_out=None) -> SolutionGrid:
    """Replace the derivative by its order-``N`` expansion and integrate the
    resulting system for ``x`` and the moments ``V_1 .. V_N``.

    The system is singular at ``t = a``, so integration starts at
    ``a + delta_start`` from ``x = x_a, V_k = 0``. Between the output nodes
    ``a + step, a + 2 step, ..., b`` classical RK4 runs at a fixed step in
    ``sigma = log(t^rho - a^rho)``, with the moments scaled as
    ``y_k = V_k / s^(k-1)``; in these variables the system reads::

        dx/dsigma   = (s^alpha f(t, x) + sum_k B_k y_k) / (rho A_N)
        dy_k/dsigma = dx/dsigma - (k - 1) y_k

    and its stiffness no longer grows near ``t = a``. The substep is
    ``1 / lambda`` with ``lambda`` a Gershgorin bound on the Jacobian.
    """
    p, iv = prob.p, prob.iv
    N = cfg.N
    co = decomp_coeffs(p, N, Mode.DERIVATIVE)
    if co.A == 0.0:
        raise SolverError("A_N vanished; the expansion cannot be solved for x'")
    delta = cfg.delta_for(iv)
    rhoA = p.rho * co.A
    B = co.B
    shift = np.arange(N, dtype=float)  # k - 1
    base = iv.a**p.rho
    f = prob.f

    def rhs(sigma, y):
        s = math.exp(sigma)
        t = (base + s) ** (1.0 / p.rho)
        g = (s**p.alpha * float(f(t, y[0])) + B @ y[1:]) / rhoA
        out = np.empty_like(y)
        out[0] = g
        out[1:] = g - shift * y[1:]
        return out

    s_b = float(_s_of_t(p, iv, iv.b))
    lam = (N - 1) + 2.0 * float(np.sum(np.abs(B))) / rhoA + prob.L * s_b**p.alpha / rhoA
    h_max = 1.0 / lam

    n_steps = max(1, math.ceil(iv.length / cfg.step - 1e-9))
    grid = iv.a + cfg.step * np.arange(1, n_steps + 1)
    grid[-1] = iv.b
    grid = grid[grid <= iv.b]
    if t_out is not None:
        tq = np.asarray(t_out, dtype=float)
        grid = np.union1d(grid, tq[tq > iv.a + delta])
    grid = grid[grid > iv.a + delta]

    y = np.zeros(N + 1)
    y[0] = prob.x_a
    sigma = math.log(float(_s_of_t(p, iv, iv.a + delta)))
    xs = np.empty(len(grid))
    substeps = 0
    for i, ti in enumerate(grid):
        target = math.log(float(_s_of_t(p, iv, ti)))
        span = target - sigma
        n = max(1, math.ceil(span / h_max))
        y = _rk4(rhs, y, sigma, span / n, n)
        substeps += n
        sigma = target
        if not np.all(np.isfinite(y)):
            raise SolverError(f"decomposition system blew up near t = {ti:.6g}")
        xs[i] = y[0]

    t_all = np.concatenate([[iv.a], grid])
    x_all = np.concatenate([[prob.x_a], xs])
    info = {"method": "decomp", "N": N, "A_N": co.A, "rk4_substeps": substeps, "delta": delta}
    if t_out is None:
        return SolutionGrid(t=t_all, x=x_all, info=info)
    tq = np.asarray(t_out, dtype=float)
    return SolutionGrid(t=tq, x=np.interp(tq, t_all, x_all), info=info)


# ----------------------------------------------------------------------------
# convergence utilities


def convergence_horizon(prob: CauchyProblem) -> float:
    """Upper end ``(a^rho + rho (Gamma(1+alpha)/L)^(1/alpha))^(1/rho)`` of the
    interval on which the decomposition solutions converge, clamped to ``b``."""
    p, iv = prob.p, prob.iv
    try:
        reach = p.rho * (gamma(1.0 + p.alpha) / prob.L) ** (1.0 / p.alpha)
        T = (iv.a**p.rho + reach) ** (1.0 / p.rho)
    except OverflowError:
        return iv.b
    return min(T, iv.b) if math.isfinite(T) else iv.b


@dataclass
class StudyResult:
    Ns: list[int]
    sup_errors: list[float]
    slope: float
    upper: float

    def rows(self) -> list[tuple[int, float]]:
        return list(zip(self.Ns, self.sup_errors))


def fit_slope(Ns: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(N)``."""
    return float(np.polyfit(np.log(np.asarray(Ns, float)), np.log(np.asarray(errors, float)), 1)[0])


def convergence_study(
    prob: CauchyProblem,
    exact: Callable[[np.ndarray], np.ndarray] | None,
    Ns: Sequence[int],
    cfg: DecompSolveConfig = DecompSolveConfig(),
) -> StudyResult:
    """Sup-norm errors of :func:`solve_decomposition` over ``[a, horizon]`` for
    each ``N``, and the fitted log-log slope (reported, not judged).

    Without ``exact`` the baseline is :func:`solve_reference` with
    ``64 * max(Ns)`` nodes, sampled at the decomposition grid points.
    """
    Ns = [int(n) for n in Ns]
    if len(set(Ns)) < 3:
        raise ValueError("a convergence study needs at least three distinct N")
    upper = convergence_horizon(prob)
    if exact is None:
        ref = solve_reference(prob, nodes=64 * max(Ns))
        s_nodes = _s_of_t(prob.p, prob.iv, ref.t)
        F = np.asarray(prob.f(ref.t, ref.x), dtype=float)
        exact = lambda t: volterra_evaluate(prob, s_nodes, F, t)  # noqa: E731
    errors = []
    for N in Ns:
        grid = solve_decomposition(prob, replace(cfg, N=N)).restrict(upper)
        errors.append(float(np.max(np.abs(grid.x - exact(grid.t)))))
    return StudyResult(Ns=Ns, sup_errors=errors, slope=fit_slope(Ns, errors), upper=upper)
