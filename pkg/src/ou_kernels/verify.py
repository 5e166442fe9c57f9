"""Verification: Independent oracles for the closed-form geodesics and kernels.

Each oracle returns a :class:`VerificationReport` whose ``passed`` flag is
``measured <= tolerance``; nothing here asserts, so suites can collect
every failure.
"""

import logging
import math
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence

from scipy.optimize import newton

from ou_kernels.exceptions import ShootingError
from ou_kernels.geodesics import geodesic, geodesic_eval
from ou_kernels.hamiltonian import DEFAULT_RK4_DT, PhaseState, flow_numeric, flow_trajectory
from ou_kernels.kernel import (
    SEMIGROUP,
    SYMMETRIC,
    KernelCoefficients,
    coefficients,
    kernel_action,
)
from ou_kernels.monte_carlo import DEFAULT_BLOCK_SIZE, feynman_kac_estimate
from ou_kernels.operator_core import DEFAULT_EPS_REL, OUOperator, discriminant
from ou_kernels.quadrature import (
    DEFAULT_HALF_WIDTH_SIGMAS,
    DEFAULT_NODES,
    GAUSSIAN_BUMP,
    Probe,
    gauss_legendre_log_integral,
)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES: Dict[str, float] = {
    "pde": 1e-6,
    "ode": 1e-5,
    "chapman_kolmogorov": 1e-8,
    "delta_limit": 5e-3,
    "delta_rate": 0.05,
    "shooting": 1e-7,
    "geodesic_ode": 1e-5,
}
DEFAULT_PROBE_WIDTH = 0.5
DELTA_TIMES = (1e-2, 1e-3, 1e-4)
COEFFICIENT_NAMES = ("alpha", "beta", "gamma", "mu", "nu", "log_phi")


class VerificationReport:
    """Outcome of one oracle check."""

    def __init__(self, check: str, measured: float, tolerance: float,
                 context: Optional[Dict[str, object]] = None):
        self.check = check
        self.measured = measured
        self.tolerance = tolerance
        self.context = context or {}

    @property
    def passed(self) -> bool:
        return self.measured <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "context": dict(self.context),
        }


def _op_context(op: OUOperator, **extra) -> Dict[str, object]:
    ctx: Dict[str, object] = {"operator": op.to_dict()}
    ctx.update(extra)
    return ctx


def pde_residual(op: OUOperator, t: float, x: float, x0: float, h_t: Optional[float] = None,
                 h_x: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCES["pde"],
                 normalization: str = SYMMETRIC,
                 eps_rel: float = DEFAULT_EPS_REL) -> VerificationReport:
    """Finite-difference residual of dP/dt - theta P_xx + (a x + b) P_x + rho x^2 P.

    All stencil values are taken relative to P(t, x), so the reported ratio
    |R| / max(|P_t|, P/t) is computed without forming P itself.
    """
    if h_t is None:
        h_t = 1e-5 * t
    if h_x is None:
        h_x = 1e-4 * (1.0 + abs(x))
    if not (h_t > 0 and h_x > 0):
        raise ValueError(f"steps must be positive, got h_t={h_t}, h_x={h_x}")
    if t - h_t <= 0:
        raise ValueError(f"stencil reaches t - h_t = {t - h_t} <= 0")

    c = coefficients(op, t, normalization, eps_rel)
    c_minus = coefficients(op, t - h_t, normalization, eps_rel)
    c_plus = coefficients(op, t + h_t, normalization, eps_rel)
    centre = c.log_value(x, x0)

    slope = 2.0 * c.alpha * x + c.beta * x0 + c.mu

    def shifted(d: float) -> float:
        # P(t, x + d) / P(t, x), with the difference of quadratics formed exactly
        return math.exp(d * (slope + c.alpha * d))

    p_t = (math.exp(c_plus.log_value(x, x0) - centre)
           - math.exp(c_minus.log_value(x, x0) - centre)) / (2.0 * h_t)
    m2, m1, p1, p2 = shifted(-2 * h_x), shifted(-h_x), shifted(h_x), shifted(2 * h_x)
    p_x = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h_x)
    p_xx = (-m2 + 16.0 * m1 - 30.0 + 16.0 * p1 - p2) / (12.0 * h_x * h_x)

    residual = p_t - op.theta * p_xx + (op.a * x + op.b) * p_x + op.rho * x * x
    measured = abs(residual) / max(abs(p_t), 1.0 / t)
    return VerificationReport(
        "pde_residual", measured, tolerance,
        _op_context(op, t=t, x=x, x0=x0, h_t=h_t, h_x=h_x, normalization=normalization),
    )


def _ode_rhs(op: OUOperator, c: KernelCoefficients) -> List[float]:
    theta, a, b, rho = op.theta, op.a, op.b, op.rho
    alpha, beta, mu = c.alpha, c.beta, c.mu
    return [
        4.0 * theta * alpha * alpha - 2.0 * a * alpha - rho,
        4.0 * theta * alpha * beta - a * beta,
        theta * beta * beta,
        4.0 * theta * alpha * mu - a * mu - 2.0 * b * alpha,
        2.0 * theta * beta * mu - b * beta,
        theta * mu * mu + 2.0 * theta * alpha - b * mu,
    ]


def ode_residuals(op: OUOperator, t: float, h: Optional[float] = None,
                  tolerance: float = DEFAULT_TOLERANCES["ode"], normalization: str = SYMMETRIC,
                  eps_rel: float = DEFAULT_EPS_REL) -> List[VerificationReport]:
    """Central-difference derivatives of the six coefficients against their ODE right-hand sides."""
    if h is None:
        h = 1e-6 * t
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    if t - h <= 0:
        raise ValueError(f"stencil reaches t - h = {t - h} <= 0")

    c = coefficients(op, t, normalization, eps_rel)
    lo = coefficients(op, t - h, normalization, eps_rel).as_tuple()
    hi = coefficients(op, t + h, normalization, eps_rel).as_tuple()
    rhs = _ode_rhs(op, c)

    reports = []
    for name, value, f_lo, f_hi, expected in zip(COEFFICIENT_NAMES, c.as_tuple(), lo, hi, rhs):
        fd = (f_hi - f_lo) / (2.0 * h)
        scale = max(abs(fd), abs(expected), abs(value) / t)
        measured = abs(fd - expected) / scale if scale > 0 else 0.0
        reports.append(VerificationReport(
            f"ode_{name}", measured, tolerance,
            _op_context(op, t=t, h=h, derivative=fd, rhs=expected, normalization=normalization),
        ))
    return reports


def chapman_kolmogorov_error(op: OUOperator, t1: float, t2: float, x: float, x0: float,
                             nodes: int = DEFAULT_NODES,
                             tolerance: float = DEFAULT_TOLERANCES["chapman_kolmogorov"],
                             normalization: str = SEMIGROUP,
                             half_width_sigmas: float = DEFAULT_HALF_WIDTH_SIGMAS,
                             eps_rel: float = DEFAULT_EPS_REL) -> VerificationReport:
    """Relative error of integral P(t1; x, y) P(t2; y, x0) dy against P(t1 + t2; x, x0)."""
    first = coefficients(op, t1, normalization, eps_rel)
    second = coefficients(op, t2, normalization, eps_rel)
    direct = coefficients(op, t1 + t2, normalization, eps_rel).log_value(x, x0)
    form = first.form_in_x0(x) + second.form_in_x(x0)
    composed = gauss_legendre_log_integral(form, nodes, half_width_sigmas)
    measured = abs(math.expm1(composed - direct))
    return VerificationReport(
        "chapman_kolmogorov", measured, tolerance,
        _op_context(op, t1=t1, t2=t2, x=x, x0=x0, nodes=nodes, normalization=normalization,
                    log_composed=composed, log_direct=direct),
    )


def default_probe(x0: float, kind: str = GAUSSIAN_BUMP, width: float = DEFAULT_PROBE_WIDTH) -> Probe:
    return Probe(kind, center=x0, width=width)


def delta_limit_error(op: OUOperator, t: float, x0: float, probe: Optional[Probe] = None,
                      nodes: int = DEFAULT_NODES, tolerance: float = DEFAULT_TOLERANCES["delta_limit"],
                      normalization: str = SEMIGROUP,
                      half_width_sigmas: float = DEFAULT_HALF_WIDTH_SIGMAS,
                      eps_rel: float = DEFAULT_EPS_REL) -> VerificationReport:
    """|integral P(t; x, x0) phi(x) dx - phi(x0)|."""
    if probe is None:
        probe = default_probe(x0)
    c = coefficients(op, t, normalization, eps_rel)
    form = c.form_in_x(x0) + probe.form()
    integral = math.exp(gauss_legendre_log_integral(form, nodes, half_width_sigmas))
    target = float(probe(x0))
    return VerificationReport(
        "delta_limit", abs(integral - target), tolerance,
        _op_context(op, t=t, x0=x0, integral=integral, target=target,
                    normalization=normalization, **probe.to_dict()),
    )


def delta_limit_rate(op: OUOperator, x0: float, probe: Optional[Probe] = None,
                     times: Sequence[float] = DELTA_TIMES,
                     tolerance: float = DEFAULT_TOLERANCES["delta_rate"],
                     normalization: str = SEMIGROUP, nodes: int = DEFAULT_NODES,
                     eps_rel: float = DEFAULT_EPS_REL) -> VerificationReport:
    """Worst deviation of successive delta-limit error ratios from the time ratio."""
    errors = [delta_limit_error(op, t, x0, probe, nodes, normalization=normalization,
                                eps_rel=eps_rel).measured for t in times]
    ratios = []
    worst = 0.0
    for (t_prev, e_prev), (t_next, e_next) in zip(zip(times, errors), zip(times[1:], errors[1:])):
        ratio = e_next / e_prev if e_prev > 0 else float("inf")
        ratios.append(ratio)
        worst = max(worst, abs(ratio - t_next / t_prev))
    return VerificationReport(
        "delta_limit_rate", worst, tolerance,
        _op_context(op, x0=x0, times=list(times), errors=errors, ratios=ratios,
                    normalization=normalization),
    )


def feynman_kac_error(op: OUOperator, t: float, x_start: float, probe: Probe, paths: int,
                      dt: float, seed: int, workers: int = 1, n_sigma: float = 3.0,
                      bias_per_dt: float = 2.0, normalization: str = SEMIGROUP,
                      nodes: int = DEFAULT_NODES, block_size: int = DEFAULT_BLOCK_SIZE,
                      eps_rel: float = DEFAULT_EPS_REL) -> VerificationReport:
    """Monte Carlo estimate against the quadrature of the closed kernel.

    Tolerance is n_sigma standard errors plus an Euler bias allowance
    bias_per_dt * dt * |exact|.
    """
    exact = kernel_action(op, t, x_start, probe, normalization, nodes, eps_rel=eps_rel)
    estimate = feynman_kac_estimate(op, t, x_start, probe, paths, dt, seed, workers, block_size)
    tolerance = n_sigma * estimate.standard_error + bias_per_dt * estimate.dt * abs(exact)
    return VerificationReport(
        "feynman_kac", abs(estimate.mean - exact), tolerance,
        _op_context(op, t=t, x_start=x_start, exact=exact, normalization=normalization,
                    **estimate.to_dict(), **probe.to_dict()),
    )


def geodesic_ode_residual(op: OUOperator, position: Callable[[float], float], s: float,
                          h: float = 1e-4) -> float:
    """Residual of x'' = D x + ab by 5-point central differences at interior s.

    Scaled by max(1, |x|, |x''|, |D x + ab|), so paths of unit size are
    measured absolutely.
    """
    if not (2 * h <= s <= 1.0 - 2 * h):
        raise ValueError(f"s={s} too close to the ends for step {h}")
    f = [position(s + k * h) for k in (-2, -1, 0, 1, 2)]
    xdd = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
    rhs = discriminant(op) * f[2] + op.a * op.b
    return abs(xdd - rhs) / max(1.0, abs(f[2]), abs(xdd), abs(rhs))


def geodesic_ode_error(op: OUOperator, x0: float, x1: float, c2: float = 0.0,
                       points: int = 9, h: float = 1e-4,
                       tolerance: float = DEFAULT_TOLERANCES["geodesic_ode"],
                       eps_rel: float = DEFAULT_EPS_REL) -> VerificationReport:
    """Worst ODE residual over interior points of the geodesic (or family member c2)."""
    result = geodesic(op, x0, x1, eps_rel)
    if result.is_unique:
        position = result.path.position
    elif result.family is not None:
        position = partial(result.family.position, c2)
    else:
        raise ValueError(f"no geodesic joins {x0} and {x1} (requires {result.required_endpoint})")
    samples = [(j + 1) / (points + 1) for j in range(points)]
    worst = max(geodesic_ode_residual(op, position, s, h) for s in samples)
    return VerificationReport(
        "geodesic_ode", worst, tolerance,
        _op_context(op, x0=x0, x1=x1, result=result.kind, h=h, points=points),
    )


def geodesic_shooting_error(op: OUOperator, x0: float, x1: float, grid: int = 100,
                            dt: float = DEFAULT_RK4_DT,
                            tolerance: float = DEFAULT_TOLERANCES["shooting"],
                            maxiter: int = 100,
                            eps_rel: float = DEFAULT_EPS_REL) -> VerificationReport:
    """Secant shooting on xi(0) with RK4, compared with the closed form on a uniform grid."""
    result = geodesic(op, x0, x1, eps_rel)
    if not result.is_unique:
        raise ValueError(f"shooting needs a unique geodesic, got {result.kind}")
    path = result.path

    def miss(xi: float) -> float:
        return flow_numeric(op, PhaseState(x0, xi), 1.0, dt).x - x1

    xi0, info = newton(miss, 0.0, x1=1.0, tol=1e-13, rtol=1e-13, maxiter=maxiter,
                       full_output=True, disp=False)
    if not info.converged:
        raise ShootingError(
            f"secant iteration did not converge in {maxiter} iterations ({info.flag}); "
            f"the operator may be near resonance"
        )
    xi0 = float(xi0)
    landing = miss(xi0)
    logger.debug(f"shooting: xi(0)={xi0!r} after {info.iterations} iterations, miss={landing:.3g}")

    s_grid = [j / grid for j in range(grid + 1)]
    states = flow_trajectory(op, PhaseState(x0, xi0), s_grid, dt)
    worst = max(abs(state.x - geodesic_eval(path, min(s, 1.0))) for s, state in zip(s_grid, states))
    return VerificationReport(
        "geodesic_shooting", worst, tolerance,
        _op_context(op, x0=x0, x1=x1, grid=grid, dt=dt, xi0_numeric=xi0,
                    xi0_closed_form=path.momentum(0.0), landing_error=landing),
    )
