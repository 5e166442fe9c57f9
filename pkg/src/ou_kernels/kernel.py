"""Heat Kernels: Ansatz coefficients and closed kernels of Types I, II and III.

P(t; x, x0) = phi(t) exp(alpha x^2 + beta x x0 + gamma x0^2 + mu x + nu x0)
solves dP/dt = theta P_xx - (a x + b) P_x - rho x^2 P in the forward
variable x. Evaluation stays in log-space until a single final exp.

Two choices of the integration constants are offered:

``symmetric``  alpha = gamma, the closed forms with x <-> x0 symmetry at b = 0.
``semigroup``  constants fixed by P(0+; ., x0) = delta(x0), the kernel of e^{-tL}.

Both share alpha and beta and satisfy the same coefficient ODEs.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from ou_kernels.exceptions import DimensionError, SingularTimeError
from ou_kernels.operator_core import DEFAULT_EPS_REL, OUOperator, ProductOperator, Regime, classify
from ou_kernels.quadrature import (
    DEFAULT_HALF_WIDTH_SIGMAS,
    DEFAULT_NODES,
    LogQuadratic,
    Probe,
    gauss_legendre_log_integral,
)

logger = logging.getLogger(__name__)

SYMMETRIC = "symmetric"
SEMIGROUP = "semigroup"
NORMALIZATIONS = (SYMMETRIC, SEMIGROUP)

SINGULAR_SIN_TOL = 1e-12

_LOG_4PI = math.log(4.0 * math.pi)
_LOG_2 = math.log(2.0)


@dataclass(frozen=True)
class KernelCoefficients:
    """The six ansatz coefficients at time t.

    ``window`` counts the conjugate times already passed (oscillatory only);
    past the first one the prefactor is taken in modulus.
    """

    t: float
    alpha: float
    beta: float
    gamma: float
    mu: float
    nu: float
    log_phi: float
    window: int = 0

    def log_value(self, x: float, x0: float) -> float:
        return (self.log_phi + self.alpha * x * x + self.beta * x * x0 + self.gamma * x0 * x0
                + self.mu * x + self.nu * x0)

    def form_in_x(self, x0: float) -> LogQuadratic:
        """log P as a quadratic in the forward variable, x0 fixed."""
        return LogQuadratic(self.alpha, self.beta * x0 + self.mu,
                            self.log_phi + self.gamma * x0 * x0 + self.nu * x0)

    def form_in_x0(self, x: float) -> LogQuadratic:
        """log P as a quadratic in the initial variable, x fixed."""
        return LogQuadratic(self.gamma, self.beta * x + self.nu,
                            self.log_phi + self.alpha * x * x + self.mu * x)

    def as_tuple(self) -> Tuple[float, float, float, float, float, float]:
        return self.alpha, self.beta, self.gamma, self.mu, self.nu, self.log_phi

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "mu": self.mu,
            "nu": self.nu,
            "log_phi": self.log_phi,
            "window": self.window,
        }


def _check_normalization(normalization: str):
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")


def _log_sinh(z: float) -> float:
    return z + math.log(-math.expm1(-2.0 * z)) - _LOG_2


def check_time(regime: Regime, t: float) -> int:
    """Validate t for a kernel evaluation; returns the oscillatory window index."""
    if not (math.isfinite(t) and t > 0):
        raise ValueError(f"t must be positive and finite, got {t}")
    if not regime.is_oscillatory:
        return 0
    lam = regime.lambda0
    z = lam * t
    tol = max(SINGULAR_SIN_TOL, SINGULAR_SIN_TOL * z)
    k = int(round(z / math.pi))
    if k >= 1 and abs(math.sin(z)) < tol:
        raise SingularTimeError(t, k, k * math.pi / lam, tol / lam)
    return int(math.floor(z / math.pi))


def _hyperbolic(op: OUOperator, lam: float, t: float, normalization: str) -> KernelCoefficients:
    theta, a, b, rho = op.theta, op.a, op.b, op.rho
    z = lam * t
    coth = 1.0 / math.tanh(z)
    csch = 2.0 * math.exp(-z) / -math.expm1(-2.0 * z)
    ab = a * b
    alpha = a / (4.0 * theta) - lam / (4.0 * theta) * coth
    beta = lam / (2.0 * theta) * csch
    log_phi = (0.5 * (math.log(lam / theta) - _LOG_4PI - _log_sinh(z))
               + (0.5 * a - rho * b * b / (lam * lam)) * t)
    if normalization == SYMMETRIC:
        gamma = alpha
        mu = -ab / (2.0 * theta * lam) * coth + b / (2.0 * theta)
        nu = ab / (2.0 * theta * lam) * csch + b / (2.0 * theta)
        log_phi -= ab * ab / (4.0 * theta * lam ** 3) * coth
    else:
        tau = math.tanh(0.5 * z)
        gamma = -a / (4.0 * theta) - lam / (4.0 * theta) * coth
        mu = -ab / (2.0 * theta * lam) * tau + b / (2.0 * theta)
        nu = -ab / (2.0 * theta * lam) * tau - b / (2.0 * theta)
        log_phi -= ab * ab / (2.0 * theta * lam ** 3) * tau
    return KernelCoefficients(t, alpha, beta, gamma, mu, nu, log_phi)


def _critical(op: OUOperator, t: float, normalization: str) -> KernelCoefficients:
    theta, a, b = op.theta, op.a, op.b
    ab = a * b
    alpha = a / (4.0 * theta) - 1.0 / (4.0 * theta * t)
    beta = 1.0 / (2.0 * theta * t)
    mu = -ab * t / (4.0 * theta) + b / (2.0 * theta)
    log_phi = (-0.5 * (_LOG_4PI + math.log(theta * t))
               + (0.5 * a - b * b / (4.0 * theta)) * t
               + ab * ab * t ** 3 / (48.0 * theta))
    if normalization == SYMMETRIC:
        gamma = alpha
        nu = mu
    else:
        gamma = -a / (4.0 * theta) - 1.0 / (4.0 * theta * t)
        nu = -ab * t / (4.0 * theta) - b / (2.0 * theta)
    return KernelCoefficients(t, alpha, beta, gamma, mu, nu, log_phi)


def _oscillatory(op: OUOperator, lam: float, t: float, window: int,
                 normalization: str) -> KernelCoefficients:
    theta, a, b, rho = op.theta, op.a, op.b, op.rho
    z = lam * t
    sin_z = math.sin(z)
    cot = math.cos(z) / sin_z
    csc = 1.0 / sin_z
    ab = a * b
    alpha = a / (4.0 * theta) - lam / (4.0 * theta) * cot
    beta = lam / (2.0 * theta) * csc
    # a/2 - rho b^2 / D with D = -lam^2
    log_phi = (0.5 * (math.log(lam / theta) - _LOG_4PI - math.log(abs(sin_z)))
               + (0.5 * a + rho * b * b / (lam * lam)) * t)
    if normalization == SYMMETRIC:
        gamma = alpha
        mu = ab / (2.0 * theta * lam) * cot + b / (2.0 * theta)
        nu = -ab / (2.0 * theta * lam) * csc + b / (2.0 * theta)
        log_phi -= ab * ab / (4.0 * theta * lam ** 3) * cot
    else:
        half = math.sin(0.5 * z)
        tau = 2.0 * half * half / sin_z  # tan(z / 2)
        gamma = -a / (4.0 * theta) - lam / (4.0 * theta) * cot
        mu = -ab / (2.0 * theta * lam) * tau + b / (2.0 * theta)
        nu = -ab / (2.0 * theta * lam) * tau - b / (2.0 * theta)
        log_phi += ab * ab / (2.0 * theta * lam ** 3) * tau
    return KernelCoefficients(t, alpha, beta, gamma, mu, nu, log_phi, window)


def coefficients(op: OUOperator, t: float, normalization: str = SYMMETRIC,
                 eps_rel: float = DEFAULT_EPS_REL) -> KernelCoefficients:
    """alpha, beta, gamma, mu, nu and log phi at time t."""
    _check_normalization(normalization)
    regime = classify(op, eps_rel)
    window = check_time(regime, t)
    if regime.is_hyperbolic:
        return _hyperbolic(op, regime.lambda0, t, normalization)
    if regime.is_critical:
        return _critical(op, t, normalization)
    return _oscillatory(op, regime.lambda0, t, window, normalization)


def log_kernel(op: OUOperator, t: float, x: float, x0: float, normalization: str = SYMMETRIC,
               eps_rel: float = DEFAULT_EPS_REL) -> float:
    """log P(t; x, x0)."""
    return coefficients(op, t, normalization, eps_rel).log_value(x, x0)


def kernel(op: OUOperator, t: float, x: float, x0: float, normalization: str = SYMMETRIC,
           eps_rel: float = DEFAULT_EPS_REL) -> float:
    return math.exp(log_kernel(op, t, x, x0, normalization, eps_rel))


def log_kernel_nd(pop: ProductOperator, t: float, x: Sequence[float], x0: Sequence[float],
                  normalization: str = SYMMETRIC, eps_rel: float = DEFAULT_EPS_REL) -> float:
    """log of the product kernel: the sum of per-coordinate 1-d logs."""
    n = pop.dimension
    if len(x) != n or len(x0) != n:
        raise DimensionError(
            f"expected vectors of length {n}, got len(x)={len(x)}, len(x0)={len(x0)}"
        )
    total = 0.0
    for i, (factor, xi, x0i) in enumerate(zip(pop.factors, x, x0)):
        try:
            total += log_kernel(factor, t, float(xi), float(x0i), normalization, eps_rel)
        except SingularTimeError as e:
            raise e.with_factor(i) from None
    return total


def kernel_action(op: OUOperator, t: float, x: float, probe: Probe,
                  normalization: str = SEMIGROUP, nodes: int = DEFAULT_NODES,
                  half_width_sigmas: float = DEFAULT_HALF_WIDTH_SIGMAS,
                  eps_rel: float = DEFAULT_EPS_REL) -> float:
    """(e^{-tL} phi)(x) = integral of P(t; x, y) phi(y) dy."""
    coeffs = coefficients(op, t, normalization, eps_rel)
    form = coeffs.form_in_x0(x) + probe.form()
    return math.exp(gauss_legendre_log_integral(form, nodes, half_width_sigmas))


def singular_times(op: OUOperator, t_max: float, eps_rel: float = DEFAULT_EPS_REL) -> List[float]:
    """Conjugate times k pi / lambda0 <= t_max, increasing; empty unless oscillatory."""
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    regime = classify(op, eps_rel)
    if not regime.is_oscillatory:
        return []
    step = math.pi / regime.lambda0
    times = []
    k = 1
    while k * step <= t_max:
        times.append(k * step)
        k += 1
    return times
