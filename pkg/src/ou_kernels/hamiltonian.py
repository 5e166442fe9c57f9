"""Hamiltonian Flow: Closed-form and RK4 solutions of X' = A X + B.

With H(x, xi) = -theta xi^2 + (a x + b) xi + rho x^2 the canonical equations
are x' = a x - 2 theta xi + b and xi' = -2 rho x - a xi, i.e.
A = [[a, -2 theta], [-2 rho, -a]] and B = (b, 0). A is trace-free with
A^2 = D I, so exp(sA) = c(s) I + g(s) A in every regime.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ou_kernels.operator_core import DEFAULT_EPS_REL, OUOperator, Regime, classify

logger = logging.getLogger(__name__)

DEFAULT_RK4_DT = 1e-4


@dataclass(frozen=True)
class PhaseState:
    """Position x and momentum xi."""

    x: float
    xi: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.xi)):
            raise ValueError(f"phase state must be finite, got ({self.x}, {self.xi})")


@dataclass(frozen=True)
class FlowMatrix:
    """Row-major 2x2 matrix."""

    m11: float
    m12: float
    m21: float
    m22: float

    def determinant(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other: "FlowMatrix") -> "FlowMatrix":
        return FlowMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def apply(self, x: float, xi: float) -> Tuple[float, float]:
        return self.m11 * x + self.m12 * xi, self.m21 * x + self.m22 * xi

    def to_list(self) -> List[List[float]]:
        return [[self.m11, self.m12], [self.m21, self.m22]]


def generator(op: OUOperator) -> FlowMatrix:
    """The matrix A of the homogeneous system."""
    return FlowMatrix(op.a, -2.0 * op.theta, -2.0 * op.rho, -op.a)


def _primitives(regime: Regime, s: float) -> Tuple[float, float, float]:
    """(c, g, h) with exp(sA) = cI + gA and the integral of exp(uA) over [0, s] = gI + hA."""
    if regime.is_critical:
        return 1.0, s, 0.5 * s * s
    lam = regime.lambda0
    if regime.is_hyperbolic:
        half = math.sinh(0.5 * lam * s)
        return math.cosh(lam * s), math.sinh(lam * s) / lam, 2.0 * half * half / (lam * lam)
    half = math.sin(0.5 * lam * s)
    return math.cos(lam * s), math.sin(lam * s) / lam, 2.0 * half * half / (lam * lam)


def transition_matrix(op: OUOperator, s: float, regime: Optional[Regime] = None,
                      eps_rel: float = DEFAULT_EPS_REL) -> FlowMatrix:
    """exp(sA) in closed form (I + sA, or the cos/sin and cosh/sinh forms)."""
    if regime is None:
        regime = classify(op, eps_rel)
    c, g, _ = _primitives(regime, s)
    return FlowMatrix(
        c + g * op.a,
        -2.0 * g * op.theta,
        -2.0 * g * op.rho,
        c - g * op.a,
    )


def flow(op: OUOperator, state0: PhaseState, s: float, regime: Optional[Regime] = None,
         eps_rel: float = DEFAULT_EPS_REL) -> PhaseState:
    """Exact solution of the affine system after time s."""
    if regime is None:
        regime = classify(op, eps_rel)
    c, g, h = _primitives(regime, s)
    m = FlowMatrix(c + g * op.a, -2.0 * g * op.theta, -2.0 * g * op.rho, c - g * op.a)
    x, xi = m.apply(state0.x, state0.xi)
    # (gI + hA) applied to B = (b, 0)
    x += (g + h * op.a) * op.b
    xi += -2.0 * h * op.rho * op.b
    return PhaseState(x, xi)


def _vector_field(op: OUOperator, x: float, xi: float) -> Tuple[float, float]:
    return op.a * x - 2.0 * op.theta * xi + op.b, -2.0 * op.rho * x - op.a * xi


def _rk4_advance(op: OUOperator, x: float, xi: float, s: float, dt: float) -> Tuple[float, float]:
    if s == 0.0:
        return x, xi
    n = max(1, int(math.floor(abs(s) / dt + 1e-9)))
    h = math.copysign(dt, s)
    steps = [h] * n
    rest = s - n * h
    if abs(rest) > 1e-15 * max(1.0, abs(s)):
        steps.append(rest)
    for h in steps:
        k1x, k1p = _vector_field(op, x, xi)
        k2x, k2p = _vector_field(op, x + 0.5 * h * k1x, xi + 0.5 * h * k1p)
        k3x, k3p = _vector_field(op, x + 0.5 * h * k2x, xi + 0.5 * h * k2p)
        k4x, k4p = _vector_field(op, x + h * k3x, xi + h * k3p)
        x += h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        xi += h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
    return x, xi


def flow_numeric(op: OUOperator, state0: PhaseState, s: float,
                 dt: float = DEFAULT_RK4_DT) -> PhaseState:
    """Fixed-step classic RK4 integration of X' = AX + B, landing exactly on s."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x, xi = _rk4_advance(op, state0.x, state0.xi, s, dt)
    return PhaseState(x, xi)


def flow_trajectory(op: OUOperator, state0: PhaseState, s_grid: Sequence[float],
                    dt: float = DEFAULT_RK4_DT) -> List[PhaseState]:
    """RK4 states at every point of an increasing grid starting from s_grid[0] = 0."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    states = []
    x, xi = state0.x, state0.xi
    prev = 0.0
    for s in s_grid:
        x, xi = _rk4_advance(op, x, xi, s - prev, dt)
        prev = s
        states.append(PhaseState(x, xi))
    return states


def hamiltonian_value(op: OUOperator, state: PhaseState) -> float:
    """H = -theta xi^2 + (a x + b) xi + rho x^2."""
    x, xi = state.x, state.xi
    return -op.theta * xi * xi + (op.a * x + op.b) * xi + op.rho * x * x
