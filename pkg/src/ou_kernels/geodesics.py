"""Geodesics: Two-point boundary problems x(0) = x0, x(1) = x1 of the Hamiltonian flow.

Eliminating xi from the canonical equations gives x'' = D x + ab, so every
geodesic is a particular constant (or parabola) plus a homogeneous part.
When D = -(k pi)^2 the homogeneous part vanishes at both ends and the
problem is either unsolvable or has a one-parameter family of solutions.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from ou_kernels.hamiltonian import PhaseState
from ou_kernels.operator_core import DEFAULT_EPS_REL, OUOperator, Regime, classify

logger = logging.getLogger(__name__)

UNIQUE = "unique"
FAMILY = "family"
NO_SOLUTION = "no_solution"

DEFAULT_RESONANCE_TOL = 1e-9
DEFAULT_ENDPOINT_TOL = 1e-9


def _sinh_ratio(lam: float, u: float) -> float:
    """sinh(lam u) / sinh(lam) without overflow."""
    return math.exp(lam * (u - 1.0)) * math.expm1(-2.0 * lam * u) / math.expm1(-2.0 * lam)


def _cosh_ratio(lam: float, u: float) -> float:
    """lam cosh(lam u) / sinh(lam) without overflow."""
    return lam * math.exp(lam * (u - 1.0)) * (1.0 + math.exp(-2.0 * lam * u)) / -math.expm1(-2.0 * lam)


def _check_unit_interval(s: float):
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")


@dataclass(frozen=True)
class GeodesicPath:
    """A unique geodesic.

    ``shift`` is the constant particular solution (-ab/lambda0^2 hyperbolic,
    +ab/lambda0^2 oscillatory, 0 critical); ``curvature`` is ab/2 for the
    critical parabola and 0 otherwise.
    """

    op: OUOperator
    regime: Regime
    x0: float
    x1: float
    shift: float
    curvature: float

    def position(self, s: float) -> float:
        lam = self.regime.lambda0
        if self.regime.is_critical:
            return self.curvature * s * s + (self.x1 - self.x0 - self.curvature) * s + self.x0
        p0 = self.x0 - self.shift
        p1 = self.x1 - self.shift
        if self.regime.is_hyperbolic:
            return self.shift + p0 * _sinh_ratio(lam, 1.0 - s) + p1 * _sinh_ratio(lam, s)
        sin_lam = math.sin(lam)
        return self.shift + (p0 * math.sin(lam * (1.0 - s)) + p1 * math.sin(lam * s)) / sin_lam

    def velocity(self, s: float) -> float:
        lam = self.regime.lambda0
        if self.regime.is_critical:
            return 2.0 * self.curvature * s + (self.x1 - self.x0 - self.curvature)
        p0 = self.x0 - self.shift
        p1 = self.x1 - self.shift
        if self.regime.is_hyperbolic:
            return -p0 * _cosh_ratio(lam, 1.0 - s) + p1 * _cosh_ratio(lam, s)
        return lam * (-p0 * math.cos(lam * (1.0 - s)) + p1 * math.cos(lam * s)) / math.sin(lam)

    def momentum(self, s: float) -> float:
        """xi(s) recovered from x' = a x - 2 theta xi + b."""
        op = self.op
        return (op.a * self.position(s) + op.b - self.velocity(s)) / (2.0 * op.theta)

    def initial_state(self) -> PhaseState:
        return PhaseState(self.x0, self.momentum(0.0))

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.kind,
            "lambda0": self.regime.lambda0,
            "x0": self.x0,
            "x1": self.x1,
            "shift": self.shift,
            "curvature": self.curvature,
            "initial_momentum": self.momentum(0.0),
        }


@dataclass(frozen=True)
class SingularFamily:
    """Solutions at lambda0 = k pi; the free coefficient c2 is supplied at evaluation."""

    op: OUOperator
    k: int
    x0: float

    @property
    def lambda0(self) -> float:
        return self.k * math.pi

    @property
    def shift(self) -> float:
        return self.op.a * self.op.b / (self.lambda0 * self.lambda0)

    @property
    def forced_endpoint(self) -> float:
        sign = -1.0 if self.k % 2 else 1.0
        return self.shift + sign * (self.x0 - self.shift)

    def position(self, c2: float, s: float) -> float:
        lam = self.lambda0
        base = math.cos(lam * s) + (self.op.a / lam) * math.sin(lam * s)
        return self.shift + (self.x0 - self.shift) * base - c2 * math.sin(lam * s)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "x0": self.x0,
            "shift": self.shift,
            "forced_endpoint": self.forced_endpoint,
        }


@dataclass(frozen=True)
class GeodesicResult:
    """Outcome of the boundary problem: unique path, singular family, or no solution."""

    kind: str
    path: Optional[GeodesicPath] = None
    family: Optional[SingularFamily] = None
    k: Optional[int] = None
    required_endpoint: Optional[float] = None

    @property
    def is_unique(self) -> bool:
        return self.kind == UNIQUE

    def to_dict(self) -> dict:
        d = {"result": self.kind}
        if self.path is not None:
            d["path"] = self.path.to_dict()
        if self.family is not None:
            d["family"] = self.family.to_dict()
        if self.k is not None:
            d["k"] = self.k
        if self.required_endpoint is not None:
            d["required_endpoint"] = self.required_endpoint
        return d


def resonance_index(regime: Regime, tol: float = DEFAULT_RESONANCE_TOL) -> Optional[int]:
    """k >= 1 if lambda0 is within tol * max(lambda0, 1) of k pi, else None."""
    if not regime.is_oscillatory:
        return None
    lam = regime.lambda0
    k = int(round(lam / math.pi))
    if k >= 1 and abs(lam - k * math.pi) <= tol * max(lam, 1.0):
        return k
    return None


def geodesic(op: OUOperator, x0: float, x1: float, eps_rel: float = DEFAULT_EPS_REL,
             resonance_tol: float = DEFAULT_RESONANCE_TOL,
             endpoint_tol: float = DEFAULT_ENDPOINT_TOL) -> GeodesicResult:
    """Solve x'' = D x + ab with x(0) = x0, x(1) = x1."""
    if not (math.isfinite(x0) and math.isfinite(x1)):
        raise ValueError(f"endpoints must be finite, got ({x0}, {x1})")
    regime = classify(op, eps_rel)
    ab = op.a * op.b

    if regime.is_critical:
        path = GeodesicPath(op, regime, x0, x1, shift=0.0, curvature=0.5 * ab)
        return GeodesicResult(UNIQUE, path=path)

    lam2 = regime.lambda0 * regime.lambda0
    if regime.is_hyperbolic:
        path = GeodesicPath(op, regime, x0, x1, shift=-ab / lam2, curvature=0.0)
        return GeodesicResult(UNIQUE, path=path)

    k = resonance_index(regime, resonance_tol)
    if k is None:
        path = GeodesicPath(op, regime, x0, x1, shift=ab / lam2, curvature=0.0)
        return GeodesicResult(UNIQUE, path=path)

    family = SingularFamily(op, k, x0)
    required = family.forced_endpoint
    if abs(x1 - required) <= endpoint_tol * (1.0 + abs(x1)):
        logger.info(f"lambda0 = {k}*pi: endpoint {x1} admits a one-parameter family")
        return GeodesicResult(FAMILY, family=family, k=k, required_endpoint=required)
    logger.info(f"lambda0 = {k}*pi: endpoint {x1} unreachable (requires {required})")
    return GeodesicResult(NO_SOLUTION, k=k, required_endpoint=required)


def geodesic_eval(path: GeodesicPath, s: float) -> float:
    """x(s) of a unique geodesic, 0 <= s <= 1."""
    _check_unit_interval(s)
    return path.position(s)


def family_eval(family: SingularFamily, c2: float, s: float) -> float:
    """x(s) of the family member with free coefficient c2, 0 <= s <= 1."""
    _check_unit_interval(s)
    return family.position(c2, s)
