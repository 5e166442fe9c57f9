"""Quadrature: Gauss-Legendre integration of exp(quadratic) integrands.

Every integral the verification oracles need has the form
  integral of exp(q2 y^2 + q1 y + q0) dy
so the interval is centred at the completed-square peak and scaled by the
Gaussian width before nodes are placed.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_legendre

from ou_kernels.exceptions import QuadratureError

logger = logging.getLogger(__name__)

CONSTANT = "constant-1"
GAUSSIAN_BUMP = "gaussian-bump"
PROBES = (CONSTANT, GAUSSIAN_BUMP)

DEFAULT_NODES = 200
DEFAULT_HALF_WIDTH_SIGMAS = 12.0


@dataclass(frozen=True)
class LogQuadratic:
    """y -> q2 y^2 + q1 y + q0."""

    q2: float
    q1: float
    q0: float

    def __call__(self, y):
        return (self.q2 * y + self.q1) * y + self.q0

    def __add__(self, other: "LogQuadratic") -> "LogQuadratic":
        return LogQuadratic(self.q2 + other.q2, self.q1 + other.q1, self.q0 + other.q0)

    @property
    def is_negative_definite(self) -> bool:
        return self.q2 < 0

    @property
    def peak(self) -> float:
        return -self.q1 / (2.0 * self.q2)

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(-2.0 * self.q2)

    def log_integral_exact(self) -> float:
        """Closed-form Gaussian integral, for cross-checks."""
        if not self.is_negative_definite:
            raise QuadratureError(f"quadratic coefficient {self.q2} is not negative")
        return 0.5 * math.log(math.pi / -self.q2) + self.q0 - self.q1 * self.q1 / (4.0 * self.q2)


@dataclass(frozen=True)
class Probe:
    """Test function phi: the constant 1 or exp(-(y - center)^2 / (2 width^2))."""

    kind: str = CONSTANT
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in PROBES:
            raise ValueError(f"unknown probe {self.kind!r}; expected one of {PROBES}")
        if self.kind == GAUSSIAN_BUMP and not self.width > 0:
            raise ValueError(f"probe width must be positive, got {self.width}")

    def form(self) -> LogQuadratic:
        if self.kind == CONSTANT:
            return LogQuadratic(0.0, 0.0, 0.0)
        w2 = self.width * self.width
        return LogQuadratic(-0.5 / w2, self.center / w2, -0.5 * self.center * self.center / w2)

    def __call__(self, y):
        return np.exp(self.form()(y))

    def to_dict(self) -> dict:
        if self.kind == CONSTANT:
            return {"probe": self.kind}
        return {"probe": self.kind, "center": self.center, "width": self.width}


@lru_cache(maxsize=32)
def _legendre(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    roots, weights = roots_legendre(nodes)
    return roots, weights


def gauss_legendre_log_integral(form: LogQuadratic, nodes: int = DEFAULT_NODES,
                                half_width_sigmas: float = DEFAULT_HALF_WIDTH_SIGMAS) -> float:
    """log of the integral of exp(form) over R, truncated to peak +- half_width_sigmas * sigma."""
    if nodes < 1:
        raise ValueError(f"nodes must be positive, got {nodes}")
    if not form.is_negative_definite:
        raise QuadratureError(
            f"integrand is not negative definite (q2={form.q2!r}); "
            f"the interval likely straddles a singular time"
        )
    roots, weights = _legendre(nodes)
    center = form.peak
    half_width = half_width_sigmas * form.sigma
    top = form(center)
    y = center + half_width * roots
    total = float(np.dot(weights, np.exp(form(y) - top)))
    logger.debug(f"quadrature: nodes={nodes} center={center:.6g} half_width={half_width:.6g}")
    return top + math.log(half_width * total)
