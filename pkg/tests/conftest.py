"""Shared fixtures: reference operators and seeded random operator generators."""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ou_kernels.operator_core import CRITICAL, HYPERBOLIC, OSCILLATORY, OUOperator  # noqa: E402

REGIMES = (HYPERBOLIC, CRITICAL, OSCILLATORY)


def random_operator(rng: np.random.Generator, kind: str) -> OUOperator:
    """Operator of the requested regime; oscillatory lambda0 stays below pi."""
    theta = float(rng.uniform(0.5, 2.0))
    a = float(rng.uniform(-2.0, 2.0))
    b = float(rng.uniform(-1.5, 1.5))
    if kind == HYPERBOLIC:
        while True:
            lam = float(rng.uniform(0.5, 3.0))
            rho = (lam * lam - a * a) / (4.0 * theta)
            if abs(rho) >= 1e-3:
                return OUOperator(theta, a, b, rho)
    if kind == CRITICAL:
        a = math.copysign(float(rng.uniform(0.3, 2.0)), a)
        return OUOperator(theta, a, b, -a * a / (4.0 * theta))
    lam = float(rng.uniform(0.3, 2.8))
    return OUOperator(theta, a, b, -(lam * lam + a * a) / (4.0 * theta))


def random_time(rng: np.random.Generator, op: OUOperator, kind: str,
                lo: float = 0.2, hi: float = 1.5) -> float:
    """A time inside the first regular window."""
    if kind == OSCILLATORY:
        lam = math.sqrt(-(op.a * op.a + 4.0 * op.rho * op.theta))
        hi = min(hi, 0.9 * math.pi / lam)
    return float(rng.uniform(lo, hi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_operator():
    return random_operator


@pytest.fixture
def make_time():
    return random_time


@pytest.fixture
def l_plus():
    return OUOperator(theta=1.0, a=1.0, b=0.0, rho=1.0)


@pytest.fixture
def l_minus():
    return OUOperator(theta=1.0, a=1.0, b=0.0, rho=-1.0)


@pytest.fixture
def critical_op():
    return OUOperator(theta=1.0, a=2.0, b=1.0, rho=-1.0)
