"""Operator Core: Parameters, discriminant and regime classification.

Every other module branches on the :class:`Regime` computed here, so the
square root of the discriminant is taken exactly once.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

from ou_kernels.exceptions import OperatorError

logger = logging.getLogger(__name__)

HYPERBOLIC = "hyperbolic"
CRITICAL = "critical"
OSCILLATORY = "oscillatory"

DEFAULT_EPS_REL = 1e-10

_FIELDS = ("theta", "a", "b", "rho")


@dataclass(frozen=True)
class OUOperator:
    """L = -theta d^2 + (a x + b) d + rho x^2 in one spatial variable."""

    theta: float
    a: float
    b: float
    rho: float

    def __post_init__(self):
        for name in _FIELDS:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise OperatorError(f"{name} must be a number, got {value!r}", field=name)
            if not math.isfinite(value):
                raise OperatorError(f"{name} must be finite, got {value!r}", field=name)
        if self.theta <= 0:
            raise OperatorError("theta must be positive", field="theta")
        if self.rho == 0:
            raise OperatorError("rho must be nonzero", field="rho")

    def with_b(self, b: float) -> "OUOperator":
        return OUOperator(self.theta, self.a, b, self.rho)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "a": self.a, "b": self.b, "rho": self.rho}


@dataclass(frozen=True)
class ProductOperator:
    """Sum of independent 1-d operators, one per coordinate."""

    factors: Tuple[OUOperator, ...]

    def __post_init__(self):
        if len(self.factors) == 0:
            raise OperatorError("factors must contain at least one operator", field="factors")
        for i, factor in enumerate(self.factors):
            if not isinstance(factor, OUOperator):
                raise OperatorError(f"factors[{i}] is not an operator", field=f"factors[{i}]")

    @property
    def dimension(self) -> int:
        return len(self.factors)

    def to_dict(self) -> dict:
        return {"factors": [f.to_dict() for f in self.factors]}


@dataclass(frozen=True)
class Regime:
    """Discriminant classification.

    ``lambda0`` is sqrt(|discriminant|) for the hyperbolic and oscillatory
    regimes and 0.0 for the critical one.
    """

    kind: str
    discriminant: float
    lambda0: float = 0.0

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == HYPERBOLIC

    @property
    def is_critical(self) -> bool:
        return self.kind == CRITICAL

    @property
    def is_oscillatory(self) -> bool:
        return self.kind == OSCILLATORY

    def to_dict(self) -> dict:
        d = {"regime": self.kind}
        if not self.is_critical:
            d["lambda0"] = self.lambda0
        d["discriminant"] = self.discriminant
        return d


def discriminant(op: OUOperator) -> float:
    """a^2 + 4 rho theta, as floating arithmetic gives it."""
    return op.a * op.a + 4.0 * op.rho * op.theta


def classify(op: OUOperator, eps_rel: float = DEFAULT_EPS_REL) -> Regime:
    """Classify ``op`` by the sign of its discriminant.

    The critical band is |D| <= eps_rel * max(a^2, 4|rho theta|, 1); pass
    ``eps_rel=0`` for exact classification.
    """
    if eps_rel < 0:
        raise ValueError(f"eps_rel must be nonnegative, got {eps_rel}")
    delta = discriminant(op)
    scale = max(op.a * op.a, 4.0 * abs(op.rho * op.theta), 1.0)
    if abs(delta) <= eps_rel * scale:
        regime = Regime(CRITICAL, delta, 0.0)
    elif delta > 0:
        regime = Regime(HYPERBOLIC, delta, math.sqrt(delta))
    else:
        regime = Regime(OSCILLATORY, delta, math.sqrt(-delta))
    logger.debug(f"classify {op}: {regime.kind} (discriminant={delta!r})")
    return regime


def _operator_from_mapping(data: dict, where: str = "") -> OUOperator:
    if not isinstance(data, dict):
        raise OperatorError(f"{where or 'operator'} must be a JSON object", field=where or None)
    values = {}
    for name in _FIELDS:
        label = f"{where}.{name}" if where else name
        if name not in data:
            raise OperatorError(f"missing field {label}", field=label)
        value = data[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise OperatorError(f"{label} must be a number, got {value!r}", field=label)
        try:
            values[name] = float(value)
        except OverflowError:
            raise OperatorError(f"{label} must be finite", field=label) from None
    try:
        return OUOperator(**values)
    except OperatorError as e:
        label = f"{where}.{e.field}" if where else e.field
        raise OperatorError(str(e) if not where else f"{where}: {e}", field=label) from None


def parse_operator(text: str) -> Union[OUOperator, ProductOperator]:
    """Parse the JSON operator format (single operator or ``{"factors": [...]}``)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise OperatorError(f"malformed operator JSON: {e}") from None
    if isinstance(data, dict) and "factors" in data:
        factors = data["factors"]
        if not isinstance(factors, list) or not factors:
            raise OperatorError("factors must be a non-empty list", field="factors")
        parsed: List[OUOperator] = [
            _operator_from_mapping(f, where=f"factors[{i}]") for i, f in enumerate(factors)
        ]
        return ProductOperator(tuple(parsed))
    return _operator_from_mapping(data)


def load_operator_file(path: str) -> Union[OUOperator, ProductOperator]:
    """Read and parse an operator file. Unreadable files raise OperatorError."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise OperatorError(f"cannot read operator file {path}: {e}", field="op-file") from None
    return parse_operator(text)
