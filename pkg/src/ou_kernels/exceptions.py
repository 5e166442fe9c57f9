"""Exceptions: Error types raised across the ou_kernels package."""

from typing import Optional


class OUKernelError(Exception):
    """Base class for every domain error raised by ou_kernels."""


class OperatorError(OUKernelError, ValueError):
    """Invalid operator data. ``field`` names the offending field."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class SingularTimeError(OUKernelError, ValueError):
    """Raised when t falls inside the window around a conjugate time k*pi/lambda0."""

    def __init__(self, t: float, k: int, t_singular: float, window: float,
                 factor: Optional[int] = None):
        where = f" (factor {factor})" if factor is not None else ""
        super().__init__(
            f"t={t!r} is within {window:.3g} of singular time "
            f"t_{k}={t_singular!r}{where}"
        )
        self.t = t
        self.k = k
        self.t_singular = t_singular
        self.window = window
        self.factor = factor

    def with_factor(self, factor: int) -> "SingularTimeError":
        return SingularTimeError(self.t, self.k, self.t_singular, self.window, factor)

    def to_dict(self) -> dict:
        d = {
            "error": "singular_time",
            "t": self.t,
            "k": self.k,
            "t_singular": self.t_singular,
            "window": self.window,
        }
        if self.factor is not None:
            d["factor"] = self.factor
        return d


class DimensionError(OUKernelError, ValueError):
    """Vector lengths do not match the number of operator factors."""


class QuadratureError(OUKernelError, ArithmeticError):
    """The log-quadratic integrand is not negative definite in the integration variable."""


class ShootingError(OUKernelError, RuntimeError):
    """Secant iteration on the initial momentum did not converge."""
