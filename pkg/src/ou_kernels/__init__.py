"""Perturbed OU Kernels - geodesics and heat kernels of L = -theta d^2 + (ax + b) d + rho x^2."""

from ou_kernels.exceptions import OUKernelError
from ou_kernels.geodesics import geodesic
from ou_kernels.kernel import log_kernel, log_kernel_nd
from ou_kernels.operator_core import OUOperator, ProductOperator, classify

__all__ = [
    "OUKernelError",
    "OUOperator",
    "ProductOperator",
    "classify",
    "geodesic",
    "log_kernel",
    "log_kernel_nd",
]
__version__ = "0.1.0"
