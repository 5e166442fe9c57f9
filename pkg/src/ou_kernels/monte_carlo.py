"""Monte Carlo: Feynman-Kac estimates of (e^{-tL} phi)(x).

Paths of dX = -(a X + b) ds + sqrt(2 theta) dW are advanced with
Euler-Maruyama, and the weight exp(-rho * integral of X^2) accumulates by
left-endpoint sums. Paths are grouped in fixed-size blocks; block j draws
from its own Philox stream keyed by (seed, j), so the estimate does not
depend on how many workers run the blocks.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np

from ou_kernels.operator_core import OUOperator
from ou_kernels.quadrature import Probe

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 4096


class MCEstimate:
    """Weighted sample mean with its standard error."""

    def __init__(self, mean: float, standard_error: float, paths: int, seed: int, dt: float):
        self.mean = mean
        self.standard_error = standard_error
        self.paths = paths  # paths actually simulated
        self.seed = seed
        self.dt = dt  # effective step, t / ceil(t / dt)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "standard_error": self.standard_error,
            "paths": self.paths,
            "seed": self.seed,
            "dt": self.dt,
        }


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _simulate_block(op: OUOperator, t: float, x_start: float, probe: Probe, n_paths: int,
                    n_steps: int, seed: int, block: int) -> Tuple[int, float, float]:
    """(count, mean, M2) of the weighted probe values for one block."""
    rng = _block_rng(seed, block)
    h = t / n_steps
    noise = math.sqrt(2.0 * op.theta * h)
    x = np.full(n_paths, float(x_start))
    log_w = np.zeros(n_paths)
    for _ in range(n_steps):
        log_w -= op.rho * h * x * x
        x = x - (op.a * x + op.b) * h + noise * rng.standard_normal(n_paths)
    values = np.exp(log_w) * probe(x)
    mean = float(values.mean())
    m2 = float(np.sum((values - mean) ** 2))
    return n_paths, mean, m2


def _merge(stats: List[Tuple[int, float, float]]) -> Tuple[int, float, float]:
    """Chan's pairwise update, applied in block order."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in stats:
        total = n + nb
        delta = mb - mean
        mean += delta * nb / total
        m2 += m2b + delta * delta * n * nb / total
        n = total
    return n, mean, m2


def feynman_kac_estimate(op: OUOperator, t: float, x_start: float, probe: Probe, paths: int,
                         dt: float, seed: int, workers: int = 1,
                         block_size: int = DEFAULT_BLOCK_SIZE) -> MCEstimate:
    """Estimate E[exp(-rho * int_0^t X^2 ds) phi(X_t) | X_0 = x_start]."""
    if paths <= 0:
        raise ValueError(f"paths must be positive, got {paths}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if seed < 0 or seed >= 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if block_size <= 0:
        raise ValueError(f"block_size must be positive, got {block_size}")

    n_steps = max(1, int(math.ceil(t / dt - 1e-9)))
    sizes = [block_size] * (paths // block_size)
    if paths % block_size:
        sizes.append(paths % block_size)
    logger.debug(f"feynman-kac: {paths} paths in {len(sizes)} blocks, {n_steps} steps, "
                 f"{workers} worker(s)")

    def run(block: int):
        return _simulate_block(op, t, x_start, probe, sizes[block], n_steps, seed, block)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, range(len(sizes))))
    else:
        stats = [run(j) for j in range(len(sizes))]

    n, mean, m2 = _merge(stats)
    variance = m2 / (n - 1) if n > 1 else 0.0
    estimate = MCEstimate(mean, math.sqrt(variance / n), n, seed, t / n_steps)
    logger.info(f"feynman-kac estimate {estimate.mean:.6g} +- {estimate.standard_error:.2g}")
    return estimate
