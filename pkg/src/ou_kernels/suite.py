"""Verification Suites: Runs named groups of oracles for one operator and keeps their reports."""

import logging
import math
from typing import Dict, List, Optional

from ou_kernels.exceptions import OUKernelError
from ou_kernels.geodesics import geodesic
from ou_kernels.hamiltonian import DEFAULT_RK4_DT
from ou_kernels.kernel import SEMIGROUP
from ou_kernels.monte_carlo import DEFAULT_BLOCK_SIZE
from ou_kernels.operator_core import DEFAULT_EPS_REL, OUOperator, Regime, classify
from ou_kernels.quadrature import CONSTANT, DEFAULT_HALF_WIDTH_SIGMAS, DEFAULT_NODES, Probe
from ou_kernels.verify import (
    DEFAULT_PROBE_WIDTH,
    DEFAULT_TOLERANCES,
    VerificationReport,
    chapman_kolmogorov_error,
    default_probe,
    delta_limit_error,
    delta_limit_rate,
    feynman_kac_error,
    geodesic_ode_error,
    geodesic_shooting_error,
    ode_residuals,
    pde_residual,
)

logger = logging.getLogger(__name__)

SUITES = ("pde", "ode", "semigroup", "delta", "shooting", "monte-carlo")
ALL = "all"

PDE_POINTS = ((0.3, -0.2), (0.0, 0.0), (-0.7, 0.4))
DELTA_X0 = 0.5
DELTA_T = 1e-3
SHOOTING_ENDPOINTS = (1.0, 0.0)
MC_STARTS = (0.0, 0.5)


def reference_time(regime: Regime) -> float:
    """0.5, pulled inside the first oscillatory window when lambda0 is large."""
    if regime.is_oscillatory:
        return min(0.5, 0.3 * math.pi / regime.lambda0)
    return 0.5


class VerificationSuite:
    """Runs suites of oracle checks for one operator and records the reports."""

    def __init__(
        self,
        op: OUOperator,
        tolerances: Optional[Dict[str, float]] = None,
        normalization: str = SEMIGROUP,
        probe_width: float = DEFAULT_PROBE_WIDTH,
        eps_rel: float = DEFAULT_EPS_REL,
        h_x_rel: float = 1e-4,
        h_t_rel: float = 1e-5,
        ode_h_rel: float = 1e-6,
        nodes: int = DEFAULT_NODES,
        half_width_sigmas: float = DEFAULT_HALF_WIDTH_SIGMAS,
        rk4_dt: float = DEFAULT_RK4_DT,
        paths: int = 100_000,
        dt: float = 1e-3,
        seed: int = 42,
        workers: int = 1,
        block_size: int = DEFAULT_BLOCK_SIZE,
        n_sigma: float = 3.0,
        bias_per_dt: float = 2.0,
    ):
        self.op = op
        self.tolerances = dict(DEFAULT_TOLERANCES)
        self.tolerances.update(tolerances or {})
        self.normalization = normalization
        self.probe_width = probe_width
        self.eps_rel = eps_rel
        self.h_x_rel = h_x_rel
        self.h_t_rel = h_t_rel
        self.ode_h_rel = ode_h_rel
        self.nodes = nodes
        self.half_width_sigmas = half_width_sigmas
        self.rk4_dt = rk4_dt
        self.paths = paths
        self.dt = dt
        self.seed = seed
        self.workers = workers
        self.block_size = block_size
        self.n_sigma = n_sigma
        self.bias_per_dt = bias_per_dt
        self.regime = classify(op, eps_rel)
        self.t_ref = reference_time(self.regime)
        self._reports: List[VerificationReport] = []
        self._skipped: List[Dict[str, str]] = []

    def record_report(self, report: VerificationReport):
        """Record a single oracle outcome."""
        self._reports.append(report)
        status = "pass" if report.passed else "FAIL"
        logger.debug(f"{report.check}: {report.measured:.3g} <= {report.tolerance:.3g} {status}")

    def _skip(self, suite: str, reason: str):
        logger.warning(f"skipping {suite} checks: {reason}")
        self._skipped.append({"suite": suite, "reason": reason})

    def run(self, suite: str = ALL) -> List[VerificationReport]:
        """Run one named suite (or all of them); returns the reports it produced."""
        names = SUITES if suite == ALL else (suite,)
        unknown = [n for n in names if n not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES + (ALL,)}")
        start = len(self._reports)
        for name in names:
            getattr(self, "_run_" + name.replace("-", "_"))()
        produced = self._reports[start:]
        failed = sum(1 for r in produced if not r.passed)
        logger.info(f"suite {suite}: {len(produced)} checks, {failed} failed, "
                    f"regime {self.regime.kind}")
        return produced

    def _run_pde(self):
        t = self.t_ref
        for x, x0 in PDE_POINTS:
            self.record_report(pde_residual(
                self.op, t, x, x0, h_t=self.h_t_rel * t, h_x=self.h_x_rel * (1.0 + abs(x)),
                tolerance=self.tolerances["pde"], normalization=self.normalization,
                eps_rel=self.eps_rel,
            ))

    def _run_ode(self):
        for t in (self.t_ref, 0.5 * self.t_ref):
            for report in ode_residuals(self.op, t, h=self.ode_h_rel * t,
                                        tolerance=self.tolerances["ode"],
                                        normalization=self.normalization, eps_rel=self.eps_rel):
                self.record_report(report)

    def _run_semigroup(self):
        t = self.t_ref
        self.record_report(chapman_kolmogorov_error(
            self.op, 0.4 * t, 0.6 * t, 0.5, -0.3, nodes=self.nodes,
            tolerance=self.tolerances["chapman_kolmogorov"], normalization=self.normalization,
            half_width_sigmas=self.half_width_sigmas, eps_rel=self.eps_rel,
        ))

    def _run_delta(self):
        probe = default_probe(DELTA_X0, width=self.probe_width)
        self.record_report(delta_limit_error(
            self.op, DELTA_T, DELTA_X0, probe, nodes=self.nodes,
            tolerance=self.tolerances["delta_limit"], normalization=self.normalization,
            half_width_sigmas=self.half_width_sigmas, eps_rel=self.eps_rel,
        ))
        self.record_report(delta_limit_rate(
            self.op, DELTA_X0, probe, tolerance=self.tolerances["delta_rate"],
            normalization=self.normalization, nodes=self.nodes, eps_rel=self.eps_rel,
        ))

    def _run_shooting(self):
        x0, x1 = SHOOTING_ENDPOINTS
        result = geodesic(self.op, x0, x1, self.eps_rel)
        if not result.is_unique:
            self._skip("shooting", f"geodesic from {x0} to {x1} is {result.kind}")
            return
        self.record_report(geodesic_ode_error(
            self.op, x0, x1, tolerance=self.tolerances["geodesic_ode"], eps_rel=self.eps_rel,
        ))
        try:
            report = geodesic_shooting_error(self.op, x0, x1, dt=self.rk4_dt,
                                             tolerance=self.tolerances["shooting"],
                                             eps_rel=self.eps_rel)
        except OUKernelError as e:
            logger.error(f"shooting oracle failed: {e}")
            report = VerificationReport("geodesic_shooting", float("inf"),
                                        self.tolerances["shooting"], {"error": str(e)})
        self.record_report(report)

    def _run_monte_carlo(self):
        probe = Probe(CONSTANT)
        for x_start in MC_STARTS:
            self.record_report(feynman_kac_error(
                self.op, self.t_ref, x_start, probe, self.paths, self.dt, self.seed,
                workers=self.workers, n_sigma=self.n_sigma, bias_per_dt=self.bias_per_dt,
                normalization=self.normalization, nodes=self.nodes,
                block_size=self.block_size, eps_rel=self.eps_rel,
            ))

    def get_stats(self) -> dict:
        """Counts of recorded checks and the worst measured/tolerance ratio."""
        total = len(self._reports)
        passed = sum(1 for r in self._reports if r.passed)
        ratios = [r.measured / r.tolerance if r.tolerance > 0 else float("inf")
                  for r in self._reports]
        return {
            "operator": self.op.to_dict(),
            "regime": self.regime.kind,
            "total_checks": total,
            "passed": passed,
            "failed": total - passed,
            "skipped": len(self._skipped),
            "worst_ratio": max(ratios) if ratios else 0.0,
        }

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self._reports)

    def get_skipped(self) -> List[Dict[str, str]]:
        return list(self._skipped)

    def get_history(self) -> List[VerificationReport]:
        """Return every report recorded so far, in run order."""
        return list(self._reports)
