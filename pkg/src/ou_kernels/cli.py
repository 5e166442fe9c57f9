"""Command Line: classify, geodesic, kernel, verify, sample and singular-times subcommands.

Results go to stdout as one JSON document or a CSV stream; logs and the
verification table go to stderr. Exit codes: 0 success, 1 domain error,
2 usage error, 3 failed verification suite.
"""

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import yaml

from ou_kernels.exceptions import (
    DimensionError,
    OperatorError,
    OUKernelError,
    QuadratureError,
    ShootingError,
    SingularTimeError,
)
from ou_kernels.geodesics import DEFAULT_ENDPOINT_TOL, DEFAULT_RESONANCE_TOL, family_eval, geodesic, geodesic_eval
from ou_kernels.kernel import NORMALIZATIONS, SYMMETRIC, coefficients, log_kernel_nd, singular_times
from ou_kernels.operator_core import (
    DEFAULT_EPS_REL,
    OUOperator,
    ProductOperator,
    classify,
    load_operator_file,
    parse_operator,
)
from ou_kernels.reporting import ReportFormatter
from ou_kernels.suite import ALL, SUITES, VerificationSuite

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DEFAULT_CONFIG = "config.yaml"
DEFAULT_RESOLUTION = 21
DEFAULT_GEODESIC_SAMPLES = 101

ERROR_NAMES = {
    SingularTimeError: "singular_time",
    QuadratureError: "quadrature",
    ShootingError: "shooting",
    DimensionError: "dimension",
}

Operator = Union[OUOperator, ProductOperator]


def _number_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number or comma-separated numbers: {text!r}")


def _number_range(text: str) -> List[float]:
    values = _number_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--op", help="Operator JSON, e.g. '{\"theta\":1,\"a\":1,\"b\":0,\"rho\":1}'")
    source.add_argument("--op-file", help="Path to an operator JSON file")
    common.add_argument("--format", choices=["json", "csv"], default=None, help="Output format")
    common.add_argument("--eps-class", type=float, default=None,
                        help="Relative width of the critical band")
    common.add_argument("--config", default=DEFAULT_CONFIG, help="Config file path")
    common.add_argument("--verbose", "-v", action="store_true", help="Verbose logging")

    parser = argparse.ArgumentParser(
        prog="ou-kernels",
        description="Geodesics and heat kernels of perturbed Ornstein-Uhlenbeck operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common], help="Discriminant and regime")

    geo = sub.add_parser("geodesic", parents=[common], help="Geodesic joining x0 to x1")
    geo.add_argument("--x0", type=float, required=True)
    geo.add_argument("--x1", type=float, required=True)
    geo.add_argument("--samples", type=int, default=None, help="Number of s-samples on [0, 1]")
    geo.add_argument("--c2", type=float, default=0.0, help="Free coefficient of a singular family")

    ker = sub.add_parser("kernel", parents=[common], help="Heat kernel value")
    ker.add_argument("--t", type=float, required=True)
    ker.add_argument("--x", type=_number_list, required=True)
    ker.add_argument("--x0", type=_number_list, required=True)
    ker.add_argument("--normalization", choices=NORMALIZATIONS, default=None)

    ver = sub.add_parser("verify", parents=[common], help="Run verification suites")
    ver.add_argument("--suite", choices=SUITES + (ALL,), default=ALL)
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--paths", type=int, default=None)
    ver.add_argument("--dt", type=float, default=None)
    ver.add_argument("--workers", type=int, default=None)
    ver.add_argument("--normalization", choices=NORMALIZATIONS, default=None)

    smp = sub.add_parser("sample", parents=[common], help="CSV grid of kernel or geodesic values")
    smp.add_argument("--target", choices=["kernel", "geodesic"], default="kernel")
    smp.add_argument("--t-range", type=_number_range, default=[0.1, 1.0])
    smp.add_argument("--x-range", type=_number_range, default=[-2.0, 2.0])
    smp.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    smp.add_argument("--x0", type=float, default=0.0)
    smp.add_argument("--x1", type=float, default=0.0)
    smp.add_argument("--samples", type=int, default=DEFAULT_GEODESIC_SAMPLES)
    smp.add_argument("--c2", type=float, default=0.0)
    smp.add_argument("--normalization", choices=NORMALIZATIONS, default=None)

    sng = sub.add_parser("singular-times", parents=[common], help="Conjugate times up to t-max")
    sng.add_argument("--t-max", type=float, required=True)

    return parser


def load_config(path: str) -> dict:
    """YAML config, or {} when the file does not exist."""
    config_path = Path(path)
    if not config_path.exists():
        logger.debug(f"no config at {path}, using built-in defaults")
        return {}
    with open(config_path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def _setup_logging(verbose: bool, level_name: str = "INFO"):
    level = logging.DEBUG if verbose else getattr(logging, str(level_name).upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def _finite(value):
    """Replace non-finite floats by None so stdout stays valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def _emit_json(doc: dict):
    sys.stdout.write(json.dumps(_finite(doc), allow_nan=False) + "\n")


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence[float]]):
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["%.17g" % v for v in row])


def _grid(lo: float, hi: float, n: int) -> List[float]:
    if n < 1:
        raise ValueError(f"resolution must be positive, got {n}")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _unit_samples(n: int) -> List[float]:
    if n < 2:
        raise ValueError(f"samples must be at least 2, got {n}")
    return [j / (n - 1) for j in range(n)]


def _single(op: Operator, command: str) -> OUOperator:
    if isinstance(op, ProductOperator):
        raise ValueError(f"{command} takes a single operator, not a product of {op.dimension}")
    return op


def _as_product(op: Operator) -> ProductOperator:
    return op if isinstance(op, ProductOperator) else ProductOperator((op,))


def _geodesic_points(result, c2: float, samples: List[float]) -> List[List[float]]:
    if result.is_unique:
        return [[s, geodesic_eval(result.path, s)] for s in samples]
    if result.family is not None:
        return [[s, family_eval(result.family, c2, s)] for s in samples]
    return []


def cmd_classify(args, op: Operator, config: dict) -> int:
    if isinstance(op, ProductOperator):
        _emit_json({"factors": [classify(f, args.eps_rel).to_dict() for f in op.factors]})
    else:
        _emit_json(classify(op, args.eps_rel).to_dict())
    return 0


def cmd_geodesic(args, op: Operator, config: dict) -> int:
    op = _single(op, "geodesic")
    geo_cfg = config.get("geodesic", {})
    result = geodesic(
        op, args.x0, args.x1, args.eps_rel,
        resonance_tol=geo_cfg.get("resonance_tol", DEFAULT_RESONANCE_TOL),
        endpoint_tol=geo_cfg.get("endpoint_tol", DEFAULT_ENDPOINT_TOL),
    )
    if args.format == "csv":
        points = _geodesic_points(result, args.c2, _unit_samples(args.samples or DEFAULT_GEODESIC_SAMPLES))
        if not points:
            logger.warning(f"no geodesic joins {args.x0} and {args.x1}; writing header only")
        _emit_csv(("s", "x"), points)
        return 0
    doc = result.to_dict()
    if args.samples is not None:
        points = _geodesic_points(result, args.c2, _unit_samples(args.samples))
        if points:
            doc["samples"] = [{"s": s, "x": x} for s, x in points]
            if result.family is not None:
                doc["c2"] = args.c2
    _emit_json(doc)
    return 0


def cmd_kernel(args, op: Operator, config: dict) -> int:
    normalization = args.normalization or config.get("kernel", {}).get("normalization", SYMMETRIC)
    log_p = log_kernel_nd(_as_product(op), args.t, args.x, args.x0, normalization, args.eps_rel)
    if args.format == "csv":
        if len(args.x) != 1 or len(args.x0) != 1:
            raise ValueError("csv kernel output takes scalar --x and --x0")
        _emit_csv(("t", "x", "x0", "log_p"), [[args.t, args.x[0], args.x0[0], log_p]])
        return 0
    doc: Dict[str, object] = {"t": args.t, "normalization": normalization}
    if isinstance(op, ProductOperator):
        doc.update({"dimension": op.dimension, "x": args.x, "x0": args.x0})
    else:
        coeffs = coefficients(op, args.t, normalization, args.eps_rel)
        doc.update({"x": args.x[0], "x0": args.x0[0], "regime": classify(op, args.eps_rel).kind,
                    "window": coeffs.window, "coefficients": coeffs.to_dict()})
    doc["log_p"] = log_p
    doc["p"] = math.exp(log_p) if log_p < 709.0 else None
    _emit_json(doc)
    return 0


def _sample_kernel(args, op: Operator, config: dict):
    normalization = args.normalization or config.get("kernel", {}).get("normalization", SYMMETRIC)
    pop = _as_product(op)
    n = pop.dimension
    rows = []
    for t in _grid(args.t_range[0], args.t_range[1], args.resolution):
        try:
            for x in _grid(args.x_range[0], args.x_range[1], args.resolution):
                # product operators are sampled along the diagonal
                log_p = log_kernel_nd(pop, t, [x] * n, [args.x0] * n, normalization, args.eps_rel)
                rows.append([t, x, args.x0, log_p])
        except SingularTimeError as e:
            logger.warning(f"skipping t={t!r}: {e}")
    _emit_csv(("t", "x", "x0", "log_p"), rows)


def cmd_sample(args, op: Operator, config: dict) -> int:
    if args.format == "json":
        raise ValueError("sample writes CSV only")
    if args.target == "geodesic":
        op = _single(op, "sample --target geodesic")
        result = geodesic(op, args.x0, args.x1, args.eps_rel)
        points = _geodesic_points(result, args.c2, _unit_samples(args.samples))
        if not points:
            logger.warning(f"no geodesic joins {args.x0} and {args.x1}; writing header only")
        _emit_csv(("s", "x"), points)
    else:
        _sample_kernel(args, op, config)
    return 0


def cmd_singular_times(args, op: Operator, config: dict) -> int:
    if isinstance(op, ProductOperator):
        _emit_json({"t_max": args.t_max,
                    "factors": [singular_times(f, args.t_max, args.eps_rel) for f in op.factors]})
    else:
        _emit_json({"t_max": args.t_max, "regime": classify(op, args.eps_rel).kind,
                    "singular_times": singular_times(op, args.t_max, args.eps_rel)})
    return 0


def cmd_verify(args, op: Operator, config: dict) -> int:
    op = _single(op, "verify")
    verify_cfg = config.get("verify", {})
    mc_cfg = config.get("monte_carlo", {})
    fd_cfg = config.get("finite_difference", {})
    quad_cfg = config.get("quadrature", {})
    seed = args.seed if args.seed is not None else mc_cfg.get("seed", 42)
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")

    suite = VerificationSuite(
        op,
        tolerances=verify_cfg.get("tolerances"),
        normalization=args.normalization or verify_cfg.get("normalization", "semigroup"),
        probe_width=verify_cfg.get("probe_width", 0.5),
        eps_rel=args.eps_rel,
        h_x_rel=fd_cfg.get("h_x_rel", 1e-4),
        h_t_rel=fd_cfg.get("h_t_rel", 1e-5),
        ode_h_rel=fd_cfg.get("ode_h_rel", 1e-6),
        nodes=quad_cfg.get("nodes", 200),
        half_width_sigmas=quad_cfg.get("half_width_sigmas", 12.0),
        rk4_dt=config.get("geodesic", {}).get("rk4_dt", 1e-4),
        paths=args.paths if args.paths is not None else mc_cfg.get("paths", 100_000),
        dt=args.dt if args.dt is not None else mc_cfg.get("dt", 1e-3),
        seed=seed,
        workers=args.workers if args.workers is not None else mc_cfg.get("workers", 1),
        block_size=mc_cfg.get("block_size", 4096),
        n_sigma=mc_cfg.get("n_sigma", 3.0),
        bias_per_dt=mc_cfg.get("bias_per_dt", 2.0),
    )
    reports = suite.run(args.suite)
    stats = suite.get_stats()

    formatter = ReportFormatter()
    print(formatter.format_table(reports), file=sys.stderr)
    print(formatter.format_summary(stats), file=sys.stderr)

    _emit_json({
        "suite": args.suite,
        "seed": seed,
        "stats": stats,
        "skipped": suite.get_skipped(),
        "reports": [r.to_dict() for r in reports],
    })
    return 0 if suite.all_passed else 3


COMMANDS: Dict[str, Callable[..., int]] = {
    "classify": cmd_classify,
    "geodesic": cmd_geodesic,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "singular-times": cmd_singular_times,
}


def _load_operator(args) -> Operator:
    if args.op is not None:
        return parse_operator(args.op)
    if args.op_file is not None:
        return load_operator_file(args.op_file)
    raise OperatorError("an operator is required: pass --op or --op-file", field="op")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        config = load_config(args.config)
    except (OSError, yaml.YAMLError) as e:
        _setup_logging(args.verbose)
        logger.error(f"cannot load config {args.config}: {e}")
        return 2
    _setup_logging(args.verbose, config.get("logging", {}).get("level", "INFO"))

    if args.eps_class is None:
        args.eps_rel = config.get("classification", {}).get("eps_rel", DEFAULT_EPS_REL)
    else:
        args.eps_rel = args.eps_class
    if args.format is None:
        args.format = "csv" if args.command == "sample" else "json"
    if args.format == "csv" and args.command in ("classify", "verify", "singular-times"):
        print(f"error: {args.command} writes JSON only", file=sys.stderr)
        return 2

    try:
        op = _load_operator(args)
        return COMMANDS[args.command](args, op, config)
    except OperatorError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SingularTimeError as e:
        logger.error(str(e))
        _emit_json(e.to_dict())
        return 1
    except OUKernelError as e:
        logger.error(str(e))
        _emit_json({"error": ERROR_NAMES.get(type(e), "domain"), "message": str(e)})
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
