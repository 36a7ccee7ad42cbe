"""Command-line entry point: ``modgp {validate,eigen,zeros} --config run.json``.

Exit codes: 0 success, 1 domain or validation failure, 2 usage or config error.
"""

import argparse
import datetime
import logging
import os
import sys

from . import pathsim, reporting, spectral, warp, zeros
from .kernel import second_derivative_at_zero
from .config import load_config
from .exceptions import (
    ConfigError,
    DomainError,
    JitterExceeded,
    NotTwiceDifferentiable,
    QuadratureError,
    WarpingCSVError,
)
from .grid import make_grid

log = logging.getLogger("modgp")

VALIDATE_PROBES = 10_000


def _output_dir(cfg, args):
    base = args.out if args.out is not None else cfg.output_dir
    if args.overwrite:
        path = base
    else:
        stamp = datetime.datetime.now().strftime("run-%Y%m%dT%H%M%S")
        path = os.path.join(base, stamp)
        suffix = 1
        while os.path.exists(path):
            path = os.path.join(base, f"{stamp}-{suffix}")
            suffix += 1
    os.makedirs(path, exist_ok=True)
    return path


def _check_warping(cfg):
    report = warp.validate(cfg.warping, VALIDATE_PROBES, cfg.interval)
    if not report.validated:
        raise DomainError(f"warping is not admissible on {list(cfg.interval)}: {report.violations}")
    return report.warping


def cmd_validate(args):
    cfg = load_config(args.config, args.seed, strict_csv=False)
    report = warp.validate(cfg.warping, VALIDATE_PROBES, cfg.interval)
    out = _output_dir(cfg, args)
    reporting.write_json(os.path.join(out, "validation.json"), {"config": cfg.resolved, "report": report})
    status = "valid" if report.validated else f"INVALID, violations: {report.violations}"
    print(
        f"{cfg.warping.kind.value} on {list(report.interval)}: {status}; "
        f"theta' in [{report.min_derivative:.6g}, {report.max_derivative:.6g}]"
    )
    return 0 if report.validated else 1


def cmd_eigen(args):
    cfg = load_config(args.config, args.seed)
    w = _check_warping(cfg)
    k, op = cfg.kernel, cfg.operator
    g = make_grid(cfg.grid_rule, cfg.interval[0], cfg.interval[1], cfg.grid_size)
    invariance = spectral.check_eigenvalue_invariance(
        k, w, cfg.interval, cfg.grid_sizes, cfg.n_modes, op, cfg.grid_rule
    )
    transport = spectral.check_transport_eigenfunctions(k, w, g, cfg.n_modes, op)
    tests = spectral.default_test_functions(k, w, cfg.interval, cfg.grid_size, seed=cfg.seed, operator=op)
    conjugation = [
        spectral.check_conjugation(k, w, make_grid(cfg.grid_rule, *cfg.interval, n), tests, op)
        for n in cfg.grid_sizes
    ]
    out = _output_dir(cfg, args)
    for name, report, rows in [
        ("invariance", invariance, list(invariance.csv_rows())),
        ("transport", transport, list(transport.csv_rows())),
        ("conjugation", conjugation, [r for c in conjugation for r in c.csv_rows()]),
    ]:
        reporting.write_json(os.path.join(out, f"{name}.json"), {"config": cfg.resolved, "report": report})
        reporting.write_csv(os.path.join(out, f"{name}.csv"), rows)
    print(
        f"operator={op}: max eigenvalue rel. diff {invariance.max_relative_difference[-1]:.3e}; "
        f"max transport error {transport.max_error:.3e}; "
        f"max conjugation residual {conjugation[-1].max_residual:.3e}"
    )
    return 0


def cmd_zeros(args):
    cfg = load_config(args.config, args.seed)
    k = cfg.kernel
    # smoothness gate before any sampling
    second_derivative_at_zero(k)
    w = _check_warping(cfg) if cfg.T > 0 else cfg.warping
    mc = zeros.MonteCarloConfig(cfg.n_paths, cfg.seed, cfg.grid_density, args.jobs)
    report = zeros.compare(k, w, cfg.T, mc)
    out = _output_dir(cfg, args)
    reporting.write_json(os.path.join(out, "zeros.json"), {"config": cfg.resolved, "report": report})
    reporting.write_csv(os.path.join(out, "zeros.csv"), [report.to_dict()])
    if args.dump_paths and cfg.T > 0:
        grid = pathsim.warped_uniform_grid(w, cfg.T, cfg.grid_density)
        ens = pathsim.sample_paths(k, w, grid, cfg.n_paths, cfg.seed, args.jobs)
        pathsim.write_ensemble(ens, out)
    print(report.summary())
    print(f"note: {report.note}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="modgp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in [
        ("validate", cmd_validate, "check that the configured warping is admissible"),
        ("eigen", cmd_eigen, "eigenvalue invariance, eigenfunction transport and conjugation checks"),
        ("zeros", cmd_zeros, "expected zero counts: closed forms against Monte Carlo"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="experiment config (JSON)")
        p.add_argument("--out", default=None, help="output directory (overrides config output_dir)")
        p.add_argument("--overwrite", action="store_true", help="write directly into --out, no run subfolder")
        p.add_argument("--seed", type=int, default=None, help="unsigned 64-bit seed; overrides the config")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for path sampling")
        if name == "zeros":
            p.add_argument("--dump-paths", action="store_true", help="also write sampled paths as CSV")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, NotTwiceDifferentiable, JitterExceeded, QuadratureError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1
    except (ConfigError, WarpingCSVError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
