"""Command-line interface.

Subcommands: bound, solve, validate, sweep, check-assumptions.  Exit codes:
0 success, 1 hypothesis/assumption violation (valid run, conditions unmet),
2 numerical failure, 3 configuration error.  Errors are also emitted as one
structured JSON object on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .certificate import constant_chain, section5_chain
from .config import load_config
from .errors import ConfigError, GapcertError
from .geometry import assumption_check, measure_certificate_inputs
from .solver import EllipticProblem, assemble, lowest_eigenpairs, normalize
from .validate import certify_and_solve
from .sweeps import run_sweep
from . import report


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gapcert",
        description="Certified spectral-gap lower bounds with numerical validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("bound", "evaluate the certificate's constant chain"),
        ("solve", "discretize and compute the two lowest eigenpairs"),
        ("validate", "full certify-and-solve run with all checks"),
        ("sweep", "run the configured parameter sweep"),
        ("check-assumptions", "verify the standing geometric assumptions"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--precision", type=int, default=None, help="mantissa bits")
        p.add_argument("--seed", type=int, default=None, help="solver seed")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="field export format")
        p.add_argument("--plots", action=argparse.BooleanOptionalAction, default=None,
                       help="render figures next to the data files")
    return parser


def _apply_overrides(cfg, args):
    if args.precision is not None:
        cfg = dataclasses.replace(
            cfg, certificate=dataclasses.replace(cfg.certificate, precision_bits=args.precision)
        )
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, solver=dataclasses.replace(cfg.solver, seed=args.seed))
    out = cfg.output
    if args.out is not None:
        out = dataclasses.replace(out, dir=args.out)
    if args.format is not None:
        out = dataclasses.replace(out, format=args.format)
    if args.plots is not None:
        out = dataclasses.replace(out, plots=args.plots)
    return dataclasses.replace(cfg, output=out)


def _measured_inputs(cfg):
    if cfg.explicit_inputs is not None:
        return cfg.explicit_inputs, None
    problem = cfg.require_problem()
    m = cfg.measurement
    return measure_certificate_inputs(
        problem.domain, problem.omega0, problem.omega_hat, problem.A, problem.V,
        q=cfg.certificate.q,
        vhat_exponent_variant=cfg.certificate.vhat_exponent_variant,
        step=m.step, refine_tol=m.refine_tol, max_levels=m.max_levels,
        supersample=m.supersample, volume_method=m.volume_method, seed=m.seed,
    )


def _cmd_bound(cfg, outdir):
    inputs, record = _measured_inputs(cfg)
    chain = constant_chain(inputs, cfg.certificate.precision_bits)
    s5 = section5_chain(inputs, cfg.certificate.precision_bits)
    payload = {
        "inputs": dataclasses.asdict(inputs),
        "constants": [
            {"name": n, "sign": s, "log10": m} for n, s, m in chain.as_records()
        ],
        "branches": {"alpha": chain.alpha_branch, "c1": chain.c1_branch},
        "log10_bound": dict(zip(("name", "sign", "log10"), chain.as_records()[-3])),
        "bound_rendered": report.render_log10(chain.bound),
        "measurement": record.as_dict() if record else None,
    }
    report.write_json(os.path.join(outdir, "bound.json"), payload)
    print(report.chain_table(chain))
    print(f"\nbound = {report.render_log10(chain.bound)}")
    return 0


def _cmd_check_assumptions(cfg, outdir):
    problem = cfg.require_problem()
    rep = assumption_check(
        problem.domain, problem.omega0, problem.omega_hat, problem.V,
        sample_step=cfg.measurement.step,
    )
    report.write_json(os.path.join(outdir, "assumptions.json"), rep.as_dict())
    for c in rep.checks:
        status = {True: "pass", False: "FAIL", None: "deferred"}[c.passed]
        print(f"{c.name:>28s}: {status:>8s}  measured={c.measured}  ({c.requirement})")
    return 0 if rep.all_passed else 1


def _cmd_solve(cfg, outdir):
    problem = cfg.require_problem()
    op = assemble(
        EllipticProblem(problem.domain, problem.A, problem.V, problem.omega0,
                        problem.omega_hat),
        cfg.solver.h, averaging=cfg.solver.averaging,
    )
    result = lowest_eigenpairs(op, k=2, tol=cfg.solver.tol, seed=cfg.solver.seed)
    result = normalize(result, problem.omega0)
    payload = {
        "lambda0": result.lambda0,
        "lambda1": result.lambda1,
        "lambda2": result.lambda2,
        "gap": result.gap,
        "residual0": result.residual0,
        "residual1": result.residual1,
        "flags": result.flags,
        "normalization": result.normalization,
        "h": op.grid.h,
        "unknowns": op.num_unknowns,
    }
    report.write_json(os.path.join(outdir, "eigen.json"), payload)

    class _Rec:
        eigen = result

    report.export_fields(outdir, _Rec, fmt=cfg.output.format)
    if cfg.output.plots:
        report.plot_eigenfunctions(os.path.join(outdir, "eigenfunctions.png"), _Rec)
    print(f"lambda0 = {result.lambda0:.12g}")
    print(f"lambda1 = {result.lambda1:.12g}")
    print(f"gap     = {result.gap:.12g}")
    print(f"residuals = {result.residual0:.3e}, {result.residual1:.3e}")
    return 0


def _cmd_validate(cfg, outdir):
    record = certify_and_solve(cfg)
    report.write_json(os.path.join(outdir, "validation.json"), record.as_dict())
    if cfg.output.plots and record.eigen is not None:
        report.plot_eigenfunctions(os.path.join(outdir, "eigenfunctions.png"), record)
    print(f"outcome: {record.outcome}")
    print(f"lambda0 = {record.lambda0:.12g}, lambda1 = {record.lambda1:.12g}")
    if record.relative_gap == record.relative_gap:
        print(f"relative gap = {record.relative_gap:.6g}")
    print(f"bound = {report.render_log10(record.chain.bound)}")
    for k, v in sorted(record.checks.items()):
        print(f"  check {k:<18s}: {'pass' if v else ('n/a' if v is None else 'FAIL')}")
    return 0 if record.outcome == "certified" else 1


def _cmd_sweep(cfg, outdir):
    result = run_sweep(cfg)
    report.write_sweep_csv(os.path.join(outdir, f"sweep_{result.regime}.csv"), result)
    report.write_json(
        os.path.join(outdir, f"sweep_{result.regime}_summary.json"),
        report.sweep_summary(result),
    )
    if cfg.output.plots:
        report.plot_sweep(os.path.join(outdir, f"sweep_{result.regime}.png"), result)
    ncert = len(result.certified_points())
    print(f"sweep {result.regime}: {len(result.points)} points, {ncert} certified")
    for key, val in result.fits.items():
        print(f"  {key}: {val}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        outdir = cfg.output.dir
        os.makedirs(outdir, exist_ok=True)
        handler = {
            "bound": _cmd_bound,
            "solve": _cmd_solve,
            "validate": _cmd_validate,
            "sweep": _cmd_sweep,
            "check-assumptions": _cmd_check_assumptions,
        }[args.command]
        return handler(cfg, outdir)
    except GapcertError as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc),
                             "exit_code": exc.exit_code}}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
