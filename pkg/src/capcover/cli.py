"""Batch command-line entry point.

Subcommands: caps, simulate, bounds, verify, optimize. Outputs are CSV or
JSON records; every record embeds the tool version, the fully resolved
parameters, and the master seed, so re-running any record reproduces its
numeric payload exactly. Wall-clock timing goes to stderr, keeping output
files byte-identical across runs.

Exit codes: 0 ok, 1 verification failure, 2 usage or domain error,
3 statistical self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

from . import __version__
from .bounds import (
    TheoremInputs,
    efr_reference,
    euler_report,
    ldiv_upper_constant,
    theorem_bounds,
    threshold_caps,
)
from .caps import (
    cap_mass_from_radius,
    eta_bound,
    gaussian_halfspace_offset,
    mass_upper_limit,
    radius_from_mass,
)
from .coverage import expected_random_coverage, mean_coverage_over_configs
from .errors import CapCoverError, DomainError
from .optimize import OptimizerConfig, local_search
from .sampling import RngSpec
from .verify import run_suite

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_SELFCHECK = 3


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _emit(records: list[dict], fmt: str, out: str | None) -> None:
    if fmt == "json":
        payload = json.dumps(records, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(records[0].keys()))
        writer.writeheader()
        writer.writerows(records)
        payload = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        print(f"[capcover] wrote {len(records)} record(s) to {out}", file=sys.stderr)
    else:
        sys.stdout.write(payload)


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config, encoding="utf-8") as fh:
        overrides = json.load(fh)
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise DomainError(f"config file key {key!r} is not a parameter of this command")
        current = getattr(args, attr)
        if current != value:
            print(
                f"[capcover] warning: config file overrides --{key} ({current!r} -> {value!r})",
                file=sys.stderr,
            )
        setattr(args, attr, value)


def cmd_caps(args) -> int:
    if (args.mass is None) == (args.radius is None):
        raise DomainError("give exactly one of --mass or --radius")
    d = args.dim
    if args.mass is not None:
        mass = args.mass
        radius = radius_from_mass(d, mass)
    else:
        radius = args.radius
        mass = cap_mass_from_radius(d, radius)
    roundtrip = abs(cap_mass_from_radius(d, radius) - mass) / max(mass, 1e-300)
    record = {
        "version": __version__,
        "d": d,
        "mass": mass,
        "geodesicRadius": radius,
        "cosThreshold": math.cos(radius),
        "gaussOffset": gaussian_halfspace_offset(mass) if 0.0 < mass < 0.5 else None,
        "etaBound": eta_bound(mass),
        "massUpperLimit": mass_upper_limit(d),
        "roundtripRelResidual": roundtrip,
    }
    _emit([record], args.format, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    records = []
    worst = 0.0
    for d in args.dims:
        for n in args.ncaps:
            for alpha in args.alphas:
                est = mean_coverage_over_configs(
                    d, n, alpha, RngSpec(args.seed), args.configs, args.samples,
                    n_workers=args.threads,
                )
                expected = expected_random_coverage(n, alpha)
                z = (est.mean - expected) / est.std_error if est.std_error > 0 else 0.0
                worst = max(worst, abs(z))
                records.append(
                    {
                        "version": __version__,
                        "d": d,
                        "N": n,
                        "alpha": alpha,
                        "mean": est.mean,
                        "stdError": est.std_error,
                        "expected": expected,
                        "zScore": z,
                        "nConfigs": args.configs,
                        "nSamplesPerConfig": args.samples,
                        "seed": args.seed,
                    }
                )
    _emit(records, args.format, args.out)
    if worst > 6.0:
        print(f"[capcover] self-check failed: worst |z| = {worst:.2f} > 6", file=sys.stderr)
        return EXIT_SELFCHECK
    return EXIT_OK


def cmd_bounds(args) -> int:
    records = []
    euler_by_d = {br.d: br for br in euler_report([d for d in args.dims if d >= 5])}
    for d in args.dims:
        for n in args.ncaps:
            for alpha in args.alphas:
                base = {
                    "version": __version__,
                    "d": d,
                    "N": n,
                    "alpha": alpha,
                    "efrReference": efr_reference(),
                }
                if d < 5:
                    records.append(
                        base | {"note": "precondition unmet: bounds need d >= 5"}
                    )
                    continue
                rep = theorem_bounds(TheoremInputs(d=d, n_caps=n, alpha=alpha))
                row = base | rep.to_record()
                if alpha == 1.0:
                    br = euler_by_d[d]
                    row["eLower"] = br.e_lower
                    row["eUpper"] = br.e_upper
                records.append(row)
    _emit(records, args.format, args.out)
    print(f"[capcover] ldiv upper constant = {ldiv_upper_constant():.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = run_suite(args.suite, RngSpec(args.seed), n_workers=args.threads)
    records = [{"version": __version__, "suite": args.suite, "seed": args.seed} | r.to_record() for r in reports]
    if args.out:
        _emit(records, args.format, args.out)
    width = max(len(r.name) for r in reports)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  lhs={r.lhs:.6e}  rhs={r.rhs:.6e}  {r.detail}")
    failures = sum(not r.passed for r in reports)
    print(f"[capcover] suite {args.suite!r}: {len(reports) - failures}/{len(reports)} passed", file=sys.stderr)
    return EXIT_VERIFY_FAIL if failures else EXIT_OK


def cmd_optimize(args) -> int:
    cfg = OptimizerConfig(
        steps=args.steps,
        restarts=args.restarts,
        initial_step_angle=args.step_angle,
        decay=args.decay,
        crn_samples=args.crn_samples,
        rng=RngSpec(args.seed),
        antipodal=args.antipodal,
    )
    trace = local_search(args.dim, args.ncaps, args.alpha, cfg)
    record = {
        "version": __version__,
        "d": args.dim,
        "N": args.ncaps,
        "alpha": args.alpha,
        "seed": args.seed,
        "steps": args.steps,
        "restarts": args.restarts,
        "crnSamples": args.crn_samples,
        "antipodal": args.antipodal,
    } | trace.to_record()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(record, fh, indent=2)
        print(f"[capcover] wrote trace to {args.out}", file=sys.stderr)
    if trace.theorem_upper is None:
        upper_text = "not applicable (d < 5)"
    elif trace.theorem_upper >= 1.0 or args.ncaps < threshold_caps(args.dim):
        upper_text = f"vacuous ({trace.theorem_upper:.4f})"
    else:
        upper_text = f"{trace.theorem_upper:.4f}"
    print(
        f"best={trace.best_coverage.mean:.6f} (se={trace.best_coverage.std_error:.2e})  "
        f"baseline={trace.random_baseline:.6f}  upper={upper_text}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capcover",
        description="Partial sphere coverings by geodesic caps: simulation, bounds, verification.",
    )
    parser.add_argument("--version", action="version", version=f"capcover {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="csv"):
        p.add_argument("--seed", type=int, default=0, help="master seed (64-bit unsigned)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker count; results do not depend on it")
        p.add_argument("--out", type=str, default=None, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        p.add_argument("--config", type=str, default=None,
                       help="JSON file of parameter overrides (wins over flags, with a warning)")

    p = sub.add_parser("caps", help="cap mass/radius/threshold/offset conversions")
    p.add_argument("--dim", "-d", type=int, required=True)
    p.add_argument("--mass", "-m", type=float, default=None)
    p.add_argument("--radius", "-r", type=float, default=None)
    common(p, fmt_default="json")
    p.set_defaults(func=cmd_caps)

    p = sub.add_parser("simulate", help="random-covering sweep vs. the closed form")
    p.add_argument("--dims", type=_parse_int_list, default=[5, 10, 50])
    p.add_argument("--ncaps", "-n", type=_parse_int_list, default=[1000])
    p.add_argument("--alphas", "-a", type=_parse_float_list, default=[0.5, 1.0])
    p.add_argument("--configs", type=int, default=20, help="random configurations per cell")
    p.add_argument("--samples", type=int, default=20000, help="MC points per configuration")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="closed-form bound tables")
    p.add_argument("--dims", type=_parse_int_list, default=[5, 10, 100, 1000])
    p.add_argument("--ncaps", "-n", type=_parse_int_list, default=[10**6])
    p.add_argument("--alphas", "-a", type=_parse_float_list, default=[1.0])
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="numerical verification suites")
    p.add_argument("--suite", choices=("all", "zone", "cone", "sidak", "scalar", "conemass"),
                   default="all")
    common(p, fmt_default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", help="hill-climb cap centers for coverage")
    p.add_argument("--dim", "-d", type=int, required=True)
    p.add_argument("--ncaps", "-n", type=int, required=True)
    p.add_argument("--alpha", "-a", type=float, required=True)
    p.add_argument("--steps", type=int, default=4000)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--step-angle", type=float, default=0.5)
    p.add_argument("--decay", type=float, default=0.85)
    p.add_argument("--crn-samples", type=int, default=16384)
    p.add_argument("--antipodal", action="store_true")
    common(p, fmt_default="json")
    p.set_defaults(func=cmd_optimize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        _apply_config_file(args)
        code = args.func(args)
    except CapCoverError as exc:
        print(f"[capcover] error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"[capcover] error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"[capcover] {args.command} finished in {time.monotonic() - started:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
