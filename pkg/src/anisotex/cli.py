"""Command-line front end: ``anisotex synth|validate|bench``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import band_plan, cholesky_synth, suites
from . import turning_band_synth as tbs
from .grid import write_pgm, write_raw
from .orientation_fields import parse_orientation
from .spectral_model import ElementaryParams, Window

logger = logging.getLogger("anisotex")

TB_BENCH_SIZES = (63, 127, 255)
CHOLESKY_BENCH_SIZES = (8, 16, 32)
TB_TIME_LIMIT = 60.0
SCALING_TARGET, SCALING_BAND = 2.0, 0.3


def _add_model_flags(p):
    p.add_argument("--backend", choices=["tb", "cholesky"], default="tb")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--alpha", type=float, default=suites.LOCAL_CONFIG["alpha"],
                   help="cone half-width in radians")
    p.add_argument("--window", choices=[w.value for w in Window], default="indicator")
    p.add_argument("--r", type=int, default=suites.LOCAL_CONFIG["r"])
    p.add_argument("--epsilon", type=float, default=suites.LOCAL_CONFIG["epsilon"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="raw field file; a .pgm preview is written beside it")
    p.add_argument("--force-cholesky", action="store_true",
                   help=f"allow the O(r^6) Cholesky backend above r={cholesky_synth.MAX_DEFAULT_R}")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads for pixel assembly (default: ${tbs.THREADS_ENV} or all cores)")


def build_parser():
    parser = argparse.ArgumentParser(prog="anisotex", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="synthesize a field")
    kinds = synth.add_subparsers(dest="kind", required=True)
    elem = kinds.add_parser("elementary", help="stationary field with a constant cone axis")
    elem.add_argument("--alpha0", type=float, required=True, help="cone axis in radians")
    _add_model_flags(elem)
    lafbf = kinds.add_parser("lafbf", help="locally anisotropic field")
    lafbf.add_argument("--orient", required=True, help="const:RAD | v1 | v2 | raster:PATH")
    _add_model_flags(lafbf)

    val = sub.add_parser("validate", help="run a statistical validation suite")
    val.add_argument("--suite", required=True,
                     choices=["covariance", "orientation", "hurst", "crossbackend"])
    val.add_argument("--r", type=int, default=None)
    val.add_argument("--samples", type=int, default=None, help="Monte-Carlo budget")
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--orient", default="stripes", help="stripes | v1 | v2 | const:RAD | raster:PATH")
    val.add_argument("--epsilon", type=float, default=suites.LOCAL_CONFIG["epsilon"])

    bench = sub.add_parser("bench", help="time both backends")
    bench.add_argument("--epsilon", type=float, default=suites.LOCAL_CONFIG["epsilon"])
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--threads", type=int, default=None)
    return parser


def _preview_path(out: Path) -> Path:
    return out.with_name(out.name + ".pgm") if out.suffix == ".pgm" else out.with_suffix(".pgm")


def cmd_synth(args) -> int:
    window = Window(args.window)
    record = {"command": f"synth {args.kind}", "backend": args.backend, "hurst": args.hurst,
              "alpha": args.alpha, "window": window.value, "r": args.r, "seed": args.seed}
    if args.backend == "cholesky" and args.r > cholesky_synth.MAX_DEFAULT_R and not args.force_cholesky:
        print(f"error: Cholesky backend at r={args.r} costs O(r^6); "
              f"use r <= {cholesky_synth.MAX_DEFAULT_R} or pass --force-cholesky", file=sys.stderr)
        return 2
    timings = {}
    t0 = time.perf_counter()
    if args.kind == "elementary":
        params = ElementaryParams(args.hurst, args.alpha0, args.alpha, window)
        record["alpha0"] = params.alpha0
    else:
        orientation = parse_orientation(args.orient)
        record["orient"] = orientation.describe()
        ElementaryParams(args.hurst, 0.0, args.alpha, window)

    if args.backend == "tb":
        plan = band_plan.select_bands(args.r, args.epsilon)
        timings["plan"] = time.perf_counter() - t0
        record.update(epsilon=args.epsilon, n_bands=len(plan))
        if args.kind == "elementary":
            field = tbs.synth_elementary_tb(params, plan, args.r, args.seed, args.threads, timings)
        else:
            field = tbs.synth_lafbf(orientation, args.hurst, args.alpha, window, plan, args.r,
                                    args.seed, args.threads, timings)
        record["empty_cone_pixels"] = field.metadata["empty_cone_pixels"]
    else:
        if args.kind == "elementary":
            field = cholesky_synth.sample_elementary_exact(params, args.r, args.seed, force=True)
        else:
            field = cholesky_synth.sample_lafbf_exact(orientation, args.hurst, args.alpha, window,
                                                      args.r, args.seed, force=True)
        timings["cholesky"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_raw(args.out, field.values)
    preview = _preview_path(args.out)
    write_pgm(preview, field)
    timings["write"] = time.perf_counter() - t1
    timings["total"] = time.perf_counter() - t0
    record.update(out=str(args.out), preview=str(preview), timings=timings)
    print(json.dumps(record))
    return 0


def cmd_validate(args) -> int:
    opts = {}
    if args.r is not None:
        opts["r"] = args.r
    if args.suite == "covariance":
        if args.samples is not None:
            opts["n_samples"] = args.samples
        checks = suites.covariance_oracle(seed=args.seed, epsilon=args.epsilon, **opts)
    elif args.suite == "crossbackend":
        if args.samples is not None:
            opts["n_samples"] = args.samples
        checks = suites.cross_backend(seed=args.seed, epsilon=args.epsilon, **opts)
    elif args.suite == "hurst":
        if args.samples is not None:
            opts["n_seeds"] = args.samples
        checks = suites.hurst_suite(seed=args.seed, epsilon=args.epsilon, **opts)
    elif args.orient == "stripes":
        if args.samples is not None:
            opts["n_seeds"] = args.samples
        checks = suites.global_orientation(seed=args.seed, epsilon=args.epsilon, **opts)
    else:
        n = args.samples or 1
        checks = suites.local_orientation(args.orient, epsilon=args.epsilon,
                                          seeds=tuple(range(args.seed, args.seed + n)), **opts)
    report = {"suite": args.suite, "checks": [c.to_dict() for c in checks],
              "pass": all(c.passed for c in checks)}
    print(json.dumps(report))
    return 0 if report["pass"] else 1


def cmd_bench(args) -> int:
    rows = []
    tb = {}
    for r in TB_BENCH_SIZES:
        tb[r] = suites.time_tb(r, epsilon=args.epsilon, repeats=args.repeats, workers=args.threads)
        rows.append(("tb", r, tb[r]))
    ch = {}
    for r in CHOLESKY_BENCH_SIZES:
        ch[r] = suites.time_cholesky(r)
        rows.append(("cholesky", r, ch[r]))
    try:
        cholesky_synth.exact_factor(ElementaryParams(0.2, math.pi / 6, 0.01), 255)
        refused = False
    except cholesky_synth.ResourceGuardError:
        refused = True

    print(f"{'backend':<9} {'r':>4} {'phase timings (s)'}")
    for backend, r, t in rows:
        phases = "  ".join(f"{k}={v:.4f}" for k, v in t.items() if k != "n_bands")
        print(f"{backend:<9} {r:>4} {phases}")
    exponent = suites.scaling_exponent(list(TB_BENCH_SIZES), [tb[r]["assembly"] for r in TB_BENCH_SIZES])
    total_255 = tb[TB_BENCH_SIZES[-1]]["total"]
    ok_exp = abs(exponent - SCALING_TARGET) <= SCALING_BAND
    ok_time = total_255 < TB_TIME_LIMIT
    summary = {"tb_assembly_exponent": exponent, "exponent_ok": ok_exp,
               "tb_total_r255": total_255, "time_ok": ok_time,
               "cholesky_r255_refused": refused, "tb": tb, "cholesky": ch}
    print(json.dumps(summary))
    return 0 if ok_exp and ok_time and refused else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_bench(args)
    except (ValueError, cholesky_synth.ResourceGuardError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
