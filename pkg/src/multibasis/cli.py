"""Command-line entry point: ``multibasis <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bounds, codebook, gf2, orbits, sim
from .stoppingsets import count_stopping_sets


def _grid(text: str) -> list[float]:
    """'2,3,4' or 'start:stop:step' (stop inclusive)."""
    if ":" in text:
        a, b, s = (float(x) for x in text.split(":"))
        return [round(x, 10) for x in np.arange(a, b + s / 2, s)]
    return [float(x) for x in text.split(",") if x]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_build_code(args):
    code = codebook.build_code(args.name)
    summary = f"{code.name}: n={code.n} k={code.k} d={code.d} extended={code.extended}"
    print(summary, file=sys.stderr if args.cog_matrix else sys.stdout)
    if args.generator:
        gf2.write_matrix(args.generator, code.generator)
    if args.parity:
        gf2.write_matrix(args.parity, code.parity_check)
    if args.cog_matrix:
        try:
            H = orbits.build_parity_matrix(gf2.parse_vector(args.cog_matrix), code)
        except orbits.CogRejected as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        sys.stdout.write(gf2.format_matrix(H))


def cmd_families(args):
    code = codebook.build_code(args.code)
    fams = orbits.classify_families(orbits.code_cogs(code), code, args.sigma_max)
    _emit(orbits.family_report(fams), args.out)


def cmd_stopsets(args):
    H = gf2.read_matrix(args.matrix)
    rep = count_stopping_sets(H, args.sigma_max, matrix_id=args.matrix, timeout=args.timeout)
    _emit(rep.as_csv(), args.out)
    if not rep.valid:
        print("warning: timeout reached, counts are partial", file=sys.stderr)
        return 2
    return 0


def cmd_simulate(args):
    text = Path(args.config).read_text() if args.config else "{}"
    overrides = dict(seed=args.seed, code=args.code, family=args.family, l=args.l,
                     max_frames=args.max_frames, target_frame_errors=args.target_errors,
                     reconcile=args.reconcile)
    if args.variant:
        overrides["variant"] = args.variant.split(",")
    if args.snr:
        overrides["snr_grid_db"] = _grid(args.snr)
    cfg = sim.CampaignConfig.from_json(text, **overrides)
    if args.out and Path(args.out).exists():
        Path(args.out).unlink()

    def show(rec):
        print(rec.csv_row(), file=sys.stderr if args.out is None else sys.stdout, flush=True)

    records = sim.run_campaign(cfg, out_path=args.out, workers=args.workers,
                               progress=show if args.out else None)
    if args.out is None:
        sys.stdout.write(sim.records_to_csv(records))


def cmd_bounds(args):
    code = codebook.build_code(args.code)
    grid = _grid(args.snr)
    curves = []
    weights = None
    for kind in args.kinds.split(","):
        if kind.startswith("union"):
            weights = weights or codebook.weight_distribution(code)
        curves.append(bounds.bound_curve(kind, grid, code, weights))
    _emit(bounds.curves_to_csv(curves), args.out)


def cmd_ml_check(args):
    code = codebook.build_code(args.code)
    weights = codebook.weight_distribution(code)
    cfg = sim.CampaignConfig(args.code, "ML", seed=args.seed, snr_grid_db=tuple(_grid(args.snr)),
                             max_frames=args.frames, target_frame_errors=args.frames)
    print("snr_db,frames,frame_errors,fer,ci_low,ci_high,union_fer,below_bound")
    ok = True
    for rec in sim.run_campaign(cfg, workers=args.workers):
        ub = bounds.union_bound(weights, code, rec.snr_db, "fer")
        lo, hi = rec.fer_ci
        below = lo <= ub
        ok &= below
        print(f"{rec.snr_db:g},{rec.frames},{rec.frame_errors},{rec.fer:.6e},{lo:.6e},{hi:.6e},"
              f"{ub:.6e},{int(below)}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multibasis", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-code", help="construct a code and optionally export matrices")
    p.add_argument("name", choices=codebook.CODE_NAMES)
    p.add_argument("--generator", help="write generator matrix here")
    p.add_argument("--parity", help="write parity-check matrix here")
    p.add_argument("--cog-matrix", metavar="BITS", help="print the cyclic-form matrix of a cog")
    p.set_defaults(func=cmd_build_code)

    p = sub.add_parser("families", help="cog family report (CSV)")
    p.add_argument("code", choices=("golay24", "bch31", "qr47"))
    p.add_argument("--sigma-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_families)

    p = sub.add_parser("stopsets", help="exact stopping-set counts (CSV sigma,count)")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sigma-max", type=int, required=True)
    p.add_argument("--timeout", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stopsets)

    p = sub.add_parser("simulate", help="Monte Carlo campaign (CSV)")
    p.add_argument("--config", help="JSON campaign file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--code", choices=codebook.CODE_NAMES)
    p.add_argument("--variant", help="comma separated, e.g. BP,NX-S")
    p.add_argument("--snr", help="'4,5' or 'start:stop:step'")
    p.add_argument("--family", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--max-frames", type=int)
    p.add_argument("--target-errors", type=int)
    p.add_argument("--reconcile", choices=("clear", "retain"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="union and Gallager bounds (CSV snr_db,kind,value)")
    p.add_argument("--code", required=True, choices=codebook.CODE_NAMES)
    p.add_argument("--snr", default="0:8:0.5")
    p.add_argument("--kinds", default="union_ber,union_fer,gallager_fer")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("ml-check", help="simulated ML FER against the union bound")
    p.add_argument("--code", default="golay24", choices=("golay24", "bch31"))
    p.add_argument("--snr", default="2:6:1")
    p.add_argument("--frames", type=int, default=20000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_ml_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
