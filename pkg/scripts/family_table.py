"""Classify all minimum-weight cogs of a code into families and write the CSV report."""

import argparse
import time

from multibasis import codebook, orbits


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("code", choices=["golay24", "bch31", "qr47"])
    ap.add_argument("--sigma-max", type=int, default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    code = codebook.build_code(args.code)
    t0 = time.perf_counter()
    cogs = orbits.code_cogs(code)
    fams = orbits.classify_families(cogs, code, args.sigma_max)
    for f in fams:
        print(f"family {f.id}: {len(f)} cogs, signature {f.signature}")
    print(f"{len(cogs)} cogs in {time.perf_counter() - t0:.1f}s")
    out = args.out or codebook.DATA_DIR / f"{args.code}_families.csv"
    with open(out, "w") as fh:
        fh.write(orbits.family_report(fams))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
