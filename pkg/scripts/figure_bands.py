#!/usr/bin/env python3
"""Produce the band-structure study inputs for one preset.

Writes limit.json, spectrum.csv and a per-grid-point diagnostics CSV
into the output directory.  These are the files the plot_spectrum tool
consumes.
"""

import argparse
import pathlib
import sys

from liftspec import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="figure1")
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", default="out")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rc = cli.main(["limit", "--preset", args.preset,
                   "--out", str(outdir / "limit.json"),
                   "--diag", str(outdir / "diagnostics.csv")])
    if rc:
        return rc
    rc = cli.main(["spectrum", "--preset", args.preset, "--n", str(args.n),
                   "--seed", str(args.seed),
                   "--out", str(outdir / "spectrum.csv")])
    if rc:
        return rc
    print(f"wrote {outdir}/limit.json, {outdir}/spectrum.csv, "
          f"{outdir}/diagnostics.csv")
    print(f"render with: plot_spectrum --spectrum {outdir}/spectrum.csv "
          f"--limit {outdir}/limit.json --bins 120 --out {outdir}/figure.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
