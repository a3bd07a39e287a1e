"""Eigenvalue histograms with limit-set overlays.

Consumes the two file formats written by the liftspec command line
tool and nothing else: spectrum.csv (columns index, eigenvalue,
residual) and limit.json ({"intervals": [[lo, hi], ...], "points":
[...]}).  There is deliberately no code dependency on that package, so
this renderer works on any files that follow the schema.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


class PlotError(Exception):
    pass


class ParseError(PlotError):
    pass


class EmptyInput(PlotError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    spectrum: str
    limit: str
    out: str
    bins: int = 120

    def __post_init__(self):
        if self.bins < 1:
            raise ParseError(f"bins must be at least 1, got {self.bins}")


def read_spectrum(path: str) -> list[float]:
    """Eigenvalue column of a spectrum CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["index", "eigenvalue"]:
        raise ParseError(f"{path}: expected header index,eigenvalue,residual")
    try:
        vals = [float(r[1]) for r in rows[1:] if r]
    except (IndexError, ValueError) as e:
        raise ParseError(f"{path}: bad eigenvalue row: {e}") from None
    if not vals:
        raise EmptyInput(f"{path}: no eigenvalues")
    return vals


def read_limit(path: str) -> tuple[list[tuple[float, float]], list[float]]:
    """Interval and point lists of a limit JSON document."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: invalid JSON: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object")
    try:
        intervals = [(float(a), float(b)) for a, b in doc.get("intervals", [])]
        points = [float(p) for p in doc.get("points", [])]
    except (TypeError, ValueError) as e:
        raise ParseError(f"{path}: malformed limit set: {e}") from None
    for a, b in intervals:
        if not a <= b:
            raise ParseError(f"{path}: interval [{a}, {b}] is reversed")
    return intervals, points


def render(spec: PlotSpec) -> dict:
    """Histogram of the eigenvalues with the limit set shaded on top.

    Returns a summary of what was drawn, for scripting and tests.
    """
    vals = read_spectrum(spec.spectrum)
    intervals, points = read_limit(spec.limit)
    if not intervals and not points:
        warnings.warn(f"{spec.limit}: empty limit set, drawing histogram only")

    fig, ax = plt.subplots(figsize=(7.0, 3.4), dpi=130)
    ax.hist(vals, bins=spec.bins, density=True, color="#31629c",
            edgecolor="none", zorder=2)
    for a, b in intervals:
        ax.axvspan(a, b, color="#d9a53f", alpha=0.30, zorder=1)
    for p in points:
        ax.axvline(p, color="#b03a2e", lw=1.4, ls="--", zorder=3)
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.margins(x=0.03)
    fig.tight_layout()
    meta = {"Date": None} if spec.out.endswith(".svg") else None
    fig.savefig(spec.out, metadata=meta)
    plt.close(fig)
    return {"out": spec.out, "count": len(vals),
            "bands": intervals, "markers": points}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="plot_spectrum",
        description="histogram of a lift spectrum with its limit set")
    ap.add_argument("--spectrum", required=True, help="spectrum CSV path")
    ap.add_argument("--limit", required=True, help="limit JSON path")
    ap.add_argument("--bins", type=int, default=120)
    ap.add_argument("--out", default="fig.png")
    args = ap.parse_args(argv)
    try:
        summary = render(PlotSpec(spectrum=args.spectrum, limit=args.limit,
                                  out=args.out, bins=args.bins))
    except PlotError as e:
        print(f"plot_spectrum: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"plot_spectrum: i/o error: {e}", file=sys.stderr)
        return 3
    print(f"wrote {summary['out']} ({summary['count']} eigenvalues, "
          f"{len(summary['bands'])} bands, {len(summary['markers'])} markers)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
