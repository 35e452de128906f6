"""Band-usage concentration of an experiment directory.

Prints, per run, each species' top-3 bands over the final 50 generations,
their share of total usage, and the overlap between species.

    python scripts/band_convergence.py results/desk/experiment
"""

import argparse
from pathlib import Path

import numpy as np

from nichesim.analysis.curves import band_totals, top_band_overlap, top_bands, top_share
from nichesim.logs import read_run_log


def describe(path):
    run = read_run_log(path)
    totals = band_totals(run, 50)
    shares = {sp: top_share(t) for sp, t in totals.items()}
    bands = {sp: top_bands(t) for sp, t in totals.items()}
    return run, shares, bands, top_band_overlap(run)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("experiment", type=Path)
    ap.add_argument("--threshold", type=float, default=0.6)
    args = ap.parse_args()

    for cond in ("h1", "h0"):
        overlaps, converged = [], 0
        files = sorted((args.experiment / cond).glob("run_*.log"),
                       key=lambda p: int(p.stem.split("_")[1]))
        print(f"[{cond.upper()}]")
        for f in files:
            run, shares, bands, overlap = describe(f)
            overlaps.append(overlap)
            converged += all(s >= args.threshold for s in shares.values())
            print(f"  seed {run.seed:3d}: A {bands['A']} {shares['A']:.3f}  "
                  f"B {bands['B']} {shares['B']:.3f}  overlap {overlap}")
        print(f"  runs with both shares >= {args.threshold}: {converged}/{len(files)}; "
              f"mean overlap {np.mean(overlaps):.2f}")


if __name__ == "__main__":
    main()
