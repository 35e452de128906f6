"""Full desk experiment: seed-paired H1/H0 runs, analysis CSVs and all figures.

    python scripts/desk_experiment.py --n-runs 10 --out results/desk

Adds one extra H1 run with stored signals so the cluster figure has data.
"""

import argparse
import os
from pathlib import Path

from nichesim.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-runs", type=int, default=10)
    ap.add_argument("--generations", type=int, default=300)
    ap.add_argument("--seed-base", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", type=Path, default=Path("results/desk"))
    args = ap.parse_args()

    exp_dir, example, analysis = args.out / "experiment", args.out / "example", args.out / "analysis"
    gen = f"generations={args.generations}"
    steps = [
        ["experiment", "--n-runs", str(args.n_runs), "--seed-base", str(args.seed_base),
         "--workers", str(args.workers), "--set", gen, "-o", str(exp_dir)],
        ["run", "--seed", str(args.seed_base), "--set", gen, "--set", "log_detail=full-signals",
         "-o", str(example)],
        ["analyze", str(exp_dir), "-o", str(analysis)],
    ]
    for argv in steps:
        code = cli(argv)
        if code:
            raise SystemExit(code)

    # embeddings come from the signal-bearing example run; keep the ensemble CSVs
    marks = [str(g) for g in (0, 12, 175, 299) if g < args.generations]
    cluster_dir = args.out / "clusters"
    code = cli(["analyze", str(example / f"run_{args.seed_base}.log"), "-o", str(cluster_dir),
                "--generations", *marks])
    if code:
        raise SystemExit(code)
    (analysis / "embeddings.csv").write_bytes((cluster_dir / "embeddings.csv").read_bytes())
    raise SystemExit(cli(["plot", str(analysis), "-o", str(args.out / "figures")]))


if __name__ == "__main__":
    main()
