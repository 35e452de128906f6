"""How reliably the neuroevolution core solves XOR across seeds."""

import argparse
import time

from nichesim.benchmarks import solve_xor
from nichesim.neat import NeatConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--max-generations", type=int, default=300)
    ap.add_argument("--population", type=int, default=NeatConfig().population_size)
    args = ap.parse_args()

    cfg = NeatConfig(population_size=args.population)
    solved = []
    start = time.perf_counter()
    for seed in range(args.seeds):
        gen, best = solve_xor(seed, cfg, args.max_generations)
        hidden = len(best.hidden_ids)
        status = f"solved at generation {gen}" if gen is not None else "not solved"
        print(f"seed {seed:3d}: {status}, {hidden} hidden nodes")
        solved.append(gen)
    hits = [g for g in solved if g is not None]
    print(f"{len(hits)}/{args.seeds} solved in {time.perf_counter() - start:.1f}s"
          + (f", median generation {sorted(hits)[len(hits) // 2]}" if hits else ""))


if __name__ == "__main__":
    main()
