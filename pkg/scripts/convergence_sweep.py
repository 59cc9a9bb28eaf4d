"""Median distance-to-target across dimensions and adversaries.

Runs the replicated experiment grid behind acceptance criterion 6 and
prints one row per (d, adversary) with the checkpoint medians, so a
threshold change can be recalibrated from actual numbers.

Usage: python3 scripts/convergence_sweep.py [--steps 100000] [--replicates 20]
       [--dims 2,3,5] [--seed 2026] [--adversary-seed 101] [--out DIR]
"""

import argparse
import json
from pathlib import Path

from gba.adversaries import AdversarySpec, uniform_iid
from gba.harness import ExperimentConfig, run_experiment


def adversary_grid(d: int, seed: int) -> dict[str, AdversarySpec]:
    return {
        "iid-uniform": uniform_iid(d, seed=seed),
        "periodic": AdversarySpec(kind="periodic", pattern=tuple(range(d)), seed=seed),
        "worst_case": AdversarySpec(kind="worst_case", seed=seed),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=100_000)
    parser.add_argument("--replicates", type=int, default=20)
    parser.add_argument("--dims", default="2,3,5", help="comma-separated dimensions")
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--adversary-seed", type=int, default=101)
    parser.add_argument("--out", help="directory for per-run summary JSON files")
    args = parser.parse_args()
    dims = [int(x) for x in args.dims.split(",")]

    print(f"{'d':>3} {'adversary':<12} {'med@1e3':>10} {'med@1e4':>10} {'med@final':>10}")
    for d in dims:
        for name, spec in adversary_grid(d, args.adversary_seed).items():
            config = ExperimentConfig(
                d=d,
                steps=args.steps,
                seed=args.seed,
                replicates=args.replicates,
                adversary=spec,
            )
            summary = run_experiment(config)
            ckpts = summary.aggregate["checkpoints"]
            med = lambda n: ckpts[n]["median"] if n in ckpts else float("nan")
            print(
                f"{d:>3} {name:<12} {med('1000'):>10.5f} {med('10000'):>10.5f} "
                f"{summary.aggregate['final_dist']['median']:>10.5f}"
            )
            if args.out:
                out = Path(args.out) / f"d{d}_{name}.json"
                out.parent.mkdir(parents=True, exist_ok=True)
                out.write_text(summary.to_json())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
