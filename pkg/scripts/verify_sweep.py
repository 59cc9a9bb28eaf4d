"""Geometry identity sweep over a range of dimensions.

Same checks as `gba verify`, one line per dimension; exits 2 if any
dimension fails.  The exhaustive projection oracle enumerates 2^d
active sets, so it is skipped above --oracle-max.

Usage: python3 scripts/verify_sweep.py [--dims 2-8] [--samples 2000]
       [--seed 1] [--oracle-max 8]
"""

import argparse

from gba.harness import verify_geometry


def parse_dims(text: str) -> list[int]:
    if "-" in text:
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="2-8", help="range 2-8 or list 2,3,5")
    parser.add_argument("--samples", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--oracle-max", type=int, default=8)
    args = parser.parse_args()

    all_ok = True
    for d in parse_dims(args.dims):
        report = verify_geometry(
            d, args.samples, args.seed, oracle=d <= args.oracle_max
        )
        worst_key = max(
            report.deviations,
            key=lambda k: report.deviations[k] / report.thresholds[k],
        )
        status = "ok" if report.ok else "FAILED"
        oracle_note = "" if d <= args.oracle_max else " (oracle skipped)"
        print(
            f"d={d}: {status}, worst {worst_key} = "
            f"{report.deviations[worst_key]:.3e}{oracle_note}"
        )
        all_ok = all_ok and report.ok
    return 0 if all_ok else 2


if __name__ == "__main__":
    raise SystemExit(main())
