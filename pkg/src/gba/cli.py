"""Command-line front end.

Subcommands: run (experiment from a config file and/or flags), verify
(geometry identity sweep, exit 2 on violation), rule (print the
mixture at a point), project (print the target projection).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .adversaries import AdversarySpec, uniform_iid
from .geometry import GeometryError
from .harness import ExperimentConfig, load_config, run_experiment, verify_geometry
from .prism import (
    NotInPrism,
    classify,
    point_to_state,
    project_to_target,
    shortfall,
    side_values,
)
from .rule import randomize


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, GeometryError, NotInPrism, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gba", description=__doc__)
    sub = parser.add_subparsers(required=True)

    run = sub.add_parser("run", help="run a replicated prediction experiment")
    run.add_argument("--config", help="TOML config file; flags override its keys")
    run.add_argument("--d", type=int)
    run.add_argument("--steps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--replicates", type=int)
    run.add_argument("--adversary", help="token, e.g. worst-case, iid, iid:0.2,0.8, "
                                         "fixed:0,1,2, periodic, periodic:0,1, omit:3, omit:3:worst-case")
    run.add_argument("--adversary-seed", type=int)
    run.add_argument("--first-prediction", type=int)
    run.add_argument("--interior", choices=("uniform", "hold_last"))
    run.add_argument("--trace", help="trace CSV path (replicates > 1 get .rep<i> suffixes)")
    run.add_argument("--summary", help="summary JSON path")
    run.add_argument("--trace-every", type=int)
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser("verify", help="geometry identity sweep on random outside states")
    verify.add_argument("--d", type=int, required=True)
    verify.add_argument("--samples", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=1)
    verify.add_argument("--no-oracle", action="store_true",
                        help="skip the 2^d projection oracle (use for d > 10)")
    verify.add_argument("--json", action="store_true", help="machine-readable report")
    verify.set_defaults(func=_cmd_verify)

    rule = sub.add_parser("rule", help="print the rule's mixture at a prism point")
    rule.add_argument("--d", type=int)
    rule.add_argument("--point", required=True, help="comma-separated coordinates")
    rule.set_defaults(func=_cmd_rule)

    project = sub.add_parser("project", help="print the target projection of a prism point")
    project.add_argument("--d", type=int)
    project.add_argument("--point", required=True, help="comma-separated coordinates")
    project.set_defaults(func=_cmd_project)
    return parser


def parse_adversary(token: str, d: int, seed: int = 0) -> AdversarySpec:
    """Build a spec from a CLI token.

    Grammar: kind[:args]; omit takes omit:<k>[:<inner token>].  Bare
    iid is uniform; bare periodic cycles 0..d-1.
    """
    kind, _, rest = token.partition(":")
    kind = kind.replace("-", "_")
    if kind in ("worst_case",):
        return AdversarySpec(kind="worst_case", seed=seed)
    if kind in ("iid", "iid_uniform"):
        if not rest:
            return uniform_iid(d, seed)
        weights = tuple(float(w) for w in rest.split(","))
        return AdversarySpec(kind="iid", weights=weights, seed=seed)
    if kind == "fixed":
        if not rest:
            raise ValueError("fixed adversary needs a sequence, e.g. fixed:0,1,2")
        return AdversarySpec(kind="fixed", sequence=_ints(rest), seed=seed)
    if kind == "periodic":
        pattern = _ints(rest) if rest else tuple(range(d))
        return AdversarySpec(kind="periodic", pattern=pattern, seed=seed)
    if kind in ("omit", "omit_category"):
        omit_str, _, inner_token = rest.partition(":")
        if not omit_str:
            raise ValueError("omit adversary needs a category, e.g. omit:3")
        inner = parse_adversary(inner_token, d, seed) if inner_token else None
        return AdversarySpec(kind="omit_category", omit=int(omit_str), inner=inner, seed=seed)
    raise ValueError(f"unknown adversary token {token!r}")


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _cmd_run(args) -> int:
    if args.config is not None:
        base = load_config(args.config)
    else:
        if args.d is None or args.steps is None or args.adversary is None:
            raise ValueError("without --config, --d, --steps and --adversary are required")
        base = None
    d = args.d if args.d is not None else base.d
    overrides = {
        "d": d,
        "steps": args.steps,
        "seed": args.seed,
        "replicates": args.replicates,
        "first_prediction": args.first_prediction,
        "interior_policy": args.interior,
        "trace_path": args.trace,
        "summary_path": args.summary,
        "trace_every": args.trace_every,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.adversary is not None:
        overrides["adversary"] = parse_adversary(
            args.adversary, d, args.adversary_seed if args.adversary_seed is not None else 0
        )
    elif args.adversary_seed is not None:
        overrides["adversary"] = replace(base.adversary, seed=args.adversary_seed)
    config = ExperimentConfig(**overrides) if base is None else replace(base, **overrides)
    summary = run_experiment(config)
    sys.stdout.write(summary.to_json())
    return 0


def _cmd_verify(args) -> int:
    report = verify_geometry(args.d, args.samples, args.seed, oracle=not args.no_oracle)
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    else:
        for key in report.deviations:
            status = "ok" if report.deviations[key] <= report.thresholds[key] else "FAIL"
            print(f"{key}: {report.deviations[key]:.3e} <= {report.thresholds[key]:.1e} {status}")
        print(f"{'ok' if report.ok else 'FAILED'} ({report.samples} samples, d={report.d})")
    return 0 if report.ok else 2


def _point(args) -> np.ndarray:
    v = np.array([float(x) for x in args.point.split(",")])
    if args.d is not None and args.d != v.shape[0]:
        raise ValueError(f"--d {args.d} does not match a {v.shape[0]}-coordinate point")
    point_to_state(v)
    return v


def _fmt(vec) -> str:
    return "[" + ", ".join("%.12g" % x for x in vec) + "]"


def _cmd_rule(args) -> int:
    v = _point(args)
    cls = classify(v)
    print(f"point      = {_fmt(v)}")
    print(f"region     = {cls.region.name.lower()}" +
          (f" (planes {list(cls.planes)})" if cls.planes else ""))
    print(f"sides      = {_fmt(side_values(v))}")
    print(f"mixture    = {_fmt(randomize(v))}")
    return 0


def _cmd_project(args) -> int:
    v = _point(args)
    proj, dist = project_to_target(v)
    print(f"point      = {_fmt(v)}")
    print(f"projection = {_fmt(proj)}")
    print(f"dist       = {'%.12g' % dist}")
    print(f"shortfall  = {'%.12g' % shortfall(v)}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
