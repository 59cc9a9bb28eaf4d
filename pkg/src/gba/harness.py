"""Experiment runner: configs, replicated runs, traces, verification.

Configs are TOML: flat keys for the run parameters, an [adversary]
table (with optional [adversary.inner] for omit_category).  Traces are
CSV with floats at 17 significant digits; summaries are JSON with
sorted keys.  Replicates run concurrently but are collected and
written in index order, so identical configs give byte-identical files
no matter the scheduling.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

try:  # tomllib from 3.11
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - environment dependent
    import tomli as _toml

from .adversaries import AdversarySpec, validate_spec
from .engine import ReplicateResult, run_replicate
from .geometry import DEFAULT_TOL, Tolerance
from .prism import MAX_CATEGORIES, classify, project_to_target, Region, side_values
from .rng import Stream
from .rule import (
    CASE_TAGS,
    auxiliary_point,
    auxiliary_projection,
    auxiliary_residual,
    classic_blackwell2,
    partition,
    randomize,
)
from .approachability import check_separation
from . import prism

_CASE_KEYS = ("init", "case1", "case2", "interior")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a predictor against one adversary, replicated."""

    d: int
    steps: int
    adversary: AdversarySpec
    seed: int = 0
    replicates: int = 1
    first_prediction: int = 0
    interior_policy: str = "uniform"
    eps_geom: float = DEFAULT_TOL.eps_geom
    trace_every: int | None = None
    trace_path: str | None = None
    summary_path: str | None = None

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be positive, got {self.steps}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be positive, got {self.replicates}")
        if self.trace_every is not None and self.trace_every < 1:
            raise ValueError(f"trace_every must be positive, got {self.trace_every}")

    def resolved_trace_every(self) -> int:
        # default stride keeps trace files bounded on long runs
        if self.trace_every is not None:
            return self.trace_every
        return 100 if self.steps >= 10_000 else 1


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    with open(path, "rb") as fh:
        doc = _toml.load(fh)
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> ExperimentConfig:
    doc = dict(doc)
    adv = doc.pop("adversary", None)
    if adv is None:
        raise ValueError("config needs an [adversary] table")
    known = {f for f in ExperimentConfig.__dataclass_fields__ if f != "adversary"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(adversary=_adversary_from_dict(adv), **doc)


def _adversary_from_dict(doc: dict) -> AdversarySpec:
    doc = dict(doc)
    unknown = set(doc) - set(AdversarySpec.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown adversary keys: {sorted(unknown)}")
    inner = doc.pop("inner", None)
    for key in ("sequence", "weights", "pattern"):
        if key in doc:
            doc[key] = tuple(doc[key])
    if inner is not None:
        doc["inner"] = _adversary_from_dict(inner)
    return AdversarySpec(**doc)


def _adversary_to_dict(spec: AdversarySpec) -> dict:
    out: dict = {"kind": spec.kind, "seed": spec.seed}
    if spec.sequence is not None:
        out["sequence"] = list(spec.sequence)
        out["cycle"] = spec.cycle
    if spec.weights is not None:
        out["weights"] = list(spec.weights)
    if spec.pattern is not None:
        out["pattern"] = list(spec.pattern)
    if spec.omit is not None:
        out["omit"] = spec.omit
    if spec.inner is not None:
        out["inner"] = _adversary_to_dict(spec.inner)
    return out


def config_to_dict(config: ExperimentConfig) -> dict:
    # optional fields appear only when set: TOML has no null, so
    # omission is the round-trippable encoding of the defaults
    out = {
        "d": config.d,
        "steps": config.steps,
        "seed": config.seed,
        "replicates": config.replicates,
        "adversary": _adversary_to_dict(validate_spec(config.adversary, config.d)),
        "first_prediction": config.first_prediction,
        "interior_policy": config.interior_policy,
        "eps_geom": config.eps_geom,
    }
    for key in ("trace_every", "trace_path", "summary_path"):
        value = getattr(config, key)
        if value is not None:
            out[key] = value
    return out


@dataclass(frozen=True)
class RunSummary:
    """Per-replicate outcomes plus order-independent aggregates."""

    config: dict
    replicates: list[dict]
    aggregate: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "replicates": self.replicates,
            "aggregate": self.aggregate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def run_experiment(config: ExperimentConfig, max_workers: int | None = None) -> RunSummary:
    """Run all replicates and write any configured output files.

    Replicates execute on a thread pool (the compiled loop releases
    the GIL); results are keyed by replicate index before any
    aggregation or writing, so outputs do not depend on scheduling.
    """
    spec = validate_spec(config.adversary, config.d)
    stride = config.resolved_trace_every()

    def one(r: int) -> ReplicateResult:
        return run_replicate(
            d=config.d,
            steps=config.steps,
            seed=config.seed,
            replicate=r,
            adversary=spec,
            first_prediction=config.first_prediction,
            interior=config.interior_policy,
            eps=config.eps_geom,
            trace_every=stride,
        )

    indices = range(config.replicates)
    if config.replicates == 1 or max_workers == 1:
        results = [one(r) for r in indices]
    else:
        workers = max_workers or min(config.replicates, os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, indices))

    rep_dicts = [_replicate_dict(r, res) for r, res in zip(indices, results)]
    summary = RunSummary(
        config=config_to_dict(config),
        replicates=rep_dicts,
        aggregate=_aggregate(rep_dicts),
    )
    if config.trace_path is not None:
        for r, res in zip(indices, results):
            path = _trace_file(config.trace_path, r, config.replicates)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(trace_csv(res.trace, config.d))
    if config.summary_path is not None:
        out = Path(config.summary_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(summary.to_json())
    return summary


def _trace_file(trace_path: str, replicate: int, replicates: int) -> Path:
    p = Path(trace_path)
    if replicates == 1:
        return p
    return p.with_name(f"{p.stem}.rep{replicate}{p.suffix}")


def trace_csv(trace: np.ndarray, d: int) -> str:
    """Render engine trace rows as the canonical CSV text."""
    header = (
        "n,x,y,correct,gamma_bar,"
        + ",".join(f"xbar_{l}" for l in range(d))
        + ",dist,shortfall,case"
    )
    lines = [header]
    for row in trace:
        floats = ",".join("%.17g" % val for val in row[4 : 7 + d])
        lines.append(
            f"{int(row[0])},{int(row[1])},{int(row[2])},{int(row[3])},"
            f"{floats},{CASE_TAGS[int(row[7 + d])]}"
        )
    return "\n".join(lines) + "\n"


def _replicate_dict(r: int, res: ReplicateResult) -> dict:
    checkpoints = {
        str(int(n)): float(v)
        for n, v in zip(res.checkpoint_ns, res.checkpoints)
        if not math.isnan(v)
    }
    return {
        "replicate": r,
        "final_dist": res.final_dist,
        "final_shortfall": res.final_shortfall,
        "gamma_bar": res.final_gamma,
        "max_freq": res.final_max_freq,
        "case_counts": {k: int(c) for k, c in zip(_CASE_KEYS, res.case_counts)},
        "checkpoints": checkpoints,
    }


def _quartiles(values: list[float]) -> dict:
    arr = np.asarray(values)
    return {
        "q1": float(np.quantile(arr, 0.25)),
        "median": float(np.median(arr)),
        "q3": float(np.quantile(arr, 0.75)),
    }


def _aggregate(rep_dicts: list[dict]) -> dict:
    ns = sorted({n for rep in rep_dicts for n in rep["checkpoints"]}, key=int)
    return {
        "final_dist": _quartiles([rep["final_dist"] for rep in rep_dicts]),
        "checkpoints": {
            n: _quartiles([rep["checkpoints"][n] for rep in rep_dicts if n in rep["checkpoints"]])
            for n in ns
        },
    }


@dataclass(frozen=True)
class VerificationReport:
    """Max deviations over a sampled sweep of outside states."""

    d: int
    samples: int
    deviations: dict
    thresholds: dict
    ok: bool

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "samples": self.samples,
            "deviations": self.deviations,
            "thresholds": self.thresholds,
            "ok": self.ok,
        }


def sample_outside_points(d: int, samples: int, seed: int, tol: Tolerance = DEFAULT_TOL):
    """Random prism points outside the target.

    Frequencies come from normalized exponentials (uniform on the
    simplex), the hit rate is uniform; in-target draws are rejected.
    """
    stream = Stream(seed)
    out = []
    while len(out) < samples:
        u = stream.next_floats(d)
        e = -np.log1p(-u)
        total = e.sum()
        if total <= 0.0:  # pragma: no cover - probability ~2**-53
            continue
        gamma = stream.next_float()
        v = e / total + gamma
        if classify(v, tol).region is Region.OUTSIDE:
            out.append(v)
    return out


def verify_geometry(
    d: int,
    samples: int,
    seed: int,
    tol: Tolerance = DEFAULT_TOL,
    oracle: bool = True,
) -> VerificationReport:
    """Full identity sweep on random outside states.

    Checks, per sample: closed-form projection against the exhaustive
    active-set oracle (2^d subsets, so disable for large d); simplex
    validity and zero-on-above of the mixture; hull membership and
    vanishing vertex products of the separation certificate; the two
    orthogonality identities of the auxiliary residual; agreement of
    the closed-form auxiliary projection with the direct projection;
    and for d=2 the classical rule.  Reports max deviations.
    """
    keys = [
        "mixture_sum",
        "mixture_min",
        "zero_on_above",
        "hull_coeff_min",
        "hull_reconstruction",
        "separation_products",
        "orthogonality_below",
        "orthogonality_above",
        "chain_projection",
        "residual_consistency",
    ]
    if oracle:
        keys.insert(0, "projection_vs_oracle")
    if d == 2:
        keys.append("classic_rule_gap")
    dev = {k: 0.0 for k in keys}

    def bump(key: str, value: float) -> None:
        if value > dev[key]:
            dev[key] = value

    for v in sample_outside_points(d, samples, seed, tol):
        proj, _ = project_to_target(v, tol)
        if oracle:
            oracle_proj = prism.project_oracle(v, tol)
            bump("projection_vs_oracle", float(np.abs(proj - oracle_proj).max()))
        p = randomize(v, tol)
        part = partition(v, tol)
        bump("mixture_sum", abs(float(p.sum()) - 1.0))
        bump("mixture_min", max(0.0, -float(p.min())))
        if part.above:
            bump("zero_on_above", float(np.abs(p[list(part.above)]).max()))
        report = check_separation(v, tol)
        bump("hull_coeff_min", max(0.0, -float(report.hull_coords.min())))
        verts = report.hull_coords @ _vertices(d, p)
        bump("hull_reconstruction", float(np.abs(verts - proj).max()))
        bump("separation_products", report.max_violation)
        aux = auxiliary_point(v, p, proj, tol)
        aux_proj = auxiliary_projection(p, aux.lambdas, part)
        residual = auxiliary_residual(p, aux.lambdas, part)
        bump("residual_consistency", float(np.abs((aux.point - aux_proj) - residual).max()))
        bump("chain_projection", float(np.abs(aux_proj - proj).max()))
        for l in part.below:
            e_l = np.zeros(d)
            e_l[l] = 1.0
            bump("orthogonality_below", abs(float(residual @ (e_l + p[l] - aux_proj))))
        for l in part.above:
            e_l = np.zeros(d)
            e_l[l] = 1.0
            bump("orthogonality_above", abs(float(residual @ (e_l - aux_proj))))
        if d == 2:
            # planar state = (frequency of category 1, hit rate)
            gamma = (float(v.sum()) - 1.0) / 2.0
            mu = (v[1] - gamma, gamma)
            bump("classic_rule_gap", abs(float(p[1]) - classic_blackwell2(mu)))

    thresholds = {k: tol.eps_test for k in keys}
    if oracle:
        thresholds["projection_vs_oracle"] = tol.eps_geom
    if d == 2:
        thresholds["classic_rule_gap"] = 1e-12
    ok = all(dev[k] <= thresholds[k] for k in keys)
    return VerificationReport(d=d, samples=samples, deviations=dev, thresholds=thresholds, ok=ok)


def _vertices(d: int, p: np.ndarray) -> np.ndarray:
    return np.eye(d) + p[:, None]
