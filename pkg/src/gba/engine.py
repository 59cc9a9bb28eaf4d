"""Compiled replicate loop for long prediction runs.

The loop body reuses the exact kernel sources of the rule and the
sampler (njit applied to the same function objects) and mirrors the
predictor's update order, draw for draw, so a compiled replicate is
bit-identical with the pure-Python loop over predict/observe.  The
counter-based generator is re-expressed here on uint64 scalars, which
wrap natively under numba; equality with the Python-integer version is
asserted in tests.

Compilation is cached on disk; the first call per process still pays
a few seconds.  Kernels hold no global state and release the GIL, so
replicates parallelize with plain threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .adversaries import AdversarySpec, encode, validate_spec
from .geometry import GeometryDegenerate
from .predictor import INTERIOR_POLICIES
from .prism import MAX_CATEGORIES
from .rng import child_seed, sample_index
from .rule import _distribution_kernel, _metrics_kernel

CHECKPOINT_NS = (100, 1000, 10000)
_TRACE_EXTRA = 8  # columns besides the d frequency columns

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / float(1 << 53)


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


_sample = njit(cache=True, nogil=True)(sample_index)
_dist = njit(cache=True, nogil=True)(_distribution_kernel)
_metrics = njit(cache=True, nogil=True)(_metrics_kernel)


@njit(cache=True, nogil=True)
def _replicate(
    d,
    steps,
    pred_seed,
    adv_seed,
    adv_code,
    pattern,
    weights,
    remap,
    first_pred,
    hold_last,
    eps,
    trace_every,
    trace,
    ckpt_ns,
    ckpts,
    case_counts,
    finals,
):
    counts = np.zeros(d, dtype=np.int64)
    hits = 0
    q = np.empty(d)
    sig = np.empty(d)
    p = np.empty(d)
    last_p = np.zeros(d)
    last_p[first_pred] = 1.0
    pred_ctr = pred_seed
    adv_ctr = adv_seed
    row = 0
    dist = 0.0
    short = 0.0
    gamma = 0.0
    for n in range(1, steps + 1):
        n0 = n - 1
        if n0 == 0:
            for l in range(d):
                p[l] = 0.0
            p[first_pred] = 1.0
            case = 0
        else:
            for l in range(d):
                q[l] = counts[l] / n0
            gamma0 = hits / n0
            case = _dist(q, gamma0, eps, sig, p)
            if case < 0:
                return -case
            if case == 3 and hold_last == 1:
                for l in range(d):
                    p[l] = last_p[l]
        if adv_code == 0 or adv_code == 2:
            x = pattern[n0 % pattern.shape[0]]
        elif adv_code == 1:
            adv_ctr = adv_ctr + _GOLDEN
            ua = np.float64(_mix64(adv_ctr) >> _S11) * _INV53
            x = _sample(weights, ua)
        else:
            x = 0
            for k in range(1, d):
                if p[k] < p[x]:
                    x = k
        x = remap[x]
        pred_ctr = pred_ctr + _GOLDEN
        u = np.float64(_mix64(pred_ctr) >> _S11) * _INV53
        y = _sample(p, u)
        counts[x] += 1
        if y == x:
            hits += 1
        for l in range(d):
            q[l] = counts[l] / n
        gamma = hits / n
        dist, short = _metrics(q, gamma, eps)
        case_counts[case] += 1
        for c in range(ckpt_ns.shape[0]):
            if ckpt_ns[c] == n:
                ckpts[c] = dist
        if n % trace_every == 0 or n == steps:
            trace[row, 0] = n
            trace[row, 1] = x
            trace[row, 2] = y
            trace[row, 3] = 1.0 if y == x else 0.0
            trace[row, 4] = gamma
            for l in range(d):
                trace[row, 5 + l] = q[l]
            trace[row, 5 + d] = dist
            trace[row, 6 + d] = short
            trace[row, 7 + d] = case
            row += 1
        for l in range(d):
            last_p[l] = p[l]
    finals[0] = dist
    finals[1] = short
    finals[2] = gamma
    max_q = 0.0
    for l in range(d):
        if counts[l] / steps > max_q:
            max_q = counts[l] / steps
    finals[3] = max_q
    return 0


@dataclass(frozen=True)
class ReplicateResult:
    """Numeric outputs of one replicate, before any formatting."""

    trace: np.ndarray
    checkpoint_ns: np.ndarray
    checkpoints: np.ndarray
    case_counts: np.ndarray
    final_dist: float
    final_shortfall: float
    final_gamma: float
    final_max_freq: float


def trace_row_count(steps: int, trace_every: int) -> int:
    return steps // trace_every + (1 if steps % trace_every else 0)


def run_replicate(
    d: int,
    steps: int,
    seed: int,
    replicate: int,
    adversary: AdversarySpec,
    first_prediction: int = 0,
    interior: str = "uniform",
    eps: float = 1e-9,
    trace_every: int = 1,
) -> ReplicateResult:
    """Run one replicate through the compiled loop.

    Predictor and adversary streams are seeded from (seed, replicate)
    and (adversary.seed, replicate) respectively, matching what the
    pure-Python loop would be handed.
    """
    if steps < 1:
        raise ValueError(f"need at least one step, got {steps}")
    if trace_every < 1:
        raise ValueError(f"trace_every must be positive, got {trace_every}")
    if not 2 <= d <= MAX_CATEGORIES:
        raise ValueError(f"d={d} outside supported range 2..{MAX_CATEGORIES}")
    if not 0 <= first_prediction < d:
        raise ValueError(f"first prediction {first_prediction} outside 0..{d - 1}")
    if interior not in INTERIOR_POLICIES:
        raise ValueError(f"unknown interior policy {interior!r}")
    spec = validate_spec(adversary, d)
    base = spec.inner if spec.kind == "omit_category" else spec
    if base.kind == "fixed" and not base.cycle and steps > len(base.sequence):
        raise ValueError(f"fixed sequence of {len(base.sequence)} exhausted before {steps} steps")
    code, pattern, weights, remap = encode(spec, d)
    nrows = trace_row_count(steps, trace_every)
    trace = np.empty((nrows, _TRACE_EXTRA + d))
    ckpt_ns = np.array([*CHECKPOINT_NS, steps], dtype=np.int64)
    ckpts = np.full(ckpt_ns.shape[0], np.nan)
    case_counts = np.zeros(4, dtype=np.int64)
    finals = np.zeros(4)
    status = _replicate(
        d,
        steps,
        np.uint64(child_seed(seed, replicate)),
        np.uint64(child_seed(spec.seed, replicate)),
        code,
        pattern,
        weights,
        remap,
        first_prediction,
        1 if interior == "hold_last" else 0,
        eps,
        trace_every,
        trace,
        ckpt_ns,
        ckpts,
        case_counts,
        finals,
    )
    if status != 0:
        raise GeometryDegenerate(f"mixture construction degenerate in replicate {replicate}")
    return ReplicateResult(
        trace=trace,
        checkpoint_ns=ckpt_ns,
        checkpoints=ckpts,
        case_counts=case_counts,
        final_dist=float(finals[0]),
        final_shortfall=float(finals[1]),
        final_gamma=float(finals[2]),
        final_max_freq=float(finals[3]),
    )
