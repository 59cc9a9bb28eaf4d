"""Sequential category predictor driven by the randomized rule.

State is kept as integer counts (category totals and a hit total), so
the running means fed to the rule are exact ratios and two histories
with equal counts produce identical mixtures.  Each round: query the
mixture for the current state, sample a prediction, observe the true
category, update the counts.  The opening round has no state and plays
a configured category deterministically (case tag "init").
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import DEFAULT_TOL, GeometryDegenerate, Tolerance
from .prism import MAX_CATEGORIES
from .rng import Stream, sample_index
from .rule import CASE_TAGS, _distribution_kernel, _metrics_kernel

INTERIOR_POLICIES = ("uniform", "hold_last")


@dataclass
class PredictorState:
    """Mutable per-run predictor state.

    counts[k] is the number of rounds with true category k; hits the
    number of correct predictions; last_p the mixture played on the
    previous round, kept for the hold_last interior policy.
    """

    d: int
    stream: Stream
    first_prediction: int = 0
    interior: str = "uniform"
    tol: Tolerance = DEFAULT_TOL
    n: int = 0
    hits: int = 0
    counts: np.ndarray = field(init=False)
    last_p: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if not 2 <= self.d <= MAX_CATEGORIES:
            raise ValueError(f"d={self.d} outside supported range 2..{MAX_CATEGORIES}")
        if not 0 <= self.first_prediction < self.d:
            raise ValueError(f"first prediction {self.first_prediction} outside 0..{self.d - 1}")
        if self.interior not in INTERIOR_POLICIES:
            raise ValueError(f"unknown interior policy {self.interior!r}")
        self.counts = np.zeros(self.d, dtype=np.int64)
        self.last_p = np.zeros(self.d)
        self.last_p[self.first_prediction] = 1.0


@dataclass(frozen=True)
class Prediction:
    """One sampled prediction: category, mixture, and rule case code."""

    y: int
    p: np.ndarray
    case: int


@dataclass(frozen=True)
class StepRecord:
    """Post-update snapshot of one round."""

    n: int
    x: int
    y: int
    correct: bool
    freq: np.ndarray
    hit_rate: float
    dist: float
    shortfall: float
    case: str


def init(
    d: int,
    seed: int,
    first_prediction: int = 0,
    interior: str = "uniform",
    tol: Tolerance = DEFAULT_TOL,
) -> PredictorState:
    return PredictorState(
        d=d,
        stream=Stream(seed),
        first_prediction=first_prediction,
        interior=interior,
        tol=tol,
    )


def state_point(state: PredictorState) -> np.ndarray:
    """Current prism point (frequencies lifted by the hit rate)."""
    if state.n == 0:
        raise ValueError("state point undefined before the first observation")
    return state.counts / state.n + state.hits / state.n


def distribution(state: PredictorState) -> tuple[np.ndarray, int]:
    """Mixture for the current state, without sampling.

    Returns the probability vector and the rule case code (0 init,
    1 outside, 2 boundary, 3 interior).  The opening mixture is
    degenerate at the configured first prediction.
    """
    d = state.d
    if state.n == 0:
        p = np.zeros(d)
        p[state.first_prediction] = 1.0
        return p, 0
    q = state.counts / state.n
    gamma = state.hits / state.n
    sig = np.empty(d)
    p = np.empty(d)
    case = _distribution_kernel(q, gamma, state.tol.eps_geom, sig, p)
    if case < 0:
        raise GeometryDegenerate(f"mixture construction degenerate at n={state.n} (code {case})")
    if case == 3 and state.interior == "hold_last":
        p = state.last_p.copy()
    return p, case


def predict(state: PredictorState) -> Prediction:
    """Sample a category from the current mixture.

    Exactly one draw is consumed per round, degenerate mixtures
    included, so transcripts line up draw-for-draw with the game
    engine.  The opening mixture is degenerate, hence the first
    prediction is the configured category regardless of the draw.
    """
    p, case = distribution(state)
    y = sample_index(p, state.stream.next_float())
    return Prediction(y=y, p=p, case=case)


def observe(state: PredictorState, x: int, pred: Prediction) -> StepRecord:
    """Record the true category for a played prediction.

    Updates the counts and returns the post-update snapshot.  pred may
    come from predict or from an external strategy (case code -1).
    """
    if not 0 <= x < state.d:
        raise ValueError(f"category {x} outside 0..{state.d - 1}")
    state.n += 1
    state.counts[x] += 1
    correct = pred.y == x
    if correct:
        state.hits += 1
    state.last_p = pred.p
    q = state.counts / state.n
    gamma = state.hits / state.n
    dist, short = _metrics_kernel(q, gamma, state.tol.eps_geom)
    return StepRecord(
        n=state.n,
        x=x,
        y=pred.y,
        correct=correct,
        freq=q,
        hit_rate=gamma,
        dist=dist,
        shortfall=short,
        case=CASE_TAGS[pred.case],
    )
