"""Repeated games with vector payoffs and the separation certificate.

A payoff matrix assigns a d-dimensional payoff to each (row, column)
action pair.  Under the prediction matrix m_ij = e_j + [i = j] 1_d the
running average payoff IS the predictor's prism state, which ties the
sequential predictor to the general approachability machinery and is
itself asserted by a cross-module test.

check_separation certifies the geometric condition behind almost-sure
convergence: at any state outside the target, the projection of the
state is inside the reachable payoff set of the rule's mixture, and
the displacement to the state is perpendicular to that set.  Both are
polytope statements, so verifying them on the vertices is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_TOL, Tolerance, affine_coords
from .prism import classify, project_to_target, Region
from .predictor import Prediction, PredictorState, distribution, observe
from .rng import Stream, sample_index
from .rule import randomize


@dataclass(frozen=True)
class PayoffMatrix:
    """r x s matrix of d-dimensional payoff vectors."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.entries.ndim != 3 or min(self.entries.shape[:2]) < 1:
            raise ValueError(f"payoff entries must be (r, s, d), got {self.entries.shape}")
        self.entries.setflags(write=False)

    @property
    def r(self) -> int:
        return self.entries.shape[0]

    @property
    def s(self) -> int:
        return self.entries.shape[1]

    @property
    def dim(self) -> int:
        return self.entries.shape[2]


def prediction_payoff_matrix(d: int) -> PayoffMatrix:
    """Payoff matrix of the prediction game: rows predict, columns occur.

    m_ij = e_j, plus the all-ones lift on the diagonal, so averaging
    payoffs reproduces (category frequencies + hit rate).
    """
    if d < 2:
        raise ValueError(f"d={d} must be at least 2")
    entries = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            entries[i, j, j] = 1.0
            if i == j:
                entries[i, j] += 1.0
    return PayoffMatrix(entries=entries)


def mixed_payoff_vertices(matrix: PayoffMatrix, p: np.ndarray) -> np.ndarray:
    """Vertices of the payoff set reachable under row mixture p.

    Row j is the expected payoff when the column player answers with
    pure action j; the reachable set is their convex hull.  For the
    prediction matrix this is e_j + p^(j) 1_d.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (matrix.r,):
        raise ValueError(f"mixture length {p.shape} does not match {matrix.r} rows")
    return np.tensordot(p, matrix.entries, axes=(0, 0))


@dataclass(frozen=True)
class SeparationReport:
    """Vertex-level certificate that the target separates a state.

    products[j] = <vertex_j - closest, point - closest>; the target is
    convex, so nonpositive products separate, and for this rule they
    vanish.  hull_coords are the affine coefficients of closest on the
    vertices; nonnegative coefficients put it inside the hull.
    """

    point: np.ndarray
    mixture: np.ndarray
    closest: np.ndarray
    products: np.ndarray
    hull_coords: np.ndarray
    max_violation: float
    ok: bool


def check_separation(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> SeparationReport:
    """Certify the separation property of the rule at an outside state.

    Raises:
        ValueError: v is not outside the target.
        NotInHull, GeometryDegenerate: propagated from the hull solve.
    """
    v = np.asarray(v, dtype=float)
    if classify(v, tol).region is not Region.OUTSIDE:
        raise ValueError("separation is certified at outside states only")
    d = v.shape[0]
    p = randomize(v, tol)
    closest, _ = project_to_target(v, tol)
    vertices = mixed_payoff_vertices(prediction_payoff_matrix(d), p)
    products = (vertices - closest) @ (v - closest)
    coords = affine_coords(closest, vertices, tol)
    max_violation = float(np.abs(products).max())
    ok = max_violation <= tol.eps_test and float(coords.min()) >= -tol.eps_test
    return SeparationReport(
        point=v,
        mixture=p,
        closest=closest,
        products=products,
        hull_coords=coords,
        max_violation=max_violation,
        ok=ok,
    )


@dataclass(frozen=True)
class GameTranscript:
    """Realized actions and payoffs of one repeated game."""

    rows: np.ndarray
    cols: np.ndarray
    payoffs: np.ndarray
    mean: np.ndarray

    def recompute_mean(self) -> np.ndarray:
        return self.payoffs.mean(axis=0)


def run_game(matrix: PayoffMatrix, strategy, adversary, n: int, seed: int) -> GameTranscript:
    """Play n rounds of the repeated game.

    strategy(history) returns the row mixture for the round; history is
    the list of realized (row, column) pairs so far.  The column player
    sees the mixture but never the sampled row.  One draw is consumed
    per round from the game's own stream.
    """
    if n < 1:
        raise ValueError(f"need at least one round, got {n}")
    stream = Stream(seed)
    history: list[tuple[int, int]] = []
    rows = np.empty(n, dtype=np.int64)
    cols = np.empty(n, dtype=np.int64)
    payoffs = np.empty((n, matrix.dim))
    total = np.zeros(matrix.dim)
    for k in range(n):
        p = np.asarray(strategy(history), dtype=float)
        j = adversary.next(history, p)
        i = sample_index(p, stream.next_float())
        z = matrix.entries[i, j]
        history.append((i, j))
        rows[k] = i
        cols[k] = j
        payoffs[k] = z
        total += z
    return GameTranscript(rows=rows, cols=cols, payoffs=payoffs, mean=total / n)


class RulePlayer:
    """Row strategy induced by the prediction rule.

    Maintains a predictor state fed from the game history: the column
    is the observed category, the row the issued prediction.  Sampling
    stays with run_game, so on a shared seed the realized transcript
    matches the standalone predictor draw for draw.
    """

    def __init__(
        self,
        d: int,
        first_prediction: int = 0,
        interior: str = "uniform",
        tol: Tolerance = DEFAULT_TOL,
    ) -> None:
        # stream unused: run_game owns the sampling
        self.state = PredictorState(
            d=d,
            stream=Stream(0),
            first_prediction=first_prediction,
            interior=interior,
            tol=tol,
        )
        self._cursor = 0
        self._served: tuple[np.ndarray, int] | None = None

    def __call__(self, history) -> np.ndarray:
        for i, j in history[self._cursor :]:
            if self._served is None:
                opening = np.zeros(self.state.d)
                opening[self.state.first_prediction] = 1.0
                self._served = (opening, 0)
            p, case = self._served
            observe(self.state, j, Prediction(y=i, p=p, case=case))
        self._cursor = len(history)
        p, case = distribution(self.state)
        self._served = (p, case)
        return p
