"""Prism state space and the target set for sequential prediction.

The running state of a predictor after n rounds is the pair (outcome
frequencies, hit rate).  Summing the two, v = freq + hit_rate * 1, maps
that pair into a prism in R^d where the "predicting well" region
becomes the intersection of d half-spaces with *orthonormal* normals

    n_l = -e_l + (2/d) * 1,

all of whose boundary planes pass through the point s = (2/d) * 1.  A
state is doing well when every signed offset

    sigma_l(v) = <v, n_l> - 2/d      (= hit_rate - freq_l)

is nonnegative.  Orthonormality makes the Euclidean projection onto the
target a coordinate clamp in the n_l basis, which project_to_target
exploits; project_oracle is the independent exhaustive check.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import DEFAULT_TOL, Tolerance, affine_hull, project_affine

MAX_CATEGORIES = 16


class NotInPrism(Exception):
    """A point violates the prism bounds beyond tolerance."""


@dataclass(frozen=True)
class HyperplaneFamily:
    """The d cutting planes bounding the target set.

    normals has orthonormal rows; center is the common point s where
    all planes meet.
    """

    d: int
    normals: np.ndarray
    center: np.ndarray

    @property
    def offset(self) -> float:
        # <x, n_l> = 2/d on plane l
        return 2.0 / self.d


@lru_cache(maxsize=None)
def hyperplanes(d: int) -> HyperplaneFamily:
    if not 2 <= d <= MAX_CATEGORIES:
        raise ValueError(f"category count must be in [2, {MAX_CATEGORIES}], got {d}")
    normals = np.full((d, d), 2.0 / d) - np.eye(d)
    normals.setflags(write=False)
    center = np.full(d, 2.0 / d)
    center.setflags(write=False)
    return HyperplaneFamily(d=d, normals=normals, center=center)


@dataclass(frozen=True)
class MeanState:
    """Average state after some rounds: outcome frequencies and hit rate."""

    freq: np.ndarray
    hit_rate: float

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> None:
        f = np.asarray(self.freq, dtype=float)
        if f.ndim != 1 or not 2 <= f.shape[0] <= MAX_CATEGORIES:
            raise NotInPrism(f"frequency vector has bad shape {f.shape}")
        if f.min() < -tol.eps_geom or abs(f.sum() - 1.0) > tol.eps_geom:
            raise NotInPrism(f"frequencies not a distribution: {f}")
        if not -tol.eps_geom <= self.hit_rate <= 1.0 + tol.eps_geom:
            raise NotInPrism(f"hit rate out of [0, 1]: {self.hit_rate}")


def state_to_point(state: MeanState, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Embed a mean state into the prism: v = freq + hit_rate * 1."""
    state.validate(tol)
    return np.asarray(state.freq, dtype=float) + state.hit_rate


def point_to_state(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> MeanState:
    """Invert the embedding; raises NotInPrism beyond eps_geom."""
    v = np.asarray(v, dtype=float)
    d = v.shape[0]
    gamma = (float(v.sum()) - 1.0) / d
    freq = v - gamma
    state = MeanState(freq=freq, hit_rate=gamma)
    state.validate(tol)
    return state


def side_values(v: np.ndarray) -> np.ndarray:
    """Signed offsets sigma_l(v) from each cutting plane.

    Defined for any point of R^d; negative entries mark violated
    planes.  For prism points this equals hit_rate - freq elementwise.
    """
    v = np.asarray(v, dtype=float)
    fam = hyperplanes(v.shape[0])
    return v @ fam.normals.T - fam.offset


class Region(enum.Enum):
    OUTSIDE = "outside"
    BOUNDARY = "boundary"
    INTERIOR = "interior"


@dataclass(frozen=True)
class Classification:
    region: Region
    planes: tuple[int, ...]  # planes carrying the point, boundary case only


def classify(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Classification:
    """Locate v relative to the target set at the eps_geom band."""
    sig = side_values(v)
    if sig.min() < -tol.eps_geom:
        return Classification(Region.OUTSIDE, ())
    on = np.flatnonzero(np.abs(sig) <= tol.eps_geom)
    if on.size:
        return Classification(Region.BOUNDARY, tuple(int(k) for k in on))
    return Classification(Region.INTERIOR, ())


def in_target(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    return classify(v, tol).region is not Region.OUTSIDE


def shortfall(v: np.ndarray) -> float:
    """Largest violation max(0, max_l(freq_l - hit_rate)); 0 inside."""
    return max(0.0, -float(side_values(v).min()))


def project_to_target(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Closest target point and its distance.

    Clamps the violated plane offsets in the orthonormal normal basis;
    for prism inputs the clamp is always feasible, and any numerical
    escape falls back to the exhaustive oracle.
    """
    v = np.asarray(v, dtype=float)
    sig = side_values(v)
    if sig.min() >= -tol.eps_geom:
        return v.copy(), 0.0
    fam = hyperplanes(v.shape[0])
    violated = sig < 0.0
    proj = v - sig[violated] @ fam.normals[violated]
    if _feasible(proj, tol.eps_geom):
        return proj, float(np.linalg.norm(sig[violated]))
    proj = project_oracle(v, tol)  # pragma: no cover - unreachable for prism inputs
    return proj, float(np.linalg.norm(v - proj))


def _feasible(x: np.ndarray, eps: float) -> bool:
    """Membership in the target set: plane sides plus prism bounds."""
    if side_values(x).min() < -eps:
        return False
    d = x.shape[0]
    gamma = (float(x.sum()) - 1.0) / d
    if not -eps <= gamma <= 1.0 + eps:
        return False
    return float((x - gamma).min()) >= -eps


@lru_cache(maxsize=None)
def _plane_subspace(d: int, active: tuple[int, ...]):
    """Affine subspace where the given planes hold with equality.

    The intersection of planes {l in active} is the affine hull of the
    unit points of the inactive categories together with the center s.
    """
    fam = hyperplanes(d)
    gens = [np.eye(d)[k] for k in range(d) if k not in active]
    gens.append(np.asarray(fam.center))
    return affine_hull(np.asarray(gens))


def _project_equalities(v: np.ndarray, rows: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Projection of v onto {x : rows @ x = rhs} (min-norm correction)."""
    corr, _, _, _ = np.linalg.lstsq(rows, rows @ v - rhs, rcond=None)
    return v - corr


def project_oracle(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Exact projection by enumerating all 2^d candidate active sets.

    Each plane subset is projected onto as an affine subspace; when a
    candidate leaves the prism, the violated facet constraints are
    added as equalities and the projection re-solved.  Feasible
    candidates compete on distance.  Exponential in d, which is why the
    category count is capped at 16; intended as a reference check for
    project_to_target.
    """
    v = np.asarray(v, dtype=float)
    d = v.shape[0]
    fam = hyperplanes(d)
    eps = tol.eps_geom
    best = None
    best_dist = np.inf
    for mask in range(1 << d):
        active = tuple(l for l in range(d) if mask >> l & 1)
        cand = project_affine(v, _plane_subspace(d, active))
        if not _feasible(cand, eps):
            cand = _augment_facets(v, cand, active, fam, eps)
            if cand is None:
                continue
        dist = float(np.linalg.norm(v - cand))
        if dist < best_dist - 0.0:
            best = cand
            best_dist = dist
    if best is None:  # pragma: no cover - the all-planes subset is always feasible
        raise NotInPrism("no feasible projection candidate found")
    return best


def _augment_facets(v, cand, active, fam, eps):
    """Re-solve a candidate with binding prism facets as equalities."""
    d = fam.d
    rows = [fam.normals[l] for l in active]
    rhs = [fam.offset] * len(active)
    ones = np.ones(d)
    freq_rows = np.eye(d) - 1.0 / d  # row k: freq_k(x) = <row, x> + 1/d
    bound = 2 * d + 2
    for _ in range(bound):
        gamma = (float(cand.sum()) - 1.0) / d
        freq = cand - gamma
        added = False
        for k in range(d):
            if freq[k] < -eps:
                rows.append(freq_rows[k])
                rhs.append(-1.0 / d)
                added = True
        if gamma < -eps:
            rows.append(ones)
            rhs.append(1.0)
            added = True
        elif gamma > 1.0 + eps:
            rows.append(ones)
            rhs.append(float(d + 1))
            added = True
        if not added:
            break
        cand = _project_equalities(v, np.asarray(rows), np.asarray(rhs))
    return cand if _feasible(cand, eps) else None
