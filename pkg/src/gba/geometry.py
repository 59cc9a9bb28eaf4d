"""Affine subspace primitives used by the prediction rule.

All subspaces are stored as an origin plus an orthonormal row basis of
direction vectors, so projections are plain matrix products.  Rank
decisions use column-pivoted QR with a threshold of ``eps_geom``
relative to the largest column norm; membership and consistency checks
use ``eps_geom`` relative to max(1, input scale).  Everything here is a
pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class GeometryError(Exception):
    """Base class for geometric failures."""


class NotInHull(GeometryError):
    """A point was expected inside an affine hull but is not."""


class GeometryDegenerate(GeometryError):
    """An intersection or construction lost the expected dimension."""


@dataclass(frozen=True)
class Tolerance:
    """Numeric tolerance policy.

    eps_geom gates geometric decisions (rank, sidedness, membership);
    eps_test is the looser bound used by assertions on derived
    identities.
    """

    eps_geom: float = 1e-9
    eps_test: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.eps_geom < 1e-3:
            raise ValueError(f"eps_geom out of range: {self.eps_geom}")
        if self.eps_test <= 0.0:
            raise ValueError(f"eps_test must be positive: {self.eps_test}")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class AffineSubspace:
    """Affine subspace {origin + c @ basis} with orthonormal basis rows.

    basis has shape (dim, ambient); dim may be zero for a single point.
    """

    origin: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.origin.shape[0]

    def contains(self, v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
        v = np.asarray(v, dtype=float)
        scale = max(1.0, float(np.abs(v).max()))
        return bool(np.linalg.norm(project_affine(v, self) - v) <= tol.eps_geom * scale)


def _orthonormal_rows(vectors: np.ndarray, eps: float) -> np.ndarray:
    """Orthonormal row basis of span(vectors) at relative threshold eps."""
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[1]))
    q, r, _ = scipy.linalg.qr(vectors.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] <= 0.0:
        return np.zeros((0, vectors.shape[1]))
    rank = int(np.sum(diag > eps * diag[0]))
    return np.ascontiguousarray(q[:, :rank].T)


def affine_hull(points, tol: Tolerance = DEFAULT_TOL) -> AffineSubspace:
    """Affine hull of a point set.

    Args:
        points: sequence of points, shape (m, d) with m >= 1.
        tol: tolerance policy for the rank decision.

    Returns:
        AffineSubspace through points[0] spanning the differences.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"need a nonempty 2-d point array, got shape {pts.shape}")
    origin = pts[0].copy()
    diffs = pts[1:] - origin
    return AffineSubspace(origin=origin, basis=_orthonormal_rows(diffs, tol.eps_geom))


def project_affine(v: np.ndarray, sub: AffineSubspace) -> np.ndarray:
    """Orthogonal projection of v onto the subspace."""
    v = np.asarray(v, dtype=float)
    if v.shape != sub.origin.shape:
        raise ValueError(f"dimension mismatch: point {v.shape} vs subspace {sub.origin.shape}")
    w = v - sub.origin
    return sub.origin + (w @ sub.basis.T) @ sub.basis


def intersect(a: AffineSubspace, b: AffineSubspace, tol: Tolerance = DEFAULT_TOL):
    """Intersection of two affine subspaces.

    Solves the joined linear system for affine coefficients and
    classifies the result exactly: None when the system is inconsistent
    at eps_geom, a point (ndarray) when the intersection has dimension
    zero, and an AffineSubspace otherwise.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    rhs = b.origin - a.origin
    scale = max(1.0, float(np.linalg.norm(a.origin)), float(np.linalg.norm(b.origin)))
    m = np.concatenate([a.basis, -b.basis], axis=0).T  # (d, ka+kb)
    if m.shape[1] == 0:
        if np.linalg.norm(rhs) <= tol.eps_geom * scale:
            return a.origin.copy()
        return None
    sol, _, _, _ = np.linalg.lstsq(m, rhs, rcond=None)
    if np.linalg.norm(m @ sol - rhs) > tol.eps_geom * scale:
        return None
    ka = a.basis.shape[0]
    point = a.origin + sol[:ka] @ a.basis
    null = scipy.linalg.null_space(m, rcond=tol.eps_geom)
    if null.shape[1] == 0:
        return point
    # coefficient-space null vectors map to directions shared by both subspaces
    dirs = _orthonormal_rows(null[:ka, :].T @ a.basis, tol.eps_geom)
    return AffineSubspace(origin=point, basis=dirs)


def affine_coords(v: np.ndarray, generators, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Affine coordinates of v over a generator set.

    Solves [G^T; 1^T] c = [v; 1] by least squares, returning the
    minimum-norm coefficient vector when the generators are affinely
    dependent.  Raises NotInHull when v is not in the affine hull of
    the generators within eps_geom.
    """
    v = np.asarray(v, dtype=float)
    gens = np.asarray(generators, dtype=float)
    if gens.ndim != 2 or gens.shape[1] != v.shape[0]:
        raise ValueError(f"generator shape {gens.shape} does not match point {v.shape}")
    m = gens.shape[0]
    lhs = np.concatenate([gens.T, np.ones((1, m))], axis=0)
    rhs = np.concatenate([v, [1.0]])
    coeffs, _, _, _ = np.linalg.lstsq(lhs, rhs, rcond=None)
    scale = max(1.0, float(np.abs(v).max()))
    resid = np.linalg.norm(lhs @ coeffs - rhs)
    if resid > tol.eps_geom * scale:
        raise NotInHull(f"point is {resid:.3e} from the affine hull (scale {scale:.3e})")
    return coeffs
