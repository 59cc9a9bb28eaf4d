"""The randomized prediction rule on the prism state space.

For a state point v outside the target set, the rule intersects two
affine hulls: one through the plane center s, the unit points of the
categories whose planes v has cleared ("above"), and v itself; the
other through the unit points of the remaining categories ("below").
The intersection is a single point of the probability simplex and is
the mixture the predictor plays.  On the target boundary the rule
splits uniformly over the incident planes; in the interior any choice
is admissible and the default is uniform.

The mixture has a closed form: writing the intersection point as
a*s + sum_k b_k e_k + c*v and eliminating the b_k against the
requirements p_l = 0 for l above and sum(p) = 1 leaves a 2x2 linear
system for (a, c).  _distribution_kernel solves exactly that system
with plain scalar arithmetic so the jitted simulation engine can
compile the very same function; randomize_reference keeps the explicit
hull-intersection construction as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import (
    DEFAULT_TOL,
    AffineSubspace,
    GeometryDegenerate,
    Tolerance,
    affine_hull,
    intersect,
)
from .prism import (
    Region,
    classify,
    hyperplanes,
    point_to_state,
    project_to_target,
    side_values,
)

# step-record vocabulary; 0 is the deterministic opening prediction
CASE_TAGS = {0: "init", 1: "case1", 2: "case2", 3: "interior", -1: "external"}

# below this total plane violation the float evaluation of the
# auxiliary point loses digits, so it is recomputed in exact rationals
_EXACT_FALLBACK = 1e-5


@dataclass(frozen=True)
class Partition:
    """Category indices split by plane side, each ascending."""

    below: tuple[int, ...]
    above: tuple[int, ...]

    @property
    def j(self) -> int:
        return len(self.below) - 1


def partition(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Partition:
    """Split categories by the sign of their plane offset.

    Offsets within the eps_geom band count as below, matching the
    boundary handling of the rule.
    """
    sig = side_values(v)
    below = tuple(int(k) for k in np.flatnonzero(sig <= tol.eps_geom))
    above = tuple(int(k) for k in np.flatnonzero(sig > tol.eps_geom))
    return Partition(below=below, above=above)


def _distribution_kernel(q, gamma, eps, sig, p):
    """Fill p with the rule's mixture for mean state (q, gamma).

    Returns the case code: 1 outside, 2 boundary, 3 interior, negative
    on a degenerate construction.  Scalar loops only, in a fixed
    evaluation order, so that the numba-compiled copy used by the
    simulation engine is bit-identical with this source.
    """
    d = q.shape[0]
    two_over_d = 2.0 / d
    outside = False
    n_planes = 0
    for l in range(d):
        sig[l] = gamma - q[l]
        if sig[l] < -eps:
            outside = True
        if -eps <= sig[l] <= eps:
            n_planes += 1
    if outside:
        n_above = 0
        sum_above = 0.0
        sum_below = 0.0
        for l in range(d):
            if sig[l] <= eps:
                sum_below += q[l] + gamma
            else:
                n_above += 1
                sum_above += q[l] + gamma
        k1 = 1.0 - (2.0 * n_above) / d
        k2 = 2.0 - (2.0 * n_above) / d
        det = k1 * sum_below - k2 * (1.0 - sum_above)
        scale = abs(k1 * sum_below) + abs(k2 * (1.0 - sum_above))
        if abs(det) <= 1e-14 * scale:
            return -1
        a = (sum_below - 1.0 + sum_above) / det
        c = -1.0 / det
        total = 0.0
        for l in range(d):
            if sig[l] <= eps:
                pl = two_over_d * a + c * (q[l] + gamma)
                if pl < -eps:
                    return -2
                if pl < 0.0:
                    pl = 0.0
                p[l] = pl
                total += pl
            else:
                p[l] = 0.0
        if abs(total - 1.0) > d * eps:
            return -2
        for l in range(d):
            p[l] = p[l] / total
        return 1
    if n_planes > 0:
        w = 1.0 / n_planes
        for l in range(d):
            if -eps <= sig[l] <= eps:
                p[l] = w
            else:
                p[l] = 0.0
        return 2
    for l in range(d):
        p[l] = 1.0 / d
    return 3


def _metrics_kernel(q, gamma, eps):
    """Distance to the target and worst plane violation for (q, gamma).

    Same gating as project_to_target: states within the eps band count
    as distance zero.  Kept jittable for the simulation engine.
    """
    d = q.shape[0]
    min_sig = np.inf
    sq = 0.0
    for l in range(d):
        sig = gamma - q[l]
        if sig < min_sig:
            min_sig = sig
        if sig < 0.0:
            sq += sig * sig
    short = -min_sig if min_sig < 0.0 else 0.0
    dist = math.sqrt(sq) if min_sig < -eps else 0.0
    return dist, short


def randomize(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The rule's mixture at prism point v.

    Args:
        v: prism point (validated).
        tol: tolerance policy; eps_geom sets the boundary band.

    Returns:
        Probability vector over the d categories.

    Raises:
        NotInPrism: v violates the prism bounds.
        GeometryDegenerate: the hull intersection failed to produce a
            single simplex point (never observed for prism inputs).
    """
    state = point_to_state(v, tol)
    d = state.freq.shape[0]
    sig = np.empty(d)
    p = np.empty(d)
    case = _distribution_kernel(state.freq, state.hit_rate, tol.eps_geom, sig, p)
    if case < 0:
        raise GeometryDegenerate(f"mixture construction degenerate at {v} (code {case})")
    return p


def randomize_reference(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Outside-case mixture built by explicit hull intersection.

    Independent construction used to cross-check randomize: forms the
    two affine hulls literally and intersects them.  Only defined for
    states outside the target.
    """
    if classify(v, tol).region is not Region.OUTSIDE:
        raise ValueError("reference construction applies to outside states only")
    v = np.asarray(v, dtype=float)
    d = v.shape[0]
    part = partition(v, tol)
    fam = hyperplanes(d)
    eye = np.eye(d)
    hull_through_state = affine_hull(
        np.vstack([fam.center[None, :], eye[list(part.above)], v[None, :]]), tol
    )
    hull_of_below = affine_hull(eye[list(part.below)], tol)
    point = intersect(hull_through_state, hull_of_below, tol)
    if point is None or isinstance(point, AffineSubspace):
        raise GeometryDegenerate("hull intersection is not a single point")
    return _into_simplex(point, tol.eps_geom)


def _into_simplex(p: np.ndarray, eps: float) -> np.ndarray:
    if p.min() < -eps or abs(p.sum() - 1.0) > p.shape[0] * eps:
        raise GeometryDegenerate(f"intersection point {p} is not on the simplex")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def classic_blackwell2(mu) -> float:
    """Blackwell's original two-category rule.

    Takes the planar state (frequency of ones, hit rate) and returns
    the probability of predicting category 1: 0 in the left triangle,
    1 in the right triangle, and in the bottom triangle the point where
    the line from (1/2, 1/2) through the state meets the horizontal
    axis.  Ties go to the earlier region; inside the target the choice
    is arbitrary and 1/2 is returned.
    """
    x, y = float(mu[0]), float(mu[1])
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"state ({x}, {y}) outside the unit square")
    if x <= y <= 1.0 - x:
        return 0.0
    if 1.0 - x <= y <= x:
        return 1.0
    if y <= x and y <= 1.0 - x:
        return 0.5 + (x - 0.5) / (1.0 - 2.0 * y)
    return 0.5


@dataclass(frozen=True)
class AuxiliaryPoint:
    """Witness point pinning the rule to its separation certificate.

    point lies on the line through v and its target projection, inside
    the hull of the mixture point and the above-category unit points;
    lambdas are its coefficients on those unit points, aligned with
    partition(v).above.
    """

    point: np.ndarray
    lambdas: np.ndarray


def auxiliary_point(
    v: np.ndarray,
    p: np.ndarray | None = None,
    v_proj: np.ndarray | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> AuxiliaryPoint:
    """Intersection of the projection line with the mixture hull.

    The line through v and its target projection crosses the simplex
    hyperplane exactly once (their hit-rate coordinates differ for any
    outside state), and that crossing is the only candidate for the
    hull intersection; membership is certified by rebuilding the point
    from its hull coefficients.

    Args:
        v: prism point outside the target.
        p: mixture at v; computed by randomize when omitted.
        v_proj: target projection of v; its plane offsets are derived
            directly from v when omitted.
        tol: tolerance policy.

    Raises:
        ValueError: v is not outside the target.
        GeometryDegenerate: the crossing does not lie in the hull.
    """
    v = np.asarray(v, dtype=float)
    if classify(v, tol).region is not Region.OUTSIDE:
        raise ValueError("auxiliary point is defined for outside states only")
    d = v.shape[0]
    part = partition(v, tol)
    if p is None:
        p = randomize(v, tol)
    gamma = (float(v.sum()) - 1.0) / d
    if v_proj is not None:
        direction = np.asarray(v_proj, dtype=float) - v
        denom = float(direction.sum())
        tau = -gamma * d / denom
        raw = v + tau * direction
    else:
        sig = side_values(v)
        fam = hyperplanes(d)
        violated = np.flatnonzero(sig < 0.0)
        denom = -float(sig[violated].sum())
        tau = -gamma * d / denom
        if denom < _EXACT_FALLBACK:
            raw = _crossing_exact(v, violated, d)
        else:
            raw = v - tau * (sig[violated] @ fam.normals[violated])
    lambdas = raw[list(part.above)].copy()
    point = _rebuild_on_hull(p, lambdas, part)
    slack = tol.eps_test * (1.0 + 1e-6 * abs(tau))
    gap = float(np.abs(point - raw).max())
    if gap > slack:
        raise GeometryDegenerate(
            f"projection line misses the mixture hull by {gap:.3e} (slack {slack:.3e})"
        )
    if side_values(point).min() >= 0.0:  # pragma: no cover - impossible on the simplex plane
        raise GeometryDegenerate("auxiliary point unexpectedly inside the target")
    return AuxiliaryPoint(point=point, lambdas=lambdas)


def _crossing_exact(v: np.ndarray, violated: np.ndarray, d: int) -> np.ndarray:
    """Exact-rational crossing of the projection line with {sum(x)=1}.

    Floats lose the direction of the violation vector when the total
    violation is tiny; rational arithmetic on the exact float inputs
    restores it.
    """
    vf = [Fraction(x) for x in v]
    gamma = (sum(vf) - 1) / d
    sig = {int(l): gamma - (vf[int(l)] - gamma) for l in violated}
    denom = -sum(sig.values())
    tau = -gamma * d / denom
    raw = []
    for l in range(d):
        shift = sum(s * (Fraction(2, d) - (1 if k == l else 0)) for k, s in sig.items())
        raw.append(float(vf[l] - tau * shift))
    return np.asarray(raw)


def _rebuild_on_hull(p: np.ndarray, lambdas: np.ndarray, part: Partition) -> np.ndarray:
    lam_sum = float(lambdas.sum())
    point = np.empty(p.shape[0])
    for l in part.below:
        point[l] = p[l] * (1.0 - lam_sum)
    for i, l in enumerate(part.above):
        point[l] = lambdas[i]
    return point


def auxiliary_projection(p: np.ndarray, lambdas: np.ndarray, part: Partition) -> np.ndarray:
    """Closed-form target projection of the auxiliary point.

    Depends only on the mixture and the hull coefficients; agrees with
    project_to_target of the original state because projecting along
    the shared line cannot move the foot point.
    """
    d = p.shape[0]
    two_over_d = 2.0 / d
    lam_sum = float(lambdas.sum())
    out = np.empty(d)
    for l in part.below:
        out[l] = two_over_d * (1.0 - lam_sum)
    for i, l in enumerate(part.above):
        out[l] = two_over_d * (1.0 - (lam_sum - lambdas[i])) + (1.0 - two_over_d) * lambdas[i]
    return out


def auxiliary_residual(p: np.ndarray, lambdas: np.ndarray, part: Partition) -> np.ndarray:
    """Closed form of auxiliary point minus its target projection."""
    d = p.shape[0]
    two_over_d = 2.0 / d
    lam_sum = float(lambdas.sum())
    out = np.empty(d)
    for l in part.below:
        out[l] = (p[l] - two_over_d) * (1.0 - lam_sum)
    for l in part.above:
        out[l] = -two_over_d * (1.0 - lam_sum)
    return out
