"""Randomization rule: mixtures per region, d=2 classic rule, auxiliary point."""

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from gba.geometry import GeometryDegenerate
from gba.prism import (
    Region,
    classify,
    hyperplanes,
    project_to_target,
    side_values,
)
from gba.rule import (
    CASE_TAGS,
    auxiliary_point,
    auxiliary_projection,
    auxiliary_residual,
    classic_blackwell2,
    partition,
    randomize,
    randomize_reference,
)
from conftest import dims, outside_points, prism_points


def test_case_tags_cover_codes():
    assert CASE_TAGS == {0: "init", 1: "case1", 2: "case2", 3: "interior", -1: "external"}


def test_partition_examples():
    part = partition(np.array([1.5, 0.5, 0.5]))
    assert part.below == (0,)
    assert part.above == (1, 2)
    assert part.j == 0
    # zero hit rate puts every plane in the band or violated
    part = partition(np.array([0.5, 0.5, 0.0]))
    assert part.below == (0, 1, 2)
    assert part.above == ()
    assert part.j == 2


def test_mixture_worked_example():
    p = randomize(np.array([1.5, 0.5, 0.5]))
    assert np.abs(p - [1.0, 0.0, 0.0]).max() <= 1e-12


def test_mixture_fast_path_when_no_plane_is_cleared():
    # all offsets nonpositive: scale from the center hits v itself here
    p = randomize(np.array([0.5, 0.5, 0.0]))
    assert np.abs(p - [0.5, 0.5, 0.0]).max() <= 1e-12


def test_mixture_two_categories_example():
    p = randomize(np.array([5 / 8, 7 / 8]))
    assert np.abs(p - [0.25, 0.75]).max() <= 1e-12


def test_mixture_center_is_uniform():
    for d in (2, 3, 5):
        v = np.asarray(hyperplanes(d).center)
        assert np.abs(randomize(v) - 1.0 / d).max() <= 1e-12


def test_mixture_on_single_plane_is_degenerate():
    p = randomize(np.array([2.0, 1.0, 1.0]))
    assert np.abs(p - [1.0, 0.0, 0.0]).max() <= 1e-12


def test_mixture_on_two_planes_splits_evenly():
    # q = (0.4, 0.4, 0.2), hit rate 0.4: planes 0 and 1 are incident
    v = np.array([0.8, 0.8, 0.6])
    p = randomize(v)
    assert classify(v).region is Region.BOUNDARY
    assert np.abs(p - [0.5, 0.5, 0.0]).max() <= 1e-12


def test_mixture_interior_is_uniform():
    v = np.array([1.5, 1.5])
    assert classify(v).region is Region.INTERIOR
    assert np.abs(randomize(v) - 0.5).max() <= 1e-15


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_mixture_matches_reference_intersection(data):
    d = data.draw(dims(2, 6))
    v = data.draw(outside_points(d))
    assert np.abs(randomize(v) - randomize_reference(v)).max() <= 1e-9


def test_reference_rejects_non_outside():
    with pytest.raises(ValueError):
        randomize_reference(np.array([2.0, 1.0, 1.0]))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_mixture_is_a_distribution(data):
    d = data.draw(dims(2, 8))
    v = data.draw(prism_points(d))
    p = randomize(v)
    assert p.min() >= 0.0
    assert float(p.sum()) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_mixture_avoids_cleared_categories(data):
    """Categories strictly past their plane get zero mass when any plane binds."""
    d = data.draw(dims(2, 8))
    v = data.draw(prism_points(d))
    assume(classify(v).region is not Region.INTERIOR)
    p = randomize(v)
    for l in partition(v).above:
        assert p[l] == 0.0


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_mixture_permutation_equivariant(data):
    d = data.draw(dims(2, 6))
    v = data.draw(outside_points(d))
    perm = np.asarray(data.draw(st.permutations(range(d))))
    assert np.abs(randomize(v[perm]) - randomize(v)[perm]).max() <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_cleared_category_never_predicted_outside_interior(data):
    """Zero frequency with a positive hit rate keeps that category at zero."""
    d = data.draw(dims(2, 6))
    weights = np.asarray(data.draw(
        st.lists(st.floats(0.01, 1.0), min_size=d - 1, max_size=d - 1)
    ))
    q = np.zeros(d)
    q[1:] = weights / weights.sum()
    gamma = data.draw(st.floats(0.01, 1.0))
    v = q + gamma
    assume(classify(v).region is not Region.INTERIOR)
    assert randomize(v)[0] == 0.0


# --- two-category classic rule ---------------------------------------------


def _planar(v):
    # clamp the float cancellation so the recovered state stays in the square
    gamma = (float(v.sum()) - 1.0) / 2.0
    return (min(max(v[1] - gamma, 0.0), 1.0), min(max(gamma, 0.0), 1.0))


def test_classic_rule_regions():
    assert classic_blackwell2((0.2, 0.4)) == 0.0
    assert classic_blackwell2((0.8, 0.4)) == 1.0
    assert classic_blackwell2((0.6, 0.2)) == pytest.approx(2 / 3, abs=1e-15)
    assert classic_blackwell2((0.5, 0.9)) == 0.5
    with pytest.raises(ValueError):
        classic_blackwell2((1.2, 0.5))


def test_classic_rule_tie_precedence():
    # corners shared between triangles resolve to the earlier one;
    # dyadic coordinates keep the ties exact in floats
    assert classic_blackwell2((0.5, 0.5)) == 0.0
    assert classic_blackwell2((0.25, 0.25)) == 0.0
    assert classic_blackwell2((0.75, 0.25)) == 1.0


def test_classic_rule_matches_general_rule_on_triangles():
    # strict interiors of the two deterministic triangles
    for x, y in [(0.2, 0.4), (0.1, 0.2), (0.4, 0.45)]:
        v = np.array([1.0 - x + y, x + y])
        assert randomize(v)[1] == 0.0
        assert classic_blackwell2((x, y)) == 0.0
    for x, y in [(0.8, 0.4), (0.9, 0.2), (0.6, 0.45)]:
        v = np.array([1.0 - x + y, x + y])
        assert randomize(v)[1] == 1.0
        assert classic_blackwell2((x, y)) == 1.0


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_classic_rule_matches_general_rule(data):
    v = data.draw(prism_points(2))
    sig = side_values(v)
    # the exact center is the one tie where the conventions differ
    assume(np.abs(sig).max() > 1e-9)
    mu = _planar(v)
    assert randomize(v)[1] == pytest.approx(classic_blackwell2(mu), abs=1e-12)


# --- auxiliary point ---------------------------------------------------------


def test_auxiliary_worked_example():
    v = np.array([1.5, 0.5, 0.5])
    aux = auxiliary_point(v)
    assert np.abs(aux.point - [2.0, -0.5, -0.5]).max() <= 1e-12
    assert np.abs(aux.lambdas - [-0.5, -0.5]).max() <= 1e-12

    part = partition(v)
    p = randomize(v)
    proj, _ = project_to_target(v)
    foot = auxiliary_projection(p, aux.lambdas, part)
    assert np.abs(foot - proj).max() <= 1e-12
    res = auxiliary_residual(p, aux.lambdas, part)
    assert np.abs(res - [2 / 3, -4 / 3, -4 / 3]).max() <= 1e-12
    assert np.abs(res - (aux.point - foot)).max() <= 1e-12


def test_auxiliary_explicit_arguments_match_default_route():
    v = np.array([1.5, 0.5, 0.5])
    p = randomize(v)
    proj, _ = project_to_target(v)
    a = auxiliary_point(v)
    b = auxiliary_point(v, p=p, v_proj=proj)
    assert np.abs(a.point - b.point).max() <= 1e-10
    assert np.abs(a.lambdas - b.lambdas).max() <= 1e-10


def test_auxiliary_requires_outside_state():
    with pytest.raises(ValueError):
        auxiliary_point(np.array([2.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        auxiliary_point(np.array([1.5, 1.5]))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_auxiliary_chain(data):
    """Crossing point sits on the projection line, on the simplex plane,
    and shares its projection foot with the original state."""
    d = data.draw(dims(2, 6))
    v = data.draw(outside_points(d))
    aux = auxiliary_point(v)
    part = partition(v)
    p = randomize(v)
    proj, _ = project_to_target(v)

    assert float(aux.point.sum()) == pytest.approx(1.0, abs=1e-8)
    # colinearity with the projection direction
    direction = proj - v
    offset = aux.point - v
    scale = float(offset @ direction) / float(direction @ direction)
    assert np.abs(offset - scale * direction).max() <= 1e-8

    foot = auxiliary_projection(p, aux.lambdas, part)
    assert np.abs(foot - proj).max() <= 1e-8
    res = auxiliary_residual(p, aux.lambdas, part)
    assert np.abs(res - (aux.point - foot)).max() <= 1e-8


def test_auxiliary_exact_fallback_for_tiny_violations():
    # total violation ~1e-6 forces the rational crossing path
    q = np.array([1 / 3 + 1e-6, 1 / 3 - 5e-7, 1 / 3 - 5e-7])
    gamma = 1 / 3
    v = q + gamma
    assert classify(v).region is Region.OUTSIDE
    aux = auxiliary_point(v)
    assert float(aux.point.sum()) == pytest.approx(1.0, abs=1e-8)
    proj, _ = project_to_target(v)
    foot = auxiliary_projection(randomize(v), aux.lambdas, partition(v))
    assert np.abs(foot - proj).max() <= 1e-6
