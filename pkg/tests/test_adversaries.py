"""Adversary kinds: validation, determinism, remapping, engine encoding."""

import numpy as np
import pytest

from gba.adversaries import (
    KINDS,
    AdversarySpec,
    encode,
    make_adversary,
    uniform_iid,
    validate_spec,
)
from gba.rng import Stream, child_seed, sample_index


def test_kinds_are_frozen():
    assert KINDS == ("fixed", "iid", "periodic", "worst_case", "omit_category")


def test_validation_errors():
    with pytest.raises(ValueError):
        validate_spec(AdversarySpec(kind="chaotic"), 3)
    with pytest.raises(ValueError):
        validate_spec(AdversarySpec(kind="fixed"), 3)
    with pytest.raises(ValueError):
        validate_spec(AdversarySpec(kind="fixed", sequence=(0, 3)), 3)
    with pytest.raises(ValueError):
        validate_spec(AdversarySpec(kind="iid", weights=(0.5, 0.5)), 3)
    with pytest.raises(ValueError):
        validate_spec(AdversarySpec(kind="iid", weights=(0.7, 0.4, -0.1)), 3)
    with pytest.raises(ValueError):
        validate_spec(AdversarySpec(kind="periodic", pattern=()), 3)
    with pytest.raises(ValueError):
        validate_spec(AdversarySpec(kind="omit_category", omit=5), 3)
    with pytest.raises(ValueError):
        validate_spec(
            AdversarySpec(
                kind="omit_category",
                omit=0,
                inner=AdversarySpec(kind="omit_category", omit=1),
            ),
            3,
        )


def test_uniform_iid_spec():
    spec = validate_spec(uniform_iid(4, seed=9), 4)
    assert spec.kind == "iid"
    assert spec.seed == 9
    assert np.abs(np.asarray(spec.weights) - 0.25).max() <= 1e-15


def test_fixed_cycles_by_default():
    adv = make_adversary(AdversarySpec(kind="fixed", sequence=(2, 0, 1)), 3)
    draws = [adv.next() for _ in range(7)]
    assert draws == [2, 0, 1, 2, 0, 1, 2]


def test_fixed_exhausts_when_cycling_disabled():
    adv = make_adversary(AdversarySpec(kind="fixed", sequence=(1, 1), cycle=False), 3)
    assert [adv.next(), adv.next()] == [1, 1]
    with pytest.raises(IndexError):
        adv.next()


def test_periodic_pattern():
    adv = make_adversary(AdversarySpec(kind="periodic", pattern=(0, 0, 2)), 3)
    assert [adv.next() for _ in range(6)] == [0, 0, 2, 0, 0, 2]


def test_iid_reproducible_and_stream_isolated():
    spec = AdversarySpec(kind="iid", weights=(0.2, 0.3, 0.5), seed=77)
    a = make_adversary(spec, 3)
    b = make_adversary(spec, 3)
    assert [a.next() for _ in range(50)] == [b.next() for _ in range(50)]
    # replicate index shifts the stream
    c = make_adversary(spec, 3, replicate=1)
    assert [c.next() for _ in range(50)] != [b.next() for _ in range(50)]


def test_iid_matches_manual_sampling():
    spec = AdversarySpec(kind="iid", weights=(0.2, 0.3, 0.5), seed=4)
    adv = make_adversary(spec, 3)
    stream = Stream(child_seed(4, 0))
    w = np.array([0.2, 0.3, 0.5])
    expect = [sample_index(w, stream.next_float()) for _ in range(30)]
    assert [adv.next() for _ in range(30)] == expect


def test_worst_case_picks_least_likely():
    adv = make_adversary(AdversarySpec(kind="worst_case"), 3)
    assert adv.next(p=np.array([0.5, 0.3, 0.2])) == 2
    assert adv.next(p=np.array([1 / 3, 1 / 3, 1 / 3])) == 0  # lowest index on ties
    assert adv.next(p=np.array([0.1, 0.6, 0.3])) == 0
    with pytest.raises(ValueError):
        adv.next(p=None)


def test_omit_category_never_emits_omitted():
    spec = AdversarySpec(kind="omit_category", omit=2, seed=3)
    adv = make_adversary(spec, 4)
    draws = [adv.next() for _ in range(500)]
    assert 2 not in draws
    assert set(draws) == {0, 1, 3}


def test_omit_category_remaps_to_next_index():
    inner = AdversarySpec(kind="fixed", sequence=(0, 1, 2, 3))
    spec = AdversarySpec(kind="omit_category", omit=1, inner=inner)
    adv = make_adversary(spec, 4)
    assert [adv.next() for _ in range(4)] == [0, 2, 2, 3]
    # wraps at the top index
    spec = AdversarySpec(kind="omit_category", omit=3, inner=inner)
    adv = make_adversary(spec, 4)
    assert [adv.next() for _ in range(4)] == [0, 1, 2, 0]


def test_omit_category_default_inner_is_uniform():
    spec = validate_spec(AdversarySpec(kind="omit_category", omit=0, seed=13), 3)
    assert spec.inner is not None
    assert spec.inner.kind == "iid"
    assert spec.inner.seed == 13
    assert np.abs(np.asarray(spec.inner.weights) - 1 / 3).max() <= 1e-15


def test_encode_round_trip():
    code, pattern, weights, remap = encode(
        AdversarySpec(kind="fixed", sequence=(1, 0)), 3
    )
    assert code == 0
    assert pattern.tolist() == [1, 0]
    assert remap.tolist() == [0, 1, 2]

    code, pattern, weights, remap = encode(
        AdversarySpec(kind="omit_category", omit=2, seed=8), 3
    )
    assert code == 1  # inner defaults to iid
    assert np.abs(weights - 1 / 3).max() <= 1e-15
    assert remap.tolist() == [0, 1, 0]

    code, _, _, _ = encode(AdversarySpec(kind="worst_case"), 3)
    assert code == 3


def test_spec_is_hashable():
    spec = AdversarySpec(kind="fixed", sequence=(0, 1))
    assert hash(spec) == hash(AdversarySpec(kind="fixed", sequence=(0, 1)))
    assert spec != AdversarySpec(kind="fixed", sequence=(1, 0))
