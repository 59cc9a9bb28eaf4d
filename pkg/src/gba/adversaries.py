"""Outcome-sequence generators the predictor is tested against.

Five kinds: fixed (replay a literal, cycling unless disabled), iid
(sample a fixed category distribution), periodic (cycle a pattern),
worst_case (lowest-probability category under the predictor's current
mixture, lowest index on ties), and omit_category (delegate to an
inner adversary, remapping the omitted category to the next index so
it never occurs).  An adversary may observe the round's mixture but
never the sampled prediction.

Specs are declarative and hashable; instances are single-owner per
run.  encode() flattens a spec into plain arrays for the compiled
engine; the runtime objects and the engine consume random draws in
the same order, so both paths emit identical sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .rng import Stream, child_seed, sample_index

KINDS = ("fixed", "iid", "periodic", "worst_case", "omit_category")

# engine codes for the four base kinds, in KINDS order
_CODES = {"fixed": 0, "iid": 1, "periodic": 2, "worst_case": 3}


@dataclass(frozen=True)
class AdversarySpec:
    """Declarative adversary description, part of the config schema.

    Exactly the fields of the declared kind may be set: sequence and
    cycle for fixed, weights for iid, pattern for periodic, omit and
    inner for omit_category.  seed feeds the adversary's own stream
    (only iid draws from it).
    """

    kind: str
    sequence: tuple[int, ...] | None = None
    weights: tuple[float, ...] | None = None
    pattern: tuple[int, ...] | None = None
    omit: int | None = None
    inner: "AdversarySpec | None" = None
    cycle: bool = True
    seed: int = 0


def uniform_iid(d: int, seed: int = 0) -> AdversarySpec:
    return AdversarySpec(kind="iid", weights=(1.0 / d,) * d, seed=seed)


def validate_spec(spec: AdversarySpec, d: int) -> AdversarySpec:
    """Check dimensional consistency; returns the spec with defaults filled.

    omit_category without an explicit inner gets a uniform iid inner
    on the same seed.  Nested omit_category is rejected.
    """
    if spec.kind not in KINDS:
        raise ValueError(f"unknown adversary kind {spec.kind!r}")
    if spec.kind == "fixed":
        if not spec.sequence:
            raise ValueError("fixed adversary needs a nonempty sequence")
        _check_categories(spec.sequence, d)
    elif spec.kind == "iid":
        if spec.weights is None or len(spec.weights) != d:
            raise ValueError(f"iid adversary needs {d} weights")
        w = np.asarray(spec.weights, dtype=float)
        if w.min() < 0.0 or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights {spec.weights} are not a distribution")
    elif spec.kind == "periodic":
        if not spec.pattern:
            raise ValueError("periodic adversary needs a nonempty pattern")
        _check_categories(spec.pattern, d)
    elif spec.kind == "omit_category":
        if spec.omit is None or not 0 <= spec.omit < d:
            raise ValueError(f"omitted category {spec.omit} outside 0..{d - 1}")
        inner = spec.inner if spec.inner is not None else uniform_iid(d, spec.seed)
        if inner.kind == "omit_category":
            raise ValueError("omit_category cannot nest")
        spec = replace(spec, inner=validate_spec(inner, d))
    return spec


def _check_categories(seq, d: int) -> None:
    for x in seq:
        if not 0 <= int(x) < d:
            raise ValueError(f"category {x} outside 0..{d - 1}")


@dataclass
class Adversary:
    """Runtime adversary: one instance per replicate, stateful counter.

    next() may be given the round's mixture (worst_case requires it)
    and the play history; built-in kinds ignore the history.
    """

    spec: AdversarySpec
    d: int
    stream: Stream
    _n: int = 0
    _remap: np.ndarray = field(init=False)
    _base: AdversarySpec = field(init=False)

    def __post_init__(self) -> None:
        self._remap = np.arange(self.d, dtype=np.int64)
        self._base = self.spec
        if self.spec.kind == "omit_category":
            self._remap[self.spec.omit] = (self.spec.omit + 1) % self.d
            self._base = self.spec.inner

    def next(self, history=(), p: np.ndarray | None = None) -> int:
        base = self._base
        n = self._n
        self._n = n + 1
        if base.kind == "fixed":
            if not base.cycle and n >= len(base.sequence):
                raise IndexError(f"fixed sequence exhausted after {len(base.sequence)} rounds")
            x = base.sequence[n % len(base.sequence)]
        elif base.kind == "periodic":
            x = base.pattern[n % len(base.pattern)]
        elif base.kind == "iid":
            x = sample_index(np.asarray(base.weights), self.stream.next_float())
        else:
            if p is None:
                raise ValueError("worst_case adversary needs the round's mixture")
            x = 0
            for k in range(1, self.d):
                if p[k] < p[x]:
                    x = k
        return int(self._remap[x])


def make_adversary(spec: AdversarySpec, d: int, replicate: int = 0) -> Adversary:
    """Instantiate a validated spec for one replicate.

    The stream is seeded from (spec.seed, replicate) so replicates are
    independent but reproducible.
    """
    spec = validate_spec(spec, d)
    return Adversary(spec=spec, d=d, stream=Stream(child_seed(spec.seed, replicate)))


def encode(spec: AdversarySpec, d: int) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """Flatten a validated spec into engine arrays.

    Returns (code, pattern, weights, remap); unused slots get dummy
    singletons.  The engine applies remap after the base draw exactly
    as Adversary.next does.
    """
    spec = validate_spec(spec, d)
    remap = np.arange(d, dtype=np.int64)
    base = spec
    if spec.kind == "omit_category":
        remap[spec.omit] = (spec.omit + 1) % d
        base = spec.inner
    code = _CODES[base.kind]
    pattern = np.zeros(1, dtype=np.int64)
    weights = np.zeros(1, dtype=np.float64)
    if base.kind == "fixed":
        pattern = np.asarray(base.sequence, dtype=np.int64)
    elif base.kind == "periodic":
        pattern = np.asarray(base.pattern, dtype=np.int64)
    elif base.kind == "iid":
        weights = np.asarray(base.weights, dtype=np.float64)
    return code, pattern, weights, remap
