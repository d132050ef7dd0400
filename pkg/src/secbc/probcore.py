"""Exact finite-alphabet probability objects and information measures.

All information quantities are in bits (base-2 logs). The convention
0 * log 0 = 0 is applied everywhere; entries below ``ZERO_CLIP`` are treated
as exact zeros inside log terms so that round-off never produces spurious
infinities.

Objects are immutable after construction (backing arrays are frozen), so
every operation here is a pure function that is safe to call concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, ValidationError

#: Mass / stochasticity tolerance. File-sourced decimals carry round-off, so
#: vectors within this tolerance of unit mass are renormalized on ingestion.
SUM_TOL = 1e-12

#: Entries below this are exact zeros inside log terms.
ZERO_CLIP = 1e-15


def _as_prob_vector(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{what} must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite entries")
    if np.any(arr < -SUM_TOL):
        raise ValidationError(f"{what} has a negative entry: min={arr.min()}")
    arr = np.clip(arr, 0.0, None)
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"{what} mass {total} is not 1 within {SUM_TOL}")
    arr = arr / total
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Distribution:
    """A probability vector over a finite alphabet.

    Entries must be non-negative and sum to one within ``SUM_TOL``; the vector
    is renormalized exactly on ingestion and frozen.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", _as_prob_vector(self.probs, "distribution"))

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    def __len__(self) -> int:
        return self.alphabet_size


def uniform(n: int) -> Distribution:
    """Uniform distribution over ``n`` symbols."""
    if n < 1:
        raise ValidationError(f"alphabet size must be >= 1, got {n}")
    return Distribution(np.full(n, 1.0 / n))


def point_mass(index: int, n: int) -> Distribution:
    """Deterministic distribution concentrated on ``index``."""
    if not 0 <= index < n:
        raise ValidationError(f"point mass index {index} outside alphabet of size {n}")
    p = np.zeros(n)
    p[index] = 1.0
    return Distribution(p)


@dataclass(frozen=True)
class Channel:
    """A row-stochastic conditional-probability matrix P(output | input).

    Rows are indexed by input symbol, columns by output symbol. Every row is
    validated (and renormalized) like a :class:`Distribution`.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.matrix, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError(f"channel must be a non-empty 2-D matrix, got shape {arr.shape}")
        rows = np.vstack([_as_prob_vector(row, f"channel row {i}") for i, row in enumerate(arr)])
        rows.flags.writeable = False
        object.__setattr__(self, "matrix", rows)

    @property
    def n_inputs(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_outputs(self) -> int:
        return int(self.matrix.shape[1])

    def row(self, x: int) -> Distribution:
        return Distribution(self.matrix[x])


def identity_channel(n: int) -> Channel:
    return Channel(np.eye(n))


def bsc(crossover: float) -> Channel:
    """Binary symmetric channel with the given crossover probability."""
    if not 0.0 <= crossover <= 1.0:
        raise DomainError(f"crossover must be in [0, 1], got {crossover}")
    return Channel(np.array([[1.0 - crossover, crossover], [crossover, 1.0 - crossover]]))


@dataclass(frozen=True)
class JointDistribution:
    """A joint probability table over 2 to 4 named variables.

    ``axes`` labels the table dimensions (e.g. ``("x", "y")``). Marginalizing
    any subset of axes yields a valid joint/marginal again.
    """

    table: np.ndarray
    axes: tuple[str, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.table, dtype=float)
        axes = tuple(self.axes)
        if not 2 <= arr.ndim <= 4:
            raise ValidationError(f"joint table must have 2-4 axes, got {arr.ndim}")
        if len(axes) != arr.ndim:
            raise ValidationError(f"{len(axes)} axis labels for a {arr.ndim}-D table")
        if len(set(axes)) != len(axes):
            raise ValidationError(f"axis labels must be distinct, got {axes}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("joint table contains non-finite entries")
        if np.any(arr < -SUM_TOL):
            raise ValidationError(f"joint table has a negative entry: min={arr.min()}")
        arr = np.clip(arr, 0.0, None)
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"joint table mass {total} is not 1 within {SUM_TOL}")
        arr = arr / total
        arr.flags.writeable = False
        object.__setattr__(self, "table", arr)
        object.__setattr__(self, "axes", axes)

    def axis_index(self, name: str) -> int:
        try:
            return self.axes.index(name)
        except ValueError:
            raise ValidationError(f"axis {name!r} not among {self.axes}") from None

    def marginal(self, *keep: str) -> "JointDistribution | Distribution":
        """Marginalize onto the named axes (in table order)."""
        idx = sorted(self.axis_index(name) for name in keep)
        if not idx:
            raise ValidationError("must keep at least one axis")
        drop = tuple(i for i in range(self.table.ndim) if i not in idx)
        sub = self.table.sum(axis=drop) if drop else self.table
        if len(idx) == 1:
            return Distribution(sub)
        return JointDistribution(sub, tuple(self.axes[i] for i in idx))


def entropy_bits(values: np.ndarray) -> float:
    """Entropy in bits of a non-negative array (any shape), 0*log0 = 0."""
    arr = np.asarray(values, dtype=float).ravel()
    mask = arr > ZERO_CLIP
    if not np.any(mask):
        return 0.0
    p = arr[mask]
    return float(-np.sum(p * np.log2(p)))


def entropy(d: Distribution) -> float:
    """Shannon entropy H(d) in bits; lies in [0, log2 |alphabet|]."""
    return entropy_bits(d.probs)


def binary_entropy(p: float) -> float:
    """h(p) = -p log2 p - (1-p) log2(1-p) for p in [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary entropy argument must be in [0, 1], got {p}")
    return entropy_bits(np.array([p, 1.0 - p]))


def group_mutual_information(
    j: JointDistribution,
    left: Sequence[str],
    right: Sequence[str],
    given: Sequence[str] = (),
) -> float:
    """I(left ; right | given) in bits, via the entropy identity.

    I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C). Tiny negative results from
    float accumulation are clamped to zero.
    """
    left_s, right_s, given_s = set(left), set(right), set(given)
    if left_s & right_s or left_s & given_s or right_s & given_s:
        raise ValidationError("left/right/given axis groups must be disjoint")

    def h(names: set[str]) -> float:
        if not names:
            return 0.0
        drop = tuple(i for i, a in enumerate(j.axes) if a not in names)
        return entropy_bits(j.table.sum(axis=drop) if drop else j.table)

    value = h(left_s | given_s) + h(right_s | given_s) - h(left_s | right_s | given_s) - h(given_s)
    return max(0.0, float(value))


def mutual_information(j: JointDistribution) -> float:
    """I(A;B) for a two-axis joint: H(A) + H(B) - H(A,B), always >= 0."""
    if len(j.axes) != 2:
        raise ValidationError(f"mutual_information needs a 2-axis joint, got {len(j.axes)}")
    return group_mutual_information(j, (j.axes[0],), (j.axes[1],))

def conditional_mutual_information(j: JointDistribution) -> float:
    """I(A;B|C) for a three-axis joint whose FIRST axis is the conditioner C."""
    if len(j.axes) != 3:
        raise ValidationError(f"conditional MI needs a 3-axis joint, got {len(j.axes)}")
    return group_mutual_information(j, (j.axes[1],), (j.axes[2],), given=(j.axes[0],))


def compose(first: Channel, second: Channel) -> Channel:
    """Cascade two channels: output of ``first`` feeds ``second``."""
    if first.n_outputs != second.n_inputs:
        raise ValidationError(
            f"cascade mismatch: {first.n_outputs} outputs vs {second.n_inputs} inputs"
        )
    return Channel(first.matrix @ second.matrix)


def joint_from(input_dist: Distribution, ch: Channel, axes: tuple[str, str] = ("x", "y")) -> JointDistribution:
    """Joint law table[x][y] = input[x] * ch[x][y]."""
    if input_dist.alphabet_size != ch.n_inputs:
        raise ValidationError(
            f"input size {input_dist.alphabet_size} does not match channel inputs {ch.n_inputs}"
        )
    return JointDistribution(input_dist.probs[:, None] * ch.matrix, axes)


def output_distribution(input_dist: Distribution, ch: Channel) -> Distribution:
    """Push an input distribution through a channel."""
    if input_dist.alphabet_size != ch.n_inputs:
        raise ValidationError("input size does not match channel inputs")
    return Distribution(input_dist.probs @ ch.matrix)


def channel_mutual_information(input_probs: np.ndarray, ch: Channel) -> np.ndarray:
    """I(X;Y) in bits for a batch of input rows (shape (N, |X|) or (|X|,)).

    Vectorized: H(output mixture) minus input-weighted row entropies.
    """
    p = np.atleast_2d(np.asarray(input_probs, dtype=float))
    if p.shape[1] != ch.n_inputs:
        raise ValidationError("input rows do not match channel input size")
    out = p @ ch.matrix
    with np.errstate(divide="ignore", invalid="ignore"):
        h_out = -np.sum(np.where(out > ZERO_CLIP, out * np.log2(np.maximum(out, ZERO_CLIP)), 0.0), axis=1)
    row_ent = row_entropies(ch)
    values = h_out - p @ row_ent
    values = np.maximum(values, 0.0)
    return values if np.asarray(input_probs).ndim > 1 else values[0]


def row_entropies(ch: Channel) -> np.ndarray:
    """Entropy in bits of each channel row."""
    m = ch.matrix
    with np.errstate(divide="ignore", invalid="ignore"):
        return -np.sum(np.where(m > ZERO_CLIP, m * np.log2(np.maximum(m, ZERO_CLIP)), 0.0), axis=1)


def simplex_lattice(dim: int, resolution: int) -> np.ndarray:
    """All compositions of ``resolution`` mass units into ``dim`` bins, normalized.

    Returns an array of shape (C(resolution+dim-1, dim-1), dim) in ascending
    lexicographic order of the underlying integer compositions. Grid points
    are exact rationals over a common denominator, so grids are reproducible
    bit for bit.
    """
    if dim < 1:
        raise ValidationError(f"dim must be >= 1, got {dim}")
    if resolution < 1:
        raise ValidationError(f"resolution must be >= 1, got {resolution}")
    if dim == 1:
        return np.ones((1, 1))
    n_points = comb(resolution + dim - 1, dim - 1)
    out = np.empty((n_points, dim), dtype=float)
    for i, bars in enumerate(itertools.combinations(range(resolution + dim - 1), dim - 1)):
        prev = -1
        for k, b in enumerate(bars):
            out[i, k] = b - prev - 1
            prev = b
        out[i, dim - 1] = resolution + dim - 2 - prev
    out /= resolution
    return out


def simplex_grid(dim: int, resolution: int) -> Iterator[Distribution]:
    """Stream the lattice of :func:`simplex_lattice` as Distribution objects."""
    for row in simplex_lattice(dim, resolution):
        yield Distribution(row)
