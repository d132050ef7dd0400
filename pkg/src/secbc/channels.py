"""Broadcast channel model and ordering classification.

A broadcast configuration stores only the three conditional marginals
P(Y1|X), P(Y2|X), P(Z|X): every capacity expression implemented downstream
depends on the marginals alone, so the full joint transition law is never
needed.

Degradedness between two channels is decided by a minimax linear program
(minimize the max-abs residual over row-stochastic degrading kernels); the
less-noisy ordering is screened through concavity of the mutual-information
gap on the input simplex, which is equivalent to the defining auxiliary-
variable condition. Because a finite grid cannot certify less-noisiness
exactly, the verdict is three-valued with an explicit ``inconclusive``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import comb

import numpy as np
from scipy.optimize import linprog

from .errors import PreconditionError, ValidationError
from .probcore import (
    Channel,
    JointDistribution,
    channel_mutual_information,
    compose,
    simplex_lattice,
)

#: Max-abs residual below which a degrading kernel certifies a Markov chain.
DEGRADED_TOL = 1e-9

#: Mixture-gap deficits inside (-DEGRADED_TOL, -CONCAVITY_NOISE) are treated
#: as too close to call rather than as certified violations.
CONCAVITY_NOISE = 1e-12


@dataclass(frozen=True)
class BroadcastSpec:
    """Marginal channels of a broadcast channel with one eavesdropper."""

    ch_y1: Channel
    ch_y2: Channel
    ch_z: Channel
    x_names: tuple[str, ...] = ()
    y1_names: tuple[str, ...] = ()
    y2_names: tuple[str, ...] = ()
    z_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        nx = self.ch_y1.n_inputs
        if self.ch_y2.n_inputs != nx or self.ch_z.n_inputs != nx:
            raise ValidationError(
                "all three channels must share the input alphabet: "
                f"{nx}, {self.ch_y2.n_inputs}, {self.ch_z.n_inputs}"
            )
        for names, size, what in (
            (self.x_names, nx, "x"),
            (self.y1_names, self.ch_y1.n_outputs, "y1"),
            (self.y2_names, self.ch_y2.n_outputs, "y2"),
            (self.z_names, self.ch_z.n_outputs, "z"),
        ):
            if names and len(names) != size:
                raise ValidationError(f"{what} alphabet names do not match size {size}")

    @property
    def x_size(self) -> int:
        return self.ch_y1.n_inputs


class RegimeTag(str, Enum):
    EQUAL_OUTPUTS = "EqualOutputs"
    REVERSELY_DEGRADED_CHAIN = "ReverselyDegradedChain"
    DETERMINISTIC_REVERSELY = "DeterministicReversely"
    STRONGEST_EAVESDROPPER = "StrongestEavesdropper"
    WEAKEST_EAVESDROPPER_DEGRADED = "WeakestEavesdropperDegraded"
    WEAKEST_EAVESDROPPER_LESS_NOISY = "WeakestEavesdropperLessNoisy"
    EAVESDROPPER_IN_MIDDLE = "EavesdropperInMiddle"
    GENERAL = "General"


@dataclass(frozen=True)
class Regime:
    """Classification result: a tag plus witness kernels for asserted chains.

    Every asserted Markov chain carries a degrading kernel whose composition
    residual (max-abs) is at most ``DEGRADED_TOL``.
    """

    tag: RegimeTag
    witnesses: dict = field(default_factory=dict)


def check_degraded(strong: Channel, weak: Channel, tol: float = DEGRADED_TOL) -> Channel | None:
    """Search for a degrading kernel D with strong o D = weak.

    Solved as a minimax LP: minimize t subject to
    |(strong @ D)[x, w] - weak[x, w]| <= t with D row-stochastic. Returns the
    kernel when the cleaned residual is <= ``tol``, otherwise None.
    """
    if strong.n_inputs != weak.n_inputs:
        raise ValidationError(
            f"input mismatch: {strong.n_inputs} vs {weak.n_inputs}"
        )
    ny, nw = strong.n_outputs, weak.n_outputs
    nvar = ny * nw + 1  # kernel entries, then the residual bound t
    c = np.zeros(nvar)
    c[-1] = 1.0

    n_in = strong.n_inputs
    rows = []
    rhs = []
    for x in range(n_in):
        for w in range(nw):
            coeff = np.zeros(nvar)
            coeff[w::nw][:ny] = strong.matrix[x]
            coeff[-1] = -1.0
            rows.append(coeff)
            rhs.append(weak.matrix[x, w])
            rows.append(-coeff.copy())
            rows[-1][-1] = -1.0
            rhs.append(-weak.matrix[x, w])
    a_eq = np.zeros((ny, nvar))
    for y in range(ny):
        a_eq[y, y * nw : (y + 1) * nw] = 1.0
    b_eq = np.ones(ny)

    res = linprog(
        c,
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0.0, 1.0)] * (ny * nw) + [(0.0, None)],
        method="highs",
    )
    if not res.success:
        return None
    kernel = np.clip(res.x[:-1].reshape(ny, nw), 0.0, None)
    sums = kernel.sum(axis=1)
    if np.any(sums <= 0.0):
        return None
    kernel = kernel / sums[:, None]
    candidate = Channel(kernel)
    residual = float(np.max(np.abs(compose(strong, candidate).matrix - weak.matrix)))
    return candidate if residual <= tol else None


@dataclass(frozen=True)
class LessNoisyVerdict:
    """Outcome of the less-noisy screen.

    ``status`` is "holds", "violated", or "inconclusive". A violation carries
    a witnessing joint P(U, X) under which the supposedly worse channel is
    the more informative one; ``margin`` is the worst mixture-concavity gap
    seen by the scan (negative = violation direction).
    """

    status: str
    margin: float
    witness: JointDistribution | None = None

    @property
    def holds(self) -> bool:
        return self.status == "holds"


def _mixture_scan_resolution(dim: int, resolution: int, budget: int = 4_000_000) -> int:
    res = max(1, int(resolution))
    while res > 1 and comb(res + dim - 1, dim - 1) ** 2 > budget:
        res //= 2
    return res


def check_less_noisy(better: Channel, worse: Channel, resolution: int = 64) -> LessNoisyVerdict:
    """Decide whether ``better`` is less noisy than ``worse``.

    A degrading kernel is a sufficient certificate. Otherwise the scan looks
    for a violating auxiliary: the defining condition fails for some P(U, X)
    exactly when f(p) = I(X; better) - I(X; worse) is non-concave on the
    input simplex, and any mixture p = sum_u P(u) p_u with
    f(p) < sum_u P(u) f(p_u) converts directly into a witness. Pairs of grid
    points at mixing weights {1/4, 1/2, 3/4} are screened; a deficit beyond
    ``DEGRADED_TOL`` is a certified violation, a deficit inside the float-
    noise band is reported as inconclusive.
    """
    if better.n_inputs != worse.n_inputs:
        raise ValidationError("channels must share the input alphabet")
    if check_degraded(better, worse) is not None:
        return LessNoisyVerdict(status="holds", margin=0.0)

    dim = better.n_inputs
    res = _mixture_scan_resolution(dim, resolution)
    grid = simplex_lattice(dim, res)
    f = channel_mutual_information(grid, better) - channel_mutual_information(grid, worse)

    n = grid.shape[0]
    ii, jj = np.triu_indices(n)
    worst = np.inf
    worst_witness: tuple[float, np.ndarray, np.ndarray] | None = None
    for lam in (0.25, 0.5, 0.75):
        mixes = lam * grid[ii] + (1.0 - lam) * grid[jj]
        f_mix = channel_mutual_information(mixes, better) - channel_mutual_information(mixes, worse)
        gap = f_mix - (lam * f[ii] + (1.0 - lam) * f[jj])
        k = int(np.argmin(gap))
        if gap[k] < worst:
            worst = float(gap[k])
            worst_witness = (lam, grid[ii[k]], grid[jj[k]])

    if worst < -DEGRADED_TOL and worst_witness is not None:
        lam, p, q = worst_witness
        table = np.vstack([lam * p, (1.0 - lam) * q])
        return LessNoisyVerdict(
            status="violated",
            margin=worst,
            witness=JointDistribution(table, ("u", "x")),
        )
    if worst < -CONCAVITY_NOISE:
        return LessNoisyVerdict(status="inconclusive", margin=worst)
    return LessNoisyVerdict(status="holds", margin=worst)


def is_deterministic(ch: Channel) -> bool:
    """True iff every row puts essentially all mass on a single output."""
    return bool(np.all(ch.matrix.max(axis=1) >= 1.0 - 1e-12))


def _channels_equal(a: Channel, b: Channel) -> bool:
    return a.matrix.shape == b.matrix.shape and float(np.max(np.abs(a.matrix - b.matrix))) <= 1e-12


def reversely_degraded_chain_witnesses(bc: BroadcastSpec) -> dict | None:
    """Kernels certifying X - Z - Y1 - Y2, if the chain holds."""
    d_zy1 = check_degraded(bc.ch_z, bc.ch_y1)
    if d_zy1 is None:
        return None
    d_y1y2 = check_degraded(bc.ch_y1, bc.ch_y2)
    if d_y1y2 is None:
        return None
    return {"z_to_y1": d_zy1, "y1_to_y2": d_y1y2}


def strongest_chain_witnesses(bc: BroadcastSpec) -> dict | None:
    """Kernels certifying X - Z - Y1 and X - Z - Y2, if both hold."""
    d_zy1 = check_degraded(bc.ch_z, bc.ch_y1)
    if d_zy1 is None:
        return None
    d_zy2 = check_degraded(bc.ch_z, bc.ch_y2)
    if d_zy2 is None:
        return None
    return {"z_to_y1": d_zy1, "z_to_y2": d_zy2}


def weakest_chain_witnesses(bc: BroadcastSpec) -> dict | None:
    """Kernels certifying X - Y1 - Z and X - Y2 - Z, if both hold."""
    d_y1z = check_degraded(bc.ch_y1, bc.ch_z)
    if d_y1z is None:
        return None
    d_y2z = check_degraded(bc.ch_y2, bc.ch_z)
    if d_y2z is None:
        return None
    return {"y1_to_z": d_y1z, "y2_to_z": d_y2z}


def weakest_less_noisy_holds(bc: BroadcastSpec, resolution: int = 64) -> bool:
    """True when both legitimate channels are certified less noisy than Z."""
    return (
        check_less_noisy(bc.ch_y1, bc.ch_z, resolution).holds
        and check_less_noisy(bc.ch_y2, bc.ch_z, resolution).holds
    )


def middle_chain_witnesses(bc: BroadcastSpec) -> dict | None:
    """Kernels certifying X - Y1 - Z - Y2, if the chain holds."""
    d_y1z = check_degraded(bc.ch_y1, bc.ch_z)
    if d_y1z is None:
        return None
    d_zy2 = check_degraded(bc.ch_z, bc.ch_y2)
    if d_zy2 is None:
        return None
    return {"y1_to_z": d_y1z, "z_to_y2": d_zy2}


def classify(bc: BroadcastSpec, resolution: int = 64) -> Regime:
    """Classify a broadcast configuration into its ordering regime.

    Orderings are tested most-specific-first so that, e.g., an equal-outputs
    channel is never labeled degraded, and a deterministic reversely degraded
    pair is recognized before the generic strongest-eavesdropper tag.
    """
    if _channels_equal(bc.ch_y1, bc.ch_y2) and _channels_equal(bc.ch_y1, bc.ch_z):
        return Regime(tag=RegimeTag.EQUAL_OUTPUTS)

    chain = reversely_degraded_chain_witnesses(bc)
    if chain is not None:
        return Regime(tag=RegimeTag.REVERSELY_DEGRADED_CHAIN, witnesses=chain)

    strongest = strongest_chain_witnesses(bc)
    if strongest is not None:
        if is_deterministic(bc.ch_y1) and is_deterministic(bc.ch_y2):
            return Regime(tag=RegimeTag.DETERMINISTIC_REVERSELY, witnesses=strongest)
        return Regime(tag=RegimeTag.STRONGEST_EAVESDROPPER, witnesses=strongest)

    weakest = weakest_chain_witnesses(bc)
    if weakest is not None:
        return Regime(tag=RegimeTag.WEAKEST_EAVESDROPPER_DEGRADED, witnesses=weakest)

    if weakest_less_noisy_holds(bc, resolution):
        return Regime(tag=RegimeTag.WEAKEST_EAVESDROPPER_LESS_NOISY)

    middle = middle_chain_witnesses(bc)
    if middle is not None:
        return Regime(tag=RegimeTag.EAVESDROPPER_IN_MIDDLE, witnesses=middle)

    return Regime(tag=RegimeTag.GENERAL)


def require_chain(witnesses: dict | None, what: str) -> dict:
    """Raise a regime-mismatch error when a required chain is absent."""
    if witnesses is None:
        raise PreconditionError(f"channel configuration does not satisfy {what}")
    return witnesses
