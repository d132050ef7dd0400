"""Closed-form secrecy capacities of the Gaussian broadcast channel with keys.

Receivers see Y_i = X + N_i with noise variances sigma_i^2 under an average
transmit power constraint; the position of the eavesdropper's noise variance
relative to the two legitimate ones fixes the degradedness order and hence
which formula applies. All outputs are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, PreconditionError, RelabelingError, ValidationError

#: Absolute tolerance on the power-split alpha for the scalar solvers.
ALPHA_TOL = 1e-10

REGIME_STRONGEST = "Strongest"
REGIME_MIDDLE = "Middle"
REGIME_WEAKEST = "Weakest"


@dataclass(frozen=True)
class GaussianSpec:
    """Transmit power and the three noise variances.

    Noise variances must be strictly positive; zero power is admitted (it
    makes every capacity zero).
    """

    power: float
    sigma1_sq: float
    sigma2_sq: float
    sigmaz_sq: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.power) and self.power >= 0.0):
            raise ValidationError(f"power must be finite and >= 0, got {self.power}")
        for name in ("sigma1_sq", "sigma2_sq", "sigmaz_sq"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(f"{name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class GaussianResult:
    value: float
    alpha_star: float | None
    regime: str
    binding_term: str

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValidationError("capacity value must be >= 0")
        has_alpha = self.alpha_star is not None
        if has_alpha != (self.regime in (REGIME_STRONGEST, REGIME_MIDDLE)):
            raise ValidationError(
                f"alpha_star must be present exactly for Strongest/Middle, got {self.regime}"
            )


def awgn_mi(power: float, noise_sq: float) -> float:
    """Point-to-point Gaussian rate (1/2) log2(1 + power / noise_sq)."""
    if noise_sq <= 0:
        raise DomainError(f"noise variance must be > 0, got {noise_sq}")
    if power < 0:
        raise DomainError(f"power must be >= 0, got {power}")
    return 0.5 * math.log2(1.0 + power / noise_sq)


def _golden_max(f, lo: float = 0.0, hi: float = 1.0, tol: float = ALPHA_TOL) -> float:
    """Golden-section maximizer of a unimodal function on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def gauss_strong(spec: GaussianSpec) -> GaussianResult:
    """Strongest eavesdropper (sigmaz^2 <= sigma1^2 <= sigma2^2).

    One-time pads plus superposition:
    C = max over alpha of min{ (1/2) log2(1 + alpha P / sigma1^2),
                               (1/2) log2(1 + (1-alpha) P / (alpha P + sigma2^2)) }.
    The value does not depend on the eavesdropper's noise.
    """
    if not spec.sigmaz_sq <= spec.sigma1_sq <= spec.sigma2_sq:
        raise PreconditionError(
            "strongest regime needs sigmaz_sq <= sigma1_sq <= sigma2_sq"
        )
    p = spec.power

    def t1(alpha: float) -> float:
        return awgn_mi(alpha * p, spec.sigma1_sq)

    def t2(alpha: float) -> float:
        return 0.5 * math.log2(1.0 + (1.0 - alpha) * p / (alpha * p + spec.sigma2_sq))

    alpha = _golden_max(lambda a: min(t1(a), t2(a)))
    v1, v2 = t1(alpha), t2(alpha)
    if abs(v1 - v2) <= 1e-9:
        binding = "both"
    else:
        binding = "satellite_rx1" if v1 < v2 else "cloud_rx2"
    return GaussianResult(
        value=max(0.0, min(v1, v2)),
        alpha_star=alpha,
        regime=REGIME_STRONGEST,
        binding_term=binding,
    )


def gauss_weak(spec: GaussianSpec) -> GaussianResult:
    """Weakest eavesdropper (sigma1^2 <= sigma2^2 <= sigmaz^2).

    Fictitious-message coding, no optimization:
    C = min{ (1/2) log2(1 + P / sigma2^2),
             (1/4)[log2(1 + P / sigma1^2) + log2(1 + P / sigma2^2)
                   - log2(1 + P / sigmaz^2)] }.
    """
    if not spec.sigma1_sq <= spec.sigma2_sq <= spec.sigmaz_sq:
        raise PreconditionError("weakest regime needs sigma1_sq <= sigma2_sq <= sigmaz_sq")
    p = spec.power
    single = awgn_mi(p, spec.sigma2_sq)
    sum_rate = 0.5 * (
        awgn_mi(p, spec.sigma1_sq) + awgn_mi(p, spec.sigma2_sq) - awgn_mi(p, spec.sigmaz_sq)
    )
    if single <= sum_rate:
        return GaussianResult(max(0.0, single), None, REGIME_WEAKEST, "single_user")
    return GaussianResult(max(0.0, sum_rate), None, REGIME_WEAKEST, "sum_rate")


def gauss_middle(spec: GaussianSpec) -> GaussianResult:
    """Eavesdropper in the middle (sigma1^2 <= sigmaz^2 <= sigma2^2).

    C = max over alpha of
        min{ (1/2) log2(1 + alpha P / ((1-alpha) P + sigma2^2)),
             (1/4)[log2(1 + P / sigma1^2)
                   + log2(1 + alpha P / ((1-alpha) P + sigma2^2))
                   - log2(1 + alpha P / ((1-alpha) P + sigmaz^2))] }.
    The first term rises with alpha and the second falls, so the optimum sits
    at their crossing (found by bisection) or at alpha = 1.
    """
    if not spec.sigma1_sq <= spec.sigmaz_sq <= spec.sigma2_sq:
        raise PreconditionError("middle regime needs sigma1_sq <= sigmaz_sq <= sigma2_sq")
    p = spec.power

    def t1(alpha: float) -> float:
        return 0.5 * math.log2(1.0 + alpha * p / ((1.0 - alpha) * p + spec.sigma2_sq))

    def t2(alpha: float) -> float:
        return 0.25 * (
            math.log2(1.0 + p / spec.sigma1_sq)
            + math.log2(1.0 + alpha * p / ((1.0 - alpha) * p + spec.sigma2_sq))
            - math.log2(1.0 + alpha * p / ((1.0 - alpha) * p + spec.sigmaz_sq))
        )

    def diff(alpha: float) -> float:
        return t1(alpha) - t2(alpha)

    if diff(1.0) <= 0.0:
        alpha = 1.0
        binding = "cloud_rx2"
    else:
        lo, hi = 0.0, 1.0
        while hi - lo > ALPHA_TOL:
            mid = 0.5 * (lo + hi)
            if diff(mid) <= 0.0:
                lo = mid
            else:
                hi = mid
        alpha = 0.5 * (lo + hi)
        binding = "both"
    value = max(0.0, min(t1(alpha), t2(alpha)))
    return GaussianResult(value=value, alpha_star=alpha, regime=REGIME_MIDDLE, binding_term=binding)


def gauss_capacity(spec: GaussianSpec) -> GaussianResult:
    """Dispatch on the noise-variance ordering.

    Requires the labeling convention sigma1_sq <= sigma2_sq. Ties between
    sigmaz_sq and either legitimate variance go to the middle branch; the
    branches agree there by continuity.
    """
    if spec.sigma1_sq > spec.sigma2_sq:
        raise RelabelingError(
            "sigma1_sq > sigma2_sq: swap receivers 1 and 2 so that receiver 1 is the stronger one"
        )
    if spec.sigmaz_sq < spec.sigma1_sq:
        return gauss_strong(spec)
    if spec.sigmaz_sq > spec.sigma2_sq:
        return gauss_weak(spec)
    return gauss_middle(spec)


@dataclass(frozen=True)
class SweepRow:
    sigmaz_sq: float
    regime: str
    capacity_bits: float
    alpha_star: float | None
    binding_term: str


def sweep(
    power: float, sigma1_sq: float, sigma2_sq: float, sigmaz_grid: Sequence[float]
) -> list[SweepRow]:
    """Capacity along a grid of eavesdropper noise variances (ascending)."""
    grid = [float(v) for v in sigmaz_grid]
    if not grid:
        raise ValidationError("sigmaz grid must be non-empty")
    if any(v <= 0 for v in grid):
        raise ValidationError("sigmaz grid values must be > 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("sigmaz grid must be strictly ascending")
    rows = []
    for sz in grid:
        res = gauss_capacity(GaussianSpec(power, sigma1_sq, sigma2_sq, sz))
        rows.append(
            SweepRow(
                sigmaz_sq=sz,
                regime=res.regime,
                capacity_bits=res.value,
                alpha_star=res.alpha_star,
                binding_term=res.binding_term,
            )
        )
    return rows
