"""Seeded cross-module verification suites.

Each routine generates its own deterministic case family, runs two
independent routes to the same quantity, and reports the worst deviation.
They back the ``verify`` CLI subcommand and the acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import (
    GridConfig,
    HybridRatePoint,
    capacity_middle,
    capacity_weakest,
    fm_consistency_check,
)
from .channels import BroadcastSpec
from .gaussian import GaussianSpec, gauss_middle, gauss_strong, gauss_weak
from .probcore import (
    Channel,
    Distribution,
    JointDistribution,
    bsc,
    channel_mutual_information,
    identity_channel,
    simplex_lattice,
)
from .simulate import (
    EXACT_LEAKAGE_TERM_CAP,
    build_otp_codebook,
    build_superposition_codebook,
    exact_leakage,
    hybrid_sizes,
    simulate_otp_equal_outputs,
    simulate_hybrid_middle,
)


def _weakest_bsc_triples(cases: int, seed: int) -> list[tuple[float, float, float]]:
    rng = np.random.default_rng(seed)
    triples = []
    for _ in range(cases):
        p1 = rng.uniform(0.02, 0.45)
        p2 = rng.uniform(0.02, 0.45)
        pz = rng.uniform(max(p1, p2), 0.49)
        triples.append((float(p1), float(p2), float(pz)))
    return triples


@dataclass(frozen=True)
class Lemma2Report:
    cases: int
    max_deviation: float


def verify_lemma2(cases: int = 100, seed: int = 1, resolution: int = 64, alpha_points: int = 64) -> Lemma2Report:
    """Key-split equivalence on seeded weakest-regime BSC triples.

    For each triple and each input-grid point, the alpha-form is maximized
    over a uniform alpha grid augmented with the analytic equalizer (a
    uniform grid alone cannot resolve the crossing to 1e-6), and the result
    is compared with the three-term min-form maximum on the same input grid.
    """
    grid = simplex_lattice(2, resolution)
    alpha_grid = np.linspace(0.0, 1.0, alpha_points + 1)
    worst = 0.0
    for p1, p2, pz in _weakest_bsc_triples(cases, seed):
        ch1, ch2, chz = bsc(p1), bsc(p2), bsc(pz)
        i1 = channel_mutual_information(grid, ch1)
        i2 = channel_mutual_information(grid, ch2)
        iz = channel_mutual_information(grid, chz)
        min_form = np.max(np.minimum(np.minimum(i1, i2), 0.5 * (i1 + i2 - iz)))

        t1 = i1[:, None] - alpha_grid[None, :] * iz[:, None]
        t2 = i2[:, None] - (1.0 - alpha_grid[None, :]) * iz[:, None]
        alpha_form = np.max(np.minimum(t1, t2), axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            alpha_star = np.where(iz > 1e-15, np.clip((i1 - i2 + iz) / (2.0 * iz), 0.0, 1.0), 0.0)
        star_val = np.minimum(i1 - alpha_star * iz, i2 - (1.0 - alpha_star) * iz)
        alpha_form = np.maximum(alpha_form, star_val)
        worst = max(worst, abs(float(np.max(alpha_form)) - float(min_form)))
    return Lemma2Report(cases=cases, max_deviation=worst)


@dataclass(frozen=True)
class BoundaryReport:
    dmc_cases: int
    max_dmc_gap: float
    gaussian_cases: int
    max_gap_strong_edge: float
    max_gap_weak_edge: float


def verify_boundaries(cases: int = 20, seed: int = 2, config: GridConfig | None = None) -> BoundaryReport:
    """Boundary consistency between adjacent regimes.

    DMC: with Z identically equal to Y2, the middle-regime formula must
    agree with the weakest-eavesdropper formula. Gaussian: the middle branch
    must meet the strong branch at sigmaz = sigma1 (within the paper-level
    1e-3 slack) and the weak branch at sigmaz = sigma2 (exactly).
    """
    cfg = config or GridConfig()
    rng = np.random.default_rng(seed)
    max_dmc = 0.0
    for _ in range(cases):
        a = float(rng.uniform(0.02, 0.3))
        b = float(rng.uniform(a + 0.05, 0.45))
        spec = BroadcastSpec(ch_y1=bsc(a), ch_y2=bsc(b), ch_z=bsc(b))
        mid = capacity_middle(spec, cfg).value
        weak = capacity_weakest(spec, cfg).value
        max_dmc = max(max_dmc, abs(mid - weak))

    max_strong = 0.0
    max_weak = 0.0
    for _ in range(cases):
        power = float(rng.uniform(0.5, 4.0))
        s1 = float(rng.uniform(1.0, 5.0))
        s2 = float(rng.uniform(s1, s1 + 5.0))
        at_s1 = GaussianSpec(power, s1, s2, s1)
        at_s2 = GaussianSpec(power, s1, s2, s2)
        max_strong = max(max_strong, abs(gauss_middle(at_s1).value - gauss_strong(at_s1).value))
        max_weak = max(max_weak, abs(gauss_middle(at_s2).value - gauss_weak(at_s2).value))
    return BoundaryReport(
        dmc_cases=cases,
        max_dmc_gap=max_dmc,
        gaussian_cases=cases,
        max_gap_strong_edge=max_strong,
        max_gap_weak_edge=max_weak,
    )


@dataclass(frozen=True)
class FmReport:
    cases: int
    max_difference: float
    infeasible_cases: int


def verify_fm(cases: int = 50, seed: int = 3) -> FmReport:
    """LP total versus eliminated closed form on seeded middle-regime pairs.

    Kernels P(X|U) are drawn near the corners of the simplex so that most
    auxiliaries are informative enough for a satisfiable rate system (the
    non-trivial branch of the equality); diffuse draws that make the system
    empty still appear and must agree on a zero total.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    infeasible = 0
    for _ in range(cases):
        a = float(rng.uniform(0.02, 0.12))
        b = float(rng.uniform(a, 0.2))
        c = float(rng.uniform(b, 0.3))
        spec = BroadcastSpec(ch_y1=bsc(a), ch_y2=bsc(c), ch_z=bsc(b))
        pu = rng.dirichlet(np.ones(3))
        spread = rng.uniform(0.0, 0.15)
        corners = np.eye(2)[rng.integers(0, 2, size=3)]
        rows = (1.0 - spread) * corners + spread * rng.dirichlet(np.ones(2), size=3)
        joint = JointDistribution(pu[:, None] * rows, ("u", "x"))
        report = fm_consistency_check(spec, joint)
        if not report.lp_point.feasible:
            infeasible += 1
        worst = max(worst, report.abs_difference)
    return FmReport(cases=cases, max_difference=worst, infeasible_cases=infeasible)


@dataclass(frozen=True)
class OtpReport:
    cases: int
    max_leakage: float


def _otp_n_values(modulus: int, n_cap: int = 8) -> list[int]:
    values = []
    n = 1
    while n <= n_cap and (modulus**n) * modulus * modulus <= EXACT_LEAKAGE_TERM_CAP:
        values.append(n)
        n += 1
    picked = sorted({1, 2, min(4, values[-1]), values[-1]} & set(values))
    return picked


def verify_otp(seed: int = 4) -> OtpReport:
    """Exact-secrecy matrix: every pad path must leak at most float noise.

    Covers direct pad codebooks over moduli 2-8 (block lengths up to 8,
    capped by the enumeration budget), the time-shared equal-outputs scheme,
    and the hybrid scheme run in pure-pad mode.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = 0

    for q in range(2, 9):
        random_rows = rng.dirichlet(np.ones(q), size=q)
        channels = [identity_channel(q), Channel(random_rows)]
        for n in _otp_n_values(q):
            cb = build_otp_codebook(n, q)
            for ch in channels:
                worst = max(worst, exact_leakage(cb, ch))
                cases += 1

    for bits, n in ((1, 2), (1, 4), (1, 8), (2, 4)):
        report = simulate_otp_equal_outputs(bsc(0.1), n=n, message_bits=bits, seed=seed, trials=64)
        worst = max(worst, report.leakage_bits)
        cases += 1

    spec = BroadcastSpec(ch_y1=identity_channel(2), ch_y2=bsc(0.2), ch_z=bsc(0.1))
    point = HybridRatePoint(r_prime=0.0, r_xor=0.25, r_k1_prime=0.25, r_k2_prime=0.25, total=0.25)
    cb = build_superposition_codebook(
        8,
        hybrid_sizes(point, 8),
        Distribution(np.array([0.5, 0.5])),
        identity_channel(2),
        seed=seed,
    )
    report = simulate_hybrid_middle(spec, cb, point, trials=64, seed=seed)
    worst = max(worst, report.leakage_bits)
    cases += 1

    return OtpReport(cases=cases, max_leakage=worst)
