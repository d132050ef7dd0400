"""Secrecy-capacity formulas and bounds for discrete channels.

Every maximization uses the same deterministic strategy: an exhaustive
composition grid over each probability simplex, followed by rounds of local
mass-shift refinement around the best grid point with a halving step. Ties
between equal-value grid maxima resolve to the lexicographically smallest
grid index, so results are reproducible bit for bit.

Auxiliary variables are parameterized as a weight vector P(U) plus a
row-stochastic kernel P(X|U) with |U| fixed at the Carathéodory bound
|X| + 1; smaller effective alphabets arise naturally from degenerate rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import linprog, minimize

from .channels import (
    BroadcastSpec,
    check_degraded,
    is_deterministic,
    middle_chain_witnesses,
    require_chain,
    reversely_degraded_chain_witnesses,
    strongest_chain_witnesses,
    weakest_chain_witnesses,
    weakest_less_noisy_holds,
)
from .errors import DomainError, PreconditionError, ValidationError
from .probcore import (
    Channel,
    Distribution,
    JointDistribution,
    ZERO_CLIP,
    channel_mutual_information,
    entropy_bits,
    row_entropies,
    simplex_lattice,
)

#: Two min-terms within this of the optimum are both reported as binding.
BINDING_TOL = 1e-9


@dataclass(frozen=True)
class GridConfig:
    """Search-effort knobs shared by every optimizer in this module."""

    resolution: int = 64
    aux_resolution: int = 12
    refine_rounds: int = 3
    shrink: float = 0.5
    max_aux_combos: int = 120_000


DEFAULT_CONFIG = GridConfig()


@dataclass(frozen=True)
class CapacityResult:
    value: float
    argmax_input: Distribution
    argmax_aux: dict | None
    binding_terms: tuple[str, ...]
    grid_meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class HybridRatePoint:
    """Operating point of the combined pad / fictitious-message scheme."""

    r_prime: float
    r_xor: float
    r_k1_prime: float
    r_k2_prime: float
    total: float
    feasible: bool = True

    def __post_init__(self) -> None:
        for name in ("r_prime", "r_xor", "r_k1_prime", "r_k2_prime", "total"):
            if getattr(self, name) < -1e-12:
                raise ValidationError(f"{name} must be >= 0")
        if abs(self.total - (self.r_prime + self.r_xor)) > 1e-9:
            raise ValidationError("total must equal r_prime + r_xor")


def _binding(terms: dict[str, float]) -> tuple[str, ...]:
    low = min(terms.values())
    return tuple(name for name, v in terms.items() if v <= low + BINDING_TOL)


def _entropy_rows(arr: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return -np.sum(
            np.where(arr > ZERO_CLIP, arr * np.log2(np.maximum(arr, ZERO_CLIP)), 0.0), axis=-1
        )


def _project_blocks(x: np.ndarray, blocks) -> np.ndarray:
    out = np.array(x, dtype=float)
    for off, ln in blocks:
        seg = np.clip(out[off : off + ln], 0.0, None)
        total = seg.sum()
        out[off : off + ln] = seg / total if total > 0 else np.full(ln, 1.0 / ln)
    return out


def _refine_blocks(objective, x0: np.ndarray, blocks, step0: float, config: GridConfig):
    """Maximize over a product of simplices around a grid point.

    Rounds of pairwise mass shifts with a halving step locate the right cell;
    a simplex-projected Nelder-Mead polish then finishes within it. Both
    stages are deterministic; an improvement is kept only if it is strict.
    """
    x = np.array(x0, dtype=float)
    best = float(objective(x))
    step = step0
    for _ in range(config.refine_rounds):
        moves = 0
        improved = True
        while improved and moves < 2000:
            improved = False
            for off, ln in blocks:
                for i in range(ln):
                    for j in range(ln):
                        if i == j or x[off + i] <= 1e-15:
                            continue
                        delta = min(step, x[off + i])
                        cand = x.copy()
                        cand[off + i] -= delta
                        cand[off + j] += delta
                        v = float(objective(cand))
                        if v > best + 1e-15:
                            best, x = v, cand
                            improved = True
                            moves += 1
        step *= config.shrink

    if config.refine_rounds > 0:
        res = minimize(
            lambda v: -float(objective(_project_blocks(v, blocks))),
            x,
            method="Nelder-Mead",
            options={"maxiter": 200 * x.size, "xatol": 1e-10, "fatol": 1e-12},
        )
        cand = _project_blocks(res.x, blocks)
        v = float(objective(cand))
        if v > best:
            best, x = v, cand
    return x, best


def _maximize_over_inputs(batch_objective, nx: int, config: GridConfig):
    """Grid + refinement over a single input simplex.

    ``batch_objective`` maps an (N, nx) array of input rows to (N,) values.
    """
    grid = simplex_lattice(nx, config.resolution)
    values = batch_objective(grid)
    k = int(np.argmax(values))  # first max = lexicographically smallest index
    x, best = _refine_blocks(
        lambda v: batch_objective(v[None, :])[0],
        grid[k],
        [(0, nx)],
        1.0 / config.resolution,
        config,
    )
    meta = {"resolution": config.resolution, "refine_rounds": config.refine_rounds,
            "grid_value": float(values[k])}
    return x, float(best), meta


# ---------------------------------------------------------------------------
# Wiretap channel with a shared secret key
# ---------------------------------------------------------------------------


def wiretap_key_capacity(
    ch_y: Channel, ch_z: Channel, key_rate: float, config: GridConfig = DEFAULT_CONFIG
) -> CapacityResult:
    """Secrecy capacity of the wiretap channel with a shared key of rate R_K.

    The general expression max min{[I(V;Y|U) - I(V;Z|U)]+ + R_K, I(V;Y)} over
    chains U - V - X - (Y, Z) is searched directly only when neither ordering
    holds; when a degrading kernel certifies X - Y - Z or X - Z - Y the exact
    single-letter shortcut over P(X) is used instead.
    """
    if ch_y.n_inputs != ch_z.n_inputs:
        raise ValidationError("legitimate and eavesdropper channels must share inputs")
    if key_rate < 0:
        raise DomainError(f"key rate must be >= 0, got {key_rate}")
    nx = ch_y.n_inputs

    if check_degraded(ch_y, ch_z) is not None:
        def batch(p):
            iy = channel_mutual_information(p, ch_y)
            iz = channel_mutual_information(p, ch_z)
            return np.minimum(iy - iz + key_rate, iy)

        x, best, meta = _maximize_over_inputs(batch, nx, config)
        iy = float(channel_mutual_information(x, ch_y))
        iz = float(channel_mutual_information(x, ch_z))
        meta["route"] = "degraded-shortcut"
        return CapacityResult(
            value=best,
            argmax_input=Distribution(x),
            argmax_aux=None,
            binding_terms=_binding({"secrecy_plus_key": iy - iz + key_rate, "reliability": iy}),
            grid_meta=meta,
        )

    if check_degraded(ch_z, ch_y) is not None:
        def batch(p):
            iy = channel_mutual_information(p, ch_y)
            return np.minimum(key_rate, iy)

        x, best, meta = _maximize_over_inputs(batch, nx, config)
        iy = float(channel_mutual_information(x, ch_y))
        meta["route"] = "reversely-degraded-shortcut"
        return CapacityResult(
            value=best,
            argmax_input=Distribution(x),
            argmax_aux=None,
            binding_terms=_binding({"key_rate": key_rate, "reliability": iy}),
            grid_meta=meta,
        )

    return _wiretap_general(ch_y, ch_z, key_rate, config)


def _wiretap_general(ch_y: Channel, ch_z: Channel, key_rate: float, config: GridConfig) -> CapacityResult:
    """Theorem-1 search via two structured grids plus joint refinement.

    The pure-pad extreme (U = V) and the pure-wiretap extreme (U constant)
    are gridded exhaustively; the full (P_U, P_{V|U}, P_{X|V}) space is then
    refined from the better start and from a fixed set of seeded starts.
    The full product grid is combinatorially out of reach.
    """
    nx = ch_y.n_inputs
    nu = nv = nx + 1

    def evaluate(pu: np.ndarray, v_given_u: np.ndarray, x_given_v: np.ndarray) -> float:
        out_y = x_given_v @ ch_y.matrix  # per-v output laws
        out_z = x_given_v @ ch_z.matrix
        h_y, h_z = _entropy_rows(out_y), _entropy_rows(out_z)
        # I(V;Y|U=u) via mixture entropies under each cloud
        mix_y = v_given_u @ out_y
        mix_z = v_given_u @ out_z
        ivy_u = _entropy_rows(mix_y) - v_given_u @ h_y
        ivz_u = _entropy_rows(mix_z) - v_given_u @ h_z
        adv = float(pu @ (ivy_u - ivz_u))
        pv = pu @ v_given_u
        ivy = float(entropy_bits(pv @ out_y) - pv @ h_y)
        return min(max(adv, 0.0) + key_rate, ivy)

    # Pure wiretap extreme: U constant, search (P_V, P_{X|V}).
    rows_grid, combos, res_rows = _kernel_combos(nv, nx, config)
    out_y = rows_grid @ ch_y.matrix
    out_z = rows_grid @ ch_z.matrix
    h_y, h_z = _entropy_rows(out_y), _entropy_rows(out_z)
    pv_grid = simplex_lattice(nv, config.aux_resolution)
    stack_y = out_y[combos]  # (C, nv, ny)
    stack_z = out_z[combos]
    hy_c = h_y[combos]
    hz_c = h_z[combos]
    best_val, best_pv, best_combo = -np.inf, None, None
    for pv in pv_grid:
        ivy = _entropy_rows(np.einsum("v,cvo->co", pv, stack_y)) - hy_c @ pv
        ivz = _entropy_rows(np.einsum("v,cvo->co", pv, stack_z)) - hz_c @ pv
        vals = np.minimum(np.maximum(ivy - ivz, 0.0) + key_rate, ivy)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_pv, best_combo = float(vals[k]), pv, combos[k]

    # Pure pad extreme: U = V = X, value min{R_K, I(X;Y)}.
    def pad_batch(p):
        return np.minimum(key_rate, channel_mutual_information(p, ch_y))

    pad_x, pad_val, _ = _maximize_over_inputs(pad_batch, nx, config)

    def pack(pu, v_given_u, x_given_v):
        return np.concatenate([pu, v_given_u.ravel(), x_given_v.ravel()])

    def unpack(flat):
        pu = flat[:nu]
        v_given_u = flat[nu : nu + nu * nv].reshape(nu, nv)
        x_given_v = flat[nu + nu * nv :].reshape(nv, nx)
        return pu, v_given_u, x_given_v

    starts = []
    wire_x_given_v = rows_grid[best_combo]
    starts.append(pack(np.full(nu, 1.0 / nu), np.tile(best_pv, (nu, 1)), wire_x_given_v))
    pad_x_given_v = np.vstack([np.eye(nx), np.full(nx, 1.0 / nx)])
    pad_pu = np.concatenate([pad_x, [0.0]])
    starts.append(pack(pad_pu, np.eye(nu), pad_x_given_v))
    rng = np.random.default_rng(20_260_113)
    for _ in range(6):
        starts.append(
            pack(
                rng.dirichlet(np.ones(nu)),
                rng.dirichlet(np.ones(nv), size=nu),
                rng.dirichlet(np.ones(nx), size=nv),
            )
        )

    blocks = [(0, nu)]
    blocks += [(nu + k * nv, nv) for k in range(nu)]
    blocks += [(nu + nu * nv + k * nx, nx) for k in range(nv)]

    def objective(flat):
        return evaluate(*unpack(flat))

    best_flat, best = starts[0], -np.inf
    for s in starts:
        x, v = _refine_blocks(objective, s, blocks, 1.0 / config.aux_resolution, config)
        if v > best:
            best_flat, best = x, v
    if pad_val > best:
        best_flat, best = starts[1], pad_val

    pu, v_given_u, x_given_v = unpack(best_flat)
    pv = pu @ v_given_u
    px = pv @ x_given_v
    out_y = x_given_v @ ch_y.matrix
    ivy = float(entropy_bits(pv @ out_y) - pv @ _entropy_rows(out_y))
    adv = evaluate(pu, v_given_u, x_given_v)
    return CapacityResult(
        value=float(best),
        argmax_input=Distribution(px),
        argmax_aux={
            "p_u": Distribution(pu),
            "p_v_given_u": Channel(v_given_u),
            "p_x_given_v": Channel(x_given_v),
        },
        binding_terms=_binding({"secrecy_plus_key": adv, "reliability": ivy}),
        grid_meta={
            "route": "general",
            "aux_resolution": res_rows,
            "refine_rounds": config.refine_rounds,
        },
    )


# ---------------------------------------------------------------------------
# Broadcast-channel capacities, one ordering regime at a time
# ---------------------------------------------------------------------------


def capacity_equal(ch: Channel, config: GridConfig = DEFAULT_CONFIG) -> CapacityResult:
    """Equal channel outputs: time sharing gives C = max (1/2) I(X;Y)."""
    def batch(p):
        return 0.5 * channel_mutual_information(p, ch)

    x, best, meta = _maximize_over_inputs(batch, ch.n_inputs, config)
    return CapacityResult(
        value=best,
        argmax_input=Distribution(x),
        argmax_aux=None,
        binding_terms=("half_mutual_information",),
        grid_meta=meta,
    )


def _kernel_combos(nu: int, nx: int, config: GridConfig):
    """Row grid and all |U|-tuples of row indices, budget-capped."""
    res = config.aux_resolution
    while res > 1 and comb(res + nx - 1, nx - 1) ** nu > config.max_aux_combos:
        res -= 1
    rows_grid = simplex_lattice(nx, res)
    g = rows_grid.shape[0]
    combos = np.array(list(itertools.product(range(g), repeat=nu)), dtype=int)
    return rows_grid, combos, res


def _aux_pair_search(objective_batch, objective_single, nu: int, nx: int, config: GridConfig):
    """Grid + refinement over (P_U, P_{X|U}).

    ``objective_batch(pu, rows_stack)`` scores one P_U against a (C, nu, nx)
    stack of kernels; ``objective_single(pu, rows)`` scores one point and is
    reused by the refiner. Refinement starts from the best few grid points
    (not just the single best) because the min-of-terms surface has basins
    whose grid values invert their refined order.
    """
    rows_grid, combos, res_rows = _kernel_combos(nu, nx, config)
    rows_stack = rows_grid[combos]  # (C, nu, nx)
    res_u = config.aux_resolution
    while res_u > 1 and comb(res_u + nu - 1, nu - 1) * combos.shape[0] > 40 * config.max_aux_combos:
        res_u -= 1
    pu_grid = simplex_lattice(nu, res_u)

    candidates = []  # (value, pu index, combo index), best combo per pu row
    for pi, pu in enumerate(pu_grid):
        vals = objective_batch(pu, rows_stack)
        k = int(np.argmax(vals))
        candidates.append((float(vals[k]), pi, k))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    grid_value = candidates[0][0]

    blocks = [(0, nu)] + [(nu + k * nx, nx) for k in range(nu)]

    def objective(flat):
        return objective_single(flat[:nu], flat[nu:].reshape(nu, nx))

    best, best_flat = -np.inf, None
    for value, pi, k in candidates[:6]:
        flat0 = np.concatenate([pu_grid[pi], rows_stack[k].ravel()])
        flat, v = _refine_blocks(objective, flat0, blocks, 1.0 / max(res_rows, res_u), config)
        if v > best:
            best, best_flat = v, flat

    pu, rows = best_flat[:nu], best_flat[nu:].reshape(nu, nx)
    meta = {
        "aux_resolution": res_rows,
        "weight_resolution": res_u,
        "refine_rounds": config.refine_rounds,
        "grid_value": grid_value,
    }
    return pu, rows, float(best), meta


def _cloud_mi(pu: np.ndarray, rows: np.ndarray, ch: Channel) -> float:
    """I(U; output) for P_U and kernel rows P(X|U)."""
    out = rows @ ch.matrix
    return float(max(0.0, entropy_bits(pu @ out) - pu @ _entropy_rows(out)))


def capacity_reversely_degraded(bc: BroadcastSpec, config: GridConfig = DEFAULT_CONFIG) -> CapacityResult:
    """Reversely degraded chain X - Z - Y1 - Y2: superposition of pads.

    C = max over (P_U, P_{X|U}) of min{ I(X;Y1|U), I(U;Y2) }, |U| <= |X| + 1.
    """
    require_chain(reversely_degraded_chain_witnesses(bc), "X-Z-Y1-Y2")
    nx = bc.x_size
    nu = nx + 1

    def batch(pu, rows_stack):
        sat = channel_mutual_information(rows_stack.reshape(-1, nx), bc.ch_y1).reshape(
            rows_stack.shape[0], nu
        )
        i_sat = sat @ pu
        out2 = rows_stack.reshape(-1, nx) @ bc.ch_y2.matrix
        out2 = out2.reshape(rows_stack.shape[0], nu, -1)
        mix = np.einsum("u,cuo->co", pu, out2)
        i_cloud = _entropy_rows(mix) - _entropy_rows(out2) @ pu
        return np.minimum(i_sat, np.maximum(i_cloud, 0.0))

    def single(pu, rows):
        i_sat = float(pu @ channel_mutual_information(rows, bc.ch_y1))
        return min(i_sat, _cloud_mi(pu, rows, bc.ch_y2))

    pu, rows, best, meta = _aux_pair_search(batch, single, nu, nx, config)
    i_sat = float(pu @ channel_mutual_information(rows, bc.ch_y1))
    i_cloud = _cloud_mi(pu, rows, bc.ch_y2)
    return CapacityResult(
        value=best,
        argmax_input=Distribution(pu @ rows),
        argmax_aux={"p_u": Distribution(pu), "p_x_given_u": Channel(rows)},
        binding_terms=_binding({"satellite": i_sat, "cloud": i_cloud}),
        grid_meta=meta,
    )


def capacity_deterministic(bc: BroadcastSpec, config: GridConfig = DEFAULT_CONFIG) -> CapacityResult:
    """Deterministic legitimate outputs under a strongest eavesdropper.

    C = max over P(X) of min{ H(Y1), H(Y2), (1/2) H(Y1, Y2) }.
    """
    require_chain(strongest_chain_witnesses(bc), "X-Z-Y1 and X-Z-Y2")
    if not (is_deterministic(bc.ch_y1) and is_deterministic(bc.ch_y2)):
        raise PreconditionError("legitimate channels must be deterministic functions of X")
    nx = bc.x_size
    phi1 = np.argmax(bc.ch_y1.matrix, axis=1)
    phi2 = np.argmax(bc.ch_y2.matrix, axis=1)
    ny1, ny2 = bc.ch_y1.n_outputs, bc.ch_y2.n_outputs
    e1 = np.zeros((nx, ny1))
    e1[np.arange(nx), phi1] = 1.0
    e2 = np.zeros((nx, ny2))
    e2[np.arange(nx), phi2] = 1.0
    e12 = np.zeros((nx, ny1 * ny2))
    e12[np.arange(nx), phi1 * ny2 + phi2] = 1.0

    def batch(p):
        h1 = _entropy_rows(p @ e1)
        h2 = _entropy_rows(p @ e2)
        h12 = _entropy_rows(p @ e12)
        return np.minimum(np.minimum(h1, h2), 0.5 * h12)

    x, best, meta = _maximize_over_inputs(batch, nx, config)
    h1 = float(_entropy_rows((x @ e1)[None, :])[0])
    h2 = float(_entropy_rows((x @ e2)[None, :])[0])
    h12 = float(_entropy_rows((x @ e12)[None, :])[0])
    return CapacityResult(
        value=best,
        argmax_input=Distribution(x),
        argmax_aux=None,
        binding_terms=_binding({"h_y1": h1, "h_y2": h2, "half_joint": 0.5 * h12}),
        grid_meta=meta,
    )


def capacity_weakest(bc: BroadcastSpec, config: GridConfig = DEFAULT_CONFIG) -> CapacityResult:
    """Weakest eavesdropper (degraded or less noisy): fictitious-message coding.

    C = max over P(X) of min{ I(X;Y1), I(X;Y2),
                              (1/2)[I(X;Y1) + I(X;Y2) - I(X;Z)] }.
    """
    if weakest_chain_witnesses(bc) is None and not weakest_less_noisy_holds(bc, config.resolution):
        raise PreconditionError(
            "eavesdropper is not certified weaker than both legitimate receivers"
        )

    def batch(p):
        i1 = channel_mutual_information(p, bc.ch_y1)
        i2 = channel_mutual_information(p, bc.ch_y2)
        iz = channel_mutual_information(p, bc.ch_z)
        return np.minimum(np.minimum(i1, i2), 0.5 * (i1 + i2 - iz))

    x, best, meta = _maximize_over_inputs(batch, bc.x_size, config)
    i1 = float(channel_mutual_information(x, bc.ch_y1))
    i2 = float(channel_mutual_information(x, bc.ch_y2))
    iz = float(channel_mutual_information(x, bc.ch_z))
    return CapacityResult(
        value=best,
        argmax_input=Distribution(x),
        argmax_aux=None,
        binding_terms=_binding(
            {"single_user_1": i1, "single_user_2": i2, "sum_rate": 0.5 * (i1 + i2 - iz)}
        ),
        grid_meta=meta,
    )


def weakest_alpha_form(bc: BroadcastSpec, alpha: float, input_dist: Distribution) -> float:
    """Key-split form of the weakest-eavesdropper rate at a fixed input.

    min{ I(X;Y1) - alpha I(X;Z), I(X;Y2) - (1 - alpha) I(X;Z) }; the fraction
    alpha apportions the eavesdropper saturation between the two keys.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must be in [0, 1], got {alpha}")
    p = input_dist.probs
    i1 = float(channel_mutual_information(p, bc.ch_y1))
    i2 = float(channel_mutual_information(p, bc.ch_y2))
    iz = float(channel_mutual_information(p, bc.ch_z))
    return min(i1 - alpha * iz, i2 - (1.0 - alpha) * iz)


def weakest_alpha_equalizer(bc: BroadcastSpec, input_dist: Distribution) -> float:
    """The alpha at which the two key-split terms cross, clamped to [0, 1]."""
    p = input_dist.probs
    i1 = float(channel_mutual_information(p, bc.ch_y1))
    i2 = float(channel_mutual_information(p, bc.ch_y2))
    iz = float(channel_mutual_information(p, bc.ch_z))
    if iz <= ZERO_CLIP:
        return 0.0
    return float(np.clip((i1 - i2 + iz) / (2.0 * iz), 0.0, 1.0))


def capacity_middle(bc: BroadcastSpec, config: GridConfig = DEFAULT_CONFIG) -> CapacityResult:
    """Eavesdropper in the middle (X - Y1 - Z - Y2): hybrid scheme capacity.

    C = max over (P_U, P_{X|U}) of
        min{ I(U;Y2), (1/2)[I(X;Y1) + I(U;Y2) - I(U;Z)] },  |U| <= |X| + 1.
    """
    require_chain(middle_chain_witnesses(bc), "X-Y1-Z-Y2")
    nx = bc.x_size
    nu = nx + 1

    def batch(pu, rows_stack):
        c = rows_stack.shape[0]
        flat = rows_stack.reshape(-1, nx)
        out2 = (flat @ bc.ch_y2.matrix).reshape(c, nu, -1)
        outz = (flat @ bc.ch_z.matrix).reshape(c, nu, -1)
        i_uy2 = np.maximum(
            _entropy_rows(np.einsum("u,cuo->co", pu, out2)) - _entropy_rows(out2) @ pu, 0.0
        )
        i_uz = np.maximum(
            _entropy_rows(np.einsum("u,cuo->co", pu, outz)) - _entropy_rows(outz) @ pu, 0.0
        )
        px = np.einsum("u,cux->cx", pu, rows_stack)
        i_xy1 = channel_mutual_information(px, bc.ch_y1)
        return np.minimum(i_uy2, 0.5 * (i_xy1 + i_uy2 - i_uz))

    def single(pu, rows):
        i_uy2 = _cloud_mi(pu, rows, bc.ch_y2)
        i_uz = _cloud_mi(pu, rows, bc.ch_z)
        i_xy1 = float(channel_mutual_information(pu @ rows, bc.ch_y1))
        return min(i_uy2, 0.5 * (i_xy1 + i_uy2 - i_uz))

    pu, rows, best, meta = _aux_pair_search(batch, single, nu, nx, config)
    i_uy2 = _cloud_mi(pu, rows, bc.ch_y2)
    i_uz = _cloud_mi(pu, rows, bc.ch_z)
    i_xy1 = float(channel_mutual_information(pu @ rows, bc.ch_y1))
    return CapacityResult(
        value=best,
        argmax_input=Distribution(pu @ rows),
        argmax_aux={"p_u": Distribution(pu), "p_x_given_u": Channel(rows)},
        binding_terms=_binding(
            {"cloud_rx2": i_uy2, "sum_rate": 0.5 * (i_xy1 + i_uy2 - i_uz)}
        ),
        grid_meta=meta,
    )


# ---------------------------------------------------------------------------
# Marton rate and the UV-type outer bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MartonBreakdown:
    value: float
    terms: dict


def marton_rate(joint: JointDistribution, bc: BroadcastSpec) -> MartonBreakdown:
    """Marton-coding secrecy rate of a given auxiliary joint law.

    ``joint`` must carry axes ("u", "v", "w", "x"). The four min-terms are
    evaluated exactly; a negative min means the joint certifies nothing.
    """
    if tuple(joint.axes) != ("u", "v", "w", "x"):
        raise ValidationError(f'marton joint must have axes ("u","v","w","x"), got {joint.axes}')
    if joint.table.shape[3] != bc.x_size:
        raise ValidationError("joint x-axis does not match the broadcast input alphabet")
    t = joint.table
    t_uwy1 = np.einsum("uvwx,xa->uwa", t, bc.ch_y1.matrix)
    t_vwy2 = np.einsum("uvwx,xa->vwa", t, bc.ch_y2.matrix)
    t_uvw = t.sum(axis=3)

    def h(arr):
        return entropy_bits(arr)

    h_w = h(t_uvw.sum(axis=(0, 1)))
    i_uw_y1 = max(0.0, h(t_uwy1.sum(axis=2)) + h(t_uwy1.sum(axis=(0, 1))) - h(t_uwy1))
    i_vw_y2 = max(0.0, h(t_vwy2.sum(axis=2)) + h(t_vwy2.sum(axis=(0, 1))) - h(t_vwy2))
    i_v_y2_w = max(0.0, h(t_vwy2.sum(axis=2)) + h(t_vwy2.sum(axis=0)) - h(t_vwy2) - h_w)
    i_u_y1_w = max(0.0, h(t_uwy1.sum(axis=2)) + h(t_uwy1.sum(axis=0)) - h(t_uwy1) - h_w)
    i_u_v_w = max(0.0, h(t_uvw.sum(axis=1)) + h(t_uvw.sum(axis=0)) - h(t_uvw) - h_w)

    terms = {
        "rx1": i_uw_y1,
        "rx2": i_vw_y2,
        "pair_1": 0.5 * (i_uw_y1 + i_v_y2_w - i_u_v_w),
        "pair_2": 0.5 * (i_vw_y2 + i_u_y1_w - i_u_v_w),
    }
    return MartonBreakdown(value=min(terms.values()), terms=terms)


def best_marton_rate(bc: BroadcastSpec, tries: int = 64, seed: int = 0) -> MartonBreakdown:
    """Best Marton rate over structured corners plus seeded random joints.

    The search family uses |U| = |V| = |X| + 1 and |W| <= |X|. Deterministic
    for a fixed (tries, seed).
    """
    nx = bc.x_size
    nu = nv = nx + 1
    nw = nx
    best = MartonBreakdown(value=0.0, terms={})

    def consider(table):
        nonlocal best
        r = marton_rate(JointDistribution(table, ("u", "v", "w", "x")), bc)
        if r.value > best.value:
            best = r

    for p in simplex_lattice(nx, 8):
        table = np.zeros((nu, nv, nw, nx))
        for x in range(nx):
            table[x, x, x % nw, x] = p[x]
        if table.sum() > 0:
            consider(table)

    if is_deterministic(bc.ch_y1) and is_deterministic(bc.ch_y2):
        phi1 = np.argmax(bc.ch_y1.matrix, axis=1)
        phi2 = np.argmax(bc.ch_y2.matrix, axis=1)
        if bc.ch_y1.n_outputs <= nu and bc.ch_y2.n_outputs <= nv:
            for p in simplex_lattice(nx, 8):
                table = np.zeros((nu, nv, nw, nx))
                for x in range(nx):
                    table[phi1[x], phi2[x], 0, x] = p[x]
                consider(table)

    rng = np.random.default_rng(seed)
    for _ in range(tries):
        consider(rng.dirichlet(np.ones(nu * nv * nw * nx)).reshape(nu, nv, nw, nx))
    return best


def uv_outer_bound(bc: BroadcastSpec, config: GridConfig = DEFAULT_CONFIG) -> CapacityResult:
    """UV-type upper bound for a strongest eavesdropper, from below by grids.

    Reported value is a grid under-approximation of
    max over P(U,V,X) of min{ I(U;Y1), I(V;Y2),
                              (1/2)[I(U;Y1) + I(X;Y2|U)],
                              (1/2)[I(V;Y2) + I(X;Y1|V)] },
    labeled "outer-bound estimate (grid)" to prevent misreading it as a
    certified bound. For a fixed input law the U-terms and V-terms decouple,
    so the pair search splits into two independent conditional searches.
    """
    require_chain(strongest_chain_witnesses(bc), "X-Z-Y1 and X-Z-Y2")
    nx = bc.x_size
    naux = nx + 1

    res = config.aux_resolution
    while res > 1 and comb(res + naux - 1, naux - 1) ** nx > config.max_aux_combos:
        res -= 1
    cond_grid = simplex_lattice(naux, res)  # distributions over U for one x
    g = cond_grid.shape[0]
    combos = np.array(list(itertools.product(range(g), repeat=nx)), dtype=int)
    w_stack = cond_grid[combos]  # (C, nx, naux): P(U|X=x) rows

    def side_scores(p: np.ndarray, ch_own: Channel, ch_other: Channel):
        """(I(U;own), I(X;other|U)) for every conditional in the stack."""
        joint = p[None, :, None] * w_stack  # (C, nx, naux)
        pu = joint.sum(axis=1)
        out_own = np.einsum("cxu,xo->cuo", joint, ch_own.matrix)
        h_own_mix = _entropy_rows(np.asarray(p @ ch_own.matrix)[None, :])[0]
        i_u_own = np.maximum(h_own_mix + _entropy_rows(pu) - _entropy_rows(out_own.reshape(out_own.shape[0], -1)), 0.0)
        t_xu_other = np.einsum("cxu,xo->cxuo", joint, ch_other.matrix)
        c = t_xu_other.shape[0]
        h_xu = _entropy_rows(joint.reshape(c, -1))
        h_uother = _entropy_rows(t_xu_other.sum(axis=1).reshape(c, -1))
        h_xuother = _entropy_rows(t_xu_other.reshape(c, -1))
        h_u = _entropy_rows(pu)
        i_x_other_u = np.maximum(h_xu + h_uother - h_xuother - h_u, 0.0)
        return i_u_own, i_x_other_u

    def value_at(p: np.ndarray):
        a1, a2 = side_scores(p, bc.ch_y1, bc.ch_y2)
        phi = np.minimum(a1, 0.5 * (a1 + a2))
        ku = int(np.argmax(phi))
        b1, b2 = side_scores(p, bc.ch_y2, bc.ch_y1)
        psi = np.minimum(b1, 0.5 * (b1 + b2))
        kv = int(np.argmax(psi))
        return min(float(phi[ku]), float(psi[kv])), ku, kv

    px_grid = simplex_lattice(nx, min(config.resolution, 16))
    best_val, best_p, best_ku, best_kv = -np.inf, px_grid[0], 0, 0
    for p in px_grid:
        v, ku, kv = value_at(p)
        if v > best_val:
            best_val, best_p, best_ku, best_kv = v, p, ku, kv

    u_cond = w_stack[best_ku]
    v_cond = w_stack[best_kv]

    def single(flat):
        p = flat[:nx]
        uc = flat[nx : nx + nx * naux].reshape(nx, naux)
        vc = flat[nx + nx * naux :].reshape(nx, naux)
        a1, a2 = _uv_terms(p, uc, bc.ch_y1, bc.ch_y2)
        b1, b2 = _uv_terms(p, vc, bc.ch_y2, bc.ch_y1)
        return min(a1, b1, 0.5 * (a1 + a2), 0.5 * (b1 + b2))

    flat0 = np.concatenate([best_p, u_cond.ravel(), v_cond.ravel()])
    blocks = [(0, nx)]
    blocks += [(nx + k * naux, naux) for k in range(nx)]
    blocks += [(nx + nx * naux + k * naux, naux) for k in range(nx)]
    flat, best = _refine_blocks(single, flat0, blocks, 1.0 / res, config)

    p = flat[:nx]
    uc = flat[nx : nx + nx * naux].reshape(nx, naux)
    vc = flat[nx + nx * naux :].reshape(nx, naux)
    a1, a2 = _uv_terms(p, uc, bc.ch_y1, bc.ch_y2)
    b1, b2 = _uv_terms(p, vc, bc.ch_y2, bc.ch_y1)
    return CapacityResult(
        value=float(best),
        argmax_input=Distribution(p),
        argmax_aux={"p_u_given_x": Channel(uc), "p_v_given_x": Channel(vc)},
        binding_terms=_binding(
            {
                "rx1_aux": a1,
                "rx2_aux": b1,
                "sum_rate_1": 0.5 * (a1 + a2),
                "sum_rate_2": 0.5 * (b1 + b2),
            }
        ),
        grid_meta={
            "resolution": min(config.resolution, 16),
            "aux_resolution": res,
            "refine_rounds": config.refine_rounds,
            "note": "outer-bound estimate (grid)",
        },
    )


def _uv_terms(p: np.ndarray, cond: np.ndarray, ch_own: Channel, ch_other: Channel):
    """(I(U;own), I(X;other|U)) for a single conditional P(U|X)."""
    joint = p[:, None] * cond  # (nx, naux)
    pu = joint.sum(axis=0)
    out_own = np.einsum("xu,xo->uo", joint, ch_own.matrix)
    i_u_own = max(
        0.0,
        float(
            entropy_bits(p @ ch_own.matrix) + entropy_bits(pu) - entropy_bits(out_own)
        ),
    )
    t = np.einsum("xu,xo->xuo", joint, ch_other.matrix)
    i_x_other_u = max(
        0.0,
        float(entropy_bits(joint) + entropy_bits(t.sum(axis=0)) - entropy_bits(t) - entropy_bits(pu)),
    )
    return i_u_own, i_x_other_u


# ---------------------------------------------------------------------------
# Hybrid rate region (Fourier-Motzkin oracle)
# ---------------------------------------------------------------------------


def hybrid_rate_oracle(
    i_u_y1: float, i_u_y2: float, i_x_y1_given_u: float, i_u_z: float, i_x_z_given_u: float
) -> HybridRatePoint:
    """Best split of the hybrid scheme's rate budget, as a small LP.

    Maximizes R' + R_xor subject to
        R' + R'_K2 + R_xor <= I(U;Y1)
        R' + R'_K1 + R_xor <= I(U;Y2)
        R_xor             <= I(X;Y1|U)
        R'_K1 + R'_K2 + R_xor >= I(U;Z)
        R_xor             >= I(X;Z|U)
    with all variables non-negative. The strict secrecy inequalities are
    closed: achievable rates form an open set whose closure the LP computes.
    An infeasible system (e.g. I(X;Z|U) > I(X;Y1|U)) yields total = 0.
    """
    values = (i_u_y1, i_u_y2, i_x_y1_given_u, i_u_z, i_x_z_given_u)
    if any(v < 0 for v in values):
        raise ValidationError(f"all five mutual informations must be >= 0, got {values}")
    a, b, c, d, e = (float(v) for v in values)
    # Variables: [r_prime, r_xor, k1, k2]
    a_ub = np.array(
        [
            [1.0, 1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, -1.0, -1.0, -1.0],
            [0.0, -1.0, 0.0, 0.0],
        ]
    )
    b_ub = np.array([a, b, c, -d, -e])
    bounds = [(0.0, None)] * 4

    def solve(cost, extra_eq=()):
        a_eq = np.array([row for row, _ in extra_eq]) if extra_eq else None
        b_eq = np.array([rhs for _, rhs in extra_eq]) if extra_eq else None
        return linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                       bounds=bounds, method="highs")

    # Ties are broken lexicographically so the returned vertex is canonical:
    # max total, then max wiretap-protected share, then minimal key burden.
    res = solve([-1.0, -1.0, 0.0, 0.0])
    if not res.success:
        return HybridRatePoint(0.0, 0.0, 0.0, 0.0, 0.0, feasible=False)
    total = -float(res.fun)
    best = res
    pins = [(np.array([1.0, 1.0, 0.0, 0.0]), total)]
    for cost, pin_row in (
        ([-1.0, 0.0, 0.0, 0.0], np.array([1.0, 0.0, 0.0, 0.0])),
        ([0.0, 0.0, 1.0, 1.0], np.array([0.0, 0.0, 1.0, 1.0])),
        ([0.0, 0.0, 1.0, 0.0], None),
    ):
        res = solve(cost, pins)
        if not res.success:
            break
        best = res
        if pin_row is not None:
            pins.append((pin_row, float(pin_row @ res.x)))

    r_prime, r_xor, k1, k2 = (max(0.0, float(v)) for v in best.x)
    return HybridRatePoint(
        r_prime=r_prime,
        r_xor=r_xor,
        r_k1_prime=k1,
        r_k2_prime=k2,
        total=r_prime + r_xor,
        feasible=True,
    )


@dataclass(frozen=True)
class FmConsistencyReport:
    """LP-versus-closed-form comparison for the hybrid rate region."""

    mutual_informations: dict
    lp_point: HybridRatePoint
    lp_total: float
    closed_form_total: float
    abs_difference: float


def hybrid_closed_form_total(
    i_u_y1: float, i_u_y2: float, i_x_y1_given_u: float, i_u_z: float, i_x_z_given_u: float
) -> float:
    """Eliminated form of the hybrid region's best total rate.

    min{ I(U;Y1), I(U;Y2), (1/2)[I(X;Y1) + I(U;Y2) - I(U;Z)] } when the rate
    system is satisfiable (which requires I(X;Z|U) <= min of the upper
    budgets), and 0 when it is empty: the elimination presumes a realizable
    rate tuple, and an empty system supports only the zero rate.
    """
    a, b, c, d, e = i_u_y1, i_u_y2, i_x_y1_given_u, i_u_z, i_x_z_given_u
    if e > min(a, b, c, a + b - d) + 1e-12:
        return 0.0
    return min(a, b, 0.5 * (a + b + c - d))


def hybrid_budgets(bc: BroadcastSpec, joint_ux: JointDistribution) -> dict:
    """The five mutual informations that budget the hybrid scheme.

    From a joint P(U, X) with axes ("u", "x") and the broadcast marginals:
    I(U;Y1), I(U;Y2), I(X;Y1|U), I(U;Z), I(X;Z|U).
    """
    if tuple(joint_ux.axes) != ("u", "x"):
        raise ValidationError(f'joint must have axes ("u", "x"), got {joint_ux.axes}')
    if joint_ux.table.shape[1] != bc.x_size:
        raise ValidationError("joint x-axis does not match the broadcast input alphabet")

    t = joint_ux.table
    pu = t.sum(axis=1)
    px = t.sum(axis=0)

    def pair_terms(ch: Channel):
        out_u = np.einsum("ux,xo->uo", t, ch.matrix)
        i_u = max(0.0, float(entropy_bits(px @ ch.matrix) + entropy_bits(pu) - entropy_bits(out_u)))
        t3 = np.einsum("ux,xo->uxo", t, ch.matrix)
        i_x_given_u = max(
            0.0,
            float(entropy_bits(t) + entropy_bits(out_u) - entropy_bits(t3) - entropy_bits(pu)),
        )
        return i_u, i_x_given_u

    i_u_y1, i_x_y1_u = pair_terms(bc.ch_y1)
    i_u_y2, _ = pair_terms(bc.ch_y2)
    i_u_z, i_x_z_u = pair_terms(bc.ch_z)
    return {
        "i_u_y1": i_u_y1,
        "i_u_y2": i_u_y2,
        "i_x_y1_given_u": i_x_y1_u,
        "i_u_z": i_u_z,
        "i_x_z_given_u": i_x_z_u,
    }


def fm_consistency_check(bc: BroadcastSpec, joint_ux: JointDistribution) -> FmConsistencyReport:
    """Check the Fourier-Motzkin elimination against the LP oracle.

    Computes the five mutual informations of the hybrid scheme from a joint
    P(U, X) and the middle-regime broadcast channels, then compares the LP
    total with the closed-form min.
    """
    require_chain(middle_chain_witnesses(bc), "X-Y1-Z-Y2")
    mis = hybrid_budgets(bc, joint_ux)
    five = (
        mis["i_u_y1"],
        mis["i_u_y2"],
        mis["i_x_y1_given_u"],
        mis["i_u_z"],
        mis["i_x_z_given_u"],
    )
    lp = hybrid_rate_oracle(*five)
    closed = hybrid_closed_form_total(*five)
    return FmConsistencyReport(
        mutual_informations=mis,
        lp_point=lp,
        lp_total=lp.total,
        closed_form_total=closed,
        abs_difference=abs(lp.total - closed),
    )
