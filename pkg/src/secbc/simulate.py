"""Desk-scale realizations of the three coding strategies.

Codebooks, noise, and trial draws all come from counter-based Philox streams
keyed by (seed, role, indices), so every artifact regenerates bit-identically
and Monte-Carlo results are reproducible. Decoding is maximum likelihood over
the key-consistent sub-codebook (exact and parameter-free at these block
lengths). Leakage is never estimated: I(M; Z^n) is computed by full output
enumeration, and the operation refuses when the term count would exceed the
budget rather than silently subsampling.

Reports carry the caveat tag: finite-blocklength results are not capacity
claims.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    BroadcastSpec,
    middle_chain_witnesses,
    require_chain,
    weakest_chain_witnesses,
    weakest_less_noisy_holds,
)
from .capacity import HybridRatePoint
from .errors import PreconditionError, ResourceBudgetError, ValidationError
from .probcore import Channel, Distribution, entropy_bits

#: Exact-leakage enumeration refuses beyond |Z|^n * |M| * |K1| * |K2| terms.
EXACT_LEAKAGE_TERM_CAP = 1 << 26

#: Codebook construction refuses beyond this many stored symbols.
CODEBOOK_ENTRY_CAP = 1 << 26

FINITE_BLOCKLENGTH_CAVEAT = "finite-blocklength, not a capacity claim"

_MASK = (1 << 64) - 1

# Stream roles for the counter-based generator.
_ROLE_CODEWORD = 1
_ROLE_CLOUD = 2
_ROLE_SATELLITE = 3
_ROLE_TRIAL_DRAW = 4
_ROLE_NOISE_RX1 = 5
_ROLE_NOISE_RX2 = 6
_ROLE_OTP_CODE1 = 7
_ROLE_OTP_CODE2 = 8


def _sm64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _stream(seed: int, *indices: int) -> np.random.Generator:
    """Deterministic Philox stream keyed by (seed, role, indices)."""
    h1 = _sm64(seed & _MASK)
    h2 = _sm64(h1 ^ 0xD6E8FEB86659FD93)
    for v in indices:
        h1 = _sm64(h1 ^ _sm64(v & _MASK))
        h2 = _sm64((h2 + h1) & _MASK)
    key = np.array([h1, h2], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _sample_symbols(probs: np.ndarray, rng: np.random.Generator, size) -> np.ndarray:
    """Inverse-CDF draws from a probability vector."""
    cum = np.cumsum(probs)
    idx = np.searchsorted(cum, rng.random(size), side="right")
    return np.minimum(idx, probs.size - 1)


def _push_through(x: np.ndarray, ch: Channel, rng: np.random.Generator) -> np.ndarray:
    """Sample channel outputs for a symbol array of any shape."""
    cum = np.cumsum(ch.matrix, axis=1)
    u = rng.random(x.shape)
    out = (cum[x] <= u[..., None]).sum(axis=-1)
    return np.minimum(out, ch.n_outputs - 1)


def otp_encrypt(message: int, key: int, modulus: int) -> int:
    """One-time pad: (message + key) mod modulus."""
    if modulus < 1:
        raise ValidationError(f"modulus must be >= 1, got {modulus}")
    if not (0 <= message < modulus and 0 <= key < modulus):
        raise ValidationError(
            f"message {message} and key {key} must lie in [0, {modulus})"
        )
    return (message + key) % modulus


def otp_decrypt(cipher: int, key: int, modulus: int) -> int:
    """Inverse pad: (cipher - key) mod modulus."""
    if modulus < 1:
        raise ValidationError(f"modulus must be >= 1, got {modulus}")
    if not (0 <= cipher < modulus and 0 <= key < modulus):
        raise ValidationError(f"cipher {cipher} and key {key} must lie in [0, {modulus})")
    return (cipher - key) % modulus


@dataclass(frozen=True)
class LayeredCodebook:
    """Two-layer superposition payload: cloud centers over U, satellites over X."""

    m_prime: int
    m_xor: int
    k1_prime: int
    k2_prime: int
    cloud_words: np.ndarray  # (m', k1', k2', c2, n) over the U alphabet
    sat_words: np.ndarray  # (m', k1', k2', c2, c1, n) over the X alphabet
    p_u: Distribution
    p_x_given_u: Channel


@dataclass(frozen=True)
class Codebook:
    """Random codebook indexed by (message, key1, key2).

    Regenerates bit-identically from (seed, sizes, n, generator_dist);
    ``generator_dist`` is the input law for i.i.d. books, a (P_U, P_{X|U})
    pair for superposition books, or a text tag for structured ones.
    """

    n: int
    words: np.ndarray  # (|M|, |K1|, |K2|, n) symbol indices
    seed: int
    generator_dist: object
    layered: LayeredCodebook | None = None

    def __post_init__(self) -> None:
        w = np.asarray(self.words)
        if w.ndim != 4 or w.shape[3] != self.n:
            raise ValidationError(f"words must have shape (M, K1, K2, n), got {w.shape}")
        w = w.astype(np.int64, copy=True)
        w.flags.writeable = False
        object.__setattr__(self, "words", w)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return tuple(int(s) for s in self.words.shape[:3])


def build_wiretap_codebook(
    n: int, sizes: tuple[int, int, int], px: Distribution, seed: int
) -> Codebook:
    """I.i.d. codebook of |M| * |K1| * |K2| words drawn from ``px``."""
    m, k1, k2 = (int(s) for s in sizes)
    if n < 1 or min(m, k1, k2) < 1:
        raise ValidationError(f"need n >= 1 and all sizes >= 1, got n={n}, sizes={sizes}")
    entries = m * k1 * k2 * n
    if entries > CODEBOOK_ENTRY_CAP:
        raise ResourceBudgetError(
            f"codebook of {entries} symbols exceeds the {CODEBOOK_ENTRY_CAP}-entry cap"
        )
    words = np.empty((m, k1, k2, n), dtype=np.int64)
    for im in range(m):
        for i1 in range(k1):
            for i2 in range(k2):
                rng = _stream(seed, _ROLE_CODEWORD, im, i1, i2)
                words[im, i1, i2] = _sample_symbols(px.probs, rng, n)
    return Codebook(n=n, words=words, seed=seed, generator_dist=px)


def build_otp_codebook(n: int, modulus: int) -> Codebook:
    """Structured pad codebook: word(m, k) repeats the cipher (m + k) mod q.

    The channel input alphabet is the modulus itself; there is no second key.
    """
    if n < 1 or modulus < 1:
        raise ValidationError(f"need n >= 1 and modulus >= 1, got n={n}, modulus={modulus}")
    m_idx, k_idx = np.meshgrid(np.arange(modulus), np.arange(modulus), indexing="ij")
    cipher = (m_idx + k_idx) % modulus
    words = np.repeat(cipher[:, :, None, None], n, axis=3)
    return Codebook(n=n, words=words, seed=0, generator_dist="otp-repetition")


def wiretap_sizes(rates: tuple[float, float, float], n: int) -> tuple[int, int, int]:
    """Index-space sizes for per-symbol (R, R_K1, R_K2) at block length n.

    The message rounds down and the keys round up, mirroring the strict size
    conditions of the random-coding construction (reliability is never hurt
    by a smaller message set, secrecy never by a larger key set).
    """
    r, rk1, rk2 = rates
    if min(r, rk1, rk2) < 0:
        raise ValidationError(f"rates must be >= 0, got {rates}")
    m = max(1, math.floor(2.0 ** (n * r) + 1e-9))
    k1 = max(1, math.ceil(2.0 ** (n * rk1) - 1e-9))
    k2 = max(1, math.ceil(2.0 ** (n * rk2) - 1e-9))
    return (m, k1, k2)


def hybrid_sizes(rate_point: HybridRatePoint, n: int) -> tuple[int, int, int, int]:
    """Index-space sizes (|M'|, |M+|, |K1'|, |K2'|) at block length n.

    Message parts round down, key parts round up, as in the wiretap sizing
    rule; the pad alphabet |M+| is itself a key size for K1+/K2+, but pad
    secrecy is exact at any size, so reliability-first rounding is safe.
    """
    down = lambda rate: max(1, math.floor(2.0 ** (n * rate) + 1e-9))
    up = lambda rate: max(1, math.ceil(2.0 ** (n * rate) - 1e-9))
    return (
        down(rate_point.r_prime),
        down(rate_point.r_xor),
        up(rate_point.r_k1_prime),
        up(rate_point.r_k2_prime),
    )


def build_superposition_codebook(
    n: int,
    sizes: tuple[int, int, int, int],
    p_u: Distribution,
    p_x_given_u: Channel,
    seed: int,
) -> Codebook:
    """Two-layer codebook: clouds carry (M', K1', K2', M2+), satellites M1+.

    Cloud words are i.i.d. from P_U; for each pad index c1 a satellite is
    drawn position-wise from P(X | U = u_i).
    """
    m_prime, m_xor, k1_prime, k2_prime = (int(s) for s in sizes)
    if n < 1 or min(m_prime, m_xor, k1_prime, k2_prime) < 1:
        raise ValidationError(f"need n >= 1 and all sizes >= 1, got n={n}, sizes={sizes}")
    if p_u.alphabet_size != p_x_given_u.n_inputs:
        raise ValidationError("P_U size must match the rows of P(X|U)")
    sat_entries = m_prime * k1_prime * k2_prime * m_xor * m_xor * n
    if sat_entries > CODEBOOK_ENTRY_CAP:
        raise ResourceBudgetError(
            f"superposition codebook of {sat_entries} symbols exceeds the "
            f"{CODEBOOK_ENTRY_CAP}-entry cap"
        )
    q = m_xor
    cloud = np.empty((m_prime, k1_prime, k2_prime, q, n), dtype=np.int64)
    sat = np.empty((m_prime, k1_prime, k2_prime, q, q, n), dtype=np.int64)
    cum_rows = np.cumsum(p_x_given_u.matrix, axis=1)
    for mp in range(m_prime):
        for i1 in range(k1_prime):
            for i2 in range(k2_prime):
                for c2 in range(q):
                    rng = _stream(seed, _ROLE_CLOUD, mp, i1, i2, c2)
                    u_word = _sample_symbols(p_u.probs, rng, n)
                    cloud[mp, i1, i2, c2] = u_word
                    row_cum = cum_rows[u_word]  # (n, nx)
                    for c1 in range(q):
                        rng = _stream(seed, _ROLE_SATELLITE, mp, i1, i2, c2, c1)
                        u_draw = rng.random(n)
                        x_word = (row_cum <= u_draw[:, None]).sum(axis=1)
                        sat[mp, i1, i2, c2, c1] = np.minimum(
                            x_word, p_x_given_u.n_outputs - 1
                        )

    layered = LayeredCodebook(
        m_prime=m_prime,
        m_xor=m_xor,
        k1_prime=k1_prime,
        k2_prime=k2_prime,
        cloud_words=cloud,
        sat_words=sat,
        p_u=p_u,
        p_x_given_u=p_x_given_u,
    )
    words = _flatten_superposition(layered, n)
    return Codebook(
        n=n, words=words, seed=seed, generator_dist=(p_u, p_x_given_u), layered=layered
    )


def _flatten_superposition(lc: LayeredCodebook, n: int) -> np.ndarray:
    """Flat (m, k1, k2) view: m = (m', m+), k_i = (k_i', k_i+)."""
    q = lc.m_xor
    m, k1, k2 = lc.m_prime * q, lc.k1_prime * q, lc.k2_prime * q
    words = np.empty((m, k1, k2, n), dtype=np.int64)
    for mp in range(lc.m_prime):
        for mx in range(q):
            for i1 in range(lc.k1_prime):
                for x1 in range(q):
                    c1 = (mx + x1) % q
                    for i2 in range(lc.k2_prime):
                        for x2 in range(q):
                            c2 = (mx + x2) % q
                            words[mp * q + mx, i1 * q + x1, i2 * q + x2] = lc.sat_words[
                                mp, i1, i2, c2, c1
                            ]
    return words


def exact_leakage(cb: Codebook, ch_z: Channel) -> float:
    """Exact I(M; Z^n) in bits for a uniform message, by full enumeration.

    P(z^n | m) averages the product channel law over both key indices; the
    mutual information is then H(Z^n) - H(Z^n | M). Refuses when
    |Z|^n * |M| * |K1| * |K2| exceeds ``EXACT_LEAKAGE_TERM_CAP``.
    """
    m, k1, k2 = cb.sizes
    if int(cb.words.max()) >= ch_z.n_inputs:
        raise ValidationError("codebook symbols exceed the eavesdropper channel inputs")
    nz = ch_z.n_outputs
    terms = (nz**cb.n) * m * k1 * k2
    if terms > EXACT_LEAKAGE_TERM_CAP:
        raise ResourceBudgetError(
            f"exact leakage needs {terms} terms, over the {EXACT_LEAKAGE_TERM_CAP}-term cap"
        )
    rows = ch_z.matrix
    pz = np.zeros(nz**cb.n)
    h_given_m = 0.0
    for im in range(m):
        cond = np.zeros(nz**cb.n)
        for i1 in range(k1):
            for i2 in range(k2):
                word = cb.words[im, i1, i2]
                v = np.ones(1)
                for i in range(cb.n):
                    v = (v[:, None] * rows[word[i]][None, :]).ravel()
                cond += v
        cond /= k1 * k2
        pz += cond / m
        h_given_m += entropy_bits(cond) / m
    return max(0.0, entropy_bits(pz) - h_given_m)


@dataclass(frozen=True)
class ErrorEstimate:
    rate: float
    errors: int
    trials: int
    wilson_low: float
    wilson_high: float


def _wilson(errors: int, trials: int, z: float = 2.5758293035489004) -> tuple[float, float]:
    # z is the two-sided 99% normal quantile
    if trials <= 0:
        return (0.0, 1.0)
    phat = errors / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _estimate(errors: int, trials: int) -> ErrorEstimate:
    lo, hi = _wilson(errors, trials)
    return ErrorEstimate(
        rate=errors / trials, errors=errors, trials=trials, wilson_low=lo, wilson_high=hi
    )


@dataclass(frozen=True)
class SimReport:
    error_rx1: ErrorEstimate
    error_rx2: ErrorEstimate
    leakage_bits: float
    leakage_per_symbol: float
    params: dict = field(default_factory=dict)
    caveat: str = FINITE_BLOCKLENGTH_CAVEAT


_DECODE_CHUNK = 2048


def _log_table(ch: Channel) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(ch.matrix)


def simulate_weakest_scheme(bc: BroadcastSpec, cb: Codebook, trials: int, seed: int) -> SimReport:
    """Fictitious-message wiretap scheme over a weakest-eavesdropper channel.

    Each receiver ML-decodes over the sub-codebook consistent with its own
    key; the unknown indices are the message and the other receiver's key.
    """
    if weakest_chain_witnesses(bc) is None and not weakest_less_noisy_holds(bc):
        raise PreconditionError("scheme requires a weakest-eavesdropper configuration")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    if int(cb.words.max()) >= bc.x_size:
        raise ValidationError("codebook symbols exceed the broadcast input alphabet")
    m, k1, k2 = cb.sizes
    leakage = exact_leakage(cb, bc.ch_z)

    rng_draw = _stream(seed, _ROLE_TRIAL_DRAW)
    ms = rng_draw.integers(0, m, size=trials)
    k1s = rng_draw.integers(0, k1, size=trials)
    k2s = rng_draw.integers(0, k2, size=trials)
    rng_n1 = _stream(seed, _ROLE_NOISE_RX1)
    rng_n2 = _stream(seed, _ROLE_NOISE_RX2)
    log1 = _log_table(bc.ch_y1)
    log2 = _log_table(bc.ch_y2)

    err1 = err2 = 0
    for lo in range(0, trials, _DECODE_CHUNK):
        hi = min(lo + _DECODE_CHUNK, trials)
        mb, k1b, k2b = ms[lo:hi], k1s[lo:hi], k2s[lo:hi]
        x = cb.words[mb, k1b, k2b]  # (t, n)
        y1 = _push_through(x, bc.ch_y1, rng_n1)
        y2 = _push_through(x, bc.ch_y2, rng_n2)

        cand1 = cb.words[:, k1b].transpose(1, 0, 2, 3).reshape(hi - lo, m * k2, cb.n)
        ll1 = log1[cand1, y1[:, None, :]].sum(axis=2)
        err1 += int(np.sum(np.argmax(ll1, axis=1) // k2 != mb))

        cand2 = cb.words[:, :, k2b].transpose(2, 0, 1, 3).reshape(hi - lo, m * k1, cb.n)
        ll2 = log2[cand2, y2[:, None, :]].sum(axis=2)
        err2 += int(np.sum(np.argmax(ll2, axis=1) // k1 != mb))

    return SimReport(
        error_rx1=_estimate(err1, trials),
        error_rx2=_estimate(err2, trials),
        leakage_bits=leakage,
        leakage_per_symbol=leakage / cb.n,
        params={
            "scheme": "wiretap-weakest",
            "n": cb.n,
            "sizes": cb.sizes,
            "seed": seed,
            "trials": trials,
        },
    )


def _injective_random_code(
    count: int, length: int, alphabet: int, seed: int, role: int
) -> np.ndarray:
    """Uniform i.i.d. codewords, redrawn until distinct when that is possible."""
    can_be_injective = alphabet**length >= count
    for attempt in range(1000):
        rng = _stream(seed, role, attempt)
        code = rng.integers(0, alphabet, size=(count, length))
        if not can_be_injective or len({tuple(w) for w in code}) == count:
            return code
    return code


def simulate_otp_equal_outputs(
    ch: Channel, n: int, message_bits: int, seed: int, trials: int
) -> SimReport:
    """Time-shared one-time pads for equal channel outputs.

    The block splits in half: the first half carries M + K1 to receiver 1,
    the second M + K2 to receiver 2, each over a random code on ``ch``.
    The pads make the channel input independent of M, so exact leakage is
    zero up to float noise.
    """
    if n < 2:
        raise ValidationError(f"need n >= 2 to time-share, got {n}")
    if message_bits < 1:
        raise ValidationError(f"message_bits must be >= 1, got {message_bits}")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    q = 2**message_bits
    n1 = n // 2
    n2 = n - n1
    entries = q * q * q * n
    if entries > CODEBOOK_ENTRY_CAP:
        raise ResourceBudgetError(
            f"pad codebook of {entries} symbols exceeds the {CODEBOOK_ENTRY_CAP}-entry cap"
        )
    code1 = _injective_random_code(q, n1, ch.n_inputs, seed, _ROLE_OTP_CODE1)
    code2 = _injective_random_code(q, n2, ch.n_inputs, seed, _ROLE_OTP_CODE2)

    m_idx = np.arange(q)
    c1 = (m_idx[:, None, None] + m_idx[None, :, None]) % q  # (m, k1, 1)
    c2 = (m_idx[:, None, None] + m_idx[None, None, :]) % q  # (m, 1, k2)
    words = np.concatenate(
        [
            code1[np.broadcast_to(c1, (q, q, q))],
            code2[np.broadcast_to(c2, (q, q, q))],
        ],
        axis=3,
    )
    cb = Codebook(n=n, words=words, seed=seed, generator_dist="otp-equal-outputs")
    leakage = exact_leakage(cb, ch)

    rng_draw = _stream(seed, _ROLE_TRIAL_DRAW)
    ms = rng_draw.integers(0, q, size=trials)
    k1s = rng_draw.integers(0, q, size=trials)
    k2s = rng_draw.integers(0, q, size=trials)
    rng_n1 = _stream(seed, _ROLE_NOISE_RX1)
    rng_n2 = _stream(seed, _ROLE_NOISE_RX2)
    logt = _log_table(ch)

    err1 = err2 = 0
    for lo in range(0, trials, _DECODE_CHUNK):
        hi = min(lo + _DECODE_CHUNK, trials)
        mb, k1b, k2b = ms[lo:hi], k1s[lo:hi], k2s[lo:hi]
        x1 = code1[(mb + k1b) % q]
        x2 = code2[(mb + k2b) % q]
        y1 = _push_through(x1, ch, rng_n1)
        y2 = _push_through(x2, ch, rng_n2)
        ll1 = logt[code1[None, :, :], y1[:, None, :]].sum(axis=2)
        ll2 = logt[code2[None, :, :], y2[:, None, :]].sum(axis=2)
        err1 += int(np.sum((np.argmax(ll1, axis=1) - k1b) % q != mb))
        err2 += int(np.sum((np.argmax(ll2, axis=1) - k2b) % q != mb))

    return SimReport(
        error_rx1=_estimate(err1, trials),
        error_rx2=_estimate(err2, trials),
        leakage_bits=leakage,
        leakage_per_symbol=leakage / n,
        params={
            "scheme": "otp-equal-outputs",
            "n": n,
            "message_bits": message_bits,
            "seed": seed,
            "trials": trials,
        },
    )


def simulate_hybrid_middle(
    bc: BroadcastSpec,
    layered_cb: Codebook,
    rate_point: HybridRatePoint,
    trials: int,
    seed: int,
) -> SimReport:
    """Hybrid pad / fictitious-message scheme for the middle regime.

    The message is (M', M+): M' rides the cloud layer under wiretap
    protection, M+ is padded twice (satellite for receiver 1, cloud slot for
    receiver 2). Receivers ML-decode over their key-consistent sub-codebooks.
    """
    require_chain(middle_chain_witnesses(bc), "X-Y1-Z-Y2")
    if not rate_point.feasible:
        raise PreconditionError("rate point is infeasible for the hybrid scheme")
    if layered_cb.layered is None:
        raise ValidationError("hybrid simulation needs a superposition codebook")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    lc = layered_cb.layered
    if int(lc.sat_words.max()) >= bc.x_size:
        raise ValidationError("codebook symbols exceed the broadcast input alphabet")
    q = lc.m_xor
    n = layered_cb.n
    leakage = exact_leakage(layered_cb, bc.ch_z)

    rng_draw = _stream(seed, _ROLE_TRIAL_DRAW)
    mps = rng_draw.integers(0, lc.m_prime, size=trials)
    mxs = rng_draw.integers(0, q, size=trials)
    k1ps = rng_draw.integers(0, lc.k1_prime, size=trials)
    k1xs = rng_draw.integers(0, q, size=trials)
    k2ps = rng_draw.integers(0, lc.k2_prime, size=trials)
    k2xs = rng_draw.integers(0, q, size=trials)
    rng_n1 = _stream(seed, _ROLE_NOISE_RX1)
    rng_n2 = _stream(seed, _ROLE_NOISE_RX2)
    log1 = _log_table(bc.ch_y1)
    log2 = _log_table(bc.ch_y2)
    sat = lc.sat_words

    err1 = err2 = 0
    for lo in range(0, trials, _DECODE_CHUNK):
        hi = min(lo + _DECODE_CHUNK, trials)
        t = hi - lo
        mp, mx = mps[lo:hi], mxs[lo:hi]
        k1p, k1x = k1ps[lo:hi], k1xs[lo:hi]
        k2p, k2x = k2ps[lo:hi], k2xs[lo:hi]
        c1 = (mx + k1x) % q
        c2 = (mx + k2x) % q
        x = sat[mp, k1p, k2p, c2, c1]
        y1 = _push_through(x, bc.ch_y1, rng_n1)
        y2 = _push_through(x, bc.ch_y2, rng_n2)

        # Receiver 1 knows (k1', k1+): candidates over (m', k2', c2, c1).
        cand1 = sat[:, k1p].transpose(1, 0, 2, 3, 4, 5).reshape(
            t, lc.m_prime * lc.k2_prime * q * q, n
        )
        ll1 = log1[cand1, y1[:, None, :]].sum(axis=2)
        pick1 = np.argmax(ll1, axis=1)
        mp_hat1 = pick1 // (lc.k2_prime * q * q)
        c1_hat = pick1 % q
        mx_hat1 = (c1_hat - k1x) % q
        err1 += int(np.sum((mp_hat1 != mp) | (mx_hat1 != mx)))

        # Receiver 2 knows (k2', k2+): candidates over (m', k1', c2, c1).
        cand2 = sat[:, :, k2p].transpose(2, 0, 1, 3, 4, 5).reshape(
            t, lc.m_prime * lc.k1_prime * q * q, n
        )
        ll2 = log2[cand2, y2[:, None, :]].sum(axis=2)
        pick2 = np.argmax(ll2, axis=1)
        mp_hat2 = pick2 // (lc.k1_prime * q * q)
        c2_hat = (pick2 // q) % q
        mx_hat2 = (c2_hat - k2x) % q
        err2 += int(np.sum((mp_hat2 != mp) | (mx_hat2 != mx)))

    return SimReport(
        error_rx1=_estimate(err1, trials),
        error_rx2=_estimate(err2, trials),
        leakage_bits=leakage,
        leakage_per_symbol=leakage / n,
        params={
            "scheme": "hybrid-middle",
            "n": n,
            "sizes": (lc.m_prime, lc.m_xor, lc.k1_prime, lc.k2_prime),
            "rate_point": {
                "r_prime": rate_point.r_prime,
                "r_xor": rate_point.r_xor,
                "r_k1_prime": rate_point.r_k1_prime,
                "r_k2_prime": rate_point.r_k2_prime,
            },
            "seed": seed,
            "trials": trials,
        },
    )
