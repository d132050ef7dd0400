import math

import numpy as np
import pytest

from secbc import (
    BroadcastSpec,
    Codebook,
    Distribution,
    HybridRatePoint,
    PreconditionError,
    ResourceBudgetError,
    ValidationError,
    bsc,
    build_otp_codebook,
    build_superposition_codebook,
    build_wiretap_codebook,
    exact_leakage,
    hybrid_sizes,
    identity_channel,
    otp_decrypt,
    otp_encrypt,
    simulate_hybrid_middle,
    simulate_otp_equal_outputs,
    simulate_weakest_scheme,
    uniform,
)
from secbc.simulate import EXACT_LEAKAGE_TERM_CAP, wiretap_sizes


def test_otp_encrypt_examples():
    assert otp_encrypt(3, 0, 8) == 3
    assert otp_encrypt(3, 5, 8) == 0
    assert otp_decrypt(0, 5, 8) == 3
    with pytest.raises(ValidationError):
        otp_encrypt(8, 0, 8)
    with pytest.raises(ValidationError):
        otp_decrypt(0, -1, 8)


def test_otp_roundtrip_exhaustive():
    for q in range(1, 17):
        for m in range(q):
            for k in range(q):
                assert otp_decrypt(otp_encrypt(m, k, q), k, q) == m


def test_build_wiretap_codebook_basic():
    cb = build_wiretap_codebook(4, (1, 1, 1), uniform(2), 0)
    assert cb.sizes == (1, 1, 1)
    assert cb.words.shape == (1, 1, 1, 4)

    from secbc.probcore import point_mass

    cb = build_wiretap_codebook(5, (3, 2, 2), point_mass(1, 2), 0)
    assert np.all(cb.words == 1)


def test_build_wiretap_codebook_deterministic():
    a = build_wiretap_codebook(8, (4, 4, 4), uniform(2), seed=42)
    b = build_wiretap_codebook(8, (4, 4, 4), uniform(2), seed=42)
    assert np.array_equal(a.words, b.words)
    c = build_wiretap_codebook(8, (4, 4, 4), uniform(2), seed=43)
    assert not np.array_equal(a.words, c.words)


def test_build_wiretap_codebook_budget():
    with pytest.raises(ResourceBudgetError):
        build_wiretap_codebook(64, (2048, 1024, 1024), uniform(2), 0)
    with pytest.raises(ValidationError):
        build_wiretap_codebook(0, (2, 2, 2), uniform(2), 0)


def test_sizes_rules():
    assert wiretap_sizes((0.125, 0.25, 0.25), 8) == (2, 4, 4)
    assert wiretap_sizes((0.125, 0.25, 0.25), 12) == (2, 8, 8)  # message floors
    point = HybridRatePoint(0.25, 0.125, 0.1, 0.3, 0.375)
    assert hybrid_sizes(point, 8) == (4, 2, 2, 6)  # keys ceil
    with pytest.raises(ValidationError):
        wiretap_sizes((-0.1, 0.2, 0.2), 8)


def test_exact_leakage_message_independent_words():
    # both messages carry the same word set: Z^n independent of M
    base = build_wiretap_codebook(4, (1, 2, 1), uniform(2), 5)
    words = np.repeat(base.words, 2, axis=0)
    cb = Codebook(n=4, words=words, seed=5, generator_dist="copied")
    assert exact_leakage(cb, bsc(0.17)) <= 1e-12


def test_exact_leakage_noiseless_distinct():
    words = np.array([0, 1]).reshape(2, 1, 1, 1)
    cb = Codebook(n=1, words=words, seed=0, generator_dist="manual")
    assert exact_leakage(cb, identity_channel(2)) == pytest.approx(1.0, abs=1e-12)


def test_exact_leakage_otp_paths():
    for q in (2, 3, 5, 8):
        cb = build_otp_codebook(2, q)
        rng = np.random.default_rng(q)
        noisy = rng.dirichlet(np.ones(q), size=q)
        from secbc import Channel

        assert exact_leakage(cb, Channel(noisy)) <= 1e-12
        assert exact_leakage(cb, identity_channel(q)) <= 1e-12


def test_exact_leakage_bounded_by_message_entropy():
    rng = np.random.default_rng(3)
    for _ in range(5):
        m = int(rng.integers(2, 5))
        cb = build_wiretap_codebook(4, (m, 2, 1), uniform(2), int(rng.integers(1000)))
        leak = exact_leakage(cb, bsc(0.12))
        assert 0.0 <= leak <= math.log2(m) + 1e-12


def test_exact_leakage_budget_refusal():
    cb = build_wiretap_codebook(24, (4, 2, 2), uniform(2), 0)  # 2^24 * 16 terms
    with pytest.raises(ResourceBudgetError) as err:
        exact_leakage(cb, bsc(0.1))
    assert str(EXACT_LEAKAGE_TERM_CAP) in str(err.value)


def test_exact_leakage_alphabet_mismatch():
    cb = build_wiretap_codebook(3, (2, 1, 1), uniform(3), 0)
    if int(cb.words.max()) >= 2:
        with pytest.raises(ValidationError):
            exact_leakage(cb, bsc(0.1))


def test_weakest_scheme_noiseless_distinct_codewords():
    spec = BroadcastSpec(ch_y1=identity_channel(2), ch_y2=identity_channel(2), ch_z=bsc(0.3))
    cb = build_wiretap_codebook(6, (2, 2, 2), uniform(2), seed=1)
    for k1 in range(2):  # the decoder-relevant restricted books are distinct
        sub = cb.words[:, k1].reshape(-1, 6)
        assert len({tuple(w) for w in sub}) == sub.shape[0]
    rep = simulate_weakest_scheme(spec, cb, trials=2000, seed=1)
    assert rep.error_rx1.rate == 0.0
    assert rep.error_rx2.rate == 0.0


def test_weakest_scheme_far_above_capacity():
    spec = BroadcastSpec(ch_y1=bsc(0.2), ch_y2=bsc(0.2), ch_z=bsc(0.3))
    cb = build_wiretap_codebook(6, (64, 1, 1), uniform(2), seed=11)
    rep = simulate_weakest_scheme(spec, cb, trials=3000, seed=11)
    assert rep.error_rx1.rate >= 0.2
    assert rep.error_rx2.rate >= 0.2


def test_weakest_scheme_randomization_beats_keyless_baseline():
    spec = BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.1), ch_z=bsc(0.2))
    n, seed = 8, 42
    keyed = build_wiretap_codebook(n, (4, 4, 4), uniform(2), seed)
    bare = build_wiretap_codebook(n, (4, 1, 1), uniform(2), seed)
    keyed_leak = simulate_weakest_scheme(spec, keyed, trials=500, seed=seed).leakage_per_symbol
    bare_leak = exact_leakage(bare, spec.ch_z) / n
    assert keyed_leak < bare_leak


def test_weakest_scheme_deterministic_report():
    spec = BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.1), ch_z=bsc(0.2))
    cb = build_wiretap_codebook(8, (2, 4, 4), uniform(2), 9)
    a = simulate_weakest_scheme(spec, cb, trials=1500, seed=9)
    b = simulate_weakest_scheme(spec, cb, trials=1500, seed=9)
    assert a == b


def test_weakest_scheme_wilson_consistency():
    # the base run's 99% interval must cover the sharper 10x-trial estimate
    spec = BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.1), ch_z=bsc(0.2))
    cb = build_wiretap_codebook(8, (2, 4, 4), uniform(2), 3)
    small = simulate_weakest_scheme(spec, cb, trials=1500, seed=3)
    big = simulate_weakest_scheme(spec, cb, trials=15000, seed=4)
    assert small.error_rx1.wilson_low <= big.error_rx1.rate <= small.error_rx1.wilson_high
    assert small.error_rx2.wilson_low <= big.error_rx2.rate <= small.error_rx2.wilson_high


def test_weakest_scheme_precondition(middle_spec):
    cb = build_wiretap_codebook(4, (2, 2, 2), uniform(2), 0)
    with pytest.raises(PreconditionError):
        simulate_weakest_scheme(middle_spec, cb, trials=10, seed=0)


def test_leakage_key_ladder_ensemble_average():
    # Randomization helps on average over the codebook ensemble; a single
    # realization can regress when the bare layout is atypically secure, so
    # the ladder is averaged over seeds.
    ch_z = bsc(0.2)
    averages = []
    for k in (1, 2, 4, 8):
        vals = [
            exact_leakage(build_wiretap_codebook(6, (2, k, 1), uniform(2), seed), ch_z)
            for seed in range(16)
        ]
        averages.append(float(np.mean(vals)))
    for prev, nxt in zip(averages, averages[1:]):
        assert nxt <= prev + 1e-9


def test_leakage_key_ladder_nested_words():
    # enlarging the key space keeps earlier words (fresh words only appended)
    small = build_wiretap_codebook(6, (2, 2, 1), uniform(2), 5)
    large = build_wiretap_codebook(6, (2, 8, 1), uniform(2), 5)
    assert np.array_equal(large.words[:, :2], small.words)


def test_otp_equal_outputs_noiseless():
    rep = simulate_otp_equal_outputs(identity_channel(2), n=2, message_bits=1, seed=0, trials=400)
    assert rep.error_rx1.rate == 0.0
    assert rep.error_rx2.rate == 0.0
    assert rep.leakage_bits <= 1e-12


def test_otp_equal_outputs_always_secret():
    for bits, n, seed in ((1, 4, 3), (2, 6, 5), (1, 8, 11)):
        rep = simulate_otp_equal_outputs(bsc(0.15), n=n, message_bits=bits, seed=seed, trials=50)
        assert rep.leakage_bits <= 1e-12


def test_otp_equal_outputs_bsc_reliability():
    rep = simulate_otp_equal_outputs(bsc(0.1), n=16, message_bits=1, seed=0, trials=10_000)
    assert rep.error_rx1.rate < 0.05
    assert rep.error_rx2.rate < 0.05
    assert rep.leakage_bits <= 1e-12


def test_otp_equal_outputs_validation():
    with pytest.raises(ValidationError):
        simulate_otp_equal_outputs(bsc(0.1), n=1, message_bits=1, seed=0, trials=10)
    with pytest.raises(ValidationError):
        simulate_otp_equal_outputs(bsc(0.1), n=4, message_bits=0, seed=0, trials=10)


def _middle_spec():
    return BroadcastSpec(ch_y1=identity_channel(2), ch_y2=bsc(0.2), ch_z=bsc(0.1))


def test_hybrid_pure_pad_is_secret():
    spec = _middle_spec()
    point = HybridRatePoint(r_prime=0.0, r_xor=0.25, r_k1_prime=0.25, r_k2_prime=0.25, total=0.25)
    cb = build_superposition_codebook(8, hybrid_sizes(point, 8), uniform(2), identity_channel(2), 3)
    rep = simulate_hybrid_middle(spec, cb, point, trials=300, seed=3)
    assert rep.leakage_bits <= 1e-12


def test_hybrid_degenerate_cloud_is_chance():
    spec = _middle_spec()
    point = HybridRatePoint(r_prime=0.25, r_xor=0.0, r_k1_prime=0.125, r_k2_prime=0.125, total=0.25)
    p_u = Distribution(np.array([1.0, 0.0]))  # single effective cloud
    cb = build_superposition_codebook(8, hybrid_sizes(point, 8), p_u, identity_channel(2), 5)
    rep = simulate_hybrid_middle(spec, cb, point, trials=3000, seed=5)
    m_total = cb.layered.m_prime * cb.layered.m_xor
    chance = 1.0 - 1.0 / m_total
    assert rep.error_rx2.rate == pytest.approx(chance, abs=0.05)


def test_hybrid_two_part_operating_point():
    spec = _middle_spec()
    # satisfiable by hand against the scheme budgets at U ~ BSC(0.02) spread
    point = HybridRatePoint(
        r_prime=1 / 12, r_xor=1 / 12, r_k1_prime=0.05, r_k2_prime=0.36, total=1 / 6
    )
    p_u = uniform(2)
    x_given_u = bsc(0.02)
    cb = build_superposition_codebook(12, hybrid_sizes(point, 12), p_u, x_given_u, 21)
    assert cb.layered.m_prime == 2 and cb.layered.m_xor == 2
    rep = simulate_hybrid_middle(spec, cb, point, trials=1500, seed=21)
    m_total = cb.layered.m_prime * cb.layered.m_xor
    chance_err = 1.0 - 1.0 / m_total
    assert rep.error_rx1.rate < chance_err - 0.2  # decodes far better than chance
    assert rep.error_rx2.rate < chance_err
    assert 0.0 <= rep.leakage_bits <= math.log2(m_total) + 1e-12
    again = simulate_hybrid_middle(spec, cb, point, trials=1500, seed=21)
    assert rep == again


def test_hybrid_rejects_infeasible_point():
    spec = _middle_spec()
    bad = HybridRatePoint(0.0, 0.0, 0.0, 0.0, 0.0, feasible=False)
    cb = build_superposition_codebook(4, (1, 2, 1, 2), uniform(2), identity_channel(2), 0)
    with pytest.raises(PreconditionError):
        simulate_hybrid_middle(spec, cb, bad, trials=10, seed=0)


def test_hybrid_requires_layered_codebook():
    spec = _middle_spec()
    point = HybridRatePoint(0.1, 0.0, 0.1, 0.1, 0.1)
    flat = build_wiretap_codebook(4, (2, 2, 2), uniform(2), 0)
    with pytest.raises(ValidationError):
        simulate_hybrid_middle(spec, flat, point, trials=10, seed=0)


def test_superposition_codebook_regenerates():
    a = build_superposition_codebook(6, (2, 2, 2, 2), uniform(2), bsc(0.1), 17)
    b = build_superposition_codebook(6, (2, 2, 2, 2), uniform(2), bsc(0.1), 17)
    assert np.array_equal(a.words, b.words)
    assert np.array_equal(a.layered.sat_words, b.layered.sat_words)


def test_superposition_budget_refusal():
    with pytest.raises(ResourceBudgetError):
        build_superposition_codebook(64, (64, 64, 64, 64), uniform(2), bsc(0.1), 0)


def test_report_carries_caveat():
    spec = BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.1), ch_z=bsc(0.2))
    cb = build_wiretap_codebook(6, (2, 2, 2), uniform(2), 1)
    rep = simulate_weakest_scheme(spec, cb, trials=50, seed=1)
    assert rep.caveat == "finite-blocklength, not a capacity claim"
    assert rep.params["scheme"] == "wiretap-weakest"
