import numpy as np
import pytest

from secbc import (
    BroadcastSpec,
    Channel,
    RegimeTag,
    ValidationError,
    bsc,
    check_degraded,
    check_less_noisy,
    classify,
    compose,
    identity_channel,
    is_deterministic,
    joint_from,
    mutual_information,
)
from secbc.channels import (
    DEGRADED_TOL,
    middle_chain_witnesses,
    weakest_chain_witnesses,
)
from secbc.probcore import JointDistribution


def residual(strong, kernel, weak):
    return float(np.max(np.abs(compose(strong, kernel).matrix - weak.matrix)))


def test_check_degraded_identity_case():
    ch = bsc(0.1)
    kernel = check_degraded(ch, ch)
    assert kernel is not None
    assert np.allclose(kernel.matrix, np.eye(2), atol=1e-9)
    assert residual(ch, kernel, ch) <= DEGRADED_TOL


def test_check_degraded_bsc_pair():
    kernel = check_degraded(bsc(0.1), bsc(0.2))
    assert kernel is not None
    assert np.max(np.abs(kernel.matrix - bsc(0.125).matrix)) <= 1e-9
    assert residual(bsc(0.1), kernel, bsc(0.2)) <= DEGRADED_TOL

    assert check_degraded(bsc(0.2), bsc(0.1)) is None


def test_check_degraded_reversed_infeasible_by_brute_force():
    # The best kernel for BSC(0.2) -> BSC(0.1) stays far from feasibility:
    # sweep all 2x2 kernels on a fine grid and lower-bound the residual.
    strong, weak = bsc(0.2), bsc(0.1)
    best = np.inf
    grid = np.linspace(0.0, 1.0, 101)
    for a in grid:
        for b in grid:
            kernel = np.array([[1 - a, a], [b, 1 - b]])
            res = np.max(np.abs(strong.matrix @ kernel - weak.matrix))
            best = min(best, float(res))
    assert best > 0.05


def test_check_degraded_dimension_mismatch():
    with pytest.raises(ValidationError):
        check_degraded(bsc(0.1), Channel(np.full((3, 2), 0.5)))


def test_check_degraded_random_constructions():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n_in, n_mid, n_out = 2, int(rng.integers(2, 4)), int(rng.integers(2, 4))
        strong = Channel(rng.dirichlet(np.ones(n_mid), size=n_in))
        kernel_true = Channel(rng.dirichlet(np.ones(n_out), size=n_mid))
        weak = compose(strong, kernel_true)
        found = check_degraded(strong, weak)
        assert found is not None
        assert residual(strong, found, weak) <= DEGRADED_TOL


def test_less_noisy_degraded_implies_holds():
    assert check_less_noisy(bsc(0.1), bsc(0.2)).holds
    assert check_less_noisy(bsc(0.3), bsc(0.3)).holds


def test_less_noisy_violation_with_witness():
    verdict = check_less_noisy(bsc(0.2), bsc(0.1), resolution=32)
    assert verdict.status == "violated"
    # the witness joint must actually reverse the information ordering
    joint = verdict.witness
    assert joint is not None and joint.axes == ("u", "x")
    t = joint.table
    j_better = JointDistribution(np.einsum("ux,xo->uo", t, bsc(0.2).matrix), ("u", "y"))
    j_worse = JointDistribution(np.einsum("ux,xo->uo", t, bsc(0.1).matrix), ("u", "y"))
    assert mutual_information(j_worse) > mutual_information(j_better) + 1e-6


def test_less_noisy_spec_witness_is_uniform_input_copy():
    # the canonical violation: U = X, P_X uniform, comparing the two BSCs
    table = np.array([[0.5, 0.0], [0.0, 0.5]])
    j_worse = JointDistribution(np.einsum("ux,xo->uo", table, bsc(0.1).matrix), ("u", "y"))
    j_better = JointDistribution(np.einsum("ux,xo->uo", table, bsc(0.2).matrix), ("u", "y"))
    assert mutual_information(j_worse) == pytest.approx(0.5310044064107188, abs=1e-12)
    assert mutual_information(j_better) == pytest.approx(0.2780719051126377, abs=1e-12)


def test_is_deterministic():
    assert is_deterministic(identity_channel(3))
    assert not is_deterministic(bsc(0.1))
    assert is_deterministic(Channel(np.array([[1.0, 0.0], [1.0, 0.0]])))


def test_classify_equal_outputs():
    spec = BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.1), ch_z=bsc(0.1))
    regime = classify(spec)
    assert regime.tag == RegimeTag.EQUAL_OUTPUTS
    assert regime.witnesses == {}


def test_classify_reversely_degraded_chain(reversely_degraded_spec):
    regime = classify(reversely_degraded_spec)
    assert regime.tag == RegimeTag.REVERSELY_DEGRADED_CHAIN
    assert np.max(np.abs(regime.witnesses["z_to_y1"].matrix - bsc(0.1).matrix)) <= 1e-9
    assert np.max(np.abs(regime.witnesses["y1_to_y2"].matrix - bsc(0.125).matrix)) <= 1e-9


def test_classify_middle(middle_spec):
    regime = classify(middle_spec)
    assert regime.tag == RegimeTag.EAVESDROPPER_IN_MIDDLE
    assert set(regime.witnesses) == {"y1_to_z", "z_to_y2"}


def test_classify_weakest(weakest_spec):
    regime = classify(weakest_spec)
    assert regime.tag == RegimeTag.WEAKEST_EAVESDROPPER_DEGRADED
    assert set(regime.witnesses) == {"y1_to_z", "y2_to_z"}


def test_classify_deterministic_reversely():
    y1 = Channel(np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=float))
    y2 = Channel(np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=float))
    spec = BroadcastSpec(ch_y1=y1, ch_y2=y2, ch_z=identity_channel(4))
    assert classify(spec).tag == RegimeTag.DETERMINISTIC_REVERSELY


def test_classify_general():
    # Z-channel versus reverse Z-channel: neither direction is degraded or
    # less noisy, and no chain through Z exists either.
    zchan = Channel(np.array([[1.0, 0.0], [0.5, 0.5]]))
    rev = Channel(np.array([[0.5, 0.5], [0.0, 1.0]]))
    spec = BroadcastSpec(ch_y1=zchan, ch_y2=bsc(0.05), ch_z=rev)
    assert classify(spec).tag == RegimeTag.GENERAL


def test_classify_deterministic_by_rebuild(weakest_spec):
    a = classify(weakest_spec)
    b = classify(
        BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.1), ch_z=bsc(0.2))
    )
    assert a.tag == b.tag
    assert set(a.witnesses) == set(b.witnesses)
    for key in a.witnesses:
        assert np.array_equal(a.witnesses[key].matrix, b.witnesses[key].matrix)


def test_degraded_implies_less_noisy_on_ladder():
    rng = np.random.default_rng(9)
    for _ in range(8):
        p = float(rng.uniform(0.02, 0.3))
        q = float(rng.uniform(p, 0.45))
        if check_degraded(bsc(p), bsc(q)) is not None:
            assert check_less_noisy(bsc(p), bsc(q), resolution=24).holds


def test_chain_helpers(middle_spec, weakest_spec):
    assert middle_chain_witnesses(middle_spec) is not None
    assert weakest_chain_witnesses(middle_spec) is None
    assert weakest_chain_witnesses(weakest_spec) is not None
    # a boundary spec satisfies both the weakest and the middle chains
    boundary = BroadcastSpec(ch_y1=bsc(0.05), ch_y2=bsc(0.2), ch_z=bsc(0.2))
    assert weakest_chain_witnesses(boundary) is not None
    assert middle_chain_witnesses(boundary) is not None


def test_broadcast_spec_validation():
    with pytest.raises(ValidationError):
        BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.2), ch_z=Channel(np.full((3, 2), 0.5)))
    with pytest.raises(ValidationError):
        BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.2), ch_z=bsc(0.3), x_names=("a",))
