import numpy as np
import pytest

from secbc import BroadcastSpec, bsc, identity_channel


@pytest.fixture
def middle_spec():
    # X - Y1 - Z - Y2 with Y1 perfect, Z = BSC(0.1), Y2 = BSC(0.2)
    return BroadcastSpec(ch_y1=identity_channel(2), ch_y2=bsc(0.2), ch_z=bsc(0.1))


@pytest.fixture
def weakest_spec():
    # X - Yi - Z with Y1 = Y2 = BSC(0.1), Z = BSC(0.2)
    return BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.1), ch_z=bsc(0.2))


@pytest.fixture
def reversely_degraded_spec():
    # X - Z - Y1 - Y2 with Z perfect, Y1 = BSC(0.1), Y2 = BSC(0.2)
    return BroadcastSpec(ch_y1=bsc(0.1), ch_y2=bsc(0.2), ch_z=identity_channel(2))


def random_distribution(rng, n):
    return rng.dirichlet(np.ones(n))


def random_channel(rng, n_in, n_out):
    return rng.dirichlet(np.ones(n_out), size=n_in)
