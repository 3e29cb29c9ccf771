"""Shared fixtures: small system configs and channel realizations."""

import numpy as np
import pytest

from risim import UpaShape, desk_scale_config, synth_trial


def small_config(**overrides):
    """N=4, G=2, K_g=2, M_g=4: every algorithm path at unit-test cost."""
    return desk_scale_config(
        num_groups=2,
        users_per_group=2,
        bs_shape=UpaShape(2, 2),
        ris_shape=UpaShape(2, 2),
        **overrides,
    )


@pytest.fixture
def cfg():
    return small_config()


@pytest.fixture
def cfg3():
    """Three groups, so loss matrices have rank up to 2."""
    return desk_scale_config(
        num_groups=3,
        users_per_group=2,
        bs_shape=UpaShape(2, 3),
        ris_shape=UpaShape(2, 2),
    )


@pytest.fixture
def channels(cfg):
    return synth_trial(cfg, np.random.default_rng(42))


@pytest.fixture
def channels3(cfg3):
    return synth_trial(cfg3, np.random.default_rng(43))


@pytest.fixture
def rng():
    return np.random.default_rng(7)
