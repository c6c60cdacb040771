""" pytest fixtures for test suite """
import numpy as np
import pytest

import coexist_ia as coexist
from . import shared


@pytest.fixture()
def rng():
    """Fresh, explicitly seeded generator -- per test"""
    return np.random.default_rng(20240611)


@pytest.fixture()
def default_scenario():
    """Three single-stream communication users and a three-stream radar on eight subcarriers"""
    return shared.scenario(8, [('comm0', 1, coexist.Membership.CLEAR),
                               ('comm1', 1, coexist.Membership.RADAR_INTERFERED),
                               ('comm2', 1, coexist.Membership.RADAR_INTERFERED),
                               ('radar', 3, coexist.Membership.RADAR)])


@pytest.fixture()
def two_user_scenario():
    return shared.scenario(8, [('comm0', 1, coexist.Membership.RADAR_INTERFERED),
                               ('radar', 3, coexist.Membership.RADAR)])


@pytest.fixture()
def tiny_config():
    """Small enough for every harness command to finish quickly"""
    return coexist.ScenarioConfig(
        snr_db=[0.0, 20.0],
        trials=2,
        solver={'max_iters': 40},
        detector={'pfa_target': 0.1, 'pulses_k': 4, 'h0_calibration_trials': 600,
                  'h1_trials': 200, 'channel_draws': 2},
        pfa_grid=[0.01, 0.1, 1.0],
        pd_delta_pfas=[0.1, 1e-6],
        pulses_k_values=[1, 4],
        user_counts=[2, 3],
        master_seed=7,
    )
