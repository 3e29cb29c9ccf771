"""Configuration values, unit conversions, presets, and validation."""

import dataclasses

import numpy as np
import pytest

from risim import ConfigError, LinkParams, UpaShape, desk_scale_config, geometry_preset
from risim.config import (db_to_linear, dbm_to_watt, default_br_params,
                          default_bu_params, default_ru_params)

from conftest import small_config


def test_unit_conversions():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert dbm_to_watt(30.0) == pytest.approx(1.0)
    assert dbm_to_watt(0.0) == pytest.approx(1e-3)
    assert dbm_to_watt(-114.0) == pytest.approx(10 ** (-14.4))


def test_default_link_parameters():
    bu, ru, br = default_bu_params(), default_ru_params(), default_br_params()
    assert (bu.path_loss_exponent, bu.num_nlos_paths) == (4.5, 8)
    assert (ru.path_loss_exponent, ru.num_nlos_paths) == (2.2, 4)
    assert (br.path_loss_exponent, br.num_nlos_paths) == (2.3, 8)
    assert bu.rician_factor == pytest.approx(db_to_linear(3.0))
    assert ru.rician_factor == pytest.approx(db_to_linear(7.0))
    assert br.rician_factor == pytest.approx(db_to_linear(5.0))
    for p in (bu, ru, br):
        assert p.reference_loss == pytest.approx(1e-3)
        assert p.angular_spread_ver == pytest.approx(np.radians(5.0))
        assert p.angular_spread_hor == pytest.approx(np.radians(8.0))


def test_link_params_validation():
    with pytest.raises(ConfigError):
        LinkParams(-1.0, 1.0, 4)
    with pytest.raises(ConfigError):
        LinkParams(2.0, -0.1, 4)
    with pytest.raises(ConfigError):
        LinkParams(2.0, 1.0, 0)
    with pytest.raises(ConfigError):
        LinkParams(2.0, 1.0, 4, los_phase="maybe")


def test_upa_shape():
    assert UpaShape(2, 8).total == 16
    with pytest.raises(ConfigError):
        UpaShape(0, 4)


def test_geometry_presets_and_truncation():
    g4 = geometry_preset("fig2-like-g4")
    assert g4.num_groups == 4
    assert g4.bs.z == 15.0
    assert all(c.z == 1.0 for c in g4.group_centers)
    assert all(r.z == 5.0 for r in g4.ris_positions)
    assert g4.user_radius == 5.0
    g2 = geometry_preset("fig2-like-g4", num_groups=2)
    assert g2.num_groups == 2
    assert g2.group_centers == g4.group_centers[:2]
    with pytest.raises(ConfigError):
        geometry_preset("nope")
    with pytest.raises(ConfigError):
        geometry_preset("fig9a-like-g3", num_groups=5)


def test_desk_scale_defaults():
    cfg = desk_scale_config()
    assert cfg.n_antennas == 16
    assert cfg.num_groups == 3
    assert cfg.users_per_group == (4, 4, 4)
    assert cfg.ris_elements == (24, 24, 24)
    assert cfg.total_power == pytest.approx(1.0)  # 30 dBm
    assert cfg.noise_power == pytest.approx(dbm_to_watt(-114.0))
    assert cfg.bd_feasible()
    cfg.validate()


def test_validation_catches_inconsistencies():
    cfg = small_config()
    with pytest.raises(ConfigError):
        dataclasses.replace(cfg, total_power=0.0).validate()
    with pytest.raises(ConfigError):
        dataclasses.replace(cfg, users_per_group=(2,)).validate()
    with pytest.raises(ConfigError):
        dataclasses.replace(cfg, eps_rate=0.0).validate()
    with pytest.raises(ConfigError):
        dataclasses.replace(cfg, max_bd_iters=0).validate()


def test_bd_feasibility_rule():
    # N=4, G=2, K_g=2: complement rank 2 < 4, feasible
    assert small_config().bd_feasible()
    # N=4, K=8, complement rank 6 >= 4: infeasible
    cfg = desk_scale_config(num_groups=2, users_per_group=4,
                            bs_shape=UpaShape(2, 2), ris_shape=UpaShape(2, 2))
    assert not cfg.bd_feasible()
