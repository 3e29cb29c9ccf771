"""Block-diagonalization beamforming and its alternating design loop."""

import dataclasses

import numpy as np
import pytest

from risim import BdMinRateDesign, algorithm1, bd_beamformer, null_space, sum_rate
from risim.bd import BdInfeasibleError, group_channel_stacks
from risim.rates import (all_effective_channels, equal_power_allocation,
                         ones_phases, random_phases)

from conftest import small_config


def test_null_space_annihilates_and_is_orthonormal(rng):
    others = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    ns = null_space(others)
    assert ns.rank == 3
    assert ns.basis.shape == (6, 3)
    assert np.max(np.abs(others @ ns.basis)) < 1e-12 * np.linalg.norm(others)
    gram = ns.basis.conj().T @ ns.basis
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-12)


def test_null_space_counts_rank_not_rows(rng):
    row = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    stacked = np.array([row, 2 * row, 3j * row])  # rank one
    ns = null_space(stacked)
    assert ns.rank == 1
    assert ns.basis.shape == (5, 4)


def test_null_space_empty_complement_is_identity():
    ns = null_space(np.zeros((0, 4), dtype=complex))
    np.testing.assert_array_equal(ns.basis, np.eye(4))
    assert ns.rank == 0


def test_null_space_infeasible(rng):
    others = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    with pytest.raises(BdInfeasibleError):
        null_space(others)


def test_bd_beamformer_nulls_other_groups(cfg, rng):
    from risim import synth_trial

    power = equal_power_allocation(cfg.total_power, cfg.num_groups)
    for trial in range(10):
        ch = synth_trial(cfg, np.random.default_rng(100 + trial))
        phases = random_phases(cfg, rng)
        bf = bd_beamformer(ch, phases, power)
        eff = all_effective_channels(ch, phases)
        for g in range(cfg.num_groups):
            f_g = bf.column(g)
            for gp in range(cfg.num_groups):
                if gp == g:
                    continue
                for k in range(cfg.users_per_group[gp]):
                    h = eff[gp][k]
                    leak = abs(h @ f_g) / (np.linalg.norm(h) * np.linalg.norm(f_g))
                    assert leak < 1e-10


def test_bd_beamformer_power_and_dominant_direction(cfg, channels, rng):
    power = equal_power_allocation(cfg.total_power, cfg.num_groups)
    phases = ones_phases(cfg)
    bf = bd_beamformer(channels, phases, power)
    np.testing.assert_allclose(np.linalg.norm(bf.matrix, axis=0) ** 2, power,
                               rtol=1e-12)
    # within the null-space basis, the chosen direction maximizes ||H_own f||
    stacks = group_channel_stacks(channels, phases)
    for g in range(cfg.num_groups):
        basis = null_space(stacks[g].others).basis
        f_g = bf.column(g)
        achieved = np.linalg.norm(stacks[g].own @ f_g)
        for _ in range(50):
            m = rng.standard_normal(basis.shape[1]) \
                + 1j * rng.standard_normal(basis.shape[1])
            alt = basis @ (m / np.linalg.norm(m)) * np.sqrt(power[g])
            assert np.linalg.norm(stacks[g].own @ alt) <= achieved * (1 + 1e-9)


def test_bd_infeasible_config_raises(rng):
    from risim import UpaShape, desk_scale_config, synth_trial

    cfg = desk_scale_config(num_groups=2, users_per_group=4,
                            bs_shape=UpaShape(2, 2), ris_shape=UpaShape(2, 2))
    ch = synth_trial(cfg, np.random.default_rng(0))
    with pytest.raises(BdInfeasibleError):
        bd_beamformer(ch, ones_phases(cfg), equal_power_allocation(1.0, 2))


def test_algorithm1_eps_inf_one_iteration(cfg, channels):
    cfg_inf = dataclasses.replace(cfg, eps_rate=np.inf)
    _, _, trace = algorithm1(cfg_inf, channels, rng=np.random.default_rng(1))
    assert trace.iterations == 1
    assert trace.converged
    assert len(trace.sum_rates) == 1


def test_algorithm1_trace_and_final_rate(cfg, channels):
    bf, phases, trace = algorithm1(cfg, channels, rng=np.random.default_rng(2))
    assert len(trace.sum_rates) == trace.iterations
    final = sum_rate(channels, phases, bf, cfg.noise_power)
    assert final >= trace.sum_rates[0] - cfg.eps_rate
    bf.check_power(cfg.total_power, rel_tol=1e-9)
    for g in range(cfg.num_groups):
        np.testing.assert_allclose(np.abs(phases[g]), 1.0, atol=1e-12)


def test_algorithm1_improves_on_unoptimized_phases(cfg, channels):
    power = equal_power_allocation(cfg.total_power, cfg.num_groups)
    baseline = sum_rate(channels, ones_phases(cfg),
                        bd_beamformer(channels, ones_phases(cfg), power),
                        cfg.noise_power)
    bf, phases, _ = algorithm1(cfg, channels, rng=np.random.default_rng(3))
    assert sum_rate(channels, phases, bf, cfg.noise_power) >= baseline


def test_estimator_wrapper(cfg, channels):
    est = BdMinRateDesign(cfg, rng=np.random.default_rng(4))
    params = est.get_params()
    assert set(params) == {"config", "rng"}
    est.fit(channels)
    rates = est.predict(channels)
    assert rates.shape == (cfg.num_groups,)
    assert np.all(rates > 0)
    assert est.n_iter_ == est.trace_.iterations
