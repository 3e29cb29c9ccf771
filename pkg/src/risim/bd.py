"""Block-diagonalization beamforming and its alternating phase-design loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._estimator import ParamsMixin
from .rates import (BeamformerMatrix, all_effective_channels,
                    equal_power_allocation, ones_phases, sum_rate)
from .sdr import extract_phases, gaussian_randomization, lift, solve_sdr_maxmin

RANK_TOL = 1e-10


class BdInfeasibleError(RuntimeError):
    pass


@dataclass
class GroupChannelStack:
    own: np.ndarray     # K_g x N effective rows of the group
    others: np.ndarray  # (K - K_g) x N rows of everyone else


@dataclass
class NullSpaceBasis:
    basis: np.ndarray  # N x (N - rank)
    rank: int


@dataclass
class AlgorithmTrace:
    sum_rates: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def group_channel_stacks(channels, phases: list) -> list:
    eff = all_effective_channels(channels, phases)
    n = channels.n_antennas
    stacks = []
    for g in range(channels.num_groups):
        others = [eff[gp] for gp in range(channels.num_groups) if gp != g]
        others = np.vstack(others) if others else np.zeros((0, n), dtype=complex)
        stacks.append(GroupChannelStack(own=eff[g], others=others))
    return stacks


def null_space(others: np.ndarray, rank_tol: float = RANK_TOL) -> NullSpaceBasis:
    """Orthonormal basis of the null space of the complement channel stack."""
    n = others.shape[1]
    if others.shape[0] == 0:
        return NullSpaceBasis(basis=np.eye(n, dtype=complex), rank=0)
    _, s, vh = np.linalg.svd(others)
    rank = int(np.sum(s > rank_tol * s[0]))
    if rank >= n:
        raise BdInfeasibleError("BD infeasible: N <= rank of complement channels")
    return NullSpaceBasis(basis=vh[rank:].conj().T, rank=rank)


def bd_beamformer(channels, phases: list, power_alloc: np.ndarray) -> BeamformerMatrix:
    """Null-space projected eigenbeamformer, one column per group."""
    stacks = group_channel_stacks(channels, phases)
    n = channels.n_antennas
    cols = np.empty((n, channels.num_groups), dtype=complex)
    for g, stack in enumerate(stacks):
        ns = null_space(stack.others)
        h_eq = stack.own @ ns.basis
        # dominant right singular vector of H_eq == max eigenvector of H_eq^H H_eq
        _, _, vh = np.linalg.svd(h_eq)
        m_eq = vh[0].conj()
        cols[:, g] = ns.basis @ m_eq * np.sqrt(power_alloc[g])
    return BeamformerMatrix(cols, np.asarray(power_alloc, dtype=float))


def algorithm1(config, channels, initial_phases: list | None = None,
               rng: np.random.Generator | None = None):
    """Alternate BD beamforming with per-group max-min SDR phase updates.

    Returns (beamformer, phases, trace). Stops when the sum-rate change
    falls below eps_rate or the iteration cap is hit; a final beamformer
    update is always performed with the final phases.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    phases = [p.copy() for p in (initial_phases or ones_phases(config))]
    power = equal_power_allocation(config.total_power, config.num_groups)
    noise = config.noise_power
    trace = AlgorithmTrace()
    r_tmp = 0.0
    beamformer = None
    for i1 in range(1, config.max_bd_iters + 1):
        beamformer = bd_beamformer(channels, phases, power)
        for g in range(config.num_groups):
            problem = lift(channels, phases, beamformer.column(g), g, noise)
            warm = np.concatenate([phases[g], [1.0]])
            solution = solve_sdr_maxmin(problem, config.sdr, initial_phases=warm)
            phibar, _ = gaussian_randomization(
                solution, problem, config.sdr.n_rand, rng, initial_phibar=warm
            )
            phases[g] = extract_phases(phibar)
        r_sum = sum_rate(channels, phases, beamformer, noise)
        trace.sum_rates.append(r_sum)
        trace.iterations = i1
        if abs(r_sum - r_tmp) < config.eps_rate:
            trace.converged = True
            break
        r_tmp = r_sum
    beamformer = bd_beamformer(channels, phases, power)
    return beamformer, phases, trace


class BdMinRateDesign(ParamsMixin):
    """Estimator-style wrapper around the BD + max-min RIS design loop."""

    def __init__(self, config, rng=None):
        self.config = config
        self.rng = rng

    def fit(self, channels, initial_phases=None):
        rng = self.rng if self.rng is not None else np.random.default_rng(0)
        beamformer, phases, trace = algorithm1(self.config, channels,
                                               initial_phases, rng)
        self.beamformer_ = beamformer
        self.phases_ = phases
        self.trace_ = trace
        self.n_iter_ = trace.iterations
        return self

    def predict(self, channels):
        """Per-group minimum rates under the fitted design."""
        from .rates import min_rates

        return min_rates(channels, self.phases_, self.beamformer_,
                         self.config.noise_power)
