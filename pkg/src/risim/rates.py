"""Shared rate mathematics and the beamformer/phase value types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNIT_MODULUS_TOL = 1e-12


class DimensionError(ValueError):
    pass


def validate_phases(phases: np.ndarray, tol: float = UNIT_MODULUS_TOL) -> np.ndarray:
    """Check |phi(m)| = 1 for every reflection coefficient."""
    dev = np.max(np.abs(np.abs(phases) - 1.0))
    if dev > tol:
        raise ValueError(f"reflection coefficients not unit modulus (max dev {dev:.2e})")
    return phases


def ones_phases(config) -> list:
    """All-zero phase shifts, the default initialization."""
    return [np.ones(m, dtype=complex) for m in config.ris_elements]


def random_phases(config, rng: np.random.Generator) -> list:
    """Uniform random phase shifts in [0, 2pi), the baseline setting."""
    return [np.exp(2j * np.pi * rng.uniform(size=m)) for m in config.ris_elements]


@dataclass
class BeamformerMatrix:
    """N x G precoder; column g carries power power_allocation[g]."""

    matrix: np.ndarray
    power_allocation: np.ndarray

    @property
    def num_groups(self) -> int:
        return self.matrix.shape[1]

    def column(self, g: int) -> np.ndarray:
        return self.matrix[:, g]

    def total_power(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def check_power(self, budget: float, rel_tol: float = 1e-9) -> None:
        used = self.total_power()
        if used > budget * (1.0 + rel_tol):
            raise ValueError(f"power constraint violated: {used} > {budget}")


def equal_power_allocation(total_power: float, num_groups: int) -> np.ndarray:
    return np.full(num_groups, total_power / num_groups)


def effective_channel(direct: np.ndarray, reflect: np.ndarray,
                      phases: np.ndarray, bs_ris: np.ndarray) -> np.ndarray:
    """Total downlink row vector h^H = h_d^H + h_r^H diag(phi) H."""
    if reflect.shape[0] != phases.shape[0] or bs_ris.shape != (reflect.shape[0], direct.shape[0]):
        raise DimensionError(
            f"dimension mismatch: direct {direct.shape}, reflect {reflect.shape}, "
            f"phases {phases.shape}, bs_ris {bs_ris.shape}"
        )
    return direct + (reflect * phases) @ bs_ris


def all_effective_channels(channels, phases: list) -> list:
    """Per group, the K_g x N matrix of effective user rows."""
    out = []
    for g in range(channels.num_groups):
        rows = [
            effective_channel(channels.direct[g][k], channels.reflect[g][k],
                              phases[g], channels.bs_ris[g])
            for k in range(len(channels.direct[g]))
        ]
        out.append(np.array(rows))
    return out


def user_rate(channels, phases: list, beamformer: BeamformerMatrix,
              g: int, k: int, noise_power: float) -> float:
    """log2(1 + SINR) of user k in group g, in bits/s/Hz."""
    h = effective_channel(channels.direct[g][k], channels.reflect[g][k],
                          phases[g], channels.bs_ris[g])
    gains = np.abs(h @ beamformer.matrix) ** 2
    signal = gains[g]
    interference = gains.sum() - signal
    return float(np.log2(1.0 + signal / (interference + noise_power)))


def min_rates(channels, phases: list, beamformer: BeamformerMatrix,
              noise_power: float) -> np.ndarray:
    """Per-group minimum user rate (the multicast group rate)."""
    eff = all_effective_channels(channels, phases)
    out = np.empty(channels.num_groups)
    for g in range(channels.num_groups):
        gains = np.abs(eff[g] @ beamformer.matrix) ** 2  # (K_g, G)
        signal = gains[:, g]
        interference = gains.sum(axis=1) - signal
        out[g] = np.min(np.log2(1.0 + signal / (interference + noise_power)))
    return out


def sum_rate(channels, phases: list, beamformer: BeamformerMatrix,
             noise_power: float) -> float:
    """Sum over groups of the minimum user rate."""
    return float(np.sum(min_rates(channels, phases, beamformer, noise_power)))
