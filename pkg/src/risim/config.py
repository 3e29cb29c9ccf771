"""System configuration: geometry, array shapes, link parameters, powers.

All dB/dBm quantities are converted to linear scale when a config object is
built; everything downstream works in watts and linear gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .sdr import SdrSettings

BS_HEIGHT = 15.0
RIS_HEIGHT = 5.0
USER_HEIGHT = 1.0


class ConfigError(ValueError):
    """Raised when a configuration violates a system invariant."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def as_tuple(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class UpaShape:
    """Uniform planar array shape, n_ver x n_hor elements."""

    n_ver: int
    n_hor: int

    @property
    def total(self) -> int:
        return self.n_ver * self.n_hor

    def __post_init__(self):
        if self.n_ver < 1 or self.n_hor < 1:
            raise ConfigError("UPA shape dimensions must be positive")


@dataclass(frozen=True)
class LinkParams:
    """Rician fading parameters of one link class.

    rician_factor and reference_loss are linear-scale values.
    """

    path_loss_exponent: float
    rician_factor: float
    num_nlos_paths: int
    reference_loss: float = 1e-3  # -30 dB at d0 = 1 m
    angular_spread_ver: float = math.radians(5.0)
    angular_spread_hor: float = math.radians(8.0)
    los_phase: str = "random"  # "random" -> unit-modulus random LoS gain; "zero" -> gain 1

    def __post_init__(self):
        if self.path_loss_exponent <= 0:
            raise ConfigError("path loss exponent must be > 0")
        if self.rician_factor < 0:
            raise ConfigError("Rician factor must be >= 0")
        if self.num_nlos_paths < 1:
            raise ConfigError("need at least one NLoS path")
        if self.reference_loss <= 0:
            raise ConfigError("reference loss must be > 0")
        if self.los_phase not in ("random", "zero"):
            raise ConfigError("los_phase must be 'random' or 'zero'")


def default_bu_params() -> LinkParams:
    return LinkParams(4.5, db_to_linear(3.0), 8)


def default_ru_params() -> LinkParams:
    return LinkParams(2.2, db_to_linear(7.0), 4)


def default_br_params() -> LinkParams:
    return LinkParams(2.3, db_to_linear(5.0), 8)


@dataclass(frozen=True)
class Geometry:
    """BS, group-center, and RIS positions plus the user drop radius."""

    bs: Position3D
    group_centers: tuple
    ris_positions: tuple
    user_radius: float = 5.0

    @property
    def num_groups(self) -> int:
        return len(self.group_centers)

    def truncated(self, g: int) -> "Geometry":
        """Keep only the first g groups."""
        if g > self.num_groups:
            raise ConfigError(
                f"geometry preset has {self.num_groups} groups, {g} requested"
            )
        return replace(
            self,
            group_centers=self.group_centers[:g],
            ris_positions=self.ris_positions[:g],
        )


def _ring_geometry(distances, angles_deg, ris_offset=10.0) -> Geometry:
    centers = []
    riss = []
    for d, a in zip(distances, angles_deg):
        a = math.radians(a)
        ux, uy = math.cos(a), math.sin(a)
        centers.append(Position3D(d * ux, d * uy, USER_HEIGHT))
        # RIS sits past the group center, away from the BS, at RIS height.
        riss.append(Position3D((d + ris_offset) * ux, (d + ris_offset) * uy, RIS_HEIGHT))
    return Geometry(
        bs=Position3D(0.0, 0.0, BS_HEIGHT),
        group_centers=tuple(centers),
        ris_positions=tuple(riss),
    )


# Approximations of the figure layouts; coordinates are assumptions, not
# ground truth (only heights, user radius, and the 60-100 m scale are given).
GEOMETRY_PRESETS = {
    "fig2-like-g4": _ring_geometry([70.0, 80.0, 90.0, 100.0], [15.0, 105.0, 195.0, 285.0]),
    "fig9a-like-g3": _ring_geometry([65.0, 85.0, 95.0], [-30.0, 45.0, 150.0]),
}


def geometry_preset(name: str, num_groups: int | None = None) -> Geometry:
    try:
        geo = GEOMETRY_PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown geometry preset {name!r}; available: {sorted(GEOMETRY_PRESETS)}"
        ) from None
    if num_groups is not None:
        geo = geo.truncated(num_groups)
    return geo


@dataclass(frozen=True)
class SystemConfig:
    """Full definition of one simulated system."""

    bs_shape: UpaShape
    ris_shapes: tuple
    users_per_group: tuple
    total_power: float  # watts
    noise_power: float  # watts, common to all users
    geometry: Geometry
    bu: LinkParams = field(default_factory=default_bu_params)
    ru: LinkParams = field(default_factory=default_ru_params)
    br: LinkParams = field(default_factory=default_br_params)
    eps_rate: float = 1e-2
    eps_norm: float = 1e-3
    max_bd_iters: int = 10  # I1
    max_zf_iters: int = 10  # I2
    sdr: SdrSettings = field(default_factory=SdrSettings)

    @property
    def n_antennas(self) -> int:
        return self.bs_shape.total

    @property
    def num_groups(self) -> int:
        return len(self.users_per_group)

    @property
    def ris_elements(self) -> tuple:
        return tuple(s.total for s in self.ris_shapes)

    @property
    def num_users(self) -> int:
        return sum(self.users_per_group)

    def validate(self) -> None:
        g = self.num_groups
        if g < 1:
            raise ConfigError("need at least one group")
        if len(self.ris_shapes) != g:
            raise ConfigError("one RIS shape per group required")
        if self.geometry.num_groups != g:
            raise ConfigError(
                f"geometry has {self.geometry.num_groups} groups, config has {g}"
            )
        if any(k < 1 for k in self.users_per_group):
            raise ConfigError("every group needs at least one user")
        if self.n_antennas < g:
            raise ConfigError(
                f"N >= G required for MTZF feasibility (N={self.n_antennas}, G={g})"
            )
        if self.total_power <= 0:
            raise ConfigError("total power must be > 0")
        if self.noise_power <= 0:
            raise ConfigError("noise power must be > 0")
        if self.eps_rate <= 0 or self.eps_norm <= 0:
            raise ConfigError("convergence thresholds must be > 0")
        if self.max_bd_iters < 1 or self.max_zf_iters < 1:
            raise ConfigError("iteration caps must be >= 1")

    def bd_feasible(self) -> bool:
        """BD needs a nonempty null space for every group's complement."""
        k = self.num_users
        return all(self.n_antennas > k - kg for kg in self.users_per_group)


def desk_scale_config(
    power_dbm: float = 30.0,
    num_groups: int = 3,
    users_per_group: int = 4,
    bs_shape: UpaShape = UpaShape(2, 8),
    ris_shape: UpaShape = UpaShape(8, 3),
    preset: str = "fig2-like-g4",
    **overrides,
) -> SystemConfig:
    """The default evaluation scale: N=16, G=3, K_g=4, M_g=24."""
    cfg = SystemConfig(
        bs_shape=bs_shape,
        ris_shapes=tuple([ris_shape] * num_groups),
        users_per_group=tuple([users_per_group] * num_groups),
        total_power=dbm_to_watt(power_dbm),
        noise_power=dbm_to_watt(-114.0),
        geometry=geometry_preset(preset, num_groups),
        **overrides,
    )
    cfg.validate()
    return cfg
