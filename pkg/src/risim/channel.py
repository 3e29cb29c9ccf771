"""Rician channel synthesis from 3D geometry with UPA array responses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import LinkParams, Position3D, SystemConfig, UpaShape

SINGLE_ANTENNA = UpaShape(1, 1)


class GeometryError(ValueError):
    pass


@dataclass
class ChannelSet:
    """All links of one realization.

    direct[g][k] and reflect[g][k] store the row vectors h_d^H (length N)
    and h_r^H (length M_g); bs_ris[g] is the M_g x N matrix H_g.
    """

    direct: list
    reflect: list
    bs_ris: list

    @property
    def num_groups(self) -> int:
        return len(self.bs_ris)

    @property
    def n_antennas(self) -> int:
        return self.bs_ris[0].shape[1]

    def users_per_group(self):
        return [len(d) for d in self.direct]

    def digest(self) -> str:
        """Stable content hash, used to verify paired trials."""
        import hashlib

        h = hashlib.sha256()
        for g in range(self.num_groups):
            h.update(self.bs_ris[g].tobytes())
            for k in range(len(self.direct[g])):
                h.update(self.direct[g][k].tobytes())
                h.update(self.reflect[g][k].tobytes())
        return h.hexdigest()


def upa_response(theta_ver: float, theta_hor: float, shape: UpaShape) -> np.ndarray:
    """Unit-norm UPA steering vector (vertical Kronecker horizontal)."""
    ver = np.exp(1j * np.pi * np.arange(shape.n_ver) * np.sin(theta_ver))
    hor = np.exp(1j * np.pi * np.arange(shape.n_hor) * np.sin(theta_hor) * np.cos(theta_ver))
    return np.kron(ver, hor) / np.sqrt(shape.total)


def los_angles(frm: Position3D, to: Position3D) -> tuple[float, float]:
    """(vertical, horizontal) LoS angles; arrays are parallel to the xz-plane."""
    dx, dy, dz = to.x - frm.x, to.y - frm.y, to.z - frm.z
    dist = np.sqrt(dx * dx + dy * dy + dz * dz)
    if dist == 0.0:
        raise GeometryError("degenerate geometry: coincident positions")
    return float(np.arcsin(dz / dist)), float(np.arctan2(dy, dx))


def path_loss(distance: float, params: LinkParams) -> float:
    """Linear power gain mu0 * (d/d0)^-eta with d0 = 1 m."""
    if distance <= 0.0:
        raise GeometryError("distance must be > 0")
    return params.reference_loss * distance ** (-params.path_loss_exponent)


def synth_link(
    tx_shape: UpaShape,
    rx_shape: UpaShape,
    tx_pos: Position3D,
    rx_pos: Position3D,
    params: LinkParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """One Rician link: an rx_total x tx_total matrix.

    One LoS path plus num_nlos_paths NLoS paths whose angles are drawn
    uniformly within the configured angular spread around the LoS angles,
    independently per path and per endpoint.
    """
    dx = np.array(rx_pos.as_tuple()) - np.array(tx_pos.as_tuple())
    dist = float(np.linalg.norm(dx))
    pl = path_loss(dist, params)
    rx_ver, rx_hor = los_angles(rx_pos, tx_pos)
    tx_ver, tx_hor = los_angles(tx_pos, rx_pos)

    kappa = params.rician_factor
    c = params.num_nlos_paths
    los_gain = 1.0 + 0.0j
    if params.los_phase == "random":
        los_gain = np.exp(2j * np.pi * rng.uniform())
    a_rx = upa_response(rx_ver, rx_hor, rx_shape)
    a_tx = upa_response(tx_ver, tx_hor, tx_shape)
    mat = np.sqrt(kappa) * los_gain * np.outer(a_rx, a_tx.conj())

    half_ver = params.angular_spread_ver / 2.0
    half_hor = params.angular_spread_hor / 2.0
    offsets = rng.uniform(-1.0, 1.0, size=(c, 4))
    gains = (rng.standard_normal(c) + 1j * rng.standard_normal(c)) / np.sqrt(2)
    nlos = np.zeros((rx_shape.total, tx_shape.total), dtype=complex)
    for i in range(c):
        arx = upa_response(rx_ver + half_ver * offsets[i, 0],
                           rx_hor + half_hor * offsets[i, 1], rx_shape)
        atx = upa_response(tx_ver + half_ver * offsets[i, 2],
                           tx_hor + half_hor * offsets[i, 3], tx_shape)
        nlos += gains[i] * np.outer(arx, atx.conj())
    mat += nlos / np.sqrt(c)

    scale = np.sqrt(pl) * np.sqrt(rx_shape.total * tx_shape.total / (1.0 + kappa))
    return scale * mat


def draw_user_positions(center: Position3D, radius: float, count: int,
                        rng: np.random.Generator) -> list:
    """Uniform draw in a disk around the group center, at the center height."""
    r = radius * np.sqrt(rng.uniform(size=count))
    ang = 2 * np.pi * rng.uniform(size=count)
    return [
        Position3D(center.x + r[i] * np.cos(ang[i]),
                   center.y + r[i] * np.sin(ang[i]), center.z)
        for i in range(count)
    ]


def synth_trial(config: SystemConfig, rng: np.random.Generator) -> ChannelSet:
    """Draw user positions and synthesize every link of one trial."""
    geo = config.geometry
    direct, reflect, bs_ris = [], [], []
    for g in range(config.num_groups):
        users = draw_user_positions(geo.group_centers[g], geo.user_radius,
                                    config.users_per_group[g], rng)
        bs_ris.append(synth_link(config.bs_shape, config.ris_shapes[g],
                                 geo.bs, geo.ris_positions[g], config.br, rng))
        d_g, r_g = [], []
        for pos in users:
            d_g.append(synth_link(config.bs_shape, SINGLE_ANTENNA,
                                  geo.bs, pos, config.bu, rng).ravel())
            r_g.append(synth_link(config.ris_shapes[g], SINGLE_ANTENNA,
                                  geo.ris_positions[g], pos, config.ru, rng).ravel())
        direct.append(d_g)
        reflect.append(r_g)
    return ChannelSet(direct, reflect, bs_ris)
