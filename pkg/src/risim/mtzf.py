"""Multicasting-tailored zero-forcing with closed-form loss-minimizing phases.

Representative channels (RCs) are arithmetic means of each group's effective
user rows. The transmit beamformer is the exact pseudo-inverse of the RC
matrix; the Neumann-series form exists to expose the loss term that the
phase design minimizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._estimator import ParamsMixin
from .rates import (BeamformerMatrix, all_effective_channels,
                    equal_power_allocation, ones_phases)

CONDITION_LIMIT = 1e12
EIG_TOL_SCALE = 1e-8


class MtzfError(RuntimeError):
    pass


@dataclass
class RepresentativeChannels:
    """Rows h~^H per group, plus the direct/reflect components of the mean."""

    rc: list          # [G] arrays length N
    rc_direct: list   # [G] arrays length N
    rc_reflect: list  # [G] arrays length M_g

    @property
    def num_groups(self) -> int:
        return len(self.rc)

    def matrix(self) -> np.ndarray:
        """H~ = [h~_1, ..., h~_G], N x G (columns are the RC column vectors)."""
        return np.array(self.rc).conj().T


@dataclass
class LossMatrix:
    matrix: np.ndarray        # N x N Hermitian PSD
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # columns, matching order


def representative_channels(channels, phases: list) -> RepresentativeChannels:
    eff = all_effective_channels(channels, phases)
    rc = [eff[g].mean(axis=0) for g in range(channels.num_groups)]
    rc_direct = [np.mean(channels.direct[g], axis=0) for g in range(channels.num_groups)]
    rc_reflect = [np.mean(channels.reflect[g], axis=0) for g in range(channels.num_groups)]
    return RepresentativeChannels(rc, rc_direct, rc_reflect)


def _normalize_and_scale(directions: np.ndarray, power_alloc) -> BeamformerMatrix:
    # unit-norm columns, then sqrt(p_g), so the power budget binds exactly
    norms = np.linalg.norm(directions, axis=0)
    if np.any(norms == 0):
        raise MtzfError("zero beamforming direction")
    cols = directions / norms * np.sqrt(np.asarray(power_alloc))
    return BeamformerMatrix(cols, np.asarray(power_alloc, dtype=float))


def mtzf_beamformer(rcs: RepresentativeChannels, power_alloc) -> BeamformerMatrix:
    """Exact pseudo-inverse beamformer on the RC matrix."""
    h = rcs.matrix()
    gram = h.conj().T @ h
    if np.linalg.cond(gram) > CONDITION_LIMIT:
        raise MtzfError("RCs linearly dependent: Gram matrix is singular")
    directions = h @ np.linalg.inv(gram)
    return _normalize_and_scale(directions, power_alloc)


def ns_beamformer(rcs: RepresentativeChannels, power_alloc) -> BeamformerMatrix:
    """First-order diagonal Neumann-series approximation (analysis grade)."""
    h = rcs.matrix()
    g_count = h.shape[1]
    norms2 = np.linalg.norm(h, axis=0) ** 2
    if np.any(norms2 == 0):
        raise MtzfError("RCs linearly dependent: zero representative channel")
    directions = np.empty_like(h)
    for g in range(g_count):
        vec = h[:, g] / norms2[g]
        for gp in range(g_count):
            if gp == g:
                continue
            vec = vec - h[:, gp] * (h[:, gp].conj() @ h[:, g]) / (norms2[gp] * norms2[g])
        directions[:, g] = vec
    return _normalize_and_scale(directions, power_alloc)


def loss_matrix(rcs: RepresentativeChannels, g: int) -> LossMatrix:
    """Sum of unit-norm outer products of the other groups' RCs."""
    n = rcs.rc[0].shape[0]
    a = np.zeros((n, n), dtype=complex)
    for gp in range(rcs.num_groups):
        if gp == g:
            continue
        col = rcs.rc[gp].conj()  # h~_{g'} as a column vector
        u = col / np.linalg.norm(col)
        a += np.outer(u, u.conj())
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return LossMatrix(a, w, v)


def loss_value(channels, rcs: RepresentativeChannels, beamformer: BeamformerMatrix,
               g: int, phases: list | None = None) -> complex:
    """Group g's intended-signal loss, sqrt(p_g) K_g h~^H A h~ / ||h~||^2.

    Cross-checked against the per-user sum it reformulates; the two must
    agree to 1e-9 relative.
    """
    k_g = len(channels.direct[g])
    col = rcs.rc[g].conj()
    norm2 = float(np.linalg.norm(col) ** 2)
    a = loss_matrix(rcs, g).matrix
    p_g = beamformer.power_allocation[g]
    rc_form = np.sqrt(p_g) * k_g * (col.conj() @ a @ col) / norm2

    if phases is not None:
        # per-user sum of h_{g_k}^H (interference-nulling part of the NS beam)
        eff = all_effective_channels(channels, phases)[g]
        h = rcs.matrix()
        norms2 = np.linalg.norm(h, axis=0) ** 2
        null_part = np.zeros(h.shape[0], dtype=complex)
        for gp in range(rcs.num_groups):
            if gp == g:
                continue
            null_part += h[:, gp] * (h[:, gp].conj() @ h[:, g]) / (norms2[gp] * norms2[g])
        user_form = np.sqrt(p_g) * np.sum(eff @ null_part)
        scale = max(abs(rc_form), abs(user_form), 1e-300)
        if abs(user_form - rc_form) / scale > 1e-9:
            raise MtzfError(
                f"loss identity violated: per-user {user_form}, RC form {rc_form}"
            )
    return complex(rc_form)


def pair_criterion(v: np.ndarray, rc_direct: np.ndarray, rc_reflect: np.ndarray,
                   bs_ris: np.ndarray) -> float:
    """Stacked l1 criterion |h~_d^H v| + ||diag(h~_r^H) H v||_1."""
    alpha = rc_direct @ v
    beta = rc_reflect * (bs_ris @ v)
    return float(np.abs(alpha) + np.sum(np.abs(beta)))


def select_min_eig_candidate(a: LossMatrix, rc_direct: np.ndarray,
                             rc_reflect: np.ndarray, bs_ris: np.ndarray,
                             eig_tol: float | None = None):
    """Among minimum-eigenvalue eigenvectors, pick the criterion maximizer."""
    lam = a.eigenvalues
    if eig_tol is None:
        eig_tol = EIG_TOL_SCALE * max(lam[-1], 1.0)
    cutoff = lam[0] + eig_tol
    best_v, best_crit = None, -np.inf
    for i in range(len(lam)):
        if lam[i] > cutoff:
            break
        crit = pair_criterion(a.eigenvectors[:, i], rc_direct, rc_reflect, bs_ris)
        if crit > best_crit:
            best_v, best_crit = a.eigenvectors[:, i], crit
    return best_v, best_crit


def align_phases(alpha: complex, beta: np.ndarray) -> np.ndarray:
    """Unit-modulus theta maximizing |alpha + theta^H beta| (closed form)."""
    return np.exp(1j * np.angle(np.conj(alpha) * beta))


def loss_min_phases(v: np.ndarray, rc_direct: np.ndarray, rc_reflect: np.ndarray,
                    bs_ris: np.ndarray) -> np.ndarray:
    """Phases aligning the reflected terms with the direct term toward v.

    Maximizes |h~_d^H v + sum_m phi_m (h~_r^H)_m (H v)_m|; elements whose
    reflected coefficient is zero get phase 0 (objective-neutral).
    """
    alpha = rc_direct @ v
    beta = rc_reflect * (bs_ris @ v)
    phases = np.exp(1j * (np.angle(alpha) - np.angle(beta)))
    phases[beta == 0] = 1.0
    return phases


@dataclass
class AlgorithmTrace:
    phase_changes: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def algorithm2(config, channels, initial_phases: list | None = None):
    """Loss-minimizing phase sweeps followed by one exact MTZF beamformer.

    Gauss-Seidel sweep in ascending group order; there is no alternating
    update of the beamformer. Stops when the total phase change per sweep
    drops below eps_norm or the iteration cap is hit.
    """
    phases = [p.copy() for p in (initial_phases or ones_phases(config))]
    power = equal_power_allocation(config.total_power, config.num_groups)
    trace = AlgorithmTrace()
    for i2 in range(1, config.max_zf_iters + 1):
        change = 0.0
        for g in range(config.num_groups):
            rcs = representative_channels(channels, phases)
            a = loss_matrix(rcs, g)
            v, _ = select_min_eig_candidate(a, rcs.rc_direct[g], rcs.rc_reflect[g],
                                            channels.bs_ris[g])
            new = loss_min_phases(v, rcs.rc_direct[g], rcs.rc_reflect[g],
                                  channels.bs_ris[g])
            change += float(np.linalg.norm(new - phases[g]))
            phases[g] = new
        trace.phase_changes.append(change)
        trace.iterations = i2
        if change < config.eps_norm:
            trace.converged = True
            break
    rcs = representative_channels(channels, phases)
    beamformer = mtzf_beamformer(rcs, power)
    return beamformer, phases, trace


class MtzfLossMinDesign(ParamsMixin):
    """Estimator-style wrapper around the MTZF + loss-min RIS design."""

    def __init__(self, config):
        self.config = config

    def fit(self, channels, initial_phases=None):
        beamformer, phases, trace = algorithm2(self.config, channels, initial_phases)
        self.beamformer_ = beamformer
        self.phases_ = phases
        self.trace_ = trace
        self.n_iter_ = trace.iterations
        return self

    def predict(self, channels):
        from .rates import min_rates

        return min_rates(channels, self.phases_, self.beamformer_,
                         self.config.noise_power)
