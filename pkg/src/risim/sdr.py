"""Per-group max-min phase design via semidefinite relaxation.

The unit-modulus quadratic program is lifted to a PSD matrix with unit
diagonal (the elliptope). The relaxed problem is solved by projected
supergradient ascent, with the projection done by Dykstra alternation
between the PSD cone and the unit-diagonal affine set. A rank-one phase
vector is then recovered by Gaussian randomization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SdrError(RuntimeError):
    pass


class SdrNonConvergence(SdrError):
    """Solver hit its iteration limit without a feasible iterate."""

    def __init__(self, message, residuals):
        super().__init__(f"{message} (residuals: {residuals})")
        self.residuals = residuals


@dataclass(frozen=True)
class SdrSettings:
    step_size: float = 1.0          # initial step of the normalized supergradient
    step_decay: float = 0.5         # per-epoch geometric step reduction
    epochs: int = 16                # step-decay epochs in the factored phase
    epoch_len: int = 150            # ascent iterations per epoch
    restarts: int = 1               # independent factored-phase starts
    factor_rank: int | None = None  # factor width; None -> K+2 (capped at dim)
    polish_iters: int = 20          # full-matrix Dykstra-projected phase cap
    polish_proj_cycles: int = 5     # Dykstra cycles per polish step
    stall_iters: int = 20           # stop the polish after this many flat steps
    residual_tol: float = 1e-8      # projection stopping residual
    feas_tol: float = 1e-4          # residual beyond which the solve is an error
    tie_tol: float = 1e-9           # relative tie window for the min users
    n_rand: int = 200               # Gaussian randomization samples


@dataclass
class LiftedProblem:
    """Quadratic lift of one group's max-min SNR objective.

    matrices[k] is Hermitian of size (M+1, M+1); constants[k] is the
    phase-independent term |q_k|^2 / sigma^2.
    """

    matrices: np.ndarray   # (K, M+1, M+1)
    constants: np.ndarray  # (K,)
    p_vectors: np.ndarray  # (K, M)  channel-cascade coefficients
    q_scalars: np.ndarray  # (K,)    direct-link coefficients
    noise_power: float

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def num_users(self) -> int:
        return self.matrices.shape[0]

    def evaluate(self, phibar: np.ndarray) -> float:
        """min_k quadratic value at a unit-modulus vector."""
        vals = np.einsum("i,kij,j->k", phibar.conj(), self.matrices, phibar).real
        return float(np.min(vals + self.constants))

    def evaluate_theta(self, theta: np.ndarray) -> float:
        vals = np.einsum("kij,ji->k", self.matrices, theta).real
        return float(np.min(vals + self.constants))


@dataclass
class SdrSolution:
    theta: np.ndarray
    objective_bound: float
    residuals: dict = field(default_factory=dict)


def lift(channels, phases, f_g: np.ndarray, g: int, noise_power: float) -> LiftedProblem:
    """Lift group g's per-user |h^H f|^2 / sigma^2 into quadratic forms.

    The lift variable and the physical reflection coefficients are related
    by a conjugation that the block construction below absorbs, so that
    [phi; t]^H W_k [phi; t] + c_k equals the SNR under Phi = diag(phi t*)
    exactly for every unit-modulus (phi, t).
    """
    h_bs_ris = channels.bs_ris[g]
    cascade = h_bs_ris @ f_g  # (M,)
    k_g = len(channels.direct[g])
    m = h_bs_ris.shape[0]
    ps = np.empty((k_g, m), dtype=complex)
    qs = np.empty(k_g, dtype=complex)
    for k in range(k_g):
        ps[k] = np.conj(channels.reflect[g][k] * cascade)
        qs[k] = np.conj(channels.direct[g][k] @ f_g)
    mats = np.zeros((k_g, m + 1, m + 1), dtype=complex)
    for k in range(k_g):
        p, q = ps[k], qs[k]
        mats[k, :m, :m] = np.outer(p, p.conj())
        mats[k, :m, m] = p * q.conj()
        mats[k, m, :m] = q * p.conj()
    mats /= noise_power
    consts = np.abs(qs) ** 2 / noise_power
    return LiftedProblem(mats, consts, ps, qs, noise_power)


def _psd_project(x: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((x + x.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def project_elliptope(a: np.ndarray, iters: int = 50, tol: float = 1e-10) -> np.ndarray:
    """Dykstra projection onto {X PSD, diag(X) = 1}.

    The diagonal set is affine, so the Dykstra correction is only carried
    for the PSD cone.
    """
    x = (a + a.conj().T) / 2
    corr = np.zeros_like(x)
    n = x.shape[0]
    for _ in range(max(1, iters)):
        y = _psd_project(x + corr)
        corr = x + corr - y
        x = y.copy()
        np.fill_diagonal(x, 1.0)
        if np.linalg.norm(x - y) < tol * n:
            break
    # exact feasibility: PSD projection followed by a congruence rescale
    # keeps the cone membership and pins the diagonal to one
    x = _psd_project(x)
    d = np.sqrt(np.clip(np.diagonal(x).real, 1e-300, None))
    x = x / np.outer(d, d)
    np.fill_diagonal(x, 1.0)
    return x


def elliptope_residuals(theta: np.ndarray) -> dict:
    w = np.linalg.eigvalsh((theta + theta.conj().T) / 2)
    return {
        "min_eigenvalue": float(w[0]),
        "diag_deviation": float(np.max(np.abs(np.diagonal(theta) - 1.0))),
    }


def _rank_one_lift(phibar: np.ndarray) -> np.ndarray:
    u = np.exp(1j * np.angle(phibar))
    return np.outer(u, u.conj())


def solve_sdr_maxmin(
    problem: LiftedProblem,
    settings: SdrSettings = SdrSettings(),
    initial_phases: np.ndarray | None = None,
) -> SdrSolution:
    """Approximately maximize min_k Tr(W_k Theta) + c_k over the elliptope.

    Returns the best feasible iterate found; its objective is reported as
    objective_bound. The single-user case is solved in closed form (the
    relaxation is tight there).
    """
    n = problem.dim
    if problem.num_users < 1:
        raise SdrError("lifted problem has no user matrices")

    if problem.num_users == 1:
        # max |phibar^H w|^2 / sigma^2 over unit-modulus phibar; the phase
        # alignment phibar = exp(j angle(w)) attains the elliptope optimum.
        w = np.concatenate([problem.p_vectors[0], [problem.q_scalars[0]]])
        phibar = np.exp(1j * np.angle(w))
        theta = _rank_one_lift(phibar)
        return SdrSolution(theta, problem.evaluate_theta(theta), elliptope_residuals(theta))

    if initial_phases is None:
        initial_phases = np.ones(n, dtype=complex)

    mats = problem.matrices
    consts = problem.constants
    # On the unit-diagonal set, Tr(W_k X) + c_k = w_k^H X w_k / sigma^2 with
    # w_k = [p_k; q_k]; the factored phase exploits that low-rank structure.
    ws = np.concatenate([problem.p_vectors, problem.q_scalars[:, None]], axis=1)
    sig = problem.noise_power

    # Phase 1: supergradient ascent on X = V V^H with unit-norm rows of V
    # (exactly the elliptope slice of rank <= r). The projection is an exact
    # row normalization, so this phase does not stall on projection error the
    # way eigenvalue-clamping feasibility maps do.
    r = settings.factor_rank if settings.factor_rank is not None \
        else problem.num_users + 2
    r = min(max(r, 2), n)

    def factored_ascent(v):
        """Normalized supergradient steps on V, with a geometric step decay:
        each epoch restarts from the best factor found so far at half the
        step, which sharpens the final accuracy far beyond a 1/sqrt(t)
        schedule on this piecewise-smooth objective."""
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        best_v, best_fval = v.copy(), -np.inf
        for epoch in range(settings.epochs):
            step = settings.step_size * settings.step_decay ** epoch
            v = best_v.copy()
            for _ in range(settings.epoch_len):
                proj = ws.conj() @ v  # (K, r), row k is conj(V^H w_k)
                vals = np.sum(np.abs(proj) ** 2, axis=1) / sig
                vmin = float(vals.min())
                if vmin > best_fval:
                    best_fval, best_v = vmin, v.copy()
                tie = vals <= vmin + settings.tie_tol * max(abs(vmin), 1.0)
                grad = (ws[tie].T @ proj[tie]) / (sig * int(tie.sum()))
                gnorm = np.linalg.norm(grad)
                if gnorm == 0.0:
                    return best_v, best_fval  # any feasible point is optimal
                v = v + step * grad / gnorm
                v /= np.linalg.norm(v, axis=1, keepdims=True)
        return best_v, best_fval

    # Random starting factors (a fixed generator keeps the solve
    # deterministic); rank-one starts get trapped, because every gradient
    # step then keeps all columns inside one two-dimensional subspace.
    init_rng = np.random.default_rng(0x5D12)
    candidates = []
    for _ in range(max(1, settings.restarts)):
        v0 = init_rng.standard_normal((n, r)) + 1j * init_rng.standard_normal((n, r))
        best_v, _ = factored_ascent(v0)
        candidates.append(best_v @ best_v.conj().T)
    candidates += [
        _rank_one_lift(initial_phases),
        _rank_one_lift(np.ones(n, dtype=complex)),
    ]
    vals = [problem.evaluate_theta(th) for th in candidates]
    best_val = max(vals)
    best_theta = candidates[int(np.argmax(vals))]

    # Phase 2: full-matrix supergradient steps with the Dykstra projection,
    # which can leave the rank-<= r slice when the relaxation is not tight.
    theta, flat = best_theta, 0
    for t in range(1, settings.polish_iters + 1):
        vals = np.einsum("kij,ji->k", mats, theta).real + consts
        vmin = float(vals.min())
        tie = vals <= vmin + settings.tie_tol * max(abs(vmin), 1.0)
        grad = mats[tie].mean(axis=0)
        gnorm = np.linalg.norm(grad)
        if gnorm == 0.0:
            break
        theta = project_elliptope(
            theta + (settings.step_size / np.sqrt(t)) * grad / gnorm,
            iters=settings.polish_proj_cycles,
            tol=settings.residual_tol,
        )
        val = problem.evaluate_theta(theta)
        if val > best_val * (1 + 1e-12) + 1e-300:
            best_val, best_theta, flat = val, theta, 0
        else:
            flat += 1
            if flat >= settings.stall_iters:
                break

    # Rank-one self-check: sample the solution's own randomization once with
    # a fixed generator. A rank-one point is elliptope-feasible, so when it
    # beats the matrix iterate it *is* the better solution of the relaxation.
    probe = SdrSolution(best_theta, best_val)
    phibar, rank_one_val = gaussian_randomization(
        probe, problem, settings.n_rand, np.random.default_rng(0x5D13),
        initial_phibar=initial_phases,
    )
    if rank_one_val > best_val:
        best_val, best_theta = rank_one_val, _rank_one_lift(phibar)

    theta, val = best_theta, best_val
    residuals = elliptope_residuals(theta)
    if (residuals["min_eigenvalue"] < -settings.feas_tol
            or residuals["diag_deviation"] > settings.feas_tol):
        raise SdrNonConvergence("SDR projection did not reach feasibility", residuals)
    return SdrSolution(theta, val, residuals)


def gaussian_randomization(
    solution: SdrSolution,
    problem: LiftedProblem,
    n_rand: int,
    rng: np.random.Generator,
    initial_phibar: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Recover a unit-modulus vector from the lifted solution.

    Draws n_rand Gaussian vectors with covariance Theta and projects each
    onto unit modulus. The principal-eigenvector projection, the all-ones
    baseline, and (when given) the incumbent vector are always in the
    candidate pool, so the result never falls below the un-optimized or
    previous phases.
    """
    if n_rand < 1:
        raise ValueError("n_rand must be >= 1")
    theta = (solution.theta + solution.theta.conj().T) / 2
    w, v = np.linalg.eigh(theta)
    w = np.clip(w, 0.0, None)
    principal = np.exp(1j * np.angle(v[:, -1]))
    n = theta.shape[0]
    fixed = [principal[:, None], np.ones((n, 1), dtype=complex)]
    if initial_phibar is not None:
        fixed.append(np.exp(1j * np.angle(initial_phibar))[:, None])
    rank_one = w[-1] > 0 and (w[-2] / w[-1] if len(w) > 1 else 0.0) < 1e-8
    if rank_one:
        cands = np.concatenate(fixed, axis=1)
    else:
        root = v * np.sqrt(w)
        z = (rng.standard_normal((n, n_rand))
             + 1j * rng.standard_normal((n, n_rand))) / np.sqrt(2)
        cands = np.concatenate([np.exp(1j * np.angle(root @ z))] + fixed, axis=1)
    # min over users of the quadratic value, for every candidate column
    vals = None
    for k in range(problem.num_users):
        vk = np.einsum("im,ij,jm->m", cands.conj(), problem.matrices[k], cands).real
        vk += problem.constants[k]
        vals = vk if vals is None else np.minimum(vals, vk)
    best = int(np.argmax(vals))
    return cands[:, best].copy(), float(vals[best])


def extract_phases(phibar: np.ndarray) -> np.ndarray:
    """De-rotate by the auxiliary element and keep the first M phases."""
    if abs(phibar[-1]) == 0.0:
        raise SdrError("cannot de-rotate: auxiliary element is zero")
    return np.exp(1j * np.angle(phibar[:-1] / phibar[-1]))
