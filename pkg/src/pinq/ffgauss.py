"""Free-fermion ground-space machinery on covariance matrices.

States are 2n x 2n real antisymmetric matrices gamma with gamma^T gamma = I
for pure states; quadratic Hamiltonians are antisymmetric matrices h with
energies <psi|H|psi> = tr(gamma h).  Gaussian gates act as special orthogonal
conjugations gamma -> O gamma O^T; a plane (Givens) rotation touches two
Majorana coordinates and hence at most two modes.

``interpolation_path`` builds a discrete low-energy path between two pure
states of equal parity under a 2x2 block-diagonal h: the diagonal block
values c_j of gamma fully determine tr(gamma h), so the path walks the
straight line in c-space in N macro-steps.  Each macro-step is realized by a
small set of plane rotations found by a damped least-squares solve (the
reachable set of block values is only known constructively, so targets that
cannot be realized are rejected rather than guessed).  A final alignment
segment rotates the off-block frame onto the end state; it must leave the
energy essentially unchanged, and this is verified, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import PathConstructionError, PreconditionError

PURITY_TOL = 1e-8
ANTISYM_TOL = 1e-10


def _as_array(obj) -> np.ndarray:
    if isinstance(obj, (CovMatrix, HamMatrix)):
        return obj.mat
    return np.asarray(obj, dtype=float)


def _check_antisymmetric(mat: np.ndarray, tol=ANTISYM_TOL, what="matrix"):
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
        raise PreconditionError(f"{what} must be square with even dimension")
    if np.max(np.abs(mat + mat.T)) > tol:
        raise PreconditionError(f"{what} is not antisymmetric")


class CovMatrix:
    """Fermionic covariance matrix: 2n x 2n real antisymmetric."""

    def __init__(self, mat):
        mat = np.array(mat, dtype=float)
        _check_antisymmetric(mat, what="covariance matrix")
        self.mat = mat
        self.n = mat.shape[0] // 2

    def purity_defect(self) -> float:
        g = self.mat
        return float(np.linalg.norm(g.T @ g - np.eye(2 * self.n)))

    def is_pure(self, tol=PURITY_TOL) -> bool:
        return self.purity_defect() <= tol

    def block_values(self) -> np.ndarray:
        """Diagonal 2x2 block entries c_j = gamma[2j, 2j+1]."""
        return self.mat[0::2, 1::2].diagonal().copy()

    def parity(self) -> int:
        """+1 (even) or -1 (odd); the sign of the Pfaffian for pure states."""
        return pfaffian_sign(self.mat)

    def conjugated(self, o: np.ndarray) -> "CovMatrix":
        return CovMatrix(o @ self.mat @ o.T)


class HamMatrix:
    """Quadratic-Hamiltonian matrix: 2n x 2n real antisymmetric."""

    def __init__(self, mat):
        mat = np.array(mat, dtype=float)
        _check_antisymmetric(mat, what="Hamiltonian matrix")
        self.mat = mat
        self.n = mat.shape[0] // 2

    @property
    def is_block_diagonal(self) -> bool:
        off = self.mat.copy()
        for j in range(self.n):
            off[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = 0.0
        return bool(np.max(np.abs(off)) <= 1e-12)

    def block_weights(self) -> np.ndarray:
        """w_j = h[2j, 2j+1] (meaningful when block-diagonal)."""
        return self.mat[0::2, 1::2].diagonal().copy()


def canonical_gamma0(n: int, parity: str = "even") -> CovMatrix:
    """The reference pure state: a direct sum of [[0,1],[-1,0]] blocks,
    with the first block sign-flipped for odd parity."""
    if n < 1:
        raise PreconditionError("mode count must be at least 1")
    if parity not in ("even", "odd"):
        raise PreconditionError("parity must be 'even' or 'odd'")
    g = np.zeros((2 * n, 2 * n))
    for j in range(n):
        g[2 * j, 2 * j + 1] = 1.0
        g[2 * j + 1, 2 * j] = -1.0
    if parity == "odd":
        g[0, 1] = -1.0
        g[1, 0] = 1.0
    return CovMatrix(g)


def energy(gamma, h) -> float:
    """tr(gamma h)."""
    g = _as_array(gamma)
    hm = _as_array(h)
    if g.shape != hm.shape:
        raise PreconditionError("state and Hamiltonian dimensions differ")
    return float(np.trace(g @ hm))


def pfaffian_sign(mat: np.ndarray) -> int:
    """Sign of the Pfaffian, via orthogonal reduction to tridiagonal form."""
    a = np.asarray(mat, dtype=float)
    _check_antisymmetric(a, tol=1e-8, what="matrix")
    if a.shape[0] == 2:
        val = a[0, 1]
    else:
        h, q = scipy.linalg.hessenberg(a, calc_q=True)
        # antisymmetric + Hessenberg = tridiagonal; Pf = det(q) * prod of
        # superdiagonal entries at even positions
        val = float(np.linalg.det(q))
        for i in range(0, a.shape[0] - 1, 2):
            val *= h[i, i + 1]
    if val == 0.0:
        raise PreconditionError("Pfaffian sign undefined (singular matrix)")
    return 1 if val > 0 else -1


# ---------------------------------------------------------------------------
# plane rotations and the Givens decomposition of SO(2n)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GivensRotation:
    """Rotation by ``theta`` in the coordinate plane (p, q), p < q."""

    p: int
    q: int
    theta: float

    def __post_init__(self):
        if not (0 <= self.p < self.q):
            raise PreconditionError("plane indices must satisfy 0 <= p < q")

    @property
    def modes(self) -> tuple:
        return tuple(sorted({self.p // 2, self.q // 2}))

    def matrix(self, dim: int) -> np.ndarray:
        if self.q >= dim:
            raise PreconditionError("plane index outside the requested dimension")
        r = np.eye(dim)
        c, s = math.cos(self.theta), math.sin(self.theta)
        r[self.p, self.p] = c
        r[self.p, self.q] = -s
        r[self.q, self.p] = s
        r[self.q, self.q] = c
        return r


def _plane_conjugate(mat: np.ndarray, p: int, q: int, theta: float) -> np.ndarray:
    """G mat G^T for the plane rotation G(p, q, theta)."""
    c, s = math.cos(theta), math.sin(theta)
    out = mat.copy()
    rp = c * out[p, :] - s * out[q, :]
    rq = s * out[p, :] + c * out[q, :]
    out[p, :] = rp
    out[q, :] = rq
    cp = c * out[:, p] - s * out[:, q]
    cq = s * out[:, p] + c * out[:, q]
    out[:, p] = cp
    out[:, q] = cq
    return out


def apply_rotations(mat: np.ndarray, rotations) -> np.ndarray:
    out = np.array(mat, dtype=float)
    for r in rotations:
        out = _plane_conjugate(out, r.p, r.q, r.theta)
    return out


def reconstruct(rotations, dim: int) -> np.ndarray:
    """Product of the rotations, in application order (last factor leftmost)."""
    out = np.eye(dim)
    for r in rotations:
        out = r.matrix(dim) @ out
    return out


def givens_decompose(o: np.ndarray, tol: float = 1e-8) -> list:
    """Factor a special orthogonal matrix into at most N(N-1)/2 plane rotations.

    Standard QR-style elimination: rotations in planes (j, i) zero the
    below-diagonal entries column by column; because the input is orthogonal
    the residue is the identity.  Inputs with det = -1 are rejected.  Inputs
    close to the identity yield uniformly small angles.
    """
    o = np.asarray(o, dtype=float)
    dim = o.shape[0]
    if o.ndim != 2 or o.shape[0] != o.shape[1]:
        raise PreconditionError("input must be square")
    if np.linalg.norm(o.T @ o - np.eye(dim)) > tol:
        raise PreconditionError("input is not orthogonal")
    if np.linalg.det(o) < 0:
        raise PreconditionError("input has determinant -1 (not special orthogonal)")
    r = o.copy()
    eliminators = []  # applied left of o, in order
    for j in range(dim - 1):
        for i in range(j + 1, dim):
            b = r[i, j]
            if abs(b) <= 1e-14:
                continue
            a = r[j, j]
            hyp = math.hypot(a, b)
            theta_e = math.atan2(-b / hyp, a / hyp)
            rot = GivensRotation(j, i, theta_e)
            r = rot.matrix(dim) @ r
            eliminators.append(rot)
    # fold any residual diag(-1,-1) pairs into rotations by pi
    neg = [i for i in range(dim) if r[i, i] < 0]
    for a, b in zip(neg[0::2], neg[1::2]):
        rot = GivensRotation(a, b, math.pi)
        r = rot.matrix(dim) @ r
        eliminators.append(rot)
    if np.linalg.norm(r - np.eye(dim)) > 1e-9:
        raise PreconditionError("elimination did not terminate at the identity")
    return [GivensRotation(g.p, g.q, -g.theta) for g in reversed(eliminators)]


def near_identity_constant(o: np.ndarray, rotations) -> float:
    """max |angle| / ||O - I||_2; finite only for O != I."""
    eps = float(np.linalg.norm(o - np.eye(o.shape[0]), 2))
    if eps == 0.0 or not rotations:
        return 0.0
    return max(abs(r.theta) for r in rotations) / eps


# ---------------------------------------------------------------------------
# canonical factor gamma = O gamma0 O^T of a pure state
# ---------------------------------------------------------------------------


def pure_orthogonal_factor(gamma: CovMatrix) -> np.ndarray:
    """Special orthogonal O with gamma = O gamma0(parity) O^T."""
    if not gamma.is_pure():
        raise PreconditionError("state is not pure")
    parity = gamma.parity()
    t, q = scipy.linalg.schur(gamma.mat, output="real")
    n = gamma.n
    pattern = np.ones(n)
    if parity < 0:
        pattern[0] = -1.0
    qn = q.copy()
    for j in range(n):
        b = t[2 * j, 2 * j + 1]
        if abs(abs(b) - 1.0) > 1e-6:
            raise PreconditionError("Schur form is not a pure-state canonical form")
        if math.copysign(1.0, b) != pattern[j]:
            qn[:, [2 * j, 2 * j + 1]] = qn[:, [2 * j + 1, 2 * j]]
    g0 = canonical_gamma0(n, "even" if parity > 0 else "odd").mat
    if np.linalg.norm(qn @ g0 @ qn.T - gamma.mat) > 1e-7:
        raise PreconditionError("canonical factorization failed")
    if np.linalg.det(qn) < 0:
        raise PreconditionError("canonical factor has determinant -1; parity mismatch")
    return qn


def block_diagonal_form(h: HamMatrix):
    """(h_block, O) with h = O h_block O^T and h_block 2x2 block diagonal."""
    t, q = scipy.linalg.schur(h.mat, output="real")
    # zero the numerical residue outside the 2x2 diagonal blocks
    n = h.n
    hb = np.zeros_like(t)
    for j in range(n):
        hb[2 * j, 2 * j + 1] = t[2 * j, 2 * j + 1]
        hb[2 * j + 1, 2 * j] = -t[2 * j, 2 * j + 1]
    if np.linalg.det(q) < 0:
        # flip one block's orientation; keeps q h_b q^T invariant after sign flip
        q = q.copy()
        q[:, [0, 1]] = q[:, [1, 0]]
        hb[0, 1] *= -1.0
        hb[1, 0] *= -1.0
    return HamMatrix(hb), q


# ---------------------------------------------------------------------------
# discrete low-energy interpolation paths
# ---------------------------------------------------------------------------


@dataclass
class FermionPath:
    start: CovMatrix
    end: CovMatrix
    rotations: tuple
    macro_counts: tuple  # rotations per macro-step; last entry is the alignment segment
    grid_energies: tuple
    ramp_deviation: float
    alignment_deviation: float
    max_angle: float
    requested_steps: int
    solver_residual: float = 0.0

    def macro_slices(self):
        out = []
        start = 0
        for c in self.macro_counts:
            out.append(slice(start, start + c))
            start += c
        return out


def _all_planes(dim: int) -> list:
    return [(p, q) for p in range(dim) for q in range(p + 1, dim)]


def _pairing_init(c_now: np.ndarray, c_target: np.ndarray, planes: list) -> np.ndarray:
    """Angles seeding the solver with symmetric two-mode pairing moves."""
    thetas = np.zeros(len(planes))
    index = {pq: i for i, pq in enumerate(planes)}
    n = c_now.shape[0]
    for j in range(0, n - 1, 2):
        l = j + 1
        mean_now = np.clip((c_now[j] + c_now[l]) / 2.0, -1.0, 1.0)
        mean_tgt = np.clip((c_target[j] + c_target[l]) / 2.0, -1.0, 1.0)
        phi = 0.5 * (math.acos(mean_tgt) - math.acos(mean_now))
        a, b = 2 * j, 2 * j + 1
        cc, d = 2 * l, 2 * l + 1
        thetas[index[(a, d)]] = phi
        thetas[index[(b, cc)]] = phi
    return thetas


def _solve_block_move(gamma: np.ndarray, c_target: np.ndarray, planes, rng,
                      tol: float) -> np.ndarray | None:
    """Angles (one per plane) with block_values(R gamma R^T) = c_target."""

    def conjugate(thetas):
        g = gamma
        for (p, q), th in zip(planes, thetas):
            if th != 0.0:
                g = _plane_conjugate(g, p, q, th)
        return g

    def residual(thetas):
        g = conjugate(thetas)
        return g[0::2, 1::2].diagonal() - c_target

    n_param = len(planes)
    scale = max(float(np.max(np.abs(residual(np.zeros(n_param))))), 1e-6)
    inits = [_pairing_init(gamma[0::2, 1::2].diagonal(), c_target, planes), np.zeros(n_param)]
    for _ in range(6):
        inits.append(rng.normal(scale=min(0.5, 2.0 * math.sqrt(scale)), size=n_param))
    # a structured init that already hits the target wins outright; this keeps
    # symmetric moves on the minimal pairing family and the frame coherent
    for x0 in inits:
        if np.max(np.abs(residual(x0))) <= tol:
            return x0
    solutions = []
    for x0 in inits:
        sol = scipy.optimize.least_squares(
            residual, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400
        )
        if float(np.max(np.abs(sol.fun))) <= tol:
            solutions.append(sol.x)
    if not solutions:
        return None
    # smallest total rotation keeps intermediate energies near the ramp
    return min(solutions, key=lambda x: float(np.sum(np.abs(x))))


def _fiber_descent(gamma, target, planes, frame_tol=1e-9, max_iters=400,
                   step_bound=0.15, block_weight=30.0):
    """Best-effort rotations moving ``gamma`` onto ``target`` while holding the
    diagonal blocks (hence the energy) near the shared end value.

    Returns (rotations, final gamma, reached).  Each iteration solves a
    bounded-angle least-squares step whose residual combines the frame
    mismatch with a heavily weighted block mismatch.
    """
    c_end = target[0::2, 1::2].diagonal().copy()
    rotations = []
    stall = 0
    dist = float(np.linalg.norm(gamma - target))
    for _ in range(max_iters):
        if dist <= frame_tol:
            return rotations, gamma, True

        def residual(thetas):
            g = gamma
            for (p, q), th in zip(planes, thetas):
                if th != 0.0:
                    g = _plane_conjugate(g, p, q, th)
            frame = (g - target).ravel()
            blocks = block_weight * (g[0::2, 1::2].diagonal() - c_end)
            return np.concatenate([frame, blocks])

        sol = scipy.optimize.least_squares(
            residual,
            np.zeros(len(planes)),
            bounds=(-step_bound, step_bound),
            method="trf",
            max_nfev=80,
            xtol=1e-14,
            ftol=1e-14,
            gtol=1e-14,
        )
        for (p, q), th in zip(planes, sol.x):
            if abs(th) > 1e-14:
                gamma = _plane_conjugate(gamma, p, q, th)
                rotations.append(GivensRotation(p, q, float(th)))
        new_dist = float(np.linalg.norm(gamma - target))
        if new_dist >= dist - 1e-13:
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0
        dist = new_dist
    return rotations, gamma, dist <= frame_tol


def interpolation_path(
    gamma_start: CovMatrix,
    gamma_end: CovMatrix,
    h: HamMatrix,
    n_steps: int,
    seed: int = 0,
    solver_tol: float = 1e-11,
    alignment_tol: float = 1e-6,
) -> FermionPath:
    """Discrete path whose grid energies follow the straight line between
    tr(gamma_start h) and tr(gamma_end h).

    Preconditions: both states pure, equal parity, h 2x2 block diagonal (use
    ``block_diagonal_form`` first and conjugate the states accordingly).
    Raises PathConstructionError when a macro-step target cannot be realized
    by two-mode rotations or the final alignment is not energy-trivial.
    """
    if n_steps < 1:
        raise PreconditionError("step count must be at least 1")
    if gamma_start.n != gamma_end.n or gamma_start.n != h.n:
        raise PreconditionError("mode counts differ")
    for name, g in (("start", gamma_start), ("end", gamma_end)):
        if not g.is_pure():
            raise PreconditionError(f"{name} state is not pure")
    if not h.is_block_diagonal:
        raise PreconditionError("h must be 2x2 block diagonal (pre-rotate it first)")
    if gamma_start.parity() != gamma_end.parity():
        raise PreconditionError("states lie in different parity sectors")

    dim = 2 * gamma_start.n
    e_start = energy(gamma_start, h)
    e_end = energy(gamma_end, h)

    if np.linalg.norm(gamma_start.mat - gamma_end.mat) <= 1e-12:
        return FermionPath(
            start=gamma_start,
            end=gamma_end,
            rotations=(),
            macro_counts=(0,) * n_steps + (0,),
            grid_energies=tuple([e_start] * (n_steps + 1)),
            ramp_deviation=0.0,
            alignment_deviation=0.0,
            max_angle=0.0,
            requested_steps=n_steps,
        )

    rng = np.random.default_rng(seed)
    planes = _all_planes(dim)
    c0 = gamma_start.block_values()
    c1 = gamma_end.block_values()

    gamma = gamma_start.mat.copy()
    rotations = []
    macro_counts = []
    grid_energies = [e_start]
    ramp_dev = 0.0
    max_angle = 0.0
    worst_residual = 0.0

    def ramp(t):
        return (1.0 - t) * e_start + t * e_end

    for k in range(1, n_steps + 1):
        c_tgt = (1.0 - k / n_steps) * c0 + (k / n_steps) * c1
        thetas = _solve_block_move(gamma, c_tgt, planes, rng, solver_tol)
        if thetas is None:
            raise PathConstructionError(
                f"macro-step {k}/{n_steps}: block target {c_tgt} not realizable "
                "by two-mode rotations from the current state"
            )
        step_rots = [
            GivensRotation(p, q, float(th))
            for (p, q), th in zip(planes, thetas)
            if abs(th) > 1e-14
        ]
        # micro replay: energies tracked against the ramp within the step
        t_prev = (k - 1) / n_steps
        t_next = k / n_steps
        for i, rot in enumerate(step_rots, start=1):
            gamma = _plane_conjugate(gamma, rot.p, rot.q, rot.theta)
            t_micro = t_prev + (t_next - t_prev) * i / len(step_rots)
            ramp_dev = max(ramp_dev, abs(float(np.trace(gamma @ h.mat)) - ramp(t_micro)))
            max_angle = max(max_angle, abs(rot.theta))
        rotations.extend(step_rots)
        macro_counts.append(len(step_rots))
        grid_energies.append(float(np.trace(gamma @ h.mat)))
        worst_residual = max(worst_residual, float(np.max(np.abs(gamma[0::2, 1::2].diagonal() - c_tgt))))

    # alignment: rotate the off-block frame onto gamma_end; energy must not
    # move (checked, not assumed).  A direct Givens decomposition of the
    # residual frame is tried first (exact and short when the macro-steps
    # already ended frame-aligned); otherwise a block-pinned descent walks to
    # the end state within the constant-energy fiber.
    o_here = pure_orthogonal_factor(CovMatrix(gamma))
    o_end = pure_orthogonal_factor(gamma_end)
    o_res = o_end @ o_here.T
    direct_rots = givens_decompose(o_res, tol=1e-7)
    g_try = gamma.copy()
    direct_dev = 0.0
    for rot in direct_rots:
        g_try = _plane_conjugate(g_try, rot.p, rot.q, rot.theta)
        direct_dev = max(direct_dev, abs(float(np.trace(g_try @ h.mat)) - e_end))
    if direct_dev <= alignment_tol and np.linalg.norm(g_try - gamma_end.mat) <= 1e-8:
        align_rots, gamma, align_dev = direct_rots, g_try, direct_dev
    else:
        pre_align = gamma.copy()
        align_rots, gamma, reached = _fiber_descent(gamma, gamma_end.mat, planes)
        if not reached:
            raise PathConstructionError(
                "final frame alignment did not converge; the end state is not "
                "reachable from the constructed grid state within tolerance"
            )
        align_dev = 0.0
        for rot in align_rots:
            pre_align = _plane_conjugate(pre_align, rot.p, rot.q, rot.theta)
            align_dev = max(align_dev, abs(float(np.trace(pre_align @ h.mat)) - e_end))
    for rot in align_rots:
        max_angle = max(max_angle, abs(rot.theta))
    if align_dev > alignment_tol:
        raise PathConstructionError(
            f"alignment segment moves the energy by {align_dev:.3e} "
            f"(> {alignment_tol:.1e}); the off-block frames are not energy-compatible"
        )
    if np.linalg.norm(gamma - gamma_end.mat) > 1e-8:
        raise PathConstructionError("endpoint not reproduced after alignment")
    rotations.extend(align_rots)
    macro_counts.append(len(align_rots))

    return FermionPath(
        start=gamma_start,
        end=gamma_end,
        rotations=tuple(rotations),
        macro_counts=tuple(macro_counts),
        grid_energies=tuple(grid_energies),
        ramp_deviation=max(ramp_dev, align_dev),
        alignment_deviation=align_dev,
        max_angle=max_angle,
        requested_steps=n_steps,
        solver_residual=worst_residual,
    )


@dataclass
class FfPathVerdict:
    ok: bool
    failures: list = field(default_factory=list)
    max_grid_energy: float = float("-inf")
    max_micro_energy: float = float("-inf")
    endpoint_error: float = 0.0
    max_purity_defect: float = 0.0


def verify_ff_path(path: FermionPath, h, eta1: float, locality: int = 2) -> FfPathVerdict:
    """Re-walk the path and check purity, rotation locality, endpoint match,
    and the energy bound at every macro grid point."""
    hm = _as_array(h)
    failures = []
    for i, rot in enumerate(path.rotations):
        if len(rot.modes) > locality:
            failures.append(f"rotation {i} touches {len(rot.modes)} modes (> {locality})")
    gamma = path.start.mat.copy()
    eye = np.eye(gamma.shape[0])
    max_defect = float(np.linalg.norm(gamma.T @ gamma - eye))
    max_micro = float(np.trace(gamma @ hm))
    grid_energies = [float(np.trace(gamma @ hm))]
    for sl in path.macro_slices():
        for rot in path.rotations[sl]:
            gamma = _plane_conjugate(gamma, rot.p, rot.q, rot.theta)
            max_defect = max(max_defect, float(np.linalg.norm(gamma.T @ gamma - eye)))
            max_micro = max(max_micro, float(np.trace(gamma @ hm)))
        grid_energies.append(float(np.trace(gamma @ hm)))
    endpoint_error = float(np.linalg.norm(gamma - path.end.mat))
    if endpoint_error > 1e-8:
        failures.append(f"endpoint error {endpoint_error:.3e} exceeds 1e-8")
    if max_defect > PURITY_TOL:
        failures.append(f"purity defect {max_defect:.3e} exceeds {PURITY_TOL:.0e}")
    max_grid = max(grid_energies)
    if max_grid > eta1:
        failures.append(f"grid energy {max_grid:.6f} exceeds eta1={eta1}")
    return FfPathVerdict(
        ok=not failures,
        failures=failures,
        max_grid_energy=max_grid,
        max_micro_energy=max_micro,
        endpoint_error=endpoint_error,
        max_purity_defect=max_defect,
    )
