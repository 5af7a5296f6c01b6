"""Zeno-pinned time evolution with restricted Hamiltonians.

Two protocols, both alternating an exact short-time propagator with a
projective measurement of one ancilla qubit:

* ``stoquastic``: H' = A (x) I + B (x) X_q with A, B stoquastic and B strictly
  off-diagonal; ancilla starts in |->, measured in the X basis.  Because
  I (x) X_q commutes with H', the ancilla never flips: post-selection succeeds
  with probability 1 and the system follows exp(-i t (A - B)) exactly (up to
  propagator round-off), for every step count.
* ``commuting``: H' = 2A (x) |+><+| + 2B (x) |-><-| with A and B internally
  commuting; ancilla starts in |0>, measured in the computational basis.  The
  post-selected system state approaches exp(-i t (A + B)) with error O(t^2/N)
  and survival deficit O(t^2/N).

Each step uses the exact dense matrix exponential (scaling and squaring), not
a product formula, so the measured scaling isolates the projection error.
Post-selection is deterministic projection plus renormalization with survival
bookkeeping; no trajectory sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import PreconditionError, ResourceLimitError, SurvivalUnderflowError
from .pauli import DENSE_QUBIT_CEILING, HamiltonianSum, PauliString, PauliTerm, is_commuting, is_stoquastic

# below the square of propagator round-off the kept branch is numerical noise
_SURVIVAL_FLOOR = 1e-24


@dataclass
class ZenoProtocol:
    """Protocol kind, the two term groups, total time, and step count."""

    kind: str
    a: HamiltonianSum
    b: HamiltonianSum
    t: float
    steps: int

    def __post_init__(self):
        if self.kind not in ("stoquastic", "commuting"):
            raise PreconditionError(f"unknown protocol kind {self.kind!r}")
        if self.a.n != self.b.n:
            raise PreconditionError("A and B must act on the same register")
        if self.steps < 1:
            raise PreconditionError("step count must be at least 1")
        if self.kind == "stoquastic":
            for name, ham in (("A", self.a), ("B", self.b)):
                rep = is_stoquastic(ham, termwise=True)
                if not rep.verdict:
                    raise PreconditionError(f"{name} must be termwise stoquastic")
            if any(t.string.is_diagonal for t in self.b.terms):
                raise PreconditionError("B must be strictly off-diagonal")
        else:
            for name, ham in (("A", self.a), ("B", self.b)):
                rep = is_commuting(ham)
                if not rep.verdict:
                    raise PreconditionError(f"{name} must be internally commuting")

    @property
    def n(self) -> int:
        return self.a.n

    def pinned_hamiltonian(self) -> HamiltonianSum:
        """The (n+1)-qubit Hamiltonian driving the protocol."""
        n1 = self.n + 1
        anc = 1 << self.n
        terms = []
        if self.kind == "stoquastic":
            for t in self.a.terms:
                terms.append(PauliTerm(t.coeff, PauliString(n1, t.string.x, t.string.z)))
            for t in self.b.terms:
                terms.append(PauliTerm(t.coeff, PauliString(n1, t.string.x | anc, t.string.z)))
        else:
            # 2A (x) |+><+| = A (x) (I + X);  2B (x) |-><-| = B (x) (I - X)
            for t in self.a.terms:
                terms.append(PauliTerm(t.coeff, PauliString(n1, t.string.x, t.string.z)))
                terms.append(PauliTerm(t.coeff, PauliString(n1, t.string.x | anc, t.string.z)))
            for t in self.b.terms:
                terms.append(PauliTerm(t.coeff, PauliString(n1, t.string.x, t.string.z)))
                terms.append(PauliTerm(-t.coeff, PauliString(n1, t.string.x | anc, t.string.z)))
        return HamiltonianSum(n1, terms)

    def reference_generator(self) -> HamiltonianSum:
        """A - B (stoquastic) or A + B (commuting) on the system register."""
        sign = -1.0 if self.kind == "stoquastic" else 1.0
        terms = list(self.a.terms) + [PauliTerm(sign * t.coeff, t.string) for t in self.b.terms]
        return HamiltonianSum(self.n, terms)

    @property
    def reference_label(self) -> str:
        return "A-B" if self.kind == "stoquastic" else "A+B"


@dataclass
class TrajectoryResult:
    """Post-selected trajectory summary.

    ``final_state`` is normalized.  ``error_norm`` is the distance between the
    post-selected *branch* vector (the raw product of projections, whose norm
    squared is the survival probability) and the reference evolution; this is
    the quantity with the advertised O(t^2/N) scaling.  ``direction_error_norm``
    compares the renormalized final state instead, which can decay faster when
    the second-order step error happens to be proportional to the identity.
    """

    final_state: np.ndarray
    survival_probability: float
    error_norm: float
    direction_error_norm: float
    reference_label: str
    reference_state: np.ndarray
    step_survivals: np.ndarray = field(repr=False, default=None)


def _ancilla_components(state: np.ndarray):
    """Split an (n+1)-qubit state into its ancilla-|0> and |1> system parts."""
    return state.reshape(-1, 2)[:, 0].copy(), state.reshape(-1, 2)[:, 1].copy()


def zeno_evolve(protocol: ZenoProtocol, psi0: np.ndarray) -> TrajectoryResult:
    """Run the measure-while-evolving protocol, post-selected on the pinned outcome.

    ``psi0`` is the system state; the ancilla is initialized internally (|->
    for the stoquastic protocol, |0> for the commuting one).
    """
    n = protocol.n
    if n + 1 > DENSE_QUBIT_CEILING:
        raise ResourceLimitError("protocol register exceeds the dense propagator ceiling")
    dim = 1 << n
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (dim,):
        raise PreconditionError(f"initial state must have length {dim}")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-8:
        raise PreconditionError("initial state must be normalized")
    psi = psi / nrm

    delta = protocol.t / protocol.steps
    hp = protocol.pinned_hamiltonian().to_matrix(dense=True)
    u_step = scipy.linalg.expm(-1j * delta * hp)

    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    sys_state = psi.copy()
    survival = 1.0
    step_survivals = np.empty(protocol.steps)
    for k in range(protocol.steps):
        if protocol.kind == "stoquastic":
            full = np.kron(sys_state, np.array([inv_sqrt2, -inv_sqrt2]))
        else:
            full = np.kron(sys_state, np.array([1.0, 0.0]))
        full = u_step @ full
        comp0, comp1 = _ancilla_components(full)
        if protocol.kind == "stoquastic":
            kept = (comp0 - comp1) * inv_sqrt2  # X-basis measurement, keep |->
        else:
            kept = comp0  # computational measurement, keep |0>
        p = float(np.real(np.vdot(kept, kept)))
        if p < _SURVIVAL_FLOOR:
            raise SurvivalUnderflowError(
                f"post-selection probability underflow at step {k}: p={p:.3e}"
            )
        survival *= p
        step_survivals[k] = p
        sys_state = kept / np.sqrt(p)

    gen = protocol.reference_generator().to_matrix(dense=True)
    ref = scipy.linalg.expm(-1j * protocol.t * gen) @ psi
    branch = np.sqrt(survival) * sys_state
    return TrajectoryResult(
        final_state=sys_state,
        survival_probability=survival,
        error_norm=float(np.linalg.norm(branch - ref)),
        direction_error_norm=float(np.linalg.norm(sys_state - ref)),
        reference_label=protocol.reference_label,
        reference_state=ref,
        step_survivals=step_survivals,
    )


@dataclass
class SweepResult:
    steps: np.ndarray
    errors: np.ndarray
    survivals: np.ndarray
    error_slope: float
    survival_deficit_slope: float

    def rows(self):
        return list(zip(self.steps.tolist(), self.errors.tolist(), self.survivals.tolist()))


def _loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    mask = y > 0
    if mask.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)[0])


def zeno_scaling_sweep(protocol: ZenoProtocol, psi0: np.ndarray, step_counts) -> SweepResult:
    """Rerun the protocol over increasing step counts and fit log-log slopes.

    The ``steps`` field of ``protocol`` is ignored; total time is fixed.
    """
    counts = list(step_counts)
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise PreconditionError("step counts must be strictly increasing")
    errors = []
    survivals = []
    for n_steps in counts:
        p = ZenoProtocol(protocol.kind, protocol.a, protocol.b, protocol.t, n_steps)
        res = zeno_evolve(p, psi0)
        errors.append(res.error_norm)
        survivals.append(res.survival_probability)
    steps = np.array(counts, dtype=float)
    errors = np.array(errors)
    survivals = np.array(survivals)
    return SweepResult(
        steps=steps,
        errors=errors,
        survivals=survivals,
        error_slope=_loglog_slope(steps, errors),
        survival_deficit_slope=_loglog_slope(steps, 1.0 - survivals),
    )
