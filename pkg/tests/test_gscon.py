"""Ground-space traversal: the stoquastic construction and path verification."""

import numpy as np
import pytest

from pinq.errors import PreconditionError
from pinq.gscon import (
    GsconInstance,
    UnitaryStep,
    apply_gate,
    build_stoquastic_gscon,
    instance_from_json,
    instance_to_json,
    verify_path,
    witness_traversal,
)
from pinq.pauli import HamiltonianSum, is_stoquastic

PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2.0)


def _xbasis(bits):
    v = np.array([1.0])
    for b in bits:
        v = np.kron(v, PLUS if b == "+" else MINUS)
    return v


def _middle_state(psi, mid, third="---"):
    return np.kron(np.kron(psi, _xbasis(mid)), _xbasis(third))


def _r3_matrix():
    # 3/4 I - (X1X2 + X2X3 + X1X3)/4 on three qubits
    h = HamiltonianSum.from_terms(
        3, [(0.75, "III"), (-0.25, "XXI"), (-0.25, "IXX"), (-0.25, "XIX")]
    )
    return np.asarray(h.to_matrix(dense=True))


def test_r3_eigenstructure():
    r3 = _r3_matrix()
    for mid in ("---", "+++"):
        v = _xbasis(mid)
        assert v @ r3 @ v == pytest.approx(0.0, abs=1e-14)
    for mid in ("+--", "-+-", "--+", "++-", "+-+", "-++"):
        v = _xbasis(mid)
        assert v @ r3 @ v == pytest.approx(1.0, abs=1e-14)


def test_q_operator_on_uniform_minus():
    q = HamiltonianSum.from_terms(
        3, [(1 / 3, "XII"), (1 / 3, "IXI"), (1 / 3, "IIX")]
    )
    v = _xbasis("---")
    np.testing.assert_allclose(np.asarray(q.to_matrix(dense=True)) @ v, -v, atol=1e-14)


def test_construction_is_termwise_stoquastic():
    rng = np.random.default_rng(5)
    kinds = ["ZZ", "ZX", "XX", "Z", "X"]
    for _ in range(10):
        n = int(rng.integers(2, 5))
        terms = []
        for _ in range(int(rng.integers(1, 5))):
            kind = rng.choice(kinds)
            qs = rng.choice(n, size=len(kind), replace=False)
            label = ["I"] * n
            for ch, q in zip(kind, qs):
                label[int(q)] = ch
            terms.append((float(rng.uniform(-1, 1)), "".join(label)))
        h = HamiltonianSum.from_terms(n, terms)
        build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
        assert is_stoquastic(build.hamiltonian, termwise=True).verdict
        # the positive split must be strictly off-diagonal where it is used


def test_expectation_identities_xx_example():
    h = HamiltonianSum.from_terms(2, [(1.0, "XX")])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    hm = build.hamiltonian.to_matrix()
    hsys = np.asarray(h.to_matrix(dense=True))
    rng = np.random.default_rng(8)
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    st = _middle_state(psi, "+--")
    e = np.real(np.vdot(st, hm @ st))
    assert e == pytest.approx(np.real(np.vdot(psi, hsys @ psi)), abs=1e-10)


def test_expectation_identities_all_strings():
    rng = np.random.default_rng(23)
    h = HamiltonianSum.from_terms(
        3, [(0.8, "ZXI"), (-0.5, "IXX"), (0.3, "ZIZ"), (-0.9, "XII")]
    )
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    hm = build.hamiltonian.to_matrix()
    hsys = np.asarray(h.to_matrix(dense=True))
    for _ in range(25):
        psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        psi /= np.linalg.norm(psi)
        e_sys = np.real(np.vdot(psi, hsys @ psi))
        for mid in ("---", "+++", "+--", "-+-", "--+", "++-", "+-+", "-++"):
            st = _middle_state(psi, mid)
            e = np.real(np.vdot(st, hm @ st))
            expected = 0.0 if mid in ("---", "+++") else e_sys
            assert e == pytest.approx(expected, abs=1e-10)


def test_start_and_target_states():
    h = HamiltonianSum.from_terms(2, [(-1.0, "ZZ")])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    start = build.instance.start_state()
    target = build.instance.target_state()
    zero_sys = np.zeros(4)
    zero_sys[0] = 1.0
    np.testing.assert_allclose(start, _middle_state(zero_sys, "---"), atol=1e-14)
    np.testing.assert_allclose(target, _middle_state(zero_sys, "+++"), atol=1e-14)


def test_verify_path_trivial_yes():
    h = HamiltonianSum.from_terms(2, [(-1.0, "ZZ")])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    inst = build.instance
    same = GsconInstance(
        hamiltonian=inst.hamiltonian,
        k=inst.k, eta1=inst.eta1, eta2=inst.eta2, eta3=0.5, eta4=float(inst.eta4),
        delta=min(inst.delta, inst.eta4 - 0.5), l=inst.l, m=inst.m,
        start_circuit=inst.start_circuit, target_circuit=inst.start_circuit,
    )
    verdict = verify_path(same, [])
    assert verdict.accepted
    assert verdict.final_distance == pytest.approx(0.0, abs=1e-14)


def test_verify_path_rejects_overlocal_step():
    h = HamiltonianSum.from_terms(2, [(-1.0, "ZZ")])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    bad = UnitaryStep((0, 1, 2), np.eye(8))
    with pytest.raises(PreconditionError, match="step 0"):
        verify_path(build.instance, [bad])


def test_verify_path_rejects_non_unitary():
    h = HamiltonianSum.from_terms(2, [(-1.0, "ZZ")])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    bad = UnitaryStep((0,), np.array([[1.0, 0.0], [0.0, 2.0]]))
    with pytest.raises(PreconditionError, match="not unitary"):
        verify_path(build.instance, [bad])


def test_witness_traversal_empty_hamiltonian():
    h = HamiltonianSum.from_terms(2, [])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    steps = witness_traversal(build, [])
    verdict = verify_path(build.instance, steps)
    assert verdict.accepted
    # only the third-register penalty term could contribute, and it vanishes
    assert all(abs(e) <= 1e-12 for e in verdict.energies)


def test_witness_traversal_zz_flip_energies():
    # ground state |00> of -ZZ is the start of the first register already,
    # so an empty witness circuit suffices; flip-phase energies equal -1
    h = HamiltonianSum.from_terms(2, [(-1.0, "ZZ")])
    alpha = -1.0 + 1e-6
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    steps = witness_traversal(build, [])
    assert len(steps) == 3
    state = build.instance.start_state()
    energies = []
    hm = build.hamiltonian.to_matrix()
    for step in steps:
        state = apply_gate(state, step, build.instance.n)
        energies.append(float(np.real(np.vdot(state, hm @ state))))
    assert energies[0] == pytest.approx(-1.0, abs=1e-12)
    assert energies[1] == pytest.approx(-1.0, abs=1e-12)
    assert energies[2] == pytest.approx(0.0, abs=1e-12)
    assert energies[0] <= alpha and energies[1] <= alpha


def test_witness_traversal_third_register_stays_pinned():
    h = HamiltonianSum.from_terms(2, [(-1.0, "ZZ")])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    steps = witness_traversal(build, [])
    proj = np.outer(_xbasis("---"), _xbasis("---"))
    state = build.instance.start_state()
    n = build.instance.n
    for step in steps:
        state = apply_gate(state, step, n)
        tensor = state.reshape(-1, 8)
        fidelity = float(np.real(np.einsum("ia,ab,ib->", tensor.conj(), proj, tensor)))
        assert fidelity == pytest.approx(1.0, abs=1e-12)


def test_witness_traversal_with_rotation_witness():
    # H = Z + X on one qubit; a single-qubit rotation prepares its ground state
    h = HamiltonianSum.from_terms(1, [(1.0, "Z"), (1.0, "X")])
    gs = np.linalg.eigh(np.asarray(h.to_matrix(dense=True)))[1][:, 0]
    u = np.column_stack([gs, np.array([-gs[1], gs[0]])])
    witness = [UnitaryStep((0,), u)]
    build = build_stoquastic_gscon(h, alpha=1e-9, beta=0.5)
    steps = witness_traversal(build, witness)
    assert len(steps) == 5  # prepare, three flips, uncompute
    verdict = verify_path(build.instance, steps)
    assert verdict.accepted
    assert verdict.max_intermediate_energy <= 1e-9
    assert verdict.final_distance <= 1e-9


def test_traversal_property_random_two_qubit():
    rng = np.random.default_rng(31)
    kinds = ["ZZ", "ZX", "XX", "Z", "X"]
    for _ in range(8):
        terms = []
        for _ in range(3):
            kind = rng.choice(kinds)
            qs = rng.choice(2, size=len(kind), replace=False)
            label = ["I"] * 2
            for ch, q in zip(kind, qs):
                label[int(q)] = ch
            terms.append((float(rng.uniform(-1, 1)), "".join(label)))
        h = HamiltonianSum.from_terms(2, terms)
        hsys = np.asarray(h.to_matrix(dense=True))
        evals, evecs = np.linalg.eigh(hsys)
        if evals[0] > -1e-3:
            continue  # witness threshold 0 needs a negative-energy witness
        gs = evecs[:, 0]
        # two-qubit witness unitary with the ground state as its first column
        q, _ = np.linalg.qr(np.column_stack([gs, np.eye(4)[:, 1:]]))
        u = q * np.sign(np.vdot(q[:, 0], gs))
        build = build_stoquastic_gscon(h, alpha=1e-9, beta=0.5)
        steps = witness_traversal(build, [UnitaryStep((0, 1), u)])
        verdict = verify_path(build.instance, steps)
        assert verdict.accepted, verdict


def test_instance_energy_check_at_load():
    h = HamiltonianSum.from_terms(2, [(-1.0, "ZZ")])
    with pytest.raises(PreconditionError, match="endpoint energies"):
        build_stoquastic_gscon(h, alpha=-0.5, beta=0.5)


def test_instance_json_round_trip():
    h = HamiltonianSum.from_terms(2, [(-0.8, "ZZ"), (0.3, "XI")])
    build = build_stoquastic_gscon(h, alpha=0.0, beta=0.5)
    data = instance_to_json(build.instance)
    inst2 = instance_from_json(data)
    assert inst2.n == build.instance.n
    assert inst2.eta1 == build.instance.eta1
    np.testing.assert_allclose(
        inst2.start_state(), build.instance.start_state(), atol=1e-15
    )
    terms1 = [(t.coeff, t.string.label()) for t in build.instance.hamiltonian.terms]
    terms2 = [(t.coeff, t.string.label()) for t in inst2.hamiltonian.terms]
    assert terms1 == terms2


def test_eta_relation_validation():
    h = HamiltonianSum.from_terms(1, [])
    with pytest.raises(PreconditionError, match="eta2"):
        GsconInstance(
            hamiltonian=h, k=1, eta1=0.0, eta2=0.05, eta3=1e-6, eta4=1.0,
            delta=0.1, l=2, m=10, start_circuit=(), target_circuit=(),
        )
