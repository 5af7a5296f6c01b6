"""Ground-energy solvers: dense oracle, Lanczos agreement, promise decisions."""

import numpy as np
import pytest

from pinq.errors import PreconditionError
from pinq.pauli import HamiltonianSum
from pinq.pinning import PinSpec, PromiseBounds
from pinq.spectral import (
    GAP_VIOLATION,
    NO,
    YES,
    min_eig,
    pinned_min_energy,
    promise_decide,
)


def _random_sum(rng, n, m=6, letters="IXZ"):
    terms = [
        (float(rng.uniform(-1, 1)), "".join(rng.choice(list(letters)) for _ in range(n)))
        for _ in range(m)
    ]
    return HamiltonianSum.from_terms(n, terms)


def test_min_eig_closed_forms():
    assert min_eig(HamiltonianSum.from_terms(1, [(1.0, "Z")])).value == pytest.approx(-1.0)
    h = HamiltonianSum.from_terms(1, [(1.0, "Z"), (1.0, "X")])
    assert min_eig(h).value == pytest.approx(-np.sqrt(2.0), abs=1e-14)


def test_iterative_matches_dense_at_8_qubits():
    rng = np.random.default_rng(100)
    h = _random_sum(rng, 8, m=10)
    dense = min_eig(h, method="dense")
    it = min_eig(h, method="iterative", seed=0)
    assert it.value == pytest.approx(dense.value, abs=1e-8)
    assert it.residual <= 1e-8


def test_iterative_is_deterministic():
    rng = np.random.default_rng(7)
    h = _random_sum(rng, 6)
    v1 = min_eig(h, method="iterative", seed=3)
    v2 = min_eig(h, method="iterative", seed=3)
    assert v1.value == v2.value
    np.testing.assert_array_equal(v1.vector, v2.vector)


def test_min_eig_rejects_non_hermitian():
    with pytest.raises(PreconditionError):
        min_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_variational_bound():
    rng = np.random.default_rng(11)
    h = _random_sum(rng, 5)
    res = min_eig(h, method="dense")
    for _ in range(50):
        psi = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        psi /= np.linalg.norm(psi)
        assert h.expectation(psi) >= res.value - 1e-8


def test_pinned_energy_tensor_identity():
    # H (x) I with the extra qubit pinned to |0> has the same minimum as H
    rng = np.random.default_rng(13)
    h = _random_sum(rng, 3)
    emb = HamiltonianSum.from_terms(4, [(t.coeff, t.string.label() + "I") for t in h.terms])
    val = pinned_min_energy(emb, PinSpec.of((3, "0"))).value
    assert val == pytest.approx(min_eig(h).value, abs=1e-12)


def test_pinned_energy_full_pin_is_expectation():
    h = HamiltonianSum.from_terms(2, [(0.4, "ZX"), (0.6, "XI")])
    pin = PinSpec.of((0, "+"), (1, "-"))
    val = pinned_min_energy(h, pin).value
    state = pin.state_vector()
    expected = state @ np.asarray(h.to_matrix(dense=True)) @ state
    assert val == pytest.approx(expected, abs=1e-14)


def test_promise_decide_branches():
    h = HamiltonianSum.from_terms(1, [(1.0, "Z")])  # pinned min with |1>: -1
    pin = PinSpec.of((0, "1"))
    assert promise_decide(h, pin, PromiseBounds(-0.9, 0.0)) == YES
    assert promise_decide(h, pin, PromiseBounds(-2.0, -1.5)) == NO
    assert promise_decide(h, pin, PromiseBounds(-1.5, -0.5)) == GAP_VIOLATION


def test_lanczos_handles_degenerate_spectrum():
    # heavily degenerate: single ZZ on 6 qubits
    h = HamiltonianSum.from_terms(6, [(1.0, "ZZIIII")])
    assert min_eig(h, method="iterative").value == pytest.approx(-1.0, abs=1e-9)
