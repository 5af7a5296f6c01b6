"""Covariance-matrix machinery, Givens decomposition, interpolation paths.

The Fock-space oracle (see oracles.py) is independent of the covariance
code: it builds Jordan-Wigner Majorana operators as dense matrices,
exponentiates rotation generators, and evaluates quadratic-Hamiltonian
expectations directly.
"""

import numpy as np
import pytest
import scipy.linalg

from oracles import fock_covariance as _fock_covariance
from oracles import fock_hamiltonian as _fock_hamiltonian
from oracles import fock_state as _fock_state
from oracles import majoranas as _majoranas

from pinq.errors import PreconditionError
from pinq.ffgauss import (
    CovMatrix,
    GivensRotation,
    HamMatrix,
    block_diagonal_form,
    canonical_gamma0,
    energy,
    givens_decompose,
    interpolation_path,
    near_identity_constant,
    pfaffian_sign,
    pure_orthogonal_factor,
    reconstruct,
    verify_ff_path,
)


def test_fock_conventions_vacuum():
    ms = _majoranas(2)
    vac = np.zeros(4, dtype=complex)
    vac[0] = 1.0
    np.testing.assert_allclose(
        _fock_covariance(vac, ms), canonical_gamma0(2, "even").mat, atol=1e-14
    )


def test_fock_state_reproduces_covariance():
    rng = np.random.default_rng(3)
    for seed in range(4):
        n = 3
        g0 = canonical_gamma0(n, "even" if seed % 2 == 0 else "odd")
        r = np.random.default_rng(seed)
        m = r.standard_normal((2 * n, 2 * n))
        q, _ = np.linalg.qr(m)
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        gamma = CovMatrix(q @ g0.mat @ q.T)
        ms = _majoranas(n)
        state = _fock_state(gamma, ms)
        assert np.linalg.norm(state) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(_fock_covariance(state, ms), gamma.mat, atol=1e-10)


def test_energy_matches_fock_oracle():
    rng = np.random.default_rng(9)
    for n in (2, 3, 4):
        ms = _majoranas(n)
        for _ in range(3):
            a = rng.standard_normal((2 * n, 2 * n))
            h = HamMatrix((a - a.T) / 2.0)
            m = rng.standard_normal((2 * n, 2 * n))
            q, _ = np.linalg.qr(m)
            if np.linalg.det(q) < 0:
                q[:, 0] *= -1
            gamma = CovMatrix(q @ canonical_gamma0(n, "even").mat @ q.T)
            state = _fock_state(gamma, ms)
            hf = _fock_hamiltonian(h.mat, ms)
            fock_val = np.real(np.vdot(state, hf @ state))
            assert energy(gamma, h) == pytest.approx(fock_val, abs=1e-8)


def test_fock_ground_energy_matches_covariance_minimum():
    # the quadratic ground energy is -2 * sum of block weight magnitudes
    rng = np.random.default_rng(10)
    n = 3
    ms = _majoranas(n)
    a = rng.standard_normal((2 * n, 2 * n))
    h = HamMatrix((a - a.T) / 2.0)
    hb, _ = block_diagonal_form(h)
    fock_min = float(np.linalg.eigvalsh(_fock_hamiltonian(h.mat, ms))[0])
    assert fock_min == pytest.approx(-2.0 * np.sum(np.abs(hb.block_weights())), abs=1e-8)


# ---------------------------------------------------------------------------
# basic types and energies
# ---------------------------------------------------------------------------


def test_canonical_gamma0_displays():
    even = canonical_gamma0(1, "even").mat
    np.testing.assert_array_equal(even, [[0.0, 1.0], [-1.0, 0.0]])
    odd = canonical_gamma0(2, "odd").mat
    np.testing.assert_array_equal(odd[:2, :2], [[0.0, -1.0], [1.0, 0.0]])
    np.testing.assert_array_equal(odd[2:, 2:], [[0.0, 1.0], [-1.0, 0.0]])


def test_gamma0_purity_exact():
    for parity in ("even", "odd"):
        g = canonical_gamma0(3, parity)
        assert g.purity_defect() == 0.0


def test_energy_example():
    g = canonical_gamma0(1, "even")
    h = HamMatrix([[0.0, 1.0], [-1.0, 0.0]])
    assert energy(g, h) == pytest.approx(-2.0)


def test_energy_rotation_invariance():
    rng = np.random.default_rng(1)
    n = 3
    a = rng.standard_normal((2 * n, 2 * n))
    h = (a - a.T) / 2.0
    g = canonical_gamma0(n, "even").mat
    m = rng.standard_normal((2 * n, 2 * n))
    o, _ = np.linalg.qr(m)
    assert np.trace((o @ g @ o.T) @ (o @ h @ o.T)) == pytest.approx(np.trace(g @ h), abs=1e-12)


def test_purity_preserved_by_conjugation():
    rng = np.random.default_rng(2)
    g = canonical_gamma0(4, "odd")
    m = rng.standard_normal((8, 8))
    o, _ = np.linalg.qr(m)
    conj = g.conjugated(o)
    assert abs(conj.purity_defect() - g.purity_defect()) <= 1e-12


def test_pfaffian_signs():
    assert pfaffian_sign(canonical_gamma0(3, "even").mat) == 1
    assert pfaffian_sign(canonical_gamma0(3, "odd").mat) == -1
    # conjugation by an improper orthogonal flips parity
    g = canonical_gamma0(2, "even").mat
    f = np.diag([1.0, -1.0, 1.0, 1.0])
    assert pfaffian_sign(f @ g @ f.T) == -1


def test_energy_depends_only_on_diagonal_blocks():
    rng = np.random.default_rng(6)
    n = 3
    hm = np.zeros((2 * n, 2 * n))
    for j, w in enumerate([0.9, 0.5, 0.2]):
        hm[2 * j, 2 * j + 1] = w
        hm[2 * j + 1, 2 * j] = -w
    h = HamMatrix(hm)
    m = rng.standard_normal((2 * n, 2 * n))
    q, _ = np.linalg.qr(m)
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    g = q @ canonical_gamma0(n, "even").mat @ q.T
    stripped = np.zeros_like(g)
    for j in range(n):
        stripped[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = g[2 * j : 2 * j + 2, 2 * j : 2 * j + 2]
    assert np.trace(g @ hm) == pytest.approx(np.trace(stripped @ hm), abs=1e-12)


# ---------------------------------------------------------------------------
# Givens decomposition
# ---------------------------------------------------------------------------


def _random_so(dim, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def test_decompose_identity_is_empty():
    assert givens_decompose(np.eye(6)) == []


def test_decompose_single_rotation():
    rot = GivensRotation(0, 1, 0.3)
    out = givens_decompose(rot.matrix(6))
    assert len(out) == 1
    assert out[0].p == 0 and out[0].q == 1
    assert out[0].theta == pytest.approx(0.3, abs=1e-14)


def test_decompose_random_so():
    for n in (1, 2, 3, 4, 5, 6):
        dim = 2 * n
        for seed in range(5):
            o = _random_so(dim, 10 * n + seed)
            rots = givens_decompose(o)
            assert len(rots) <= n * (2 * n - 1)
            assert np.linalg.norm(reconstruct(rots, dim) - o) <= 1e-10


def test_decompose_rejects_improper():
    o = np.diag([1.0, 1.0, -1.0])
    with pytest.raises(PreconditionError, match="determinant"):
        givens_decompose(o)
    with pytest.raises(PreconditionError, match="orthogonal"):
        givens_decompose(np.ones((3, 3)))


def test_decompose_diag_minus_pairs():
    o = np.diag([-1.0, -1.0, 1.0, 1.0])
    rots = givens_decompose(o)
    assert np.linalg.norm(reconstruct(rots, 4) - o) <= 1e-12


def test_near_identity_angles_small():
    rng = np.random.default_rng(12)
    for eps in (0.1, 0.03, 0.01):
        dim = 8
        a = rng.standard_normal((dim, dim))
        k = (a - a.T) / 2.0
        k *= eps / (2 * np.linalg.norm(k, 2))
        o = scipy.linalg.expm(k)
        dist = np.linalg.norm(o - np.eye(dim), 2)
        assert dist <= eps
        rots = givens_decompose(o)
        c = near_identity_constant(o, rots)
        assert max(abs(r.theta) for r in rots) <= 10.0 * dist
        assert c <= 10.0


def test_pure_orthogonal_factor_round_trip():
    for parity in ("even", "odd"):
        for seed in range(4):
            n = 3
            g0 = canonical_gamma0(n, parity)
            q = _random_so(2 * n, seed + (0 if parity == "even" else 100))
            gamma = CovMatrix(q @ g0.mat @ q.T)
            o = pure_orthogonal_factor(gamma)
            np.testing.assert_allclose(o @ g0.mat @ o.T, gamma.mat, atol=1e-9)
            assert np.linalg.det(o) == pytest.approx(1.0, abs=1e-9)


def test_block_diagonal_form():
    rng = np.random.default_rng(40)
    a = rng.standard_normal((6, 6))
    h = HamMatrix((a - a.T) / 2.0)
    hb, o = block_diagonal_form(h)
    assert hb.is_block_diagonal
    np.testing.assert_allclose(o @ hb.mat @ o.T, h.mat, atol=1e-10)
    assert np.linalg.det(o) == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# interpolation paths
# ---------------------------------------------------------------------------


def _block_h(weights):
    n = len(weights)
    hm = np.zeros((2 * n, 2 * n))
    for j, w in enumerate(weights):
        hm[2 * j, 2 * j + 1] = w
        hm[2 * j + 1, 2 * j] = -w
    return HamMatrix(hm)


def test_trivial_path():
    g = canonical_gamma0(2, "even")
    h = _block_h([1.0, 1.0])
    path = interpolation_path(g, g, h, 4)
    assert path.rotations == ()
    assert all(e == path.grid_energies[0] for e in path.grid_energies)


def test_single_mode_constant_energy():
    # one mode: same parity forces identical states; the path is constant
    g = canonical_gamma0(1, "even")
    h = _block_h([0.7])
    path = interpolation_path(g, g, h, 3)
    assert path.rotations == ()
    assert energy(g, h) == pytest.approx(path.grid_energies[0])


def test_parity_mismatch_rejected():
    ge = canonical_gamma0(2, "even")
    go = canonical_gamma0(2, "odd")
    with pytest.raises(PreconditionError, match="parity"):
        interpolation_path(ge, go, _block_h([1.0, 1.0]), 4)


def test_impure_input_rejected():
    g = CovMatrix(0.5 * canonical_gamma0(2, "even").mat)
    with pytest.raises(PreconditionError, match="pure"):
        interpolation_path(g, canonical_gamma0(2, "even"), _block_h([1.0, 1.0]), 4)


def test_non_block_h_rejected():
    g = canonical_gamma0(2, "even")
    hm = np.zeros((4, 4))
    hm[0, 3] = 1.0
    hm[3, 0] = -1.0
    with pytest.raises(PreconditionError, match="block"):
        interpolation_path(g, CovMatrix(-g.mat), HamMatrix(hm), 4)


def test_bundled_two_mode_example():
    g_start = canonical_gamma0(2, "even")
    g_end = CovMatrix(-g_start.mat)
    h = _block_h([1.0, 1.0])
    e0, e1 = energy(g_start, h), energy(g_end, h)
    assert (e0, e1) == (-4.0, 4.0)
    devs = []
    for n_steps in (8, 32, 128):
        path = interpolation_path(g_start, g_end, h, n_steps)
        grid = np.array(path.grid_energies)
        ramp = np.linspace(e0, e1, n_steps + 1)
        assert np.max(np.abs(grid - ramp)) <= max(0.05, 4.0 / n_steps)
        devs.append(path.ramp_deviation)
        verdict = verify_ff_path(path, h, eta1=max(e0, e1) + path.ramp_deviation + 1e-9)
        assert verdict.ok, verdict.failures
        assert verdict.max_purity_defect <= 1e-8
        assert all(len(r.modes) <= 2 for r in path.rotations)
    assert devs[2] <= devs[1] <= devs[0]
    assert devs[2] <= 0.05


def test_path_energy_band():
    g_start = canonical_gamma0(2, "even")
    g_end = CovMatrix(-g_start.mat)
    h = _block_h([1.0, 0.6])
    path = interpolation_path(g_start, g_end, h, 16)
    lo = min(energy(g_start, h), energy(g_end, h)) - path.ramp_deviation - 1e-12
    hi = max(energy(g_start, h), energy(g_end, h)) + path.ramp_deviation + 1e-12
    gamma = g_start.mat.copy()
    for rot in path.rotations:
        gamma = rot.matrix(4) @ gamma @ rot.matrix(4).T
        assert lo <= np.trace(gamma @ h.mat) <= hi


def test_generic_three_mode_path():
    g0 = canonical_gamma0(3, "even")
    q1 = _random_so(6, 1)
    q2 = _random_so(6, 2)
    gs = CovMatrix(q1 @ g0.mat @ q1.T)
    ge = CovMatrix(q2 @ g0.mat @ q2.T)
    h = _block_h([1.0, 0.7, 0.4])
    path = interpolation_path(gs, ge, h, 8, alignment_tol=1.0)
    grid = np.array(path.grid_energies)
    ramp = np.linspace(energy(gs, h), energy(ge, h), 9)
    np.testing.assert_allclose(grid, ramp, atol=1e-9)
    verdict = verify_ff_path(path, h, eta1=float(np.max(grid)) + path.ramp_deviation + 1e-9)
    assert verdict.ok, verdict.failures
    assert verdict.endpoint_error <= 1e-8


def test_verify_flags_overlocal_rotation(monkeypatch):
    g = canonical_gamma0(2, "even")
    h = _block_h([1.0, 1.0])
    path = interpolation_path(g, CovMatrix(-g.mat), h, 4)

    class ThreeModeRotation(GivensRotation):
        @property
        def modes(self):
            return (0, 1, 2)

    doctored = list(path.rotations)
    doctored[0] = ThreeModeRotation(doctored[0].p, doctored[0].q, doctored[0].theta)
    path.rotations = tuple(doctored)
    verdict = verify_ff_path(path, h, eta1=10.0)
    assert not verdict.ok
    assert any("modes" in f for f in verdict.failures)


def test_verify_flags_wrong_endpoint():
    g = canonical_gamma0(2, "even")
    h = _block_h([1.0, 1.0])
    path = interpolation_path(g, CovMatrix(-g.mat), h, 4)
    path.rotations = path.rotations[1:]  # break the endpoint
    verdict = verify_ff_path(path, h, eta1=10.0)
    assert not verdict.ok
    assert any("endpoint" in f for f in verdict.failures)
