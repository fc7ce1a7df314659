import numpy as np
import pytest

from steerkit import qstate


def test_density_from_ket_basis_projector():
    rho = qstate.density_from_ket([1, 0])
    assert np.allclose(rho, np.diag([1, 0]))


def test_density_from_ket_singlet():
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = qstate.density_from_ket(singlet)
    expected = np.zeros((4, 4))
    expected[1, 1] = expected[2, 2] = 0.5
    expected[1, 2] = expected[2, 1] = -0.5
    assert np.allclose(rho, expected)


def test_density_from_ket_chi1_diagonal():
    # outer product computed by hand: |chi1| has weights 1/6, 1/6, 4/6 on
    # |010>, |001>, |100>
    rho = qstate.density_from_ket(qstate.chi1())
    assert np.allclose(np.diag(rho).real,
                       [0, 1 / 6, 1 / 6, 0, 2 / 3, 0, 0, 0])


def test_density_from_ket_rejects_unnormalized():
    with pytest.raises(ValueError):
        qstate.density_from_ket([1, 1])


def test_qubit_ordering_convention():
    # qubit 0 is the leftmost symbol: |100> must sit at index 4
    psi = qstate.family_state(np.pi / 2, np.pi / 2)
    assert abs(psi[4]) == pytest.approx(1 / np.sqrt(2))
    assert abs(psi[2]) == pytest.approx(1 / np.sqrt(2))
    assert abs(psi[1]) < 1e-12


def test_partial_trace_product_state():
    rho_a = qstate.density_from_ket([1, 0])
    rho_b = np.eye(2) / 2
    rho = qstate.tensor(rho_a, rho_b)
    assert np.allclose(qstate.partial_trace(rho, [0]), rho_a)
    assert np.allclose(qstate.partial_trace(rho, [1]), rho_b)


def test_partial_trace_singlet_marginal():
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = qstate.density_from_ket(singlet)
    assert np.allclose(qstate.partial_trace(rho, [0]), np.eye(2) / 2)


def test_partial_trace_bad_index():
    rho = np.eye(4) / 4
    with pytest.raises(ValueError):
        qstate.partial_trace(rho, [2])
    with pytest.raises(ValueError):
        qstate.partial_trace(rho, [])


def test_partial_trace_preserves_trace_and_psd():
    rng = np.random.default_rng(7)
    for _ in range(20):
        rho = qstate.random_mixed(3, rng)
        for keep in ([0], [0, 1], [0, 2], [1, 2]):
            red = qstate.partial_trace(rho, keep)
            assert np.trace(red).real == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.eigvalsh(red).min() > -1e-12


def test_pauli_decompose_product_00():
    rho = qstate.density_from_ket([1, 0, 0, 0])
    d = qstate.pauli_decompose(rho)
    assert np.allclose(d.a, [0, 0, 1])
    assert np.allclose(d.b, [0, 0, 1])
    assert np.allclose(d.T, np.diag([0, 0, 1]))


def test_pauli_decompose_singlet():
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    d = qstate.pauli_decompose(qstate.density_from_ket(singlet))
    assert np.allclose(d.a, 0, atol=1e-12)
    assert np.allclose(d.b, 0, atol=1e-12)
    assert np.allclose(d.T, -np.eye(3))


def test_pauli_decompose_bell_diagonal():
    # oracle: weighted sum of the four Bell-state correlation matrices
    # T(psi-) = diag(-1,-1,-1), T(psi+) = diag(1,1,-1),
    # T(phi-) = diag(-1,1,1),  T(phi+) = diag(1,-1,1)
    weights = np.array([0.6, 0.1, 0.1, 0.2])
    basis_T = np.array([[-1, -1, -1], [1, 1, -1], [-1, 1, 1], [1, -1, 1]])
    expected = weights @ basis_T
    assert np.allclose(expected, [-0.4, -0.6, -0.4])
    d = qstate.pauli_decompose(qstate.bell_diagonal(weights))
    assert np.allclose(d.a, 0, atol=1e-12)
    assert np.allclose(d.b, 0, atol=1e-12)
    assert np.allclose(d.T, np.diag(expected))


def test_pauli_recompose_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(25):
        rho = qstate.random_mixed(2, rng)
        d = qstate.pauli_decompose(rho)
        assert np.allclose(qstate.pauli_recompose(d), rho, atol=1e-12)


def test_pauli_recompose_maximally_mixed():
    d = qstate.PauliDecomposition(a=np.zeros(3), b=np.zeros(3), T=np.zeros((3, 3)))
    assert np.allclose(qstate.pauli_recompose(d), np.eye(4) / 4)


def test_pauli_recompose_rejects_unphysical():
    d = qstate.PauliDecomposition(
        a=np.zeros(3), b=np.zeros(3), T=np.diag([1.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        qstate.pauli_recompose(d)


def test_fidelity_pure_examples():
    psi = qstate.haar_random_pure(3, np.random.default_rng(0))
    assert qstate.fidelity_pure(qstate.density_from_ket(psi), psi) == pytest.approx(1.0)
    assert qstate.fidelity_pure(np.eye(8) / 8, psi) == pytest.approx(1 / 8)
    # chi1 and chi2 have disjoint supports, so the mixture has fidelity 1/2
    assert qstate.fidelity_pure(qstate.mixed_w_state(), qstate.chi1()) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        qstate.fidelity_pure(np.eye(4) / 4, psi)


def test_purity_examples():
    psi = qstate.haar_random_pure(2, np.random.default_rng(1))
    assert qstate.purity(qstate.density_from_ket(psi)) == pytest.approx(1.0)
    assert qstate.purity(np.eye(2) / 2) == pytest.approx(0.5)
    assert qstate.purity(qstate.mixed_w_state()) == pytest.approx(0.5)


def test_family_state_substitutions():
    psi = qstate.family_state(np.pi / 2, np.pi / 4)
    s = 1 / np.sqrt(2)
    expected = np.zeros(8)
    expected[4] = s
    expected[2] = expected[1] = 0.5
    assert np.allclose(psi, expected)
    with pytest.raises(ValueError):
        qstate.family_state(-0.1, 0.2)


def test_family_state_normalized_on_grid():
    for a in np.linspace(0, np.pi / 2, 10):
        for b in np.linspace(0, np.pi / 2, 10):
            psi = qstate.family_state(a, b)
            assert np.vdot(psi, psi).real == pytest.approx(1.0, abs=1e-12)


def test_mixed_w_state_construction():
    assert abs(np.vdot(qstate.chi1(), qstate.chi2())) < 1e-14
    rho = qstate.mixed_w_state()
    qstate.check_density_matrix(rho)
    assert qstate.purity(rho) == pytest.approx(0.5)


def test_bell_diagonal_limits():
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(qstate.bell_diagonal([1, 0, 0, 0]),
                       qstate.density_from_ket(singlet))
    assert np.allclose(qstate.bell_diagonal([0.25] * 4), np.eye(4) / 4)
    with pytest.raises(ValueError):
        qstate.bell_diagonal([0.5, 0.6, 0, 0])


def test_pure_two_qubit():
    psi = qstate.pure_two_qubit(np.pi / 4)
    assert np.allclose(psi, [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0])
    assert np.allclose(qstate.pure_two_qubit(0.0), [0, 1, 0, 0])


def test_flip_conjugate_examples():
    assert np.allclose(qstate.flip_conjugate(np.eye(8)), np.eye(8))
    zii = qstate.tensor(qstate.SIGMA_Z, qstate.IDENTITY_2, qstate.IDENTITY_2)
    assert np.allclose(qstate.flip_conjugate(zii), -zii)
    # involution
    rng = np.random.default_rng(11)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    m = m + m.conj().T
    assert np.allclose(qstate.flip_conjugate(qstate.flip_conjugate(m)), m)


def test_flip_conjugate_mixing_identity():
    # Tr[M rho] = (Tr[M chi1] + Tr[M' chi1]) / 2 for random Hermitian M
    rng = np.random.default_rng(21)
    rho = qstate.mixed_w_state()
    c1 = qstate.chi1()
    for _ in range(100):
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        m = m + m.conj().T
        lhs = np.trace(m @ rho).real
        mp = qstate.flip_conjugate(m)
        rhs = 0.5 * (np.vdot(c1, m @ c1).real + np.vdot(c1, mp @ c1).real)
        assert lhs == pytest.approx(rhs, abs=1e-12 * max(1, abs(lhs)))


def test_constructors_pass_density_invariants():
    states = [
        qstate.family_state(0.3, 1.1),
        qstate.chi1(),
        qstate.chi2(),
        qstate.pure_two_qubit(0.7),
    ]
    for psi in states:
        qstate.check_density_matrix(qstate.density_from_ket(psi))
