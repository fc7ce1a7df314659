"""Finite-dimensional quantum state algebra for 1-3 qubits.

Conventions: qubit 0 is the leftmost ket symbol (Alice) and the most
significant bit of the computational-basis index, so |100> sits at index 4
of an 8-component amplitude vector. All arithmetic is double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

_SQRT2 = np.sqrt(2.0)
# Bell basis, fixed ordering (psi-, psi+, phi-, phi+).
BELL_KETS = (
    np.array([0, 1, -1, 0], dtype=complex) / _SQRT2,
    np.array([0, 1, 1, 0], dtype=complex) / _SQRT2,
    np.array([1, 0, 0, -1], dtype=complex) / _SQRT2,
    np.array([1, 0, 0, 1], dtype=complex) / _SQRT2,
)


def num_qubits(dim: int) -> int:
    """Qubit count for a Hilbert-space dimension, rejecting non-powers of two."""
    n = int(round(np.log2(dim)))
    if 2**n != dim or not 1 <= n <= 3:
        raise ValueError(f"dimension {dim} is not 2^n for n in 1..3")
    return n


def check_ket(psi: np.ndarray) -> np.ndarray:
    """Validate a pure-state amplitude vector; returns it as a complex array."""
    psi = np.asarray(psi, dtype=complex).ravel()
    num_qubits(psi.size)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > 1e-10:
        raise ValueError(f"state vector is not normalized: |psi|^2 = {norm2}")
    return psi


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; returns a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    num_qubits(rho.shape[0])
    if np.max(np.abs(rho - rho.conj().T)) > HERM_TOL:
        raise ValueError("density matrix is not Hermitian")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min()}")
    return rho


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of a sequence of matrices or vectors."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def density_from_ket(psi: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi| of a normalized state vector."""
    psi = check_ket(psi)
    return np.outer(psi, psi.conj())


def partial_trace(rho: np.ndarray, keep) -> np.ndarray:
    """Trace out all qubits not listed in ``keep`` (kept order preserved).

    Parameters
    ----------
    rho : ndarray
        Density matrix on n qubits.
    keep : sequence of int
        Qubit indices to retain, each in ``range(n)``.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    keep = list(keep)
    if not keep:
        raise ValueError("keep must be nonempty")
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"keep indices {keep} invalid for {n} qubits")
    if sorted(keep) != keep:
        raise ValueError("keep indices must be ascending")

    t = rho.reshape([2] * (2 * n))
    for ax in sorted(set(range(n)) - set(keep), reverse=True):
        half = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + half)
    d = 2 ** len(keep)
    return t.reshape(d, d)


@dataclass(frozen=True)
class PauliDecomposition:
    """Local Bloch vectors and spin correlation matrix of a two-qubit state."""

    a: np.ndarray  # Alice Bloch vector
    b: np.ndarray  # Bob Bloch vector
    T: np.ndarray  # 3x3 correlation matrix


def pauli_decompose(rho: np.ndarray) -> PauliDecomposition:
    """Extract (a, b, T) with a_j = Tr[rho sigma_j x 1], etc."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("pauli_decompose expects a two-qubit (4x4) state")
    a = np.array([np.trace(rho @ tensor(p, IDENTITY_2)).real for p in PAULIS])
    b = np.array([np.trace(rho @ tensor(IDENTITY_2, p)).real for p in PAULIS])
    T = np.array(
        [[np.trace(rho @ tensor(pj, pk)).real for pk in PAULIS] for pj in PAULIS]
    )
    return PauliDecomposition(a=a, b=b, T=T)


def pauli_recompose(d: PauliDecomposition) -> np.ndarray:
    """Rebuild rho = 1/4 (1x1 + a.sigma x 1 + 1 x b.sigma + sum T_jk sigma_j x sigma_k)."""
    rho = tensor(IDENTITY_2, IDENTITY_2).astype(complex)
    for j, p in enumerate(PAULIS):
        rho += d.a[j] * tensor(p, IDENTITY_2)
        rho += d.b[j] * tensor(IDENTITY_2, p)
    for j, pj in enumerate(PAULIS):
        for k, pk in enumerate(PAULIS):
            rho += d.T[j, k] * tensor(pj, pk)
    rho /= 4.0
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -PSD_TOL:
        raise ValueError(
            f"decomposition is unphysical: eigenvalue {evals.min()} < 0"
        )
    return rho


def fidelity_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi|rho|psi> for a density matrix against a pure target."""
    psi = check_ket(psi)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[0] != psi.size:
        raise ValueError("dimension mismatch between rho and psi")
    return float(np.real(np.vdot(psi, rho @ psi)))


def purity(rho: np.ndarray) -> float:
    """Tr[rho^2]."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)


def family_state(alpha: float, beta: float) -> np.ndarray:
    """Three-qubit family (sin(a)|100> + sin(b)|010> + cos(b)|001> + cos(a)|111>)/sqrt(2).

    W-class when alpha or beta hits 0 or pi/2, GHZ-class otherwise.
    """
    if not (0.0 <= alpha <= np.pi / 2 + 1e-12) or not (0.0 <= beta <= np.pi / 2 + 1e-12):
        raise ValueError("alpha and beta must lie in [0, pi/2]")
    psi = np.zeros(8, dtype=complex)
    psi[0b100] = np.sin(alpha)
    psi[0b010] = np.sin(beta)
    psi[0b001] = np.cos(beta)
    psi[0b111] = np.cos(alpha)
    return psi / _SQRT2


def chi1() -> np.ndarray:
    """(|010> - 2|100> + |001>)/sqrt(6)."""
    psi = np.zeros(8, dtype=complex)
    psi[0b010] = 1.0
    psi[0b100] = -2.0
    psi[0b001] = 1.0
    return psi / np.sqrt(6.0)


def chi2() -> np.ndarray:
    """Bit-flipped partner of chi1: (|101> - 2|011> + |110>)/sqrt(6)."""
    return tensor(SIGMA_X, SIGMA_X, SIGMA_X) @ chi1()


def mixed_w_state() -> np.ndarray:
    """Equal mixture of the two W-class states chi1 and chi2 (purity 1/2)."""
    return 0.5 * (density_from_ket(chi1()) + density_from_ket(chi2()))


def bell_diagonal(p) -> np.ndarray:
    """Mixture of Bell projectors with weights p over (psi-, psi+, phi-, phi+)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (4,) or p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be 4 nonnegative numbers summing to 1")
    rho = np.zeros((4, 4), dtype=complex)
    for w, ket in zip(p, BELL_KETS):
        rho += w * np.outer(ket, ket.conj())
    return rho


def pure_two_qubit(gamma: float) -> np.ndarray:
    """cos(g)|01> + sin(g)|10> with H->0, V->1 encoding, g in [0, pi]."""
    if not (0.0 <= gamma <= np.pi + 1e-12):
        raise ValueError("gamma must lie in [0, pi]")
    psi = np.zeros(4, dtype=complex)
    psi[0b01] = np.cos(gamma)
    psi[0b10] = np.sin(gamma)
    return psi


def flip_conjugate(M: np.ndarray) -> np.ndarray:
    """Conjugate an 8x8 Hermitian operator by the three-qubit bit flip X x X x X."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (8, 8):
        raise ValueError("flip_conjugate expects an 8x8 operator")
    if np.max(np.abs(M - M.conj().T)) > 1e-10:
        raise ValueError("operator must be Hermitian")
    X3 = tensor(SIGMA_X, SIGMA_X, SIGMA_X)
    return X3 @ M @ X3


def haar_random_pure(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state on n qubits (normalized complex Gaussian vector)."""
    d = 2**n
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_mixed(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank mixed state: marginal of a Haar pure state on 2n qubits."""
    d = 2**n
    v = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    v /= np.linalg.norm(v)
    return v @ v.conj().T


def random_separable_two_qubit(rng: np.random.Generator, terms: int = 4) -> np.ndarray:
    """Convex mixture of random product pure states (manifestly separable)."""
    w = rng.dirichlet(np.ones(terms))
    rho = np.zeros((4, 4), dtype=complex)
    for wi in w:
        ka = haar_random_pure(1, rng)
        kb = haar_random_pure(1, rng)
        kab = tensor(ka, kb)
        rho += wi * np.outer(kab, kab.conj())
    return rho


def matrix_to_json(m: np.ndarray) -> list:
    """Nested lists of [re, im] pairs for JSON export."""
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]
