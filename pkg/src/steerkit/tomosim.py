"""Finite-count tomography simulation of the steering experiment.

Alice samples measurement directions (uniform on the sphere or icosahedron
vertices), each steered single-qubit state is reconstructed from binomial
detection counts split across the three Pauli axes, and Monte Carlo
resampling supplies error bars for derived quantities.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import qstate, steer

log = logging.getLogger(__name__)

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def sample_direction(rng: np.random.Generator) -> np.ndarray:
    """One uniform random unit vector on the sphere."""
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def uniform_directions(n: int, rng: np.random.Generator) -> "DirectionSet":
    """n independent uniform directions."""
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return DirectionSet(directions=v, scheme="uniform-random")


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform rotation matrix via QR of a Gaussian matrix, det fixed to +1."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def icosahedron_directions(rotation: np.ndarray | None = None) -> "DirectionSet":
    """The 12 unit vertices of a regular icosahedron, optionally rotated."""
    verts = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            verts.append([0.0, s1, s2 * _GOLDEN])
            verts.append([s1, s2 * _GOLDEN, 0.0])
            verts.append([s2 * _GOLDEN, 0.0, s1])
    v = np.array(verts) / np.sqrt(1.0 + _GOLDEN**2)
    if rotation is not None:
        rotation = np.asarray(rotation, dtype=float)
        if np.max(np.abs(rotation @ rotation.T - np.eye(3))) > 1e-10:
            raise ValueError("rotation must be orthogonal")
        v = v @ rotation.T
    return DirectionSet(directions=v, scheme="icosahedron")


def subset_nine(dirs: "DirectionSet", rng: np.random.Generator) -> "DirectionSet":
    """Random 9-vertex subset of a 12-direction icosahedron set.

    The 3 dropped vertices are drawn from distinct antipodal pairs: removing
    a whole pair leaves the even part of the interpolating quadric
    underdetermined and the fit unusable.
    """
    v = dirs.directions
    if len(v) != 12:
        raise ValueError("subset_nine expects a 12-direction icosahedron set")
    partner = {}
    for i in range(12):
        for j in range(i + 1, 12):
            if np.allclose(v[i], -v[j], atol=1e-9):
                partner[i] = j
                partner[j] = i
    if len(partner) != 12:
        raise ValueError("direction set has no antipodal pairing")
    pairs = sorted({tuple(sorted((i, partner[i]))) for i in range(12)})
    chosen = rng.choice(len(pairs), size=3, replace=False)
    drop = {pairs[i][rng.integers(2)] for i in chosen}
    idx = np.array([i for i in range(12) if i not in drop])
    return DirectionSet(directions=v[idx], scheme="icosahedron-9")


@dataclass(frozen=True)
class DirectionSet:
    """Measurement directions for Alice with the sampling scheme that made them."""

    directions: np.ndarray  # (n, 3) unit rows
    scheme: str

    def __post_init__(self):
        norms = np.linalg.norm(self.directions, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("all directions must be unit vectors")


@dataclass(frozen=True)
class CountRecord:
    """Detection counts for one steered point, per Pauli axis."""

    direction: np.ndarray
    axis_counts: np.ndarray  # (3, 2) int, columns (n_plus, n_minus)
    total_events: int
    efficiencies: tuple[float, float] = (1.0, 1.0)


@dataclass(frozen=True)
class TomoEstimate:
    """Reconstructed steered Bloch vector with per-component standard errors."""

    bloch_hat: np.ndarray
    stderr: np.ndarray
    clipped: bool = False


def allocate_events(total: int) -> np.ndarray:
    """Split total detection events across the 3 Pauli axes as evenly as possible."""
    base = total // 3
    alloc = np.full(3, base, dtype=int)
    alloc[: total - 3 * base] += 1
    return alloc


def simulate_counts(
    r,
    total_events: int,
    allocation,
    rng: np.random.Generator,
    efficiencies: tuple[float, float] = (1.0, 1.0),
    direction=None,
) -> CountRecord:
    """Binomial shot-noise counts for a steered Bloch vector r.

    Per axis k the "+" count is Binomial(N_k, (1 + r_k)/2); detector
    efficiencies thin the two outcome streams (inverted at reconstruction).
    """
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) > 1.0 + 1e-9:
        raise ValueError("Bloch vector must satisfy |r| <= 1")
    allocation = np.asarray(allocation, dtype=int)
    if allocation.shape != (3,) or allocation.sum() != total_events or allocation.min() < 0:
        raise ValueError("allocation must be 3 nonnegative ints summing to total_events")
    eta_p, eta_m = efficiencies
    counts = np.zeros((3, 2), dtype=int)
    for k in range(3):
        n_plus = rng.binomial(allocation[k], (1.0 + r[k]) / 2.0)
        n_minus = allocation[k] - n_plus
        if (eta_p, eta_m) != (1.0, 1.0):
            n_plus = rng.binomial(n_plus, eta_p)
            n_minus = rng.binomial(n_minus, eta_m)
        counts[k] = (n_plus, n_minus)
    if direction is None:
        direction = np.zeros(3)
    return CountRecord(
        direction=np.asarray(direction, dtype=float),
        axis_counts=counts,
        total_events=int(total_events),
        efficiencies=(float(eta_p), float(eta_m)),
    )


def reconstruct(record: CountRecord) -> TomoEstimate:
    """Invert counts to a Bloch-vector estimate with binomial standard errors.

    Counts are first corrected for detector efficiencies; estimates outside
    the unit ball are radially projected onto it and flagged.
    """
    eta_p, eta_m = record.efficiencies
    bloch = np.zeros(3)
    stderr = np.zeros(3)
    for k in range(3):
        n_plus, n_minus = record.axis_counts[k]
        if n_plus + n_minus == 0:
            raise ValueError(f"axis {k} has zero counts, cannot reconstruct")
        m_plus = n_plus / eta_p
        m_minus = n_minus / eta_m
        n_eff = m_plus + m_minus
        bloch[k] = (m_plus - m_minus) / n_eff
        stderr[k] = np.sqrt(max(1.0 - bloch[k] ** 2, 0.0) / n_eff)
    norm = np.linalg.norm(bloch)
    clipped = norm > 1.0
    if clipped:
        bloch = bloch / norm
    return TomoEstimate(bloch_hat=bloch, stderr=stderr, clipped=clipped)


@dataclass(frozen=True)
class SteeredPoint:
    """One direction's exact steered state and its tomographic estimate."""

    direction: np.ndarray
    true_bloch: np.ndarray
    estimate: TomoEstimate


@dataclass(frozen=True)
class ExperimentResult:
    """Reconstructed steered-state clouds keyed by steered party ('B', 'C')."""

    parties: dict[str, list[SteeredPoint]] = field(default_factory=dict)

    def cloud(self, party: str) -> np.ndarray:
        """(n, 3) array of reconstructed Bloch vectors for one party."""
        return np.array([p.estimate.bloch_hat for p in self.parties[party]])


def add_white_noise(rho: np.ndarray, lam: float) -> np.ndarray:
    """Admix white noise: (1 - lam) rho + lam I/d."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return (1.0 - lam) * rho + lam * np.eye(d) / d


def expectation_via_flip_mixing(M: np.ndarray, chi: np.ndarray) -> float:
    """<M> of the chi1/chi2 mixture from chi1 statistics alone.

    Measuring M and its bit-flip conjugate M' with equal probability on chi
    reproduces Tr[M rho] for rho = (|chi><chi| + X3|chi><chi|X3)/2.
    """
    chi = qstate.check_ket(chi)
    m_prime = qstate.flip_conjugate(M)
    e1 = np.vdot(chi, M @ chi).real
    e2 = np.vdot(chi, m_prime @ chi).real
    return 0.5 * float(e1 + e2)


def _steered_bloch_via_mixing(chi: np.ndarray, e: np.ndarray, party_axis: int):
    """Steered Bloch vector of one party of the chi-mixture, via M/M' statistics."""
    proj = 0.5 * (qstate.IDENTITY_2 + sum(e[j] * qstate.PAULIS[j] for j in range(3)))
    ops = [qstate.IDENTITY_2] * 3
    ops[0] = proj
    p = expectation_via_flip_mixing(qstate.tensor(*ops), chi)
    if p <= 1e-12:
        raise steer.ZeroProbabilityError("zero-probability branch in mixing path")
    bloch = np.zeros(3)
    for k in range(3):
        ops_k = [qstate.IDENTITY_2] * 3
        ops_k[0] = proj
        ops_k[party_axis] = qstate.PAULIS[k]
        bloch[k] = expectation_via_flip_mixing(qstate.tensor(*ops_k), chi) / p
    return bloch, p


def run_experiment(
    rho: np.ndarray,
    dirs: DirectionSet,
    events_per_point: int,
    rng: np.random.Generator,
    noise: float = 0.0,
    efficiencies: tuple[float, float] = (1.0, 1.0),
    via_chi1_mixing: bool = False,
) -> ExperimentResult:
    """Simulate the full steering experiment on a 2- or 3-qubit state.

    For each of Alice's directions the exact steered Bloch vector of every
    other party is computed, then measured with ``events_per_point``
    binomially noisy detection events. Directions whose outcome probability
    vanishes are skipped with a warning. With ``via_chi1_mixing`` the
    steered states of the chi1/chi2 mixture are evaluated from chi1
    statistics with the flip-conjugate measurement strategy instead of from
    rho directly; both routes agree analytically.
    """
    rho = np.asarray(rho, dtype=complex)
    n = qstate.num_qubits(rho.shape[0])
    if n not in (2, 3):
        raise ValueError("run_experiment expects a 2- or 3-qubit state")
    if noise:
        rho = add_white_noise(rho, noise)
    if via_chi1_mixing and n != 3:
        raise ValueError("chi1 mixing is defined for three-qubit states only")

    parties = {"B": 1} if n == 2 else {"B": 1, "C": 2}
    decomps = {}
    if not via_chi1_mixing:
        for label, idx in parties.items():
            marginal = qstate.partial_trace(rho, [0, idx])
            decomps[label] = qstate.pauli_decompose(marginal)
    chi = qstate.chi1() if via_chi1_mixing else None

    allocation = allocate_events(events_per_point)
    result: dict[str, list[SteeredPoint]] = {label: [] for label in parties}
    for e in dirs.directions:
        for label, idx in parties.items():
            try:
                if via_chi1_mixing:
                    bloch, _ = _steered_bloch_via_mixing(chi, e, idx)
                else:
                    bloch, _ = steer.steered_bloch(decomps[label], e)
            except steer.ZeroProbabilityError:
                log.warning("skipping zero-probability direction %s for party %s", e, label)
                continue
            record = simulate_counts(
                bloch, events_per_point, allocation, rng,
                efficiencies=efficiencies, direction=e,
            )
            result[label].append(
                SteeredPoint(direction=e, true_bloch=bloch, estimate=reconstruct(record))
            )
    return ExperimentResult(parties=result)


def monte_carlo_errors(
    sample_fn,
    samples: int,
    rng: np.random.Generator,
) -> dict[str, tuple[float, float]]:
    """Mean and standard deviation of derived scalars over resampled runs.

    ``sample_fn(rng)`` must return a dict of scalars; each sample gets an
    independent child generator spawned from the master, so results do not
    depend on evaluation order.
    """
    if samples < 2:
        raise ValueError("need at least 2 Monte Carlo samples")
    children = rng.spawn(samples)
    rows: dict[str, list[float]] = {}
    for child in children:
        out = sample_fn(child)
        for key, val in out.items():
            rows.setdefault(key, []).append(float(val))
    return {
        key: (float(np.mean(vals)), float(np.std(vals, ddof=1)))
        for key, vals in rows.items()
    }
