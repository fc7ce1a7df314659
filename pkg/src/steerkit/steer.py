"""Steering ellipsoid geometry of a two-qubit state.

The set of Bloch vectors Bob can be steered to by Alice's local
measurements, { (b + T^t e) / (1 + a.e) : |e| <= 1 }, forms a (possibly
degenerate) ellipsoid. Its center and shape matrix are computed in closed
form and cross-validated against the steered-state map by property tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import PauliDecomposition

SEPARABLE_VOLUME_BOUND = 1.0 / 27.0

_SINGULAR_TOL = 1e-12  # 1 - |a|^2 below this means a pure Alice marginal
_AXIS_TOL = 1e-9  # semiaxes below this count as collapsed


class ZeroProbabilityError(ValueError):
    """Raised when a measurement direction has vanishing outcome probability."""


def steered_bloch(d: PauliDecomposition, e) -> tuple[np.ndarray, float]:
    """Bloch vector Bob is steered to by Alice's projective outcome along e.

    Returns the pair (bloch, probability) where probability is the chance
    of the e0 = 1/2 projective outcome, (1 + a.e)/2.
    """
    e = np.asarray(e, dtype=float)
    if np.linalg.norm(e) > 1.0 + 1e-12:
        raise ValueError("measurement direction must satisfy |e| <= 1")
    denom = 1.0 + float(d.a @ e)
    if denom <= _SINGULAR_TOL:
        raise ZeroProbabilityError(
            f"zero-probability branch: 1 + a.e = {denom}"
        )
    bloch = (d.b + d.T.T @ e) / denom
    return bloch, 0.5 * denom


@dataclass(frozen=True)
class SteeringEllipsoid:
    """Center, shape and derived geometry of a steering ellipsoid."""

    center: np.ndarray  # 3-vector c
    shape: np.ndarray  # symmetric PSD 3x3 matrix Q
    semiaxes: np.ndarray  # descending s1 >= s2 >= s3 >= 0
    axes: np.ndarray  # orthonormal eigenvectors, rows matching semiaxes
    volume: float  # normalized volume, s1*s2*s3
    rank: int  # 0 point, 1 line, 2 plane, 3 solid

    def to_dict(self) -> dict:
        return {
            "center": [float(x) for x in self.center],
            "semiaxes": [float(x) for x in self.semiaxes],
            "axes": [[float(x) for x in row] for row in self.axes],
            "volume": float(self.volume),
            "rank": int(self.rank),
        }


def _sorted_eig(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigenpairs of a symmetric matrix with deterministic signs."""
    evals, evecs = np.linalg.eigh(Q)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    for i in range(3):
        v = evecs[:, i]
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            evecs[:, i] = -v
    return evals, evecs


def normalized_volume(d: PauliDecomposition) -> float:
    """V = |det(T - a b^t)| / (1 - |a|^2)^2, zero in the |a| -> 1 limit."""
    g = 1.0 - float(d.a @ d.a)
    if g < _SINGULAR_TOL:
        return 0.0
    v = abs(np.linalg.det(d.T - np.outer(d.a, d.b))) / g**2
    return float(v)


def ellipsoid(d: PauliDecomposition) -> SteeringEllipsoid:
    """Closed-form steering ellipsoid of a two-qubit state.

    Uses c = (b - T^t a)/(1 - |a|^2) and
    Q = (T^t - b a^t)(I + a a^t/(1 - |a|^2))(T - a b^t)/(1 - |a|^2); when
    Alice's marginal is pure the steered set collapses to the point b.
    """
    g = 1.0 - float(d.a @ d.a)
    if g < _SINGULAR_TOL:
        return SteeringEllipsoid(
            center=d.b.copy(),
            shape=np.zeros((3, 3)),
            semiaxes=np.zeros(3),
            axes=np.eye(3),
            volume=0.0,
            rank=0,
        )
    c = (d.b - d.T.T @ d.a) / g
    M = d.T - np.outer(d.a, d.b)
    Q = M.T @ (np.eye(3) + np.outer(d.a, d.a) / g) @ M / g
    Q = 0.5 * (Q + Q.T)
    evals, evecs = _sorted_eig(Q)
    evals = np.clip(evals, 0.0, None)
    semiaxes = np.sqrt(evals)
    rank = int(np.sum(semiaxes > _AXIS_TOL))
    return SteeringEllipsoid(
        center=c,
        shape=Q,
        semiaxes=semiaxes,
        axes=evecs.T,
        volume=float(np.prod(semiaxes)),
        rank=rank,
    )


def classify(d: PauliDecomposition) -> tuple[int, bool]:
    """Degeneracy rank of the steered set plus the volume entanglement witness.

    The flag is True iff V exceeds the separable bound 1/27, which
    certifies entanglement.
    """
    ell = ellipsoid(d)
    v = normalized_volume(d)
    return ell.rank, bool(v > SEPARABLE_VOLUME_BOUND + 1e-12)
