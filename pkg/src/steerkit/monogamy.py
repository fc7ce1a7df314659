"""Volume monogamy relations and concurrence checks for three-qubit states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qstate, steer


def volumes(rho_abc: np.ndarray) -> tuple[float, float]:
    """Normalized ellipsoid volumes (V_BA, V_CA) steered by the first qubit."""
    rho_abc = np.asarray(rho_abc, dtype=complex)
    if rho_abc.shape != (8, 8):
        raise ValueError("volumes expects a three-qubit (8x8) state")
    rho_ab = qstate.partial_trace(rho_abc, [0, 1])
    rho_ac = qstate.partial_trace(rho_abc, [0, 2])
    v_ba = steer.normalized_volume(qstate.pauli_decompose(rho_ab))
    v_ca = steer.normalized_volume(qstate.pauli_decompose(rho_ac))
    return v_ba, v_ca


def pure_monogamy_residual(v_ba: float, v_ca: float) -> float:
    """1 - sqrt(V_BA) - sqrt(V_CA); negative values signal violation."""
    return 1.0 - np.sqrt(v_ba) - np.sqrt(v_ca)


def mixed_monogamy_residual(v_ba: float, v_ca: float) -> float:
    """1 - V_BA^(2/3) - V_CA^(2/3); holds for all three-qubit states."""
    return 1.0 - v_ba ** (2.0 / 3.0) - v_ca ** (2.0 / 3.0)


def concurrence(rho_ab: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state.

    max(0, l1 - l2 - l3 - l4) over the descending square roots of the
    eigenvalues of rho (sy x sy) rho* (sy x sy).
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    if rho_ab.shape != (4, 4):
        raise ValueError("concurrence expects a two-qubit (4x4) state")
    if np.max(np.abs(rho_ab - rho_ab.conj().T)) > 1e-10:
        raise ValueError("density matrix must be Hermitian")
    yy = qstate.tensor(qstate.SIGMA_Y, qstate.SIGMA_Y)
    m = rho_ab @ yy @ rho_ab.conj() @ yy
    evals = np.linalg.eigvals(m).real
    lam = np.sqrt(np.clip(np.sort(evals)[::-1], 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def ckw_residual(rho_abc: np.ndarray) -> float:
    """CKW slack C^2_{A|BC} - C^2_{AB} - C^2_{AC} for a pure three-qubit state.

    Uses C^2_{A|BC} = 4 det(rho_A); only valid for pure inputs, so mixed
    states are rejected.
    """
    rho_abc = np.asarray(rho_abc, dtype=complex)
    if qstate.purity(rho_abc) < 1.0 - 1e-10:
        raise ValueError("ckw_residual requires a pure three-qubit state")
    rho_a = qstate.partial_trace(rho_abc, [0])
    c2_a_bc = 4.0 * float(np.linalg.det(rho_a).real)
    c_ab = concurrence(qstate.partial_trace(rho_abc, [0, 1]))
    c_ac = concurrence(qstate.partial_trace(rho_abc, [0, 2]))
    return c2_a_bc - c_ab**2 - c_ac**2


@dataclass(frozen=True)
class MonogamyReport:
    """Volumes, monogamy residuals and concurrences of one three-qubit state."""

    v_ba: float
    v_ca: float
    pure_residual: float
    mixed_residual: float
    concurrence_ab: float
    concurrence_ac: float
    classification: str

    def to_dict(self) -> dict:
        return {
            "v_ba": self.v_ba,
            "v_ca": self.v_ca,
            "pure_residual": self.pure_residual,
            "mixed_residual": self.mixed_residual,
            "concurrence_ab": self.concurrence_ab,
            "concurrence_ac": self.concurrence_ac,
            "classification": self.classification,
        }


def report(rho_abc: np.ndarray) -> MonogamyReport:
    """Full monogamy report for a three-qubit state.

    Classification thresholds are reporting sugar: |pure residual| < 1e-3
    counts as saturating, residual < -1e-3 as a violation.
    """
    v_ba, v_ca = volumes(rho_abc)
    pure_res = pure_monogamy_residual(v_ba, v_ca)
    mixed_res = mixed_monogamy_residual(v_ba, v_ca)
    c_ab = concurrence(qstate.partial_trace(rho_abc, [0, 1]))
    c_ac = concurrence(qstate.partial_trace(rho_abc, [0, 2]))
    if abs(pure_res) < 1e-3:
        label = "W-class-saturating"
    elif pure_res < -1e-3:
        label = "pure-violating-mixed-state"
    elif qstate.purity(rho_abc) > 1.0 - 1e-10:
        label = "GHZ-class-interior"
    else:
        label = "other"
    return MonogamyReport(
        v_ba=float(v_ba),
        v_ca=float(v_ca),
        pure_residual=float(pure_res),
        mixed_residual=float(mixed_res),
        concurrence_ab=float(c_ab),
        concurrence_ac=float(c_ac),
        classification=label,
    )
