"""Least-squares quadric fitting of ellipsoids to noisy 3D point clouds.

Two fitting routes are provided. The regression route writes the general
ellipsoid equation as z^2 = f(x, y, z) with 9 linear coefficients, which is
the form the R^2 goodness-of-fit is defined on. The symmetric route fits
all 10 quadric coefficients as the smallest singular vector of the design
matrix and is the default source of recovered geometry, since the
regression form cannot represent ellipsoids with zero z-extent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .steer import SteeringEllipsoid, _sorted_eig

MIN_POINTS = 9  # a general ellipsoid is fixed by nine points
DEGENERACY_THRESHOLD = 1e-5  # smallest covariance eigenvalue for a fittable cloud

REFINE_MAX_ITER = 100
REFINE_TOL = 1e-10


class DegenerateCloudError(ValueError):
    """Point cloud too collapsed (point/line/plane) for an ellipsoid fit."""


class IndefiniteFormError(ValueError):
    """Fitted quadric is not a real bounded ellipsoid."""


@dataclass(frozen=True)
class SpreadDiagnostics:
    """Bounding-box extents and covariance spectrum of a cloud, with a verdict."""

    extents: np.ndarray  # per-axis bounding-box widths
    cov_eigvals: np.ndarray  # descending covariance eigenvalues
    verdict: str  # "point" | "degenerate" | "full"


@dataclass(frozen=True)
class QuadricFit:
    """Fitted quadric coefficients with goodness of fit and recovered geometry.

    ``coefficients`` are the 9 regression coefficients of
    z^2 = c1 x^2 + c2 y^2 + c3 xy + c4 xz + c5 yz + c6 x + c7 y + c8 z + c9;
    ``quadric10`` is the symmetric-fit coefficient vector over
    (x^2, y^2, z^2, xy, xz, yz, x, y, z, 1).
    """

    coefficients: np.ndarray
    quadric10: np.ndarray
    ss_res: float
    ss_tot: float
    r_squared: float
    recovered: SteeringEllipsoid | None
    warning: str | None = None

    def to_dict(self) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients],
            "quadric10": [float(c) for c in self.quadric10],
            "ss_res": float(self.ss_res),
            "ss_tot": float(self.ss_tot),
            "r_squared": float(self.r_squared),
            "recovered": None if self.recovered is None else self.recovered.to_dict(),
            "warning": self.warning,
        }


def degenerate_guard(points, threshold: float = DEGENERACY_THRESHOLD) -> SpreadDiagnostics:
    """Spread diagnostics deciding whether a cloud supports an ellipsoid fit."""
    points = np.asarray(points, dtype=float)
    extents = points.max(axis=0) - points.min(axis=0)
    centered = points - points.mean(axis=0)
    cov = centered.T @ centered / max(len(points) - 1, 1)
    eigvals = np.sort(np.linalg.eigvalsh(cov))[::-1]
    if eigvals[0] < threshold:
        verdict = "point"
    elif eigvals[-1] < threshold:
        verdict = "degenerate"
    else:
        verdict = "full"
    return SpreadDiagnostics(extents=extents, cov_eigvals=eigvals, verdict=verdict)


def _design9(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x, y, z = points.T
    design = np.column_stack(
        [x * x, y * y, x * y, x * z, y * z, x, y, z, np.ones_like(x)]
    )
    return design, z * z


def _design10(points: np.ndarray) -> np.ndarray:
    x, y, z = points.T
    return np.column_stack(
        [x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, np.ones_like(x)]
    )


def _geometry(A: np.ndarray, g: np.ndarray, k0: float) -> SteeringEllipsoid:
    """Ellipsoid geometry of the quadric r^t A r + 2 g.r + k0 = 0."""
    try:
        center = np.linalg.solve(A, -g)
    except np.linalg.LinAlgError as exc:
        raise IndefiniteFormError("singular quadratic form") from exc
    level = float(center @ A @ center + 2.0 * g @ center + k0)
    if abs(level) < 1e-15:
        raise IndefiniteFormError("quadric degenerates to a point")
    B = A / (-level)  # surface is u^t B u = 1 around the center
    B = 0.5 * (B + B.T)
    evals, evecs = _sorted_eig(B)
    if evals[-1] <= 0.0:
        raise IndefiniteFormError("quadratic form is not positive definite")
    semiaxes = 1.0 / np.sqrt(evals[::-1])  # descending semiaxes
    axes = evecs[:, ::-1].T
    shape = axes.T @ np.diag(semiaxes**2) @ axes
    return SteeringEllipsoid(
        center=center,
        shape=shape,
        semiaxes=semiaxes,
        axes=axes,
        volume=float(np.prod(semiaxes)),
        rank=3,
    )


def recovered_ellipsoid(coefficients) -> SteeringEllipsoid:
    """Geometry of the regression-form quadric (center, semiaxes, volume)."""
    c = np.asarray(coefficients, dtype=float)
    if c.shape != (9,):
        raise ValueError("expected 9 regression coefficients")
    A = np.array(
        [
            [c[0], c[2] / 2.0, c[3] / 2.0],
            [c[2] / 2.0, c[1], c[4] / 2.0],
            [c[3] / 2.0, c[4] / 2.0, -1.0],
        ]
    )
    g = np.array([c[5], c[6], c[7]]) / 2.0
    return _geometry(A, g, c[8])


def _geometry_from_quadric10(q: np.ndarray) -> SteeringEllipsoid:
    A = np.array(
        [
            [q[0], q[3] / 2.0, q[4] / 2.0],
            [q[3] / 2.0, q[1], q[5] / 2.0],
            [q[4] / 2.0, q[5] / 2.0, q[2]],
        ]
    )
    g = q[6:9] / 2.0
    return _geometry(A, g, q[9])


def fit(points) -> QuadricFit:
    """Least-squares quadric fit of a point cloud.

    The 9 regression coefficients minimize sum (z_i^2 - f(X_i))^2; R^2 is
    reported on that regression. Recovered geometry comes from the
    symmetric 10-coefficient fit; when that quadric is not a real ellipsoid
    the fit is returned with ``recovered`` absent and a warning.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError("points must be an (n, 3) array")
    if len(points) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} points, got {len(points)}")

    design, target = _design9(points)
    if np.linalg.matrix_rank(design, tol=1e-10) < 9:
        raise DegenerateCloudError("rank-deficient design matrix (degenerate cloud)")
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    residuals = target - design @ coeffs
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((target - target.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")

    design10 = _design10(points)
    # smallest-eigenvector of the 10x10 normal matrix; with exactly 9 points
    # this is the (unique) interpolating quadric's nullspace direction
    normal10 = design10.T @ design10
    _, vecs = np.linalg.eigh(normal10)
    quadric10 = vecs[:, 0]
    # fix overall sign so the x^2 + y^2 + z^2 trace is negative (sphere-like)
    if quadric10[0] + quadric10[1] + quadric10[2] > 0:
        quadric10 = -quadric10
    warning = None
    try:
        recovered = _geometry_from_quadric10(quadric10)
    except IndefiniteFormError as exc:
        recovered = None
        warning = f"non-ellipsoidal quadric: {exc}"
    return QuadricFit(
        coefficients=coeffs,
        quadric10=quadric10,
        ss_res=ss_res,
        ss_tot=ss_tot,
        r_squared=r_squared,
        recovered=recovered,
        warning=warning,
    )


def refine(points, initial: QuadricFit) -> QuadricFit:
    """Damped least-squares refinement of the regression coefficients.

    Gauss-Newton steps with Levenberg-Marquardt damping on the z^2
    residuals; the result never has larger ss_res than the input fit. On
    failure to improve within the iteration cap the initial fit is returned
    with a warning flag.
    """
    points = np.asarray(points, dtype=float)
    design, target = _design9(points)
    coeffs = initial.coefficients.copy()
    residuals = target - design @ coeffs
    ss = float(residuals @ residuals)
    lam = 1e-3
    jtj = design.T @ design
    diag = np.diag(np.diag(jtj))
    for _ in range(REFINE_MAX_ITER):
        grad = design.T @ residuals
        try:
            step = np.linalg.solve(jtj + lam * diag, grad)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = coeffs + step
        trial_res = target - design @ trial
        trial_ss = float(trial_res @ trial_res)
        if trial_ss <= ss:
            improved = ss - trial_ss
            coeffs, residuals, ss = trial, trial_res, trial_ss
            lam = max(lam / 3.0, 1e-12)
            if improved <= REFINE_TOL * max(ss, 1e-30):
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                break
    if ss > initial.ss_res + 1e-15:
        return QuadricFit(
            coefficients=initial.coefficients,
            quadric10=initial.quadric10,
            ss_res=initial.ss_res,
            ss_tot=initial.ss_tot,
            r_squared=initial.r_squared,
            recovered=initial.recovered,
            warning="refinement diverged; kept algebraic fit",
        )
    r_squared = 1.0 - ss / initial.ss_tot if initial.ss_tot > 0 else float("nan")
    warning = None
    try:
        recovered = recovered_ellipsoid(coeffs)
    except IndefiniteFormError:
        recovered = initial.recovered
        warning = "refined quadric not ellipsoidal; geometry kept from initial fit"
    return QuadricFit(
        coefficients=coeffs,
        quadric10=initial.quadric10,
        ss_res=ss,
        ss_tot=initial.ss_tot,
        r_squared=r_squared,
        recovered=recovered,
        warning=warning,
    )
