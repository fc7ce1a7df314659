"""Matplotlib figure rendering for the report paths of the CLI.

All figures are written straight to files; the Agg backend is forced so
rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .steer import SteeringEllipsoid


def _ellipsoid_mesh(ell: SteeringEllipsoid, n: int = 40):
    """Surface mesh (x, y, z grids) of an ellipsoid from its principal axes."""
    u = np.linspace(0.0, 2.0 * np.pi, n)
    v = np.linspace(0.0, np.pi, n)
    sphere = np.stack(
        [
            np.outer(np.cos(u), np.sin(v)),
            np.outer(np.sin(u), np.sin(v)),
            np.outer(np.ones_like(u), np.cos(v)),
        ]
    )
    pts = np.einsum("ij,jkl->ikl", ell.axes.T @ np.diag(ell.semiaxes), sphere)
    return pts + ell.center[:, None, None]


def save_cloud_figure(
    cloud: np.ndarray,
    ell: SteeringEllipsoid | None,
    path,
    title: str = "",
) -> None:
    """3D scatter of reconstructed steered points with the fitted ellipsoid."""
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    ax.scatter(*np.asarray(cloud).T, s=4, c="crimson", alpha=0.6, depthshade=False)
    if ell is not None and ell.rank == 3:
        mesh = _ellipsoid_mesh(ell)
        ax.plot_wireframe(*mesh, color="steelblue", linewidth=0.3, alpha=0.5)
    lim = 1.05
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_zlim(-lim, lim)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_monogamy_figure(rows, path) -> None:
    """V_BA versus V_CA scatter against the two monogamy boundary curves.

    ``rows`` is an iterable of (label, v_ba, v_ca).
    """
    fig, ax = plt.subplots(figsize=(5.5, 5))
    t = np.linspace(0.0, 1.0, 400)
    ax.plot(t**2, (1.0 - t) ** 2, "b-", label=r"$\sqrt{V_{B|A}}+\sqrt{V_{C|A}}=1$")
    ax.plot(t**1.5, (1.0 - t) ** 1.5, "--", color="darkorange",
            label=r"$V_{B|A}^{2/3}+V_{C|A}^{2/3}=1$")
    for label, v_ba, v_ca in rows:
        ax.plot(v_ba, v_ca, "o", ms=6)
        ax.annotate(label, (v_ba, v_ca), textcoords="offset points", xytext=(4, 4),
                    fontsize=8)
    ax.set_xlabel(r"$V_{B|A}$")
    ax.set_ylabel(r"$V_{C|A}$")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
