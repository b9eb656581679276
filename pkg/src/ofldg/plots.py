"""Figure rendering for the report path (headless matplotlib).

Every function takes finished data structures (fields, reports, comparisons)
and writes one PNG; nothing here recomputes solver output.  The Agg backend
is forced so the CLI works without a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .field import DGField1D  # noqa: E402


def plot_solution(dg_field, path, title: str = "", exact=None, t=None) -> str:
    """Cell-average profile (1D line plot, 2D pseudocolor)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if isinstance(dg_field, DGField1D):
        x, means = dg_field.cell_averages()
        ax.plot(x, means, "o-", ms=2.5, lw=0.9, label="computed")
        if exact is not None and t is not None:
            dense = np.linspace(x[0], x[-1], 800)
            ax.plot(dense, exact(dense, t), "k--", lw=1.0, label="exact")
            ax.legend(frameon=False)
        ax.set_xlabel("x")
        ax.set_ylabel("cell average")
    else:
        xc, yc, means = dg_field.cell_averages()
        mesh = dg_field.mesh
        xe = np.linspace(mesh.ax, mesh.bx, mesh.nx + 1)
        ye = np.linspace(mesh.ay, mesh.by, mesh.ny + 1)
        pc = ax.pcolormesh(xe, ye, means.T, shading="flat", cmap="viridis")
        fig.colorbar(pc, ax=ax)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def plot_snapshots(snapshots, path, title: str = "") -> str:
    """Overlay of 1D cell-average profiles at several times."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for t, snap in snapshots:
        x, means = snap.cell_averages()
        ax.plot(x, means, lw=1.0, label=f"t={t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("cell average")
    if len(snapshots) <= 12:
        ax.legend(frameon=False, fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def plot_convergence(report, path, title: str = "") -> str:
    """Log-log error decay vs cells per axis, with the last observed order."""
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    cells = [float(str(r.resolution).split("x")[0]) for r in report.rows]
    for name, marker in (("l1", "o"), ("l2", "s"), ("linf", "^")):
        errs = [getattr(r, name) for r in report.rows]
        if all(np.isfinite(errs)):
            ax.loglog(cells, errs, marker + "-", ms=4, lw=1.0,
                      label=name.replace("linf", "L∞").replace("l", "L"))
    last = report.rows[-1]
    if last.order_l2 is not None and np.isfinite(last.order_l2):
        ax.set_title(title or f"observed order {last.order_l2:.2f}")
    elif title:
        ax.set_title(title)
    ax.set_xlabel("cells per axis")
    ax.set_ylabel("error")
    ax.legend(frameon=False)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def plot_comparison(comparison, path, title: str = "") -> str:
    """Damped vs undamped final profiles (1D overlay, 2D side by side)."""
    damped, undamped = comparison.damped.field, comparison.undamped.field
    if isinstance(damped, DGField1D):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        x, md = damped.cell_averages()
        _, mu = undamped.cell_averages()
        ax.plot(x, mu, "r.-", ms=2.5, lw=0.8, label="without damping")
        ax.plot(x, md, "b.-", ms=2.5, lw=0.8, label="with damping")
        ax.set_xlabel("x")
        ax.set_ylabel("cell average")
        ax.legend(frameon=False)
        axes = [ax]
    else:
        fig, axes = plt.subplots(1, 2, figsize=(10.4, 4.2))
        mesh = damped.mesh
        xe = np.linspace(mesh.ax, mesh.bx, mesh.nx + 1)
        ye = np.linspace(mesh.ay, mesh.by, mesh.ny + 1)
        for ax_i, fld, label in ((axes[0], undamped, "without damping"),
                                 (axes[1], damped, "with damping")):
            pc = ax_i.pcolormesh(xe, ye, fld.cell_averages()[2].T,
                                 shading="flat", cmap="viridis")
            fig.colorbar(pc, ax=ax_i)
            ax_i.set_title(label)
            ax_i.set_aspect("equal")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)
