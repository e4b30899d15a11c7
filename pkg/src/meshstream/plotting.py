"""Matplotlib renderings written next to the delimited outputs.

All figures are saved straight to files (SVG or PNG by extension) with
reproducible metadata so repeated runs produce identical bytes.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt          # noqa: E402
import numpy as np                        # noqa: E402
from matplotlib.collections import LineCollection      # noqa: E402
from matplotlib.patches import Rectangle                # noqa: E402
from matplotlib.tri import Triangulation               # noqa: E402

plt.rcParams["svg.hashsalt"] = "meshstream"
_SAVE_KW = {"metadata": {"Date": None}}


def _save(fig, path, dpi=150):
    kw = dict(_SAVE_KW)
    if str(path).endswith(".png"):
        kw = {"metadata": {}}
    fig.savefig(path, dpi=dpi, **kw)
    plt.close(fig)


def render_density(field, mesh, path, title=None, cmap="viridis"):
    """Pseudocolor plot of per-triangle density, one flat patch each."""
    tri = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1],
                        mesh.triangles)
    if hasattr(field, "primitive"):
        values = field.primitive()[:, 0]
        rho = np.empty(mesh.n_tri)
        rho[field.cell_order] = values        # undo any label permutation
    else:
        rho = np.asarray(field)
    fig, ax = plt.subplots(figsize=(9, 3.2))
    pc = ax.tripcolor(tri, facecolors=rho, cmap=cmap)
    fig.colorbar(pc, ax=ax, label="density")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def render_pipeline(g, plan, path, title=None):
    """Leveled dataflow graph with cluster rectangles."""
    fig, ax = plt.subplots(figsize=(10, 7))
    levels = sorted({v.level for v in g.vertices})
    row_of = {lv: i for i, lv in enumerate(levels)}
    ys = {v.id: -row_of[v.level] for v in g.vertices}
    xs = {v.id: v.x for v in g.vertices}

    segs = [((xs[a], ys[a]), (xs[b], ys[b])) for a, b in g.edges()]
    ax.add_collection(LineCollection(segs, colors="0.75", linewidths=0.7,
                                     zorder=1))
    styles = {"input": ("s", "tab:green"), "constant": ("D", "0.6"),
              "operator": ("o", "tab:blue"), "delay": ("v", "tab:orange"),
              "output": ("s", "tab:red")}
    for kind, (marker, color) in styles.items():
        pts = [(xs[v.id], ys[v.id]) for v in g.vertices if v.kind == kind]
        if pts:
            arr = np.array(pts)
            ax.scatter(arr[:, 0], arr[:, 1], marker=marker, c=color, s=36,
                       zorder=2, label=kind)
    if plan is not None:
        for c in plan.clusters:
            lv = [-row_of[g.vertices[m].level] for m in c.members]
            xr = [xs[m] for m in c.members]
            rect = Rectangle((min(xr) - 0.4, min(lv) - 0.4),
                             max(xr) - min(xr) + 0.8, max(lv) - min(lv) + 0.8,
                             fill=False, edgecolor="tab:purple", lw=1.2,
                             zorder=3)
            ax.add_patch(rect)
    ax.autoscale()
    ax.set_xticks([])
    ax.set_yticks([])
    ax.legend(loc="upper right", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def render_bench(rows, path, title=None):
    """Update rate vs mesh size, one line per ordering."""
    fig, ax = plt.subplots(figsize=(6, 4))
    orderings = sorted({r["ordering"] for r in rows})
    for name in orderings:
        pts = sorted((r["n_tri"], r["updates_per_sec"]) for r in rows
                     if r["ordering"] == name)
        ax.plot([p[0] for p in pts], [p[1] / 1e6 for p in pts],
                marker="o", label=name)
    ax.set_xscale("log")
    ax.set_xlabel("triangles")
    ax.set_ylabel("million updates / s")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
