"""Deterministic figure rendering from validated tables.

Backend settings are pinned so byte-identical inputs give pixel-identical
outputs; every image embeds a sha256 digest of its inputs (CSV bodies
plus metadata sidecars) in the image metadata.  No physics is recomputed
here: the scripts draw exactly the documented columns.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .schema import input_digest, load_schema, read_table

FIGURE_KINDS = ("spectrum-scatter", "root-loci", "rate-curves", "flow-lines")

_BASE_STYLE = {
    "figure.figsize": (6.0, 4.5),
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.fonttype": "path",
    "svg.hashsalt": "figtools",
    "path.simplify": False,
}


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[str, ...]
    output: str
    kind: str
    style_file: str | None = None
    schema_file: str | None = None
    axis_labels: tuple[str, str] | None = None
    axis_limits: tuple[float, float, float, float] | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"figure kind must be one of {FIGURE_KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input table is required")


def _style(spec: FigureSpec) -> dict:
    style = dict(_BASE_STYLE)
    if spec.style_file:
        style.update(json.loads(Path(spec.style_file).read_text()))
    return style


def _metadata(digest: str, fmt: str) -> dict:
    if fmt == "svg":
        return {"Description": f"input-sha256={digest}", "Date": None}
    return {"Description": f"input-sha256={digest}", "Software": "figtools"}


def _finish(fig, axes, spec: FigureSpec, digest: str) -> Path:
    if spec.axis_labels:
        axes.set_xlabel(spec.axis_labels[0])
        axes.set_ylabel(spec.axis_labels[1])
    if spec.axis_limits:
        x0, x1, y0, y1 = spec.axis_limits
        axes.set_xlim(x0, x1)
        axes.set_ylim(y0, y1)
    out = Path(spec.output)
    fmt = out.suffix.lstrip(".").lower() or "png"
    out.parent.mkdir(parents=True, exist_ok=True)
    # render to a sibling temp file first: a failed render must not leave
    # a partial output behind
    fd, tmp = tempfile.mkstemp(dir=out.parent, suffix=f".{fmt}")
    os.close(fd)
    try:
        fig.savefig(tmp, format=fmt, metadata=_metadata(digest, fmt))
        os.replace(tmp, out)
    except Exception:
        os.unlink(tmp)
        raise
    finally:
        plt.close(fig)
    return out


def _margin(lo: float, hi: float) -> tuple[float, float]:
    pad = 0.05 * (hi - lo) if hi > lo else max(abs(hi), 1.0) * 0.05
    return lo - pad, hi + pad


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the output path."""
    schema = load_schema(spec.schema_file)
    tables = [read_table(p, schema) for p in spec.inputs]
    digest = input_digest(spec.inputs)
    with plt.rc_context(_style(spec)):
        if spec.kind == "spectrum-scatter":
            fig = _render_spectrum(tables, spec)
        elif spec.kind == "root-loci":
            fig = _render_roots(tables, spec)
        elif spec.kind == "rate-curves":
            fig = _render_rates(tables, spec)
        else:
            fig = _render_flow(tables, spec)
        return _finish(fig, fig.axes[0], spec, digest)


def _render_spectrum(tables, spec: FigureSpec):
    main = tables[0]
    fig, ax = plt.subplots()
    ax.scatter(main["re"], main["im"], s=9, c="tab:blue", linewidths=0)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if len(tables) > 1:
        # inset: magnified view of the secondary table's points
        zoom = tables[1]
        inset = fig.add_axes([0.58, 0.58, 0.3, 0.28])
        inset.scatter(zoom["re"], zoom["im"], s=12, c="tab:red", linewidths=0)
        inset.set_xlim(*_margin(zoom["re"].min(), zoom["re"].max()))
        inset.set_ylim(*_margin(float(zoom["im"].min()), float(zoom["im"].max())))
        inset.tick_params(labelsize=7)
        inset.set_title("near zero", fontsize=8)
    return fig


def _render_roots(tables, spec: FigureSpec):
    t = tables[0]
    fig, ax = plt.subplots()
    if "kind" in t:
        roots = t["kind"] == "root"
        poles = t["kind"] == "pole"
    else:
        roots = np.ones(len(t["re_mu"]), dtype=bool)
        poles = ~roots
    g = t.get("g_plus")
    if g is not None and roots.any():
        values = sorted(set(g[roots]))
        cmap = plt.get_cmap("viridis")
        for i, gv in enumerate(values):
            sel = roots & (g == gv)
            color = cmap(i / max(len(values) - 1, 1))
            ax.scatter(t["re_mu"][sel], t["im_mu"][sel], s=18, marker="s",
                       color=color, linewidths=0, label=f"g_plus={gv:g}")
        ax.legend(fontsize=8)
    else:
        ax.scatter(t["re_mu"][roots], t["im_mu"][roots], s=18, marker="s",
                   color="tab:blue", linewidths=0)
    if poles.any():
        ax.scatter(t["re_mu"][poles], t["im_mu"][poles], s=30, marker="o",
                   facecolors="none", edgecolors="tab:red")
    ax.set_xlabel("Re mu")
    ax.set_ylabel("Im mu")
    return fig


def _render_rates(tables, spec: FigureSpec):
    t = tables[0]
    fig, ax = plt.subplots()
    x_name = "inv_g_plus" if "inv_g_plus" in t else "g_plus"
    x = t[x_name]
    styles = ["o", "s", "^", "none"]
    i = 0
    for name, col in t.items():
        if name == x_name or not isinstance(col[0], (float, np.floating)):
            continue
        finite = np.isfinite(col)
        marker = styles[i % len(styles)]
        if marker == "none":
            ax.plot(x[finite], col[finite], "-", label=name)
        else:
            ax.plot(x[finite], col[finite], marker + "-", markersize=4, label=name)
        i += 1
    ax.set_xlabel(x_name)
    ax.set_ylabel("rate")
    ax.legend(fontsize=8)
    return fig


def _render_flow(tables, spec: FigureSpec):
    t = tables[0]
    fig, ax = plt.subplots()
    ids = np.unique(t["trajectory_id"])
    cmap = plt.get_cmap("tab10")
    for i, k in enumerate(ids):
        sel = t["trajectory_id"] == k
        order = np.argsort(t["delta_omega"][sel])
        ax.plot(t["delta_omega"][sel][order], t["re"][sel][order], "-",
                color=cmap(i % 10), linewidth=1.2)
    ax.set_xlabel("delta_omega")
    ax.set_ylabel("Re lambda")
    return fig
