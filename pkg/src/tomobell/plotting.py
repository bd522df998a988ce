"""Figure rendering for sweep output.

Figures are built on bare matplotlib Figure objects (no pyplot, no
global state) and written with a fixed hash salt and no date metadata so
that identical input produces byte-identical SVG files.
"""

from __future__ import annotations

import matplotlib
from matplotlib.figure import Figure

_SVG_HASHSALT = "tomobell"


def build_sweep_figure(params, bell_values, purities, bound=2.0, param_label="param"):
    """Two stacked panels: Bell maximum vs parameter, and purity vs parameter."""
    fig = Figure(figsize=(8.0, 9.0))
    ax_bell, ax_purity = fig.subplots(2, 1, sharex=True)

    ax_bell.plot(params, bell_values, "-", color="C0", label="bell_max")
    ax_bell.axhline(bound, linestyle="-.", color="0.3", label="classical bound")
    ax_bell.set_ylabel("bell_max")
    ax_bell.legend(loc="best")
    ax_bell.set_title("(a) maximal Bell value")

    ax_purity.plot(params, purities, "-", color="C1")
    ax_purity.set_ylabel("purity")
    ax_purity.set_xlabel(param_label)
    ax_purity.set_title("(b) purity")

    fig.align_ylabels((ax_bell, ax_purity))
    return fig


def save_figure(fig, path) -> None:
    """Write the figure to ``path`` (format from the extension, SVG default)."""
    fmt = None
    text = str(path)
    if "." in text:
        fmt = text.rsplit(".", 1)[1].lower() or None
    with matplotlib.rc_context({"svg.hashsalt": _SVG_HASHSALT}):
        fig.savefig(path, format=fmt or "svg", metadata={"Date": None})
