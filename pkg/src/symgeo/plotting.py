"""SVG rendering of envelope functions (deterministic output)."""
from __future__ import annotations

import io
from fractions import Fraction
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .geography import EXACT, EnvelopeFn, fmt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "symgeo"
matplotlib.rcParams["svg.fonttype"] = "none"

_STYLE = {EXACT: "-", "unknown": ":", "upper_bound": "--", "upper_envelope": "-"}


def _span(f: EnvelopeFn, lo: Fraction, hi: Fraction):
    for pc in f.pieces:
        a = lo if pc.lo is None else max(pc.lo, lo)
        z = hi if pc.hi is None else min(pc.hi, hi)
        if a <= z:
            yield pc, a, z


def render_svg(panels: Sequence[tuple[str, EnvelopeFn]], lo, hi) -> str:
    """Stacked graphs, one per (title, function), over b in [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    fig, axes = plt.subplots(len(panels), 1, figsize=(6, 2.4 * len(panels)), squeeze=False)
    for ax, (title, f) in zip(axes[:, 0], panels):
        for pc, a, z in _span(f, lo, hi):
            ax.plot([float(a), float(z)], [float(pc.value(a)), float(pc.value(z))],
                    _STYLE.get(pc.status, "-"), color="black", linewidth=1.4)
        for x in f.breakpoints:
            if lo <= x <= hi:
                ax.plot([float(x)], [float(f.evaluate(x))], "o", color="black", markersize=4)
                ax.annotate(fmt(x), (float(x), float(f.evaluate(x))), textcoords="offset points",
                            xytext=(4, 4), fontsize=8)
        for x, v in f.exact_points:
            ax.plot([float(x)], [float(v)], "s", color="black", markersize=4)
        ax.axvline(0, color="0.8", linewidth=0.6)
        ax.set_xlim(float(lo), float(hi))
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("b", fontsize=8)
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()
