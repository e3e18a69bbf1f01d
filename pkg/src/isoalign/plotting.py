"""Minimal deterministic SVG plots of record tables.

Matplotlib is deliberately not used here: the experiment pipeline promises
byte-identical output for identical inputs, which is easiest to guarantee by
writing the handful of SVG elements ourselves. One polyline per series, data
points as circles, optional least-squares fit in (x or ln x, score) with the
rank correlation printed in the caption.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from .isometry import pearson

WIDTH, HEIGHT = 860, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 180, 40, 80

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _esc(text: str) -> str:
    return (
        str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def emit_plot(
    records: Sequence[dict],
    x: str = "value",
    y: str = "mrr",
    series: Sequence[str] = ("pair",),
    log_x: bool = False,
    fit: bool = False,
    out=None,
    title: str = "",
):
    """Render rows with ``metric == y`` as an SVG line chart.

    ``x`` names the record field plotted on the x axis; the y axis is always
    the score. ``series`` fields group rows into one polyline each (empty
    sequence = single pooled series). With ``fit``, a least-squares line in
    ``(ln x, score)`` space (plain x when ``log_x`` is off) is drawn and the
    Spearman correlation of the pooled points goes into the caption.

    Returns ``(svg_text, stats)``; stats is None unless ``fit`` is set.
    """
    groups: dict[tuple, list] = {}
    for rec in records:
        if rec.get("metric") != y:
            continue
        key = tuple(str(rec.get(f, "")) for f in series)
        try:
            xv = float(rec[x])
        except (KeyError, ValueError):
            raise ValueError(f"record field {x!r} is not numeric: {rec.get(x)!r}")
        groups.setdefault(key, []).append((xv, float(rec["score"])))

    groups = {k: v for k, v in groups.items() if len(v) >= 2}
    if not groups:
        raise ValueError(f"no series with at least 2 points for metric {y!r}")
    for pts in groups.values():
        pts.sort(key=lambda p: p[0])

    all_pts = [p for pts in groups.values() for p in pts]
    xs = np.array([p[0] for p in all_pts])
    ys = np.array([p[1] for p in all_pts])
    if log_x and np.any(xs <= 0):
        raise ValueError("log-x requires strictly positive x values")

    def tx(v: float) -> float:
        return math.log(v) if log_x else v

    txs = np.array([tx(v) for v in xs])
    x_lo, x_hi = float(txs.min()), float(txs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    y_pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(v: float) -> float:
        return MARGIN_L + (tx(v) - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return MARGIN_T + (y_hi - v) / (y_hi - y_lo) * plot_h

    el: list[str] = []
    el.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    el.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        el.append(
            f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" '
            f'font-size="15" font-family="sans-serif">{_esc(title)}</text>'
        )

    # axes
    x0, y0 = MARGIN_L, MARGIN_T + plot_h
    el.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>'
    )
    el.append(f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>')

    for i in range(5):
        frac = i / 4
        vx = x_lo + frac * (x_hi - x_lo)
        label = "%.3g" % (math.exp(vx) if log_x else vx)
        cx = MARGIN_L + frac * plot_w
        el.append(
            f'<line x1="{cx:.2f}" y1="{y0}" x2="{cx:.2f}" y2="{y0 + 5}" stroke="black"/>'
        )
        el.append(
            f'<text x="{cx:.2f}" y="{y0 + 20}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{label}</text>'
        )
        vy = y_lo + frac * (y_hi - y_lo)
        cy = py(vy)
        el.append(
            f'<line x1="{x0 - 5}" y1="{cy:.2f}" x2="{x0}" y2="{cy:.2f}" stroke="black"/>'
        )
        el.append(
            f'<text x="{x0 - 8}" y="{cy + 4:.2f}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif">{"%.3g" % vy}</text>'
        )

    el.append(
        f'<text x="{MARGIN_L + plot_w / 2:.2f}" y="{y0 + 40}" text-anchor="middle" '
        f'font-size="12" font-family="sans-serif">{_esc(x + (" (log)" if log_x else ""))}</text>'
    )
    el.append(
        f'<text x="20" y="{MARGIN_T + plot_h / 2:.2f}" text-anchor="middle" '
        f'font-size="12" font-family="sans-serif" '
        f'transform="rotate(-90 20 {MARGIN_T + plot_h / 2:.2f})">{_esc(y)}</text>'
    )

    stats: Optional[dict] = None
    if fit:
        slope, intercept = np.polyfit(txs, ys, 1)
        rho = float(spearmanr(xs, ys).statistic)
        r = pearson(txs, ys)
        stats = {
            "slope": float(slope),
            "intercept": float(intercept),
            "spearman": rho,
            "pearson": r,
        }
        fx0, fx1 = x_lo, x_hi
        fy0, fy1 = slope * fx0 + intercept, slope * fx1 + intercept
        el.append(
            f'<line x1="{MARGIN_L}" y1="{py(fy0):.2f}" x2="{MARGIN_L + plot_w}" '
            f'y2="{py(fy1):.2f}" stroke="#555555" stroke-dasharray="6,4"/>'
        )
        var = "ln(x)" if log_x else "x"
        caption = (
            f"fit: y = {slope:.9g}*{var} + {intercept:.9g} | "
            f"spearman rho = {rho:.4f} | pearson({var}) = {r:.4f}"
        )
        el.append(
            f'<text x="{MARGIN_L}" y="{HEIGHT - 14}" font-size="12" '
            f'font-family="sans-serif">{_esc(caption)}</text>'
        )

    legend_y = MARGIN_T + 10
    for si, (key, pts) in enumerate(groups.items()):
        color = PALETTE[si % len(PALETTE)]
        coords = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in pts)
        el.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        for a, b in pts:
            el.append(
                f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{color}"/>'
            )
        label = "/".join(key) if key else y
        lx = MARGIN_L + plot_w + 16
        el.append(
            f'<line x1="{lx}" y1="{legend_y - 4}" x2="{lx + 22}" y2="{legend_y - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        el.append(
            f'<text x="{lx + 28}" y="{legend_y}" font-size="11" '
            f'font-family="sans-serif">{_esc(label)}</text>'
        )
        legend_y += 18

    el.append("</svg>")
    svg = "\n".join(el) + "\n"
    if out is not None:
        Path(out).write_text(svg, encoding="utf-8")
    return svg, stats
