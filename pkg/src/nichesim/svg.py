"""Dependency-free SVG figures. Output bytes depend only on the inputs."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

SPECIES_COLOURS = {"A": "#1f77b4", "B": "#d62728"}
CONDITION_COLOURS = {"H1": "#444444", "H0": "#aaaaaa"}
RATE_COLOURS = {"species_id_rate": "#e6a800", "bit_rate": "#1f77b4", "msg_rate": "#e377c2"}


def _n(x):
    return f"{x:.2f}"


class Canvas:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.parts = []

    def rect(self, x, y, w, h, fill, **attrs):
        extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        self.parts.append(f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(w)}" height="{_n(h)}" '
                          f'fill="{fill}"{extra}/>')

    def text(self, x, y, s, size=11, anchor="start"):
        self.parts.append(f'<text x="{_n(x)}" y="{_n(y)}" font-size="{size}" '
                          f'font-family="sans-serif" text-anchor="{anchor}">{escape(str(s))}</text>')

    def polyline(self, points, stroke, width=1.5, cls=None):
        pts = " ".join(f"{_n(x)},{_n(y)}" for x, y in points if math.isfinite(y))
        c = f' class="{cls}"' if cls else ""
        self.parts.append(f'<polyline{c} points="{pts}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{width}"/>')

    def polygon(self, points, fill, opacity=0.3, cls=None):
        pts = " ".join(f"{_n(x)},{_n(y)}" for x, y in points)
        c = f' class="{cls}"' if cls else ""
        self.parts.append(f'<polygon{c} points="{pts}" fill="{fill}" fill-opacity="{opacity}"/>')

    def circle(self, x, y, r, fill, opacity=0.7):
        self.parts.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="{_n(r)}" fill="{fill}" '
                          f'fill-opacity="{opacity}"/>')

    def open_group(self, cls, label=None):
        lab = f' data-label="{escape(str(label))}"' if label is not None else ""
        self.parts.append(f'<g class="{cls}"{lab}>')

    def close_group(self):
        self.parts.append("</g>")

    def render(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        body = [head, f'<rect width="{self.width}" height="{self.height}" fill="white"/>']
        return "\n".join(body + self.parts + ["</svg>"]) + "\n"


def _grey(v):
    v = min(1.0, max(0.0, float(v)))
    level = int(round(255 * (1.0 - v)))
    return f"#{level:02x}{level:02x}{level:02x}"


class Axes:
    """Maps data coordinates into a rectangle of the canvas."""

    def __init__(self, canvas, x0, y0, w, h, xlim, ylim):
        self.c, self.x0, self.y0, self.w, self.h = canvas, x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + (x - lo) / ((hi - lo) or 1.0) * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (y - lo) / ((hi - lo) or 1.0) * self.h

    def frame(self, xlabel="", ylabel="", ticks=5):
        c = self.c
        c.rect(self.x0, self.y0, self.w, self.h, "none", stroke="black")
        for i in range(ticks + 1):
            yv = self.ylim[0] + (self.ylim[1] - self.ylim[0]) * i / ticks
            c.text(self.x0 - 4, self.py(yv) + 4, f"{yv:.2f}", size=9, anchor="end")
            xv = self.xlim[0] + (self.xlim[1] - self.xlim[0]) * i / ticks
            c.text(self.px(xv), self.y0 + self.h + 12, f"{xv:g}", size=9, anchor="middle")
        if xlabel:
            c.text(self.x0 + self.w / 2, self.y0 + self.h + 26, xlabel, anchor="middle")
        if ylabel:
            c.text(self.x0, self.y0 - 6, ylabel)


def spectrogram_svg(matrices, title="Band usage over generations"):
    """One 9-row heat strip per species; ``matrices`` maps species -> rates (9 x G)."""
    species = list(matrices)
    n_gen = max(len(m[0]) for m in matrices.values())
    cell_w = max(1.0, min(6.0, 900.0 / max(n_gen, 1)))
    row_h = 12
    left, top, gap = 70, 30, 40
    width = int(left + cell_w * n_gen + 30)
    height = int(top + len(species) * (9 * row_h + gap) + 20)
    c = Canvas(width, height)
    c.text(left, 18, title, size=13)
    for k, sp in enumerate(species):
        y0 = top + k * (9 * row_h + gap)
        c.open_group("species-panel", sp)
        c.text(8, y0 + 4.5 * row_h, f"Species {sp}")
        for band, row in enumerate(matrices[sp]):
            c.open_group("band-row", band)
            y = y0 + (8 - band) * row_h
            c.text(left - 4, y + row_h - 2, band, size=9, anchor="end")
            for g, v in enumerate(row):
                c.rect(left + g * cell_w, y, cell_w, row_h, _grey(v))
            c.close_group()
        c.text(left, y0 + 9 * row_h + 14, "generation", size=9)
        c.close_group()
    return c.render()


def silhouette_svg(series, single_run=None, marks=(), title="Silhouette score by species"):
    """``series`` maps condition -> (mean list, std list)."""
    n_gen = max(len(m) for m, _ in series.values())
    lows = [min(0.0, *(a - b for a, b in zip(m, s))) for m, s in series.values()]
    highs = [max(a + b for a, b in zip(m, s)) for m, s in series.values()]
    ylim = (min(lows + [0.0]), max(highs + [0.1]))
    c = Canvas(760, 360)
    c.text(60, 18, title, size=13)
    ax = Axes(c, 60, 30, 660, 280, (0, max(n_gen - 1, 1)), ylim)
    ax.frame("generation", "silhouette")
    for cond, (mean, std) in series.items():
        colour = CONDITION_COLOURS.get(cond, "#666666")
        c.open_group("series", cond)
        upper = [(ax.px(g), ax.py(m + s)) for g, (m, s) in enumerate(zip(mean, std))]
        lower = [(ax.px(g), ax.py(m - s)) for g, (m, s) in enumerate(zip(mean, std))]
        c.polygon(upper + lower[::-1], colour, 0.25, cls="std-band")
        c.polyline([(ax.px(g), ax.py(m)) for g, m in enumerate(mean)], colour, cls="mean-line")
        c.close_group()
    if single_run is not None:
        c.open_group("series", "example run")
        c.polyline([(ax.px(g), ax.py(v)) for g, v in enumerate(single_run)], "#e377c2", 1.0)
        for g in marks:
            if 0 <= g < len(single_run):
                c.circle(ax.px(g), ax.py(single_run[g]), 4, "#e377c2", 1.0)
        c.close_group()
    for i, cond in enumerate(series):
        c.rect(600, 40 + 16 * i, 12, 10, CONDITION_COLOURS.get(cond, "#666666"))
        c.text(616, 49 + 16 * i, cond, size=10)
    return c.render()


def scores_svg(curves, title="Receiver performance"):
    """``curves`` maps rate name -> per-generation values (NaN entries are skipped)."""
    n_gen = max(len(v) for v in curves.values())
    c = Canvas(760, 360)
    c.text(60, 18, title, size=13)
    ax = Axes(c, 60, 30, 660, 280, (0, max(n_gen - 1, 1)), (0.0, 1.0))
    ax.frame("generation", "rate")
    for i, (name, values) in enumerate(curves.items()):
        colour = RATE_COLOURS.get(name, "#333333")
        c.open_group("series", name)
        c.polyline([(ax.px(g), ax.py(float(v))) for g, v in enumerate(values)], colour)
        c.close_group()
        c.rect(560, 250 + 16 * i, 12, 10, colour)
        c.text(576, 259 + 16 * i, name, size=10)
    return c.render()


def clusters_svg(panels, title="t-SNE embeddings of sender signals"):
    """``panels`` is a list of (generation, [(species, x, y), ...]) tuples."""
    size, pad = 200, 20
    c = Canvas(pad + len(panels) * (size + pad), size + 60)
    c.text(pad, 18, title, size=13)
    for k, (gen, pts) in enumerate(panels):
        x0 = pad + k * (size + pad)
        xs = [p[1] for p in pts] or [0.0]
        ys = [p[2] for p in pts] or [0.0]
        ax = Axes(c, x0, 40, size, size, (min(xs), max(xs)), (min(ys), max(ys)))
        c.open_group("cluster-panel", gen)
        c.rect(x0, 40, size, size, "none", stroke="black")
        c.text(x0 + size / 2, 34, f"generation {gen}", size=10, anchor="middle")
        for sp, x, y in pts:
            c.circle(ax.px(x), ax.py(y), 1.6, SPECIES_COLOURS.get(sp, "#333333"))
        c.close_group()
    return c.render()
