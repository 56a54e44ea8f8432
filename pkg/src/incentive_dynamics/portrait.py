"""Ternary phase portraits rendered as plain SVG.

Strategy 1 sits at the top vertex, 2 lower-left, 3 lower-right. Cells of the
barycentric grid are colored by mean node speed, blue (slowest) to red
(fastest), scaled to the observed range.
"""

from __future__ import annotations

import colorsys
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import SpeedGrid, TrajectoryConfig, integrate, require_portrait_shape, speed_grid
from .exceptions import InvalidInputError
from .game import Game, MixedProfile
from .incentives import as_spec

WIDTH = 600.0
HEIGHT = 560.0
VERTICES = np.array([[300.0, 40.0], [40.0, 490.0], [560.0, 490.0]])


@dataclass(frozen=True)
class PortraitSpec:
    incentive: str
    resolution: int = 30
    n_seeds: int = 6
    T: float = 60.0
    h: float = 0.01

    def __post_init__(self):
        if self.resolution < 10:
            raise InvalidInputError("SVG portraits need resolution >= 10")
        if self.n_seeds < 0:
            raise InvalidInputError("seed count must be nonnegative")


def to_xy(p) -> np.ndarray:
    return np.asarray(p, float) @ VERTICES


def speed_color(value: float, lo: float, hi: float) -> str:
    frac = 0.0 if hi <= lo else (value - lo) / (hi - lo)
    hue = (2.0 / 3.0) * (1.0 - frac)  # 240 deg -> 0 deg
    r, g, b = colorsys.hsv_to_rgb(hue, 0.85, 0.95)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def _cells(grid: SpeedGrid):
    r = grid.resolution
    index = {(int(i), int(j)): k for k, (i, j, _) in enumerate(grid.indices)}
    for i in range(r):
        for j in range(r - i):
            yield index[i, j], index[i + 1, j], index[i, j + 1]
            if i + j <= r - 2:
                yield index[i + 1, j], index[i, j + 1], index[i + 1, j + 1]


def _fmt(xy) -> str:
    return f"{xy[0]:.2f},{xy[1]:.2f}"


def render_svg(grid: SpeedGrid, streamlines: list[np.ndarray], markers: list[tuple[np.ndarray, bool]],
               title: str = "") -> str:
    lo, hi = float(grid.speeds.min()), float(grid.speeds.max())
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" height="{HEIGHT:.0f}" '
        f'viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="5" '
        'markerHeight="5" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="black"/>'
        "</marker></defs>",
        '<rect width="100%" height="100%" fill="white"/>',
        '<g id="speed">',
    ]
    xy = to_xy(grid.points)
    for a, b, c in _cells(grid):
        color = speed_color(float(grid.speeds[[a, b, c]].mean()), lo, hi)
        out.append(f'<polygon points="{_fmt(xy[a])} {_fmt(xy[b])} {_fmt(xy[c])}" '
                   f'fill="{color}" stroke="{color}" stroke-width="0.5"/>')
    out.append("</g>")
    tri = " ".join(_fmt(v) for v in VERTICES)
    out.append(f'<polygon id="simplex" points="{tri}" fill="none" stroke="black" stroke-width="1.5"/>')
    out.append('<g id="streamlines" fill="none" stroke="black" stroke-width="1">')
    for line in streamlines:
        pts = " ".join(_fmt(p) for p in to_xy(line))
        out.append(f'<polyline points="{pts}" marker-end="url(#arrow)"/>')
    out.append("</g>")
    out.append('<g id="equilibria">')
    for p, interior in markers:
        c = to_xy(p)
        fill = "black" if interior else "white"
        out.append(f'<circle cx="{c[0]:.2f}" cy="{c[1]:.2f}" r="5" fill="{fill}" stroke="black" stroke-width="1.5"/>')
    out.append("</g>")
    labels = [("1", VERTICES[0] + [0, -12]), ("2", VERTICES[1] + [-14, 16]), ("3", VERTICES[2] + [14, 16])]
    for text, pos in labels:
        out.append(f'<text x="{pos[0]:.2f}" y="{pos[1]:.2f}" font-family="sans-serif" font-size="14" '
                   f'text-anchor="middle">{text}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 20:.0f}" font-family="sans-serif" font-size="14" '
                   f'text-anchor="middle">{title}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def portrait(game: Game, spec: PortraitSpec, equilibria=(), seeds=None):
    """Return (svg text, speed grid, streamlines)."""
    require_portrait_shape(game)
    inc = as_spec(spec.incentive)
    grid = speed_grid(inc, game, spec.resolution)
    cfg = TrajectoryConfig(T=spec.T, h=spec.h, record_stride=5)
    lines = []
    seeds = range(spec.n_seeds) if seeds is None else seeds
    for s in seeds:
        x = np.random.default_rng(s).dirichlet(np.ones(3))
        x = 0.9 * x + 0.1 / 3  # keep starts off the edges
        tr = integrate(inc, game, MixedProfile((x, x)), cfg, target=list(equilibria) or None)
        lines.append(tr.states)
    markers = [(np.asarray(e[0]), bool(np.min(e[0]) > 1e-10)) for e in equilibria]
    svg = render_svg(grid, lines, markers, title=f"{inc}")
    return svg, grid, lines


def write_grid_csv(grid: SpeedGrid, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "k", "x1", "x2", "x3", "speed"])
        for idx, p, s in zip(grid.indices, grid.points, grid.speeds):
            w.writerow([*(int(v) for v in idx), *(repr(float(c)) for c in p), repr(float(s))])
