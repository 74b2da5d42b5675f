"""
Deterministic SVG figures for portraits and sweeps.

Output depends only on the input: fixed canvas, fixed number formatting, no
timestamps, elements emitted in input order.
"""
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from keynescross.bifurcation import SweepResult
from keynescross.errors import RenderError
from keynescross.portrait import Portrait, closed_orbit_index, downsample
from keynescross.render.tables import policy_dict
from keynescross.spectral import Classification

WIDTH = 800
HEIGHT = 600


@dataclass(frozen=True)
class SvgStyle:
    margin: float = 60.0
    max_points: int = 2000
    arrow_fraction: float = 0.35
    ticks: int = 5
    trajectory_color: str = '#1f77b4'
    separatrix_color: str = '#d62728'
    nullcline_color: str = '#2ca02c'
    arrow_color: str = '#999999'
    branch_color: str = '#1f77b4'


def _f(v):
    return f'{v:.2f}'


class _Axes:
    def __init__(self, x0, x1, y0, y1, style):
        if not (x1 > x0 and y1 > y0):
            raise RenderError(f'empty plot window [{x0}, {x1}] x [{y0}, {y1}]')
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.m = style.margin
        self.sx = (WIDTH - 2 * self.m) / (x1 - x0)
        self.sy = (HEIGHT - 2 * self.m) / (y1 - y0)
        self.style = style

    def px(self, x, y):
        return self.m + (x - self.x0) * self.sx, HEIGHT - self.m - (y - self.y0) * self.sy

    def points(self, xy):
        return ' '.join(f'{_f(a)},{_f(b)}' for a, b in (self.px(x, y) for x, y in xy))

    def frame(self, x_label, y_label):
        m, s = self.m, self.style
        out = [f'<rect class="frame" x="{_f(m)}" y="{_f(m)}" width="{_f(WIDTH - 2 * m)}" '
               f'height="{_f(HEIGHT - 2 * m)}" fill="none" stroke="#000000"/>']
        for v in np.linspace(self.x0, self.x1, s.ticks):
            x, _ = self.px(v, self.y0)
            out.append(f'<text class="tick" x="{_f(x)}" y="{_f(HEIGHT - m + 18)}" '
                       f'text-anchor="middle" font-size="11">{v:.4g}</text>')
        for v in np.linspace(self.y0, self.y1, s.ticks):
            _, y = self.px(self.x0, v)
            out.append(f'<text class="tick" x="{_f(m - 6)}" y="{_f(y + 4)}" '
                       f'text-anchor="end" font-size="11">{v:.4g}</text>')
        out.append(f'<text class="label" x="{_f(WIDTH / 2)}" y="{_f(HEIGHT - 15)}" '
                   f'text-anchor="middle" font-size="13">{escape(x_label)}</text>')
        out.append(f'<text class="label" x="15" y="{_f(HEIGHT / 2)}" text-anchor="middle" font-size="13" '
                   f'transform="rotate(-90 15 {_f(HEIGHT / 2)})">{escape(y_label)}</text>')
        return out

    def clip(self):
        m = self.m
        return (f'<clipPath id="plot-area"><rect x="{_f(m)}" y="{_f(m)}" '
                f'width="{_f(WIDTH - 2 * m)}" height="{_f(HEIGHT - 2 * m)}"/></clipPath>')


def _document(title, defs, body):
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<title>{escape(title)}</title>',
        '<defs>', *defs, '</defs>',
        f'<rect class="background" x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text class="title" x="{_f(WIDTH / 2)}" y="30" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    return '\n'.join(head + body + ['</svg>']) + '\n'


def _title(params, policy):
    p = policy_dict(policy)
    terms = ', '.join(f'{k}={v:g}' for k, v in p.items() if k != 'model')
    return f'{p["model"]} spending: alpha={params.alpha:g}, beta={params.beta:g}, {terms}'


def _marker(ax, report):
    x, y = ax.px(report.point.state.i, report.point.state.c)
    kind = report.classification
    cls = quoteattr(f'equilibrium {kind.value}')
    if kind is Classification.SADDLE:
        return f'<rect class={cls} x="{_f(x - 6)}" y="{_f(y - 6)}" width="12" height="12" fill="#000000"/>'
    if kind is Classification.CENTER:
        return (f'<circle class={cls} cx="{_f(x)}" cy="{_f(y)}" r="6" fill="none" stroke="#000000" '
                f'stroke-width="2" stroke-dasharray="2,2"/>')
    if kind is Classification.DEGENERATE:
        return (f'<polygon class={cls} points="{_f(x)},{_f(y - 7)} {_f(x + 7)},{_f(y)} '
                f'{_f(x)},{_f(y + 7)} {_f(x - 7)},{_f(y)}" fill="#7f7f7f"/>')
    fill = '#000000' if kind.is_stable else '#ffffff'
    return f'<circle class={cls} cx="{_f(x)}" cy="{_f(y)}" r="6" fill="{fill}" stroke="#000000"/>'


def _arrows(ax, grid, nx, ny, style):
    cell = min((WIDTH - 2 * ax.m) / max(nx - 1, 1), (HEIGHT - 2 * ax.m) / max(ny - 1, 1))
    length = style.arrow_fraction * cell
    out = []
    for (i, c), (di, dc), ok in zip(grid.points, grid.directions, grid.defined):
        if not ok:
            continue
        x, y = ax.px(i, c)
        u, v = di * ax.sx, -dc * ax.sy
        n = float(np.hypot(u, v))
        if n == 0:
            continue
        x1, y1 = x + length * u / n, y + length * v / n
        out.append(f'<line class="arrow" x1="{_f(x)}" y1="{_f(y)}" x2="{_f(x1)}" y2="{_f(y1)}" '
                   f'stroke="{style.arrow_color}" marker-end="url(#arrowhead)"/>')
    return out


def _trajectory(ax, traj, style):
    k = closed_orbit_index(traj)
    if k is not None and not traj.backward:
        pts = downsample(type(traj)(traj.t[:k + 1], traj.states[:k + 1], traj.termination), style.max_points)
        coords = [ax.px(i, c) for i, c in pts]
        d = 'M ' + ' L '.join(f'{_f(x)},{_f(y)}' for x, y in coords) + ' Z'
        return (f'<path class="trajectory closed" d="{d}" fill="none" '
                f'stroke="{style.trajectory_color}" stroke-width="1.5"/>')
    pts = downsample(traj, style.max_points)
    if len(pts) < 2:
        return None
    return (f'<polyline class="trajectory" points="{ax.points(pts)}" fill="none" '
            f'stroke="{style.trajectory_color}" stroke-width="1.5"/>')


def render_portrait_svg(portrait, style=None):
    style = style or SvgStyle()
    if portrait.window is None:
        raise RenderError('portrait has no window')
    w = portrait.window
    ax = _Axes(w.i_min, w.i_max, w.c_min, w.c_max, style)
    defs = [
        ax.clip(),
        f'<marker id="arrowhead" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto">'
        f'<path d="M0,0 L6,3 L0,6 z" fill="{style.arrow_color}"/></marker>',
    ]
    ny, nx = portrait.grid.shape
    body = ax.frame('national income I', 'consumer spending C')
    body.append('<g clip-path="url(#plot-area)">')
    body += ['<g class="grid">', *_arrows(ax, portrait.grid, nx, ny, style), '</g>']
    body.append('<g class="nullclines">')
    for line in portrait.nullclines:
        body.append(f'<polyline class={quoteattr("nullcline " + line.label)} points="{ax.points(line.points)}" '
                    f'fill="none" stroke="{style.nullcline_color}" stroke-width="1.5" stroke-dasharray="6,4"/>')
    body.append('</g>')
    body.append('<g class="trajectories">')
    body += [s for s in (_trajectory(ax, t, style) for t in portrait.trajectories) if s]
    body.append('</g>')
    body.append('<g class="separatrices">')
    for sep in portrait.separatrices:
        pts = downsample(sep, style.max_points)
        if len(pts) < 2:
            continue
        kind = 'stable' if sep.backward else 'unstable'
        body.append(f'<polyline class="separatrix {kind}" points="{ax.points(pts)}" fill="none" '
                    f'stroke="{style.separatrix_color}" stroke-width="3"/>')
    body.append('</g>')
    body += ['<g class="equilibria">', *(_marker(ax, r) for r in portrait.reports), '</g>']
    body.append('</g>')
    return _document(_title(portrait.params, portrait.policy), defs, body)


def _branches(records):
    """
    Runs of consecutive grid values per equilibrium index. A single equilibrium next
    to a pair of equilibria closes the upper branch as well (fold point).
    """
    counts = [r.count for r in records]
    width = max(counts, default=0)
    runs = []
    for idx in range(width):
        run = []
        for n, r in enumerate(records):
            point = None
            if idx < r.count:
                point = r.entries[idx].state
            elif idx == 1 and r.count == 1 and (
                    (n > 0 and counts[n - 1] == 2) or (n + 1 < len(records) and counts[n + 1] == 2)):
                point = r.entries[0].state
            if point is None:
                if len(run) >= 2:
                    runs.append((idx, run))
                run = []
            else:
                run.append((r.value, point.i))
        if len(run) >= 2:
            runs.append((idx, run))
    return runs


def render_sweep_svg(result, style=None):
    style = style or SvgStyle()
    values = result.values
    incomes = [e.state.i for r in result.records for e in r.entries]
    if incomes:
        lo, hi = min(incomes), max(incomes)
        pad = 0.1 * (hi - lo) if hi > lo else max(1.0, abs(hi))
        y0, y1 = lo - pad, hi + pad
    else:
        y0, y1 = 0.0, 1.0
    ax = _Axes(values[0], values[-1], y0, y1, style)
    body = ax.frame(result.spec.param.value, 'equilibrium income I')
    body.append('<g clip-path="url(#plot-area)">')
    body.append('<g class="branches">')
    for idx, run in _branches(result.records):
        body.append(f'<polyline class="branch" data-index="{idx}" points="{ax.points(run)}" fill="none" '
                    f'stroke="{style.branch_color}" stroke-width="2"/>')
    body.append('</g>')
    body.append('<g class="transitions">')
    for t in result.transitions:
        x, _ = ax.px(t.location, y0)
        body.append(f'<line class="transition {t.kind.value}" x1="{_f(x)}" y1="{_f(ax.m)}" x2="{_f(x)}" '
                    f'y2="{_f(HEIGHT - ax.m)}" stroke="#7f7f7f" stroke-dasharray="4,4">'
                    f'<title>{escape(t.description)} at {t.location:.9g}</title></line>')
    body.append('</g>')
    body.append('<g class="points">')
    for r in result.records:
        for e in r.entries:
            x, y = ax.px(r.value, e.state.i)
            body.append(f'<circle class={quoteattr("sweep-point " + e.classification.value)} '
                        f'cx="{_f(x)}" cy="{_f(y)}" r="3" fill="#000000"/>')
    body.append('</g>')
    body.append('</g>')
    spec = result.spec
    title = f'sweep of {spec.param.value}: {_title(spec.base_params, spec.base_policy)}'
    return _document(title, [ax.clip()], body)


def render_svg(obj, style=None):
    """SVG document for a Portrait or a SweepResult."""
    if isinstance(obj, Portrait):
        return render_portrait_svg(obj, style)
    if isinstance(obj, SweepResult):
        return render_sweep_svg(obj, style)
    raise RenderError(f'cannot render {type(obj).__name__} as SVG')
