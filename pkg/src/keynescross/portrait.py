import math
import multiprocessing
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np
from loguru import logger
from tqdm import tqdm

from keynescross.equilibrium import thresholds as policy_thresholds
from keynescross.errors import NotASaddleError, ParameterError
from keynescross.integrator import (DEFAULT_DT, DEFAULT_T_MAX, IntegrationOptions, Termination,
                                    TerminationKind, Trajectory, integrate)
from keynescross.model import EconState, field as flow_field
from keynescross.spectral import Classification, analyze

DEFAULT_GRID = (20, 20)
DEFAULT_NULLCLINE_POINTS = 200
SEPARATRIX_DELTA = 1e-6


@dataclass(frozen=True)
class Window:
    i_min: float
    i_max: float
    c_min: float
    c_max: float

    def __post_init__(self):
        values = (self.i_min, self.i_max, self.c_min, self.c_max)
        if not all(math.isfinite(v) for v in values):
            raise ParameterError(f'window bounds must be finite, got {values}')
        if not (self.i_min < self.i_max and self.c_min < self.c_max):
            raise ParameterError(f'window needs i_min < i_max and c_min < c_max, got {values}')

    @property
    def radius(self):
        return max(abs(self.i_min), abs(self.i_max), abs(self.c_min), abs(self.c_max))

    def contains(self, i, c):
        return (self.i_min <= i <= self.i_max) and (self.c_min <= c <= self.c_max)


@dataclass(frozen=True, eq=False)
class Polyline:
    label: str
    points: np.ndarray

    def __post_init__(self):
        if len(self.points) < 2 or not np.all(np.isfinite(self.points)):
            raise ParameterError(f'polyline {self.label} needs at least 2 finite points')


@dataclass(frozen=True, eq=False)
class VectorGrid:
    """
    Vector field sampled on a lattice (I varies fastest).

    `directions` are unit vectors; where the field vanishes the direction is (0, 0)
    and `defined` is False.
    """
    points: np.ndarray
    directions: np.ndarray
    magnitudes: np.ndarray
    defined: np.ndarray
    shape: tuple

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class Portrait:
    params: object
    policy: object
    window: Window
    grid: VectorGrid
    nullclines: list
    trajectories: list
    separatrices: list
    reports: list
    thresholds: object = field(default=None)


def _crossing(p0, p1, level):
    t = (level - p0[1]) / (p1[1] - p0[1])
    return (p0[0] + t * (p1[0] - p0[0]), level)


def _clip(label, i_vals, c_vals, window):
    """Split a sampled curve into in-window pieces, interpolating the crossings of c_min/c_max."""
    lo, hi = window.c_min, window.c_max
    pieces, cur = [], []

    def close():
        if len(cur) >= 2:
            pieces.append(Polyline(label, np.array(cur, dtype=float)))
        cur.clear()

    pts = list(zip(i_vals.tolist(), c_vals.tolist()))
    for k, p in enumerate(pts):
        inside = lo <= p[1] <= hi
        if k == 0:
            if inside:
                cur.append(p)
            continue
        q = pts[k - 1]
        q_inside = lo <= q[1] <= hi
        if q_inside and inside:
            cur.append(p)
        elif q_inside:
            cur.append(_crossing(q, p, hi if p[1] > hi else lo))
            close()
        elif inside:
            cur.extend([_crossing(q, p, hi if q[1] > hi else lo), p])
        elif (q[1] - hi) * (p[1] - hi) < 0 or (q[1] - lo) * (p[1] - lo) < 0:
            # segment passes through the whole window
            first, last = (lo, hi) if q[1] < lo else (hi, lo)
            cur.extend([_crossing(q, p, first), _crossing(q, p, last)])
            close()
    close()
    return pieces


def nullclines(params, policy, window, n=DEFAULT_NULLCLINE_POINTS):
    """
    Nullclines sampled at `n` incomes across the window: dI/dt = 0 on C = I/alpha,
    dC/dt = 0 on C = I - G(I). Parts outside [c_min, c_max] are clipped.
    """
    if n < 2:
        raise ParameterError(f'nullclines need n >= 2, got {n}')
    i_vals = np.linspace(window.i_min, window.i_max, n)
    lines = _clip('i_nullcline', i_vals, i_vals / params.alpha, window)
    lines += _clip('c_nullcline', i_vals, i_vals - policy.spending(i_vals), window)
    return lines


def vector_grid(params, policy, window, nx=DEFAULT_GRID[0], ny=DEFAULT_GRID[1]):
    if nx < 2 or ny < 2:
        raise ParameterError(f'vector grid needs nx, ny >= 2, got {nx}, {ny}')
    ii, cc = np.meshgrid(np.linspace(window.i_min, window.i_max, nx),
                         np.linspace(window.c_min, window.c_max, ny))
    ii, cc = ii.ravel(), cc.ravel()
    di, dc = flow_field(params, policy, ii, cc)
    vec = np.stack([di, dc], axis=1)
    mag = np.hypot(di, dc)
    defined = mag > 0
    directions = np.zeros_like(vec)
    directions[defined] = vec[defined] / mag[defined, None]
    return VectorGrid(np.stack([ii, cc], axis=1), directions, mag, defined, (ny, nx))


def _truncate(traj, window):
    outside = [k for k, (i, c) in enumerate(traj.states) if not window.contains(i, c)]
    if not outside:
        return traj
    k = outside[0]
    return Trajectory(traj.t[:k + 1], traj.states[:k + 1], Termination(TerminationKind.ESCAPED),
                      traj.backward, traj.label)


def separatrices(params, policy, report, delta=None, t_max=DEFAULT_T_MAX, window=None, dt=DEFAULT_DT,
                 equilibria=()):
    """
    Stable and unstable manifolds of a saddle.

    Branches are seeded at equilibrium +- delta * v for each eigenvector v. Unstable
    branches run forward in time, stable branches run the time-reversed flow.

    Returns:
        list: [unstable+, unstable-, stable+, stable-] trajectories.

    Raises:
        NotASaddleError: `report` is not classified as a saddle.
    """
    if report.classification is not Classification.SADDLE:
        raise NotASaddleError(f'separatrices need a saddle, got {report.classification.value}')
    eq = report.point.state
    if delta is None:
        delta = SEPARATRIX_DELTA * max(1.0, eq.norm_inf)
    escape = window.radius if window is not None else None
    opts = IntegrationOptions(dt=min(dt, t_max), t_max=t_max,
                              **({'escape_radius': escape} if escape else {}))
    kept = [n for n, e in enumerate(equilibria) if e.state != eq]
    others = [equilibria[n] for n in kept]

    eigen = report.eigen
    directions = {}
    for lam, v in ((eigen.lambda1, eigen.v1), (eigen.lambda2, eigen.v2)):
        key = 'unstable' if lam.real > 0 else 'stable'
        directions[key] = np.array([v[0].real, v[1].real])

    branches = []
    for key in ('unstable', 'stable'):
        for sign, suffix in ((1.0, '+'), (-1.0, '-')):
            seed = EconState.from_array(eq.as_array() + sign * delta * directions[key])
            traj = integrate(params, policy, seed, opts,
                             equilibria=others if key == 'unstable' else (),
                             backward=key == 'stable', label=f'{key}{suffix}')
            if traj.termination.kind is TerminationKind.CAPTURED:
                # index into the caller's list, not `others`
                index = kept[traj.termination.equilibrium_index]
                traj = replace(traj, termination=Termination(TerminationKind.CAPTURED, index))
            branches.append(_truncate(traj, window) if window is not None else traj)
    return branches


def downsample(traj, max_points):
    """Evenly spaced subset of the samples, always keeping the first and the last."""
    n = len(traj)
    if n <= max_points:
        return traj.states
    idx = np.unique(np.linspace(0, n - 1, max_points).round().astype(int))
    return traj.states[idx]


def closed_orbit_index(traj, rel_tol=0.02):
    """
    Index of the first return of a trajectory to its initial state, or None.

    A return is a local minimum of the distance to the start, reached after the
    trajectory has moved more than half its maximum distance away, and closer than
    rel_tol times that maximum.
    """
    d = np.hypot(*(traj.states - traj.states[0]).T)
    extent = d.max() if len(d) else 0.0
    if extent == 0:
        return None
    away = np.flatnonzero(d > 0.5 * extent)
    if not len(away):
        return None
    for k in range(away[0] + 1, len(d) - 1):
        if d[k] <= d[k - 1] and d[k] <= d[k + 1] and d[k] <= rel_tol * extent:
            return k
    return None


def default_window(reports, margin=2.0):
    """
    Window holding every equilibrium with a `margin`-fold extent: first quadrant when all
    equilibria are economically sensible, symmetric around the origin otherwise.
    """
    if not reports:
        return Window(0.0, 10.0, 0.0, 10.0)
    i_ext = max(1.0, margin * max(abs(r.point.state.i) for r in reports))
    c_ext = max(1.0, margin * max(abs(r.point.state.c) for r in reports))
    if all(r.point.economically_sensible for r in reports):
        return Window(0.0, i_ext, 0.0, c_ext)
    return Window(-i_ext, i_ext, -c_ext, c_ext)


def box_seeds(window, per_side=3):
    """Initial conditions spread along the window boundary."""
    i_vals = np.linspace(window.i_min, window.i_max, per_side)
    c_vals = np.linspace(window.c_min, window.c_max, per_side)
    seeds = [(i, window.c_min) for i in i_vals] + [(i, window.c_max) for i in i_vals]
    seeds += [(window.i_min, c) for c in c_vals[1:-1]] + [(window.i_max, c) for c in c_vals[1:-1]]
    return [EconState(float(i), float(c)) for i, c in seeds]


def _integrate_seed(params, policy, opts, equilibria, seed):
    return integrate(params, policy, seed, opts, equilibria, label='seed')


def build_portrait(params, policy, window, seeds, opts=None, grid=DEFAULT_GRID,
                   n_nullcline=DEFAULT_NULLCLINE_POINTS, n_workers=1, progress=False):
    """
    Assemble a phase portrait: equilibrium reports, nullclines, vector grid,
    one trajectory per seed and the separatrices of every saddle.

    Args:
        seeds (list): EconState initial conditions; trajectories keep this order.
        opts (IntegrationOptions): Used for the seed trajectories and the separatrices.
        n_workers (int): Number of worker processes for the seed trajectories.
        progress (bool): Show a progress bar over the seeds.
    """
    opts = opts or IntegrationOptions()
    reports = analyze(params, policy)
    points = [r.point for r in reports]

    run_seed = partial(_integrate_seed, params, policy, opts, points)
    bar = dict(total=len(seeds), desc='Trajectories', disable=not progress, leave=False)
    if n_workers > 1:
        with multiprocessing.Pool(n_workers) as p:
            trajectories = list(tqdm(p.imap(run_seed, seeds), **bar))
    else:
        trajectories = [run_seed(s) for s in tqdm(seeds, **bar)]

    seps = []
    for r in reports:
        if r.classification is Classification.SADDLE:
            seps += separatrices(params, policy, r, t_max=opts.t_max, window=window, dt=opts.dt,
                                 equilibria=points)

    for n, traj in enumerate(trajectories):
        logger.info(f'seed {n} ({traj.initial_state.i:.6g}, {traj.initial_state.c:.6g}): {traj.termination}')

    return Portrait(
        params=params,
        policy=policy,
        window=window,
        grid=vector_grid(params, policy, window, *grid),
        nullclines=nullclines(params, policy, window, n_nullcline),
        trajectories=trajectories,
        separatrices=seps,
        reports=reports,
        thresholds=policy_thresholds(params, policy),
    )
