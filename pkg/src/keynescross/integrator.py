import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from loguru import logger

from keynescross.errors import IntegrationError, ParameterError
from keynescross.model import EconState, rhs

DEFAULT_DT = 1e-2
DEFAULT_T_MAX = 50.0
DEFAULT_REL_TOL = 1e-8
DEFAULT_CAPTURE_RADIUS = 1e-8
DEFAULT_ESCAPE_RADIUS = 1e6
GROW_AFTER = 5
GROW_FACTOR = 1.5
UNDERFLOW_FRACTION = 1e-14


class IntegrationMode(str, Enum):
    FIXED = 'fixed'
    ADAPTIVE = 'adaptive'


class TerminationKind(str, Enum):
    TIME_EXHAUSTED = 'time_exhausted'
    CAPTURED = 'captured'
    ESCAPED = 'escaped'
    STEP_UNDERFLOW = 'step_underflow'


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    equilibrium_index: Optional[int] = None

    def __str__(self):
        if self.kind is TerminationKind.CAPTURED:
            return f'captured({self.equilibrium_index})'
        return self.kind.value


@dataclass(frozen=True)
class IntegrationOptions:
    """
    Integration controls.

    Args:
        dt (float): Fixed step, or the initial step in adaptive mode.
        t_max (float): Final time.
        mode (IntegrationMode): fixed or adaptive (step doubling).
        rel_tol (float): Per-step error bound in adaptive mode, relative to max(1, |x|).
        capture_radius (float): Capture distance to an equilibrium, scaled by max(1, |eq|).
        escape_radius (float): Sup-norm beyond which the state counts as escaped.
    """
    dt: float = DEFAULT_DT
    t_max: float = DEFAULT_T_MAX
    mode: IntegrationMode = IntegrationMode.FIXED
    rel_tol: float = DEFAULT_REL_TOL
    capture_radius: float = DEFAULT_CAPTURE_RADIUS
    escape_radius: float = DEFAULT_ESCAPE_RADIUS

    def __post_init__(self):
        for name in ('dt', 't_max', 'rel_tol', 'capture_radius', 'escape_radius'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f'{name} must be positive and finite, got {value}')
        if self.dt > self.t_max:
            raise ParameterError(f'dt must not exceed t_max, got dt={self.dt} > t_max={self.t_max}')
        object.__setattr__(self, 'mode', IntegrationMode(self.mode))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Integration output. `t` holds elapsed time (strictly increasing from 0);
    `backward` marks runs of the time-reversed flow.
    """
    t: np.ndarray
    states: np.ndarray
    termination: Termination
    backward: bool = False
    label: str = field(default='', compare=False)

    def __len__(self):
        return len(self.t)

    @property
    def samples(self):
        return [(float(t), EconState.from_array(x)) for t, x in zip(self.t, self.states)]

    @property
    def initial_state(self):
        return EconState.from_array(self.states[0])

    @property
    def final_state(self):
        return EconState.from_array(self.states[-1])


def _rk4(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _flow(params, policy, backward=False):
    if backward:
        return lambda x: -rhs(params, policy, x)
    return lambda x: rhs(params, policy, x)


def _checked_rk4(f, x, h):
    with np.errstate(over='ignore', invalid='ignore'):
        x_new = _rk4(f, x, h)
    if not np.all(np.isfinite(x_new)):
        raise IntegrationError(f'non-finite state after RK4 step of size {h} from ({x[0]}, {x[1]})')
    return x_new


def rk4_step(params, policy, s, dt):
    """One classical Runge-Kutta step of size `dt` from `s`."""
    if not dt > 0:
        raise ParameterError(f'dt must be positive, got {dt}')
    return EconState.from_array(_checked_rk4(_flow(params, policy), s.as_array(), dt))


class _Events:
    def __init__(self, equilibria, opts):
        self.centers = np.array([e.state.as_array() for e in equilibria]).reshape(-1, 2)
        self.radii = opts.capture_radius * np.maximum(1.0, np.max(np.abs(self.centers), axis=1)) \
            if len(self.centers) else np.zeros(0)
        self.escape_radius = opts.escape_radius

    def check(self, x):
        if np.max(np.abs(x)) > self.escape_radius:
            return Termination(TerminationKind.ESCAPED)
        if len(self.centers):
            dist = np.max(np.abs(self.centers - x), axis=1)
            hits = np.flatnonzero(dist <= self.radii)
            if len(hits):
                return Termination(TerminationKind.CAPTURED, int(hits[0]))
        return None


def integrate(params, policy, init, opts=None, equilibria=(), backward=False, label=''):
    """
    Integrate the flow from `init` with RK4 until t_max, capture or escape.

    Args:
        init (EconState): Initial condition at t = 0.
        opts (IntegrationOptions): Step, horizon, mode and event radii.
        equilibria (list): EquilibriumPoint candidates for capture.
        backward (bool): Integrate the time-reversed (negated) field.

    Returns:
        Trajectory: every accepted step is sampled.
    """
    opts = opts or IntegrationOptions()
    f = _flow(params, policy, backward)
    events = _Events(equilibria, opts)

    x = init.as_array()
    ts, xs = [0.0], [x]
    termination = events.check(x)

    if termination is None and opts.mode is IntegrationMode.FIXED:
        n_steps = math.ceil(opts.t_max / opts.dt * (1.0 - 1e-12))
        t = 0.0
        for n in range(1, n_steps + 1):
            t_next = opts.t_max if n == n_steps else min(n * opts.dt, opts.t_max)
            x = _checked_rk4(f, x, t_next - t)
            t = t_next
            ts.append(t)
            xs.append(x)
            termination = events.check(x)
            if termination is not None:
                break
    elif termination is None:
        t, h, streak = 0.0, opts.dt, 0
        while t < opts.t_max:
            remaining = opts.t_max - t
            h = min(h, remaining)
            if h < UNDERFLOW_FRACTION * opts.t_max:
                termination = Termination(TerminationKind.STEP_UNDERFLOW)
                logger.warning(f'step underflow at t={t}, h={h:.3e}')
                break
            try:
                full = _checked_rk4(f, x, h)
                half = _checked_rk4(f, _checked_rk4(f, x, 0.5 * h), 0.5 * h)
                err = np.max(np.abs(half - full)) / 15.0
            except IntegrationError:
                err = math.inf
            if err <= opts.rel_tol * max(1.0, np.max(np.abs(x))):
                x = half + (half - full) / 15.0
                t = opts.t_max if h == remaining else t + h
                ts.append(t)
                xs.append(x)
                streak += 1
                if streak >= GROW_AFTER:
                    h *= GROW_FACTOR
                    streak = 0
                termination = events.check(x)
                if termination is not None:
                    break
            else:
                logger.debug(f'rejected step h={h:.3e} at t={t}, error {err:.3e}')
                h *= 0.5
                streak = 0

    if termination is None:
        termination = Termination(TerminationKind.TIME_EXHAUSTED)
    logger.debug(f'integration from ({init.i:.6g}, {init.c:.6g}) ended {termination} '
                 f'at t={ts[-1]:.6g} after {len(ts) - 1} steps')
    return Trajectory(np.array(ts), np.array(xs), termination, backward, label)
