import multiprocessing
from dataclasses import dataclass, replace
from enum import Enum
from functools import partial

import numpy as np
from loguru import logger
from tqdm import tqdm

from keynescross.errors import DegeneratePolicyError, ParameterError, TransitionError
from keynescross.model import Constant, ModelParams
from keynescross.spectral import analyze

DEFAULT_REFINE_TOL = 1e-6


class SweepParam(str, Enum):
    ALPHA = 'alpha'
    BETA = 'beta'
    G = 'g'
    G0 = 'g0'
    K = 'k'


class TransitionKind(str, Enum):
    COUNT = 'count'
    CLASSIFICATION = 'classification'
    DEGENERATE = 'degenerate'


@dataclass(frozen=True)
class SweepSpec:
    """
    One-parameter sweep over a uniform grid.

    Args:
        param (SweepParam): Swept parameter; g applies to the constant policy only,
            g0 and k to the linear and quadratic policies.
        start, stop (float): Sweep range, start < stop.
        steps (int): Number of grid values, at least 2.
        base_params (ModelParams): Parameters held fixed.
        base_policy (GovPolicy): Policy held fixed.
    """
    param: SweepParam
    start: float
    stop: float
    steps: int
    base_params: ModelParams
    base_policy: object

    def __post_init__(self):
        object.__setattr__(self, 'param', SweepParam(self.param))
        if not self.start < self.stop:
            raise ParameterError(f'sweep needs start < stop, got {self.start}, {self.stop}')
        if self.steps < 2:
            raise ParameterError(f'sweep needs at least 2 steps, got {self.steps}')
        is_constant = isinstance(self.base_policy, Constant)
        if (self.param is SweepParam.G and not is_constant) or \
                (self.param in (SweepParam.G0, SweepParam.K) and is_constant):
            raise ParameterError(
                f'parameter {self.param.value} does not apply to the {self.base_policy.kind} policy')
        # every limit is an interval: valid ends mean a valid range
        self.substitute(self.start)
        self.substitute(self.stop)

    @property
    def values(self):
        return np.linspace(self.start, self.stop, self.steps)

    def substitute(self, value):
        """(params, policy) with the swept parameter set to `value`."""
        value = float(value)
        if self.param in (SweepParam.ALPHA, SweepParam.BETA):
            return replace(self.base_params, **{self.param.value: value}), self.base_policy
        return self.base_params, replace(self.base_policy, **{self.param.value: value})


@dataclass(frozen=True)
class SweepEntry:
    state: object
    classification: object
    economically_sensible: bool


@dataclass(frozen=True)
class SweepRecord:
    value: float
    entries: tuple
    degenerate: bool = False

    @property
    def count(self):
        return len(self.entries)

    @property
    def shape(self):
        """Equilibrium count, or the degenerate marker."""
        return ('degenerate',) if self.degenerate else (self.count,)

    @property
    def indicator(self):
        if self.degenerate:
            return ('degenerate',)
        return (self.count, tuple(sorted(e.classification.value for e in self.entries)))


@dataclass(frozen=True)
class Transition:
    """
    Indicator change between two adjacent grid values.

    `kind` tells how sharp `location` is: count transitions refine to the bisection
    tolerance, classification transitions only to the classification band.
    """
    bracket: tuple
    description: str
    location: float
    kind: TransitionKind


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    values: tuple
    records: tuple
    transitions: tuple


def evaluate(spec, value):
    params, policy = spec.substitute(value)
    try:
        reports = analyze(params, policy)
    except DegeneratePolicyError:
        logger.warning(f'{spec.param.value}={value}: degenerate policy')
        return SweepRecord(float(value), (), degenerate=True)
    entries = tuple(SweepEntry(r.point.state, r.classification, r.point.economically_sensible) for r in reports)
    return SweepRecord(float(value), entries)


def _describe(left, right):
    if left.degenerate or right.degenerate:
        a = 'degenerate' if left.degenerate else f'{left.count} equilibria'
        b = 'degenerate' if right.degenerate else f'{right.count} equilibria'
        return f'{a} -> {b}', TransitionKind.DEGENERATE
    if left.count != right.count:
        return f'equilibrium count {left.count} -> {right.count}', TransitionKind.COUNT
    a = ','.join(left.indicator[1])
    b = ','.join(right.indicator[1])
    return f'classification {a} -> {b}', TransitionKind.CLASSIFICATION


def _shape(record):
    return record.shape


def _indicator(record):
    return record.indicator


def _bisect(spec, left, right, tol, key):
    """Shrink [left, right] to width `tol` keeping key(left) on the left end; returns the end records."""
    fa = key(left)
    while right.value - left.value > tol:
        mid = evaluate(spec, 0.5 * (left.value + right.value))
        if key(mid) == fa:
            left = mid
        else:
            right = mid
    return left, right


def refine_transition(spec, bracket, tol=DEFAULT_REFINE_TOL, key=None):
    """
    Bisection on an indicator that differs at the two ends of `bracket`.

    Args:
        key (callable): Maps a SweepRecord to the compared indicator. By default the
            equilibrium count (with the degenerate flag) when it differs at the ends,
            otherwise the count together with the classification multiset.

    Raises:
        TransitionError: the indicator is equal at both ends of `bracket`.
    """
    if not tol > 0:
        raise ParameterError(f'tol must be positive, got {tol}')
    left, right = evaluate(spec, bracket[0]), evaluate(spec, bracket[1])
    if key is None:
        key = _shape if left.shape != right.shape else _indicator
    if key(left) == key(right):
        raise TransitionError(f'indicator {key(left)} is equal at both ends of [{left.value}, {right.value}]')
    left, right = _bisect(spec, left, right, tol, key)
    return 0.5 * (left.value + right.value)


def sweep(spec, refine_tol=DEFAULT_REFINE_TOL, n_workers=1, progress=False):
    """
    Equilibria and classifications at every grid value, plus the refined locations
    of every change of equilibrium count or classification between neighbours.

    A count change is located on the count alone; a classification change on either
    side of it inside the same bracket is refined and reported separately.
    """
    values = spec.values
    run = partial(evaluate, spec)
    bar = dict(total=len(values), desc=f'Sweep {spec.param.value}', disable=not progress, leave=False)
    if n_workers > 1:
        with multiprocessing.Pool(n_workers) as p:
            records = list(tqdm(p.imap(run, values), **bar))
    else:
        records = [run(v) for v in tqdm(values, **bar)]

    transitions = []

    def add(bracket, a, b, location):
        description, kind = _describe(a, b)
        logger.info(f'{spec.param.value} in [{bracket[0]:.6g}, {bracket[1]:.6g}]: {description} at {location:.9g}')
        transitions.append(Transition(bracket, description, location, kind))

    def add_classification(bracket, a, b):
        if a.indicator != b.indicator:
            a, b = _bisect(spec, a, b, refine_tol, _indicator)
            add(bracket, a, b, 0.5 * (a.value + b.value))

    for left, right in zip(records[:-1], records[1:]):
        if left.indicator == right.indicator:
            continue
        bracket = (left.value, right.value)
        if left.shape == right.shape:
            add_classification(bracket, left, right)
            continue
        a, b = _bisect(spec, left, right, refine_tol, _shape)
        add_classification(bracket, left, a)
        add(bracket, left, right, 0.5 * (a.value + b.value))
        add_classification(bracket, b, right)

    return SweepResult(spec, tuple(float(v) for v in values), tuple(records), tuple(transitions))
