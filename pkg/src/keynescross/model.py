import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from keynescross.errors import ParameterError


def _check_finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(f'{name} must be finite, got {value}')


@dataclass(frozen=True)
class ModelParams:
    """
    Structural parameters of the Keynesian cross model.

    Args:
        alpha (float): Consumption multiplier, 1 < alpha < inf.
        beta (float): Adjustment speed of consumer spending, 1 <= beta < inf.
    """
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, 'alpha', float(self.alpha))
        object.__setattr__(self, 'beta', float(self.beta))
        _check_finite('alpha', self.alpha)
        _check_finite('beta', self.beta)
        if not self.alpha > 1:
            raise ParameterError(f'alpha must satisfy 1 < alpha < inf, got {self.alpha}')
        if not self.beta >= 1:
            raise ParameterError(f'beta must satisfy 1 <= beta < inf, got {self.beta}')


@dataclass(frozen=True)
class Constant:
    """Constant government spending G = g."""
    kind: ClassVar[str] = 'constant'
    g: float

    def __post_init__(self):
        object.__setattr__(self, 'g', float(self.g))
        _check_finite('g', self.g)
        if self.g < 0:
            raise ParameterError(f'g must be non-negative, got {self.g}')

    def spending(self, i):
        return self.g + 0.0 * i

    def slope(self, i):
        return 0.0 * i


@dataclass(frozen=True)
class _IncomeDependent:
    g0: float
    k: float

    def __post_init__(self):
        object.__setattr__(self, 'g0', float(self.g0))
        object.__setattr__(self, 'k', float(self.k))
        _check_finite('g0', self.g0)
        _check_finite('k', self.k)
        if self.g0 < 0:
            raise ParameterError(f'g0 must be non-negative, got {self.g0}')
        if not self.k > 0:
            raise ParameterError(f'k must be positive, got {self.k}')


@dataclass(frozen=True)
class Linear(_IncomeDependent):
    """Government spending growing linearly with income, G = g0 + k*I."""
    kind: ClassVar[str] = 'linear'

    def spending(self, i):
        return self.g0 + self.k * i

    def slope(self, i):
        return self.k + 0.0 * i


@dataclass(frozen=True)
class Quadratic(_IncomeDependent):
    """Government spending growing quadratically with income, G = g0 + k*I^2."""
    kind: ClassVar[str] = 'quadratic'

    def spending(self, i):
        return self.g0 + self.k * i * i

    def slope(self, i):
        return 2.0 * self.k * i


GovPolicy = Union[Constant, Linear, Quadratic]

POLICIES = {cls.kind: cls for cls in (Constant, Linear, Quadratic)}


@dataclass(frozen=True)
class EconState:
    """A point (I, C) of the income-consumption plane. Coordinates may be negative."""
    i: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.i) and math.isfinite(self.c)):
            raise ParameterError(f'state must be finite, got ({self.i}, {self.c})')

    @classmethod
    def from_array(cls, x):
        return cls(float(x[0]), float(x[1]))

    def as_array(self):
        return np.array([self.i, self.c], dtype=float)

    @property
    def norm_inf(self):
        return max(abs(self.i), abs(self.c))

    @property
    def in_first_quadrant(self):
        return self.i >= 0 and self.c >= 0


@dataclass(frozen=True)
class Derivative:
    di_dt: float
    dc_dt: float

    def as_array(self):
        return np.array([self.di_dt, self.dc_dt], dtype=float)

    @property
    def norm_inf(self):
        return max(abs(self.di_dt), abs(self.dc_dt))


@dataclass(frozen=True)
class Jacobian2:
    """Row-major 2x2 matrix [[a11, a12], [a21, a22]]."""
    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def from_array(cls, m):
        return cls(float(m[0][0]), float(m[0][1]), float(m[1][0]), float(m[1][1]))

    def as_array(self):
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=float)

    @property
    def trace(self):
        return self.a11 + self.a22

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def discriminant(self):
        return self.trace ** 2 - 4.0 * self.det


def spending(policy, i):
    """Government spending G(I) under `policy`."""
    return policy.spending(i)


def field(params, policy, i, c):
    """
    Vector field on scalars or numpy arrays of equal shape.

    Returns:
        tuple: (dI/dt, dC/dt)
    """
    di = i - params.alpha * c
    dc = params.beta * (i - c - policy.spending(i))
    return di, dc


def rhs(params, policy, x):
    """Vector field on a length-2 array, used by the integrators."""
    di, dc = field(params, policy, x[0], x[1])
    return np.array([di, dc], dtype=float)


def vector_field(params, policy, s):
    di, dc = field(params, policy, s.i, s.c)
    return Derivative(float(di), float(dc))


def jacobian(params, policy, s):
    """Exact Jacobian of the vector field at `s`; state-independent for constant and linear policies."""
    return Jacobian2(
        a11=1.0,
        a12=-params.alpha,
        a21=params.beta * (1.0 - float(policy.slope(s.i))),
        a22=-params.beta,
    )
