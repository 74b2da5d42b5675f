import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from loguru import logger

from keynescross.errors import ConvergenceError, DegeneratePolicyError, ParameterError, SingularJacobianError
from keynescross.model import Constant, EconState, Linear, Quadratic, jacobian, rhs

DEGENERATE_DENOMINATOR_TOL = 1e-12
SINGULAR_DET_TOL = 1e-14
MAX_HALVINGS = 20


class EquilibriumSource(str, Enum):
    CLOSED_FORM = 'closed_form'
    NEWTON_REFINED = 'newton_refined'


@dataclass(frozen=True)
class EquilibriumPoint:
    """
    A fixed point of the flow.

    Args:
        state (EconState): Equilibrium coordinates (I, C).
        economically_sensible (bool): Both coordinates are non-negative.
        source (EquilibriumSource): Closed form or Newton refinement.
    """
    state: EconState
    economically_sensible: bool
    source: EquilibriumSource = EquilibriumSource.CLOSED_FORM

    @classmethod
    def at(cls, i, c, source=EquilibriumSource.CLOSED_FORM):
        state = EconState(float(i), float(c))
        return cls(state, state.in_first_quadrant, source)


@dataclass(frozen=True)
class Thresholds:
    k_c: Optional[float] = None
    g0_crit: Optional[float] = None


def critical_k(params):
    """Marginal spending rate k_c = 1 - 1/alpha separating the sensible and saddle regimes."""
    return 1.0 - 1.0 / params.alpha


def critical_g0(params, k):
    """Base spending (alpha-1)^2 / (4 alpha^2 k) at which the quadratic policy's equilibria collide."""
    if not k > 0:
        raise ParameterError(f'k must be positive, got {k}')
    a = params.alpha
    return (a - 1.0) ** 2 / (4.0 * a * a * k)


def thresholds(params, policy):
    if isinstance(policy, Linear):
        return Thresholds(k_c=critical_k(params))
    if isinstance(policy, Quadratic):
        return Thresholds(g0_crit=critical_g0(params, policy.k))
    return Thresholds()


def discriminant_tol(params):
    return 1e-10 * max(1.0, (params.alpha - 1.0) ** 2)


def quadratic_discriminant(params, policy):
    """D = (alpha-1)^2 - 4 k alpha^2 G0; its sign sets the number of equilibria."""
    a = params.alpha
    return (a - 1.0) ** 2 - 4.0 * policy.k * a * a * policy.g0


def _quadratic_roots(params, policy):
    a, k, g0 = params.alpha, policy.k, policy.g0
    b = 1.0 - 1.0 / a
    d = quadratic_discriminant(params, policy)
    tol = discriminant_tol(params)
    if d < -tol:
        return []
    if abs(d) <= tol:
        return [b / (2.0 * k)]
    # larger root first, the smaller one from the product of the roots g0/k
    q = 0.5 * (b + math.sqrt(d) / a)
    return [g0 / q, q / k]


def equilibria(params, policy):
    """
    Closed-form equilibria of the flow, sorted by ascending income.

    Raises:
        DegeneratePolicyError: linear policy with alpha*(1-k) = 1.
    """
    a = params.alpha
    if isinstance(policy, Constant):
        points = [EquilibriumPoint.at(a * policy.g / (a - 1.0), policy.g / (a - 1.0))]
    elif isinstance(policy, Linear):
        denom = a * (1.0 - policy.k) - 1.0
        if abs(denom) <= DEGENERATE_DENOMINATOR_TOL:
            raise DegeneratePolicyError(
                f'linear policy with k = k_c = {critical_k(params)} has no finite equilibrium')
        points = [EquilibriumPoint.at(a * policy.g0 / denom, policy.g0 / denom)]
    elif isinstance(policy, Quadratic):
        points = [EquilibriumPoint.at(i, i / a) for i in _quadratic_roots(params, policy)]
    else:
        raise ParameterError(f'policy {policy!r} not supported!')
    logger.debug(f'{len(points)} equilibria for {params} {policy}')
    return points


def newton_refine(params, policy, guess, tol=1e-12, max_iter=50):
    """
    Damped Newton iteration on the vector field with the exact Jacobian.

    Args:
        guess (EconState): Starting point.
        tol (float): Requested sup-norm of the vector field at the returned point.
        max_iter (int): Maximum number of Newton steps.

    Returns:
        EquilibriumPoint: tagged `newton_refined`.

    Raises:
        ConvergenceError: no convergence within `max_iter`, or the line search failed.
        SingularJacobianError: |det J| < 1e-14 at an iterate.
    """
    if not tol > 0:
        raise ParameterError(f'tol must be positive, got {tol}')
    if max_iter < 1:
        raise ParameterError(f'max_iter must be at least 1, got {max_iter}')

    x = guess.as_array()
    f = rhs(params, policy, x)
    res = np.max(np.abs(f))
    for it in range(max_iter + 1):
        if res <= tol:
            logger.debug(f'Newton converged after {it} steps, residual {res:.3e}')
            return EquilibriumPoint.at(x[0], x[1], EquilibriumSource.NEWTON_REFINED)
        if it == max_iter:
            break
        jac = jacobian(params, policy, EconState.from_array(x))
        if abs(jac.det) < SINGULAR_DET_TOL:
            raise SingularJacobianError(f'singular Jacobian at ({x[0]}, {x[1]})')
        step = np.linalg.solve(jac.as_array(), -f)

        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            x_new = x + lam * step
            f_new = rhs(params, policy, x_new)
            res_new = np.max(np.abs(f_new))
            if np.isfinite(res_new) and res_new < res:
                break
            lam *= 0.5
        else:
            raise ConvergenceError(f'line search failed at ({x[0]}, {x[1]}), residual {res:.3e}')
        x, f, res = x_new, f_new, res_new
        logger.debug(f'Newton step {it}: damping {lam}, residual {res:.3e}')

    raise ConvergenceError(f'Newton did not converge in {max_iter} steps, residual {res:.3e}')
