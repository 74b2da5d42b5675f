class KeynesCrossError(Exception):
    """Base class for every error raised by keynescross."""


class ParameterError(KeynesCrossError, ValueError):
    """Out-of-range model, policy, window, option or flag value."""


class DegeneratePolicyError(KeynesCrossError):
    """Linear policy with k = k_c: the equilibrium has escaped to infinity."""


class ConvergenceError(KeynesCrossError):
    """Newton iteration did not reach the requested residual."""


class SingularJacobianError(ConvergenceError):
    """Newton iterate landed on a (numerically) singular Jacobian."""


class IntegrationError(KeynesCrossError):
    """A Runge-Kutta step produced non-finite values."""


class NotASaddleError(KeynesCrossError, ValueError):
    """Separatrices were requested for an equilibrium that is not a saddle."""


class TransitionError(KeynesCrossError):
    """Bisection bracket whose indicator does not change."""


class RenderError(KeynesCrossError):
    """Input cannot be rendered."""
