"""
Named parameter sets for each dynamical regime of the model.

constant-*   beta = 4, G = 1, alpha below, at and above (beta-1)^2/(4 beta) + 1
constant-center   beta = 1
linear-*     k < k_c except linear-saddle (k = 0.75 > k_c = 0.5); the star needs
             alpha*(1-k) = 25/16 rather than alpha = 25/16
linear-saddle-<alpha>   the constant-* alphas with k = 0.9 above every k_c
quadratic-*  G0 below, at and above the fold value (alpha-1)^2/(4 alpha^2 k) = 1
"""
from keynescross.model import Constant, Linear, ModelParams, Quadratic

SCENARIOS = {
    'constant-node': (ModelParams(1.1, 4.0), Constant(1.0)),
    'constant-star': (ModelParams(1.5625, 4.0), Constant(1.0)),
    'constant-spiral': (ModelParams(5.0, 4.0), Constant(1.0)),
    'constant-center': (ModelParams(2.0, 1.0), Constant(1.0)),
    'linear-node': (ModelParams(1.1, 4.0), Linear(1.0, 0.05)),
    'linear-star': (ModelParams(2.0, 4.0), Linear(1.0, 0.21875)),
    'linear-spiral': (ModelParams(5.0, 4.0), Linear(1.0, 0.5)),
    'linear-saddle': (ModelParams(2.0, 4.0), Linear(1.0, 0.75)),
    'linear-saddle-1.1': (ModelParams(1.1, 4.0), Linear(1.0, 0.9)),
    'linear-saddle-1.5625': (ModelParams(1.5625, 4.0), Linear(1.0, 0.9)),
    'linear-saddle-5': (ModelParams(5.0, 4.0), Linear(1.0, 0.9)),
    'quadratic-two': (ModelParams(2.0, 4.0), Quadratic(0.75, 0.0625)),
    'quadratic-fold': (ModelParams(2.0, 4.0), Quadratic(1.0, 0.0625)),
    'quadratic-none': (ModelParams(2.0, 4.0), Quadratic(1.25, 0.0625)),
}
