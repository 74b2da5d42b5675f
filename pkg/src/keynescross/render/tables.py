"""
JSON and CSV serialization.

JSON is canonical: sorted keys, two-space indent, shortest round-trip floats, LF.
CSV schemas:
    trajectory  t,i,c
    sweep       param_value,n_equilibria,eq_index,i,c,classification,sensible
    grid        i,c,dir_i,dir_c,magnitude
"""
import json

import pandas as pd

from keynescross.model import Constant

TRAJECTORY_COLUMNS = ['t', 'i', 'c']
SWEEP_COLUMNS = ['param_value', 'n_equilibria', 'eq_index', 'i', 'c', 'classification', 'sensible']
GRID_COLUMNS = ['i', 'c', 'dir_i', 'dir_c', 'magnitude']


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + '\n'


def _floats(values):
    return [float(v) for v in values]


def _complex(z):
    # +0.0 folds a signed zero into 0.0
    return {'re': float(z.real) + 0.0, 'im': float(z.imag) + 0.0}


def params_dict(params):
    return {'alpha': float(params.alpha), 'beta': float(params.beta)}


def policy_dict(policy):
    if isinstance(policy, Constant):
        return {'model': policy.kind, 'g': float(policy.g)}
    return {'model': policy.kind, 'g0': float(policy.g0), 'k': float(policy.k)}


def thresholds_dict(thresholds):
    return {'k_c': thresholds.k_c, 'g0_crit': thresholds.g0_crit}


def point_dict(point):
    return {
        'equilibrium': [float(point.state.i), float(point.state.c)],
        'economically_sensible': bool(point.economically_sensible),
        'source': point.source.value,
    }


def report_dict(report):
    jac, eigen = report.jac, report.eigen
    doc = point_dict(report.point)
    doc.update({
        'jacobian': [[jac.a11, jac.a12], [jac.a21, jac.a22]],
        'trace': jac.trace,
        'det': jac.det,
        'discriminant': float(eigen.discriminant),
        'eigenvalues': [_complex(eigen.lambda1), _complex(eigen.lambda2)],
        'eigenvectors': [[_complex(z) for z in eigen.v1], [_complex(z) for z in eigen.v2]],
        'attracting': list(eigen.attracting),
        'defective': bool(eigen.defective),
        'classification': report.classification.value,
    })
    return doc


def trajectory_dict(traj):
    return {
        'label': traj.label,
        'backward': bool(traj.backward),
        'termination': {
            'kind': traj.termination.kind.value,
            'equilibrium_index': traj.termination.equilibrium_index,
        },
        't': _floats(traj.t),
        'i': _floats(traj.states[:, 0]),
        'c': _floats(traj.states[:, 1]),
    }


def analysis_doc(params, policy, reports, thresholds):
    return {
        'command': 'analyze',
        'params': params_dict(params),
        'policy': policy_dict(policy),
        'thresholds': thresholds_dict(thresholds),
        'equilibria': [report_dict(r) for r in reports],
    }


def integration_doc(params, policy, traj, points):
    return {
        'command': 'integrate',
        'params': params_dict(params),
        'policy': policy_dict(policy),
        'equilibria': [point_dict(p) for p in points],
        'trajectory': trajectory_dict(traj),
    }


def portrait_doc(portrait):
    w, g = portrait.window, portrait.grid
    return {
        'command': 'portrait',
        'params': params_dict(portrait.params),
        'policy': policy_dict(portrait.policy),
        'thresholds': thresholds_dict(portrait.thresholds),
        'window': _floats([w.i_min, w.i_max, w.c_min, w.c_max]),
        'equilibria': [report_dict(r) for r in portrait.reports],
        'nullclines': [{'label': p.label, 'points': p.points.tolist()} for p in portrait.nullclines],
        'grid': {
            'shape': list(g.shape),
            'points': g.points.tolist(),
            'directions': g.directions.tolist(),
            'magnitudes': _floats(g.magnitudes),
            'defined': [bool(d) for d in g.defined],
        },
        'trajectories': [trajectory_dict(t) for t in portrait.trajectories],
        'separatrices': [trajectory_dict(t) for t in portrait.separatrices],
    }


def sweep_doc(result):
    spec = result.spec
    return {
        'command': 'sweep',
        'param': spec.param.value,
        'from': float(spec.start),
        'to': float(spec.stop),
        'steps': int(spec.steps),
        'params': params_dict(spec.base_params),
        'policy': policy_dict(spec.base_policy),
        'records': [{
            'param_value': r.value,
            'degenerate': r.degenerate,
            'equilibria': [{
                'equilibrium': [float(e.state.i), float(e.state.c)],
                'classification': e.classification.value,
                'economically_sensible': bool(e.economically_sensible),
            } for e in r.entries],
        } for r in result.records],
        'transitions': [{
            'bracket': _floats(t.bracket),
            'description': t.description,
            'location': float(t.location),
            'kind': t.kind.value,
        } for t in result.transitions],
    }


def _csv(df):
    return df.to_csv(index=False, lineterminator='\n')


def trajectory_frame(traj):
    return pd.DataFrame({'t': traj.t, 'i': traj.states[:, 0], 'c': traj.states[:, 1]},
                        columns=TRAJECTORY_COLUMNS)


def grid_frame(grid):
    return pd.DataFrame({
        'i': grid.points[:, 0],
        'c': grid.points[:, 1],
        'dir_i': grid.directions[:, 0],
        'dir_c': grid.directions[:, 1],
        'magnitude': grid.magnitudes,
    }, columns=GRID_COLUMNS)


def sweep_frame(result):
    """One row per equilibrium; a value without equilibria keeps a single row with empty fields."""
    rows = []
    for r in result.records:
        if r.degenerate:
            rows.append([r.value, 0, None, None, None, 'degenerate_policy', None])
        elif not r.entries:
            rows.append([r.value, 0, None, None, None, None, None])
        for n, e in enumerate(r.entries):
            rows.append([r.value, r.count, n, e.state.i, e.state.c, e.classification.value,
                         bool(e.economically_sensible)])
    df = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    df['n_equilibria'] = df['n_equilibria'].astype('int64')
    for col in ('param_value', 'i', 'c'):
        df[col] = df[col].astype(float)
    df['eq_index'] = df['eq_index'].astype('Int64')
    return df


def trajectory_csv(traj):
    return _csv(trajectory_frame(traj))


def grid_csv(grid):
    return _csv(grid_frame(grid))


def sweep_csv(result):
    return _csv(sweep_frame(result))
