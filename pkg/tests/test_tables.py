import io
import json

import pandas as pd
import pytest

from keynescross.bifurcation import SweepSpec, sweep
from keynescross.equilibrium import equilibria, thresholds
from keynescross.integrator import IntegrationOptions, integrate
from keynescross.model import EconState, Linear, ModelParams
from keynescross.portrait import Window, build_portrait
from keynescross.render import tables
from keynescross.spectral import analyze


def test_analysis_doc(scenario):
    params, policy = scenario('linear-saddle')
    doc = tables.analysis_doc(params, policy, analyze(params, policy), thresholds(params, policy))
    assert doc['params'] == {'alpha': 2.0, 'beta': 4.0}
    assert doc['policy'] == {'model': 'linear', 'g0': 1.0, 'k': 0.75}
    assert doc['thresholds'] == {'k_c': 0.5, 'g0_crit': None}
    (eq,) = doc['equilibria']
    assert eq['equilibrium'] == [-4.0, -2.0]
    assert eq['classification'] == 'saddle'
    assert eq['economically_sensible'] is False
    assert eq['attracting'] == [False, True]
    assert eq['eigenvalues'][0]['im'] == 0.0


def test_json_is_canonical(scenario):
    params, policy = scenario('quadratic-two')
    text = tables.dumps(tables.analysis_doc(params, policy, analyze(params, policy), thresholds(params, policy)))
    assert text.endswith('}\n')
    assert '\r' not in text
    assert tables.dumps(json.loads(text)) == text


@pytest.mark.parametrize('name', ['linear-saddle', 'linear-saddle-5', 'quadratic-two', 'constant-node'])
def test_complex_parts_never_negative_zero(scenario, name):
    params, policy = scenario(name)
    text = tables.dumps(tables.analysis_doc(params, policy, analyze(params, policy), thresholds(params, policy)))
    assert '-0.0\n' not in text and '-0.0,' not in text
    assert tables._complex(complex(-0.0, -0.0)) == {'re': 0.0, 'im': 0.0}
    assert str(tables._complex(complex(-0.0, -0.0))['im']) == '0.0'


def test_json_rejects_nan():
    with pytest.raises(ValueError):
        tables.dumps({'x': float('nan')})


def test_trajectory_csv(scenario):
    params, policy = scenario('constant-center')
    traj = integrate(params, policy, EconState(3.0, 1.0), IntegrationOptions(dt=0.25, t_max=1.0))
    text = tables.trajectory_csv(traj)
    lines = text.split('\n')
    assert lines[0] == 't,i,c'
    assert lines[1] == '0.0,3.0,1.0'
    df = pd.read_csv(io.StringIO(text))
    assert len(df) == len(traj) == 5


def test_sweep_csv(scenario):
    params, policy = scenario('quadratic-fold')
    result = sweep(SweepSpec('g0', 0.5, 1.5, 11, params, policy))
    text = tables.sweep_csv(result)
    assert text.split('\n')[0] == ','.join(tables.SWEEP_COLUMNS)
    df = pd.read_csv(io.StringIO(text))
    counts = df.drop_duplicates('param_value')['n_equilibria'].tolist()
    assert counts == [2, 2, 2, 2, 2, 1, 0, 0, 0, 0, 0]
    assert len(df) == 5 * 2 + 1 + 5
    empty = df[df['n_equilibria'] == 0]
    assert empty['eq_index'].isna().all() and empty['classification'].isna().all()


def test_sweep_csv_marks_degenerate_policy():
    spec = SweepSpec('k', 0.4, 0.6, 3, ModelParams(2.0, 4.0), Linear(1.0, 0.5))
    df = tables.sweep_frame(sweep(spec))
    assert df['classification'].tolist() == ['stable_node', 'degenerate_policy', 'saddle']
    assert df['n_equilibria'].tolist() == [1, 0, 1]


def test_sweep_doc(scenario):
    params, policy = scenario('quadratic-fold')
    doc = tables.sweep_doc(sweep(SweepSpec('g0', 0.5, 1.5, 11, params, policy)))
    assert doc['param'] == 'g0' and doc['steps'] == 11
    assert [len(r['equilibria']) for r in doc['records']] == [2, 2, 2, 2, 2, 1, 0, 0, 0, 0, 0]
    assert {t['kind'] for t in doc['transitions']} >= {'count'}
    tables.dumps(doc)


def test_grid_csv(scenario):
    params, policy = scenario('constant-spiral')
    portrait = build_portrait(params, policy, Window(0.0, 3.0, 0.0, 1.0), [], grid=(4, 3))
    df = pd.read_csv(io.StringIO(tables.grid_csv(portrait.grid)))
    assert list(df.columns) == tables.GRID_COLUMNS
    assert len(df) == 12


def test_integration_doc(scenario):
    params, policy = scenario('constant-spiral')
    points = equilibria(params, policy)
    traj = integrate(params, policy, EconState(1.0, 1.0), IntegrationOptions(t_max=100.0), points)
    doc = tables.integration_doc(params, policy, traj, points)
    assert doc['trajectory']['termination'] == {'kind': 'captured', 'equilibrium_index': 0}
    assert len(doc['trajectory']['t']) == len(traj)
