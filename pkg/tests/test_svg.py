import xml.etree.ElementTree as ET

import pytest

from keynescross.bifurcation import SweepSpec, sweep
from keynescross.errors import RenderError
from keynescross.integrator import IntegrationOptions
from keynescross.model import EconState
from keynescross.portrait import Window, build_portrait
from keynescross.render.svg import render_svg

NS = '{http://www.w3.org/2000/svg}'


def classes(root, kind):
    """Class attributes whose first token is `kind`."""
    return [el.get('class') for el in root.iter() if (el.get('class') or '').split()[:1] == [kind]]


@pytest.fixture
def spiral_portrait(scenario):
    params, policy = scenario('constant-spiral')
    window = Window(0.0, 3.0, 0.0, 1.0)
    return build_portrait(params, policy, window, [EconState(3.0, 1.0), EconState(0.0, 0.0)],
                          IntegrationOptions(t_max=10.0), grid=(8, 6))


def test_single_equilibrium_marker(spiral_portrait):
    root = ET.fromstring(render_svg(spiral_portrait))
    assert root.tag == NS + 'svg'
    assert (root.get('width'), root.get('height')) == ('800', '600')
    assert classes(root, 'equilibrium') == ['equilibrium stable_spiral']
    assert len(classes(root, 'trajectory')) == 2
    assert classes(root, 'nullcline') == ['nullcline i_nullcline', 'nullcline c_nullcline']
    assert len(classes(root, 'arrow')) == 48


def test_nullclines_are_dashed(spiral_portrait):
    root = ET.fromstring(render_svg(spiral_portrait))
    for el in root.iter(NS + 'polyline'):
        if el.get('class').startswith('nullcline'):
            assert el.get('stroke-dasharray')


def test_rendering_is_deterministic(spiral_portrait):
    assert render_svg(spiral_portrait) == render_svg(spiral_portrait)


def test_center_renders_closed_orbit(scenario):
    params, policy = scenario('constant-center')
    portrait = build_portrait(params, policy, Window(0.0, 4.0, 0.0, 2.0), [EconState(3.0, 1.0)],
                              IntegrationOptions(dt=0.01, t_max=10.0))
    root = ET.fromstring(render_svg(portrait))
    (path,) = [el for el in root.iter(NS + 'path') if el.get('class') == 'trajectory closed']
    assert path.get('d').startswith('M ') and path.get('d').endswith(' Z')
    assert classes(root, 'equilibrium') == ['equilibrium center']


def test_saddle_portrait(scenario):
    params, policy = scenario('quadratic-two')
    portrait = build_portrait(params, policy, Window(0.0, 12.0, 0.0, 6.0), [], IntegrationOptions(t_max=30.0))
    root = ET.fromstring(render_svg(portrait))
    assert classes(root, 'equilibrium') == ['equilibrium stable_node', 'equilibrium saddle']
    seps = [el for el in root.iter(NS + 'polyline') if el.get('class').startswith('separatrix')]
    assert len(seps) == 4
    assert all(el.get('stroke-width') == '3' for el in seps)
    rects = [el for el in root.iter(NS + 'rect') if el.get('class') == 'equilibrium saddle']
    assert len(rects) == 1


def test_fold_sweep_branches_meet(scenario):
    params, policy = scenario('quadratic-fold')
    result = sweep(SweepSpec('g0', 0.5, 1.5, 11, params, policy))
    root = ET.fromstring(render_svg(result))
    branches = [el for el in root.iter(NS + 'polyline') if el.get('class') == 'branch']
    assert len(branches) == 2
    ends = [el.get('points').split()[-1] for el in branches]
    assert ends[0] == ends[1]
    assert len(classes(root, 'transition')) == len(result.transitions)


def test_unrenderable_input():
    with pytest.raises(RenderError):
        render_svg(object())


def test_portrait_title_and_golden(spiral_portrait, golden):
    text = render_svg(spiral_portrait)
    assert '<title>constant spending: alpha=5, beta=4, g=1</title>' in text
    golden('portrait_constant_spiral.svg', text)
