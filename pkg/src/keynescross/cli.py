import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional

from loguru import logger

from keynescross.bifurcation import DEFAULT_REFINE_TOL, SweepParam, SweepSpec, sweep
from keynescross.equilibrium import equilibria, thresholds
from keynescross.errors import DegeneratePolicyError, KeynesCrossError, ParameterError
from keynescross.integrator import (DEFAULT_CAPTURE_RADIUS, DEFAULT_DT, DEFAULT_ESCAPE_RADIUS,
                                    DEFAULT_REL_TOL, DEFAULT_T_MAX, IntegrationMode,
                                    IntegrationOptions, integrate)
from keynescross.model import POLICIES, Constant, EconState, ModelParams
from keynescross.portrait import DEFAULT_GRID, Window, box_seeds, build_portrait, default_window
from keynescross.render import tables
from keynescross.render.svg import render_svg
from keynescross.scenarios import SCENARIOS
from keynescross.spectral import analyze
from keynescross.util import parse_floats, parse_ints, parse_seeds, prepare_output

COMMANDS = ('analyze', 'portrait', 'integrate', 'sweep')
FORMATS = {
    'analyze': ('json',),
    'integrate': ('json', 'csv'),
    'portrait': ('json', 'csv', 'svg'),
    'sweep': ('json', 'csv', 'svg'),
}


@dataclass
class RunSpec:
    """
    A validated command line invocation.

    Args:
        command (str): analyze, portrait, integrate or sweep.
        params (ModelParams): Model parameters.
        policy (GovPolicy): Government spending policy.
        fmt (str): Output format, valid for `command`.
        out (Path): Output file, None for standard output.
        window (Window): Portrait window, None for the default window.
        seeds (list): Portrait initial conditions, None for the default box seeds.
        init (EconState): Initial condition of integrate.
        sweep (SweepSpec): Sweep grid of sweep.
    """
    command: str
    params: ModelParams
    policy: object
    fmt: str = 'json'
    out: Optional[str] = None
    window: Optional[Window] = None
    seeds: Optional[list] = None
    grid: tuple = DEFAULT_GRID
    init: Optional[EconState] = None
    opts: IntegrationOptions = field(default_factory=IntegrationOptions)
    sweep: Optional[SweepSpec] = None
    n_workers: int = 1
    progress: bool = False
    log: Optional[str] = None
    level: str = 'INFO'


def build_parser():
    parser = argparse.ArgumentParser(
        prog='keynescross',
        description='Equilibria, stability, phase portraits and bifurcation sweeps of the Keynesian cross model')
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--scenario', choices=sorted(SCENARIOS))
    parser.add_argument('--model', choices=sorted(POLICIES))
    parser.add_argument('--alpha', type=float)
    parser.add_argument('--beta', type=float)
    parser.add_argument('--g', type=float)
    parser.add_argument('--g0', type=float)
    parser.add_argument('--k', type=float)
    parser.add_argument('--format', dest='fmt', choices=('json', 'csv', 'svg'), default='json')
    parser.add_argument('--out')
    parser.add_argument('--window', help='imin,imax,cmin,cmax')
    parser.add_argument('--seeds', help='semicolon-separated i,c pairs, e.g. "1,0.5;3,1"')
    parser.add_argument('--grid', help='nx,ny')
    parser.add_argument('--i0', type=float)
    parser.add_argument('--c0', type=float)
    parser.add_argument('--dt', type=float, default=DEFAULT_DT)
    parser.add_argument('--t-max', type=float, default=DEFAULT_T_MAX)
    parser.add_argument('--adaptive', action='store_true')
    parser.add_argument('--rel-tol', type=float, default=DEFAULT_REL_TOL)
    parser.add_argument('--escape-radius', type=float, default=DEFAULT_ESCAPE_RADIUS)
    parser.add_argument('--capture-radius', type=float, default=DEFAULT_CAPTURE_RADIUS)
    parser.add_argument('--param', choices=[p.value for p in SweepParam])
    parser.add_argument('--from', dest='start', type=float)
    parser.add_argument('--to', dest='stop', type=float)
    parser.add_argument('--steps', type=int)
    parser.add_argument('--n-workers', type=int, default=1)
    parser.add_argument('--progress', action='store_true')
    parser.add_argument('--log')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true')
    verbosity.add_argument('--quiet', action='store_true')
    return parser


def _apply_scenario(args):
    """Fill model flags left unset from the named scenario."""
    if args.scenario is None:
        return
    params, policy = SCENARIOS[args.scenario]
    values = {'model': policy.kind, 'alpha': params.alpha, 'beta': params.beta}
    values.update(tables.policy_dict(policy))
    if args.model is not None and args.model != policy.kind:
        # an explicit model replaces the scenario policy entirely
        values = {k: v for k, v in values.items() if k in ('alpha', 'beta')}
    for name, value in values.items():
        if getattr(args, name) is None:
            setattr(args, name, value)


def _model(parser, args):
    missing = [f'--{n}' for n in ('model', 'alpha', 'beta') if getattr(args, n) is None]
    if missing:
        parser.error(f'missing required flags: {", ".join(missing)}')
    if args.model == 'constant':
        if args.g is None:
            parser.error('the constant model needs --g')
        if args.g0 is not None or args.k is not None:
            parser.error('--g0/--k do not apply to the constant model')
        policy = Constant(args.g)
    else:
        if args.g0 is None or args.k is None:
            parser.error(f'the {args.model} model needs --g0 and --k')
        if args.g is not None:
            parser.error(f'--g does not apply to the {args.model} model')
        policy = POLICIES[args.model](args.g0, args.k)
    return ModelParams(args.alpha, args.beta), policy


def _check_command_flags(parser, args):
    if args.fmt not in FORMATS[args.command]:
        parser.error(f'{args.command} does not support --format {args.fmt}')
    if args.command != 'integrate' and (args.i0 is not None or args.c0 is not None):
        parser.error('--i0/--c0 apply to integrate only')
    if args.command == 'integrate' and (args.i0 is None or args.c0 is None):
        parser.error('integrate needs --i0 and --c0')
    sweep_flags = (args.param, args.start, args.stop, args.steps)
    if args.command == 'sweep' and any(v is None for v in sweep_flags):
        parser.error('sweep needs --param, --from, --to and --steps')
    if args.command != 'sweep' and any(v is not None for v in sweep_flags):
        parser.error('--param/--from/--to/--steps apply to sweep only')
    if args.command != 'portrait' and any(v is not None for v in (args.window, args.seeds, args.grid)):
        parser.error('--window/--seeds/--grid apply to portrait only')
    if args.n_workers < 1:
        parser.error(f'--n-workers must be at least 1, got {args.n_workers}')


def parse_args(argv=None):
    """
    Parse and validate a command line into a RunSpec.

    Usage errors, including out-of-range model values, exit with status 2.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_scenario(args)
    _check_command_flags(parser, args)
    try:
        params, policy = _model(parser, args)
        spec = RunSpec(
            command=args.command,
            params=params,
            policy=policy,
            fmt=args.fmt,
            out=args.out,
            window=Window(*parse_floats(args.window, 4, 'window')) if args.window else None,
            seeds=parse_seeds(args.seeds) if args.seeds else None,
            grid=parse_ints(args.grid, 2, 'grid') if args.grid else DEFAULT_GRID,
            init=EconState(args.i0, args.c0) if args.command == 'integrate' else None,
            opts=IntegrationOptions(
                dt=args.dt,
                t_max=args.t_max,
                mode=IntegrationMode.ADAPTIVE if args.adaptive else IntegrationMode.FIXED,
                rel_tol=args.rel_tol,
                capture_radius=args.capture_radius,
                escape_radius=args.escape_radius,
            ),
            sweep=SweepSpec(args.param, args.start, args.stop, args.steps, params, policy)
            if args.command == 'sweep' else None,
            n_workers=args.n_workers,
            progress=args.progress,
            log=args.log,
            level='DEBUG' if args.verbose else 'WARNING' if args.quiet else 'INFO',
        )
    except ParameterError as e:
        parser.error(str(e))
    if spec.grid[0] < 2 or spec.grid[1] < 2:
        parser.error(f'--grid needs nx, ny >= 2, got {spec.grid}')
    return spec


def setup_logging(spec):
    logger.remove()
    logger.add(sys.stderr, level=spec.level)
    if spec.log:
        logger.add(prepare_output(spec.log), level='DEBUG')


def _analyze(spec):
    reports = analyze(spec.params, spec.policy)
    doc = tables.analysis_doc(spec.params, spec.policy, reports, thresholds(spec.params, spec.policy))
    kinds = ', '.join(r.classification.value for r in reports) or 'none'
    return tables.dumps(doc), f'analyze: {len(reports)} equilibria ({kinds})'


def _integrate(spec):
    try:
        points = equilibria(spec.params, spec.policy)
    except DegeneratePolicyError as e:
        logger.warning(f'{e}; integrating without capture targets')
        points = []
    traj = integrate(spec.params, spec.policy, spec.init, spec.opts, points)
    if spec.fmt == 'csv':
        text = tables.trajectory_csv(traj)
    else:
        text = tables.dumps(tables.integration_doc(spec.params, spec.policy, traj, points))
    return text, f'integrate: {len(traj)} samples, {traj.termination} at t={traj.t[-1]:.6g}'


def _portrait(spec):
    window = spec.window or default_window(analyze(spec.params, spec.policy))
    seeds = spec.seeds if spec.seeds is not None else box_seeds(window)
    portrait = build_portrait(spec.params, spec.policy, window, seeds, spec.opts, grid=spec.grid,
                              n_workers=spec.n_workers, progress=spec.progress)
    if spec.fmt == 'svg':
        text = render_svg(portrait)
    elif spec.fmt == 'csv':
        text = tables.grid_csv(portrait.grid)
    else:
        text = tables.dumps(tables.portrait_doc(portrait))
    summary = (f'portrait: {len(portrait.reports)} equilibria, {len(portrait.trajectories)} trajectories, '
               f'{len(portrait.separatrices)} separatrices')
    return text, summary


def _sweep(spec):
    result = sweep(spec.sweep, DEFAULT_REFINE_TOL, n_workers=spec.n_workers, progress=spec.progress)
    if spec.fmt == 'svg':
        text = render_svg(result)
    elif spec.fmt == 'csv':
        text = tables.sweep_csv(result)
    else:
        text = tables.dumps(tables.sweep_doc(result))
    return text, f'sweep {spec.sweep.param.value}: {len(result.records)} values, {len(result.transitions)} transitions'


COMMAND_RUNNERS = {
    'analyze': _analyze,
    'integrate': _integrate,
    'portrait': _portrait,
    'sweep': _sweep,
}


def run(spec):
    """
    Execute a RunSpec. The document goes to `spec.out` with a one-line summary on
    standard output, or to standard output itself when no path is given.

    Returns:
        int: 0 on success, 1 on analysis or output errors.
    """
    try:
        text, summary = COMMAND_RUNNERS[spec.command](spec)
        if spec.out is None:
            sys.stdout.write(text)
            return 0
        with open(prepare_output(spec.out), 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except (KeynesCrossError, OSError) as e:
        logger.error(f'{spec.command} failed: {type(e).__name__}: {e}')
        return 1
    logger.info(f'wrote {spec.out}')
    print(f'{summary} -> {spec.out}')
    return 0


def main(argv=None):
    try:
        spec = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    setup_logging(spec)
    logger.info(vars(spec))
    return run(spec)


if __name__ == '__main__':
    raise SystemExit(main())
