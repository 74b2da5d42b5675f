import re
from pathlib import Path

from keynescross.errors import ParameterError
from keynescross.model import EconState

_NUMBER = r'[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?'


def parse_floats(text, n, name):
    """
    Parse `n` comma-separated numbers, e.g. '0,8,0,4' for a window.
    """
    parts = [p.strip() for p in text.split(',')]
    if len(parts) != n or not all(re.fullmatch(_NUMBER, p) for p in parts):
        raise ParameterError(f'{name} must be {n} comma-separated numbers, got {text!r}')
    return tuple(float(p) for p in parts)


def parse_ints(text, n, name):
    parts = [p.strip() for p in text.split(',')]
    if len(parts) != n or not all(re.fullmatch(r'\d+', p) for p in parts):
        raise ParameterError(f'{name} must be {n} comma-separated integers, got {text!r}')
    return tuple(int(p) for p in parts)


def parse_seeds(text):
    """
    Parse semicolon-separated 'i,c' pairs into states, e.g. '1,0.05;3,1'.
    """
    pairs = [p for p in text.split(';') if p.strip()]
    if not pairs:
        raise ParameterError(f'seeds must hold at least one i,c pair, got {text!r}')
    return [EconState(*parse_floats(p, 2, 'seed')) for p in pairs]


def prepare_output(path):
    """
    Create the parent directory of an output file and return it as a Path.
    """
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    return path
