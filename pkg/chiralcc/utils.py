"""
Utility functions for Chiral Color Codes.

Includes result formatting, lattice-spec parsing and JSON helpers.
"""

import json
import re
from fractions import Fraction

import numpy as np

from .conf import get_schema_version
from .exceptions import ParameterError


# ==================== Service Result Formatting ====================

def service_result(status="success", message="", **payload):
    """
    Standardized service return value.

    Args:
        status: "success", "partial_success" or "failed"
        message: Human-readable message
        **payload: Extra keys merged into the result

    Returns:
        dict

    Usage:
        return service_result(message="Decoded 100 trials", failures=3)
        return service_result("failed", "Final syndrome not zero", record=record)
    """
    if status not in ("success", "partial_success", "failed"):
        raise ValueError(f"Unknown status {status!r}")
    result = {"status": status, "message": message}
    result.update(payload)
    return result


def stamp(record):
    """Add the schema version to a JSON record."""
    record = dict(record)
    record['schema_version'] = get_schema_version()
    return record


# ==================== Phase Rendering ====================

def render_phase(exponent, d):
    """
    Render tau^exponent (tau = exp(i*pi/d)) as a short string.

    Args:
        exponent: tau exponent
        d: Qudit dimension

    Returns:
        str, e.g. "1", "-1", "i", "omega^2", "tau^3"
    """
    exponent = int(exponent) % (2 * d)
    turn = Fraction(exponent, 2 * d)
    named = {Fraction(0): "1", Fraction(1, 2): "-1", Fraction(1, 4): "i", Fraction(3, 4): "-i"}
    if turn in named:
        return named[turn]
    if exponent % 2 == 0:
        return f"omega^{exponent // 2}"
    return f"tau^{exponent}"


# ==================== Lattice Specs ====================

_SPEC_PATTERNS = {
    'cube8': re.compile(r'^cube8$'),
    'tetra15': re.compile(r'^tetra15$'),
    'sphere': re.compile(r'^sphere$'),
    'torus': re.compile(r'^torus:(\d+),(\d+),(\d+)$'),
    'slab': re.compile(r'^slab:(\d+),(\d+),(\d+)(?:,([ABCD]))?$'),
}


def parse_lattice_spec(spec):
    """
    Parse a ``name:params`` lattice spec.

    Accepted forms: ``cube8``, ``tetra15``, ``sphere``, ``torus:Lx,Ly,Lz``,
    ``slab:Lx,Ly,t[,color]`` or a path ending in ``.json``.

    Args:
        spec: Lattice spec string

    Returns:
        tuple (name, params) where params is a tuple (a path for "file")
    """
    spec = (spec or '').strip()
    if spec.endswith('.json'):
        return 'file', (spec,)
    for name, pattern in _SPEC_PATTERNS.items():
        match = pattern.match(spec)
        if match is None:
            continue
        if name == 'torus':
            return name, tuple(int(g) for g in match.groups())
        if name == 'slab':
            lx, ly, t, color = match.groups()
            return name, (int(lx), int(ly), int(t), color or 'A')
        return name, ()
    raise ParameterError(f"Unknown lattice spec {spec!r}; expected cube8, tetra15, sphere, "
                         f"torus:Lx,Ly,Lz, slab:Lx,Ly,t[,color] or a .json file")


def validate_lattice_spec(spec):
    """
    Validate a lattice spec string.

    Returns:
        bool: True if parse_lattice_spec accepts it
    """
    try:
        parse_lattice_spec(spec)
        return True
    except ParameterError:
        return False


# ==================== JSON ====================

def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(record):
    """Deterministic JSON: sorted keys, compact separators, numpy-aware."""
    return json.dumps(record, sort_keys=True, separators=(',', ':'), default=_json_default,
                      ensure_ascii=False)
