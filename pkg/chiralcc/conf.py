"""
Configuration module for Chiral Color Codes.

Handles Django settings with sensible defaults. Library code may run without a
configured Django project, in which case the defaults apply.
"""

import os

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured


# Default configuration values
DEFAULTS = {
    'THREADS': int(os.environ.get('CHIRALCC_THREADS', 0)) or (os.cpu_count() or 1),
    'BLOCK_SIZE': 1,  # Loop-removal block edge, in primitive cells
    'LOCAL_SOLVE_MAX_MARGIN': 4,  # Growth limit of local solve regions
    'LOCALITY_AUDIT_SAMPLES': 3,  # Randomized replays per radius in the locality audit
    'SCHEMA_VERSION': '1.0',  # Stamped into every JSON record
    'DISTANCE_WEIGHT_CAP': 3,  # Default brute-force distance cap
    'DEFAULT_SEED': 0,
    'LOG_LEVEL': 'INFO',
}

_INTEGER_SETTINGS = ('THREADS', 'BLOCK_SIZE', 'LOCAL_SOLVE_MAX_MARGIN', 'LOCALITY_AUDIT_SAMPLES',
                     'DISTANCE_WEIGHT_CAP', 'DEFAULT_SEED')


def get_setting(name):
    """
    Get a setting from Django settings or use default.

    Args:
        name: Setting name

    Returns:
        Setting value
    """
    user_settings = getattr(settings, 'CHIRALCC', {}) if settings.configured else {}
    value = user_settings.get(name, DEFAULTS[name])
    if name in _INTEGER_SETTINGS and (not isinstance(value, int) or isinstance(value, bool)):
        raise ImproperlyConfigured(f"CHIRALCC['{name}'] must be an integer, got {value!r}")
    return value


def get_thread_count():
    """
    Worker cap for Monte Carlo runs.

    Returns:
        int (at least 1)
    """
    return max(1, get_setting('THREADS'))


def get_schema_version():
    """
    Version string stamped into every JSON record.

    Returns:
        str
    """
    return str(get_setting('SCHEMA_VERSION'))


def get_block_size():
    """
    Default loop-removal block edge for ground-state preparation.

    Returns:
        int
    """
    block_size = get_setting('BLOCK_SIZE')
    if block_size < 1:
        raise ImproperlyConfigured("CHIRALCC['BLOCK_SIZE'] must be at least 1")
    return block_size
