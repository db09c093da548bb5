"""
Console entry point: ``chiralcc <command> [options]``.

Outside a Django project a minimal settings module is configured on the fly so
the management commands run standalone. Logs go to stderr; stdout carries only
JSON-lines records.

Usage:
    chiralcc params --lattice cube8 --family xyz
    chiralcc prepare --lattice torus:2,2,2 --d 3 --alpha 1 --trials 100
"""

import os
import sys

import django
from django.conf import settings
from django.core.management import execute_from_command_line

from .conf import DEFAULTS


def logging_config(level):
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'plain': {'format': '%(levelname)s %(name)s: %(message)s'},
        },
        'handlers': {
            'stderr': {
                'class': 'logging.StreamHandler',
                'stream': 'ext://sys.stderr',
                'formatter': 'plain',
            },
        },
        'loggers': {
            'chiralcc': {'handlers': ['stderr'], 'level': level, 'propagate': False},
        },
    }


def configure():
    """Configure standalone settings unless a settings module is already in charge."""
    if settings.configured or os.environ.get('DJANGO_SETTINGS_MODULE'):
        return
    level = os.environ.get('CHIRALCC_LOG_LEVEL', DEFAULTS['LOG_LEVEL'])
    settings.configure(
        INSTALLED_APPS=['rest_framework', 'chiralcc'],
        CHIRALCC={'LOG_LEVEL': level},
        LOGGING=logging_config(level),
        USE_TZ=True,
    )


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    configure()
    django.setup()
    execute_from_command_line(['chiralcc'] + argv[1:])


if __name__ == '__main__':
    main()
