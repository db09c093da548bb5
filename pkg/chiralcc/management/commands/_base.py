"""
Shared plumbing for the chiralcc management commands.

Every command validates its options through RunConfigSerializer, writes one
JSON document per line and maps outcomes onto exit codes: 0 when every check
passed, 1 for usage errors and 2 for a failed verification.
"""

import logging
from contextlib import contextmanager

from django.core.management.base import BaseCommand, CommandError

from ...exceptions import ChiralccError
from ...lattice.builders import lattice_from_spec
from ...serializers import RunConfigSerializer
from ...services.export_services import write_jsonl

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
VERIFICATION_FAILED = 2


class ChiralccCommand(BaseCommand):
    """Base command: option validation, lattice loading and JSON-lines output."""

    command_name = None
    default_lattice = 'torus:2,2,2'
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--lattice', default=None,
                            help="Lattice spec (cube8, tetra15, sphere, torus:Lx,Ly,Lz, "
                                 "slab:Lx,Ly,t[,color] or a .json file)")
        parser.add_argument('--d', type=int, default=2, help="Qudit dimension")
        parser.add_argument('--alpha', type=int, default=1, help="Chirality")
        parser.add_argument('--seed', type=int, default=None, help="Random seed")
        parser.add_argument('--output', default='', help="JSON-lines output file (default stdout)")

    def load_config(self, options, **extra):
        """Validated RunConfig dict; invalid options raise a usage error."""
        data = {key: value for key, value in options.items()
                if key in RunConfigSerializer().fields and value is not None}
        data.update({key: value for key, value in extra.items() if value is not None})
        data['command'] = self.command_name
        data.setdefault('lattice', self.default_lattice)
        serializer = RunConfigSerializer(data=data)
        if not serializer.is_valid():
            raise CommandError(f"Invalid options: {dict(serializer.errors)}",
                               returncode=USAGE_ERROR)
        return serializer.validated_data

    def build_lattice(self, spec):
        try:
            return lattice_from_spec(spec)
        except ChiralccError as e:
            raise CommandError(f"Cannot build lattice {spec!r}: {e}", returncode=USAGE_ERROR)

    @contextmanager
    def open_output(self, path):
        if not path:
            yield self.stdout
            return
        with open(path, 'w', encoding='utf-8') as handle:
            yield handle

    def emit(self, stream, records):
        return write_jsonl(stream, records)

    def verification_failed(self, message, record=None):
        """Echo the failing record on stderr and exit with status 2."""
        if record is not None:
            write_jsonl(self.stderr, [record])
        raise CommandError(message, returncode=VERIFICATION_FAILED)

    def usage_error(self, message):
        raise CommandError(message, returncode=USAGE_ERROR)
