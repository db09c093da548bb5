from django.core.management.base import CommandError

from ...codes import (build_3dcc, build_chiral, build_xyz, code_distance, logical_structure,
                      redundancy_relations)
from ...exceptions import ChiralccError
from ...serializers import ParamsReportSerializer
from ._base import ChiralccCommand

BUILDERS = {
    'xyz': lambda lattice, d, alpha: build_xyz(lattice),
    'chiral': build_chiral,
    '3dcc': lambda lattice, d, alpha: build_3dcc(lattice, d),
}


class Command(ChiralccCommand):
    help = "Build a code and report n, generators, redundancies, logical group and distance"
    command_name = 'params'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--family', default='xyz', choices=sorted(BUILDERS))
        parser.add_argument('--distance-cap', type=int, default=None,
                            help="Search logical weights up to this cap (0 skips the search)")

    def handle(self, *args, **options):
        config = self.load_config(options)
        lattice = self.build_lattice(config['lattice'])
        try:
            code = BUILDERS[config['family']](lattice, config['d'], config['alpha'])
            redundancy = redundancy_relations(code)
            structure = logical_structure(code)
            distance = None
            if config['distance_cap'] != 0:
                distance = code_distance(code, config['distance_cap'], structure).to_dict()
        except ChiralccError as e:
            raise CommandError(f"params failed on {lattice.name}: {e}", returncode=1)
        report = {
            'lattice': lattice.name,
            'family': code.family,
            'd': code.d,
            'alpha': code.alpha,
            'n': code.n,
            'generators': len(code),
            'redundancy': redundancy.to_dict(),
            'logical_group': structure.group.to_list(),
            'k': structure.k,
            'distance': distance,
            'warnings': list(code.warnings),
        }
        with self.open_output(config['output']) as stream:
            self.emit(stream, [ParamsReportSerializer(report).data])
