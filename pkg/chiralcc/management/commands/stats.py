from django.core.management.base import CommandError

from ...codes import build_boundary, build_chiral, build_xyz
from ...exceptions import ChiralccError
from ...serializers import StatsRecordSerializer
from ...topo import (bulk_junction_hops, chiral_central_charge, surface_braiding,
                     surface_junction_hops, t_junction_phase)
from ...utils import render_phase
from ._base import ChiralccCommand

SURFACE_QUERIES = ('surface-spin', 'braiding')
SURFACE_LATTICE = 'slab:3,3,1'


class Command(ChiralccCommand):
    help = "Run T-junction, surface spin, braiding or central-charge queries"
    command_name = 'stats'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--query', default='tjunction',
                            choices=['tjunction', 'surface-spin', 'braiding', 'central-charge'])
        parser.add_argument('--i', type=int, default=1, help="Loop power for braiding")
        parser.add_argument('--j', type=int, default=1, help="Anyon power")
        parser.add_argument('--color', default='A', help="Boundary color for surface queries")

    def handle(self, *args, **options):
        query = options['query']
        default = SURFACE_LATTICE if query in SURFACE_QUERIES else self.default_lattice
        config = self.load_config(options, lattice=options['lattice'] or default)
        try:
            record = getattr(self, f"_{query.replace('-', '_')}")(config, options)
        except ChiralccError as e:
            raise CommandError(f"stats {query} failed: {e}", returncode=1)
        record['passed'] = record['expected'] is None or record['value'] == record['expected']
        record.setdefault('detail', {})
        with self.open_output(config['output']) as stream:
            self.emit(stream, [StatsRecordSerializer(record).data])
        if not record['passed']:
            self.verification_failed(f"{query}: got {record['rendered']}", record)

    def _record(self, query, lattice, config, value, expected, unit='tau'):
        d = config['d']
        rendered = render_phase(value, d) if unit == 'tau' else str(value)
        return {'query': query, 'lattice': lattice, 'd': d, 'alpha': config['alpha'],
                'value': value, 'expected': expected, 'rendered': rendered}

    def _tjunction(self, config, options):
        d = config['d']
        lattice = self.build_lattice(config['lattice'])
        code = build_xyz(lattice) if d == 2 else build_chiral(lattice, d, config['alpha'])
        phase = t_junction_phase(code, bulk_junction_hops(code, 0))
        expected = d if d == 2 else None
        return self._record('tjunction', lattice.name, config, phase, expected)

    def _boundary_code(self, config, options):
        lattice = self.build_lattice(config['lattice'])
        return build_boundary(lattice, options['color'], 'chiral', config['d'], config['alpha'])

    def _surface_spin(self, config, options):
        code = self._boundary_code(config, options)
        j = config['j']
        phase = t_junction_phase(code, surface_junction_hops(code, int(code.sites[0]), j))
        expected = (2 * config['alpha'] * j * j) % (2 * code.d)
        return self._record('surface-spin', code.lattice.name, config, phase, expected)

    def _braiding(self, config, options):
        code = self._boundary_code(config, options)
        result = surface_braiding(code, config['i'], config['j'])
        expected = (2 * config['alpha'] * config['i'] * config['j']) % code.d
        record = self._record('braiding', code.lattice.name, config, result.phase,
                              2 * expected % (2 * code.d))
        record['detail'] = result.to_dict()
        return record

    def _central_charge(self, config, options):
        charge = chiral_central_charge(config['d'], config['alpha'])
        return self._record('central-charge', None, config, charge, None, unit='eighths')
