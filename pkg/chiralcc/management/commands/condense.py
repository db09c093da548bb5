from ...serializers import CondenseReportSerializer
from ...services.condense_services import RECIPES, run_condense_service
from ._base import ChiralccCommand

DEFAULT_LATTICES = {
    'semion': 'slab:3,3,1',
    'semion-bulk': 'torus:2,2,2',
    'three-fermion': 'slab:3,3,1',
}


class Command(ChiralccCommand):
    help = "Condense bosons of the Z_4 surface theory and re-verify the remaining anyons"
    command_name = 'condense'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--recipe', default='semion', choices=RECIPES)

    def handle(self, *args, **options):
        recipe = options['recipe']
        config = self.load_config(options, lattice=options['lattice'] or DEFAULT_LATTICES[recipe],
                                  d=4)
        lattice = self.build_lattice(config['lattice'])
        result = run_condense_service(lattice, recipe)
        report = result.get('report')
        if report is None:
            self.verification_failed(result['message'])

        record = CondenseReportSerializer({'lattice': lattice.name, **report.to_dict()}).data
        with self.open_output(config['output']) as stream:
            self.emit(stream, [record])
        if result['status'] == 'failed':
            self.verification_failed(result['message'], record)
        self.stderr.write(result['message'])
