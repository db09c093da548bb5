from ...serializers import PrepTranscriptSerializer
from ...services.export_services import export_summary_service, prep_summary_row
from ...services.prep_services import run_prepare_service
from ._base import ChiralccCommand


class Command(ChiralccCommand):
    help = "Prepare chiral color code ground states from |0...0> and verify each run"
    command_name = 'prepare'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--trials', type=int, default=1)
        parser.add_argument('--block-size', type=int, default=None,
                            help="Loop-removal block edge in primitive cells")
        parser.add_argument('--summary', default='', help="CSV summary path")
        parser.add_argument('--xlsx', default='', help="Excel summary path")

    def handle(self, *args, **options):
        config = self.load_config(options)
        lattice = self.build_lattice(config['lattice'])
        result = run_prepare_service(lattice, config['d'], config['alpha'], config['trials'],
                                     config['seed'], config['block_size'])
        transcripts = result.get('transcripts')
        if transcripts is None:
            self.usage_error(result['message'])

        with self.open_output(config['output']) as stream:
            self.emit(stream, (PrepTranscriptSerializer(t.to_dict()).data for t in transcripts))
        row = prep_summary_row(lattice, config['d'], config['alpha'], transcripts)
        export_summary_service([row], config['summary'], config['xlsx'])
        if result['status'] == 'failed':
            failing = result['failing']
            self.verification_failed(result['message'],
                                     PrepTranscriptSerializer(failing.to_dict()).data)
        self.stderr.write(result['message'])
