from ...codes import build_xyz
from ...exceptions import ChiralccError
from ...serializers import TrialRecordSerializer
from ...services.decoder_services import NoiseModel, run_decode_service
from ...services.export_services import export_summary_service, summary_row
from ._base import ChiralccCommand


class Command(ChiralccCommand):
    help = "Monte Carlo single-shot decoding of the XYZ color code"
    command_name = 'decode'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--p', type=float, default=0.0, help="Data error rate")
        parser.add_argument('--q', type=float, default=0.0, help="Measurement error rate")
        parser.add_argument('--trials', type=int, default=1)
        parser.add_argument('--threads', type=int, default=None)
        parser.add_argument('--summary', default='', help="CSV summary path")
        parser.add_argument('--xlsx', default='', help="Excel summary path")

    def handle(self, *args, **options):
        config = self.load_config(options)
        lattice = self.build_lattice(config['lattice'])
        try:
            code = build_xyz(lattice)
            noise = NoiseModel(config['p'], config['q'], config['seed'])
        except ChiralccError as e:
            self.usage_error(f"decode: {e}")
        result = run_decode_service(code, noise, config['trials'], config['threads'])
        if result['status'] == 'failed':
            self.verification_failed(result['message'])

        summary = result['summary']
        with self.open_output(config['output']) as stream:
            self.emit(stream, (TrialRecordSerializer(r.to_dict()).data for r in summary.records))
        row = summary_row(lattice, code.d, code.alpha, noise, summary)
        export = export_summary_service([row], config['summary'], config['xlsx'])
        if export['status'] != 'success':
            self.usage_error(export['message'])
        self.stderr.write(result['message'])
