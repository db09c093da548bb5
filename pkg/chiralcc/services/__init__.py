"""
Services for Chiral Color Codes.

Simulation entry points used by the management commands: single-shot decoding,
ground-state preparation, condensation and summary export.
"""

from .condense_services import (CondensationReport, MeasurementSet, anyon_class_trivial,
                                condense_semion, condense_three_fermion, measure_and_update,
                                run_condense_service)
from .decoder_services import (ExperimentSummary, NoiseModel, SingleShotDecoder, TrialRecord,
                               decode, repair_syndrome, run_decode_service, run_experiment,
                               sample_trial, wilson_interval)
from .export_services import (export_summary_service, prep_summary_row, summary_row, write_jsonl,
                              write_summary_csv, write_summary_workbook)
from .prep_services import (GroundStatePreparer, LocalityReport, PrepTranscript, locality_audit,
                            prepare_ground_state, run_prepare_service)

__all__ = [
    'CondensationReport', 'ExperimentSummary', 'GroundStatePreparer', 'LocalityReport',
    'MeasurementSet', 'NoiseModel', 'PrepTranscript', 'SingleShotDecoder', 'TrialRecord',
    'anyon_class_trivial', 'condense_semion', 'condense_three_fermion', 'decode',
    'export_summary_service', 'locality_audit', 'measure_and_update', 'prep_summary_row',
    'prepare_ground_state', 'repair_syndrome', 'run_condense_service', 'run_decode_service',
    'run_experiment', 'run_prepare_service', 'sample_trial', 'summary_row', 'wilson_interval',
    'write_jsonl', 'write_summary_csv', 'write_summary_workbook',
]
