import csv
import json
from io import StringIO

from openpyxl import load_workbook

from chiralcc.services import (export_summary_service, prep_summary_row, summary_row, write_jsonl,
                               write_summary_csv, write_summary_workbook)
from chiralcc.services.decoder_services import NoiseModel, run_experiment
from chiralcc.services.export_services import SUMMARY_COLUMNS, build_summary_workbook
from chiralcc.services.prep_services import GroundStatePreparer


def test_jsonl_lines_are_stamped_and_sorted():
    stream = StringIO()
    assert write_jsonl(stream, [{'b': 1, 'a': 2}, {'c': 3}]) == 2
    first, second = stream.getvalue().splitlines()
    assert first.startswith('{"a":2,"b":1')
    assert 'schema_version' in json.loads(second)


def test_summary_row_and_csv(tmp_path, xyz_torus, torus):
    noise = NoiseModel(0.0, 0.0, 3)
    summary = run_experiment(xyz_torus, noise, trials=4, threads=1)
    row = summary_row(torus, 2, 1, noise, summary)
    assert tuple(row) == SUMMARY_COLUMNS
    path = tmp_path / 'summary.csv'
    write_summary_csv(path, [row, row])
    with open(path, newline='', encoding='utf-8') as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 2
    assert rows[0]['trials'] == '4'
    assert tuple(rows[0]) == SUMMARY_COLUMNS


def test_prep_summary_row(torus):
    preparer = GroundStatePreparer(torus, 3, 1)
    row = prep_summary_row(torus, 3, 1, [preparer.prepare(s) for s in (0, 1)])
    assert row['failures'] == 0
    assert row['max_residual_weight'] == 0
    assert row['trials'] == 2


def sample_row(name='torus:2,2,2'):
    return {'L': name, 'd': 2, 'alpha': 1, 'p': 0.01, 'q': 0.01, 'trials': 10, 'failures': 1,
            'ci_low': 0.01, 'ci_high': 0.4, 'max_residual_weight': 3}


def test_workbook_layout(tmp_path):
    wb = build_summary_workbook([sample_row()], title="Runs")
    ws = wb.active
    assert ws['A1'].value == "Runs"
    assert ws['A1'].font.bold
    assert [cell.value for cell in ws[2]] == list(SUMMARY_COLUMNS)
    path = tmp_path / 'runs.xlsx'
    write_summary_workbook(path, [sample_row(), sample_row('torus:3,3,3')])
    loaded = load_workbook(path).active
    assert loaded.cell(row=4, column=1).value == 'torus:3,3,3'
    assert loaded.cell(row=3, column=7).value == 1


def test_export_service(tmp_path):
    result = export_summary_service([sample_row()], tmp_path / 'a.csv', tmp_path / 'a.xlsx')
    assert result['status'] == 'success'
    assert len(result['written']) == 2
    assert export_summary_service([sample_row()])['written'] == []


def test_export_service_reports_unwritable_paths(tmp_path):
    missing = tmp_path / 'missing' / 'a.xlsx'
    result = export_summary_service([sample_row()], tmp_path / 'a.csv', missing)
    assert result['status'] == 'partial_success'
    assert result['written'] == [str(tmp_path / 'a.csv')]
    assert export_summary_service([sample_row()], missing)['status'] == 'failed'
