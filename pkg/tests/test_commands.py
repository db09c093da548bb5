import csv
import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from openpyxl import load_workbook

from chiralcc import cli
from chiralcc.codes import build_xyz
from chiralcc.conf import get_schema_version
from chiralcc.services import CondensationReport
from chiralcc.utils import service_result


def run(*args):
    """Call a management command and return its JSON-lines records and stderr text."""
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err)
    records = [json.loads(line) for line in out.getvalue().splitlines() if line.strip()]
    return records, err.getvalue()


def returncode(*args):
    with pytest.raises(CommandError) as excinfo:
        run(*args)
    return excinfo.value.returncode


# ==================== params ====================

def test_params_on_cube8():
    [record], _ = run('params', '--lattice', 'cube8', '--family', 'xyz')
    assert record['n'] == 8
    assert record['logical_group'] == [2, 2, 2]
    assert record['distance']['value'] == 2
    assert record['schema_version'] == get_schema_version()


def test_params_can_skip_the_distance_search():
    [record], _ = run('params', '--lattice', 'tetra15', '--distance-cap', '0')
    assert record['distance'] is None
    assert record['k'] == 1


def test_params_flags_non_coprime_codes():
    [record], _ = run('params', '--lattice', 'cube8', '--family', 'chiral', '--d', '4',
                      '--alpha', '2', '--distance-cap', '0')
    assert record['warnings'] == ['non_coprime']


def test_params_usage_errors():
    assert returncode('params', '--lattice', 'cube8', '--d', '3') == 1
    assert returncode('params', '--lattice', 'cylinder') == 1
    assert returncode('params', '--lattice', 'cube8', '--family', 'chiral', '--d', '3',
                      '--alpha', '3') == 1


# ==================== stats ====================

def test_stats_bulk_tjunction():
    [record], _ = run('stats', '--query', 'tjunction')
    assert record['value'] == 2
    assert record['rendered'] == '-1'
    assert record['passed'] is True


def test_stats_surface_spin():
    [record], _ = run('stats', '--query', 'surface-spin', '--d', '3', '--j', '2')
    assert record['lattice'] == 'slab:3,3,1,A'
    assert record['value'] == record['expected'] == 2


def test_stats_braiding():
    [record], _ = run('stats', '--query', 'braiding', '--d', '3', '--i', '1', '--j', '2')
    assert record['detail']['exponent'] == 1
    assert record['passed'] is True


def test_stats_central_charge():
    [record], _ = run('stats', '--query', 'central-charge', '--d', '5', '--alpha', '2')
    assert record['value'] == 4
    assert record['lattice'] is None
    assert returncode('stats', '--query', 'central-charge', '--d', '4') == 1


def test_stats_unsupported_regime_is_a_usage_error():
    assert returncode('stats', '--query', 'surface-spin', '--lattice', 'torus:2,2,2',
                      '--d', '3') == 1


# ==================== decode ====================

def test_decode_writes_records_and_summaries(tmp_path):
    summary, workbook = tmp_path / 'summary.csv', tmp_path / 'summary.xlsx'
    records, err = run('decode', '--trials', '3', '--seed', '7', '--summary', str(summary),
                       '--xlsx', str(workbook))
    assert [r['trial'] for r in records] == [0, 1, 2]
    assert all(r['success'] for r in records)
    assert err.strip() == 'Decoded 3 trials: 0 logical failures'
    with open(summary, newline='', encoding='utf-8') as handle:
        [row] = list(csv.DictReader(handle))
    assert row['L'] == 'torus:2,2,2'
    assert row['failures'] == '0'
    sheet = load_workbook(workbook).active
    assert sheet.cell(row=3, column=1).value == 'torus:2,2,2'


def test_decode_is_a_qubit_command():
    assert returncode('decode', '--d', '3') == 1


def test_decode_rejects_bad_rates():
    assert returncode('decode', '--p', '1.5') == 1


def test_decode_output_file(tmp_path):
    path = tmp_path / 'trials.jsonl'
    records, _ = run('decode', '--trials', '2', '--output', str(path))
    assert records == []
    assert len(path.read_text().splitlines()) == 2


# ==================== prepare ====================

def test_prepare_runs_verify():
    records, err = run('prepare', '--lattice', 'torus:2,2,2', '--d', '3', '--trials', '2',
                       '--seed', '1')
    assert len(records) == 2
    assert all(r['verified'] for r in records)
    assert err.strip() == '2/2 runs reached the zero syndrome'


def test_prepare_usage_errors():
    assert returncode('prepare', '--d', '4') == 1
    assert returncode('prepare', '--lattice', 'slab:3,3,1', '--d', '3') == 1


# ==================== condense ====================

def test_condense_semion():
    [record], _ = run('condense', '--recipe', 'semion')
    assert record['lattice'] == 'slab:3,3,1,A'
    assert record['passed'] is True
    assert record['before']['d'] == 4


def test_failed_verification_exits_with_two(monkeypatch, cube8):
    code = build_xyz(cube8)
    report = CondensationReport('semion', code, code, measured=0)
    report.add('theta', 0, 2, d=4)

    def failing(lattice, recipe):
        return service_result('failed', 'Checks failed: theta', report=report)

    monkeypatch.setattr('chiralcc.management.commands.condense.run_condense_service', failing)
    out, err = StringIO(), StringIO()
    with pytest.raises(CommandError) as excinfo:
        call_command('condense', stdout=out, stderr=err)
    assert excinfo.value.returncode == 2
    echoed = json.loads(err.getvalue().splitlines()[0])
    assert echoed['passed'] is False


# ==================== Console Entry Point ====================

def test_cli_runs_a_command(capsys):
    cli.main(['chiralcc', 'stats', '--query', 'central-charge', '--d', '3'])
    record = json.loads(capsys.readouterr().out.splitlines()[0])
    assert record['value'] == 2


def test_cli_exit_codes(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(['chiralcc', 'prepare', '--d', '2'])
    assert excinfo.value.code == 1
    assert 'odd d' in capsys.readouterr().err
