# tests/test_cli.py
import csv
import json

import pytest

from cli import run
from demos import seed_diagram
from tests.helpers import stationary_sequence
from utils.serializers import dump_json


@pytest.fixture
def p2_file(tmp_path):
    path = tmp_path / 'p2.json'
    assert run(['construct', 'pk', '--k', '2', '--seed-demo', 'p2-small', '--out', str(path)]) == 0
    return path


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


# ==================== CONSTRUCT & CHECK ====================
def test_construct_then_check(p2_file, capsys):
    data = json.loads(p2_file.read_text())
    assert set(data) >= {'sequence', 'ordered_diagram'}
    assert run(['check', 'pk', '--k', '2', str(p2_file)]) == 0
    assert _stdout_json(capsys)['passed'] is True


def test_check_failure_exits_one(tmp_path, capsys):
    path = tmp_path / 'bad.json'
    images = [(1, 2, 3, 4, 1), (1, 1, 2, 3, 4), (1, 1, 2, 2, 3, 4), (1, 1, 1, 1, 2, 3, 4)]
    dump_json(stationary_sequence(images).to_dict(), str(path))
    assert run(['check', 'pk', '--k', '2', str(path)]) == 1
    report = _stdout_json(capsys)
    assert report['passed'] is False
    assert report['clause'] == '4-suffix'
    assert report['level'] == 1


def test_check_text_format(capsys):
    assert run(['check', 'toeplitz', '--k', '1', '--seed-demo', 'toeplitz-k1', '--format', 'text']) == 0
    assert capsys.readouterr().out.startswith('PASS on')


def test_construct_subexp(tmp_path):
    path = tmp_path / 'subexp.json'
    assert run(['construct', 'subexp', '--levels', '1', '--out', str(path)]) == 0
    data = json.loads(path.read_text())
    assert data['subexp']['levels'][0]['alpha'] == 5


def test_amplify_then_intertwine(tmp_path, capsys):
    seed = tmp_path / 'seed.json'
    report = tmp_path / 'amplified.json'
    dump_json(seed_diagram(8).to_dict(), str(seed))
    assert run(['amplify', '--k', '1', '--diagram', str(seed), '--out', str(report)]) == 0
    assert run(['check', 'intertwine', str(report)]) == 0
    assert _stdout_json(capsys) == {'passed': True, 'failures': []}


# ==================== ANALYZE ====================
def test_complexity_writes_csv(p2_file, tmp_path, capsys):
    table = tmp_path / 'p.csv'
    assert run(['analyze', 'complexity', '--m-max', '30', '--csv', str(table), str(p2_file)]) == 0
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 30
    counts = [int(row['p']) for row in rows]
    assert counts == sorted(counts)
    assert len(_stdout_json(capsys)['rows']) == 30


def test_language_csv_output(capsys):
    assert run(['analyze', 'language', '--m', '2', '--seed-demo', 'p1-small', '--format', 'csv']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'word'
    assert '1 2' in lines[1:]
    assert '1 1' not in lines[1:]


def test_asymptotic_report(capsys):
    assert run(['analyze', 'asymptotic', '--m-max', '40', '--gap', '10', '--seed-demo', 'p2-small']) == 0
    report = _stdout_json(capsys)
    assert report['stabilized_branches'] == 2
    assert report['identity_holds'] is True


def test_signals_audit(capsys):
    assert run(['analyze', 'signals', '--mode', '2', '--n-max', '2', '--seed-demo', 'p2-small']) == 0
    assert _stdout_json(capsys)['passed'] is True


def test_asymptotic_text_lists_signals(capsys):
    args = ['analyze', 'asymptotic', '--m-max', '40', '--gap', '10', '--seed-demo', 'p2-small', '--format', 'text']
    assert run(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'stabilized branches 2, degrees [2, 2]'
    assert lines[3].startswith('  signal v1:')
    assert lines[4].startswith('  signal v2:')


def test_signals_audit_pinf(capsys):
    args = ['analyze', 'signals', '--mode', 'inf', '--n-max', '3', '--m-max', '120', '--seed-demo', 'pinf-compact']
    assert run(args) == 0
    report = _stdout_json(capsys)
    assert report['passed'] is True
    assert report['mode'] == 'inf'
    assert report['m_max'] == 120


def test_pairs_text(capsys):
    args = ['pairs', '--i', '1', '--n', '3', '--mode', '2', '--seed-demo', 'p2-small', '--format', 'text']
    assert run(args) == 0
    assert capsys.readouterr().out.startswith('i=1 n=3')


def test_pairs_refuse_oversized_windows(capsys):
    args = ['pairs', '--i', '1', '--n', '4', '--mode', 'inf', '--seed-demo', 'pinf-small', '--format', 'text']
    assert run(args) == 2
    error = json.loads(capsys.readouterr().err)
    assert error['error'] == 'BudgetExceededError'
    assert error['rule'] == 'max_window_length'


def test_vershik_exhaustive(capsys):
    assert run(['vershik', '--depth', '2', '--seed-demo', 'p1-small']) == 0
    orbits = _stdout_json(capsys)['orbits']
    assert [o['count'] for o in orbits] == [6, 8, 10]


def test_telescope_sizes(capsys):
    assert run(['telescope', '--keep', '0,2,4', '--seed-demo', 'p1-small', '--format', 'text']) == 0
    assert capsys.readouterr().out.strip() == 'sizes [1, 3, 3]'


# ==================== INVALID INPUT ====================
def test_malformed_json_exits_two(tmp_path, capsys):
    path = tmp_path / 'broken.json'
    path.write_text('{"morphisms": [')
    assert run(['check', 'pk', '--k', '1', str(path)]) == 2
    error = json.loads(capsys.readouterr().err)
    assert error['error'] == 'ValidationError'
    assert error['field'].startswith(str(path))


def test_missing_file_exits_two(tmp_path):
    assert run(['check', 'pinf', str(tmp_path / 'absent.json')]) == 2


def test_usage_errors_exit_two():
    assert run(['check', 'pk']) == 2
    assert run(['construct', 'pk', '--k', '1', '--seed-demo', 'no-such-demo']) == 2
    assert run(['check', 'pk', '--k', '0', '--seed-demo', 'p1-small']) == 2


def test_output_must_differ_from_input(p2_file):
    assert run(['check', 'pk', '--k', '2', str(p2_file), '--out', str(p2_file)]) == 2


def test_version_exits_zero():
    assert run(['--version']) == 0
