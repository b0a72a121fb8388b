import json

import numpy as np
import pytest

from exporters.csv_exporter import CSVExporter
from main import main
from transfer.perron_frobenius import gauss_density


def test_expand_prints_the_trace(capsys) -> None:
    assert main(['expand', '--x', '1/2', '--omega', '1110']) == 0
    assert capsys.readouterr().out.splitlines() == [
        'digits 3,2,2,1',
        'signs +,-,-,-',
        'omega 1110',
        'convergents 1/3,2/5,3/7,1/2',
        'terminated true',
        'ending twos_then_one n=0 k=2 twos=2',
    ]


def test_expand_json(capsys) -> None:
    assert main(['expand', '--x', 'surd:-1:5:2', '--omega', '0...', '--n', '6', '--json']) == 0
    data = json.loads(capsys.readouterr().out)
    assert data['digits'] == [1] * 6
    assert data['terminated'] is False


def test_bad_input_is_a_usage_error(capsys) -> None:
    assert main(['expand', '--x', 'abc', '--omega', '0']) == 2
    assert main(['expand', '--x', '3/7', '--omega', '1']) == 2
    assert main(['frobnicate']) == 2
    assert main(['density', '--p', '1.5', '--grid', '256']) == 2
    assert capsys.readouterr().out == ''


def test_steer_output(capsys) -> None:
    assert main(['steer', '--x', '1/4', '--digits', 'set:1,2']) == 0
    assert capsys.readouterr().out.splitlines()[-1] == 'status failed_at=1'


def test_alpha_output(capsys) -> None:
    assert main(['alpha', '--alpha', '0.5', '--x', '2/5']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'omega 10'
    assert lines[1] == 'digits 3,2'
    assert lines[-1] == 'max_discrepancy 0'


def test_density_file(tmp_path) -> None:
    path = tmp_path / 'h1.csv'
    assert main(['density', '--p', '1', '--grid', '256', '--kmax', '200', '--out', str(path)]) == 0
    h = CSVExporter.read_density_csv(str(path))
    assert h.n == 256
    assert h.distance(gauss_density(256), norm='sup') < 5e-3


def test_orbit_histogram(tmp_path, capsys) -> None:
    path = tmp_path / 'hist.csv'
    assert main(['orbit', '--p', '0.5', '--x0', '0.3', '--n', '10000', '--burnin', '100',
                 '--bins', '32', '--seed', '1', '--out', str(path)]) == 0
    table = CSVExporter.read_table(str(path))
    assert list(table.columns) == ['bin_left', 'bin_right', 'mass']
    assert np.isclose(table['mass'].sum(), 1.0)
    assert json.loads(capsys.readouterr().out)['bins'] == 32


@pytest.mark.slow
def test_verify_passes_and_is_reproducible(tmp_path) -> None:
    first, second = tmp_path / 'first.json', tmp_path / 'second.json'
    assert main(['verify', '--out', str(first)]) == 0
    assert main(['verify', '--out', str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    sections = json.loads(first.read_text())['sections']
    assert all(section['summary']['passed'] for section in sections.values())


def test_expand_periodic_word(capsys) -> None:
    assert main(['expand', '--x', '1/2', '--omega', '1...', '--n', '5']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'digits 3,2,2,2,2'
    assert lines[-1] == 'terminated false'
