import json

import pytest

from exporters.json_exporter import JSONExporter
from processors.verification import (INVARIANCE_TOLERANCE, L1_TOLERANCE, MIN_DENSITY, SUP_TOLERANCE,
                                     VerificationProcessor)

SECTIONS = [
    'exact_identities',
    'convergence_bound',
    'lemma_audit',
    'b_digit',
    'reconstruction',
    'density_oracle',
    'invariance',
    'positivity',
    'inoue',
    'covering',
    'steering',
    'alpha_embedding',
]


@pytest.fixture(scope='module')
def processor():
    processor = VerificationProcessor(runs=30, seed=0, grid=256, k_max=200)
    processor.process_all_data()
    return processor


@pytest.fixture(scope='module')
def report(processor):
    return processor.processed_data


def test_every_section_is_reported(report) -> None:
    assert list(report) == SECTIONS
    for section in report.values():
        assert set(section['summary']) >= {'passed', 'checks', 'failures'}
        assert section['summary']['failures'] == 0 or not section['summary']['passed']


@pytest.mark.parametrize('name', SECTIONS)
def test_every_section_passes(report, name) -> None:
    summary = report[name]['summary']
    assert summary['passed'], report[name]['data'][:3]
    assert summary['failures'] == 0
    assert summary['checks'] > 0


def test_processor_passes(processor) -> None:
    assert processor.passed


def test_run_counts(report) -> None:
    assert report['exact_identities']['summary']['checks'] == 30
    assert report['covering']['summary']['checks'] == 3
    assert report['alpha_embedding']['summary']['checks'] == 30
    # 30 rational and 3 real traces, plus the x = 1 family for n = 2..100
    assert report['lemma_audit']['summary']['checks'] == 33 + 99
    # 3 real traces of 50 digits each
    assert report['convergence_bound']['summary']['checks'] == 150
    assert report['convergence_bound']['summary']['worst_final_error'] < 1e-6


def test_density_rows(report) -> None:
    oracle = report['density_oracle']['data'][0]
    assert oracle['sup_error'] < SUP_TOLERANCE
    assert oracle['l1_error'] < L1_TOLERANCE
    assert [row['p'] for row in report['invariance']['data']] == [0.3, 0.5, 0.9]
    assert all(row['max_residual'] < INVARIANCE_TOLERANCE for row in report['invariance']['data'])
    assert all(row['h_min'] > MIN_DENSITY for row in report['positivity']['data'])


def test_report_is_deterministic(report) -> None:
    again = VerificationProcessor(runs=30, seed=0, grid=256, k_max=200).process_all_data()
    assert JSONExporter(again).create_export() == JSONExporter(report).create_export()
    assert json.loads(JSONExporter(report).create_export())['summary']['total_sections'] == 12


def test_other_seeds_draw_other_points(processor) -> None:
    other = VerificationProcessor(runs=30, seed=1, grid=256, k_max=200)
    starts = [str(trace.start) for trace in processor.rational_traces()]
    assert [str(trace.start) for trace in other.rational_traces()] != starts
