# pylint: disable=missing-docstring
import io
import json

import pytest

from coexist_ia import results


def _result():
    return results.RunResult(
        columns=('method', 'snr_db', 'sinr_per_user', 'converged', 'leakage'),
        rows=[
            {'method': 'proposed', 'snr_db': 10.0, 'sinr_per_user': [1.5, 0.25], 'converged': True,
             'leakage': float('nan')},
            {'method': 'identity', 'snr_db': 0.1, 'sinr_per_user': [], 'converged': None, 'leakage': 2.0},
        ],
        meta={'master_seed': 4, 'command': 'sinr-sweep'},
    )


def test_csv_layout():
    handle = io.StringIO()
    results.write(_result(), handle, 'csv')
    assert handle.getvalue().splitlines() == [
        '# command: "sinr-sweep"',
        '# master_seed: 4',
        'method,snr_db,sinr_per_user,converged,leakage',
        'proposed,10.0,1.5;0.25,true,nan',
        'identity,0.1,,,2.0',
    ]


def test_json_layout_replaces_non_finite_values():
    handle = io.StringIO()
    results.write(_result(), handle, 'json')
    document = json.loads(handle.getvalue())
    assert document['meta'] == {'master_seed': 4, 'command': 'sinr-sweep'}
    assert document['rows'][0] == {'method': 'proposed', 'snr_db': 10.0, 'sinr_per_user': [1.5, 0.25],
                                   'converged': True, 'leakage': None}


def test_column_accessor():
    assert _result().column('method') == ['proposed', 'identity']


def test_unknown_format():
    with pytest.raises(ValueError):
        results.write(_result(), io.StringIO(), 'xml')
