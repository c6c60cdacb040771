# pylint: disable=missing-docstring
import json

import pytest

from coexist_ia import cli, exc, metadata, results


@pytest.fixture()
def fake_runner(mocker):
    """replace the sinr-sweep runner with one returning a single row"""
    runner = mocker.Mock(return_value=results.RunResult(('method', 'sum_sinr'), [{'method': 'identity',
                                                                                   'sum_sinr': 1.25}],
                                                        {'command': 'sinr-sweep'}))
    mocker.patch.dict(cli.RUNNERS, {'sinr-sweep': runner})
    return runner


def test_feasible_dofs(capsys):
    assert cli.main(['feasibility', '--nsc', '8', '--dofs', '1,1,1,3']) == metadata.EXIT_OK
    assert capsys.readouterr().out == 'feasible\n'


def test_infeasible_dofs(capsys):
    assert cli.main(['feasibility', '--nsc', '8', '--dofs', '4,5']) == metadata.EXIT_INFEASIBLE
    assert capsys.readouterr().out.startswith('infeasible: pairwise-dof')


def test_feasibility_without_radar(capsys):
    assert cli.main(['feasibility', '--nsc', '3', '--dofs', '1,1,1,1', '--no-radar']) == metadata.EXIT_OK
    assert cli.main(['feasibility', '--nsc', '1', '--dofs', '1,1,1,1', '--no-radar']) == metadata.EXIT_INFEASIBLE
    capsys.readouterr()


def test_bad_dofs_is_usage_error():
    with pytest.raises(SystemExit) as err:
        cli.main(['feasibility', '--nsc', '8', '--dofs', '1,x'])
    assert err.value.code == 2


def test_missing_config_exits_with_config_code(tmp_path):
    assert cli.main(['sinr-sweep', '--config', str(tmp_path / 'absent.json')]) == metadata.EXIT_CONFIG


def test_zero_threads_is_config_error(fake_runner):
    assert cli.main(['sinr-sweep', '--threads', '0']) == metadata.EXIT_CONFIG
    fake_runner.assert_not_called()


def test_numeric_failure_exit_code(mocker):
    mocker.patch.dict(cli.RUNNERS, {'sinr-sweep': mocker.Mock(side_effect=exc.NumericError('singular'))})
    assert cli.main(['sinr-sweep']) == metadata.EXIT_NUMERIC


def test_infeasible_scenario_exit_code(tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'n_sc': 4, 'users': [{'d': 2}, {'d': 2}, {'kind': 'radar', 'd': 3}]}))
    assert cli.main(['sinr-sweep', '--config', str(path)]) == metadata.EXIT_INFEASIBLE


def test_seed_from_environment(monkeypatch, fake_runner, capsys):
    monkeypatch.setenv(metadata.SEED_ENV_VAR, '11')
    assert cli.main(['sinr-sweep']) == metadata.EXIT_OK
    assert fake_runner.call_args[0][0].master_seed == 11
    capsys.readouterr()


def test_seed_flag_beats_environment(monkeypatch, fake_runner, capsys):
    monkeypatch.setenv(metadata.SEED_ENV_VAR, '11')
    cli.main(['sinr-sweep', '--seed', '3', '--eigen-mode', 'literal', '--threads', '2'])
    settings = fake_runner.call_args[0][0]
    assert settings.master_seed == 3
    assert settings.solver.eigen_mode.value == 'literal'
    assert fake_runner.call_args[1] == {'threads': 2, 'progress': False}
    capsys.readouterr()


def test_malformed_seed_environment(monkeypatch, fake_runner):
    monkeypatch.setenv(metadata.SEED_ENV_VAR, 'seven')
    assert cli.main(['sinr-sweep']) == metadata.EXIT_CONFIG


def test_writes_requested_format(tmp_path, fake_runner):
    out = tmp_path / 'result.json'
    assert cli.main(['sinr-sweep', '--format', 'json', '--out', str(out)]) == metadata.EXIT_OK
    document = json.loads(out.read_text())
    assert document['rows'] == [{'method': 'identity', 'sum_sinr': 1.25}]


def test_csv_to_stdout(fake_runner, capsys):
    cli.main(['sinr-sweep'])
    assert capsys.readouterr().out.splitlines()[-2:] == ['method,sum_sinr', 'identity,1.25']


def test_end_to_end_sweep(tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'snr_db': [10.0], 'trials': 1, 'methods': ['identity', 'sssvsp']}))
    out = tmp_path / 'sweep.csv'
    assert cli.main(['sinr-sweep', '--config', str(path), '--out', str(out)]) == metadata.EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[-3] == ','.join(metadata.SINR_COLUMNS)
    assert lines[-2].startswith('identity,10.0,0,')
    assert lines[-1].startswith('sssvsp,10.0,0,')
