# pylint: disable=missing-docstring
import collections
import io
import math

import numpy as np
import pytest

from coexist_ia import exc, feasibility, harness, metadata, results
from coexist_ia.bases import Method, TargetKind


def _encoded(result, fmt='json'):
    handle = io.StringIO()
    results.write(result, handle, fmt)
    return handle.getvalue()


def test_sinr_sweep_rows_are_ordered(tiny_config):
    result = harness.run_sinr_sweep(tiny_config)
    assert result.columns == metadata.SINR_COLUMNS
    assert len(result.rows) == 3 * 2 * 2
    keys = [(row['method'], row['snr_db'], row['trial']) for row in result.rows]
    assert keys[:4] == [('proposed', 0.0, 0), ('proposed', 0.0, 1), ('proposed', 20.0, 0), ('proposed', 20.0, 1)]
    assert result.column('method')[4] == 'sssvsp'
    assert all(len(row['sinr_per_user']) == 4 for row in result.rows)
    assert result.meta['command'] == 'sinr-sweep'
    assert result.meta['master_seed'] == 7


def test_sinr_sweep_is_thread_independent(tiny_config):
    serial = _encoded(harness.run_sinr_sweep(tiny_config, threads=1))
    threaded = _encoded(harness.run_sinr_sweep(tiny_config, threads=3))
    assert serial == threaded


def test_methods_share_channel_draws(tiny_config):
    alone = harness.run_sinr_sweep(tiny_config.model_copy(update={'methods': [Method.IDENTITY]}))
    together = harness.run_sinr_sweep(tiny_config)
    shared_rows = [row for row in together.rows if row['method'] == 'identity']
    assert [row['sum_sinr'] for row in alone.rows] == [row['sum_sinr'] for row in shared_rows]


def test_seed_changes_results(tiny_config):
    first = harness.run_sinr_sweep(tiny_config.model_copy(update={'methods': [Method.IDENTITY]}))
    second = harness.run_sinr_sweep(tiny_config.model_copy(update={'methods': [Method.IDENTITY], 'master_seed': 8}))
    assert first.column('sum_sinr') != second.column('sum_sinr')


def test_infeasible_sweep_raises(tiny_config):
    users = [{'id': 'comm%d' % i, 'd': 2} for i in range(3)] + [{'id': 'radar', 'kind': 'radar', 'd': 3}]
    settings = type(tiny_config).model_validate(dict(tiny_config.model_dump(), n_sc=4, users=users))
    with pytest.raises(exc.InfeasibleError) as err:
        harness.run_sinr_sweep(settings)
    assert err.value.verdict.condition == feasibility.PAIRWISE


def test_user_sweep_marks_infeasible_counts(tiny_config):
    result = harness.run_user_sweep(tiny_config.model_copy(update={'n_sc': 2, 'user_counts': [2, 3, 4]}))
    assert len(result.rows) == 2 * 2 * 2 + 2
    markers = [row for row in result.rows if row['status'] != 'ok']
    assert [row['users'] for row in markers] == [4, 4]
    assert markers[0]['status'] == 'infeasible: %s' % feasibility.SINGLE_STREAM
    assert markers[0]['sum_sinr'] is None
    assert [row['users'] for row in result.rows[:4]] == [2, 2, 2, 2]


def test_roc_rows(tiny_config):
    with pytest.warns(exc.UndersampledWarning):
        result = harness.run_roc(tiny_config)
    assert len(result.rows) == 2 * 2 * 3
    for row in result.rows:
        assert 0.0 <= row['pd'] <= 1.0
        assert row['k'] == 4
        assert not row['saturated']
        # 600 null samples leave 6 exceedances at 1e-2
        assert row['undersampled'] == (row['pfa'] == 0.01)
    assert all(row['pd'] == 1.0 for row in result.rows if row['pfa'] == 1.0)
    assert 'pfa,pd' in _encoded(result, 'csv')


def test_pd_delta_clamps_unreachable_rates(tiny_config):
    with pytest.warns(exc.UndersampledWarning):
        result = harness.run_pd_delta(tiny_config)
    assert len(result.rows) == 2 * 2 * 2
    for row in result.rows:
        assert row['pd_delta'] == pytest.approx(row['pd_proposed'] - row['pd_sssvsp'])
    clamped = [row for row in result.rows if row['pfa'] == 1e-6]
    assert all(row['pfa_effective'] == pytest.approx(1 / 600) for row in clamped)
    assert all(row['undersampled'] == (row['pfa'] == 1e-6) for row in result.rows)


def test_pd_delta_flags_thin_calibration(tiny_config):
    settings = tiny_config.model_copy(update={
        'snr_db': [20.0],
        'pd_delta_pfas': [1e-4],
        'pulses_k_values': [1],
        'detector': tiny_config.detector.model_copy(update={'h0_calibration_trials': 10000}),
    })
    with pytest.warns(exc.UndersampledWarning):
        result = harness.run_pd_delta(settings)
    assert len(result.rows) == 2
    for row in result.rows:
        assert row['undersampled']
        assert row['pfa_effective'] == 1e-4


@pytest.mark.filterwarnings('ignore::coexist_ia.exc.UndersampledWarning')
@pytest.mark.parametrize('runner', [harness.run_roc, harness.run_pd_delta, harness.run_user_sweep])
def test_detection_and_user_runs_are_thread_independent(tiny_config, runner):
    assert _encoded(runner(tiny_config, threads=1)) == _encoded(runner(tiny_config, threads=3))


def _samples(rows, *keys):
    grouped = collections.defaultdict(list)
    for row in rows:
        grouped[tuple(row[key] for key in keys)].append(row['sum_sinr'])
    return {key: np.asarray(values) for key, values in grouped.items()}


def _standard_error(values):
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


def test_proposed_sum_sinr_grows_and_leads_baselines(tiny_config):
    settings = tiny_config.model_copy(update={
        'snr_db': [0.0, 10.0, 20.0, 30.0, 40.0],
        'trials': 6,
        'solver': tiny_config.solver.model_copy(update={'max_iters': 500}),
    })
    samples = _samples(harness.run_sinr_sweep(settings).rows, 'method', 'snr_db')
    proposed = [samples[('proposed', snr)].mean() for snr in settings.snr_db]
    assert all(b > a for a, b in zip(proposed, proposed[1:]))
    for snr in settings.snr_db[1:]:
        assert samples[('proposed', snr)].mean() > samples[('sssvsp', snr)].mean()
        assert samples[('proposed', snr)].mean() > samples[('identity', snr)].mean()


def test_user_sweep_sum_sinr_does_not_fall_with_users(tiny_config):
    settings = tiny_config.model_copy(update={
        'snr_db': [20.0],
        'trials': 6,
        'user_counts': [2, 3, 4, 5, 6],
        'solver': tiny_config.solver.model_copy(update={'max_iters': 200}),
    })
    result = harness.run_user_sweep(settings)
    assert all(row['status'] == 'ok' for row in result.rows)
    samples = _samples(result.rows, 'users')
    for fewer, more in zip(settings.user_counts, settings.user_counts[1:]):
        noise = 3 * math.hypot(_standard_error(samples[(fewer,)]), _standard_error(samples[(more,)]))
        assert samples[(more,)].mean() >= samples[(fewer,)].mean() - noise
    assert samples[(6,)].mean() > samples[(2,)].mean()


def _detection_settings(tiny_config, **changes):
    detector = changes.pop('detector')
    return tiny_config.model_copy(update=dict(
        changes,
        target_models=[TargetKind.SWERLING_I],
        detector=tiny_config.detector.model_copy(update=detector),
        solver=tiny_config.solver.model_copy(update={'max_iters': 100}),
    ))


def test_proposed_detection_keeps_up_at_matched_false_alarm(tiny_config):
    settings = _detection_settings(
        tiny_config, snr_db=[30.0], pfa_grid=[0.01],
        detector={'pfa_target': 0.01, 'pulses_k': 1, 'h0_calibration_trials': 10000, 'h1_trials': 4000,
                  'channel_draws': 10})
    rows = {row['method']: row for row in harness.run_roc(settings).rows}
    assert rows['proposed']['pfa'] == rows['sssvsp']['pfa'] == 0.01
    assert not rows['proposed']['undersampled']
    pd_proposed, pd_sssvsp = rows['proposed']['pd'], rows['sssvsp']['pd']
    sigma = math.hypot(math.sqrt(pd_proposed * (1 - pd_proposed) / 4000),
                       math.sqrt(pd_sssvsp * (1 - pd_sssvsp) / 4000))
    assert pd_proposed >= pd_sssvsp - 3 * sigma


def test_integrating_pulses_helps_both_methods(tiny_config):
    settings = _detection_settings(
        tiny_config, n_sc=16, snr_db=[-10.0, 0.0], pd_delta_pfas=[0.05], pulses_k_values=[1, 16],
        detector={'pfa_target': 0.05, 'pulses_k': 16, 'h0_calibration_trials': 2000, 'h1_trials': 1000,
                  'channel_draws': 4})
    rows = {(row['snr_db'], row['k']): row for row in harness.run_pd_delta(settings).rows}
    for snr in settings.snr_db:
        for column in ('pd_proposed', 'pd_sssvsp'):
            short, long = rows[(snr, 1)][column], rows[(snr, 16)][column]
            sigma = math.hypot(math.sqrt(short * (1 - short) / 1000), math.sqrt(long * (1 - long) / 1000))
            assert long >= short - 2 * sigma
