""" experiment drivers: sinr sweeps, roc curves, pd deltas and user-count sweeps """
import concurrent.futures
import logging
import typing

import tqdm

from coexist_ia import exc, metadata, util
from coexist_ia.baselines import design
from coexist_ia.bases import Method, Scenario, TargetKind
from coexist_ia.channel import draw_link_set, TargetModel
from coexist_ia.config import build_scenario, ScenarioConfig, user_sweep_users
from coexist_ia.detection import pd_at, simulate_statistics
from coexist_ia.feasibility import check_feasibility
from coexist_ia.results import RunResult
from coexist_ia.solver import normalized_leakage, sum_sinr
from coexist_ia.version import __version__

logger = logging.getLogger(__name__)

Task = typing.TypeVar('Task')
Rows = typing.List[typing.Dict[str, typing.Any]]


def _meta(command: str, config: ScenarioConfig, columns: typing.Sequence[str]) -> dict:
    return {
        'command': command,
        'version': __version__,
        'master_seed': config.master_seed,
        'snr_definition': metadata.SNR_DEFINITION,
        'columns': list(columns),
        'config': config.model_dump(mode='json'),
    }


def _fan_out(worker: typing.Callable[[Task], Rows], tasks: typing.Sequence[Task], threads: int,
             progress: bool, label: str) -> Rows:
    """run ``worker`` over ``tasks``; rows come back in task order whatever the thread count"""
    bar = tqdm.tqdm(total=len(tasks), desc=label, disable=not progress, leave=False)
    rows = []
    try:
        if threads > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
                for chunk in pool.map(worker, tasks):
                    rows.extend(chunk)
                    bar.update()
        else:
            for task in tasks:
                rows.extend(worker(task))
                bar.update()
    finally:
        bar.close()
    return rows


def _require_feasible(scenario: Scenario):
    verdict = check_feasibility(scenario.n_sc, scenario.users)
    if not verdict:
        raise exc.InfeasibleError(verdict)


def _sinr_row(method: Method, snr_db: float, scenario: Scenario, links, solution) -> dict:
    total, per_user = sum_sinr(scenario, links, solution)
    return {
        'method': method.value,
        'snr_db': snr_db,
        'sum_sinr': total,
        'sinr_per_user': [per_user[uid] for uid in scenario.ids],
        'leakage': solution.leakage,
        'normalized_leakage': normalized_leakage(scenario, links, solution),
        'iterations': solution.iterations,
        'converged': solution.converged,
    }


def run_sinr_sweep(config: ScenarioConfig, threads: int = 1, progress: bool = False) -> RunResult:
    """Sum SINR of every configured method across the SNR grid.

    Each (snr, trial) pair draws one channel realization that every method
    shares; method randomness is keyed by the method name as well.
    """
    scenario = build_scenario(config)
    _require_feasible(scenario)
    target = config.target_model()
    overrides = config.topology_overrides
    seed = config.master_seed
    tasks = [(index, snr, trial) for index, snr in enumerate(config.snr_db) for trial in range(config.trials)]

    def worker(task) -> Rows:
        index, snr, trial = task
        scaled = scenario.at_snr(snr)
        links = draw_link_set(util.child_rng(seed, 'channel', index, trial), scaled, target, overrides)
        rows = []
        for order, method in enumerate(config.methods):
            rng = util.child_rng(seed, method.value, index, trial)
            solution = design(method, scaled, links, rng, config.solver, config.sssvsp)
            row = _sinr_row(method, snr, scaled, links, solution)
            row.update(trial=trial, _key=(order, index, trial))
            rows.append(row)
        return rows

    logger.info('sinr sweep: %d snr points x %d trials x %d methods', len(config.snr_db), config.trials,
                len(config.methods))
    rows = sorted(_fan_out(worker, tasks, threads, progress, 'sinr-sweep'), key=lambda row: row.pop('_key'))
    return RunResult(metadata.SINR_COLUMNS, rows, _meta('sinr-sweep', config, metadata.SINR_COLUMNS))


def run_user_sweep(config: ScenarioConfig, threads: int = 1, progress: bool = False) -> RunResult:
    """Proposed-method sum SINR as the number of single-stream users grows; infeasible counts get marker rows."""
    target = config.target_model()
    seed = config.master_seed
    tasks = []
    rows = []
    for count in config.user_counts:
        scenario = build_scenario(config, user_sweep_users(count))
        verdict = check_feasibility(scenario.n_sc, scenario.users)
        if not verdict:
            logger.warning('%d users skipped: %s', count, verdict.reason)
            rows.extend({'method': Method.PROPOSED.value, 'snr_db': snr, 'users': count, 'trial': None,
                         'sum_sinr': None, 'leakage': None, 'iterations': None, 'converged': None,
                         'status': 'infeasible: %s' % verdict.condition, '_key': (count, index, -1)}
                        for index, snr in enumerate(config.snr_db))
            continue
        tasks.extend((count, scenario, index, snr, trial)
                     for index, snr in enumerate(config.snr_db) for trial in range(config.trials))

    def worker(task) -> Rows:
        count, scenario, index, snr, trial = task
        scaled = scenario.at_snr(snr)
        links = draw_link_set(util.child_rng(seed, 'channel', 'users', count, index, trial), scaled, target)
        rng = util.child_rng(seed, Method.PROPOSED.value, 'users', count, index, trial)
        solution = design(Method.PROPOSED, scaled, links, rng, config.solver, config.sssvsp)
        total, _ = sum_sinr(scaled, links, solution)
        return [{'method': Method.PROPOSED.value, 'snr_db': snr, 'users': count, 'trial': trial,
                 'sum_sinr': total, 'leakage': solution.leakage, 'iterations': solution.iterations,
                 'converged': solution.converged, 'status': 'ok', '_key': (count, index, trial)}]

    rows.extend(_fan_out(worker, tasks, threads, progress, 'user-sweep'))
    rows.sort(key=lambda row: row.pop('_key'))
    return RunResult(metadata.USER_SWEEP_COLUMNS, rows,
                     _meta('user-sweep', config, metadata.USER_SWEEP_COLUMNS))


def run_roc(config: ScenarioConfig, threads: int = 1, progress: bool = False) -> RunResult:
    """ROC points per (method, snr, target model) over the configured false-alarm grid"""
    scenario = build_scenario(config, config.detection_users)
    _require_feasible(scenario)
    seed = config.master_seed
    pulses = config.detector.pulses_k
    tasks = [(method, index, snr, kind) for method in config.detection_methods
             for index, snr in enumerate(config.snr_db) for kind in config.target_models]

    def worker(task) -> Rows:
        method, index, snr, kind = task
        rng = util.child_rng(seed, 'roc', kind.value, index)
        statistics = simulate_statistics(scenario, method, config.detector, snr, config.target_model(kind), rng,
                                         solver_config=config.solver, sssvsp_config=config.sssvsp)
        rows = []
        for pfa in config.pfa_grid:
            pd, threshold = pd_at(statistics, pfa, clamp=True)
            rows.append({'method': method.value, 'snr_db': snr, 'target': kind.value, 'pfa': pfa, 'pd': pd,
                         'k': pulses, 'saturated': threshold.saturated, 'undersampled': threshold.undersampled})
        return rows

    rows = _fan_out(worker, tasks, threads, progress, 'roc')
    return RunResult(metadata.ROC_COLUMNS, rows, _meta('roc', config, metadata.ROC_COLUMNS))


def run_pd_delta(config: ScenarioConfig, threads: int = 1, progress: bool = False) -> RunResult:
    """Pd(proposed) - Pd(sssvsp) per (snr, target, pfa, pulses integrated)"""
    scenario = build_scenario(config, config.detection_users)
    _require_feasible(scenario)
    seed = config.master_seed
    tasks = [(index, snr, kind, k) for index, snr in enumerate(config.snr_db)
             for kind in config.target_models for k in config.pulses_k_values]

    def detect(method: Method, index: int, snr: float, kind: TargetKind, k: int):
        rng = util.child_rng(seed, 'pd-delta', kind.value, index, k)
        return simulate_statistics(scenario, method, config.detector, snr, TargetModel(kind, config.target_mean_power),
                                   rng, solver_config=config.solver, sssvsp_config=config.sssvsp, pulses=k)

    def worker(task) -> Rows:
        index, snr, kind, k = task
        proposed = detect(Method.PROPOSED, index, snr, kind, k)
        baseline = detect(Method.SSSVSP, index, snr, kind, k)
        rows = []
        for pfa in config.pd_delta_pfas:
            pd_proposed, threshold = pd_at(proposed, pfa, clamp=True)
            pd_baseline, baseline_threshold = pd_at(baseline, pfa, clamp=True)
            rows.append({'snr_db': snr, 'target': kind.value, 'pfa': pfa, 'k': k, 'pd_proposed': pd_proposed,
                         'pd_sssvsp': pd_baseline, 'pd_delta': pd_proposed - pd_baseline,
                         'pfa_effective': threshold.pfa,
                         'undersampled': threshold.undersampled or baseline_threshold.undersampled})
        return rows

    rows = _fan_out(worker, tasks, threads, progress, 'pd-delta')
    return RunResult(metadata.PD_DELTA_COLUMNS, rows, _meta('pd-delta', config, metadata.PD_DELTA_COLUMNS))
