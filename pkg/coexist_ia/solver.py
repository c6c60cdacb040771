""" alternating interference-alignment solvers over forward and reciprocal networks """
import logging
import math
import typing

import numpy as np
import pydantic
import scipy.linalg

from coexist_ia import exc, util
from coexist_ia.bases import EigenMode, Scenario, Solution, UserSpec
from coexist_ia.channel import LinkSet
from coexist_ia.feasibility import check_feasibility

logger = logging.getLogger(__name__)

DecoderUpdate = typing.Callable[[Scenario, LinkSet, Solution, str], np.ndarray]

# relative-change denominator floor, keeps near-zero objectives from looking unconverged
OBJECTIVE_FLOOR = 1e-12


class SolverConfig(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(extra='forbid', frozen=True)

    rank_tolerance: float = pydantic.Field(1e-6, gt=0, lt=1)
    objective_tolerance: float = pydantic.Field(1e-5, gt=0)
    max_iters: int = pydantic.Field(500, ge=1)
    eigen_mode: EigenMode = EigenMode.MAX_SINR_LARGEST
    # optional stop once normalized leakage falls to this level
    leakage_tolerance: typing.Optional[float] = pydantic.Field(None, gt=0)


def transmit_power_matrix(user: UserSpec, p: np.ndarray, omega: typing.Optional[np.ndarray] = None) -> np.ndarray:
    """A A^H: power factor times (Omega o I) P P^H (Omega o I)^H

    The power factor is M Tr(C 1 C^H) for radar and sigma_s^2 Tr(C C^H) for
    communication users, scaled by the user's power scale.
    """
    if omega is None:
        omega = user.selection_diagonal(p.shape[0])
    if omega.shape != (p.shape[0], p.shape[0]):
        raise exc.DimensionError('Omega of %r' % user.uid, (p.shape[0], p.shape[0]), omega.shape)
    selected = omega @ p
    return util.hermitian_part(user.power_factor * (selected @ util.hermitian(selected)))


def _received_power(channel_gains: np.ndarray, power: np.ndarray) -> np.ndarray:
    return channel_gains[:, np.newaxis] * power * np.conj(channel_gains)[np.newaxis, :]


def interference_covariance(scenario: Scenario, links: LinkSet, solution: Solution, rx: str,
                            noise: bool = True) -> np.ndarray:
    """D = sum over interferers j of H[rx, j] A_j A_j^H H[rx, j]^H + sigma_w^2 I"""
    n_sc = scenario.n_sc
    covariance = np.zeros((n_sc, n_sc), dtype=complex)
    if noise:
        covariance += scenario.noise.sigma_w2 * np.eye(n_sc)
    for tx in links.interferers(rx):
        power = transmit_power_matrix(scenario.user(tx), solution.precoders[tx])
        covariance += _received_power(links.channel(rx, tx).gains, power)
    return util.hermitian_part(covariance)


def signal_covariance(scenario: Scenario, links: LinkSet, solution: Solution, rx: str) -> np.ndarray:
    power = transmit_power_matrix(scenario.user(rx), solution.precoders[rx])
    return util.hermitian_part(_received_power(links.channel(rx, rx).gains, power))


def select_decoder(signal: np.ndarray, covariance: np.ndarray, d: int, mode: EigenMode) -> np.ndarray:
    """Columns are generalized eigenvectors of (signal, covariance), i.e. of D^-1 S.

    ``MAX_SINR_LARGEST`` keeps the ``d`` dominant ones, ``LITERAL_SMALLEST``
    the ``d`` weakest. Columns are returned with unit norm.
    """
    try:
        _, vectors = scipy.linalg.eigh(signal, covariance)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise exc.NumericError('generalized eigen-decomposition failed', float(np.linalg.cond(covariance))) from err
    if not np.all(np.isfinite(vectors)):
        raise exc.NumericError('non-finite eigenvectors', float(np.linalg.cond(covariance)))
    # eigh sorts eigenvalues ascending
    chosen = vectors[:, :d] if mode is EigenMode.LITERAL_SMALLEST else vectors[:, ::-1][:, :d]
    return util.normalize_columns(chosen)


def update_decoder(scenario: Scenario, links: LinkSet, solution: Solution, rx: str,
                   mode: EigenMode = EigenMode.MAX_SINR_LARGEST) -> np.ndarray:
    """decoder for ``rx`` from D^-1 H A A^H H^H"""
    signal = signal_covariance(scenario, links, solution, rx)
    covariance = interference_covariance(scenario, links, solution, rx)
    return select_decoder(signal, covariance, scenario.user(rx).d, mode)


def min_leakage_decoder(scenario: Scenario, links: LinkSet, solution: Solution, rx: str) -> np.ndarray:
    """d weakest eigenvectors of the noiseless interference covariance"""
    covariance = interference_covariance(scenario, links, solution, rx, noise=False)
    _, vectors = scipy.linalg.eigh(covariance)
    return util.normalize_columns(vectors[:, :scenario.user(rx).d])


def swap_reciprocal(solution: Solution, links: LinkSet) -> typing.Tuple[Solution, LinkSet]:
    """reciprocal network: precoders and decoders trade places, H_bar[j, i] = H[i, j]^H"""
    swapped = solution.replace(precoders=dict(solution.decoders), decoders=dict(solution.precoders))
    return swapped, links.reciprocal()


def leakage(solution: Solution, links: LinkSet) -> float:
    """sum over reaching pairs i != j of ||Q_i^H H[i, j] P_j||_F^2"""
    total = 0.0
    for rx in links.users:
        decoder = util.hermitian(solution.decoders[rx])
        for tx in links.interferers(rx):
            total += np.linalg.norm(decoder @ links.channel(rx, tx).apply(solution.precoders[tx])) ** 2
    return float(total)


def _decoded_power(decoder: np.ndarray, covariance: np.ndarray) -> float:
    return float(np.real(np.trace(util.hermitian(decoder) @ covariance @ decoder)))


def sinr_per_user(scenario: Scenario, links: LinkSet, solution: Solution) -> typing.Dict[str, float]:
    """Tr(Q^H H A A^H H^H Q) / Tr(Q^H D Q) for every user"""
    result = {}
    for user in scenario.users:
        q = solution.decoders[user.uid]
        signal = _decoded_power(q, signal_covariance(scenario, links, solution, user.uid))
        noise = _decoded_power(q, interference_covariance(scenario, links, solution, user.uid))
        result[user.uid] = signal / noise
    return result


def sum_sinr(scenario: Scenario, links: LinkSet, solution: Solution) -> typing.Tuple[float, typing.Dict[str, float]]:
    per_user = sinr_per_user(scenario, links, solution)
    return float(sum(per_user.values())), per_user


def normalized_leakage(scenario: Scenario, links: LinkSet, solution: Solution) -> float:
    """decoded interference power over decoded signal power, summed over users"""
    interference = 0.0
    signal = 0.0
    for user in scenario.users:
        q = solution.decoders[user.uid]
        signal += _decoded_power(q, signal_covariance(scenario, links, solution, user.uid))
        interference += _decoded_power(q, interference_covariance(scenario, links, solution, user.uid, noise=False))
    if signal <= 0:
        return float('inf') if interference > 0 else 0.0
    return interference / signal


def rank_flags(scenario: Scenario, links: LinkSet, solution: Solution, tolerance: float) -> typing.Dict[str, bool]:
    """whether rank(Q_i^H H[i, i] P_i) == d_i for every user"""
    flags = {}
    for user in scenario.users:
        effective = util.hermitian(solution.decoders[user.uid]) @ links.channel(user.uid, user.uid).apply(
            solution.precoders[user.uid])
        flags[user.uid] = util.numerical_rank(effective, tolerance) == user.d
    return flags


def initialize_solution(scenario: Scenario, rng: np.random.Generator) -> Solution:
    """independent orthonormal precoders and decoders for every user"""
    precoders = {}
    decoders = {}
    for user in scenario.users:
        precoders[user.uid] = util.random_orthonormal(rng, scenario.n_sc, user.d)
        decoders[user.uid] = util.random_orthonormal(rng, scenario.n_sc, user.d)
    return Solution(precoders=precoders, decoders=decoders)


def _sweep(scenario: Scenario, links: LinkSet, solution: Solution, update: DecoderUpdate) -> Solution:
    decoders = {user.uid: update(scenario, links, solution, user.uid) for user in scenario.users}
    return solution.replace(decoders=decoders)


def _relative_change(old: float, new: float) -> float:
    return abs(new - old) / max(abs(old), OBJECTIVE_FLOOR)


def _leakage_settled(scenario: Scenario, links: LinkSet, solution: Solution, config: SolverConfig) -> bool:
    if config.leakage_tolerance is None:
        return False
    return normalized_leakage(scenario, links, solution) <= config.leakage_tolerance


def _alternate(scenario: Scenario,
               links: LinkSet,
               config: SolverConfig,
               rng: np.random.Generator,
               update: DecoderUpdate,
               objective: typing.Callable[[Solution], float]) -> Solution:
    verdict = check_feasibility(scenario.n_sc, scenario.users)
    if not verdict:
        raise exc.InfeasibleError(verdict)

    solution = initialize_solution(scenario, rng)
    reverse_links = links.reciprocal()
    initial = current = objective(solution)
    history = [initial]
    converged = False
    flags = {}
    iteration = 0
    for iteration in range(1, config.max_iters + 1):
        solution = _sweep(scenario, links, solution, update)
        reciprocal, _ = swap_reciprocal(solution, links)
        reciprocal = _sweep(scenario, reverse_links, reciprocal, update)
        solution, _ = swap_reciprocal(reciprocal, reverse_links)

        flags = rank_flags(scenario, links, solution, config.rank_tolerance)
        value = objective(solution)
        if not math.isfinite(value):
            raise exc.NumericError('objective became %r at iteration %d' % (value, iteration))
        change = _relative_change(current, value)
        current = value
        history.append(value)
        logger.debug('iteration %d objective %.6g change %.3g', iteration, value, change)
        settled = change < config.objective_tolerance or _leakage_settled(scenario, links, solution, config)
        if settled and all(flags.values()):
            converged = True
            break

    if not converged:
        logger.info('stopped after %d iterations without converging (objective %.6g)', iteration, current)
    return solution.replace(iterations=iteration, objective=current, initial_objective=initial,
                            converged=converged, leakage=leakage(solution, links),
                            rank_ok=flags, history=history)


def solve_max_sinr(scenario: Scenario, links: LinkSet, config: typing.Optional[SolverConfig] = None,
                   rng: typing.Optional[np.random.Generator] = None) -> Solution:
    """Alternate decoder updates on the forward and reciprocal networks.

    Stops when the relative change of the sum SINR drops below the objective
    tolerance and every user keeps full rank, or after ``max_iters`` sweeps.
    At 20 dB and above the sum SINR keeps creeping up by about 1e-4 per sweep
    long after the interference is aligned, so such solves usually run all
    ``max_iters`` sweeps and report ``converged=False``. Setting
    ``leakage_tolerance`` also accepts any sweep whose normalized leakage is
    at or below it.

    :raises InfeasibleError: before any iteration when the dofs cannot be aligned
    :raises NumericError: when a decomposition fails
    """
    config = config or SolverConfig()
    rng = rng if rng is not None else np.random.default_rng()
    mode = config.eigen_mode

    def update(scn, lnk, sol, rx):
        return update_decoder(scn, lnk, sol, rx, mode)

    return _alternate(scenario, links, config, rng, update, lambda sol: sum_sinr(scenario, links, sol)[0])


def solve_min_leakage(scenario: Scenario, links: LinkSet, config: typing.Optional[SolverConfig] = None,
                      rng: typing.Optional[np.random.Generator] = None) -> Solution:
    """same alternation, but every decoder minimizes the interference it collects"""
    config = config or SolverConfig()
    rng = rng if rng is not None else np.random.default_rng()
    return _alternate(scenario, links, config, rng, min_leakage_decoder, lambda sol: leakage(sol, links))


def compare_eigen_modes(scenario: Scenario, links: LinkSet, config: SolverConfig,
                        seed: int) -> typing.Dict[EigenMode, float]:
    """solve once per eigenvector rule from identical initial draws and report the sum SINR"""
    outcome = {}
    for mode in EigenMode:
        solution = solve_max_sinr(scenario, links, config.model_copy(update={'eigen_mode': mode}),
                                  util.child_rng(seed, 'eigen-mode'))
        outcome[mode] = solution.objective
        logger.info('eigen mode %s: sum sinr %.6g after %d iterations', mode.value, solution.objective,
                    solution.iterations)
    return outcome
