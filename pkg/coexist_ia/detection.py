""" square-law radar detection with empirically calibrated thresholds """
import dataclasses
import logging
import math
import typing
import warnings

import numpy as np
import pydantic
import scipy.linalg

from coexist_ia import exc, util
from coexist_ia.baselines import design, SssvspConfig
from coexist_ia.bases import Method, NodeKind, Scenario, Solution, TargetKind, UserSpec
from coexist_ia.channel import draw_link_set, draw_target_responses, LinkSet, receive, TargetModel
from coexist_ia.multicarrier import (
    assemble_transmit_block,
    build_modulation_matrix,
    CarrierGrid,
    CodingMatrix,
    DataMatrix,
    make_data,
    ModulationMatrix,
    Precoder,
    SelectionMatrix,
    TransmitBlock,
)
from coexist_ia.solver import interference_covariance, SolverConfig

logger = logging.getLogger(__name__)

# upper bound on complex samples held per simulation chunk
CHUNK_SAMPLES = 2_000_000

# null-sample exceedances a calibrated false-alarm point needs before its pd is trusted
MIN_EXCEEDANCES = 50


class DetectorConfig(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(extra='forbid', frozen=True)

    pfa_target: float = pydantic.Field(1e-2, gt=0, le=1)
    pulses_k: int = pydantic.Field(500, ge=1)
    h0_calibration_trials: int = pydantic.Field(10000, ge=1)
    h1_trials: int = pydantic.Field(2000, ge=1)
    channel_draws: int = pydantic.Field(10, ge=1)
    coherent_interval: typing.Optional[int] = pydantic.Field(None, ge=1)

    @pydantic.model_validator(mode='after')
    def _enough_calibration(self):
        if self.pfa_target * self.h0_calibration_trials < MIN_EXCEEDANCES:
            raise ValueError('pfa_target * h0_calibration_trials must be >= %d, got %g'
                             % (MIN_EXCEEDANCES, self.pfa_target * self.h0_calibration_trials))
        return self

    @property
    def interval(self) -> int:
        return self.coherent_interval or self.pulses_k


class Threshold(typing.NamedTuple):
    """``saturated`` thresholds were clamped to the largest null sample;
    ``undersampled`` ones rest on fewer than ``MIN_EXCEEDANCES`` null exceedances.
    """
    value: float
    pfa: float
    saturated: bool = False
    undersampled: bool = False


@dataclasses.dataclass(frozen=True, eq=False)
class RocCurve:
    """(pfa, pd) points with strictly increasing pfa."""
    points: typing.Tuple[typing.Tuple[float, float], ...]
    metadata: typing.Mapping[str, typing.Any] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        points = tuple((float(pfa), float(pd)) for pfa, pd in self.points)
        pfas = [pfa for pfa, _ in points]
        if any(b <= a for a, b in zip(pfas, pfas[1:])):
            raise exc.ConfigurationError('roc false-alarm grid must be strictly increasing: %r' % pfas)
        object.__setattr__(self, 'points', points)

    @property
    def pfa(self) -> np.ndarray:
        return np.array([pfa for pfa, _ in self.points])

    @property
    def pd(self) -> np.ndarray:
        return np.array([pd for _, pd in self.points])


@dataclasses.dataclass(frozen=True, eq=False)
class DetectionStatistics:
    h0: np.ndarray
    h1: np.ndarray


def _cholesky(whitener: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cholesky(util.hermitian_part(whitener), lower=True)
    except np.linalg.LinAlgError as err:
        raise exc.NumericError('whitener is not positive definite', float(np.linalg.cond(whitener))) from err


def whitened_energy(observations: np.ndarray, whitener: np.ndarray) -> np.ndarray:
    """sum over observations of y^H D^-1 y, for a (trials, observations, d) batch"""
    lower = _cholesky(whitener)
    trials, count, d = observations.shape
    if lower.shape != (d, d):
        raise exc.DimensionError('whitener', (d, d), lower.shape)
    flat = observations.reshape(trials * count, d).T
    white = scipy.linalg.solve_triangular(lower, flat, lower=True)
    return np.sum(np.abs(white) ** 2, axis=0).reshape(trials, count).sum(axis=1)


def test_statistic(decoded_pulses: np.ndarray, whitener: np.ndarray) -> float:
    """sum_k ||D^-1/2 y_k||^2 over the rows of ``decoded_pulses``"""
    pulses = np.atleast_2d(np.asarray(decoded_pulses, dtype=complex))
    return float(whitened_energy(pulses[np.newaxis], np.atleast_2d(whitener))[0])


def calibrate_threshold(h0_samples: np.ndarray, pfa: float, clamp: bool = False) -> Threshold:
    """Empirical (1 - pfa) quantile of the null statistic.

    Decisions are ``statistic > threshold``; ``pfa == 1`` gives ``-inf``.
    With fewer than ``1 / pfa`` samples the call raises unless ``clamp`` is
    set, in which case the largest sample is returned and flagged saturated.
    Quantiles backed by fewer than ``MIN_EXCEEDANCES`` exceedances are
    returned but flagged undersampled.
    """
    samples = np.asarray(h0_samples, dtype=float)
    if not 0 < pfa <= 1:
        raise exc.ConfigurationError('pfa must lie in (0, 1], got %r' % pfa)
    if samples.size == 0:
        raise exc.InsufficientSamplesError('no null-hypothesis samples')
    if pfa >= 1:
        return Threshold(-math.inf, 1.0)
    if pfa * samples.size < 1:
        if not clamp:
            raise exc.InsufficientSamplesError(
                'pfa=%g needs at least %d null samples, got %d' % (pfa, math.ceil(1 / pfa), samples.size))
        return Threshold(float(samples.max()), 1.0 / samples.size, saturated=True, undersampled=True)
    return Threshold(float(np.quantile(samples, 1.0 - pfa)), pfa,
                     undersampled=pfa * samples.size < MIN_EXCEEDANCES)


def detection_rate(samples: np.ndarray, threshold: Threshold) -> float:
    return float(np.mean(np.asarray(samples) > threshold.value))


def _selection(user: UserSpec, n_sc: int) -> SelectionMatrix:
    if user.selection is None:
        return SelectionMatrix.all_active(n_sc)
    return SelectionMatrix(user.selection)


def _transmit_block(user: UserSpec, solution: Solution, b: ModulationMatrix, data: DataMatrix) -> TransmitBlock:
    return assemble_transmit_block(_selection(user, b.shape[0]), b, Precoder(solution.precoders[user.uid]),
                                   CodingMatrix(user.coding), data)


def _chunks(total: int, size: int) -> typing.Iterator[int]:
    while total > 0:
        step = min(size, total)
        yield step
        total -= step


class _RadarReceiver:
    """Radar receiver for one designed channel draw.

    Interfering blocks go through ``receive`` on every subcarrier and are
    decoded by Q^H afterwards; the echo rides on per-pulse target responses.
    """

    def __init__(self, scenario: Scenario, links: LinkSet, solution: Solution):
        self.scenario = scenario
        self.links = links
        self.solution = solution
        self.radar = scenario.radar
        self.q = solution.decoders[self.radar.uid]
        self.whitener = util.hermitian(self.q) @ interference_covariance(scenario, links, solution,
                                                                         self.radar.uid) @ self.q
        self.modulation = build_modulation_matrix(CarrierGrid.ofdm_grid(scenario.n_sc))
        self.interferers = [scenario.user(tx) for tx in links.interferers(self.radar.uid)]
        ones = make_data(NodeKind.RADAR, self.radar.coding.shape[1], self.radar.m_slots, 1.0)
        pulse = _transmit_block(self.radar, solution, self.modulation, ones)
        self.echo = math.sqrt(self.radar.power_scale) * pulse.selected

    def _interference(self, rng: np.random.Generator, columns: int) -> typing.Dict[str, TransmitBlock]:
        blocks = {}
        for user in self.interferers:
            if user.power_factor <= 0:
                continue
            # data carries the power transmit_power_matrix assigns; exact when C C^H = I
            data = make_data(NodeKind.COMM, user.coding.shape[1], columns, math.sqrt(user.power_factor), rng)
            blocks[user.uid] = _transmit_block(user, self.solution, self.modulation, data)
        return blocks

    def observe(self, rng: np.random.Generator, trials: int, pulses: int,
                target: typing.Optional[np.ndarray]) -> np.ndarray:
        """(trials, pulses * m_slots, d) decoded observations"""
        count = pulses * self.radar.m_slots
        columns = trials * count
        d = self.q.shape[1]
        blocks = self._interference(rng, columns)
        if blocks:
            received = receive(blocks, self.links, self.radar.uid, self.scenario.noise, rng)
        else:
            received = util.complex_normal(rng, (self.scenario.n_sc, columns), self.scenario.noise.sigma_w2)
        observed = (util.hermitian(self.q) @ received).T.reshape(trials, count, d)
        if target is not None:
            echo = np.einsum('nd,tpn,nm->tpmd', np.conj(self.q), target, self.echo)
            observed = observed + echo.reshape(trials, count, d)
        return observed


def simulate_statistics(scenario: Scenario,
                        method: Method,
                        config: DetectorConfig,
                        snr_db: float,
                        target: typing.Optional[TargetModel],
                        rng: np.random.Generator,
                        solver_config: typing.Optional[SolverConfig] = None,
                        sssvsp_config: typing.Optional[SssvspConfig] = None,
                        pulses: typing.Optional[int] = None) -> DetectionStatistics:
    """Null and alternative statistics with every interfering transmitter active.

    The design is refreshed for each of ``channel_draws`` channel draws from
    that draw's target response; trials within a draw see fresh target
    fluctuation, communication data and noise. ``target=None`` removes the
    echo from the alternative hypothesis.
    """
    if scenario.radar is None:
        raise exc.ConfigurationError('detection needs a radar user')
    pulses = pulses or config.pulses_k
    interval = config.coherent_interval or pulses
    scaled = scenario.at_snr(snr_db)
    design_target = target or TargetModel(TargetKind.SWERLING_II)
    draws = config.channel_draws
    per_h0 = -(-config.h0_calibration_trials // draws)
    per_h1 = -(-config.h1_trials // draws)
    chunk = max(1, CHUNK_SAMPLES // (pulses * scaled.radar.m_slots * scaled.n_sc))

    h0, h1 = [], []
    for draw_rng in rng.spawn(draws):
        links = draw_link_set(draw_rng, scaled, design_target)
        solution = design(method, scaled, links, draw_rng, solver_config, sssvsp_config)
        receiver = _RadarReceiver(scaled, links, solution)
        for step in _chunks(per_h0, chunk):
            h0.append(whitened_energy(receiver.observe(draw_rng, step, pulses, None), receiver.whitener))
        for step in _chunks(per_h1, chunk):
            echo = None
            if target is not None:
                echo = draw_target_responses(draw_rng, target, scaled.n_sc, step, pulses, interval)
            h1.append(whitened_energy(receiver.observe(draw_rng, step, pulses, echo), receiver.whitener))
    logger.debug('simulated %s at %.1f dB: %d null and %d target trials', Method(method).value, snr_db,
                 config.h0_calibration_trials, config.h1_trials)
    return DetectionStatistics(h0=np.concatenate(h0)[:config.h0_calibration_trials],
                               h1=np.concatenate(h1)[:config.h1_trials])


def pd_at(statistics: DetectionStatistics, pfa: float, clamp: bool = False) -> typing.Tuple[float, Threshold]:
    threshold = calibrate_threshold(statistics.h0, pfa, clamp=clamp)
    if threshold.undersampled:
        if threshold.saturated:
            message = 'pfa=%g is below 1/%d null samples; clamped to %g' % (pfa, statistics.h0.size, threshold.pfa)
        else:
            message = 'pfa=%g leaves %.3g null exceedances in %d samples, fewer than %d' % (
                pfa, pfa * statistics.h0.size, statistics.h0.size, MIN_EXCEEDANCES)
        warnings.warn(message, exc.UndersampledWarning)
        logger.warning(message)
    return detection_rate(statistics.h1, threshold), threshold


def estimate_pd(scenario: Scenario,
                method: Method,
                config: DetectorConfig,
                snr_db: float,
                target: typing.Optional[TargetModel],
                rng: np.random.Generator,
                **kwargs) -> float:
    """Monte-Carlo detection probability at the configured false-alarm target"""
    statistics = simulate_statistics(scenario, method, config, snr_db, target, rng, **kwargs)
    return pd_at(statistics, config.pfa_target)[0]


def roc(scenario: Scenario,
        method: Method,
        config: DetectorConfig,
        snr_db: float,
        target: typing.Optional[TargetModel],
        pfa_grid: typing.Sequence[float],
        rng: np.random.Generator,
        clamp: bool = False,
        **kwargs) -> RocCurve:
    """detection probability over ``pfa_grid``, every point sharing one set of null samples"""
    statistics = simulate_statistics(scenario, method, config, snr_db, target, rng, **kwargs)
    points = [(pfa, pd_at(statistics, pfa, clamp)[0]) for pfa in pfa_grid]
    return RocCurve(points, metadata={'method': Method(method).value, 'snr_db': snr_db,
                                      'target': target.kind.value if target else None})
