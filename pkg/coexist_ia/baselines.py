""" reference strategies: small-singular-value space projection and identity precoding """
import dataclasses
import logging
import typing
import warnings

import numpy as np
import pydantic
import scipy.linalg

from coexist_ia import exc, util
from coexist_ia.bases import Method, Scenario, Solution, UserSpec
from coexist_ia.channel import DiagonalChannel, LinkSet
from coexist_ia.multicarrier import Precoder
from coexist_ia.solver import leakage, SolverConfig, solve_max_sinr, sum_sinr

logger = logging.getLogger(__name__)

# singular values this far below the largest count as an exact nullspace
NULLSPACE_TOLERANCE = 1e-12


class SssvspConfig(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(extra='forbid', frozen=True)

    sv_threshold: float = pydantic.Field(1.0, ge=0)
    target_dofs: typing.Optional[int] = pydantic.Field(None, ge=1)


@dataclasses.dataclass(frozen=True, eq=False)
class Projection:
    """Radar precoder spanning the weakest right-singular directions of the stacked radar-to-comm channels."""
    precoder: Precoder
    singular_values: np.ndarray
    qualifying: int
    padded: bool
    degraded: bool

    def residual(self, links: typing.Sequence[DiagonalChannel]) -> float:
        """||H_stacked P||_F^2"""
        stacked = np.vstack([link.matrix for link in links])
        return float(np.linalg.norm(stacked @ self.precoder.entries) ** 2)


def sssvsp_precoder(radar_to_comm: typing.Sequence[DiagonalChannel],
                    config: typing.Optional[SssvspConfig] = None,
                    d: typing.Optional[int] = None) -> Projection:
    """Project the radar onto right-singular directions with singular value below the threshold.

    The qualifying basis is ordered weakest first and truncated or padded
    with the next weakest directions to ``d`` columns. When nothing
    qualifies the basis still starts from the single weakest direction and
    the result is flagged degraded.
    """
    config = config or SssvspConfig()
    if not radar_to_comm:
        raise exc.ConfigurationError('projection needs at least one radar-to-communication link')
    stacked = np.vstack([link.matrix for link in radar_to_comm])
    n_sc = stacked.shape[1]
    d = d or config.target_dofs or 1
    if d > n_sc:
        raise exc.ConfigurationError('cannot project %d streams onto %d subcarriers' % (d, n_sc))

    _, singular, vh = scipy.linalg.svd(stacked, full_matrices=True)
    # pad with zeros so every right-singular vector has a singular value
    singular = np.concatenate([singular, np.zeros(n_sc - singular.shape[0])])
    order = np.argsort(singular, kind='stable')
    largest = singular.max()
    qualifies = (singular < config.sv_threshold) | (singular <= NULLSPACE_TOLERANCE * max(largest, 1.0))
    qualifying = int(np.sum(qualifies))
    degraded = qualifying == 0
    if degraded:
        warnings.warn('no singular value below %.3g; falling back to the weakest direction' % config.sv_threshold,
                      exc.DegradedProjectionWarning)
    chosen = order[:d]
    basis = util.hermitian(vh)[:, chosen]
    return Projection(precoder=Precoder.normalized(basis), singular_values=singular[chosen],
                      qualifying=qualifying, padded=0 < qualifying < d, degraded=degraded)


def matched_decoder(channel: DiagonalChannel, precoder: np.ndarray) -> np.ndarray:
    """unit-norm columns of H P"""
    return util.normalize_columns(channel.apply(precoder))


def identity_precoder(n_sc: int, d: int) -> np.ndarray:
    return np.eye(n_sc, d, dtype=complex)


def identity_baseline(n_sc: int, users: typing.Sequence[UserSpec]) -> Solution:
    """P = Q = first d columns of the identity for every user"""
    columns = {user.uid: identity_precoder(n_sc, user.d) for user in users}
    return Solution(precoders=columns, decoders=dict(columns))


def sssvsp_solution(scenario: Scenario, links: LinkSet, config: typing.Optional[SssvspConfig] = None) -> Solution:
    """Radar projected away from the communication users it reaches; everyone else identity-precoded.

    Every decoder is matched to its own precoded channel.
    """
    radar = scenario.radar
    if radar is None:
        raise exc.ConfigurationError('the projection baseline needs a radar user')
    precoders = {user.uid: identity_precoder(scenario.n_sc, user.d) for user in scenario.comm_users}
    reached = [links.channel(rx, radar.uid) for rx in scenario.ids if rx != radar.uid and links.reaches(rx, radar.uid)]
    degraded = False
    if reached:
        projection = sssvsp_precoder(reached, config, d=radar.d)
        precoders[radar.uid] = projection.precoder.entries
        degraded = projection.degraded
    else:
        logger.info('radar reaches no communication receiver; keeping the identity precoder')
        precoders[radar.uid] = identity_precoder(scenario.n_sc, radar.d)
    decoders = {uid: matched_decoder(links.channel(uid, uid), p) for uid, p in precoders.items()}
    return Solution(precoders=precoders, decoders=decoders, degraded=degraded)


def evaluate(scenario: Scenario, links: LinkSet, solution: Solution) -> Solution:
    """attach the sum sinr and leakage of a closed-form solution"""
    objective, _ = sum_sinr(scenario, links, solution)
    return solution.replace(objective=objective, initial_objective=objective, converged=True,
                            leakage=leakage(solution, links))


def design(method: Method,
           scenario: Scenario,
           links: LinkSet,
           rng: np.random.Generator,
           solver_config: typing.Optional[SolverConfig] = None,
           sssvsp_config: typing.Optional[SssvspConfig] = None) -> Solution:
    """precoders and decoders for ``method``"""
    method = Method(method)
    if method is Method.PROPOSED:
        return solve_max_sinr(scenario, links, solver_config, rng)
    if method is Method.SSSVSP:
        return evaluate(scenario, links, sssvsp_solution(scenario, links, sssvsp_config))
    return evaluate(scenario, links, identity_baseline(scenario.n_sc, scenario.users))
