""" scenario configuration documents """
import json
import logging
import math
import pathlib
import typing

import pydantic

from coexist_ia import exc, util
from coexist_ia.baselines import SssvspConfig
from coexist_ia.bases import (
    CodingMode,
    EigenMode,
    Membership,
    Method,
    NodeKind,
    NoiseSpec,
    Scenario,
    TargetKind,
    UserSpec,
)
from coexist_ia.channel import TargetModel
from coexist_ia.detection import DetectorConfig
from coexist_ia.multicarrier import CodingMatrix, SelectionMatrix
from coexist_ia.solver import SolverConfig

logger = logging.getLogger(__name__)


class UserConfig(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(extra='forbid', frozen=True)

    id: typing.Optional[str] = None
    kind: NodeKind = NodeKind.COMM
    d: int = pydantic.Field(1, ge=1)
    membership: typing.Optional[Membership] = None
    subcarriers: typing.Optional[typing.List[int]] = None
    m_slots: int = pydantic.Field(1, ge=1)

    @pydantic.model_validator(mode='after')
    def _membership_matches_kind(self):
        if self.membership is None:
            return self
        if (self.kind is NodeKind.RADAR) != (self.membership is Membership.RADAR):
            raise ValueError('kind %s cannot have membership %s' % (self.kind.value, self.membership.value))
        return self

    @property
    def resolved_membership(self) -> Membership:
        if self.membership is not None:
            return self.membership
        return Membership.RADAR if self.kind is NodeKind.RADAR else Membership.RADAR_INTERFERED


class LinkOverride(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(extra='forbid', frozen=True)

    rx: str
    tx: str
    reaches: bool


def _default_users() -> typing.List[UserConfig]:
    # the communication user sharing the radar's site sees no radar interference
    return [
        UserConfig(id='comm0', d=1, membership=Membership.CLEAR),
        UserConfig(id='comm1', d=1),
        UserConfig(id='comm2', d=1),
        UserConfig(id='radar', kind=NodeKind.RADAR, d=3),
    ]


def _detection_users() -> typing.List[UserConfig]:
    return [
        UserConfig(id='comm0', d=1),
        UserConfig(id='radar', kind=NodeKind.RADAR, d=3),
    ]


def _strictly_increasing(values: typing.Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


class ScenarioConfig(pydantic.BaseModel):
    """Everything one experiment run needs; echoed verbatim into every output file."""
    model_config = pydantic.ConfigDict(extra='forbid', frozen=True)

    n_sc: int = pydantic.Field(8, ge=1)
    users: typing.List[UserConfig] = pydantic.Field(default_factory=_default_users)
    detection_users: typing.List[UserConfig] = pydantic.Field(default_factory=_detection_users)
    topology: typing.List[LinkOverride] = pydantic.Field(default_factory=list)
    snr_db: typing.List[float] = pydantic.Field(default_factory=lambda: [0.0, 10.0, 20.0, 30.0, 40.0])
    sigma_s2: float = pydantic.Field(1.0, gt=0)
    sigma_w2: float = pydantic.Field(1.0, gt=0)
    coding: CodingMode = CodingMode.IDENTITY
    target_models: typing.List[TargetKind] = pydantic.Field(default_factory=lambda: [TargetKind.SWERLING_II])
    target_mean_power: float = pydantic.Field(1.0, gt=0)
    trials: int = pydantic.Field(50, ge=1)
    master_seed: int = pydantic.Field(0, ge=0)
    methods: typing.List[Method] = pydantic.Field(
        default_factory=lambda: [Method.PROPOSED, Method.SSSVSP, Method.IDENTITY])
    detection_methods: typing.List[Method] = pydantic.Field(
        default_factory=lambda: [Method.PROPOSED, Method.SSSVSP])
    eigen_mode: typing.Optional[EigenMode] = None
    solver: SolverConfig = pydantic.Field(default_factory=SolverConfig)
    detector: DetectorConfig = pydantic.Field(default_factory=DetectorConfig)
    sssvsp: SssvspConfig = pydantic.Field(default_factory=SssvspConfig)
    pfa_grid: typing.List[float] = pydantic.Field(
        default_factory=lambda: [1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.2, 0.5, 1.0])
    pd_delta_pfas: typing.List[float] = pydantic.Field(default_factory=lambda: [1e-2, 1e-4, 1e-6])
    pulses_k_values: typing.List[pydantic.PositiveInt] = pydantic.Field(default_factory=lambda: [1, 500])
    user_counts: typing.List[int] = pydantic.Field(default_factory=lambda: [2, 3, 4, 5, 6])

    @pydantic.field_validator('snr_db')
    @classmethod
    def _finite_snr(cls, values):
        if not values:
            raise ValueError('snr_db must not be empty')
        if not all(math.isfinite(v) for v in values):
            raise ValueError('snr_db values must be finite')
        return values

    @pydantic.field_validator('users', 'detection_users')
    @classmethod
    def _one_radar(cls, values):
        if not values:
            raise ValueError('at least one user is required')
        if sum(user.kind is NodeKind.RADAR for user in values) > 1:
            raise ValueError('at most one radar user is supported')
        ids = [user.id for user in values if user.id is not None]
        if len(set(ids)) != len(ids):
            raise ValueError('duplicate user ids %r' % ids)
        return values

    @pydantic.field_validator('pfa_grid', 'pd_delta_pfas')
    @classmethod
    def _probabilities(cls, values):
        if not values or not all(0 < v <= 1 for v in values):
            raise ValueError('false-alarm rates must lie in (0, 1]')
        return values

    @pydantic.field_validator('pfa_grid')
    @classmethod
    def _increasing(cls, values):
        if not _strictly_increasing(values):
            raise ValueError('pfa_grid must be strictly increasing')
        return values

    @pydantic.field_validator('user_counts')
    @classmethod
    def _at_least_two(cls, values):
        if not values or min(values) < 2:
            raise ValueError('user_counts entries must be >= 2')
        return values

    @pydantic.field_validator('methods', 'detection_methods', 'target_models')
    @classmethod
    def _non_empty_unique(cls, values):
        if not values or len(set(values)) != len(values):
            raise ValueError('must be a non-empty list without repeats')
        return values

    @pydantic.model_validator(mode='before')
    @classmethod
    def _push_eigen_mode(cls, data):
        # the top-level eigen_mode wins over solver.eigen_mode
        if isinstance(data, dict) and data.get('eigen_mode') is not None:
            solver = data.get('solver') or {}
            if isinstance(solver, SolverConfig):
                solver = solver.model_dump()
            data = dict(data, solver=dict(solver, eigen_mode=data['eigen_mode']))
        return data

    @property
    def topology_overrides(self) -> typing.Dict[typing.Tuple[str, str], bool]:
        return {(item.rx, item.tx): item.reaches for item in self.topology}

    def target_model(self, kind: typing.Optional[TargetKind] = None) -> TargetModel:
        return TargetModel(kind or self.target_models[0], self.target_mean_power)


def _merge(base: dict, overrides: typing.Mapping[str, typing.Any]) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: typing.Optional[typing.Union[str, pathlib.Path]] = None,
                overrides: typing.Optional[typing.Mapping[str, typing.Any]] = None) -> ScenarioConfig:
    """Read a JSON scenario document and apply overrides on top.

    :raises ConfigurationError: unreadable file, malformed JSON or invalid values
    """
    document = {}
    if path is not None:
        try:
            with open(path, encoding='utf-8') as handle:
                document = json.load(handle)
        except OSError as err:
            raise exc.ConfigurationError('cannot read config %s: %s' % (path, err)) from err
        except json.JSONDecodeError as err:
            raise exc.ConfigurationError('config %s is not valid JSON: %s' % (path, err)) from err
        if not isinstance(document, dict):
            raise exc.ConfigurationError('config %s must hold a JSON object' % path)
    document = _merge(document, overrides or {})
    try:
        config = ScenarioConfig.model_validate(document)
    except pydantic.ValidationError as err:
        raise exc.ConfigurationError('invalid config: %s' % err) from err
    logger.debug('loaded config with %d users, seed %d', len(config.users), config.master_seed)
    return config


def _user_ids(users: typing.Sequence[UserConfig]) -> typing.List[str]:
    ids = []
    comm = 0
    for user in users:
        if user.id is not None:
            ids.append(user.id)
        elif user.kind is NodeKind.RADAR:
            ids.append('radar')
        else:
            while 'comm%d' % comm in ids or any(u.id == 'comm%d' % comm for u in users):
                comm += 1
            ids.append('comm%d' % comm)
            comm += 1
    return ids


def build_scenario(config: ScenarioConfig,
                   users: typing.Optional[typing.Sequence[UserConfig]] = None,
                   n_sc: typing.Optional[int] = None) -> Scenario:
    """turn user configs into UserSpecs sharing one noise level"""
    users = list(users if users is not None else config.users)
    n_sc = n_sc or config.n_sc
    specs = []
    for uid, user in zip(_user_ids(users), users):
        coding = None
        if config.coding is CodingMode.ORTHOGONAL:
            coding = CodingMatrix.orthogonal(user.d, util.child_rng(config.master_seed, 'coding', uid)).entries
        selection = None
        if user.subcarriers is not None:
            try:
                selection = SelectionMatrix.from_subcarriers(n_sc, user.subcarriers).entries
            except exc.ConfigurationError as err:
                raise exc.ConfigurationError('user %r: %s' % (uid, err)) from err
        specs.append(UserSpec(uid=uid, kind=user.kind, d=user.d, membership=user.resolved_membership,
                              m_slots=user.m_slots, sigma_s2=config.sigma_s2, coding=coding,
                              selection=selection))
    return Scenario(n_sc=n_sc, users=tuple(specs), noise=NoiseSpec(config.sigma_w2))


def user_sweep_users(count: int) -> typing.List[UserConfig]:
    """one single-stream radar plus ``count - 1`` single-stream communication users"""
    users = [UserConfig(id='comm%d' % i, d=1,
                        membership=Membership.CLEAR if i == 0 else Membership.RADAR_INTERFERED)
             for i in range(count - 1)]
    users.append(UserConfig(id='radar', kind=NodeKind.RADAR, d=1))
    return users
