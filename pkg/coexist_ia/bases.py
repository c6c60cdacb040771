""" base classes and value types shared across modules """
import dataclasses
import enum
import math
import types
import typing

import numpy as np

from coexist_ia import exc, util


class NodeKind(str, enum.Enum):
    RADAR = 'radar'
    COMM = 'comm'


class Membership(str, enum.Enum):
    """Interference class of a receiver."""
    RADAR_INTERFERED = 'A_r'
    CLEAR = 'A_c'
    RADAR = 'B'


class TargetKind(str, enum.Enum):
    NONFLUCTUATING = 'nonfluctuating'
    SWERLING_I = 'swerling1'
    SWERLING_II = 'swerling2'
    SWERLING_III = 'swerling3'
    SWERLING_IV = 'swerling4'

    @property
    def redraws_per_pulse(self) -> bool:
        return self in (TargetKind.SWERLING_II, TargetKind.SWERLING_IV)

    @property
    def redraws_per_interval(self) -> bool:
        return self in (TargetKind.SWERLING_I, TargetKind.SWERLING_III)

    @property
    def chi_square_four(self) -> bool:
        return self in (TargetKind.SWERLING_III, TargetKind.SWERLING_IV)


class EigenMode(str, enum.Enum):
    """Which generalized eigenvectors become the decoder columns."""
    LITERAL_SMALLEST = 'literal'
    MAX_SINR_LARGEST = 'maxsinr'


class Method(str, enum.Enum):
    PROPOSED = 'proposed'
    SSSVSP = 'sssvsp'
    IDENTITY = 'identity'


class CodingMode(str, enum.Enum):
    IDENTITY = 'identity'
    ORTHOGONAL = 'orthogonal'


def frozen_array(values, dtype=complex) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclasses.dataclass(frozen=True, eq=False)
class MatrixValue:
    """Immutable two-dimensional matrix wrapper.

    Subclasses override ``_validate`` to enforce their own invariants and
    ``_dtype`` to choose the element type.
    """
    entries: np.ndarray

    _dtype = complex

    def __post_init__(self):
        entries = frozen_array(self.entries, self._dtype)
        if entries.ndim != 2:
            raise exc.DimensionError(type(self).__name__, '2-d', entries.shape)
        object.__setattr__(self, 'entries', entries)
        self._validate()

    def _validate(self):
        pass

    @property
    def shape(self) -> typing.Tuple[int, int]:
        return self.entries.shape


@dataclasses.dataclass(frozen=True)
class NoiseSpec:
    sigma_w2: float = 1.0

    def __post_init__(self):
        if not self.sigma_w2 > 0:
            raise exc.ConfigurationError('sigma_w2 must be positive, got %r' % self.sigma_w2)


@dataclasses.dataclass(frozen=True, eq=False)
class UserSpec:
    """One transmitter/receiver pair.

    :param uid: identifier used as the key of every per-user map
    :param d: degrees of freedom (streams) of the user
    :param m_slots: radar slots per pulse; scales the radar power trace
    :param coding: N x N_p coding matrix, identity of size ``d`` when omitted
    :param selection: N_sc x N_sc 0/1 activation pattern, all active when omitted
    :param power_scale: linear factor applied on top of the nominal power
    """
    uid: str
    kind: NodeKind
    d: int
    membership: Membership
    m_slots: int = 1
    sigma_s2: float = 1.0
    coding: typing.Optional[np.ndarray] = None
    selection: typing.Optional[np.ndarray] = None
    power_scale: float = 1.0

    def __post_init__(self):
        if self.d < 1:
            raise exc.ConfigurationError('user %r needs d >= 1, got %r' % (self.uid, self.d))
        if self.m_slots < 1:
            raise exc.ConfigurationError('user %r needs m_slots >= 1' % self.uid)
        if (self.kind is NodeKind.RADAR) != (self.membership is Membership.RADAR):
            raise exc.ConfigurationError(
                'user %r: kind %s cannot have membership %s' % (self.uid, self.kind.value, self.membership.value))
        if self.kind is NodeKind.COMM and not self.sigma_s2 > 0:
            raise exc.ConfigurationError('user %r needs sigma_s2 > 0' % self.uid)
        if self.power_scale < 0 or not math.isfinite(self.power_scale):
            raise exc.ConfigurationError('user %r has invalid power scale %r' % (self.uid, self.power_scale))
        coding = np.eye(self.d) if self.coding is None else self.coding
        coding = frozen_array(coding)
        if coding.ndim != 2 or coding.shape[0] != self.d:
            raise exc.DimensionError('coding of %r' % self.uid, (self.d, 'n_p'), coding.shape)
        object.__setattr__(self, 'coding', coding)
        if self.selection is not None:
            object.__setattr__(self, 'selection', frozen_array(self.selection, float))

    @property
    def is_radar(self) -> bool:
        return self.kind is NodeKind.RADAR

    @property
    def coding_trace(self) -> float:
        """Tr(C 1 C^H) for radar, Tr(C C^H) for communication"""
        c = self.coding
        if self.is_radar:
            ones = np.ones((c.shape[1], c.shape[1]))
            return float(np.real(np.trace(c @ ones @ util.hermitian(c))))
        return float(np.real(np.trace(c @ util.hermitian(c))))

    @property
    def kind_factor(self) -> float:
        return float(self.m_slots) if self.is_radar else self.sigma_s2

    @property
    def power_factor(self) -> float:
        """scalar multiplying (Omega o I) P P^H (Omega o I)^H"""
        return self.power_scale * self.kind_factor * self.coding_trace

    @property
    def nominal_power(self) -> float:
        """transmit power with unit-norm precoder columns on active subcarriers"""
        return self.power_factor * self.d

    def selection_diagonal(self, n_sc: int) -> np.ndarray:
        """Omega o I as an N_sc x N_sc matrix"""
        if self.selection is None:
            return np.eye(n_sc)
        if self.selection.shape != (n_sc, n_sc):
            raise exc.DimensionError('selection of %r' % self.uid, (n_sc, n_sc), self.selection.shape)
        return np.diag(np.diag(self.selection))

    def replace(self, **changes) -> 'UserSpec':
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True, eq=False)
class Scenario:
    """Users sharing one set of subcarriers."""
    n_sc: int
    users: typing.Tuple[UserSpec, ...]
    noise: NoiseSpec = NoiseSpec()

    def __post_init__(self):
        object.__setattr__(self, 'users', tuple(self.users))
        if self.n_sc < 1:
            raise exc.ConfigurationError('n_sc must be >= 1, got %r' % self.n_sc)
        if not self.users:
            raise exc.ConfigurationError('a scenario needs at least one user')
        ids = [user.uid for user in self.users]
        if len(set(ids)) != len(ids):
            raise exc.ConfigurationError('duplicate user ids in %r' % ids)
        if sum(user.is_radar for user in self.users) > 1:
            raise exc.ConfigurationError('at most one radar user is supported')
        for user in self.users:
            if user.d > self.n_sc:
                raise exc.ConfigurationError('user %r has d=%d > n_sc=%d' % (user.uid, user.d, self.n_sc))

    @property
    def ids(self) -> typing.Tuple[str, ...]:
        return tuple(user.uid for user in self.users)

    @property
    def radar(self) -> typing.Optional[UserSpec]:
        return next((user for user in self.users if user.is_radar), None)

    @property
    def comm_users(self) -> typing.Tuple[UserSpec, ...]:
        return tuple(user for user in self.users if not user.is_radar)

    def user(self, uid: str) -> UserSpec:
        for user in self.users:
            if user.uid == uid:
                return user
        raise KeyError(uid)

    def at_snr(self, snr_db: float) -> 'Scenario':
        """rescale every user so that its nominal power meets ``snr_db``"""
        target = util.db_to_linear(snr_db) * self.n_sc * self.noise.sigma_w2
        users = []
        for user in self.users:
            base = user.replace(power_scale=1.0).nominal_power
            users.append(user.replace(power_scale=target / base if base > 0 else 0.0))
        return dataclasses.replace(self, users=tuple(users))


@dataclasses.dataclass(frozen=True, eq=False)
class Solution:
    """Precoders P and decoders Q keyed by user id, plus solver diagnostics."""
    precoders: typing.Mapping[str, np.ndarray]
    decoders: typing.Mapping[str, np.ndarray]
    iterations: int = 0
    objective: float = float('nan')
    initial_objective: float = float('nan')
    converged: bool = False
    leakage: float = float('nan')
    rank_ok: typing.Mapping[str, bool] = dataclasses.field(default_factory=dict)
    history: typing.Tuple[float, ...] = ()
    degraded: bool = False

    def __post_init__(self):
        for name in ('precoders', 'decoders'):
            frozen = {uid: frozen_array(m) for uid, m in getattr(self, name).items()}
            object.__setattr__(self, name, types.MappingProxyType(frozen))
        object.__setattr__(self, 'rank_ok', types.MappingProxyType(dict(self.rank_ok)))
        object.__setattr__(self, 'history', tuple(self.history))

    def replace(self, **changes) -> 'Solution':
        return dataclasses.replace(self, **changes)
