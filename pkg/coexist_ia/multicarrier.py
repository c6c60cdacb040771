""" multicarrier transmit-block assembly and time-domain synthesis """
import dataclasses
import logging
import typing

import numpy as np
import scipy.linalg

from coexist_ia import exc, util
from coexist_ia.bases import frozen_array, MatrixValue, NodeKind

logger = logging.getLogger(__name__)

OFDM_TOLERANCE = 1e-12


@dataclasses.dataclass(frozen=True)
class CarrierGrid:
    """Subcarrier layout shared by every user.

    ``a`` is the radar pulse-repetition factor, T_p = a * T_c.
    """
    n_sc: int
    delta_f: float
    t_c: float
    m_slots: int = 1
    a: float = 1.0
    f_c: float = 0.0
    ofdm: bool = True

    def __post_init__(self):
        if self.n_sc < 1 or self.m_slots < 1:
            raise exc.ConfigurationError('grid needs n_sc >= 1 and m_slots >= 1')
        if not (self.delta_f > 0 and self.t_c > 0):
            raise exc.ConfigurationError('grid needs positive delta_f and t_c')
        if self.a < 1:
            raise exc.ConfigurationError('pulse-repetition factor must be >= 1, got %r' % self.a)
        if self.ofdm and abs(self.t_c * self.delta_f - 1.0) > OFDM_TOLERANCE:
            raise exc.ConfigurationError(
                'ofdm grid requires t_c * delta_f == 1, got %.15g' % (self.t_c * self.delta_f))

    @classmethod
    def ofdm_grid(cls, n_sc: int, delta_f: float = 15e3, **kwargs) -> 'CarrierGrid':
        return cls(n_sc=n_sc, delta_f=delta_f, t_c=1.0 / delta_f, ofdm=True, **kwargs)

    @property
    def sample_period(self) -> float:
        return self.t_c / self.n_sc


class SelectionMatrix(MatrixValue):
    """0/1 activation pattern Omega."""
    _dtype = float

    def _validate(self):
        rows, cols = self.shape
        if rows != cols:
            raise exc.DimensionError('Omega', (rows, rows), self.shape)
        if not np.all((self.entries == 0) | (self.entries == 1)):
            raise exc.ConfigurationError('selection entries must be 0 or 1')

    @classmethod
    def all_active(cls, n_sc: int) -> 'SelectionMatrix':
        return cls(np.ones((n_sc, n_sc)))

    @classmethod
    def from_subcarriers(cls, n_sc: int, active: typing.Iterable[int]) -> 'SelectionMatrix':
        """column mask: carrier n is active iff column n is all ones"""
        mask = np.zeros((n_sc, n_sc))
        for carrier in active:
            if not 0 <= carrier < n_sc:
                raise exc.ConfigurationError('subcarrier %r outside [0, %d)' % (carrier, n_sc))
            mask[:, carrier] = 1.0
        return cls(mask)

    def as_diagonal(self) -> np.ndarray:
        """Omega o I"""
        return np.diag(np.diag(self.entries))


@dataclasses.dataclass(frozen=True, eq=False)
class ModulationMatrix(MatrixValue):
    """Vandermonde modulation matrix B; unitary when built for an OFDM grid."""
    ofdm: bool = False

    def unitarity_error(self) -> float:
        b = self.entries
        return float(np.linalg.norm(util.hermitian(b) @ b - np.eye(b.shape[1])))

    def demodulation(self) -> np.ndarray:
        """B-double-dot with B-double-dot B = I"""
        if self.ofdm:
            return util.hermitian(self.entries)
        try:
            return np.linalg.inv(self.entries)
        except np.linalg.LinAlgError as err:
            raise exc.NumericError('modulation matrix is singular', float(np.linalg.cond(self.entries))) from err


class Precoder(MatrixValue):

    def _validate(self):
        rows, cols = self.shape
        if cols > rows:
            raise exc.DimensionError('P', (rows, '<= %d' % rows), self.shape)
        norms = np.linalg.norm(self.entries, axis=0)
        if not np.allclose(norms, 1.0, atol=1e-9):
            raise exc.ConfigurationError('precoder columns must have unit norm, got %r' % norms)

    @classmethod
    def normalized(cls, values) -> 'Precoder':
        return cls(util.normalize_columns(np.asarray(values, dtype=complex)))

    @property
    def n_streams(self) -> int:
        return self.shape[1]


class CodingMatrix(MatrixValue):

    @classmethod
    def identity(cls, n: int) -> 'CodingMatrix':
        return cls(np.eye(n))

    @classmethod
    def orthogonal(cls, n: int, rng: np.random.Generator) -> 'CodingMatrix':
        """haar-random unitary so that C C^H = I"""
        return cls(util.random_orthonormal(rng, n, n))


@dataclasses.dataclass(frozen=True, eq=False)
class DataMatrix(MatrixValue):
    kind: NodeKind = NodeKind.COMM

    def _validate(self):
        if self.kind is NodeKind.RADAR and not np.all(self.entries == 1):
            raise exc.ConfigurationError('radar data must be all ones')


@dataclasses.dataclass(frozen=True, eq=False)
class TransmitBlock(MatrixValue):
    """Time-domain block (Omega o B) P C S with its subcarrier image (Omega o I) P C S."""
    selected: typing.Optional[np.ndarray] = None

    def __post_init__(self):
        super().__post_init__()
        if self.selected is not None:
            object.__setattr__(self, 'selected', frozen_array(self.selected))


@dataclasses.dataclass(frozen=True, eq=False)
class TimeDomainSignal:
    """Real samples 2 Re{envelope} plus the complex envelope they came from."""
    grid: CarrierGrid
    kind: NodeKind
    envelope: np.ndarray
    samples: np.ndarray
    slot_offsets: np.ndarray


def build_modulation_matrix(grid: CarrierGrid) -> ModulationMatrix:
    """B[k, n] = beta ** (k n) with beta = exp(j 2 pi delta_f t_c / n_sc); scaled by 1/sqrt(n_sc) for ofdm"""
    n = grid.n_sc
    if grid.ofdm:
        # beta ** n == 1 here, so B is the unitary inverse DFT
        return ModulationMatrix(np.conj(scipy.linalg.dft(n, scale='sqrtn')), ofdm=True)
    beta = np.exp(2j * np.pi * grid.delta_f * grid.t_c / n)
    return ModulationMatrix(np.vander(beta ** np.arange(n), n, increasing=True), ofdm=False)


def _check(name: str, actual, expected):
    if tuple(actual) != tuple(expected):
        raise exc.DimensionError(name, tuple(expected), tuple(actual))


def assemble_transmit_block(omega: SelectionMatrix,
                            b: ModulationMatrix,
                            p: Precoder,
                            c: CodingMatrix,
                            s: DataMatrix) -> TransmitBlock:
    """Y_T = (Omega o B) P C S, no hidden scaling"""
    n_sc = b.shape[0]
    _check('B', b.shape, (n_sc, n_sc))
    _check('Omega', omega.shape, (n_sc, n_sc))
    _check('P', p.shape[:1], (n_sc,))
    _check('C', c.shape[:1], (p.shape[1],))
    _check('S', s.shape[:1], (c.shape[1],))
    pcs = p.entries @ c.entries @ s.entries
    return TransmitBlock((omega.entries * b.entries) @ pcs, selected=omega.as_diagonal() @ pcs)


def synthesize_time_domain(grid: CarrierGrid, weights: np.ndarray, kind: NodeKind) -> TimeDomainSignal:
    """Sample 2 Re{sum_x w[x, m] exp(j 2 pi (f_c + x delta_f) t)} at rate n_sc * delta_f.

    Slot ``m`` of a communication block starts at ``m * t_c``; radar slots start
    at ``m * a * t_c`` and leave the rest of each pulse period silent.
    """
    weights = np.asarray(weights, dtype=complex)
    _check('weights', weights.shape, (grid.n_sc, grid.m_slots))
    n = grid.n_sc
    if kind is NodeKind.RADAR:
        if not float(grid.a).is_integer():
            raise exc.ConfigurationError(
                'radar synthesis needs an integer pulse-repetition factor, got a=%r' % grid.a)
        stride = int(grid.a) * n
    else:
        stride = n
    offsets = np.arange(grid.m_slots) * stride
    index = offsets[np.newaxis, :] + np.arange(n)[:, np.newaxis]
    t = index * grid.sample_period
    carriers = np.arange(n) * grid.delta_f
    # phase[k, x, m] for sample k of slot m on carrier x
    phase = np.exp(2j * np.pi * carriers[np.newaxis, :, np.newaxis] * t[:, np.newaxis, :])
    local = np.einsum('kxm,xm->km', phase, weights) * np.exp(2j * np.pi * grid.f_c * t)

    length = int(offsets[-1]) + stride
    envelope = np.zeros(length, dtype=complex)
    envelope[index.ravel(order='F')] = local.ravel(order='F')
    logger.debug('synthesized %s block: %d samples over %d slots', kind.value, length, grid.m_slots)
    return TimeDomainSignal(grid=grid, kind=kind, envelope=envelope,
                            samples=2.0 * envelope.real, slot_offsets=offsets)


def sample_matrix(signal: TimeDomainSignal) -> np.ndarray:
    """N_sc x M matrix of envelope samples per slot (column-major sample index), ofdm-normalized"""
    n = signal.grid.n_sc
    index = signal.slot_offsets[np.newaxis, :] + np.arange(n)[:, np.newaxis]
    scale = 1.0 / np.sqrt(n) if signal.grid.ofdm else 1.0
    return signal.envelope[index] * scale


def demodulate(signal: TimeDomainSignal, b: ModulationMatrix) -> np.ndarray:
    """recover the per-subcarrier coefficients of every slot"""
    return b.demodulation() @ sample_matrix(signal)


def make_data(kind: NodeKind, n_p: int, m: int, sigma_s: float,
              rng: typing.Optional[np.random.Generator] = None) -> DataMatrix:
    """all ones for radar; i.i.d. CN(0, sigma_s ** 2) for communication"""
    if kind is NodeKind.RADAR:
        return DataMatrix(np.ones((n_p, m)), kind=kind)
    if not sigma_s > 0:
        raise exc.ConfigurationError('communication data needs sigma_s > 0, got %r' % sigma_s)
    assert rng is not None, 'communication data needs a random generator'
    return DataMatrix(util.complex_normal(rng, (n_p, m), sigma_s ** 2), kind=kind)
