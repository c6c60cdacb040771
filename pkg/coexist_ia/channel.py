""" frequency-selective channels, target fluctuation and received-signal superposition """
import dataclasses
import logging
import types
import typing

import numpy as np
import scipy.linalg

from coexist_ia import exc, util
from coexist_ia.bases import (
    frozen_array,
    Membership,
    NoiseSpec,
    Scenario,
    TargetKind,
    UserSpec,
)
from coexist_ia.multicarrier import ModulationMatrix, TransmitBlock

logger = logging.getLogger(__name__)

Link = typing.Tuple[str, str]

DIAGONALIZATION_TOLERANCE = 1e-10


@dataclasses.dataclass(frozen=True, eq=False)
class DiagonalChannel:
    """Per-subcarrier complex gains; the matrix form is diag(gains)."""
    gains: np.ndarray

    def __post_init__(self):
        gains = frozen_array(self.gains)
        if gains.ndim != 1:
            raise exc.DimensionError('H', '1-d gains', gains.shape)
        object.__setattr__(self, 'gains', gains)

    @property
    def n_sc(self) -> int:
        return self.gains.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.gains)

    def hermitian(self) -> 'DiagonalChannel':
        return DiagonalChannel(np.conj(self.gains))

    def apply(self, block: np.ndarray) -> np.ndarray:
        """H @ block without forming H"""
        return self.gains[:, np.newaxis] * block

    def to_circulant(self, b: ModulationMatrix) -> np.ndarray:
        """G = B^H H B"""
        return util.hermitian(b.entries) @ (self.gains[:, np.newaxis] * b.entries)


@dataclasses.dataclass(frozen=True, eq=False)
class CirculantChannel:
    """Time-domain channel; row r is row r-1 rotated right by one."""
    first_row: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'first_row', frozen_array(np.ravel(self.first_row)))

    @property
    def matrix(self) -> np.ndarray:
        # scipy builds from the first column, G[r, c] = h[(c - r) mod n] is its transpose
        return scipy.linalg.circulant(self.first_row).T


@dataclasses.dataclass(frozen=True)
class TargetModel:
    kind: TargetKind = TargetKind.SWERLING_II
    mean_power: float = 1.0

    def __post_init__(self):
        if not self.mean_power > 0:
            raise exc.ConfigurationError('target mean power must be positive, got %r' % self.mean_power)


@dataclasses.dataclass(frozen=True, eq=False)
class LinkSet:
    """Channels for every ordered (rx, tx) pair plus which transmitters reach which receivers."""
    users: typing.Tuple[str, ...]
    h: typing.Mapping[Link, DiagonalChannel]
    interferes: typing.Mapping[Link, bool]

    def __post_init__(self):
        object.__setattr__(self, 'users', tuple(self.users))
        object.__setattr__(self, 'h', types.MappingProxyType(dict(self.h)))
        object.__setattr__(self, 'interferes', types.MappingProxyType(dict(self.interferes)))

    def reaches(self, rx: str, tx: str) -> bool:
        return rx == tx or bool(self.interferes.get((rx, tx), False))

    def channel(self, rx: str, tx: str) -> DiagonalChannel:
        try:
            return self.h[(rx, tx)]
        except KeyError:
            raise exc.TopologyError(rx, tx) from None

    def interferers(self, rx: str) -> typing.List[str]:
        return [tx for tx in self.users if tx != rx and self.reaches(rx, tx)]

    def reciprocal(self) -> 'LinkSet':
        """H_bar[j, i] = H[i, j]^H with the interference map transposed"""
        return LinkSet(
            users=self.users,
            h={(tx, rx): channel.hermitian() for (rx, tx), channel in self.h.items()},
            interferes={(tx, rx): flag for (rx, tx), flag in self.interferes.items()},
        )


def build_topology(users: typing.Sequence[UserSpec],
                   overrides: typing.Optional[typing.Mapping[Link, bool]] = None) -> typing.Dict[Link, bool]:
    """Interference map from memberships.

    Communication transmitters reach every other receiver; the radar reaches
    only receivers in A_r.
    """
    topology = {}
    for rx in users:
        for tx in users:
            if rx.uid == tx.uid:
                continue
            if tx.is_radar:
                topology[(rx.uid, tx.uid)] = rx.membership is Membership.RADAR_INTERFERED
            else:
                topology[(rx.uid, tx.uid)] = True
    for link, flag in (overrides or {}).items():
        if link not in topology:
            raise exc.ConfigurationError('topology override for unknown link %r' % (link,))
        topology[link] = bool(flag)
    return topology


def make_circulant(first_row) -> CirculantChannel:
    first_row = np.ravel(np.asarray(first_row, dtype=complex))
    if first_row.size < 1:
        raise exc.ConfigurationError('a circulant channel needs at least one tap')
    return CirculantChannel(first_row)


def diagonalize_circulant(g: CirculantChannel, b: ModulationMatrix) -> DiagonalChannel:
    """H = B G B^H, diagonal because the columns of a unitary DFT diagonalize every circulant"""
    if not b.ofdm or b.unitarity_error() > DIAGONALIZATION_TOLERANCE:
        raise exc.ConfigurationError('circulant diagonalization needs a unitary modulation matrix')
    g_matrix = g.matrix
    if g_matrix.shape != b.shape:
        raise exc.DimensionError('G', b.shape, g_matrix.shape)
    full = b.entries @ g_matrix @ util.hermitian(b.entries)
    off_diagonal = np.linalg.norm(full - np.diag(np.diag(full)))
    if off_diagonal > DIAGONALIZATION_TOLERANCE * max(1.0, np.linalg.norm(full)):
        raise exc.NumericError('circulant did not diagonalize, residual %.3g' % off_diagonal)
    return DiagonalChannel(np.diag(full))


def draw_block_fading(rng: np.random.Generator, n_sc: int) -> DiagonalChannel:
    """i.i.d. CN(0, 1) per subcarrier, constant over the coherence interval"""
    return DiagonalChannel(util.complex_normal(rng, n_sc))


def _fluctuation(rng: np.random.Generator, model: TargetModel, shape) -> np.ndarray:
    if model.kind is TargetKind.NONFLUCTUATING:
        power = np.full(shape, model.mean_power)
    elif model.kind.chi_square_four:
        # chi-square with four degrees of freedom, normalized to unit mean
        power = model.mean_power * rng.gamma(2.0, 0.5, shape)
    else:
        return util.complex_normal(rng, shape, model.mean_power)
    return np.sqrt(power) * np.exp(2j * np.pi * rng.uniform(size=shape))


def _redraw_block(model: TargetModel, pulse_index: int, coherent_interval: int) -> int:
    if model.kind is TargetKind.NONFLUCTUATING:
        return 0
    if model.kind.redraws_per_interval:
        return pulse_index // coherent_interval
    return pulse_index


def draw_target_response(seed: int, model: TargetModel, n_sc: int, pulse_index: int,
                         coherent_interval: int = 1) -> DiagonalChannel:
    """Target response for one pulse.

    The draw is a pure function of ``seed`` and the redraw block the pulse
    falls in, so pulses sharing a block see identical responses.
    """
    if pulse_index < 0 or coherent_interval < 1:
        raise exc.ConfigurationError('need pulse_index >= 0 and coherent_interval >= 1')
    block = _redraw_block(model, pulse_index, coherent_interval)
    rng = util.child_rng(seed, 'target', block)
    return DiagonalChannel(_fluctuation(rng, model, n_sc))


def draw_target_responses(rng: np.random.Generator, model: TargetModel, n_sc: int, trials: int,
                          pulses: int, coherent_interval: int) -> np.ndarray:
    """(trials, pulses, n_sc) responses with the same redraw cadence as draw_target_response"""
    if model.kind.redraws_per_pulse:
        return _fluctuation(rng, model, (trials, pulses, n_sc))
    if model.kind is TargetKind.NONFLUCTUATING:
        fixed = _fluctuation(rng, model, (trials, 1, n_sc))
        return np.broadcast_to(fixed, (trials, pulses, n_sc))
    blocks = -(-pulses // coherent_interval)
    draws = _fluctuation(rng, model, (trials, blocks, n_sc))
    return draws[:, np.arange(pulses) // coherent_interval, :]


def draw_link_set(rng: np.random.Generator, scenario: Scenario,
                  target: typing.Optional[TargetModel] = None,
                  overrides: typing.Optional[typing.Mapping[Link, bool]] = None) -> LinkSet:
    """block fading on every ordered pair; the radar self-link is a target response"""
    target = target or TargetModel()
    h = {}
    for rx in scenario.users:
        for tx in scenario.users:
            if rx.uid == tx.uid and rx.is_radar:
                h[(rx.uid, tx.uid)] = DiagonalChannel(_fluctuation(rng, target, scenario.n_sc))
            else:
                h[(rx.uid, tx.uid)] = draw_block_fading(rng, scenario.n_sc)
    return LinkSet(users=scenario.ids, h=h, interferes=build_topology(scenario.users, overrides))


def receive(blocks: typing.Mapping[str, TransmitBlock],
            links: LinkSet,
            rx: str,
            noise: typing.Optional[NoiseSpec] = None,
            rng: typing.Optional[np.random.Generator] = None) -> np.ndarray:
    """Y_R = sum over reaching j of H[rx, j] (Omega_j o I) P_j C_j S_j + W"""
    shape = None
    total = None
    for tx, block in blocks.items():
        if not links.reaches(rx, tx):
            continue
        if block.selected is None:
            raise exc.ConfigurationError('transmit block of %r carries no subcarrier image' % tx)
        contribution = links.channel(rx, tx).apply(block.selected)
        if shape is None:
            shape, total = contribution.shape, contribution.copy()
        elif contribution.shape != shape:
            raise exc.DimensionError('transmit block of %r' % tx, shape, contribution.shape)
        else:
            total += contribution
    if total is None:
        if not blocks:
            raise exc.ConfigurationError('receive needs at least one transmit block to size the output')
        shape = next(iter(blocks.values())).selected.shape
        total = np.zeros(shape, dtype=complex)
    if noise is not None:
        assert rng is not None, 'noise needs a random generator'
        total = total + util.complex_normal(rng, shape, noise.sigma_w2)
    return total
