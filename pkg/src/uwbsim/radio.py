"""Physical-layer model: propagation, noise, SINR partitioning, BER capture
and clear-channel assessment for the two radio technologies.

All functions here are pure; the draw deciding a packet's fate lives in
:mod:`uwbsim.medium`.
"""

import math
from dataclasses import dataclass, field, replace

from . import kernels

BOLTZMANN = 1.380649e-23  # J/K
SPEED_OF_LIGHT = 299792458.0  # m/s

MOD_UWB_BPM = "uwb-bpm"
MOD_OQPSK = "oqpsk"
CCA_ALWAYS_FREE = "always-free"
CCA_THRESHOLD = "threshold"


@dataclass
class RadioParams:
    bandwidth: float          # Hz
    carrier_frequency: float  # Hz
    bitrate: float            # bits/s
    antenna_height: float     # m
    antenna_gain: float       # dB, per antenna
    noise_figure: float       # dB
    temperature: float        # K
    sensitivity: float        # dBm, minimum decodable peak power
    rx_threshold: float       # dBm, CCA busy threshold
    tx_power: float           # dBm
    modulation: str = MOD_UWB_BPM
    cca_mode: str = CCA_ALWAYS_FREE
    propagation: str = "two-ray"  # or "free-space"

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def processing_gain(self):
        return self.bandwidth / self.bitrate

    @property
    def two_ray(self):
        return self.propagation == "two-ray"

    def validate(self):
        if self.bandwidth <= 0 or self.bitrate <= 0:
            raise ValueError("bandwidth and bitrate must be positive")
        if self.bandwidth < self.bitrate:
            raise ValueError("bandwidth must be at least the bitrate")
        if self.sensitivity > self.rx_threshold:
            raise ValueError("sensitivity must not exceed rx_threshold")
        if self.modulation not in (MOD_UWB_BPM, MOD_OQPSK):
            raise ValueError(f"unknown modulation {self.modulation!r}")
        if self.cca_mode not in (CCA_ALWAYS_FREE, CCA_THRESHOLD):
            raise ValueError(f"unknown cca_mode {self.cca_mode!r}")
        if self.propagation not in ("two-ray", "free-space"):
            raise ValueError(f"unknown propagation {self.propagation!r}")
        return self


UWB = RadioParams(
    bandwidth=100e6,
    carrier_frequency=0.8e9,
    bitrate=1e6,
    antenna_height=0.45,
    antenna_gain=3.0,
    noise_figure=5.0,
    temperature=270.0,
    sensitivity=-85.0,
    rx_threshold=-80.0,
    tx_power=-24.318,
    modulation=MOD_UWB_BPM,
    cca_mode=CCA_ALWAYS_FREE,
)

OQPSK = RadioParams(
    bandwidth=2e6,
    carrier_frequency=2.45e9,
    bitrate=0.25e6,
    antenna_height=0.03,
    antenna_gain=3.0,
    noise_figure=10.0,
    temperature=270.0,
    sensitivity=-96.0,
    rx_threshold=-85.0,
    tx_power=17.0,
    modulation=MOD_OQPSK,
    cca_mode=CCA_THRESHOLD,
)

PRESETS = {"uwb": UWB, "oqpsk": OQPSK}


def preset(name):
    try:
        return replace(PRESETS[name])
    except KeyError:
        raise ValueError(f"unknown radio preset {name!r}") from None


def dbm_to_mw(dbm):
    return kernels.dbm_to_mw(dbm)


def mw_to_dbm(mw):
    return kernels.mw_to_dbm(mw)


def noise_floor_dbm(p: RadioParams):
    """Thermal noise kTB over the receive bandwidth plus the noise figure."""
    ktb_mw = BOLTZMANN * p.temperature * p.bandwidth * 1e3
    return kernels.mw_to_dbm(ktb_mw) + p.noise_figure


def crossover_distance(p: RadioParams):
    return kernels.crossover_distance(p.wavelength, p.antenna_height,
                                      p.antenna_height)


def path_loss_db(d, p: RadioParams):
    return kernels.path_loss_db(d, p.wavelength, p.antenna_height,
                                p.antenna_height, p.two_ray)


def rx_power_dbm(tx_power_dbm, d, p: RadioParams):
    """Link budget: tx power + both antenna gains - path loss."""
    return tx_power_dbm + 2.0 * p.antenna_gain - path_loss_db(d, p)


def max_hop_distance(p: RadioParams):
    """Largest distance at which received power still meets sensitivity."""
    budget = p.tx_power + 2.0 * p.antenna_gain - p.sensitivity
    h = p.antenna_height
    if p.two_ray:
        d = 10.0 ** ((budget + 10.0 * math.log10(h ** 4)) / 40.0)
        if d > crossover_distance(p):
            return d
    return p.wavelength / (4.0 * math.pi) * 10.0 ** (budget / 20.0)


def bit_error_rate(sinr, p: RadioParams):
    return kernels.bit_error_rate(sinr, p.processing_gain)


@dataclass
class Frame:
    """Unit of transmission on air: data, acknowledgements and routing control."""
    kind: str                 # DATA | ACK | RREQ | RREP | RERR
    mac_source: int
    mac_dest: int             # BROADCAST for flooded frames
    net_source: int
    net_dest: int
    sequence: tuple           # (origin node id, counter)
    size_bits: int
    payload: dict = field(default_factory=dict)
    enqueue_time: float = 0.0
    first_tx_time: float = -1.0
    retry_count: int = 0

    def airtime(self, p: RadioParams):
        return self.size_bits / p.bitrate


BROADCAST = -1


@dataclass
class Transmission:
    """A signal occupying the medium over a time interval."""
    source: int
    frame: Frame
    start_time: float
    end_time: float
    tx_power: float           # dBm
    source_pos: tuple = None  # frozen at start of transmission


@dataclass
class ReceptionSegment:
    t_begin: float
    t_end: float
    sinr: float               # linear ratio


def sinr_segments(target: Transmission, concurrent, distances, p: RadioParams,
                  rx_offset=0.0):
    """Partition the target's on-air interval at every interferer edge.

    ``distances`` maps each transmission's source id to its distance from
    the receiver. ``rx_offset`` shifts on-air times to arrival times at
    the receiver (propagation delay of each signal's own path).
    """
    noise_mw = kernels.dbm_to_mw(noise_floor_dbm(p))
    signal_mw = kernels.dbm_to_mw(
        rx_power_dbm(target.tx_power, distances[target.source], p))
    t0 = target.start_time + rx_offset
    t1 = target.end_time + rx_offset

    interferers = []
    cuts = {t0, t1}
    for tx in concurrent:
        if tx is target:
            continue
        delay = distances[tx.source] / SPEED_OF_LIGHT
        a = tx.start_time + delay
        b = tx.end_time + delay
        if b <= t0 or a >= t1:
            continue
        mw = kernels.dbm_to_mw(rx_power_dbm(tx.tx_power, distances[tx.source], p))
        interferers.append((max(a, t0), min(b, t1), mw))
        cuts.add(max(a, t0))
        cuts.add(min(b, t1))

    edges = sorted(cuts)
    segments = []
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        interf = sum(mw for ia, ib, mw in interferers if ia <= mid < ib)
        segments.append(ReceptionSegment(a, b, signal_mw / (noise_mw + interf)))
    return segments


def packet_success_probability(segments, p: RadioParams):
    """Product over segments of (1 - BER)^bits, fractional bits allowed."""
    return kernels.packet_success_prob(
        [s.t_end - s.t_begin for s in segments],
        [s.sinr for s in segments],
        p.bitrate, p.processing_gain)


def clear_channel(p: RadioParams, medium_power_dbm):
    """CCA: TH-IR-UWB always reports free; OQPSK compares to rx_threshold."""
    if p.cca_mode == CCA_ALWAYS_FREE:
        return True
    return medium_power_dbm < p.rx_threshold
