"""Analytic-oracle microbenchmark: two symmetric transmitters offering an
aggregate Poisson attempt load G to one receiver over a collision-prone
channel (processing gain 1, so any substantial overlap destroys a frame).

Per-attempt delivery ratio should match pure-ALOHA exp(-2G), or
exp(-G) when attempts are aligned to slot boundaries of one frame time.
Attempts go straight onto the medium, bypassing MAC queueing, matching
the memoryless attempt process the closed forms assume.
"""

from dataclasses import replace

from .engine import RngStreams, Scheduler
from .mac import DATA, next_slot_boundary
from .medium import Medium
from .metrics import MetricsCollector
from .radio import Frame, RadioParams


def collision_channel():
    """UWB-like link with bandwidth == bitrate: overlaps are fatal."""
    return RadioParams(
        bandwidth=1e6, carrier_frequency=0.8e9, bitrate=1e6,
        antenna_height=0.45, antenna_gain=3.0, noise_figure=5.0,
        temperature=270.0, sensitivity=-85.0, rx_threshold=-80.0,
        tx_power=-24.318)


class _CountingReceiver:
    def __init__(self, node_id):
        self.node_id = node_id
        self.tx_until = 0.0
        self.received = 0

    def on_receive(self, frame, rx_dbm):
        self.received += 1


class _SilentTransmitter:
    def __init__(self, node_id):
        self.node_id = node_id
        self.tx_until = 0.0

    def on_receive(self, frame, rx_dbm):
        pass


def aloha_delivery_ratio(offered_load, slotted, seed, n_attempts=20000,
                         frame_bits=1152, params=None):
    """Fraction of Poisson attempts delivered; compare to exp(-2G) / exp(-G)."""
    p = (params or collision_channel()).validate()
    frame_time = frame_bits / p.bitrate
    sched = Scheduler()
    rngs = RngStreams(seed)
    collector = MetricsCollector()
    medium = Medium(sched, p, rngs, collector)

    receiver = _CountingReceiver(0)
    sources = [_SilentTransmitter(1), _SilentTransmitter(2)]
    medium.add_node(receiver, (0.0, 0.0))
    medium.add_node(sources[0], (-5.0, 0.0))
    medium.add_node(sources[1], (5.0, 0.0))

    arrivals = rngs.stream("arrivals")
    t = 0.0
    seq = 0
    for i in range(n_attempts):
        t += arrivals.exponential(frame_time / offered_load)
        start = next_slot_boundary(t, frame_time) if slotted else t
        seq += 1
        src = sources[i % 2]
        frame = Frame(kind=DATA, mac_source=src.node_id, mac_dest=0,
                      net_source=src.node_id, net_dest=0,
                      sequence=(src.node_id, seq), size_bits=frame_bits)
        sched.schedule(start, "app-event",
                       lambda s=src, f=frame: medium.transmit(s.node_id, f),
                       target=src.node_id)
    sched.run(t + 10 * frame_time)
    return receiver.received / n_attempts
