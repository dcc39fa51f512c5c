"""Run accounting: reliability, latency and per-node energy.

The radio is two-state: a node is either transmitting or listening, so
rx time is the remainder of the run once tx intervals are summed. Idle
listening is billed at the RX draw, which is what makes always-on daily
consumption reconstructible from the TX/RX draws alone.
"""

import math
from dataclasses import dataclass, field


@dataclass
class EnergyParams:
    tx_power_draw: float   # mW while transmitting
    rx_power_draw: float   # mW while listening
    supply_voltage: float  # V, informational

    def validate(self):
        if self.tx_power_draw <= 0 or self.rx_power_draw <= 0:
            raise ValueError("power draws must be positive")
        return self


ENERGY_PRESETS = {
    "uwb": EnergyParams(tx_power_draw=5.0, rx_power_draw=20.0, supply_voltage=1.2),
    "oqpsk": EnergyParams(tx_power_draw=52.2, rx_power_draw=59.1, supply_voltage=3.0),
}

SECONDS_PER_DAY = 86400.0


def node_energy_mwh(tx_time, rx_time, e: EnergyParams):
    """Closed-form energy of one node in mW·h."""
    return (tx_time * e.tx_power_draw + rx_time * e.rx_power_draw) / 3600.0


@dataclass
class RunMetrics:
    generated_events: int
    delivered_events: int
    reliability: float
    latencies: list                    # sorted, seconds, first delivery per event
    mean_latency: float | None         # None when nothing was delivered
    p95_latency: float | None
    per_node_energy: dict              # node id -> mW·h over sim_duration
    daily_energy: dict                 # node id -> mW·h extrapolated to 24 h
    tx_time: dict
    rx_time: dict
    collisions: int
    arq_discards: int
    queue_drops: int

    @property
    def mean_daily_energy(self):
        return sum(self.daily_energy.values()) / len(self.daily_energy)

    @property
    def max_daily_energy(self):
        return max(self.daily_energy.values())


class MetricsCollector:
    """Accumulates raw counters during a run; finalize() derives the rest."""

    def __init__(self, energy_nodes=()):
        self.tx_time = {n: 0.0 for n in energy_nodes}
        self.rx_time = {n: 0.0 for n in energy_nodes}
        self.collisions = 0
        self.arq_discards = 0
        self.queue_drops = 0
        self.buffer_drops = 0
        self.events = {}       # event id -> emit_time
        self.deliveries = {}   # event id -> first arrival time at base
        self.tx_log = []       # (time, node, frame kind, sequence, retry)

    def record_radio_interval(self, node, state, duration):
        if duration < 0:
            raise ValueError("negative interval")
        if node not in self.tx_time:
            return
        if state == "tx":
            self.tx_time[node] += duration
        elif state == "rx":
            self.rx_time[node] += duration
        else:
            raise ValueError(f"unknown radio state {state!r}")

    def record_event(self, event_id, emit_time):
        self.events[event_id] = emit_time

    def record_delivery(self, event_id, arrival_time):
        if event_id in self.events and event_id not in self.deliveries:
            self.deliveries[event_id] = arrival_time

    def finalize(self, sim_duration, energy: EnergyParams, truncation_guard=5.0):
        """Derive the run's figures of merit.

        Events emitted in the final ``truncation_guard`` seconds are
        excluded so in-flight reports do not deflate reliability.
        """
        cutoff = sim_duration - truncation_guard
        counted = {eid: t for eid, t in self.events.items() if t <= cutoff}
        if not counted:
            raise ValueError("no application events generated before the "
                             "truncation guard; check scenario configuration")
        delivered = {eid: self.deliveries[eid] for eid in counted
                     if eid in self.deliveries}
        latencies = sorted(self.deliveries[eid] - counted[eid] for eid in delivered)
        if latencies:
            mean_latency = sum(latencies) / len(latencies)
            p95_latency = latencies[min(len(latencies) - 1,
                                        math.ceil(0.95 * len(latencies)) - 1)]
        else:
            mean_latency = None
            p95_latency = None

        per_node_energy = {}
        daily_energy = {}
        rx_time = {}
        for node, tx in self.tx_time.items():
            rx = sim_duration - tx
            rx_time[node] = rx
            per_node_energy[node] = node_energy_mwh(tx, rx, energy)
            daily_energy[node] = per_node_energy[node] * (SECONDS_PER_DAY / sim_duration)

        return RunMetrics(
            generated_events=len(counted),
            delivered_events=len(delivered),
            reliability=len(delivered) / len(counted),
            latencies=latencies,
            mean_latency=mean_latency,
            p95_latency=p95_latency,
            per_node_energy=per_node_energy,
            daily_energy=daily_energy,
            tx_time=dict(self.tx_time),
            rx_time=rx_time,
            collisions=self.collisions,
            arq_discards=self.arq_discards,
            queue_drops=self.queue_drops,
        )
