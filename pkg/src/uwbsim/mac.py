"""Medium-access state machines: unslotted ALOHA with ARQ, slotted ALOHA
with ARQ, and a non-persistent CSMA/CA baseline with binary exponential
backoff. All three share the same queueing and acknowledgement logic.

Unicast non-ACK frames are acknowledged and retransmitted up to
``retx_limit`` times; broadcast frames get neither ACK nor retry. ACKs are
sent a fixed turnaround after the data frame and are never slot-aligned.
"""

import math
from collections import deque
from dataclasses import dataclass

from . import radio
from .radio import BROADCAST, Frame

UNSLOTTED = "unslotted-aloha"
SLOTTED = "slotted-aloha"
CSMA = "csma-ca"
VARIANTS = (UNSLOTTED, SLOTTED, CSMA)

DATA = "DATA"
ACK = "ACK"
RREQ = "RREQ"
RREP = "RREP"
RERR = "RERR"


@dataclass
class MacParams:
    variant: str = UNSLOTTED
    slot_size: float = 0.002          # s, slotted only
    retx_delay: float = 0.003         # s, ACK wait from end of data frame
    retx_limit: int = 6               # retransmissions beyond the first attempt
    queue_capacity: int = 50
    csma_backoff_unit: float = 320e-6
    csma_min_backoff_exponent: int = 3
    csma_max_backoff_exponent: int = 5
    data_bits: int = 1152
    ack_bits: int = 128
    turnaround: float = 100e-6        # s between data end and ACK start
    allow_short_retx_delay: bool = False

    def validate(self, radio_params, max_prop_delay=0.0, warn=None):
        warn = warn or (lambda msg: None)
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown mac variant {self.variant!r}")
        if self.retx_limit < 0 or self.queue_capacity < 1:
            raise ValueError("retx_limit must be >= 0 and queue_capacity >= 1")
        data_air = self.data_bits / radio_params.bitrate
        ack_air = self.ack_bits / radio_params.bitrate
        floor = data_air + ack_air + 2.0 * max_prop_delay
        if self.retx_delay <= floor:
            msg = (f"retx_delay {self.retx_delay} s does not cover a full "
                   f"DATA+ACK exchange ({floor:.6f} s): every ACK will be late")
            if self.allow_short_retx_delay:
                warn(msg)
            else:
                raise ValueError(msg + " (set mac.allow_short_retx_delay to override)")
        if self.variant == SLOTTED:
            if self.slot_size <= 0:
                raise ValueError("slot_size must be positive")
            if self.slot_size < data_air + self.turnaround + ack_air:
                warn(f"slot_size {self.slot_size} s is shorter than one "
                     f"DATA+ACK exchange ({data_air + self.turnaround + ack_air:.6f} s)")
        return self


def next_slot_boundary(t, slot_size):
    """Smallest integer multiple of slot_size that is >= t."""
    if slot_size <= 0:
        raise ValueError("slot_size must be positive")
    k = math.ceil(t / slot_size - 1e-9)
    return k * slot_size


class MacBase:
    """Shared queueing + ARQ machinery; subclasses decide attempt timing."""

    needs_cca = False

    def __init__(self, node, params: MacParams, medium, sched, rngs, metrics):
        self.node = node
        self.params = params
        self.medium = medium
        self.sched = sched
        self.metrics = metrics
        self.backoff_rng = rngs.stream("backoff", node.node_id)
        self.queue = deque()
        self.in_flight = None
        self.ack_timer = None
        self.attempt_event = None
        self.backoff_exponent = params.csma_min_backoff_exponent
        self.seen = set()             # (origin, counter) delivered upward
        self._ack_counter = 0

    # -- transmit path -------------------------------------------------

    def enqueue(self, frame):
        if len(self.queue) >= self.params.queue_capacity:
            self.metrics.queue_drops += 1
            return False
        frame.enqueue_time = self.sched.now
        self.queue.append(frame)
        if self.in_flight is None:
            self._service_next()
        return True

    def _service_next(self):
        if not self.queue:
            self.in_flight = None
            return
        self.in_flight = self.queue.popleft()
        self.in_flight.retry_count = 0
        self.backoff_exponent = self.params.csma_min_backoff_exponent
        self._schedule_attempt()

    def _schedule_attempt(self):
        raise NotImplementedError

    def _schedule_retry(self):
        self._schedule_attempt()

    def _attempt_at(self, t, kind="mac-attempt"):
        self.attempt_event = self.sched.schedule(
            t, kind, self._attempt, target=self.node.node_id)

    def _attempt(self):
        self.attempt_event = None
        if self.node.tx_until > self.sched.now:
            # Radio busy (an ACK is going out): defer past it.
            self._attempt_at(self._earliest_start(self.node.tx_until))
            return
        self._transmit_in_flight()

    def _earliest_start(self, t):
        return t

    def _transmit_in_flight(self):
        frame = self.in_flight
        tx = self.medium.transmit(self.node.node_id, frame)
        self.metrics.tx_log.append(
            (tx.start_time, self.node.node_id, frame.kind, frame.sequence,
             frame.retry_count))
        if frame.mac_dest == BROADCAST or frame.kind == ACK:
            self.sched.schedule(tx.end_time, "mac-tx-done",
                                self._service_next, target=self.node.node_id)
        else:
            self.ack_timer = self.sched.schedule(
                tx.end_time + self.params.retx_delay, "timer-expiry",
                self.on_ack_timeout, target=self.node.node_id)

    def on_ack_timeout(self):
        self.ack_timer = None
        frame = self.in_flight
        if frame.retry_count < self.params.retx_limit:
            frame.retry_count += 1
            self._schedule_retry()
        else:
            self.metrics.arq_discards += 1
            self.in_flight = None
            self.node.on_link_failure(frame.mac_dest, frame)
            self._service_next()

    # -- receive path --------------------------------------------------

    def on_receive(self, frame, rx_dbm):
        me = self.node.node_id
        if frame.kind == ACK:
            if frame.mac_dest == me:
                self.on_ack_received(frame)
            return
        if frame.mac_dest not in (me, BROADCAST):
            return
        if frame.mac_dest == me:
            self._send_ack(frame)
        if frame.sequence in self.seen:
            return  # duplicate: re-ACKed above, not delivered upward again
        self.seen.add(frame.sequence)
        self.node.on_mac_deliver(frame, rx_dbm)

    def on_ack_received(self, ack):
        frame = self.in_flight
        if frame is None or ack.payload.get("acked") != frame.sequence:
            return  # stale or unmatched
        if self.sched.cancel(self.ack_timer):
            self.ack_timer = None
        elif self.sched.cancel(self.attempt_event):
            # Late ACK beat the pending retransmission attempt.
            self.attempt_event = None
        else:
            return  # retry already on air; the next ACK settles it
        self.in_flight = None
        self._service_next()

    def _send_ack(self, data_frame):
        self._ack_counter += 1
        ack = Frame(kind=ACK, mac_source=self.node.node_id,
                    mac_dest=data_frame.mac_source,
                    net_source=self.node.node_id,
                    net_dest=data_frame.mac_source,
                    sequence=(self.node.node_id, -self._ack_counter),
                    size_bits=self.params.ack_bits,
                    payload={"acked": data_frame.sequence})
        self.sched.schedule(self.sched.now + self.params.turnaround,
                            "ack-send", lambda: self._transmit_ack(ack),
                            target=self.node.node_id)

    def _transmit_ack(self, ack):
        if self.node.tx_until > self.sched.now:
            self.sched.schedule(self.node.tx_until, "ack-send",
                                lambda: self._transmit_ack(ack),
                                target=self.node.node_id)
            return
        self.medium.transmit(self.node.node_id, ack)


class UnslottedAlohaMac(MacBase):
    """Transmit immediately; retransmit immediately on ACK timeout."""

    def _schedule_attempt(self):
        self._attempt_at(self.sched.now)


class SlottedAlohaMac(MacBase):
    """Data transmissions start only on global slot boundaries."""

    def _schedule_attempt(self):
        self._attempt_at(next_slot_boundary(self.sched.now,
                                            self.params.slot_size),
                         kind="slot-boundary")

    def _earliest_start(self, t):
        return next_slot_boundary(t, self.params.slot_size)


class CsmaMac(MacBase):
    """Non-persistent CSMA/CA: assess the channel, back off while busy."""

    def _schedule_attempt(self):
        self._attempt_at(self.sched.now)

    def _schedule_retry(self):
        # Fresh backoff state for the retransmission.
        self.backoff_exponent = self.params.csma_min_backoff_exponent
        self._attempt_at(self.sched.now)

    def _attempt(self):
        self.attempt_event = None
        now = self.sched.now
        if self.node.tx_until > now:
            self._attempt_at(self.node.tx_until)
            return
        power = self.medium.power_at_dbm(self.node.node_id)
        if radio.clear_channel(self.medium.params, power):
            self._transmit_in_flight()
            return
        window = 2 ** self.backoff_exponent
        k = int(self.backoff_rng.integers(0, window))
        self.backoff_exponent = min(self.backoff_exponent + 1,
                                    self.params.csma_max_backoff_exponent)
        self._attempt_at(now + k * self.params.csma_backoff_unit,
                         kind="csma-backoff")


def make_mac(node, params, medium, sched, rngs, metrics):
    cls = {UNSLOTTED: UnslottedAlohaMac,
           SLOTTED: SlottedAlohaMac,
           CSMA: CsmaMac}[params.variant]
    return cls(node, params, medium, sched, rngs, metrics)
