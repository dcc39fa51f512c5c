"""Shared radio medium: tracks every transmission on air, accumulates
per-receiver interference and decides packet fates with one uniform draw
per reception against the BER-derived success probability.

A node is half-duplex: starting a transmission aborts its ongoing
receptions, and no reception starts while its own transmitter is busy.
"""

import math

import numpy as np

from . import kernels, radio
from .radio import SPEED_OF_LIGHT, Transmission

# Interferers weaker than noise/1000 are dropped from the bookkeeping.
INTERFERENCE_FLOOR_REL = 1e-3


class Reception:
    __slots__ = ("tx", "receiver", "t_begin", "t_end", "signal_mw",
                 "int_mw", "int_a", "int_b", "aborted", "rx_dbm")

    def __init__(self, tx, receiver, t_begin, t_end, signal_mw):
        self.tx = tx
        self.receiver = receiver
        self.t_begin = t_begin
        self.t_end = t_end
        self.signal_mw = signal_mw
        self.rx_dbm = kernels.mw_to_dbm(signal_mw)
        self.int_mw = []   # interferer arrival power (mW) ...
        self.int_a = []    # ... and arrival interval at this receiver
        self.int_b = []
        self.aborted = False

    def add_interferer(self, mw, a, b):
        self.int_mw.append(mw)
        self.int_a.append(a)
        self.int_b.append(b)


class Medium:
    def __init__(self, sched, params, rngs, metrics, ideal=False):
        self.sched = sched
        self.params = params
        self.rngs = rngs
        self.metrics = metrics
        self.ideal = ideal
        self.noise_mw = kernels.dbm_to_mw(radio.noise_floor_dbm(params))
        self._floor_mw = self.noise_mw * INTERFERENCE_FLOOR_REL
        self.sensitivity_mw = kernels.dbm_to_mw(params.sensitivity)
        self.eirp = params.tx_power + 2.0 * params.antenna_gain
        self.nodes = []           # objects with node_id, tx_until, on_receive
        self._slot = {}           # node_id -> index into positions
        self._positions = np.empty((0, 2))
        self.active = []          # transmissions still on air
        self.ongoing = []         # receptions still in progress

    def add_node(self, node, position):
        self._slot[node.node_id] = len(self.nodes)
        self.nodes.append(node)
        self._positions = np.vstack(
            [self._positions, np.asarray(position, dtype=np.float64)])

    def update_position(self, node_id, position):
        self._positions[self._slot[node_id]] = position

    def position_of(self, node_id):
        return tuple(self._positions[self._slot[node_id]])

    def distance(self, a, b):
        pa = self._positions[self._slot[a]]
        pb = self._positions[self._slot[b]]
        return math.hypot(pa[0] - pb[0], pa[1] - pb[1])

    def _rx_row_mw(self, source_pos):
        """Received power (mW) of the source's signal at every node."""
        p = self.params
        d = np.hypot(self._positions[:, 0] - source_pos[0],
                     self._positions[:, 1] - source_pos[1])
        return kernels.rx_powers_mw(self.eirp, d, p.wavelength,
                                    p.antenna_height, p.antenna_height,
                                    p.two_ray), d

    def transmit(self, source_id, frame):
        """Put a frame on air now; returns the Transmission."""
        now = self.sched.now
        p = self.params
        airtime = frame.size_bits / p.bitrate
        src = self.nodes[self._slot[source_id]]
        tx = Transmission(source_id, frame, now, now + airtime, p.tx_power,
                          source_pos=self.position_of(source_id))
        src.tx_until = max(src.tx_until, tx.end_time)
        self.metrics.record_radio_interval(source_id, "tx", airtime)
        if frame.first_tx_time < 0:
            frame.first_tx_time = now

        if self.active and self.active[0].end_time <= now:
            self.active = [t for t in self.active if t.end_time > now]
        self.active.append(tx)

        row_mw, dists = self._rx_row_mw(tx.source_pos)
        src_slot = self._slot[source_id]

        # Transmitting kills anything this node was mid-receiving, and the
        # new signal interferes with receptions in progress elsewhere.
        for rec in self.ongoing:
            rslot = self._slot[rec.receiver.node_id]
            if rslot == src_slot:
                rec.aborted = True
                continue
            mw = row_mw[rslot]
            if mw < self._floor_mw:
                continue
            delay = dists[rslot] / SPEED_OF_LIGHT
            a, b = tx.start_time + delay, tx.end_time + delay
            if a < rec.t_end and b > rec.t_begin:
                rec.add_interferer(mw, a, b)

        # Candidate receptions wherever the signal is decodable.
        for idx in np.nonzero(row_mw >= self.sensitivity_mw)[0]:
            node = self.nodes[idx]
            if idx == src_slot:
                continue
            delay = dists[idx] / SPEED_OF_LIGHT
            t_begin, t_end = tx.start_time + delay, tx.end_time + delay
            if node.tx_until > t_begin:
                continue  # receiver busy transmitting: start of frame missed
            rec = Reception(tx, node, t_begin, t_end, row_mw[idx])
            self._snapshot_interference(rec)
            self.ongoing.append(rec)
            self.sched.schedule(t_end, "frame-arrival-end",
                                lambda r=rec: self._finish_reception(r),
                                target=node.node_id)
        return tx

    def _snapshot_interference(self, rec):
        """Record already-active transmissions overlapping a new reception."""
        rx_pos = self._positions[self._slot[rec.receiver.node_id]]
        p = self.params
        for other in self.active:
            if other is rec.tx or other.source == rec.receiver.node_id:
                continue
            d = math.hypot(other.source_pos[0] - rx_pos[0],
                           other.source_pos[1] - rx_pos[1])
            if d <= 0.0:
                continue
            delay = d / SPEED_OF_LIGHT
            a, b = other.start_time + delay, other.end_time + delay
            if a >= rec.t_end or b <= rec.t_begin:
                continue
            mw = kernels.dbm_to_mw(
                self.eirp - kernels.path_loss_db(d, p.wavelength,
                                                 p.antenna_height,
                                                 p.antenna_height, p.two_ray))
            if mw >= self._floor_mw:
                rec.add_interferer(mw, a, b)

    def _finish_reception(self, rec):
        self.ongoing.remove(rec)
        if rec.aborted:
            return
        if self.ideal:
            rec.receiver.on_receive(rec.tx.frame, rec.rx_dbm)
            return
        prob = kernels.reception_success_prob(
            rec.signal_mw, self.noise_mw, rec.t_begin, rec.t_end,
            rec.int_mw, rec.int_a, rec.int_b,
            self.params.bitrate, self.params.processing_gain)
        u = self.rngs.stream("rx", rec.receiver.node_id).random()
        if u < prob:
            rec.receiver.on_receive(rec.tx.frame, rec.rx_dbm)
        elif rec.int_mw:
            self.metrics.collisions += 1

    def power_at_dbm(self, node_id):
        """Noise floor plus every signal currently arriving at the node."""
        now = self.sched.now
        rx_pos = self._positions[self._slot[node_id]]
        p = self.params
        total = self.noise_mw
        for tx in self.active:
            if tx.source == node_id or tx.start_time > now or tx.end_time <= now:
                continue
            d = math.hypot(tx.source_pos[0] - rx_pos[0],
                           tx.source_pos[1] - rx_pos[1])
            if d <= 0.0:
                continue
            total += kernels.dbm_to_mw(
                self.eirp - kernels.path_loss_db(d, p.wavelength,
                                                 p.antenna_height,
                                                 p.antenna_height, p.two_ray))
        return kernels.mw_to_dbm(total)
