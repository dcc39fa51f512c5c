"""AODV-lite multi-hop routing: on-demand RREQ flood / RREP unicast with
destination-only replies, duplicate suppression and lifetime-limited
routes. Link failure is detected solely through the MAC's final ARQ
discard; affected routes are invalidated and rediscovered on next use.
"""

from collections import deque
from dataclasses import dataclass

from .mac import DATA, RREP, RREQ
from .radio import BROADCAST, Frame


@dataclass
class RoutingParams:
    route_lifetime: float = 10.0     # s, refreshed on use
    ctrl_bits: int = 256             # RREQ/RREP frame size
    buffer_capacity: int = 10        # payloads held per destination
    rreq_min_interval: float = 0.1   # s between discoveries per destination
    rreq_jitter: float = 0.005       # s, uniform delay before (re)broadcast

    def validate(self):
        if self.route_lifetime <= 0 or self.buffer_capacity < 1:
            raise ValueError("route_lifetime must be positive, buffer_capacity >= 1")
        if self.rreq_jitter < 0 or self.rreq_min_interval < 0:
            raise ValueError("rreq timings must be non-negative")
        return self


@dataclass
class RouteEntry:
    destination: int
    next_hop: int
    hop_count: int
    dest_sequence: int
    lifetime_expiry: float


class AodvRouting:
    def __init__(self, node, params: RoutingParams, mac, sched, rngs, metrics):
        self.node = node
        self.params = params
        self.mac = mac
        self.sched = sched
        self.metrics = metrics
        self.rng = rngs.stream("routing", node.node_id)
        self.routes = {}            # destination -> RouteEntry
        self.seen_rreqs = set()     # (originator, rreq_id)
        self.buffers = {}           # destination -> deque of pending frames
        self.last_rreq = {}         # destination -> time of last discovery
        self._rreq_id = 0
        self.dropped_rreps = 0

    def live_route(self, dest):
        entry = self.routes.get(dest)
        if entry is not None and self.sched.now < entry.lifetime_expiry:
            return entry
        return None

    # -- data path -----------------------------------------------------

    def send_to(self, net_dest, size_bits, payload):
        me = self.node.node_id
        if net_dest == me:
            self.node.on_net_deliver(payload)
            return
        frame = Frame(kind=DATA, mac_source=me, mac_dest=-2,
                      net_source=me, net_dest=net_dest,
                      sequence=self.node.next_sequence(),
                      size_bits=size_bits, payload=payload)
        self._dispatch(frame)

    def forward(self, received):
        """Relay a DATA frame toward its network destination."""
        me = self.node.node_id
        frame = Frame(kind=DATA, mac_source=me, mac_dest=-2,
                      net_source=received.net_source,
                      net_dest=received.net_dest,
                      sequence=received.sequence,
                      size_bits=received.size_bits,
                      payload=received.payload)
        self._dispatch(frame)

    def _dispatch(self, frame):
        entry = self.live_route(frame.net_dest)
        if entry is not None:
            entry.lifetime_expiry = self.sched.now + self.params.route_lifetime
            frame.mac_dest = entry.next_hop
            self.mac.enqueue(frame)
            return
        buf = self.buffers.setdefault(frame.net_dest, deque())
        if len(buf) >= self.params.buffer_capacity:
            buf.popleft()
            self.metrics.buffer_drops += 1
        buf.append(frame)
        self._discover(frame.net_dest)

    def _discover(self, dest):
        now = self.sched.now
        if now - self.last_rreq.get(dest, -1e18) < self.params.rreq_min_interval:
            return
        self.last_rreq[dest] = now
        self._rreq_id += 1
        self._broadcast_rreq({"originator": self.node.node_id,
                              "rreq_id": self._rreq_id,
                              "target": dest,
                              "hop_count": 0})

    def _broadcast_rreq(self, payload):
        me = self.node.node_id
        frame = Frame(kind=RREQ, mac_source=me, mac_dest=BROADCAST,
                      net_source=payload["originator"],
                      net_dest=payload["target"],
                      sequence=self.node.next_sequence(),
                      size_bits=self.params.ctrl_bits, payload=dict(payload))
        delay = self.rng.uniform(0.0, self.params.rreq_jitter) \
            if self.params.rreq_jitter > 0 else 0.0
        self.sched.schedule(self.sched.now + delay, "rreq-send",
                            lambda: self.mac.enqueue(frame), target=me)

    # -- control path --------------------------------------------------

    def _install(self, dest, next_hop, hop_count):
        self.routes[dest] = RouteEntry(
            destination=dest, next_hop=next_hop, hop_count=hop_count,
            dest_sequence=0,
            lifetime_expiry=self.sched.now + self.params.route_lifetime)

    def handle_rreq(self, frame):
        pl = frame.payload
        me = self.node.node_id
        key = (pl["originator"], pl["rreq_id"])
        if pl["originator"] == me or key in self.seen_rreqs:
            return
        self.seen_rreqs.add(key)
        self._install(pl["originator"], frame.mac_source, pl["hop_count"] + 1)
        if pl["target"] == me:
            self._send_rrep(frame.mac_source,
                            {"originator": pl["originator"],
                             "destination": me,
                             "hop_count": 0})
        else:
            fwd = dict(pl)
            fwd["hop_count"] += 1
            self._broadcast_rreq(fwd)

    def _send_rrep(self, next_hop, payload):
        me = self.node.node_id
        frame = Frame(kind=RREP, mac_source=me, mac_dest=next_hop,
                      net_source=payload["destination"],
                      net_dest=payload["originator"],
                      sequence=self.node.next_sequence(),
                      size_bits=self.params.ctrl_bits, payload=dict(payload))
        self.mac.enqueue(frame)

    def handle_rrep(self, frame):
        pl = frame.payload
        me = self.node.node_id
        self._install(pl["destination"], frame.mac_source, pl["hop_count"] + 1)
        if pl["originator"] == me:
            self._flush(pl["destination"])
            return
        reverse = self.live_route(pl["originator"])
        if reverse is None:
            self.dropped_rreps += 1  # reverse route expired under us
            return
        reverse.lifetime_expiry = self.sched.now + self.params.route_lifetime
        fwd = dict(pl)
        fwd["hop_count"] += 1
        self._send_rrep(reverse.next_hop, fwd)

    def _flush(self, dest):
        buf = self.buffers.get(dest)
        while buf and self.live_route(dest) is not None:
            self._dispatch(buf.popleft())

    def handle_link_failure(self, next_hop):
        for dest in [d for d, e in self.routes.items() if e.next_hop == next_hop]:
            del self.routes[dest]
