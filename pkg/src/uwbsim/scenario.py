"""Field scenario: node placement, target mobility, periodic event
generation, detection/identification and report relay to the base station.

Sensors sit on a jittered grid sized from the radio's maximum hop
distance so the topology is connected by construction; targets wander by
random waypoint and emit one event per period plus jitter. Detecting
sensors identify radio-equipped targets over the air, then report to the
base over AODV.
"""

import math
from dataclasses import dataclass

from . import mac as mac_mod
from .radio import BROADCAST, Frame


@dataclass
class ScenarioParams:
    area_width: float = 140.0
    area_height: float = 70.0
    n_sensors: int = 60              # including the base station
    n_targets: int = 6
    n_radio_targets: int = 2
    event_period: float = 1.0
    event_jitter: float = 0.1
    detection_range: float = 15.0
    target_speed: float = 1.0        # m/s
    sim_duration: float = 20.0
    base_position: tuple = None      # default: left-edge midpoint
    placement: str = "grid"          # or "uniform"
    grid_pitch_factor: float = 0.7   # pitch ceiling as fraction of max hop
    grid_jitter_fraction: float = 0.2
    identification_timeout: float = 0.05
    id_bits: int = 256
    mobility_tick: float = 0.1

    def validate(self):
        if self.area_width <= 0 or self.area_height <= 0:
            raise ValueError("area dimensions must be positive")
        if self.n_sensors < 2:
            raise ValueError("need at least one sensor plus the base station")
        if not 0 <= self.n_radio_targets <= self.n_targets:
            raise ValueError("n_radio_targets must be within [0, n_targets]")
        if self.event_period <= 0 or self.event_jitter < 0:
            raise ValueError("event_period must be positive, jitter non-negative")
        if self.placement not in ("grid", "uniform"):
            raise ValueError(f"unknown placement {self.placement!r}")
        if self.sim_duration <= 0:
            raise ValueError("sim_duration must be positive")
        bp = self.base_position
        if bp is not None and not (0 <= bp[0] <= self.area_width
                                   and 0 <= bp[1] <= self.area_height):
            raise ValueError("base_position outside the area")
        return self

    def base_pos(self):
        if self.base_position is not None:
            return tuple(self.base_position)
        return (0.0, self.area_height / 2.0)


def place_nodes(params: ScenarioParams, max_hop, rng):
    """Sensor grid, base station and initial target positions.

    Returns (sensor_positions, base_position, target_positions); the grid
    pitch stays below grid_pitch_factor * max_hop so neighbouring sensors
    are always within one radio hop.
    """
    w, h = params.area_width, params.area_height
    n_grid = params.n_sensors - 1
    if params.placement == "uniform":
        sensors = [(rng.uniform(0, w), rng.uniform(0, h)) for _ in range(n_grid)]
    else:
        if max_hop <= 0:
            raise ValueError("radio max hop distance is zero; grid placement impossible")
        pitch_max = params.grid_pitch_factor * max_hop
        cols = max(1, math.ceil(w / pitch_max))
        rows = max(1, math.ceil(h / pitch_max))
        while cols * rows < n_grid:
            if w / cols >= h / rows:
                cols += 1
            else:
                rows += 1
        px, py = w / cols, h / rows
        centers = [((i + 0.5) * px, (j + 0.5) * py)
                   for j in range(rows) for i in range(cols)]
        if len(centers) > n_grid:
            # Surplus cells are vacated one at a time, interior first and
            # never two adjacent: an isolated empty interior cell is still
            # sensed and bridged by its eight neighbours, whereas emptying
            # a border strip would punch a hole in the coverage.
            bx, by = params.base_pos()
            order = sorted(range(len(centers)),
                           key=lambda k: math.hypot(centers[k][0] - bx,
                                                    centers[k][1] - by))
            dropped = set()
            for pass_interior_only in (True, False):
                for k in order:
                    if len(dropped) >= len(centers) - n_grid:
                        break
                    i, j = k % cols, k // cols
                    if pass_interior_only and not (0 < i < cols - 1
                                                   and 0 < j < rows - 1):
                        continue
                    if any((d % cols, d // cols) != (i, j)
                           and abs(d % cols - i) <= 1 and abs(d // cols - j) <= 1
                           for d in dropped):
                        continue
                    dropped.add(k)
            centers = [c for k, c in enumerate(centers) if k not in dropped]
        sensors = []
        for cx, cy in centers:
            x = cx + rng.uniform(-params.grid_jitter_fraction,
                                 params.grid_jitter_fraction) * px
            y = cy + rng.uniform(-params.grid_jitter_fraction,
                                 params.grid_jitter_fraction) * py
            sensors.append((min(max(x, 0.0), w), min(max(y, 0.0), h)))
    targets = [(rng.uniform(0, w), rng.uniform(0, h))
               for _ in range(params.n_targets)]
    return sensors, params.base_pos(), targets


class NodeBase:
    """Anything with a radio: id, frozen or mobile position, MAC below."""

    def __init__(self, node_id):
        self.node_id = node_id
        self.tx_until = 0.0
        self.mac = None
        self._seq = 0

    def next_sequence(self):
        self._seq += 1
        return (self.node_id, self._seq)

    def on_receive(self, frame, rx_dbm):
        self.mac.on_receive(frame, rx_dbm)

    def on_link_failure(self, next_hop, frame):
        pass

    def on_mac_deliver(self, frame, rx_dbm):
        pass


class SensorNode(NodeBase):
    """Detects events, runs the identification exchange, reports to base."""

    def __init__(self, node_id, sim):
        super().__init__(node_id)
        self.sim = sim
        self.routing = None
        self.pending_id = {}   # event id -> ACK-wait timer for identification

    def on_link_failure(self, next_hop, frame):
        self.routing.handle_link_failure(next_hop)

    def on_mac_deliver(self, frame, rx_dbm):
        if frame.kind == mac_mod.RREQ:
            self.routing.handle_rreq(frame)
        elif frame.kind == mac_mod.RREP:
            self.routing.handle_rrep(frame)
        elif frame.kind == mac_mod.DATA:
            if frame.mac_dest == BROADCAST:
                return  # identification requests concern targets only
            if frame.net_dest == self.node_id:
                self.on_net_deliver(frame.payload)
            else:
                self.routing.forward(frame)

    def on_net_deliver(self, payload):
        if payload.get("type") == "id_reply":
            timer = self.pending_id.pop(payload["event"], None)
            if timer is not None:
                self.sim.sched.cancel(timer)
                self.send_report(payload["event"], identified=True)

    def detect(self, event_id, target_id, target_is_radio):
        if target_is_radio:
            self._request_identification(event_id, target_id)
        else:
            self.send_report(event_id, identified=False)

    def _request_identification(self, event_id, target_id):
        frame = Frame(kind=mac_mod.DATA, mac_source=self.node_id,
                      mac_dest=BROADCAST, net_source=self.node_id,
                      net_dest=BROADCAST, sequence=self.next_sequence(),
                      size_bits=self.sim.cfg.scenario.id_bits,
                      payload={"type": "id_request", "event": event_id,
                               "target": target_id, "sensor": self.node_id})
        self.mac.enqueue(frame)
        timeout = self.sim.sched.now + self.sim.cfg.scenario.identification_timeout
        self.pending_id[event_id] = self.sim.sched.schedule(
            timeout, "timer-expiry",
            lambda: self._identification_timeout(event_id),
            target=self.node_id)

    def _identification_timeout(self, event_id):
        if self.pending_id.pop(event_id, None) is not None:
            self.send_report(event_id, identified=False)

    def send_report(self, event_id, identified):
        self.routing.send_to(self.sim.base_id,
                             self.sim.cfg.mac.data_bits,
                             {"type": "report", "event": event_id,
                              "identified": identified})


class BaseStationNode(SensorNode):
    """Sink: routes like a sensor, records report arrivals."""

    def on_net_deliver(self, payload):
        if payload.get("type") == "report":
            self.sim.collector.record_delivery(payload["event"],
                                               self.sim.sched.now)
        else:
            super().on_net_deliver(payload)


class Target:
    """Mobile event source; random-waypoint at constant speed."""

    def __init__(self, node_id, position, speed, area, rng):
        self.node_id = node_id
        self.position = tuple(position)
        self.speed = speed
        self.area = area
        self.rng = rng
        self.waypoint = self._draw_waypoint()
        self.event_counter = 0

    def _draw_waypoint(self):
        return (self.rng.uniform(0, self.area[0]),
                self.rng.uniform(0, self.area[1]))

    def step(self, dt):
        x, y = self.position
        wx, wy = self.waypoint
        dx, dy = wx - x, wy - y
        dist = math.hypot(dx, dy)
        reach = self.speed * dt
        if dist <= reach:
            self.position = (wx, wy)
            self.waypoint = self._draw_waypoint()
        elif dist > 0:
            self.position = (x + dx / dist * reach, y + dy / dist * reach)

    def next_event_id(self):
        self.event_counter += 1
        return (self.node_id, self.event_counter)


class RadioTargetNode(NodeBase):
    """Radio-equipped target: answers identification requests one-hop."""

    def __init__(self, node_id, sim):
        super().__init__(node_id)
        self.sim = sim

    def on_mac_deliver(self, frame, rx_dbm):
        pl = frame.payload
        if (frame.kind == mac_mod.DATA and frame.mac_dest == BROADCAST
                and pl.get("type") == "id_request"
                and pl.get("target") == self.node_id):
            reply = Frame(kind=mac_mod.DATA, mac_source=self.node_id,
                          mac_dest=pl["sensor"], net_source=self.node_id,
                          net_dest=pl["sensor"], sequence=self.next_sequence(),
                          size_bits=self.sim.cfg.scenario.id_bits,
                          payload={"type": "id_reply", "event": pl["event"]})
            self.mac.enqueue(reply)
