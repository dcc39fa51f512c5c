"""Wires one complete run: engine, medium, MAC, routing, scenario, metrics."""

import math
from dataclasses import dataclass, field, replace

from . import radio as radio_mod
from .engine import RngStreams, Scheduler
from .mac import MacParams, make_mac
from .medium import Medium
from .metrics import ENERGY_PRESETS, EnergyParams, MetricsCollector
from .radio import SPEED_OF_LIGHT, RadioParams, max_hop_distance
from .routing import AodvRouting, RoutingParams
from .scenario import (BaseStationNode, RadioTargetNode, ScenarioParams,
                       SensorNode, Target, place_nodes)


@dataclass
class RunConfig:
    radio: RadioParams = field(default_factory=lambda: radio_mod.preset("uwb"))
    mac: MacParams = field(default_factory=MacParams)
    routing: RoutingParams = field(default_factory=RoutingParams)
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    energy: EnergyParams = field(default_factory=lambda: replace(ENERGY_PRESETS["uwb"]))
    truncation_guard: float = 5.0
    ideal_channel: bool = False
    trace: bool = False

    def validate(self, warn=None):
        self.radio.validate()
        diag = math.hypot(self.scenario.area_width, self.scenario.area_height)
        self.mac.validate(self.radio, max_prop_delay=diag / SPEED_OF_LIGHT,
                          warn=warn)
        self.routing.validate()
        self.scenario.validate()
        self.energy.validate()
        if self.truncation_guard < 0 or self.truncation_guard >= self.scenario.sim_duration:
            raise ValueError("truncation_guard must be within [0, sim_duration)")
        return self


class Simulation:
    """One seeded run of the full scenario."""

    def __init__(self, cfg: RunConfig, seed):
        cfg.validate()
        self.cfg = cfg
        self.seed = seed
        self.sched = Scheduler(trace=cfg.trace)
        self.rngs = RngStreams(seed)
        sc = cfg.scenario

        n_sensors = sc.n_sensors - 1
        self.sensor_ids = list(range(n_sensors))
        self.base_id = n_sensors
        target_ids = list(range(sc.n_sensors, sc.n_sensors + sc.n_targets))
        self.radio_target_ids = set(target_ids[:sc.n_radio_targets])

        self.collector = MetricsCollector(
            energy_nodes=self.sensor_ids + [self.base_id])
        self.medium = Medium(self.sched, cfg.radio, self.rngs, self.collector,
                             ideal=cfg.ideal_channel)

        hop = max_hop_distance(cfg.radio)
        sensor_pos, base_pos, target_pos = place_nodes(
            sc, hop, self.rngs.stream("placement"))

        self.nodes = {}
        for nid, pos in zip(self.sensor_ids, sensor_pos):
            self._add_routed_node(SensorNode(nid, self), pos)
        self._add_routed_node(BaseStationNode(self.base_id, self), base_pos)

        area = (sc.area_width, sc.area_height)
        self.targets = []
        for nid, pos in zip(target_ids, target_pos):
            t = Target(nid, pos, sc.target_speed, area,
                       self.rngs.stream("mobility", nid))
            self.targets.append(t)
            if nid in self.radio_target_ids:
                node = RadioTargetNode(nid, self)
                node.mac = make_mac(node, cfg.mac, self.medium, self.sched,
                                    self.rngs, self.collector)
                self.nodes[nid] = node
                self.medium.add_node(node, pos)

        self._schedule_traffic()
        if sc.target_speed > 0 and self.targets:
            self.sched.schedule(sc.mobility_tick, "mobility-step",
                                self._mobility_step)

        self.metrics = None

    def _add_routed_node(self, node, pos):
        cfg = self.cfg
        node.pos = tuple(pos)
        node.mac = make_mac(node, cfg.mac, self.medium, self.sched,
                            self.rngs, self.collector)
        node.routing = AodvRouting(node, cfg.routing, node.mac, self.sched,
                                   self.rngs, self.collector)
        self.nodes[node.node_id] = node
        self.medium.add_node(node, pos)

    # -- application traffic -------------------------------------------

    def _schedule_traffic(self):
        sc = self.cfg.scenario
        for t in self.targets:
            first = self.rngs.stream("traffic", t.node_id).uniform(
                0.0, sc.event_jitter) if sc.event_jitter > 0 else 0.0
            self.sched.schedule(first, "app-event",
                                lambda tt=t: self._emit(tt), target=t.node_id)

    def _emit(self, target):
        sc = self.cfg.scenario
        now = self.sched.now
        eid = target.next_event_id()
        self.collector.record_event(eid, now)
        ex, ey = target.position
        is_radio = target.node_id in self.radio_target_ids
        for nid in self.sensor_ids + [self.base_id]:
            node = self.nodes[nid]
            if math.hypot(node.pos[0] - ex, node.pos[1] - ey) <= sc.detection_range:
                node.detect(eid, target.node_id, is_radio)
        gap = sc.event_period
        if sc.event_jitter > 0:
            gap += self.rngs.stream("traffic", target.node_id).uniform(
                0.0, sc.event_jitter)
        self.sched.schedule(now + gap, "app-event",
                            lambda: self._emit(target), target=target.node_id)

    def _mobility_step(self):
        sc = self.cfg.scenario
        for t in self.targets:
            t.step(sc.mobility_tick)
            if t.node_id in self.radio_target_ids:
                self.medium.update_position(t.node_id, t.position)
        self.sched.schedule(self.sched.now + sc.mobility_tick,
                            "mobility-step", self._mobility_step)

    # -------------------------------------------------------------------

    def run(self):
        sc = self.cfg.scenario
        self.sched.run(sc.sim_duration)
        self.metrics = self.collector.finalize(
            sc.sim_duration, self.cfg.energy,
            truncation_guard=self.cfg.truncation_guard)
        return self.metrics


def run_single(cfg: RunConfig, seed):
    sim = Simulation(cfg, seed)
    sim.run()
    return sim
