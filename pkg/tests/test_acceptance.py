"""Acceptance gate: ordered-trend criteria with replication confidence,
analytic oracles and determinism checks.

Each criterion prints exactly one PASS/FAIL line (shown live via
capsys.disabled) and fails the suite if its condition does not hold.
Trend comparisons reuse one common seed list across sweep points so the
shared scenario randomness (placement, mobility, traffic) cancels out of
the ordering.
"""

import csv
import filecmp
import math
import time
from collections import deque
from dataclasses import replace
from fractions import Fraction
from statistics import fmean

import pytest

from uwbsim import radio
from uwbsim.cli import main as cli_main
from uwbsim.engine import RngStreams
from uwbsim.experiment import pooled_standard_error
from uwbsim.metrics import ENERGY_PRESETS, node_energy_mwh
from uwbsim.radio import max_hop_distance, noise_floor_dbm
from uwbsim.simulation import RunConfig, Simulation, run_single
from uwbsim.validation import aloha_delivery_ratio

SEEDS_20 = [1000 + i for i in range(20)]
SEEDS_10 = SEEDS_20[:10]
SEEDS_8 = SEEDS_20[:8]
SEEDS_6 = SEEDS_20[:6]


def make_cfg(preset=None, dur=15.0, guard=5.0, **overrides):
    cfg = RunConfig()
    if preset:
        cfg.radio = radio.preset(preset)
        cfg.energy = replace(ENERGY_PRESETS[preset])
    cfg.scenario.sim_duration = dur
    cfg.truncation_guard = guard
    for key, value in overrides.items():
        section, attr = key.split("__")
        setattr(getattr(cfg, section), attr, value)
    return cfg


def run_point(seeds, **kw):
    return [run_single(make_cfg(**kw), s).metrics for s in seeds]


def rels(ms):
    return [m.reliability for m in ms]


def lats(ms):
    return [m.mean_latency for m in ms]


@pytest.fixture
def verdict(capsys):
    def _verdict(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, f"criterion {number}: {detail}"
    return _verdict


# -- shared run batches -------------------------------------------------

@pytest.fixture(scope="module")
def retx_sweep():
    """Default unslotted scenario over the retransmission-limit sweep."""
    t0 = time.time()
    runs = {rl: run_point(SEEDS_20, mac__retx_limit=rl)
            for rl in (0, 1, 2, 4, 6)}
    return runs, time.time() - t0


@pytest.fixture(scope="module")
def slotted_zero_retx():
    return run_point(SEEDS_20, mac__variant="slotted-aloha",
                     mac__retx_limit=0)


def _dense_overrides():
    """Compact saturated variant: same field logic, base funnel overloads."""
    return dict(scenario__event_period=0.2, scenario__area_width=40.0,
                scenario__area_height=30.0, scenario__n_sensors=10,
                scenario__n_targets=40, dur=10.0, guard=4.0)


@pytest.fixture(scope="module")
def matched_stacks():
    """UWB ALOHA variants and OQPSK CSMA under identical traffic."""
    shared = dict(mac__retx_limit=1, scenario__event_period=0.3,
                  routing__buffer_capacity=1,
                  routing__rreq_min_interval=0.05)
    return {
        "uwb-unslotted": run_point(SEEDS_8, mac__variant="unslotted-aloha",
                                   **shared),
        "uwb-slotted": run_point(SEEDS_8, mac__variant="slotted-aloha",
                                 **shared),
        "oqpsk-csma": run_point(SEEDS_8, preset="oqpsk",
                                mac__variant="csma-ca",
                                mac__retx_delay=8e-3, **shared),
    }


# -- criteria -----------------------------------------------------------

def test_01_retransmission_limit_raises_reliability(retx_sweep, verdict):
    runs, elapsed = retx_sweep
    means = {rl: fmean(rels(ms)) for rl, ms in runs.items()}
    ordered = [means[rl] for rl in (0, 1, 2, 4, 6)]
    monotone = all(b >= a - 1e-12 for a, b in zip(ordered, ordered[1:]))
    gap = means[6] - means[0]
    se = pooled_standard_error(rels(runs[0]), rels(runs[6]))
    ok = monotone and gap > 2 * se and elapsed < 300.0
    verdict(1, ok,
            f"reliability over retx 0..6 = "
            f"{[round(v, 3) for v in ordered]}, gap {gap:.3f} vs 2*SE "
            f"{2 * se:.3f}, {elapsed:.0f}s runtime")


def test_02_excess_retransmissions_backfire(verdict):
    dense = _dense_overrides()
    six = run_point(SEEDS_10, mac__retx_limit=6, **dense)
    sixteen = run_point(SEEDS_10, mac__retx_limit=16, **dense)
    drop = fmean(rels(six)) - fmean(rels(sixteen))
    se = pooled_standard_error(rels(six), rels(sixteen))
    lat6, lat16 = fmean(lats(six)), fmean(lats(sixteen))
    ok = drop >= se and lat16 > lat6
    verdict(2, ok,
            f"high-load reliability retx16 {fmean(rels(sixteen)):.3f} vs "
            f"retx6 {fmean(rels(six)):.3f} (drop {drop:.3f}, SE {se:.3f}); "
            f"latency {lat16 * 1e3:.0f}ms vs {lat6 * 1e3:.0f}ms")


def test_03_slotted_more_reliable_unslotted_faster(retx_sweep,
                                                   slotted_zero_retx,
                                                   verdict):
    unslotted = retx_sweep[0][0]
    slotted = slotted_zero_retx
    rel_gap = fmean(rels(slotted)) - fmean(rels(unslotted))
    rel_se = pooled_standard_error(rels(slotted), rels(unslotted))
    lat_gap = fmean(lats(slotted)) - fmean(lats(unslotted))
    lat_se = pooled_standard_error(lats(slotted), lats(unslotted))
    ok = rel_gap >= rel_se and lat_gap >= lat_se
    verdict(3, ok,
            f"reliability slotted {fmean(rels(slotted)):.3f} > unslotted "
            f"{fmean(rels(unslotted)):.3f} (gap {rel_gap:.3f}, SE "
            f"{rel_se:.3f}); latency unslotted "
            f"{fmean(lats(unslotted)) * 1e3:.0f}ms < slotted "
            f"{fmean(lats(slotted)) * 1e3:.0f}ms (gap {lat_gap * 1e3:.0f}ms,"
            f" SE {lat_se * 1e3:.0f}ms)")


def test_04_larger_slots_hurt_reliability_and_latency(verdict):
    data_airtime = 1152 / 1e6
    rel_means, lat_means = [], []
    for mult in (1.5, 2.0, 4.0, 8.0):
        ms = run_point(SEEDS_8, mac__variant="slotted-aloha",
                       mac__retx_limit=1, mac__slot_size=mult * data_airtime)
        rel_means.append(fmean(rels(ms)))
        lat_means.append(fmean(lats(ms)))
    rel_down = all(b <= a + 1e-12 for a, b in zip(rel_means, rel_means[1:]))
    lat_up = all(b >= a - 1e-12 for a, b in zip(lat_means, lat_means[1:]))
    ok = rel_down and lat_up
    verdict(4, ok,
            f"slot 1.5x..8x reliability {[round(v, 3) for v in rel_means]} "
            f"non-increasing={rel_down}; latency "
            f"{[round(v * 1e3) for v in lat_means]}ms non-decreasing={lat_up}")


def test_05_longer_retx_delay_raises_reliability_and_latency(verdict):
    rel_means, lat_means = [], []
    for rd in (1.5e-3, 3e-3, 6e-3, 12e-3):
        ms = run_point(SEEDS_6, scenario__detection_range=30.0,
                       mac__retx_limit=6, mac__retx_delay=rd,
                       dur=12.0, guard=4.0)
        rel_means.append(fmean(rels(ms)))
        lat_means.append(fmean(lats(ms)))
    rel_up = all(b >= a - 1e-12 for a, b in zip(rel_means, rel_means[1:]))
    lat_up = all(b >= a - 1e-12 for a, b in zip(lat_means, lat_means[1:]))
    ok = rel_up and lat_up
    verdict(5, ok,
            f"retx delay 1.5..12ms reliability "
            f"{[round(v, 3) for v in rel_means]} non-decreasing={rel_up}; "
            f"latency {[round(v * 1e3, 1) for v in lat_means]}ms "
            f"non-decreasing={lat_up}")


def test_06_csma_oqpsk_baseline_band(matched_stacks, verdict):
    rel_o = fmean(rels(matched_stacks["oqpsk-csma"]))
    rel_u = fmean(rels(matched_stacks["uwb-unslotted"]))
    rel_s = fmean(rels(matched_stacks["uwb-slotted"]))
    lat_o = fmean(lats(matched_stacks["oqpsk-csma"]))
    ok = (rel_o < rel_u and rel_o < rel_s
          and 0.3 <= rel_o <= 0.7 and 1e-3 <= lat_o <= 1e-1)
    verdict(6, ok,
            f"OQPSK CSMA reliability {rel_o:.3f} (band 0.3..0.7) below UWB "
            f"unslotted {rel_u:.3f} and slotted {rel_s:.3f}; latency "
            f"{lat_o * 1e3:.1f}ms within 1..100ms")


def test_07_energy_accounting(matched_stacks, verdict):
    uwb_e = ENERGY_PRESETS["uwb"]
    # (a) closed form against exact rational arithmetic
    tx, rx = 123.456, 7890.123
    exact = (Fraction(tx) * 5 + Fraction(rx) * 20) / 3600
    got = node_energy_mwh(tx, rx, uwb_e)
    exact_ok = abs(got - float(exact)) <= 1e-9 * float(exact)
    # (b) always-listening day at 20 mW
    idle_ok = node_energy_mwh(0.0, 86400.0, uwb_e) == 480.0
    # (c) simulated daily energy ratio OQPSK / UWB
    e_uwb = fmean(m.mean_daily_energy
                  for m in matched_stacks["uwb-unslotted"])
    e_oqpsk = fmean(m.mean_daily_energy
                    for m in matched_stacks["oqpsk-csma"])
    ratio = e_oqpsk / e_uwb
    ok = exact_ok and idle_ok and ratio >= 2.0
    verdict(7, ok,
            f"closed form exact={exact_ok}, idle day 480 mWh={idle_ok}, "
            f"daily energy OQPSK {e_oqpsk:.0f} / UWB {e_uwb:.0f} mWh "
            f"= x{ratio:.2f}")


def test_08_aloha_delivery_matches_closed_forms(verdict):
    worst = 0.0
    details = []
    for load in (0.1, 0.5, 1.0):
        for slotted in (False, True):
            got = aloha_delivery_ratio(load, slotted, seed=42,
                                       n_attempts=20000)
            want = math.exp(-load if slotted else -2.0 * load)
            err = abs(got / want - 1.0)
            worst = max(worst, err)
            details.append(f"G={load}{'s' if slotted else 'p'}:{err * 100:.1f}%")
    ok = worst <= 0.05
    verdict(8, ok, f"ALOHA delivery vs exp(-2G)/exp(-G), errors "
                   f"{' '.join(details)} (max {worst * 100:.1f}%, limit 5%)")


def test_09_link_budget_golden_values(verdict):
    uwb, oqpsk = radio.preset("uwb"), radio.preset("oqpsk")
    checks = [
        (noise_floor_dbm(uwb), -89.29, 0.01),
        (noise_floor_dbm(oqpsk), -101.28, 0.01),
        (radio.crossover_distance(uwb), 6.79, 0.01),
        (max_hop_distance(uwb), 20.9, 0.5),
        (max_hop_distance(oqpsk), 28.3, 0.5),
    ]
    ok = all(abs(got - want) <= tol for got, want, tol in checks)
    verdict(9, ok,
            "noise floors {:.2f}/{:.2f} dBm, crossover {:.2f} m, max hops "
            "{:.1f}/{:.1f} m".format(*[c[0] for c in checks]))


def _bfs_hops(positions, hop, src, dst):
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in positions:
            if v not in dist and math.dist(positions[u],
                                           positions[v]) <= hop:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist.get(dst)


def test_10_route_hops_equal_bfs_shortest_paths(verdict):
    mismatches = 0
    pairs = 0
    for seed in (11, 22, 33, 44, 55):
        cfg = RunConfig(ideal_channel=True)
        cfg.scenario.n_targets = 0
        cfg.scenario.n_radio_targets = 0
        cfg.routing.rreq_jitter = 0.0
        sim = Simulation(cfg, seed)
        hop = max_hop_distance(cfg.radio)
        pos = {nid: sim.medium.position_of(nid)
               for nid in sim.sensor_ids + [sim.base_id]}
        picks = RngStreams(seed).stream("pairs").choice(
            sim.sensor_ids, size=20, replace=False)
        for src in picks:
            src = int(src)
            pairs += 1
            sim.nodes[src].routing.send_to(sim.base_id, 1152, {"p": src})
            sim.sched.run(sim.sched.now + 0.5)
            entry = sim.nodes[src].routing.live_route(sim.base_id)
            got = entry.hop_count if entry else None
            if got != _bfs_hops(pos, hop, src, sim.base_id):
                mismatches += 1
    ok = mismatches == 0
    verdict(10, ok, f"route hop counts vs BFS on 5 topologies: "
                    f"{pairs - mismatches}/{pairs} pairs equal")


def test_11_rerun_is_byte_identical(tmp_path, verdict):
    cfg_path = tmp_path / "det.cfg"
    cfg_path.write_text(
        "scenario.sim_duration = 4.0\n"
        "sim.truncation_guard = 1.5\n"
        "sweep.mac.retx_limit = 0, 2\n"
        "experiment.replications = 2\n"
        "experiment.base_seed = 17\n")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    code_a = cli_main([str(cfg_path), "--out", str(out_a), "--quiet"])
    code_b = cli_main([str(cfg_path), "--out", str(out_b), "--quiet"])
    same = all(filecmp.cmp(out_a / name, out_b / name, shallow=False)
               for name in ("results.csv", "summary.csv"))
    with open(out_a / "results.csv") as fh:
        n_rows = len(list(csv.DictReader(fh)))
    ok = code_a == 0 and code_b == 0 and same and n_rows == 4
    verdict(11, ok, f"two sweep reruns byte-identical={same}, "
                    f"{n_rows} result rows")
