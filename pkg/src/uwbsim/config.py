"""Flat key-value configuration with dotted section paths, plus the
experiment spec (sweep axes x replications) built from it.

Grammar: one `section.key = value` per line, `#` starts a comment,
unknown keys are rejected with their line number. Sweep axes are lines
of the form `sweep.<section.key> = v1, v2, ...`.
"""

import dataclasses
import hashlib
import itertools
from dataclasses import dataclass, field, replace

from . import radio as radio_mod
from .mac import MacParams
from .metrics import ENERGY_PRESETS, EnergyParams
from .radio import RadioParams
from .routing import RoutingParams
from .scenario import ScenarioParams
from .simulation import RunConfig


class ConfigError(Exception):
    pass


def _parse_bool(s):
    s = s.strip().lower()
    if s in ("true", "yes", "on", "1"):
        return True
    if s in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_pair(s):
    parts = [float(p) for p in s.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers: {s!r}")
    return tuple(parts)


_CONVERTERS = {int: lambda s: int(s, 0), float: float, bool: _parse_bool,
               str: lambda s: s.strip(), tuple: _parse_pair}


def _section_schema(section, cls):
    schema = {}
    for f in dataclasses.fields(cls):
        ann = f.type if isinstance(f.type, type) else eval(f.type)  # noqa: S307
        schema[f"{section}.{f.name}"] = _CONVERTERS[ann]
    return schema


SCHEMA = {
    "radio.preset": str.strip,
    "energy.preset": str.strip,
    **_section_schema("radio", RadioParams),
    **_section_schema("mac", MacParams),
    **_section_schema("routing", RoutingParams),
    **_section_schema("scenario", ScenarioParams),
    **_section_schema("energy", EnergyParams),
    "sim.truncation_guard": float,
    "sim.ideal_channel": _parse_bool,
    "sim.trace": _parse_bool,
    "experiment.replications": lambda s: int(s, 0),
    "experiment.base_seed": lambda s: int(s, 0),
}
# base_position accepts "x,y"
SCHEMA["scenario.base_position"] = _parse_pair


def convert_value(key, raw):
    if key not in SCHEMA:
        raise ConfigError(f"unknown configuration key {key!r}")
    try:
        return SCHEMA[key](raw)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}") from exc


@dataclass
class ExperimentSpec:
    values: dict = field(default_factory=dict)   # typed base values by key
    axes: list = field(default_factory=list)     # [(key, [typed values])]
    replications: int = 10
    base_seed: int = 1

    def points(self):
        """Cross-product of the sweep axes, in declaration order."""
        if not self.axes:
            return [dict()]
        keys = [k for k, _ in self.axes]
        return [dict(zip(keys, combo))
                for combo in itertools.product(*[vals for _, vals in self.axes])]

    def run_seed(self, point_index, replication):
        digest = hashlib.blake2b(f"{point_index}:{replication}".encode(),
                                 digest_size=8).digest()
        return self.base_seed ^ int.from_bytes(digest, "big")

    def add_axis(self, key, raw_values):
        vals = [convert_value(key, v) for v in raw_values]
        if not vals:
            raise ConfigError(f"sweep axis {key!r} has no values")
        self.axes.append((key, vals))


def parse_config(text, source="<config>"):
    spec = ExperimentSpec()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', "
                              f"got {stripped!r}")
        key, raw = (s.strip() for s in stripped.split("=", 1))
        try:
            if key.startswith("sweep."):
                spec.add_axis(key[len("sweep."):],
                              [v for v in raw.split(",") if v.strip()])
            elif key == "experiment.replications":
                spec.replications = convert_value(key, raw)
            elif key == "experiment.base_seed":
                spec.base_seed = convert_value(key, raw)
            else:
                spec.values[key] = convert_value(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return spec


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, source=str(path))


def build_run_config(values, warn=None):
    """Assemble and validate a RunConfig from typed key-value pairs."""
    radio_preset = values.get("radio.preset", "uwb")
    try:
        cfg = RunConfig(
            radio=radio_mod.preset(radio_preset),
            mac=MacParams(),
            routing=RoutingParams(),
            scenario=ScenarioParams(),
            energy=replace(ENERGY_PRESETS[values.get("energy.preset",
                                                     radio_preset)]),
        )
    except KeyError as exc:
        raise ConfigError(f"unknown preset {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    sections = {"radio": cfg.radio, "mac": cfg.mac, "routing": cfg.routing,
                "scenario": cfg.scenario, "energy": cfg.energy}
    for key, value in values.items():
        section, _, name = key.partition(".")
        if key in ("radio.preset", "energy.preset"):
            continue
        if section == "sim":
            if name == "truncation_guard":
                cfg.truncation_guard = value
            elif name == "ideal_channel":
                cfg.ideal_channel = value
            elif name == "trace":
                cfg.trace = value
            continue
        setattr(sections[section], name, value)
    try:
        cfg.validate(warn=warn)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg
