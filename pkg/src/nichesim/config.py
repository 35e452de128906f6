"""Run configuration: dataclasses plus a sectioned key=value file format.

A config file looks like::

    [simulation]
    generations = 300
    mode = H1

    [neat]
    population_size = 50

Overrides use dotted keys (``neat.add_node_rate=0.05``); keys of the
``simulation`` section may be given bare (``generations=2``).
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field

from .fitness import FitnessMode
from .neat import NeatConfig
from .soundscape import TransmissionMode

LOG_DETAILS = ("summary", "full-signals")


class ConfigError(ValueError):
    pass


@dataclass
class AnalysisConfig:
    perplexity: float = 30.0
    tsne_iterations: int = 1000
    learning_rate: float = 200.0
    exaggeration: float = 12.0
    exaggeration_iterations: int = 250
    smoothing_window: int = 1

    def __post_init__(self):
        if self.perplexity <= 1:
            raise ValueError("perplexity must exceed 1")
        if self.tsne_iterations < 1 or self.smoothing_window < 1:
            raise ValueError("tsne_iterations and smoothing_window must be >= 1")


@dataclass
class SimulationConfig:
    generations: int = 300
    mode: FitnessMode = FitnessMode.H1
    transmission: TransmissionMode = TransmissionMode.BINARY
    seed: int = 0
    log_detail: str = "summary"
    # generations between stored raw signals when log_detail is full-signals
    signal_stride: int = 1
    activation_slope: float = 4.9
    neat: NeatConfig = field(default_factory=NeatConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)

    def __post_init__(self):
        self.mode = FitnessMode(self.mode)
        self.transmission = TransmissionMode(self.transmission)
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if self.log_detail not in LOG_DETAILS:
            raise ValueError(f"log_detail must be one of {LOG_DETAILS}, got {self.log_detail!r}")
        if self.signal_stride < 1:
            raise ValueError("signal_stride must be >= 1")
        if not -(2**63) <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if dataclasses.is_dataclass(value):
                out[f.name] = dataclasses.asdict(value)
            elif hasattr(value, "value"):
                out[f.name] = value.value
            else:
                out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        neat = NeatConfig(**data.pop("neat", {}))
        analysis = AnalysisConfig(**data.pop("analysis", {}))
        return cls(neat=neat, analysis=analysis, **data)


_SECTIONS = {
    "simulation": SimulationConfig,
    "neat": NeatConfig,
    "analysis": AnalysisConfig,
}


def valid_keys():
    keys = []
    for section, klass in _SECTIONS.items():
        for f in dataclasses.fields(klass):
            if f.name in _SECTIONS:
                continue
            keys.append(f"{section}.{f.name}")
    return keys


def _field_type(klass, name):
    default = next(f for f in dataclasses.fields(klass) if f.name == name).default
    return type(default)


def _convert(klass, name, raw):
    kind = _field_type(klass, name)
    raw = raw.strip()
    if kind is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw


def _apply(values, dotted, raw, where):
    if "." in dotted:
        section, key = dotted.split(".", 1)
    else:
        section, key = "simulation", dotted
    full = f"{section}.{key}"
    if full not in valid_keys():
        raise ConfigError(f"{where}: unknown key {full!r}; valid keys: {', '.join(valid_keys())}")
    try:
        values[section][key] = _convert(_SECTIONS[section], key, raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {full!r}: {exc}") from None


def _build(values):
    try:
        sim = dict(values["simulation"])
        return SimulationConfig(neat=NeatConfig(**values["neat"]),
                                analysis=AnalysisConfig(**values["analysis"]), **sim)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def parse_config(text, overrides=(), source="<config>"):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    values = {name: {} for name in _SECTIONS}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]; "
                              f"valid sections: {', '.join(_SECTIONS)}")
        for key, raw in parser.items(section):
            _apply(values, f"{section}.{key}", raw, f"{source} [{section}] {key}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key=value")
        key, raw = item.split("=", 1)
        _apply(values, key.strip(), raw, f"--set {item}")
    return _build(values)


def load_config(path=None, overrides=()):
    if path is None:
        return parse_config("", overrides)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, overrides, source=str(path))


def dump_config(cfg):
    """Render ``cfg`` in the file format accepted by ``parse_config``."""
    data = cfg.to_dict()
    lines = []
    for section in _SECTIONS:
        lines.append(f"[{section}]")
        block = data if section == "simulation" else data[section]
        for key, value in block.items():
            if key in _SECTIONS:
                continue
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
