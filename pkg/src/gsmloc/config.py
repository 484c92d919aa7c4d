"""Flat ``key = value`` run configuration.

Example::

    topology = topology.csv
    generator = commuter      # or: trace = trace.csv
    days = 7
    scheme = intelligent
    ttl_high = 14             # days
    admission = common_ms_gated

Relative paths are resolved against the directory holding the config file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .fuzzy import LinguisticLabel
from .sim import SCHEMES, SimConfig
from .tiered import DAY, Admission, TierConfig, WindowMode
from .traces import CommuterParams, parse_time_of_day

GENERATORS = ("commuter", "random")

_COMMUTER_KEYS = {
    "home_la", "work_la", "transit_las", "leave_time", "return_time", "transit_offset",
    "transit_dwell", "days", "population", "jitter", "evening_via_transit",
}
_RANDOM_KEYS = {"days", "subscribers", "events_per_day"}
_KEYS = {
    "topology", "trace", "generator", "scheme", "ttl_low", "ttl_medium", "ttl_high",
    "window_days", "window_mode", "admission", "refresh_billing", "seed", "output",
    "horizon_days", "thresholds", "lcg_a", "lcg_c", "lcg_m",
} | _COMMUTER_KEYS | _RANDOM_KEYS


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _duration(text: str) -> int:
    """Seconds, or ``HH:MM`` for durations written as clock offsets."""
    return parse_time_of_day(text) if ":" in text else int(text)


@dataclass
class RunConfig:
    topology: Path
    trace: Optional[Path] = None
    generator: Optional[str] = None
    generator_params: dict[str, str] = field(default_factory=dict)
    scheme: str = "baseline"
    tier: TierConfig = field(default_factory=TierConfig)
    seed: int = 0
    output: Optional[Path] = None
    horizon_days: int = 0
    lcg: tuple[int, int, int] = (1664525, 1013904223, 2**32)

    def sim_config(self) -> SimConfig:
        return SimConfig(tier=self.tier, horizon_days=self.horizon_days)

    def commuter_params(self) -> CommuterParams:
        p = self.generator_params
        kw: dict = {"seed": self.seed}
        try:
            for key in ("home_la", "work_la"):
                if key in p:
                    kw[key] = p[key]
            if "transit_las" in p:
                kw["transit_las"] = tuple(x.strip() for x in p["transit_las"].split(",") if x.strip())
            for key in ("leave_time", "return_time"):
                if key in p:
                    kw[key] = parse_time_of_day(p[key])
            for key in ("transit_offset", "transit_dwell"):
                if key in p:
                    kw[key] = _duration(p[key])
            for key in ("days", "population", "jitter"):
                if key in p:
                    kw[key] = int(p[key])
            if "evening_via_transit" in p:
                kw["evening_via_transit"] = _bool(p["evening_via_transit"])
            return CommuterParams(**kw)
        except ValueError as exc:
            raise ConfigError(f"commuter parameters: {exc}") from None


def parse_config(text: str, base: Path | None = None) -> RunConfig:
    base = base or Path(".")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value

    if "topology" not in values:
        raise ConfigError("missing 'topology'")
    has_trace = "trace" in values
    has_gen = "generator" in values
    if has_trace == has_gen:
        raise ConfigError("give exactly one of 'trace' or 'generator'")
    if has_trace and (_COMMUTER_KEYS | _RANDOM_KEYS) & values.keys():
        raise ConfigError("generator parameters given together with 'trace'")

    try:
        cfg = RunConfig(topology=base / values["topology"])
        if has_trace:
            cfg.trace = base / values["trace"]
        else:
            cfg.generator = values["generator"]
            if cfg.generator not in GENERATORS:
                raise ValueError(f"generator must be one of {', '.join(GENERATORS)}")
            allowed = _COMMUTER_KEYS if cfg.generator == "commuter" else _RANDOM_KEYS
            extra = (_COMMUTER_KEYS | _RANDOM_KEYS) & values.keys() - allowed
            if extra:
                raise ValueError(f"keys {sorted(extra)} do not apply to the {cfg.generator} generator")
            cfg.generator_params = {k: values[k] for k in allowed if k in values}
        cfg.scheme = values.get("scheme", "baseline")
        if cfg.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {', '.join(SCHEMES)}")
        cfg.seed = int(values.get("seed", "0"))
        if "output" in values:
            cfg.output = base / values["output"]
        cfg.horizon_days = int(values.get("horizon_days", "0"))
        cfg.lcg = (
            int(values.get("lcg_a", cfg.lcg[0])),
            int(values.get("lcg_c", cfg.lcg[1])),
            int(values.get("lcg_m", cfg.lcg[2])),
        )
        ttl = {}
        for label in LinguisticLabel:
            days = float(values.get(f"ttl_{label.value.lower()}", "7"))
            ttl[label] = round(days * DAY)
        thresholds = (2, 5)
        if "thresholds" in values:
            lo, hi = (int(x) for x in values["thresholds"].split(","))
            thresholds = (lo, hi)
        cfg.tier = TierConfig(
            ttl=ttl,
            window_days=int(values.get("window_days", "7")),
            window_mode=WindowMode(values.get("window_mode", "tumbling")),
            admission=Admission(values.get("admission", "common_ms_gated")),
            refresh_billing=_bool(values.get("refresh_billing", "false")),
            thresholds=thresholds,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def read_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)
