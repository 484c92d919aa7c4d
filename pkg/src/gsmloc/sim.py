"""Discrete-event driver: replays a trace against either scheme and counts signaling."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, fields
from typing import Callable, Iterable, Optional, Sequence

from .errors import DominanceViolation, SubscriberDetached, UnresolvableId
from .network import Network, Topology
from .protocol import (
    CallRoute,
    Message,
    MessageKind,
    MessageLog,
    RegistrationOutcome,
    deliver_call,
    detach,
    intra_la_move,
    register_arrival,
    release_tldn,
)
from .tiered import DAY, TierConfig, TieredVlr, intelligent_deliver, intelligent_register, tiered_network
from .traces import EventKind, TraceEvent, check_order

BASELINE = "baseline"
INTELLIGENT = "intelligent"
SCHEMES = (BASELINE, INTELLIGENT)


@dataclass
class Counters:
    hlr_profile_requests: int = 0
    hlr_location_requests: int = 0
    hlr_pointer_updates: int = 0
    vlr_lookups: int = 0
    cancellations: int = 0
    registrations_full: int = 0
    registrations_tier2_hit: int = 0
    registrations_tier1_hit: int = 0
    calls_delivered: int = 0
    calls_failed: int = 0
    calls_cache_hit: int = 0
    tier2_evictions: int = 0
    messages: int = 0

    def bump(self, name: str, n: int = 1) -> None:
        setattr(self, name, getattr(self, name) + n)

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def hlr_queries(self) -> int:
        return self.hlr_profile_requests + self.hlr_location_requests


COUNTER_NAMES = tuple(f.name for f in fields(Counters))

_MESSAGE_COUNTERS: dict[MessageKind, tuple[str, ...]] = {
    MessageKind.PROFILE_REQUEST: ("hlr_profile_requests",),
    MessageKind.BILLING_REFRESH: ("hlr_profile_requests",),
    MessageKind.LOCATION_REQUEST: ("hlr_location_requests",),
    MessageKind.PROFILE_RESPONSE_AND_HLR_UPDATE: ("hlr_pointer_updates",),
    MessageKind.HLR_POINTER_UPDATE: ("hlr_pointer_updates",),
    MessageKind.VLR_CHECK: ("vlr_lookups",),
    MessageKind.CANCEL_OLD: ("cancellations",),
}

_OUTCOME_COUNTER = {
    RegistrationOutcome.ALREADY_KNOWN: "registrations_tier1_hit",
    RegistrationOutcome.REGISTERED_FRESH: "registrations_full",
    RegistrationOutcome.TIER2_HIT_PROMOTED: "registrations_tier2_hit",
}


@dataclass
class Metrics:
    total: Counters = field(default_factory=Counters)
    per_day: dict[int, Counters] = field(default_factory=dict)
    per_msc: dict[str, Counters] = field(default_factory=dict)

    def bump(self, name: str, day: int, msc: Optional[str] = None, n: int = 1) -> None:
        self.total.bump(name, n)
        self.per_day.setdefault(day, Counters()).bump(name, n)
        if msc is not None:
            self.per_msc.setdefault(msc, Counters()).bump(name, n)

    def msc(self, msc: str) -> Counters:
        return self.per_msc.get(msc, Counters())

    def day(self, day: int) -> Counters:
        return self.per_day.get(day, Counters())

    def __getattr__(self, name: str) -> int:
        if name in COUNTER_NAMES:
            return getattr(self.total, name)
        raise AttributeError(name)


@dataclass(frozen=True)
class CallOutcome:
    index: int
    caller: str
    callee: str
    delivered: bool
    called_msc: Optional[str] = None


@dataclass
class SimConfig:
    tier: TierConfig = field(default_factory=TierConfig)
    horizon_days: int = 0  # keep sweeping day boundaries up to this day
    subscribers: Optional[Sequence[str]] = None


@dataclass
class SimResult:
    scheme: str
    metrics: Metrics
    log: MessageLog
    calls: list[CallOutcome]
    network: Network

    def __iter__(self):
        # allows ``metrics, log = run_simulation(...)``
        return iter((self.metrics, self.log))


def validate_trace(topology: Topology, trace: Sequence[TraceEvent], population: set[str]) -> None:
    check_order(trace)
    for i, ev in enumerate(trace):
        if ev.imsi not in population:
            raise UnresolvableId(f"event {i}: IMSI {ev.imsi!r} is not in the subscriber population")
        if ev.kind in (EventKind.MOVE, EventKind.ON) and ev.arg not in topology.cells:
            raise UnresolvableId(f"event {i}: unknown cell {ev.arg!r}")
        if ev.kind is EventKind.CALL and ev.arg not in population:
            raise UnresolvableId(f"event {i}: callee {ev.arg!r} is not in the subscriber population")


class Simulator:
    """Event loop for one scheme; ``handle`` one event at a time or use run_simulation."""

    def __init__(self, topology: Topology, scheme: str, config: SimConfig, population: Iterable[str]):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        self.scheme = scheme
        self.config = config
        self.topology = topology
        if scheme == INTELLIGENT:
            self.net = tiered_network(topology, config.tier)
            self._register = intelligent_register
            self._deliver = intelligent_deliver
        else:
            self.net = Network(topology)
            self._register = register_arrival
            self._deliver = deliver_call
        for imsi in sorted(population):
            self.net.provision(imsi)
        self.log = MessageLog()
        self.metrics = Metrics()
        self.calls: list[CallOutcome] = []
        self.next_boundary = DAY

    def _account(self, msgs: Iterable[Message]) -> None:
        for m in msgs:
            day = m.time // DAY
            self.metrics.bump("messages", day, m.msc)
            for name in _MESSAGE_COUNTERS.get(m.kind, ()):
                self.metrics.bump(name, day, m.msc)

    def sweep_until(self, t: int) -> None:
        while self.next_boundary <= t:
            b = self.next_boundary
            self.net.now = b
            if self.scheme == INTELLIGENT:
                for msc in self.topology.mscs:
                    tv: TieredVlr = self.net.vlrs[msc]  # type: ignore[assignment]
                    before = tv.evicted_count
                    tv.day_boundary(b, self.net.hlr)
                    if tv.evicted_count > before:
                        self.metrics.bump("tier2_evictions", b // DAY, msc, tv.evicted_count - before)
            self.next_boundary += DAY

    def _evictions_during(self, fn: Callable[[], object]):
        if self.scheme != INTELLIGENT:
            return fn()
        before = {m: v.evicted_count for m, v in self.net.vlrs.items()}  # type: ignore[attr-defined]
        try:
            return fn()
        finally:
            for m, v in self.net.vlrs.items():
                n = v.evicted_count - before[m]  # type: ignore[attr-defined]
                if n:
                    self.metrics.bump("tier2_evictions", self.net.now // DAY, m, n)

    def _register_at(self, imsi: str, cell: str) -> None:
        msc = self.topology.locate(cell)[1]
        outcome = self._evictions_during(lambda: self._register(self.net, imsi, cell, self.log))
        self.metrics.bump(_OUTCOME_COUNTER[outcome], self.net.now // DAY, msc)

    def handle(self, index: int, ev: TraceEvent) -> None:
        self.sweep_until(ev.time)
        self.net.now = ev.time
        start = len(self.log)
        day = ev.time // DAY
        if ev.kind in (EventKind.MOVE, EventKind.ON):
            rec = self.net.serving_record(ev.imsi)
            if rec is not None and ev.kind is EventKind.MOVE and self.topology.la_of(ev.arg) == rec.la:
                intra_la_move(self.net, ev.imsi, ev.arg, self.log)
            else:
                self._register_at(ev.imsi, ev.arg)
        elif ev.kind is EventKind.OFF:
            detach(self.net, ev.imsi)
        else:
            callee = ev.arg
            try:
                route: CallRoute = self._deliver(self.net, ev.imsi, callee, self.log)
            except SubscriberDetached:
                calling = self.net.hlr.lookup(ev.imsi).serving_vlr
                self.metrics.bump("calls_failed", day, calling)
                self.calls.append(CallOutcome(index, ev.imsi, callee, False))
            else:
                release_tldn(self.net, route.tldn)
                self.metrics.bump("calls_delivered", day, route.calling_msc)
                if MessageKind.LOCATION_REQUEST not in self.log.kinds(start):
                    self.metrics.bump("calls_cache_hit", day, route.calling_msc)
                self.calls.append(CallOutcome(index, ev.imsi, callee, True, route.called_msc))
        self._account(self.log[start:])


def run_simulation(
    topology: Topology,
    trace: Sequence[TraceEvent],
    scheme: str = BASELINE,
    config: SimConfig | None = None,
) -> SimResult:
    """Replay ``trace`` in order; same inputs always give the same metrics and log."""
    config = config or SimConfig()
    population = set(config.subscribers) if config.subscribers is not None else {ev.imsi for ev in trace}
    validate_trace(topology, trace, population)
    run = Simulator(topology, scheme, config, population)
    for i, ev in enumerate(trace):
        run.handle(i, ev)
    end = max(trace[-1].time if trace else 0, config.horizon_days * DAY)
    run.sweep_until(end)
    return SimResult(scheme, run.metrics, run.log, run.calls, run.net)


@dataclass
class Comparison:
    baseline: SimResult
    intelligent: SimResult
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def deltas(self, msc: Optional[str] = None) -> dict[str, tuple[int, int, int]]:
        b = self.baseline.metrics.msc(msc) if msc else self.baseline.metrics.total
        i = self.intelligent.metrics.msc(msc) if msc else self.intelligent.metrics.total
        return {
            name: (getattr(b, name), getattr(i, name), getattr(i, name) - getattr(b, name))
            for name in COUNTER_NAMES
        }

    def check(self) -> None:
        if self.violations:
            raise DominanceViolation("; ".join(self.violations))


def compare_schemes(
    topology: Topology,
    trace: Sequence[TraceEvent],
    config: SimConfig | None = None,
    runner: Callable[..., SimResult] = run_simulation,
) -> Comparison:
    base = runner(topology, trace, BASELINE, config)
    intel = runner(topology, trace, INTELLIGENT, config)
    violations = []
    bq, iq = base.metrics.total.hlr_queries(), intel.metrics.total.hlr_queries()
    if iq > bq:
        violations.append(f"intelligent HLR queries {iq} exceed baseline {bq}")
    if base.calls != intel.calls:
        diff = next(i for i, (a, b) in enumerate(zip(base.calls, intel.calls)) if a != b) if len(base.calls) == len(intel.calls) else None
        where = f" (first difference at call #{diff})" if diff is not None else ""
        violations.append(f"call routing differs between schemes{where}")
    return Comparison(base, intel, violations)


# --- serialization ---------------------------------------------------------

METRICS_HEADER = ("scheme", "scope", "key", *COUNTER_NAMES)


def metrics_rows(result: SimResult) -> list[list[str]]:
    m = result.metrics
    rows = [[result.scheme, "run", "", *map(str, m.total.as_dict().values())]]
    for msc in sorted(m.per_msc):
        rows.append([result.scheme, "msc", msc, *map(str, m.per_msc[msc].as_dict().values())])
    for day in sorted(m.per_day):
        rows.append([result.scheme, "day", str(day), *map(str, m.per_day[day].as_dict().values())])
    return rows


def format_metrics_csv(results: Iterable[SimResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for r in results:
        w.writerows(metrics_rows(r))
    return buf.getvalue()


def parse_metrics_csv(text: str) -> dict[str, Metrics]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != METRICS_HEADER:
        raise ValueError("not a metrics file: unexpected header")
    out: dict[str, Metrics] = {}
    for row in reader:
        scheme, scope, key, *vals = row
        c = Counters(*map(int, vals))
        m = out.setdefault(scheme, Metrics())
        if scope == "run":
            m.total = c
        elif scope == "msc":
            m.per_msc[key] = c
        elif scope == "day":
            m.per_day[int(key)] = c
        else:
            raise ValueError(f"unknown scope {scope!r}")
    return out


LOG_HEADER = ("time_s", "step", "kind", "src", "dst", "imsi", "msc")


def format_log_csv(log: MessageLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_HEADER)
    for m in log:
        w.writerow(m.as_row())
    return buf.getvalue()


def parse_log_csv(text: str) -> MessageLog:
    reader = csv.reader(io.StringIO(text))
    if tuple(next(reader)) != LOG_HEADER:
        raise ValueError("not a message log: unexpected header")
    log = MessageLog()
    for t, _step, kind, src, dst, imsi, msc in reader:
        log.emit(int(t), MessageKind(kind), src, dst, imsi, msc)
    return log


def _table(title: str, deltas: dict[str, tuple[int, int, int]]) -> list[str]:
    width = max(len(n) for n in deltas)
    lines = [title, f"  {'counter':<{width}}  {'baseline':>9}  {'intelligent':>11}  {'delta':>7}"]
    for name, (b, i, d) in deltas.items():
        lines.append(f"  {name:<{width}}  {b:>9}  {i:>11}  {d:>+7}")
    return lines


def format_report(cmp: Comparison) -> str:
    lines = _table("all MSCs", cmp.deltas())
    mscs = sorted(set(cmp.baseline.metrics.per_msc) | set(cmp.intelligent.metrics.per_msc))
    for msc in mscs:
        lines.append("")
        lines.extend(_table(f"MSC {msc}", cmp.deltas(msc)))
    lines.append("")
    lines.append("cost dominance and routing equivalence: " + ("OK" if cmp.ok else "VIOLATED"))
    lines.extend(f"  - {v}" for v in cmp.violations)
    return "\n".join(lines) + "\n"


def format_report_csv(cmp: Comparison) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scope", "key", "counter", "baseline", "intelligent", "delta"])
    for name, (b, i, d) in cmp.deltas().items():
        w.writerow(["run", "", name, b, i, d])
    mscs = sorted(set(cmp.baseline.metrics.per_msc) | set(cmp.intelligent.metrics.per_msc))
    for msc in mscs:
        for name, (b, i, d) in cmp.deltas(msc).items():
            w.writerow(["msc", msc, name, b, i, d])
    return buf.getvalue()
