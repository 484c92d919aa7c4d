"""Mobility/call traces: file format, seeded generators.

Trace file, one event per line::

    time_s,imsi,kind,arg

``kind`` is one of ``move`` (arg: cell), ``call`` (arg: callee IMSI),
``on`` (arg: cell) or ``off`` (no arg). Blank lines and ``#`` comments are
ignored. Times are integer seconds and must not decrease.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import TraceError, TraceOutOfOrder, UnknownLa
from .network import Topology

DAY = 86_400


class EventKind(str, enum.Enum):
    MOVE = "move"
    CALL = "call"
    ON = "on"
    OFF = "off"


_KIND_ALIASES = {
    "move": EventKind.MOVE,
    "move_to_cell": EventKind.MOVE,
    "call": EventKind.CALL,
    "call_to": EventKind.CALL,
    "on": EventKind.ON,
    "power_on": EventKind.ON,
    "off": EventKind.OFF,
    "power_off": EventKind.OFF,
}


@dataclass(frozen=True)
class TraceEvent:
    time: int
    imsi: str
    kind: EventKind
    arg: Optional[str] = None

    def __post_init__(self) -> None:
        if self.time < 0:
            raise ValueError("event time must be non-negative")
        if (self.kind is EventKind.OFF) != (self.arg is None):
            raise ValueError(f"{self.kind.value} events {'take no' if self.kind is EventKind.OFF else 'need an'} argument")

    @property
    def day(self) -> int:
        return self.time // DAY


def check_order(events: Sequence[TraceEvent]) -> None:
    for i in range(1, len(events)):
        if events[i].time < events[i - 1].time:
            raise TraceOutOfOrder(
                f"event {i} at t={events[i].time} precedes previous t={events[i - 1].time}"
            )


def parse_trace(text: str) -> list[TraceEvent]:
    events: list[TraceEvent] = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        row = [f.strip() for f in row]
        if len(row) == 3:
            row.append("")
        if len(row) != 4:
            raise TraceError(f"expected 4 fields, got {len(row)}", lineno)
        t, imsi, kind, arg = row
        try:
            time = int(t)
        except ValueError:
            raise TraceError(f"bad time {t!r}", lineno) from None
        if kind.lower() not in _KIND_ALIASES:
            raise TraceError(f"unknown event kind {kind!r}", lineno)
        if not imsi:
            raise TraceError("empty IMSI", lineno)
        try:
            ev = TraceEvent(time, imsi, _KIND_ALIASES[kind.lower()], arg or None)
        except ValueError as exc:
            raise TraceError(str(exc), lineno) from None
        if events and ev.time < events[-1].time:
            raise TraceOutOfOrder(f"t={ev.time} precedes previous t={events[-1].time}", lineno)
        events.append(ev)
    return events


def read_trace(path: str | Path) -> list[TraceEvent]:
    return parse_trace(Path(path).read_text())


def format_trace(events: Iterable[TraceEvent]) -> str:
    buf = io.StringIO()
    buf.write("# time_s,imsi,kind,arg\n")
    w = csv.writer(buf, lineterminator="\n")
    for ev in events:
        w.writerow([ev.time, ev.imsi, ev.kind.value, ev.arg or ""])
    return buf.getvalue()


def write_trace(events: Iterable[TraceEvent], path: str | Path) -> None:
    Path(path).write_text(format_trace(events))


class Lcg:
    """Linear congruential generator; constants are part of the run config
    so that traces are reproducible outside Python."""

    def __init__(self, seed: int, a: int = 1664525, c: int = 1013904223, m: int = 2**32):
        if m <= 0:
            raise ValueError("modulus must be positive")
        self.a, self.c, self.m = a, c, m
        self.state = seed % m

    def next(self) -> int:
        self.state = (self.a * self.state + self.c) % self.m
        return self.state

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next() % n

    def choice(self, seq: Sequence):
        return seq[self.randbelow(len(seq))]


def parse_time_of_day(text: str) -> int:
    """``"08:30"`` or ``"08:30:15"`` -> seconds after midnight."""
    m = re.fullmatch(r"\s*(\d{1,2}):(\d{2})(?::(\d{2}))?\s*", text)
    if not m:
        raise ValueError(f"bad time of day {text!r}; expected HH:MM")
    h, mi, s = int(m[1]), int(m[2]), int(m[3] or 0)
    if h > 23 or mi > 59 or s > 59:
        raise ValueError(f"bad time of day {text!r}")
    return h * 3600 + mi * 60 + s


def format_time_of_day(seconds: int) -> str:
    h, rem = divmod(seconds, 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}" if s == 0 else f"{h:02d}:{m:02d}:{s:02d}"


@dataclass(frozen=True)
class CommuterParams:
    """Daily home -> transit area(s) -> work -> home commute.

    Defaults: leave home 08:00, enter the transit area at 08:30, stay ten
    minutes, reach work at 08:40, be home again at 20:00.
    """

    home_la: str = "LA1"
    work_la: str = "LA3"
    transit_las: tuple[str, ...] = ("LA2",)
    leave_time: int = 8 * 3600
    return_time: int = 20 * 3600
    transit_offset: int = 1800  # leave_time -> first transit LA
    transit_dwell: int = 600
    days: int = 7
    population: int = 1
    seed: int = 0
    jitter: int = 0  # max extra seconds added to departure times
    evening_via_transit: bool = False
    imsi_prefix: str = "404010000000"

    def __post_init__(self) -> None:
        if not self.leave_time < self.return_time:
            raise ValueError("leave_time must be before return_time")
        if self.transit_dwell <= 0:
            raise ValueError("transit_dwell must be positive")
        if self.days < 0 or self.population < 0 or self.jitter < 0:
            raise ValueError("days, population and jitter must be non-negative")
        at_work = self.leave_time + self.jitter + self.transit_offset + self.transit_dwell * len(self.transit_las)
        if at_work >= self.return_time:
            raise ValueError("morning commute does not finish before return_time")
        back = self.return_time + self.jitter
        if self.evening_via_transit:
            back += self.transit_offset + self.transit_dwell * len(self.transit_las)
        if back >= DAY:
            raise ValueError("evening commute runs past midnight")

    def imsi(self, i: int) -> str:
        return f"{self.imsi_prefix}{i + 1:03d}"


def _first_cell(topology: Topology, la: str) -> str:
    cells = topology.cells_in_la(la)
    if not cells:
        raise UnknownLa(f"location area {la!r} has no cells")
    return cells[0]


def generate_commuter_trace(params: CommuterParams, topology: Topology, lcg_constants: tuple[int, int, int] | None = None) -> list[TraceEvent]:
    home = _first_cell(topology, params.home_la)
    work = _first_cell(topology, params.work_la)
    transit = [_first_cell(topology, la) for la in params.transit_las]
    rng = Lcg(params.seed, *(lcg_constants or ()))

    def jit() -> int:
        return rng.randbelow(params.jitter + 1) if params.jitter else 0

    keyed: list[tuple[int, int, TraceEvent]] = []
    seq = 0

    def add(t: int, imsi: str, kind: EventKind, arg: Optional[str]) -> None:
        nonlocal seq
        keyed.append((t, seq, TraceEvent(t, imsi, kind, arg)))
        seq += 1

    if params.days > 0:
        for i in range(params.population):
            add(0, params.imsi(i), EventKind.ON, home)
    for d in range(params.days):
        base = d * DAY
        for i in range(params.population):
            imsi = params.imsi(i)
            t = base + params.leave_time + jit() + params.transit_offset
            for cell in transit:
                add(t, imsi, EventKind.MOVE, cell)
                t += params.transit_dwell
            add(t, imsi, EventKind.MOVE, work)
            t = base + params.return_time + jit()
            if params.evening_via_transit:
                t += params.transit_offset
                for cell in reversed(transit):
                    add(t, imsi, EventKind.MOVE, cell)
                    t += params.transit_dwell
            add(t, imsi, EventKind.MOVE, home)
    keyed.sort(key=lambda k: (k[0], k[1]))
    return [ev for _, _, ev in keyed]


def random_trace(
    topology: Topology,
    subscribers: int,
    days: int,
    events_per_day: int = 8,
    seed: int = 0,
    lcg_constants: tuple[int, int, int] | None = None,
) -> list[TraceEvent]:
    """Seeded random mix of moves, calls and power cycling, for property tests.

    Every subscriber powers on at t=0 in a random cell.
    """
    rng = Lcg(seed, *(lcg_constants or ()))
    cells = sorted(topology.cells)
    imsis = [f"IMSI{i:03d}" for i in range(subscribers)]
    events = [TraceEvent(0, imsi, EventKind.ON, rng.choice(cells)) for imsi in imsis]
    body: list[tuple[int, int, TraceEvent]] = []
    for d in range(days):
        for _ in range(events_per_day):
            t = d * DAY + 1 + rng.randbelow(DAY - 1)
            imsi = rng.choice(imsis)
            r = rng.randbelow(100)
            if r < 55:
                ev = TraceEvent(t, imsi, EventKind.MOVE, rng.choice(cells))
            elif r < 85:
                ev = TraceEvent(t, imsi, EventKind.CALL, rng.choice(imsis))
            elif r < 93:
                ev = TraceEvent(t, imsi, EventKind.OFF)
            else:
                ev = TraceEvent(t, imsi, EventKind.ON, rng.choice(cells))
            body.append((t, len(body), ev))
    body.sort(key=lambda k: (k[0], k[1]))
    return events + [ev for _, _, ev in body]
