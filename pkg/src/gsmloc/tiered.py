"""Two-tier VLR with a fuzzy cache of frequent visitors.

Tier 1 is the ordinary VLR (subscribers currently in the MSC area). Tier 2
keeps, for each recent visitor, a copy of the profile together with per-day
visit counts over an observation window, a linguistic frequency label and
an expiry instant. A subscriber leaving the area is demoted from tier 1 to
tier 2 instead of being deleted; if they come back before the entry expires,
the profile is promoted back without asking the HLR for it.

Times are integer seconds; day ``k`` spans ``[k*DAY, (k+1)*DAY)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DayOutOfWindow, EmptyWindow
from .fuzzy import LinguisticLabel, VisitStats, classify_visits
from .network import HLR_NODE, Hlr, Network, Status, SubscriberProfile, Vlr, VlrRecord
from .protocol import (
    CallRoute,
    MessageKind,
    MessageLog,
    RegistrationOutcome,
    _call_endpoints,
    assign_tldn,
    full_registration,
    hlr_routed_delivery,
)

DAY = 86_400


class Admission(str, enum.Enum):
    COMMON_MS_GATED = "common_ms_gated"
    CACHE_ALL = "cache_all"


class WindowMode(str, enum.Enum):
    TUMBLING = "tumbling"
    SLIDING = "sliding"


def _default_ttls() -> dict[LinguisticLabel, int]:
    return {label: 7 * DAY for label in LinguisticLabel}


@dataclass
class TierConfig:
    ttl: dict[LinguisticLabel, int] = field(default_factory=_default_ttls)  # seconds
    window_days: int = 7
    window_mode: WindowMode = WindowMode.TUMBLING
    admission: Admission = Admission.COMMON_MS_GATED
    refresh_billing: bool = False
    thresholds: tuple[int, int] = (2, 5)

    def __post_init__(self) -> None:
        if self.window_days < 1:
            raise ValueError("window_days must be >= 1")
        if any(v < 0 for v in self.ttl.values()):
            raise ValueError("TTL must be non-negative")

    def ttl_for_label(self, label: LinguisticLabel) -> int:
        return self.ttl[label]


def ttl_for_label(label: LinguisticLabel, config: TierConfig | None = None) -> int:
    return (config or TierConfig()).ttl_for_label(label)


@dataclass
class FuzzyVlrRecord:
    profile: SubscriberProfile
    stats: VisitStats
    label: LinguisticLabel
    expiry: int
    last_la: str
    last_visit: int


@dataclass
class ObservationWindow:
    m: int
    daily_sets: list[set[str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.daily_sets:
            self.daily_sets = [set() for _ in range(self.m)]
        if len(self.daily_sets) != self.m:
            raise ValueError("daily_sets must have exactly m entries")


def get_common_ms(window: ObservationWindow | Iterable[Iterable[str]]) -> set[str]:
    """IMSIs seen on every day of the window."""
    days = window.daily_sets if isinstance(window, ObservationWindow) else [set(d) for d in window]
    if not days:
        raise EmptyWindow("observation window has no days")
    common = set(days[0])
    for d in days[1:]:
        common &= set(d)
    return common


class TieredVlr(Vlr):
    def __init__(self, msc: str, config: TierConfig | None = None, start: int = 0):
        super().__init__(msc)
        self.config = config or TierConfig()
        self.tier2: dict[str, FuzzyVlrRecord] = {}
        self.window_start = start
        self.window = ObservationWindow(self.config.window_days)
        self.evicted_count = 0

    # tier-1 view
    @property
    def tier1(self) -> dict[str, VlrRecord]:
        return self._records

    def day_index(self, now: int) -> int:
        d = (now - self.window_start) // DAY
        if not 0 <= d < self.window.m:
            raise DayOutOfWindow(f"t={now} is outside window starting at {self.window_start}")
        return d

    def is_live(self, imsi: str, now: int) -> bool:
        rec = self.tier2.get(imsi)
        return rec is not None and rec.expiry > now

    def observe(self, imsi: str, now: int) -> None:
        self.window.daily_sets[self.day_index(now)].add(imsi)

    def record_visit(
        self,
        imsi: str,
        day_index: int,
        la: str,
        now: Optional[int] = None,
        profile: Optional[SubscriberProfile] = None,
    ) -> VisitStats:
        if not 0 <= day_index < self.window.m:
            raise DayOutOfWindow(f"day {day_index} outside a {self.window.m}-day window")
        if now is None:
            now = self.window_start + day_index * DAY
        rec = self.tier2.get(imsi)
        if rec is None:
            if profile is None:
                t1 = self.lookup(imsi)
                if t1 is None:
                    raise KeyError(f"no profile available for {imsi}")
                profile = t1.profile
            stats = VisitStats(imsi, [0] * self.window.m)
            rec = FuzzyVlrRecord(profile, stats, LinguisticLabel.LOW, now, la, now)
            self.tier2[imsi] = rec
        elif profile is not None:
            rec.profile = profile
        rec.stats.per_day_visits[day_index] += 1
        rec.label = classify_visits(rec.stats, self.config.thresholds)
        rec.last_visit = now
        rec.last_la = la
        rec.expiry = now + self.config.ttl_for_label(rec.label)
        self.window.daily_sets[day_index].add(imsi)
        return rec.stats

    def promote(self, imsi: str, la: str, cell: str, profile: SubscriberProfile) -> VlrRecord:
        rec = VlrRecord(profile, la, cell, Status.IDLE)
        self.insert(rec)
        return rec

    def _demote(self, imsi: str, now: int) -> None:
        t1 = self._records.pop(imsi, None)
        if t1 is not None and self.is_live(imsi, now):
            t2 = self.tier2[imsi]
            t2.last_la = t1.la
            t2.profile = t1.profile

    def on_cancel(self, imsi: str, now: int) -> None:
        self._demote(imsi, now)

    def on_detach(self, imsi: str, now: int) -> None:
        self._demote(imsi, now)

    def drop_tier2(self, imsi: str) -> bool:
        if self.tier2.pop(imsi, None) is None:
            return False
        self.evicted_count += 1
        return True

    def expire_records(self, now: int, hlr: Optional[Hlr] = None) -> list[str]:
        """Evict tier-2 entries with ``expiry <= now``.

        When ``hlr`` is given, tier-1 records of evicted subscribers that the
        HLR no longer routes to this MSC are removed as well.
        """
        evicted = sorted(i for i, r in self.tier2.items() if r.expiry <= now)
        for imsi in evicted:
            self.drop_tier2(imsi)
            if hlr is not None and imsi in self._records and hlr.lookup(imsi).serving_vlr != self.msc:
                del self._records[imsi]
        return evicted

    def _gate(self, common: set[str]) -> list[str]:
        if self.config.admission is not Admission.COMMON_MS_GATED:
            return []
        dropped = sorted(i for i in self.tier2 if i not in common)
        for imsi in dropped:
            self.drop_tier2(imsi)
        return dropped

    def day_boundary(self, now: int, hlr: Optional[Hlr] = None) -> list[str]:
        """Expiry sweep plus window bookkeeping, run at each multiple of DAY."""
        evicted = set(self.expire_records(now, hlr))
        m = self.window.m
        if now - self.window_start >= m * DAY:
            evicted.update(self._gate(get_common_ms(self.window)))
            if self.config.window_mode is WindowMode.TUMBLING:
                self.window_start = now
                self.window = ObservationWindow(m)
                for rec in self.tier2.values():
                    rec.stats.per_day_visits = [0] * m
            else:
                self.window_start += DAY
                self.window.daily_sets = self.window.daily_sets[1:] + [set()]
                for rec in self.tier2.values():
                    rec.stats.per_day_visits = rec.stats.per_day_visits[1:] + [0]
            for rec in self.tier2.values():
                rec.label = classify_visits(rec.stats, self.config.thresholds)
        # subscribers still in the area count as seen on the new day
        for imsi in self._records:
            self.observe(imsi, now)
        return sorted(evicted)


def intelligent_register(net: Network, imsi: str, new_cell: str, log: MessageLog) -> RegistrationOutcome:
    la, msc = net.topology.locate(new_cell)
    net.hlr.lookup(imsi)
    tv: TieredVlr = net.vlr(msc)  # type: ignore[assignment]
    now = net.now
    log.emit(now, MessageKind.VLR_CHECK, msc, msc, imsi, msc)
    tv.observe(imsi, now)
    rec = tv.lookup(imsi)
    if rec is not None:
        rec.la, rec.cell = la, new_cell
        return RegistrationOutcome.TIER1_HIT

    day = tv.day_index(now)
    if tv.is_live(imsi, now):
        if tv.config.refresh_billing:
            log.emit(now, MessageKind.BILLING_REFRESH, msc, HLR_NODE, imsi, msc)
        log.emit(now, MessageKind.HLR_POINTER_UPDATE, msc, HLR_NODE, imsi, msc)
        prev = net.hlr.update_location(imsi, msc, la)
        net.hlr.set_tmsi(imsi, net.next_tmsi(imsi))
        if prev is not None:
            log.emit(now, MessageKind.CANCEL_OLD, HLR_NODE, prev, imsi, prev)
            net.vlr(prev).on_cancel(imsi, now)
        log.emit(now, MessageKind.VLR_STORE, msc, msc, imsi, msc)
        hlr_profile = net.hlr.lookup(imsi).profile
        if tv.config.refresh_billing:
            profile = hlr_profile
        else:
            profile = tv.tier2[imsi].profile.with_tmsi(hlr_profile.tmsi)
        tv.promote(imsi, la, new_cell, profile)
        tv.record_visit(imsi, day, la, now, profile)
        return RegistrationOutcome.TIER2_HIT_PROMOTED

    if imsi in tv.tier2:
        tv.drop_tier2(imsi)  # expired but not yet swept
    full_registration(net, imsi, la, new_cell, msc, log)
    tv.record_visit(imsi, day, la, now, net.hlr.lookup(imsi).profile)
    return RegistrationOutcome.MISS_FULL_PROCEDURE


def intelligent_deliver(net: Network, caller: str, callee: str, log: MessageLog) -> CallRoute:
    """Deliver locally when the calling MSC holds the callee in both tiers; else via the HLR."""
    calling = _call_endpoints(net, caller, callee)
    now = net.now
    log.emit(now, MessageKind.CALL_INIT, calling, calling, caller, calling)
    tv: TieredVlr = net.vlr(calling)  # type: ignore[assignment]
    if tv.lookup(callee) is not None and tv.is_live(callee, now):
        tldn = assign_tldn(net, calling, callee)
        log.emit(now, MessageKind.CALL_SETUP, calling, calling, callee, calling)
        return CallRoute(caller, callee, calling, calling, tldn)
    return hlr_routed_delivery(net, caller, callee, calling, log)


def tiered_network(topology, config: TierConfig | None = None, start: int = 0) -> Network:
    config = config or TierConfig()
    return Network(topology, vlr_factory=lambda msc: TieredVlr(msc, config, start))
