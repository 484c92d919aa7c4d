"""Standard GSM registration and call delivery, one logged message per step.

Registration (location update on entering a new LA):

    1. VLR checks its own database for the IMSI.
    2. On a miss, VLR asks the subscriber's HLR for the profile.
    3. HLR returns the profile and repoints its serving-VLR entry.
    4. HLR tells the previous VLR, if any, to drop its record.
    5. VLR stores the record with the latest location, status idle.

Call delivery:

    1. calling MT -> calling MSC: call initiated
    2. calling MSC -> callee's HLR: location request
    3. HLR -> called MSC: route request
    4. called MSC assigns a TLDN and returns it to the HLR
    5. HLR -> calling MSC: TLDN forwarded
    6. calling MSC -> called MSC: call setup
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import (
    CalleeDetached,
    CallerDetached,
    LaMismatch,
    NotRegisteredHere,
    SubscriberDetached,
)
from .network import HLR_NODE, Network, Status, VlrRecord


class MessageKind(str, enum.Enum):
    VLR_CHECK = "vlr_check"
    PROFILE_REQUEST = "profile_request"
    PROFILE_RESPONSE_AND_HLR_UPDATE = "profile_response_and_hlr_update"
    CANCEL_OLD = "cancel_old"
    VLR_STORE = "vlr_store"
    CALL_INIT = "call_init"
    LOCATION_REQUEST = "location_request"
    ROUTE_REQUEST = "route_request"
    TLDN_RESPONSE = "tldn_response"
    TLDN_FORWARD = "tldn_forward"
    CALL_SETUP = "call_setup"
    # two-tier VLR only
    HLR_POINTER_UPDATE = "hlr_pointer_update"
    BILLING_REFRESH = "billing_refresh"


STEP_OF_KIND: dict[MessageKind, str] = {
    MessageKind.VLR_CHECK: "reg.1",
    MessageKind.PROFILE_REQUEST: "reg.2",
    MessageKind.BILLING_REFRESH: "reg.2",
    MessageKind.PROFILE_RESPONSE_AND_HLR_UPDATE: "reg.3",
    MessageKind.HLR_POINTER_UPDATE: "reg.3",
    MessageKind.CANCEL_OLD: "reg.4",
    MessageKind.VLR_STORE: "reg.5",
    MessageKind.CALL_INIT: "call.1",
    MessageKind.LOCATION_REQUEST: "call.2",
    MessageKind.ROUTE_REQUEST: "call.3",
    MessageKind.TLDN_RESPONSE: "call.4",
    MessageKind.TLDN_FORWARD: "call.5",
    MessageKind.CALL_SETUP: "call.6",
}

REGISTRATION_STEPS = [
    MessageKind.VLR_CHECK,
    MessageKind.PROFILE_REQUEST,
    MessageKind.PROFILE_RESPONSE_AND_HLR_UPDATE,
    MessageKind.CANCEL_OLD,
    MessageKind.VLR_STORE,
]
CALL_STEPS = [
    MessageKind.CALL_INIT,
    MessageKind.LOCATION_REQUEST,
    MessageKind.ROUTE_REQUEST,
    MessageKind.TLDN_RESPONSE,
    MessageKind.TLDN_FORWARD,
    MessageKind.CALL_SETUP,
]


@dataclass(frozen=True)
class Message:
    time: int
    kind: MessageKind
    src: str
    dst: str
    imsi: str
    msc: str  # MSC the message is charged to

    @property
    def step(self) -> str:
        return STEP_OF_KIND[self.kind]

    def as_row(self) -> list[str]:
        return [str(self.time), self.step, self.kind.value, self.src, self.dst, self.imsi, self.msc]


class MessageLog:
    """Append-only, time-ordered record of signaling messages."""

    def __init__(self) -> None:
        self._messages: list[Message] = []

    def emit(self, time: int, kind: MessageKind, src: str, dst: str, imsi: str, msc: str) -> Message:
        if self._messages and time < self._messages[-1].time:
            raise ValueError(f"message at t={time} precedes last logged t={self._messages[-1].time}")
        msg = Message(time, kind, src, dst, imsi, msc)
        self._messages.append(msg)
        return msg

    def __len__(self) -> int:
        return len(self._messages)

    def __iter__(self) -> Iterator[Message]:
        return iter(self._messages)

    def __getitem__(self, i):
        return self._messages[i]

    def kinds(self, start: int = 0) -> list[MessageKind]:
        return [m.kind for m in self._messages[start:]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MessageLog):
            return NotImplemented
        return self._messages == other._messages


class RegistrationOutcome(str, enum.Enum):
    ALREADY_KNOWN = "already_known"
    REGISTERED_FRESH = "registered_fresh"
    TIER2_HIT_PROMOTED = "tier2_hit_promoted"
    # names used by the two-tier scheme
    TIER1_HIT = "already_known"
    MISS_FULL_PROCEDURE = "registered_fresh"


@dataclass(frozen=True)
class Tldn:
    value: str
    owner_msc: str


@dataclass(frozen=True)
class CallRoute:
    caller: str
    callee: str
    calling_msc: str
    called_msc: str
    tldn: Tldn


class TldnPool:
    """Per-MSC allocator handing out the smallest free routing number."""

    def __init__(self, msc: str):
        self.msc = msc
        self._live: dict[int, str] = {}

    def allocate(self, imsi: str) -> Tldn:
        n = 1
        while n in self._live:
            n += 1
        self._live[n] = imsi
        return Tldn(f"TLDN-{self.msc}-{n:04d}", self.msc)

    def release(self, tldn: Tldn) -> None:
        n = int(tldn.value.rsplit("-", 1)[1])
        self._live.pop(n, None)

    def outstanding(self) -> int:
        return len(self._live)


def _pool(net: Network, msc: str) -> TldnPool:
    if msc not in net.tldn_pools:
        net.vlr(msc)
        net.tldn_pools[msc] = TldnPool(msc)
    return net.tldn_pools[msc]


def assign_tldn(net: Network, msc: str, imsi: str) -> Tldn:
    if net.vlr(msc).lookup(imsi) is None:
        raise NotRegisteredHere(f"{imsi} has no record at {msc}")
    return _pool(net, msc).allocate(imsi)


def release_tldn(net: Network, tldn: Tldn) -> None:
    _pool(net, tldn.owner_msc).release(tldn)


def full_registration(net: Network, imsi: str, la: str, cell: str, msc: str, log: MessageLog) -> Optional[str]:
    """Steps 2-5 of registration. Returns the previous serving VLR."""
    t = net.now
    log.emit(t, MessageKind.PROFILE_REQUEST, msc, HLR_NODE, imsi, msc)
    prev = net.hlr.update_location(imsi, msc, la)
    net.hlr.set_tmsi(imsi, net.next_tmsi(imsi))
    log.emit(t, MessageKind.PROFILE_RESPONSE_AND_HLR_UPDATE, HLR_NODE, msc, imsi, msc)
    if prev is not None:
        log.emit(t, MessageKind.CANCEL_OLD, HLR_NODE, prev, imsi, prev)
        net.vlr(prev).on_cancel(imsi, t)
    log.emit(t, MessageKind.VLR_STORE, msc, msc, imsi, msc)
    net.vlr(msc).insert(VlrRecord(net.hlr.lookup(imsi).profile, la, cell, Status.IDLE))
    return prev


def register_arrival(net: Network, imsi: str, new_cell: str, log: MessageLog) -> RegistrationOutcome:
    la, msc = net.topology.locate(new_cell)
    net.hlr.lookup(imsi)
    vlr = net.vlr(msc)
    log.emit(net.now, MessageKind.VLR_CHECK, msc, msc, imsi, msc)
    rec = vlr.lookup(imsi)
    if rec is not None:
        rec.la, rec.cell = la, new_cell
        return RegistrationOutcome.ALREADY_KNOWN
    full_registration(net, imsi, la, new_cell, msc, log)
    return RegistrationOutcome.REGISTERED_FRESH


def intra_la_move(net: Network, imsi: str, new_cell: str, log: MessageLog) -> None:
    """Cell change inside the current LA: the VLR record changes, nothing is signaled."""
    la = net.topology.la_of(new_cell)
    rec = net.serving_record(imsi)
    if rec is None:
        raise SubscriberDetached(f"{imsi} is not attached")
    if rec.la != la:
        raise LaMismatch(f"cell {new_cell} is in {la}, subscriber is in {rec.la}")
    rec.cell = new_cell


def detach(net: Network, imsi: str) -> Optional[str]:
    """Power-off: clear the HLR pointer and drop the tier-1 record. No signaling is modeled."""
    prev = net.hlr.detach(imsi)
    if prev is not None:
        net.vlr(prev).on_detach(imsi, net.now)
    return prev


def _call_endpoints(net: Network, caller: str, callee: str) -> str:
    calling = net.hlr.lookup(caller).serving_vlr
    net.hlr.lookup(callee)
    if calling is None or net.vlr(calling).lookup(caller) is None:
        raise CallerDetached(f"caller {caller} is not attached")
    return calling


def hlr_routed_delivery(net: Network, caller: str, callee: str, calling: str, log: MessageLog) -> CallRoute:
    """Steps 2-6 of call delivery, through the callee's HLR."""
    t = net.now
    log.emit(t, MessageKind.LOCATION_REQUEST, calling, HLR_NODE, callee, calling)
    called = net.hlr.lookup(callee).serving_vlr
    if called is None:
        raise CalleeDetached(f"callee {callee} is not attached")
    log.emit(t, MessageKind.ROUTE_REQUEST, HLR_NODE, called, callee, called)
    tldn = assign_tldn(net, called, callee)
    log.emit(t, MessageKind.TLDN_RESPONSE, called, HLR_NODE, callee, called)
    log.emit(t, MessageKind.TLDN_FORWARD, HLR_NODE, calling, callee, calling)
    log.emit(t, MessageKind.CALL_SETUP, calling, called, callee, calling)
    return CallRoute(caller, callee, calling, called, tldn)


def deliver_call(net: Network, caller: str, callee: str, log: MessageLog) -> CallRoute:
    calling = _call_endpoints(net, caller, callee)
    log.emit(net.now, MessageKind.CALL_INIT, calling, calling, caller, calling)
    return hlr_routed_delivery(net, caller, callee, calling, log)
