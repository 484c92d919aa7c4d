"""Static topology plus the two location databases (HLR and per-MSC VLR).

Identifiers (IMSI, cell, LA, MSC) are plain strings. The topology maps
every cell to exactly one LA and every LA to exactly one MSC; each MSC owns
one VLR.
"""

from __future__ import annotations

import csv
import enum
import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Optional

from .errors import (
    ConflictingLa,
    DuplicateCell,
    EmptyTopology,
    OrphanLa,
    TopologyError,
    UnknownCell,
    UnknownImsi,
    UnknownLa,
)

HLR_NODE = "HLR"


class ServiceType(str, enum.Enum):
    VOICE = "voice"
    VOICE_DATA = "voice+data"
    DATA = "data"


class Status(str, enum.Enum):
    IDLE = "idle"
    BUSY = "busy"


@dataclass(frozen=True)
class SubscriberProfile:
    imsi: str
    msisdn: str
    tmsi: str
    msrn: str
    service_type: ServiceType = ServiceType.VOICE
    hlr_address: str = HLR_NODE
    # carried but never interpreted
    ciphering_keys: str = ""
    billing_info: str = ""
    gprs_access_point: str = ""

    def with_tmsi(self, tmsi: str) -> SubscriberProfile:
        return replace(self, tmsi=tmsi)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def make_tmsi(imsi: str, counter: int) -> str:
    """TMSI as a pure function of the IMSI and its registration counter."""
    return _digest(f"tmsi:{imsi}:{counter}")[:8].upper()


def make_profile(imsi: str, service_type: ServiceType = ServiceType.VOICE) -> SubscriberProfile:
    """Deterministic default profile used when provisioning a subscriber."""
    if not imsi:
        raise ValueError("IMSI must be non-empty")
    h = _digest(f"profile:{imsi}")
    digits = str(int(h[:15], 16))[-10:].rjust(10, "0")
    return SubscriberProfile(
        imsi=imsi,
        msisdn=f"+91{digits}",
        tmsi=make_tmsi(imsi, 0),
        msrn=f"MSRN-{h[15:23].upper()}",
        service_type=service_type,
        ciphering_keys=f"KC-{h[23:39]}",
        billing_info="prepaid",
        gprs_access_point="internet",
    )


@dataclass(frozen=True)
class Topology:
    cells: dict[str, str]  # cell -> LA
    las: dict[str, str]  # LA -> MSC
    mscs: tuple[str, ...]

    def la_of(self, cell: str) -> str:
        try:
            return self.cells[cell]
        except KeyError:
            raise UnknownCell(f"unknown cell {cell!r}") from None

    def msc_of_la(self, la: str) -> str:
        try:
            return self.las[la]
        except KeyError:
            raise UnknownLa(f"unknown location area {la!r}") from None

    def locate(self, cell: str) -> tuple[str, str]:
        """Return ``(la, msc)`` for a cell."""
        la = self.la_of(cell)
        return la, self.las[la]

    def cells_in_la(self, la: str) -> list[str]:
        self.msc_of_la(la)
        return sorted(c for c, l in self.cells.items() if l == la)

    def las_of_msc(self, msc: str) -> list[str]:
        return sorted(la for la, m in self.las.items() if m == msc)


def build_topology(records: Iterable[tuple[str, str, str]]) -> Topology:
    """Validate ``(cell, la, msc)`` records and build a Topology.

    Records may carry a trailing line number as a fourth element, which is
    used in error messages.
    """
    cells: dict[str, str] = {}
    las: dict[str, str] = {}
    mscs: list[str] = []
    for n, rec in enumerate(records, start=1):
        cell, la, msc = (x.strip() for x in rec[:3])
        line = rec[3] if len(rec) > 3 else n
        if not cell or not la:
            raise TopologyError("cell and LA ids must be non-empty", line)
        if not msc:
            raise OrphanLa(f"LA {la!r} has no MSC", line)
        if cell in cells:
            raise DuplicateCell(f"cell {cell!r} already listed under LA {cells[cell]!r}", line)
        if la in las and las[la] != msc:
            raise ConflictingLa(f"LA {la!r} already belongs to MSC {las[la]!r}, not {msc!r}", line)
        cells[cell] = la
        las[la] = msc
        if msc not in mscs:
            mscs.append(msc)
    if not cells:
        raise EmptyTopology("topology lists no cells")
    return Topology(cells=cells, las=las, mscs=tuple(sorted(mscs)))


def read_topology(path: str | Path) -> Topology:
    """Parse a ``cell_id, la_id, msc_id`` file. ``#`` starts a comment."""
    records = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if lineno == 1 and row[0].strip().lower() in ("cell", "cell_id"):
                continue
            if len(row) != 3:
                raise TopologyError(f"expected 3 fields, got {len(row)}", lineno)
            records.append((row[0], row[1], row[2], lineno))
    return build_topology(records)


def write_topology(topology: Topology, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cell_id", "la_id", "msc_id"])
        for cell in sorted(topology.cells):
            la = topology.cells[cell]
            w.writerow([cell, la, topology.las[la]])


@dataclass
class HlrRecord:
    profile: SubscriberProfile
    serving_vlr: Optional[str] = None
    current_la: Optional[str] = None


class Hlr:
    """Home location register: master profile plus the serving-VLR pointer."""

    def __init__(self, topology: Topology):
        self.topology = topology
        self._records: dict[str, HlrRecord] = {}

    def provision(self, profile: SubscriberProfile) -> HlrRecord:
        rec = HlrRecord(profile=profile)
        self._records[profile.imsi] = rec
        return rec

    def __contains__(self, imsi: str) -> bool:
        return imsi in self._records

    def imsis(self) -> list[str]:
        return sorted(self._records)

    def lookup(self, imsi: str) -> HlrRecord:
        try:
            return self._records[imsi]
        except KeyError:
            raise UnknownImsi(f"IMSI {imsi!r} is not provisioned") from None

    def update_location(self, imsi: str, new_vlr: str, new_la: str) -> Optional[str]:
        """Point the subscriber at ``new_vlr``; return the previous serving VLR."""
        rec = self.lookup(imsi)
        if new_vlr not in self.topology.mscs:
            raise TopologyError(f"MSC {new_vlr!r} is not in the topology")
        prev = rec.serving_vlr
        rec.serving_vlr = new_vlr
        rec.current_la = new_la
        return prev

    def detach(self, imsi: str) -> Optional[str]:
        rec = self.lookup(imsi)
        prev = rec.serving_vlr
        rec.serving_vlr = None
        rec.current_la = None
        return prev

    def set_tmsi(self, imsi: str, tmsi: str) -> None:
        rec = self.lookup(imsi)
        rec.profile = rec.profile.with_tmsi(tmsi)


@dataclass
class VlrRecord:
    profile: SubscriberProfile
    la: str
    cell: str
    status: Status = Status.IDLE


class Vlr:
    """Plain keyed store of visitor records for one MSC."""

    def __init__(self, msc: str):
        self.msc = msc
        self._records: dict[str, VlrRecord] = {}

    def insert(self, record: VlrRecord) -> None:
        self._records[record.profile.imsi] = record

    def lookup(self, imsi: str) -> Optional[VlrRecord]:
        return self._records.get(imsi)

    def delete(self, imsi: str) -> bool:
        return self._records.pop(imsi, None) is not None

    def __contains__(self, imsi: str) -> bool:
        return imsi in self._records

    def __len__(self) -> int:
        return len(self._records)

    def on_cancel(self, imsi: str, now: int) -> None:
        """Handle the HLR's cancel-location instruction."""
        self.delete(imsi)

    def on_detach(self, imsi: str, now: int) -> None:
        self.delete(imsi)

    def imsis(self) -> list[str]:
        return sorted(self._records)


@dataclass
class Network:
    """All mutable network state owned by one simulation run."""

    topology: Topology
    vlr_factory: Callable[[str], Vlr] = Vlr
    hlr: Hlr = field(init=False)
    vlrs: dict[str, Vlr] = field(init=False)
    reg_counter: dict[str, int] = field(init=False, default_factory=dict)
    tldn_pools: dict = field(init=False, default_factory=dict)
    now: int = 0

    def __post_init__(self) -> None:
        self.hlr = Hlr(self.topology)
        self.vlrs = {msc: self.vlr_factory(msc) for msc in self.topology.mscs}

    def provision(self, imsi: str, profile: SubscriberProfile | None = None) -> HlrRecord:
        return self.hlr.provision(profile or make_profile(imsi))

    def vlr(self, msc: str) -> Vlr:
        try:
            return self.vlrs[msc]
        except KeyError:
            raise TopologyError(f"MSC {msc!r} is not in the topology") from None

    def next_tmsi(self, imsi: str) -> str:
        n = self.reg_counter.get(imsi, 0) + 1
        self.reg_counter[imsi] = n
        return make_tmsi(imsi, n)

    def serving_record(self, imsi: str) -> Optional[VlrRecord]:
        """The tier-1 record at the HLR's serving VLR, if attached."""
        msc = self.hlr.lookup(imsi).serving_vlr
        if msc is None:
            return None
        return self.vlrs[msc].lookup(imsi)
