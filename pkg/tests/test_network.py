import pytest

from gsmloc.errors import ConflictingLa, DuplicateCell, EmptyTopology, OrphanLa, TopologyError, UnknownCell, UnknownImsi
from gsmloc.network import (
    Network,
    Status,
    Vlr,
    VlrRecord,
    build_topology,
    make_profile,
    make_tmsi,
    read_topology,
    write_topology,
)
from gsmloc.protocol import MessageLog, register_arrival

# nine cells, three LAs, two MSCs; LA1 and LA2 share MSC1
NINE_CELLS = [
    ("c1", "LA1", "MSC1"), ("c2", "LA1", "MSC1"), ("c3", "LA1", "MSC1"),
    ("c4", "LA2", "MSC1"), ("c5", "LA2", "MSC1"), ("c6", "LA2", "MSC1"),
    ("c7", "LA3", "MSC2"), ("c8", "LA3", "MSC2"), ("c9", "LA3", "MSC2"),
]


def test_minimal_topology():
    topo = build_topology([("c1", "LA1", "MSC1")])
    assert topo.mscs == ("MSC1",)
    assert len(Network(topo).vlrs) == 1


def test_nine_cell_topology_has_two_vlrs():
    topo = build_topology(NINE_CELLS)
    expected_mscs = {msc for _, _, msc in NINE_CELLS}
    assert len(expected_mscs) == 2
    assert len(Network(topo).vlrs) == len(expected_mscs)
    assert topo.locate("c5") == ("LA2", "MSC1")
    assert topo.las_of_msc("MSC1") == ["LA1", "LA2"]


def test_duplicate_cell_rejected():
    with pytest.raises(DuplicateCell):
        build_topology([("c1", "LA1", "M1"), ("c1", "LA2", "M1")])


def test_orphan_la_and_empty_and_conflict():
    with pytest.raises(OrphanLa):
        build_topology([("c1", "LA1", "")])
    with pytest.raises(EmptyTopology):
        build_topology([])
    with pytest.raises(ConflictingLa):
        build_topology([("c1", "LA1", "M1"), ("c2", "LA1", "M2")])


def test_locate_is_total_over_known_cells():
    topo = build_topology(NINE_CELLS)
    for cell in topo.cells:
        la, msc = topo.locate(cell)
        assert topo.las[la] == msc
    with pytest.raises(UnknownCell):
        topo.locate("nope")


def test_topology_file_round_trip(tmp_path):
    topo = build_topology(NINE_CELLS)
    p = tmp_path / "t.csv"
    write_topology(topo, p)
    assert read_topology(p) == topo


def test_topology_file_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("cell_id,la_id,msc_id\nc1,LA1,M1\n# comment\nc1,LA2,M1\n")
    with pytest.raises(DuplicateCell, match="line 4"):
        read_topology(p)
    p.write_text("c1,LA1\n")
    with pytest.raises(TopologyError, match="line 1"):
        read_topology(p)


@pytest.fixture
def net():
    n = Network(build_topology(NINE_CELLS))
    n.provision("A")
    return n


def test_hlr_lookup_detached_then_registered(net):
    assert net.hlr.lookup("A").serving_vlr is None
    register_arrival(net, "A", "c7", MessageLog())
    assert net.hlr.lookup("A").serving_vlr == "MSC2"


def test_hlr_lookup_unknown(net):
    with pytest.raises(UnknownImsi):
        net.hlr.lookup("ZZZ")
    with pytest.raises(UnknownImsi):
        net.hlr.update_location("ZZZ", "MSC1", "LA1")


def test_hlr_update_location_returns_previous(net):
    assert net.hlr.update_location("A", "MSC1", "LA1") is None
    assert net.hlr.update_location("A", "MSC2", "LA3") == "MSC1"
    assert net.hlr.update_location("A", "MSC2", "LA3") == "MSC2"
    # read-your-writes
    assert net.hlr.lookup("A").serving_vlr == "MSC2"
    assert net.hlr.lookup("A").current_la == "LA3"


def test_vlr_keyed_store():
    vlr = Vlr("MSC1")
    rec = VlrRecord(make_profile("A"), "LA1", "c1")
    vlr.insert(rec)
    assert vlr.lookup("A") is rec
    assert rec.status is Status.IDLE
    assert vlr.delete("B") is False
    assert vlr.delete("A") is True
    assert vlr.lookup("A") is None


def test_profile_is_deterministic_and_carries_all_fields():
    p = make_profile("404010000000001")
    assert p == make_profile("404010000000001")
    for value in (p.imsi, p.msisdn, p.tmsi, p.msrn, p.hlr_address, p.ciphering_keys, p.billing_info, p.gprs_access_point):
        assert value
    with pytest.raises(ValueError):
        make_profile("")


def test_tmsi_changes_only_on_registration(net):
    log = MessageLog()
    t0 = net.hlr.lookup("A").profile.tmsi
    register_arrival(net, "A", "c1", log)
    t1 = net.hlr.lookup("A").profile.tmsi
    register_arrival(net, "A", "c4", log)  # LA change inside MSC1: tier-1 hit, no new TMSI
    assert net.hlr.lookup("A").profile.tmsi == t1
    register_arrival(net, "A", "c7", log)
    t2 = net.hlr.lookup("A").profile.tmsi
    assert len({t0, t1, t2}) == 3
    assert t1 == make_tmsi("A", 1) and t2 == make_tmsi("A", 2)
    assert net.hlr.lookup("A").profile.imsi == "A"
