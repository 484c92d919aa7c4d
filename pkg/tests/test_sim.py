from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from gsmloc.errors import DominanceViolation, TraceOutOfOrder, UnresolvableId
from gsmloc.fuzzy import LinguisticLabel as L
from gsmloc.network import build_topology
from gsmloc.sim import (
    BASELINE,
    COUNTER_NAMES,
    INTELLIGENT,
    SimConfig,
    Simulator,
    compare_schemes,
    format_log_csv,
    format_metrics_csv,
    format_report,
    parse_log_csv,
    parse_metrics_csv,
    run_simulation,
)
from gsmloc.tiered import DAY, Admission, TierConfig
from gsmloc.traces import CommuterParams, EventKind, TraceEvent, generate_commuter_trace, random_trace

from oracle import enumerate_counters

E = TraceEvent
ON, MOVE, CALL, OFF = EventKind.ON, EventKind.MOVE, EventKind.CALL, EventKind.OFF


def nonzero(counters):
    return Counter({k: v for k, v in counters.as_dict().items() if v})


def test_empty_trace_gives_zero_metrics(topo):
    for scheme in (BASELINE, INTELLIGENT):
        res = run_simulation(topo, [], scheme)
        assert all(v == 0 for v in res.metrics.total.as_dict().values())
        assert len(res.log) == 0


def test_single_roam_baseline(topo):
    trace = [E(0, "A", ON, "c1"), E(100, "A", MOVE, "c3")]
    m, log = run_simulation(topo, trace, BASELINE)
    assert m.hlr_profile_requests == 2  # power-on plus the roam
    assert m.msc("MSC2").hlr_profile_requests == 1
    assert m.cancellations == 1 and m.msc("MSC1").cancellations == 1
    assert m.registrations_full == 2


def test_intra_la_moves_are_free(topo):
    trace = [E(0, "A", ON, "c1")] + [E(i, "A", MOVE, "c2" if i % 2 else "c1") for i in range(1, 20)]
    for scheme in (BASELINE, INTELLIGENT):
        m, log = run_simulation(topo, trace, scheme)
        assert m.messages == 4 and len(log) == 4


def test_move_while_detached_registers(topo):
    trace = [E(0, "A", ON, "c1"), E(5, "A", OFF), E(9, "A", MOVE, "c2")]
    m, _ = run_simulation(topo, trace, BASELINE)
    assert m.registrations_full == 2 and m.cancellations == 0


def test_commuter_transit_msc(topo):
    trace = generate_commuter_trace(CommuterParams(), topo)
    cmp = compare_schemes(topo, trace)
    b = cmp.baseline.metrics.msc("MSC2")
    i = cmp.intelligent.metrics.msc("MSC2")
    assert b.hlr_profile_requests == 7
    assert i.hlr_profile_requests == 1
    assert i.hlr_pointer_updates == 7
    assert i.registrations_tier2_hit == 6
    assert cmp.ok


def test_commuter_with_billing_refresh(topo):
    cfg = SimConfig(TierConfig(refresh_billing=True))
    cmp = compare_schemes(topo, generate_commuter_trace(CommuterParams(), topo), cfg)
    assert cmp.intelligent.metrics.msc("MSC2").hlr_profile_requests == 7
    assert cmp.ok
    assert cmp.intelligent.metrics.total.hlr_queries() == cmp.baseline.metrics.total.hlr_queries()


def test_zero_ttl_reproduces_baseline_exactly(topo):
    cfg = SimConfig(TierConfig(ttl={l: 0 for l in L}))
    for seed in range(10):
        trace = random_trace(topo, 4, 5, seed=seed)
        b = run_simulation(topo, trace, BASELINE, cfg)
        i = run_simulation(topo, trace, INTELLIGENT, cfg)
        assert b.log == i.log
        assert b.calls == i.calls
        for name in COUNTER_NAMES:
            if name != "tier2_evictions":
                assert getattr(b.metrics, name) == getattr(i.metrics, name)


def test_call_conservation(topo):
    for seed in range(20):
        trace = random_trace(topo, 4, 6, seed=seed)
        ncalls = sum(e.kind is CALL for e in trace)
        for scheme in (BASELINE, INTELLIGENT):
            m, _ = run_simulation(topo, trace, scheme)
            assert m.calls_delivered + m.calls_failed == ncalls


def test_determinism(topo):
    trace = random_trace(topo, 5, 7, seed=3)
    for scheme in (BASELINE, INTELLIGENT):
        a = run_simulation(topo, trace, scheme)
        b = run_simulation(topo, trace, scheme)
        assert a.log == b.log and format_metrics_csv([a]) == format_metrics_csv([b])


def test_state_invariants_after_every_event(topo):
    for seed in range(15):
        trace = random_trace(topo, 4, 10, seed=seed)
        pop = {e.imsi for e in trace}
        for scheme in (BASELINE, INTELLIGENT):
            sim = Simulator(topo, scheme, SimConfig(), pop)
            for i, ev in enumerate(trace):
                sim.handle(i, ev)
                for imsi in pop:
                    holders = [m for m, v in sim.net.vlrs.items() if imsi in v]
                    serving = sim.net.hlr.lookup(imsi).serving_vlr
                    assert holders == ([serving] if serving else [])
                if scheme == INTELLIGENT:
                    for v in sim.net.vlrs.values():
                        for r in v.tier2.values():
                            assert r.expiry > sim.next_boundary - DAY  # swept at the last boundary


def test_log_time_ordered(topo):
    _, log = run_simulation(topo, random_trace(topo, 5, 7, seed=9), INTELLIGENT)
    times = [m.time for m in log]
    assert times == sorted(times)


def test_metrics_and_log_csv_round_trip(topo):
    trace = random_trace(topo, 3, 4, seed=1)
    res = run_simulation(topo, trace, INTELLIGENT)
    parsed = parse_metrics_csv(format_metrics_csv([res]))[INTELLIGENT]
    assert parsed.total == res.metrics.total
    assert parsed.per_msc == res.metrics.per_msc
    assert parsed.per_day == res.metrics.per_day
    assert parse_log_csv(format_log_csv(res.log)) == res.log


def test_unresolvable_ids(topo):
    with pytest.raises(UnresolvableId, match="cell"):
        run_simulation(topo, [E(0, "A", ON, "c99")])
    with pytest.raises(UnresolvableId, match="callee"):
        run_simulation(topo, [E(0, "A", ON, "c1"), E(1, "A", CALL, "Z")])
    with pytest.raises(UnresolvableId, match="IMSI"):
        run_simulation(topo, [E(0, "A", ON, "c1")], config=SimConfig(subscribers=["B"]))


def test_out_of_order_trace_rejected(topo):
    with pytest.raises(TraceOutOfOrder):
        run_simulation(topo, [E(5, "A", ON, "c1"), E(1, "A", MOVE, "c3")])


def test_calls_to_detached_fail(topo):
    trace = [E(0, "A", ON, "c1"), E(0, "B", ON, "c3"), E(1, "B", OFF), E(2, "A", CALL, "B"), E(3, "B", CALL, "A")]
    for scheme in (BASELINE, INTELLIGENT):
        res = run_simulation(topo, trace, scheme)
        assert res.metrics.calls_failed == 2
        assert [c.delivered for c in res.calls] == [False, False]


def test_cache_hit_call_skips_hlr(topo):
    trace = [E(0, "A", ON, "c1"), E(0, "B", ON, "c7"), E(10, "A", CALL, "B")]
    m, _ = run_simulation(topo, trace, INTELLIGENT)
    assert m.calls_cache_hit == 1 and m.hlr_location_requests == 0
    m, _ = run_simulation(topo, trace, BASELINE)
    assert m.calls_cache_hit == 0 and m.hlr_location_requests == 1


def test_horizon_sweeps_evict_idle_entries(topo):
    trace = [E(0, "A", ON, "c1"), E(10, "A", MOVE, "c3")]
    res = run_simulation(topo, trace, INTELLIGENT, SimConfig(horizon_days=8))
    assert "A" not in res.network.vlrs["MSC1"].tier2
    assert res.metrics.msc("MSC1").tier2_evictions == 1


def test_comparison_detects_corrupt_runner(topo):
    def corrupt(topology, trace, scheme, config):
        res = run_simulation(topology, trace, scheme, config)
        if scheme == INTELLIGENT:
            res.metrics.total.hlr_location_requests += 1000
        return res

    cmp = compare_schemes(topo, generate_commuter_trace(CommuterParams(), topo), runner=corrupt)
    assert not cmp.ok
    with pytest.raises(DominanceViolation):
        cmp.check()
    assert "VIOLATED" in format_report(cmp)


ORACLE_TOPO = build_topology([
    ("a1", "LA1", "M1"), ("a2", "LA1", "M1"), ("b1", "LA2", "M1"),
    ("c1", "LA3", "M2"), ("d1", "LA4", "M3"),
])


@pytest.mark.parametrize("kw, cfg", [
    ({}, TierConfig()),
    ({"gated": False}, TierConfig(admission=Admission.CACHE_ALL)),
    ({"refresh": True}, TierConfig(refresh_billing=True)),
    ({"ttl": {"Low": DAY, "Medium": 3 * DAY, "High": 10 * DAY}},
     TierConfig(ttl={L.LOW: DAY, L.MEDIUM: 3 * DAY, L.HIGH: 10 * DAY})),
])
def test_simulator_matches_oracle(kw, cfg):
    for seed in range(25):
        trace = random_trace(ORACLE_TOPO, 3, 7, events_per_day=12, seed=seed)
        for scheme in (BASELINE, INTELLIGENT):
            res = run_simulation(ORACLE_TOPO, trace, scheme, SimConfig(cfg, horizon_days=9))
            total, per = enumerate_counters(ORACLE_TOPO, trace, scheme, horizon_days=9, **kw)
            assert nonzero(res.metrics.total) == total, (seed, scheme)
            assert {m: nonzero(c) for m, c in res.metrics.per_msc.items() if nonzero(c)} == per


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 14))
def test_dominance_and_routing_equivalence(seed, subs, days):
    topo = build_topology([
        ("x1", "LA1", "M1"), ("x2", "LA2", "M1"), ("y1", "LA3", "M2"),
        ("z1", "LA4", "M3"), ("w1", "LA5", "M4"),
    ])
    cmp = compare_schemes(topo, random_trace(topo, subs, days, seed=seed))
    assert cmp.ok, cmp.violations
