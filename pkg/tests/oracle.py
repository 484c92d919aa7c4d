"""Reference counter enumerator used to cross-check the simulator.

Written directly from the signaling rules with plain dicts and no shared
code beyond the topology lookup, so a bug in the simulator's state machine
does not silently carry over. Supports tumbling windows only.
"""

from collections import Counter

DAY = 86_400


def _label_ttl(total, ttl, thresholds):
    lo, mid = thresholds
    label = "Low" if total <= lo else "Medium" if total <= mid else "High"
    return ttl[label]


def enumerate_counters(topology, trace, scheme, ttl=None, gated=True, refresh=False,
                       thresholds=(2, 5), window=7, horizon_days=0):
    """Return ``(totals, per_msc)`` as Counters of the simulator's counter names."""
    ttl = ttl or {"Low": 7 * DAY, "Medium": 7 * DAY, "High": 7 * DAY}
    intel = scheme == "intelligent"
    mscs = topology.mscs
    total = Counter()
    per = {m: Counter() for m in mscs}

    def bump(name, msc=None):
        total[name] += 1
        if msc is not None:
            per[msc][name] += 1

    def msg(msc, counter=None):
        bump("messages", msc)
        if counter:
            bump(counter, msc)

    hlr = {}                       # imsi -> serving msc or None
    t1 = {m: {} for m in mscs}     # msc -> imsi -> la
    t2 = {m: {} for m in mscs}     # msc -> imsi -> [days list, expiry]
    seen = {m: [set() for _ in range(window)] for m in mscs}
    wstart = {m: 0 for m in mscs}
    nxt = DAY

    def live(m, imsi, t):
        return imsi in t2[m] and t2[m][imsi][1] > t

    def sweep(b):
        for m in mscs:
            for imsi in sorted(i for i, e in t2[m].items() if e[1] <= b):
                del t2[m][imsi]
                bump("tier2_evictions", m)
            if b - wstart[m] >= window * DAY:
                if gated:
                    common = set.intersection(*seen[m])
                    for imsi in [i for i in t2[m] if i not in common]:
                        del t2[m][imsi]
                        bump("tier2_evictions", m)
                wstart[m] = b
                seen[m] = [set() for _ in range(window)]
                for e in t2[m].values():
                    e[0] = [0] * window
            for imsi in t1[m]:
                seen[m][(b - wstart[m]) // DAY].add(imsi)

    def register(imsi, cell, t):
        la, m = topology.locate(cell)
        msg(m, "vlr_lookups")
        if not intel:
            if imsi in t1[m]:
                t1[m][imsi] = la
                bump("registrations_tier1_hit", m)
                return
            msg(m, "hlr_profile_requests")
            msg(m, "hlr_pointer_updates")
            prev = hlr.get(imsi)
            hlr[imsi] = m
            if prev is not None:
                msg(prev, "cancellations")
                t1[prev].pop(imsi, None)
            msg(m)
            t1[m][imsi] = la
            bump("registrations_full", m)
            return
        d = (t - wstart[m]) // DAY
        seen[m][d].add(imsi)
        if imsi in t1[m]:
            t1[m][imsi] = la
            bump("registrations_tier1_hit", m)
            return
        if live(m, imsi, t):
            if refresh:
                msg(m, "hlr_profile_requests")
            msg(m, "hlr_pointer_updates")
            bump("registrations_tier2_hit", m)
        else:
            if imsi in t2[m]:
                del t2[m][imsi]
                bump("tier2_evictions", m)
            msg(m, "hlr_profile_requests")
            msg(m, "hlr_pointer_updates")
            t2[m][imsi] = [[0] * window, t]
            bump("registrations_full", m)
        prev = hlr.get(imsi)
        hlr[imsi] = m
        if prev is not None:
            msg(prev, "cancellations")
            t1[prev].pop(imsi, None)
        msg(m)
        t1[m][imsi] = la
        e = t2[m][imsi]
        e[0][d] += 1
        e[1] = t + _label_ttl(sum(e[0]), ttl, thresholds)

    def call(caller, callee, t):
        calling = hlr.get(caller)
        if calling is None:
            bump("calls_failed")
            return
        msg(calling)  # call_init
        if intel and callee in t1[calling] and live(calling, callee, t):
            msg(calling)  # call_setup
            bump("calls_delivered", calling)
            bump("calls_cache_hit", calling)
            return
        msg(calling, "hlr_location_requests")
        called = hlr.get(callee)
        if called is None:
            bump("calls_failed", calling)
            return
        msg(called)   # route_request
        msg(called)   # tldn_response
        msg(calling)  # tldn_forward
        msg(calling)  # call_setup
        bump("calls_delivered", calling)

    for ev in trace:
        t = ev.time
        while nxt <= t:
            if intel:
                sweep(nxt)
            nxt += DAY
        kind = ev.kind.value
        if kind == "move":
            m = hlr.get(ev.imsi)
            if m is not None and t1[m].get(ev.imsi) == topology.la_of(ev.arg):
                continue
            register(ev.imsi, ev.arg, t)
        elif kind == "on":
            register(ev.imsi, ev.arg, t)
        elif kind == "off":
            m = hlr.get(ev.imsi)
            hlr[ev.imsi] = None
            if m is not None:
                t1[m].pop(ev.imsi, None)
        else:
            call(ev.imsi, ev.arg, t)

    end = max(trace[-1].time if trace else 0, horizon_days * DAY)
    while nxt <= end:
        if intel:
            sweep(nxt)
        nxt += DAY
    return total, {m: c for m, c in per.items() if c}
