import doctest
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import alertcache.metrics as metrics_mod
from alertcache.alerts import Alert
from alertcache.events import SimEvent
from alertcache.metrics import (
    MetricsConfig,
    MetricsReport,
    actionability_first,
    avg_freshness,
    cache_hit_rate,
    compute_metrics,
    delivery_rate,
    redundancy_rate,
    stale_access_rate,
    timeliness_consistency,
)

ALERTS = {
    "A": Alert("A", "Flood", "Extreme", "Past", 0, 1000, threadKey="T1"),
    "B": Alert("B", "Flood", "Minor", "Past", 10, 1000, threadKey="T1"),
    "C": Alert("C", "Storm", "Moderate", "Expected", 0, 1000, threadKey="T2"),
}

LOG = [
    SimEvent(0, "arrival", "A", "T1"),
    SimEvent(0, "deliverySuccess", "A", "T1"),
    SimEvent(0, "arrival", "C", "T2"),
    SimEvent(10, "arrival", "B", "T1"),
    SimEvent(10, "deliverySuccess", "B", "T1"),
    SimEvent(20, "hit", "A", "T1"),
    SimEvent(30, "hit", "B", "T1"),
    SimEvent(90, "hit", "C", "T2"),
    SimEvent(100, "miss"),
    SimEvent(130, "hit", "A", "T1"),
]


def test_scripted_log_by_hand():
    assert delivery_rate(LOG) == (2, 3)
    assert cache_hit_rate(LOG) == (4, 5)
    assert stale_access_rate(LOG) == (0, 5)
    fr = avg_freshness(LOG, ALERTS)
    hand = math.exp(-20 / 600) * 2 + math.exp(-90 / 600) + math.exp(-130 / 600)
    assert fr.denominator == 4 and fr.numerator == pytest.approx(hand, abs=1e-12)
    assert fr.value == pytest.approx(0.9001, abs=1e-4)
    assert actionability_first(LOG, ALERTS) == (1, 2)
    assert timeliness_consistency(LOG, ALERTS, 60) == (1, 2)
    assert timeliness_consistency(LOG, ALERTS, 90) == (2, 2)
    assert redundancy_rate(LOG, 30) == (1, 4)
    assert redundancy_rate(LOG, 10) == (0, 4)
    assert redundancy_rate(LOG, 101) == (2, 4)


def test_report_fields_and_roundtrip():
    rep = compute_metrics(LOG, ALERTS, MetricsConfig(60, 30))
    assert rep.deliveryRate == pytest.approx(2 / 3)
    assert rep.cacheHitRate == 0.8 and rep.staleAccessRate == 0.0
    assert (rep.arrivals, rep.delivered, rep.hits, rep.misses, rep.retrievals) == (3, 2, 4, 1, 5)
    assert (rep.surfacedThreads, rep.actionableFirstThreads, rep.timelyThreads) == (2, 1, 1)
    assert rep.duplicateHits == 1 and rep.zeroDenominators == ()
    assert MetricsReport.from_dict(rep.to_dict()) == rep


def test_empty_log_flags_every_ratio():
    rep = compute_metrics([], {})
    assert len(rep.zeroDenominators) == 7
    assert all(v == 0.0 for v in rep.ratios().values())


def test_window_validation():
    with pytest.raises(ValueError):
        redundancy_rate(LOG, 0)
    with pytest.raises(ValueError):
        MetricsConfig(timelinessWindow=0)


@given(st.lists(st.tuples(st.integers(0, 500), st.sampled_from(["A", "B", "C"]),
                          st.booleans()), max_size=40))
def test_ratios_stay_in_unit_interval(items):
    events = [
        SimEvent(t, "hit" if hit else "miss", aid if hit else None,
                 ALERTS[aid].threadKey if hit else None)
        for t, aid, hit in items
    ]
    events = [e for e in events if e.kind == "miss" or e.time >= ALERTS[e.alertId].issuedAt]
    for v in compute_metrics(events, ALERTS).ratios().values():
        assert 0.0 <= v <= 1.0


def test_module_examples():
    failures, tried = doctest.testmod(metrics_mod)
    assert tried > 0 and failures == 0
