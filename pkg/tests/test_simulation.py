from fractions import Fraction

import pytest

from dsn_hiercode.coding.codec import ErasurePattern, MessageSet, encode, random_messages, random_pattern
from dsn_hiercode.coding.codegen import build_single_level
from dsn_hiercode.coding.decoder import hierarchical_decode
from dsn_hiercode.coding.simulation import RecoverySimulation, simulate_recovery
from dsn_hiercode.network.topology import load_topology
from dsn_hiercode.options import CostModelOptions, RecoveryStatusOptions

from tests.conftest import load_document


@pytest.mark.parametrize("erased", [{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}, {1, 3, 4, 5, 6}])
@pytest.mark.parametrize("cost_model", CostModelOptions.list())
def test_latency_variant_completion_time(latency_code, rng, erased, cost_model):
    messages = random_messages(latency_code, rng)
    report = simulate_recovery(latency_code, encode(latency_code, messages), ErasurePattern({2: erased}),
                               cost_model)
    assert report.timed
    assert report.nodes[2].status == RecoveryStatusOptions.recovered_coop
    assert report.nodes[2].time == Fraction(6, 5)
    assert report.nodes[2].to_dict(with_time=True)["time"] == "6/5"
    for i in latency_code.node_ids:
        if i != 2:
            assert report.nodes[i].time == 0


def test_failed_nodes_have_no_time(latency_code, rng):
    messages = random_messages(latency_code, rng)
    report = simulate_recovery(latency_code, encode(latency_code, messages), ErasurePattern.full(latency_code))
    assert report.failed_nodes == latency_code.node_ids
    assert report.nodes[2].to_dict(with_time=True)["time"] == "inf"


def test_transfer_delays(multi_code, rng):
    codeword = encode(multi_code, random_messages(multi_code, rng))
    shortest = RecoverySimulation(multi_code, codeword, ErasurePattern())
    direct = RecoverySimulation(multi_code, codeword, ErasurePattern(), CostModelOptions.direct_link)
    assert shortest.delay(2, 8) == 2
    assert direct.delay(2, 8) is None
    assert direct.delay(2, 3) == multi_code.topology.latency(2, 3)


def test_trace_is_time_ordered(latency_code, rng):
    messages = random_messages(latency_code, rng)
    report = simulate_recovery(latency_code, encode(latency_code, messages), ErasurePattern({2: {1, 2, 3, 4, 5}}))
    times = [event.time for event in report.trace]
    assert times == sorted(times)
    assert any(event.event == "receive" and event.node == 2 for event in report.trace)


def test_simulation_reaches_the_static_outcome(grid_code, rng):
    for _ in range(10):
        messages = random_messages(grid_code, rng)
        codeword = encode(grid_code, messages)
        counts = {i: int(rng.integers(0, 7)) for i in grid_code.node_ids}
        pattern = random_pattern(grid_code, counts, rng)
        static = hierarchical_decode(grid_code, codeword, pattern)
        timed = simulate_recovery(grid_code, codeword, pattern)
        assert timed.failed_nodes == static.failed_nodes
        for i in grid_code.node_ids:
            assert timed.nodes[i].recovered == static.nodes[i].recovered


def test_local_recovery_completes_at_time_zero(latency_code, rng):
    messages = random_messages(latency_code, rng)
    report = simulate_recovery(latency_code, encode(latency_code, messages), ErasurePattern({2: {1, 3, 6}}))
    assert report.nodes[2].status == RecoveryStatusOptions.recovered_local
    assert report.nodes[2].time == 0


def slowed_code(factor: Fraction, edge=None):
    document = load_document("grid_latency.json")
    for entry in document["edges"]:
        if edge is None or {entry["a"], entry["b"]} == set(edge):
            entry["t"] = str(Fraction(str(entry.get("t", 1))) * factor)
    return build_single_level(load_topology(document))


def completion(report, i):
    time = report.nodes[i].time
    return float("inf") if time is None else time


@pytest.mark.parametrize("factor, edge", [(Fraction(2), None), (Fraction(5, 3), (2, 3)), (Fraction(3), (2, 5))])
def test_slower_links_never_finish_earlier(latency_code, rng, factor, edge):
    slow_code = slowed_code(factor, edge)
    for _ in range(5):
        messages = random_messages(latency_code, rng)
        counts = {i: int(rng.integers(0, 7)) for i in latency_code.node_ids}
        counts[2] = 5
        pattern = random_pattern(latency_code, counts, rng)
        fast = simulate_recovery(latency_code, encode(latency_code, messages), pattern)
        same = MessageSet.from_vector(slow_code, messages.to_vector(latency_code))
        slow = simulate_recovery(slow_code, encode(slow_code, same), pattern)
        for i in latency_code.node_ids:
            assert completion(slow, i) >= completion(fast, i)


def test_scaled_links_scale_completion_time(rng):
    slow_code = slowed_code(Fraction(2))
    messages = random_messages(slow_code, rng)
    report = simulate_recovery(slow_code, encode(slow_code, messages), ErasurePattern({2: {1, 2, 3, 4, 5}}))
    assert report.nodes[2].time == Fraction(12, 5)
