from itertools import combinations

import numpy as np
import pytest

from dsn_hiercode.coding.codec import ErasurePattern, encode, random_messages, random_pattern
from dsn_hiercode.coding.decoder import hierarchical_decode
from dsn_hiercode.options import RecoveryStatusOptions
from dsn_hiercode.validation.oracle import oracle_recoverable


def assert_sound(code, messages, report, pattern):
    """Every node the decoder recovers is determined globally and carries its true message."""
    verdict = oracle_recoverable(code, pattern)
    for i, entry in report.nodes.items():
        if entry.recovered:
            assert verdict.determined[i], f"node {i} recovered but undetermined under {pattern.to_dict()}"
            assert np.array_equal(entry.message, messages.symbols[i])


def test_no_erasures_is_local(grid_code, rng):
    messages = random_messages(grid_code, rng)
    report = hierarchical_decode(grid_code, encode(grid_code, messages), ErasurePattern())
    for i, entry in report.nodes.items():
        assert entry.status == RecoveryStatusOptions.recovered_local
        assert entry.level == 0
        assert entry.helpers == []
    assert report.failed_nodes == []


@pytest.mark.parametrize("erased", list(combinations(range(1, 7), 5)))
def test_five_erasures_at_node_2_recover_with_help(grid_code, rng, erased):
    messages = random_messages(grid_code, rng)
    report = hierarchical_decode(grid_code, encode(grid_code, messages), ErasurePattern({2: set(erased)}))
    entry = report.nodes[2]
    assert entry.status == RecoveryStatusOptions.recovered_coop
    assert entry.level == 1
    assert np.array_equal(entry.message, messages.symbols[2])


def test_everything_erased_fails(grid_code, rng):
    messages = random_messages(grid_code, rng)
    report = hierarchical_decode(grid_code, encode(grid_code, messages), ErasurePattern.full(grid_code))
    assert report.failed_nodes == grid_code.node_ids
    assert report.to_dict()["failed"] == grid_code.node_ids
    assert all(entry.message is None for entry in report.nodes.values())


def test_sweep_order_does_not_change_the_result(grid_code, rng):
    messages = random_messages(grid_code, rng)
    codeword = encode(grid_code, messages)
    pattern = random_pattern(grid_code, {2: 5, 4: 4, 6: 3, 9: 6}, rng)
    forward = hierarchical_decode(grid_code, codeword, pattern)
    order = list(grid_code.node_ids)
    rng.shuffle(order)
    shuffled = hierarchical_decode(grid_code, codeword, pattern, order=order)
    assert [e.status for e in forward.nodes.values()] == [shuffled.nodes[i].status for i in forward.nodes]
    assert forward.failed_nodes == shuffled.failed_nodes


def test_trace_lines(grid_code, rng):
    messages = random_messages(grid_code, rng)
    report = hierarchical_decode(grid_code, encode(grid_code, messages), ErasurePattern({2: {1, 2, 3, 4, 5}}))
    lines = report.trace_lines()
    assert lines
    assert all(line.startswith("0 ") and "round=" in line for line in lines)
    assert any(line.split()[1] == "2" and "m2" in line for line in lines)


def test_decoder_never_beats_the_oracle(grid_code, rng):
    for _ in range(30):
        messages = random_messages(grid_code, rng)
        counts = {i: int(rng.integers(0, 7)) for i in grid_code.node_ids}
        pattern = random_pattern(grid_code, counts, rng)
        report = hierarchical_decode(grid_code, encode(grid_code, messages), pattern)
        assert_sound(grid_code, messages, report, pattern)


def test_multi_level_no_erasures(multi_code, rng):
    messages = random_messages(multi_code, rng)
    report = hierarchical_decode(multi_code, encode(multi_code, messages), ErasurePattern())
    assert report.failed_nodes == []
    for i, entry in report.nodes.items():
        assert np.array_equal(entry.message, messages.symbols[i])


def burst_on_four_nodes(code, rng, rounds: int):
    for _ in range(rounds):
        messages = random_messages(code, rng)
        pattern = random_pattern(code, {2: 5, 4: 5, 8: 5, 10: 5}, rng)
        report = hierarchical_decode(code, encode(code, messages), pattern)
        assert_sound(code, messages, report, pattern)
        assert report.failed_nodes == []
        for i in (2, 4, 8, 10):
            assert report.nodes[i].recovered
            assert np.array_equal(report.nodes[i].message, messages.symbols[i])


@pytest.mark.parametrize("name", ["grid_code", "multi_code"])
def test_burst_on_four_nodes(request, rng, name):
    burst_on_four_nodes(request.getfixturevalue(name), rng, rounds=5)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["grid_code", "multi_code"])
def test_burst_on_four_nodes_many_draws(request, rng, name):
    burst_on_four_nodes(request.getfixturevalue(name), rng, rounds=200)


def test_extra_erasure_never_recovers_a_failed_node(grid_code, rng):
    for _ in range(20):
        messages = random_messages(grid_code, rng)
        codeword = encode(grid_code, messages)
        counts = {i: int(rng.integers(2, 7)) for i in grid_code.node_ids}
        pattern = random_pattern(grid_code, counts, rng)
        before = hierarchical_decode(grid_code, codeword, pattern)

        open_nodes = [i for i in grid_code.node_ids if pattern.count(i) < 6]
        if not open_nodes:
            continue
        node = int(rng.choice(open_nodes))
        coordinate = int(rng.choice(sorted(set(range(1, 7)) - pattern.at(node))))
        erased = {i: set(pattern.at(i)) for i in grid_code.node_ids}
        erased[node].add(coordinate)
        after = hierarchical_decode(grid_code, codeword, ErasurePattern(erased))

        for i in before.failed_nodes:
            assert not after.nodes[i].recovered


@pytest.mark.slow
def test_decoder_fuzz(grid_code, rng):
    for _ in range(10_000):
        messages = random_messages(grid_code, rng)
        counts = {i: int(rng.integers(0, 7)) for i in grid_code.node_ids}
        pattern = random_pattern(grid_code, counts, rng)
        report = hierarchical_decode(grid_code, encode(grid_code, messages), pattern)
        assert_sound(grid_code, messages, report, pattern)
