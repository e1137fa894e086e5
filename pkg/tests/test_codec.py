from itertools import combinations

import numpy as np
import pytest

from dsn_hiercode.coding.codec import (CodewordSet, ErasurePattern, MessageSet, encode, local_decode, random_messages,
                                       random_pattern, received_word)
from dsn_hiercode.exceptions import DimensionError, InconsistentSideInfoError, TopologyError
from dsn_hiercode.options import ErrorCode


@pytest.fixture
def grid_word(grid_code, rng):
    messages = random_messages(grid_code, rng)
    return messages, encode(grid_code, messages)


def level_one_aggregate(code, messages, column):
    block = code.column_block(column, 1)
    value = np.zeros(block.width, dtype=np.int64)
    for y, factor in block.factors.items():
        value ^= code.ctx.vec_mat(messages.symbols[y], factor)
    return value


def test_encode_is_systematic(grid_code, grid_word):
    messages, codeword = grid_word
    for i in grid_code.node_ids:
        assert np.array_equal(codeword.message(grid_code, i), messages.symbols[i])
        assert len(codeword.symbols[i]) == 6


def test_encode_is_linear(grid_code, rng):
    a, b = random_messages(grid_code, rng), random_messages(grid_code, rng)
    total = MessageSet.from_vector(grid_code, a.to_vector(grid_code) ^ b.to_vector(grid_code))
    expected = encode(grid_code, a).to_vector(grid_code) ^ encode(grid_code, b).to_vector(grid_code)
    assert np.array_equal(encode(grid_code, total).to_vector(grid_code), expected)


def test_parity_is_local_part_plus_aggregate(grid_code, grid_word):
    messages, codeword = grid_word
    ctx, node = grid_code.ctx, grid_code.nodes[2]
    parity = ctx.vec_mat(messages.symbols[2], node.A.data) ^ ctx.vec_mat(
        level_one_aggregate(grid_code, messages, 2), node.U.data)
    assert np.array_equal(codeword.symbols[2][2:], parity)


def test_local_decode_up_to_local_capability(grid_code, grid_word):
    messages, codeword = grid_word
    for erased in combinations(range(1, 7), 3):
        received = received_word(codeword, ErasurePattern({2: set(erased)}), 2)
        assert np.array_equal(local_decode(grid_code, 2, received), messages.symbols[2])


def test_local_decode_needs_side_information(grid_code, grid_word):
    messages, codeword = grid_word
    received = received_word(codeword, ErasurePattern({2: {1, 2, 3, 4}}), 2)
    assert local_decode(grid_code, 2, received) is None
    side = {1: level_one_aggregate(grid_code, messages, 2)}
    assert np.array_equal(local_decode(grid_code, 2, received, side=side), messages.symbols[2])


def test_inconsistent_side_information(grid_code, grid_word):
    messages, codeword = grid_word
    received = received_word(codeword, ErasurePattern(), 2)
    wrong = level_one_aggregate(grid_code, messages, 2) ^ 1
    with pytest.raises(InconsistentSideInfoError) as error:
        local_decode(grid_code, 2, received, side={1: wrong})
    assert error.value.code == ErrorCode.inconsistent_side_info


def test_received_word_length_checked(grid_code):
    with pytest.raises(DimensionError):
        local_decode(grid_code, 2, [None] * 5)


def test_pattern_drops_empty_nodes():
    pattern = ErasurePattern({2: {1, 3}, 4: set()})
    assert pattern.to_dict() == {"2": [1, 3]}
    assert ErasurePattern.from_dict(pattern.to_dict()) == pattern
    assert pattern.count(4) == 0


def test_observed_columns(grid_code):
    pattern = ErasurePattern({1: {1, 6}, 2: {2}})
    columns = pattern.observed_columns(grid_code)
    assert len(columns) == grid_code.total_n - 3
    assert columns[:5] == [1, 2, 3, 4, 6]
    assert ErasurePattern.full(grid_code, [5]).count(5) == 6


@pytest.mark.parametrize("erased, error_type", [
    ({13: {1}}, TopologyError),
    ({2: {0}}, DimensionError),
    ({2: {7}}, DimensionError),
])
def test_pattern_validation(grid_code, erased, error_type):
    with pytest.raises(error_type):
        ErasurePattern(erased).validate(grid_code)


def test_random_pattern_sizes(grid_code, rng):
    pattern = random_pattern(grid_code, {2: 5, 4: 2}, rng)
    assert pattern.count(2) == 5
    assert pattern.count(4) == 2
    assert pattern.at(2) <= set(range(1, 7))
    with pytest.raises(DimensionError):
        random_pattern(grid_code, {2: 7}, rng)


def test_message_lengths_checked(grid_code):
    with pytest.raises(DimensionError):
        MessageSet({1: np.array([1])}).to_vector(grid_code)
    with pytest.raises(DimensionError):
        CodewordSet.from_vector(grid_code, np.zeros(5, dtype=np.int64))
