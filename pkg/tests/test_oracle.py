import numpy as np

from dsn_hiercode.coding.codec import ErasurePattern, encode, random_messages
from dsn_hiercode.validation.oracle import oracle_decode, oracle_recoverable, reencode_matches


def test_no_erasures_has_full_rank(grid_code):
    verdict = oracle_recoverable(grid_code, ErasurePattern())
    assert verdict.global_rank == grid_code.total_k
    assert all(verdict.determined.values())
    assert verdict.nullspace_support == []


def test_pair_with_one_node_lost(pair_code):
    verdict = oracle_recoverable(pair_code, ErasurePattern.full(pair_code, [1]))
    assert verdict.determined == {1: False, 2: True}
    assert verdict.nullspace_support == [(1, 1)]
    assert verdict.to_dict()["determined"] == {"1": False, "2": True}


def test_lost_node_is_determined_by_its_neighbors(grid_code):
    verdict = oracle_recoverable(grid_code, ErasurePattern.full(grid_code, [2]))
    assert verdict.determined[2]


def test_oracle_decode(grid_code, rng):
    messages = random_messages(grid_code, rng)
    codeword = encode(grid_code, messages)
    pattern = ErasurePattern({2: {1, 2, 3, 4, 5, 6}, 4: {1, 2}})
    decoded = oracle_decode(grid_code, codeword, pattern)
    verdict = oracle_recoverable(grid_code, pattern)
    for i in grid_code.node_ids:
        if verdict.determined[i]:
            assert np.array_equal(decoded[i], messages.symbols[i])
        else:
            assert decoded[i] is None


def test_oracle_decode_reports_undetermined(pair_code, rng):
    messages = random_messages(pair_code, rng)
    decoded = oracle_decode(pair_code, encode(pair_code, messages), ErasurePattern.full(pair_code, [1]))
    assert decoded[1] is None
    assert np.array_equal(decoded[2], messages.symbols[2])


def test_reencode_matches(grid_code, rng):
    messages = random_messages(grid_code, rng)
    codeword = encode(grid_code, messages)
    pattern = ErasurePattern({3: {1, 5}})
    assert reencode_matches(grid_code, codeword, pattern)
    codeword.symbols[5] = codeword.symbols[5].copy()
    codeword.symbols[5][0] ^= 1
    assert not reencode_matches(grid_code, codeword, pattern)
