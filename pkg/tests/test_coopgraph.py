import pytest

from dsn_hiercode.coding.codegen import build_multi_level
from dsn_hiercode.exceptions import ConstructionError, CooperationGraphError
from dsn_hiercode.network.coopgraph import (build_cooperation_graph, check_compatible, cooperation_matrix,
                                            cycles_from_partition, make_cycle)
from dsn_hiercode.network.topology import load_topology
from dsn_hiercode.options import ErrorCode


def test_empty_cycle_list_gives_depth_one(grid):
    g = build_cooperation_graph(grid, cycles=[])
    assert g.is_single_level
    for i in grid.node_ids:
        assert g.nodes[i].depth == 1
        assert g.nodes[i].helpers[1] == grid.coop_sets[i]
    assert g.nodes[2].boosters[1] == {4, 6, 8}


def test_multi_helper_sets_of_node_2(multi_graph):
    info = multi_graph.node(2)
    assert info.depth == 3
    assert info.helpers == {1: {1, 3, 5}, 2: {8, 9}, 3: {10, 11}}
    assert info.accumulated[3] == {1, 3, 5, 8, 9, 10, 11}
    assert info.boosters == {1: {4, 6, 8}, 2: {4, 6}, 3: frozenset()}
    assert info.proof_boosters == info.boosters
    assert info.eta == {2: 1, 3: 1}


def test_multi_cooperation_matrix(multi_graph):
    D = cooperation_matrix(multi_graph)
    assert D.entry(2, 1) == 1
    assert D.entry(2, 8) == D.entry(2, 9) == 2
    assert D.entry(2, 10) == D.entry(2, 11) == 3
    assert D.entry(2, 4) == 0
    assert D.entry(2, 2) == 0


def test_multi_is_compatible(multi_graph):
    verdict = check_compatible(multi_graph)
    assert verdict.compatible
    assert verdict.to_dict()["verdict"] == "Compatible"


def test_level_components(multi_graph):
    assert multi_graph.level_components(2) == [{2, 3}, {4, 6}, {8, 9}, {10, 11, 12}]
    assert multi_graph.component_of(5, 3) == {4, 5, 6}
    assert multi_graph.component_of(1, 2) == frozenset()


def test_overlapping_rows_violate_condition_one(overlapping_document):
    g = build_cooperation_graph(load_topology(overlapping_document))
    verdict = check_compatible(g)
    assert not verdict.compatible
    assert any(v.condition == 1 and v.node == 2 for v in verdict.violations)
    with pytest.raises(ConstructionError) as error:
        build_multi_level(g)
    assert error.value.code == ErrorCode.incompatible_graph


def test_columns_outside_cooperation_set_violate_condition_two(grid):
    cycle = make_cycle(1, {2: (8, 12), 3: (8, 12)}, 2, {2: 1, 3: 1})
    verdict = check_compatible(build_cooperation_graph(grid, cycles=[cycle]))
    assert not verdict.compatible
    assert {(v.condition, v.node, v.level) for v in verdict.violations} == {(2, 8, 2), (2, 12, 2)}
    violation = next(v for v in verdict.violations if v.node == 8)
    assert violation.sets == {"V_12;2": [8, 12], "M_8": [5, 7, 9]}
    assert verdict.to_dict()["verdict"] == "Incompatible"

def test_blue_triangle_is_accepted(grid):
    cycle = make_cycle(1, {10: (4, 6), 11: (4, 5), 12: (5, 6)}, 3, {10: 1, 11: 1, 12: 1})
    g = build_cooperation_graph(grid, cycles=[cycle])
    assert cycle.col_rows == {4: (10, 11), 5: (11, 12), 6: (10, 12)}
    assert g.nodes[5].helpers[3] == {11, 12}
    assert g.nodes[10].row_cycles[3] == (1,)


@pytest.mark.parametrize("rows, level, gamma, code", [
    ({2: (8, 9), 3: (8, 9)}, 1, {2: 1, 3: 1}, ErrorCode.cycle_level),
    ({2: (8, 8), 3: (8, 9)}, 2, {2: 1, 3: 1}, ErrorCode.malformed_cycle),
    ({2: (3, 9), 3: (2, 9)}, 2, {2: 1, 3: 1}, ErrorCode.malformed_cycle),
    ({2: (8, 13), 3: (8, 13)}, 2, {2: 1, 3: 1}, ErrorCode.unknown_node),
    ({2: (8, 9), 3: (8, 9)}, 2, {2: 0, 3: 1}, ErrorCode.cycle_gamma),
    ({2: (8, 9), 3: (8, 9)}, 2, {2: 1}, ErrorCode.cycle_gamma),
    ({2: (1, 4), 3: (1, 4)}, 2, {2: 1, 3: 1}, ErrorCode.cooperation_conflict),
])
def test_invalid_cycles(grid, rows, level, gamma, code):
    with pytest.raises(CooperationGraphError) as error:
        build_cooperation_graph(grid, cycles=[make_cycle(1, rows, level, gamma)])
    assert error.value.code == code


def test_vertex_in_two_cycles(grid):
    first = make_cycle(1, {2: (8, 9), 3: (8, 9)}, 2, {2: 1, 3: 1})
    second = make_cycle(2, {2: (8, 10), 4: (8, 10)}, 2, {2: 1, 4: 1})
    with pytest.raises(CooperationGraphError) as error:
        build_cooperation_graph(grid, cycles=[first, second])
    assert error.value.code == ErrorCode.cooperation_conflict


def test_undefined_gamma_symbol(overlapping_document):
    overlapping_document["cycles"][0]["symbols"] = {"2": "missing", "3": "e"}
    with pytest.raises(CooperationGraphError) as error:
        build_cooperation_graph(load_topology(overlapping_document))
    assert error.value.code == ErrorCode.cycle_gamma


def test_cycles_from_partition_rebuilds_multi(multi_graph):
    D = cooperation_matrix(multi_graph).tolist()
    ordered = [multi_graph.cycles[cid] for cid in sorted(multi_graph.cycles)]
    rebuilt = cycles_from_partition(D, [cycle.vertices for cycle in ordered])
    assert [(c.row_cols, c.level) for c in rebuilt] == [(c.row_cols, c.level) for c in ordered]


def test_cycles_from_partition_must_cover_every_entry(multi_graph):
    D = cooperation_matrix(multi_graph).tolist()
    ordered = [multi_graph.cycles[cid] for cid in sorted(multi_graph.cycles)]
    with pytest.raises(CooperationGraphError):
        cycles_from_partition(D, [cycle.vertices for cycle in ordered[1:]])
