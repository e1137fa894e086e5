"""
Multi-level cooperation: cycles, derived helper sets and the compatibility check.

A cycle joins row nodes X_t to column nodes Y_t. Every row i in X_t hosts a
block E_{i;l;t} and gains gamma_{i;t} parity symbols stored at its two
columns Y_{t;i}; every column j in Y_t hosts a V_{j;l} block, so the rows
X_{t;j} become level-l helpers of j.
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from loguru import logger

from dsn_hiercode.exceptions import CooperationGraphError
from dsn_hiercode.network.models import CycleDocument
from dsn_hiercode.network.topology import DsnTopology
from dsn_hiercode.options import ErrorCode


@dataclass(frozen=True)
class Cycle:
    id: int
    X: FrozenSet[int]
    Y: FrozenSet[int]
    row_cols: Mapping[int, Tuple[int, int]]
    level: int
    gamma: Mapping[int, int]
    col_rows: Mapping[int, Tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        col_rows: Dict[int, List[int]] = {}
        for row, cols in self.row_cols.items():
            for col in cols:
                col_rows.setdefault(col, []).append(row)
        object.__setattr__(self, "col_rows", {col: tuple(sorted(rows)) for col, rows in sorted(col_rows.items())})

    @property
    def vertices(self) -> List[Tuple[int, int]]:
        return [(row, col) for row in sorted(self.row_cols) for col in self.row_cols[row]]

    def validate(self, node_ids: Iterable[int]):
        known = set(node_ids)
        for node in self.X | self.Y:
            if node not in known:
                raise CooperationGraphError(f"Cycle {self.id} references unknown node {node}",
                                            code=ErrorCode.unknown_node, cycle=self.id, node=node)
        if self.level < 2:
            raise CooperationGraphError(f"Cycle {self.id} has level {self.level}; levels start at 2",
                                        code=ErrorCode.cycle_level, cycle=self.id)
        if len(self.X) != len(self.Y) or len(self.X) not in (2, 3):
            raise CooperationGraphError(f"Cycle {self.id} must pair 2 or 3 rows with as many columns",
                                        cycle=self.id, X=sorted(self.X), Y=sorted(self.Y))
        if self.X & self.Y:
            raise CooperationGraphError(f"Cycle {self.id} uses nodes {sorted(self.X & self.Y)} as row and column",
                                        cycle=self.id)
        if set(self.row_cols) != set(self.X):
            raise CooperationGraphError(f"Cycle {self.id} pairs do not cover exactly the rows X",
                                        cycle=self.id)
        for row, cols in self.row_cols.items():
            if len(set(cols)) != 2 or not set(cols) <= self.Y:
                raise CooperationGraphError(f"Cycle {self.id} row {row} must join two distinct columns of Y",
                                            cycle=self.id, row=row, cols=list(cols))
        if set(self.col_rows) != set(self.Y) or any(len(rows) != 2 for rows in self.col_rows.values()):
            raise CooperationGraphError(f"Cycle {self.id} columns must each meet exactly two rows",
                                        cycle=self.id)
        incidence = nx.Graph()
        incidence.add_edges_from((("row", row), ("col", col)) for row, col in self.vertices)
        if not nx.is_connected(incidence):
            raise CooperationGraphError(f"Cycle {self.id} splits into more than one closed cycle", cycle=self.id)
        for row in self.X:
            if self.gamma.get(row) is None:
                raise CooperationGraphError(f"Cycle {self.id} has no gamma for row {row}",
                                            code=ErrorCode.cycle_gamma, cycle=self.id, row=row)
            if self.gamma[row] < 1:
                raise CooperationGraphError(f"Cycle {self.id} gamma for row {row} must be at least 1",
                                            code=ErrorCode.cycle_gamma, cycle=self.id, row=row)

    def to_document(self, symbols: Optional[Dict[int, str]] = None) -> CycleDocument:
        return CycleDocument(
            X=sorted(self.X),
            Y=sorted(self.Y),
            pairs=[{"row": row, "cols": list(self.row_cols[row])} for row in sorted(self.row_cols)],
            level=self.level,
            gamma=None if symbols else {str(row): self.gamma[row] for row in sorted(self.gamma)},
            symbols={str(row): name for row, name in sorted(symbols.items())} if symbols else None,
        )


def make_cycle(cycle_id: int, row_cols: Mapping[int, Sequence[int]], level: int,
               gamma: Mapping[int, int]) -> Cycle:
    rows = {int(row): tuple(sorted(int(c) for c in cols)) for row, cols in row_cols.items()}
    return Cycle(
        id=cycle_id,
        X=frozenset(rows),
        Y=frozenset(col for cols in rows.values() for col in cols),
        row_cols=rows,
        level=level,
        gamma={int(row): value for row, value in gamma.items()},
    )


def cycle_from_document(cycle_id: int, document: CycleDocument, gamma_symbols: Mapping[str, int]) -> Cycle:
    """Convert a configuration entry, expanding symbol-form gamma into per-row values."""
    row_cols = {pair.row: tuple(sorted(pair.cols)) for pair in document.pairs}
    if len(row_cols) != len(document.pairs):
        raise CooperationGraphError(f"Cycle {cycle_id} lists a row twice", cycle=cycle_id)
    gamma: Dict[int, int] = {int(row): value for row, value in (document.gamma or {}).items()}
    for row, symbol in (document.symbols or {}).items():
        if symbol not in gamma_symbols:
            raise CooperationGraphError(f"Cycle {cycle_id} uses undefined gamma symbol {symbol!r}",
                                        code=ErrorCode.cycle_gamma, cycle=cycle_id, symbol=symbol)
        gamma.setdefault(int(row), gamma_symbols[symbol])
    cycle = Cycle(id=cycle_id, X=frozenset(document.X), Y=frozenset(document.Y), row_cols=row_cols,
                  level=document.level, gamma=gamma)
    if cycle.Y != frozenset(col for cols in row_cols.values() for col in cols):
        raise CooperationGraphError(f"Cycle {cycle_id} pairs do not cover exactly the columns Y", cycle=cycle_id)
    return cycle


def cycles_from_topology(t: DsnTopology) -> List[Cycle]:
    return [cycle_from_document(index, document, t.gamma_symbols) for index, document in enumerate(t.cycles, 1)]


def cycles_from_partition(D: Sequence[Sequence[int]], groups: Sequence[Iterable[Tuple[int, int]]],
                          gamma: Optional[Mapping[Tuple[int, int], int]] = None) -> List[Cycle]:
    """
    Assemble cycles from a cooperation matrix and a partition of its entries >= 2
    :param D: p x p cooperation matrix, D[i-1][j-1] = level of helper j for node i
    :param groups: one collection of 1-based (helper row, column) vertices per cycle
    :param gamma: optional gamma per (row, cycle index starting at 1); default 1
    :return: cycles numbered in group order
    """
    D = np.asarray(D, dtype=np.int64)
    claimed: Set[Tuple[int, int]] = set()
    cycles = []
    for cycle_id, group in enumerate(groups, 1):
        vertices = sorted(set((int(i), int(j)) for i, j in group))
        levels = {int(D[j - 1, i - 1]) for i, j in vertices}
        if len(levels) != 1 or min(levels) < 2:
            raise CooperationGraphError(f"Group {cycle_id} mixes levels or covers entries below 2",
                                        code=ErrorCode.cycle_level, cycle=cycle_id, levels=sorted(levels))
        claimed.update(vertices)
        row_cols: Dict[int, List[int]] = {}
        for row, col in vertices:
            row_cols.setdefault(row, []).append(col)
        values = {row: (gamma or {}).get((row, cycle_id), 1) for row in row_cols}
        cycles.append(make_cycle(cycle_id, row_cols, levels.pop(), values))
    expected = {(int(j) + 1, int(i) + 1) for i, j in zip(*np.nonzero(D >= 2))}
    if claimed != expected:
        raise CooperationGraphError("Groups must partition every cooperation-matrix entry of level 2 or more",
                                    missing=sorted(expected - claimed), extra=sorted(claimed - expected))
    return cycles


@dataclass
class NodeCooperation:
    """Helper sets of one node, keyed by level."""
    node: int
    depth: int
    helpers: Dict[int, FrozenSet[int]]
    accumulated: Dict[int, FrozenSet[int]]
    boosters: Dict[int, FrozenSet[int]]
    proof_boosters: Dict[int, FrozenSet[int]]
    column_cycles: Dict[int, Tuple[int, ...]]
    row_cycles: Dict[int, Tuple[int, ...]]
    column_span: Dict[int, FrozenSet[int]]
    eta: Dict[int, int]

    @property
    def levels(self) -> List[int]:
        return list(range(1, self.depth + 1))

    @property
    def eta_total(self) -> int:
        return sum(self.eta.values())


@dataclass
class CooperationGraph:
    topology: DsnTopology
    cycles: Dict[int, Cycle]
    nodes: Dict[int, NodeCooperation]

    @property
    def is_single_level(self) -> bool:
        return not self.cycles

    def node(self, i: int) -> NodeCooperation:
        self.topology.params(i)
        return self.nodes[i]

    def level_components(self, level: int) -> List[FrozenSet[int]]:
        """Column nodes joined by level-l cycles; each cycle's columns land in one component."""
        columns = nx.Graph()
        for cycle in self.cycles.values():
            if cycle.level == level:
                members = sorted(cycle.Y)
                columns.add_nodes_from(members)
                columns.add_edges_from(combinations(members, 2))
        return sorted((frozenset(c) for c in nx.connected_components(columns)), key=min)

    def component_of(self, i: int, level: int) -> FrozenSet[int]:
        for component in self.level_components(level):
            if i in component:
                return component
        return frozenset()

    def vertex_cycle(self, row: int, col: int) -> Optional[Cycle]:
        for cycle in self.cycles.values():
            if col in cycle.row_cols.get(row, ()):
                return cycle
        return None


def build_cooperation_graph(t: DsnTopology, cycles: Optional[Sequence[Cycle]] = None) -> CooperationGraph:
    """
    Derive per-node helper sets from the topology and its cycles
    :param t: topology with cooperation sets M_i
    :param cycles: cycles to use; default are the ones declared in the topology
    :return: cooperation graph
    """
    if cycles is None:
        cycles = cycles_from_topology(t)
    by_id: Dict[int, Cycle] = {}
    for cycle in cycles:
        if cycle.id in by_id:
            raise CooperationGraphError(f"Duplicate cycle id {cycle.id}", cycle=cycle.id)
        cycle.validate(t.node_ids)
        by_id[cycle.id] = cycle

    seen: Dict[Tuple[int, int], int] = {}
    for cycle in by_id.values():
        for row, col in cycle.vertices:
            if col in t.coop_sets[row]:
                raise CooperationGraphError(f"Cycle {cycle.id} vertex ({row},{col}) already cooperates at level 1",
                                            code=ErrorCode.cooperation_conflict, cycle=cycle.id, vertex=[row, col])
            if (row, col) in seen:
                raise CooperationGraphError(f"Vertex ({row},{col}) appears in cycles {seen[(row, col)]} "
                                            f"and {cycle.id}", code=ErrorCode.cooperation_conflict,
                                            vertex=[row, col])
            seen[(row, col)] = cycle.id

    ordered = [by_id[key] for key in sorted(by_id)]
    nodes: Dict[int, NodeCooperation] = {}
    for i in t.node_ids:
        touching = [c.level for c in ordered if i in c.X or i in c.Y]
        depth = max(touching, default=1)
        column_cycles = {l: tuple(c.id for c in ordered if i in c.Y and c.level == l) for l in range(2, depth + 1)}
        row_cycles = {l: tuple(c.id for c in ordered if i in c.X and c.level == l) for l in range(2, depth + 1)}
        column_span = {l: frozenset(col for cid in ids for col in by_id[cid].Y) for l, ids in column_cycles.items()}
        eta = {l: max((by_id[cid].gamma[row] for cid in ids for row in by_id[cid].col_rows[i]), default=0)
               for l, ids in column_cycles.items()}
        helpers = {1: t.coop_sets[i]}
        for l, ids in column_cycles.items():
            helpers[l] = frozenset(row for cid in ids for row in by_id[cid].col_rows[i])
        accumulated: Dict[int, FrozenSet[int]] = {}
        running: FrozenSet[int] = frozenset()
        for l in range(1, depth + 1):
            running = running | helpers[l]
            accumulated[l] = running
        nodes[i] = NodeCooperation(node=i, depth=depth, helpers=helpers, accumulated=accumulated, boosters={},
                                   proof_boosters={}, column_cycles=column_cycles, row_cycles=row_cycles,
                                   column_span=column_span, eta=eta)

    for i, info in nodes.items():
        level_one = info.helpers[1]
        info.boosters[1] = frozenset(
            x for j in level_one for x in t.coop_sets[j] if x != i and x not in level_one)
        info.proof_boosters[1] = info.boosters[1]
        for l in range(2, info.depth + 1):
            excluded = {i} | info.accumulated[l]
            info.boosters[l] = frozenset(
                x for j in info.helpers[l] for x in nodes[j].helpers.get(l, frozenset()) if x not in excluded)
            info.proof_boosters[l] = frozenset(
                x for cid in info.row_cycles[l] for j in by_id[cid].row_cols[i]
                for x in nodes[j].helpers.get(by_id[cid].level, frozenset()) if x not in excluded)
            if info.boosters[l] != info.proof_boosters[l]:
                logger.warning(f"Node {i} level {l}: booster set {sorted(info.boosters[l])} differs from "
                               f"the row-cycle derivation {sorted(info.proof_boosters[l])}")
            if info.accumulated[l] == info.accumulated[l - 1]:
                logger.warning(f"Node {i}: helper set does not grow from level {l - 1} to {l}")

    graph = CooperationGraph(topology=t, cycles=by_id, nodes=nodes)
    logger.info(f"Built cooperation graph with {len(by_id)} cycles, max depth "
                f"{max((n.depth for n in nodes.values()), default=1)}")
    return graph


@dataclass
class CooperationMatrix:
    node_ids: List[int]
    D: np.ndarray

    def entry(self, i: int, j: int) -> int:
        return int(self.D[i - 1, j - 1])

    def tolist(self) -> List[List[int]]:
        return self.D.tolist()


def cooperation_matrix(g: CooperationGraph) -> CooperationMatrix:
    ids = g.topology.node_ids
    D = np.zeros((len(ids), len(ids)), dtype=np.int64)
    for i, info in g.nodes.items():
        for level, members in info.helpers.items():
            for j in members:
                D[i - 1, j - 1] = level
    return CooperationMatrix(node_ids=ids, D=D)


@dataclass
class Violation:
    condition: int
    node: int
    level: Optional[int]
    message: str
    sets: Dict[str, List[int]] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {"condition": self.condition, "node": self.node, "level": self.level,
                "message": self.message, "sets": self.sets}


@dataclass
class CompatibilityVerdict:
    violations: List[Violation] = field(default_factory=list)
    notes: List[Violation] = field(default_factory=list)

    @property
    def compatible(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            "verdict": "Compatible" if self.compatible else "Incompatible",
            "violations": [v.to_dict() for v in self.violations],
            "notes": [n.to_dict() for n in self.notes],
        }


def check_compatible(g: CooperationGraph) -> CompatibilityVerdict:
    """
    Check the two compatibility conditions.

    Condition 1: the row sets of the cycles having node i as a column are
    pairwise disjoint. Condition 2: for j in V_{i;l} other than i, V_{j;l}
    minus i lies inside M_i. The literal column-set disjointness and the
    cycle-containment form of condition 2 are reported as notes.
    """
    verdict = CompatibilityVerdict()
    t = g.topology
    for i, info in g.nodes.items():
        column_ids = [cid for ids in info.column_cycles.values() for cid in ids]
        for first, second in combinations(column_ids, 2):
            a, b = g.cycles[first], g.cycles[second]
            if a.X & b.X:
                verdict.violations.append(Violation(
                    condition=1, node=i, level=None,
                    message=f"Cycles {first} and {second} meet node {i} with overlapping rows",
                    sets={f"X_{first}": sorted(a.X), f"X_{second}": sorted(b.X)}))
            if a.Y & b.Y:
                verdict.notes.append(Violation(
                    condition=1, node=i, level=None,
                    message=f"Column sets of cycles {first} and {second} share {sorted(a.Y & b.Y)}",
                    sets={f"Y_{first}": sorted(a.Y), f"Y_{second}": sorted(b.Y)}))
        for l, span in info.column_span.items():
            for j in sorted(span - {i}):
                other = g.nodes[j].column_span.get(l, frozenset()) - {i}
                if not other <= t.coop_sets[i]:
                    verdict.violations.append(Violation(
                        condition=2, node=i, level=l,
                        message=f"V_{{{j};{l}}} reaches {sorted(other - t.coop_sets[i])} outside M_{i}",
                        sets={f"V_{j};{l}": sorted(g.nodes[j].column_span.get(l, ())), f"M_{i}": sorted(t.coop_sets[i])}))
                for cid in g.nodes[j].column_cycles.get(l, ()):
                    if not g.cycles[cid].Y <= t.coop_sets[i] | {i}:
                        verdict.notes.append(Violation(
                            condition=2, node=i, level=l,
                            message=f"Cycle {cid} through column {j} leaves M_{i} and {i}",
                            sets={f"Y_{cid}": sorted(g.cycles[cid].Y), f"M_{i}": sorted(t.coop_sets[i])}))
    if verdict.compatible:
        logger.info(f"Cooperation graph is compatible ({len(verdict.notes)} advisory notes)")
    else:
        logger.warning(f"Cooperation graph has {len(verdict.violations)} compatibility violations")
    return verdict
