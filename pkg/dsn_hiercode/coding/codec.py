from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from dsn_hiercode.algebra.linalg import Matrix, solve
from dsn_hiercode.coding.codegen import CodeInstance
from dsn_hiercode.exceptions import DimensionError, InconsistentSideInfoError, TopologyError
from dsn_hiercode.options import ErrorCode, SolveKindOptions


@dataclass
class MessageSet:
    symbols: Dict[int, np.ndarray]

    def validate(self, code: CodeInstance) -> "MessageSet":
        for i in code.node_ids:
            if i not in self.symbols or len(self.symbols[i]) != code.topology.nodes[i].k:
                raise DimensionError(f"Message of node {i} must have k_{i}={code.topology.nodes[i].k} symbols",
                                     node=i)
        return self

    def to_vector(self, code: CodeInstance) -> np.ndarray:
        self.validate(code)
        return np.concatenate([np.asarray(self.symbols[i], dtype=np.int64) for i in code.node_ids])

    @classmethod
    def from_vector(cls, code: CodeInstance, vector: Sequence[int]) -> "MessageSet":
        vector = np.asarray(vector, dtype=np.int64)
        if vector.size != code.total_k:
            raise DimensionError(f"Expected {code.total_k} message symbols, got {vector.size}")
        return cls({i: vector[code.row_offsets[i]:code.row_offsets[i] + code.topology.nodes[i].k].copy()
                    for i in code.node_ids})


@dataclass
class CodewordSet:
    symbols: Dict[int, np.ndarray]

    def to_vector(self, code: CodeInstance) -> np.ndarray:
        for i in code.node_ids:
            if len(self.symbols.get(i, ())) != code.topology.nodes[i].n:
                raise DimensionError(f"Codeword of node {i} must have n_{i}={code.topology.nodes[i].n} symbols",
                                     node=i)
        return np.concatenate([np.asarray(self.symbols[i], dtype=np.int64) for i in code.node_ids])

    @classmethod
    def from_vector(cls, code: CodeInstance, vector: Sequence[int]) -> "CodewordSet":
        vector = np.asarray(vector, dtype=np.int64)
        if vector.size != code.total_n:
            raise DimensionError(f"Expected {code.total_n} codeword symbols, got {vector.size}")
        return cls({i: vector[code.col_offsets[i]:code.col_offsets[i] + code.topology.nodes[i].n].copy()
                    for i in code.node_ids})

    def message(self, code: CodeInstance, i: int) -> np.ndarray:
        return self.symbols[i][:code.topology.nodes[i].k]


@dataclass
class ErasurePattern:
    """Erased coordinates per node, 1-based within [1, n_i]."""
    erased: Dict[int, FrozenSet[int]] = field(default_factory=dict)

    def __post_init__(self):
        self.erased = {int(i): frozenset(int(x) for x in coords) for i, coords in self.erased.items() if coords}

    def at(self, i: int) -> FrozenSet[int]:
        return self.erased.get(i, frozenset())

    def count(self, i: int) -> int:
        return len(self.at(i))

    def validate(self, code: CodeInstance) -> "ErasurePattern":
        for i, coords in self.erased.items():
            if i not in code.topology.nodes:
                raise TopologyError(f"Erasure pattern names unknown node {i}", code=ErrorCode.unknown_node, node=i)
            n = code.topology.nodes[i].n
            outside = sorted(x for x in coords if not 1 <= x <= n)
            if outside:
                raise DimensionError(f"Erased coordinates {outside} of node {i} are outside [1, {n}]", node=i)
        return self

    def observed_columns(self, code: CodeInstance) -> List[int]:
        """Column indices of G that survive the pattern."""
        return [code.col_offsets[i] + x - 1 for i in code.node_ids
                for x in range(1, code.topology.nodes[i].n + 1) if x not in self.at(i)]

    def to_dict(self) -> Dict[str, List[int]]:
        return {str(i): sorted(coords) for i, coords in sorted(self.erased.items())}

    @classmethod
    def from_dict(cls, data: Mapping[str, Iterable[int]]) -> "ErasurePattern":
        return cls({int(i): frozenset(coords) for i, coords in data.items()})

    @classmethod
    def full(cls, code: CodeInstance, nodes: Optional[Iterable[int]] = None) -> "ErasurePattern":
        nodes = code.node_ids if nodes is None else nodes
        return cls({i: frozenset(range(1, code.topology.nodes[i].n + 1)) for i in nodes})


def encode(c: CodeInstance, m: MessageSet) -> CodewordSet:
    """c = m . G, split per node into (m_i | parity_i)."""
    vector = m.to_vector(c)
    return CodewordSet.from_vector(c, c.ctx.vec_mat(vector, c.G.data))


def random_messages(c: CodeInstance, rng: np.random.Generator) -> MessageSet:
    return MessageSet.from_vector(c, rng.integers(0, c.ctx.q, size=c.total_k))


def random_pattern(c: CodeInstance, counts: Mapping[int, int], rng: np.random.Generator) -> ErasurePattern:
    """Uniformly chosen coordinate subsets of the requested sizes, nodes in ascending order."""
    erased = {}
    for i in sorted(counts):
        n = c.topology.params(i).n
        if not 0 <= counts[i] <= n:
            raise DimensionError(f"Node {i} has {n} coordinates, cannot erase {counts[i]}", node=i)
        erased[i] = frozenset(int(x) + 1 for x in rng.choice(n, size=counts[i], replace=False))
    return ErasurePattern(erased)


@dataclass
class LocalOutcome:
    """Solution of one node's system: its message when determined, plus any determined aggregates."""
    message: Optional[np.ndarray]
    aggregates: Dict[int, np.ndarray]
    kind: SolveKindOptions


def _factor_at(c: CodeInstance, i: int, column: int) -> np.ndarray:
    for block in c.column_blocks[column]:
        if i in block.factors:
            return block.factors[i]
    raise DimensionError(f"Node {i} has no cross parity at node {column}", node=i, column=column)


def local_system(c: CodeInstance, i: int, received: Sequence[Optional[int]],
                 side: Optional[Mapping[int, Sequence[int]]] = None,
                 extra: Optional[Mapping[int, Sequence[int]]] = None) -> LocalOutcome:
    """
    Solve node i's system in unknowns [m_i | level-1 aggregate | level-l aggregates]
    :param c: code
    :param i: node
    :param received: c_i with None at erased coordinates
    :param side: known aggregate per level (1 for the U rows)
    :param extra: known cross parity m_i . B_{i,j} (or the padded E factor) per column node j
    :return: outcome with the message when it is determined
    """
    node = c.nodes[i]
    k, r = node.params.k, node.params.r
    u = node.u
    if len(received) != k + r:
        raise DimensionError(f"Node {i} stores {k + r} symbols, got {len(received)}", node=i)
    stack = node.stack.data
    rows, rhs = [], []
    for position, value in enumerate(received):
        if value is None:
            continue
        if position < k:
            row = np.zeros(u, dtype=np.int64)
            row[position] = 1
        else:
            row = stack[:, position - k]
        rows.append(row)
        rhs.append(int(value))
    for level, value in sorted((side or {}).items()):
        offset, height = node.row_offset(level)
        if len(value) != height:
            raise DimensionError(f"Aggregate at level {level} of node {i} has {height} symbols", node=i)
        for index in range(height):
            row = np.zeros(u, dtype=np.int64)
            row[offset + index] = 1
            rows.append(row)
            rhs.append(int(value[index]))
    for column, value in sorted((extra or {}).items()):
        factor = _factor_at(c, i, column)
        for index in range(factor.shape[1]):
            row = np.zeros(u, dtype=np.int64)
            row[:k] = factor[:, index]
            rows.append(row)
            rhs.append(int(value[index]))

    coeff = Matrix(c.ctx, np.array(rows, dtype=np.int64).reshape(len(rows), u))
    outcome = solve(coeff, Matrix(c.ctx, np.array(rhs, dtype=np.int64).reshape(len(rhs), 1)))
    if outcome.kind == SolveKindOptions.inconsistent:
        raise InconsistentSideInfoError(f"Observations of node {i} contradict the supplied side information",
                                        node=i)
    values = outcome.values[:, 0]
    message = values[:k].copy() if all(outcome.determined[:k]) else None
    aggregates = {}
    for level in [1] + [l for l, _ in node.level_rows]:
        offset, height = node.row_offset(level)
        if height and all(outcome.determined[offset:offset + height]):
            aggregates[level] = values[offset:offset + height].copy()
    return LocalOutcome(message=message, aggregates=aggregates, kind=outcome.kind)


def local_decode(c: CodeInstance, i: int, received: Sequence[Optional[int]],
                 side: Optional[Mapping[int, Sequence[int]]] = None,
                 extra: Optional[Mapping[int, Sequence[int]]] = None) -> Optional[np.ndarray]:
    """m_i when the local system (with any side information) determines it, otherwise None."""
    return local_system(c, i, received, side, extra).message


def received_word(codeword: CodewordSet, pattern: ErasurePattern, i: int) -> List[Optional[int]]:
    erased = pattern.at(i)
    return [None if position + 1 in erased else int(value) for position, value in enumerate(codeword.symbols[i])]
