"""
Generator assembly for single-level and multi-level cooperative codes.

Each node i owns a Cauchy matrix T_i of size u_i x v_i partitioned as

    rows 0..k-1      | A_ii (cols 0..r-1) | B_{i,j}, j in M_i ascending | E_{i;l;t}, (l, t) ascending
    next delta_i     | U_i                |            discarded
    next eta_{i;l}   | V_{i;l}, l = 2..   |            discarded

Message m_i reaches column j through A_{i,j} = B_{i,j} U_j (level 1) or
A_{i,j} = [E_{i;l;t} | 0] V_{j;l} (cycle vertex at level l).
"""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from loguru import logger

from dsn_hiercode.algebra.field import FieldContext, enumerate_elements, field_context, select_theta
from dsn_hiercode.algebra.linalg import Matrix, cauchy
from dsn_hiercode.exceptions import ConstructionError
from dsn_hiercode.network.coopgraph import CooperationGraph, build_cooperation_graph, check_compatible
from dsn_hiercode.network.topology import DsnTopology, NodeParams
from dsn_hiercode.options import ConstructionOptions, ErrorCode


@dataclass
class NodeCode:
    node: int
    params: NodeParams
    coop_columns: Tuple[Tuple[int, int], ...]
    cycle_columns: Tuple[Tuple[int, int, int], ...]
    level_rows: Tuple[Tuple[int, int], ...]
    a_values: Tuple[int, ...]
    b_values: Tuple[int, ...]
    T: Matrix

    @property
    def u(self) -> int:
        return self.params.k + self.params.delta + sum(height for _, height in self.level_rows)

    @property
    def v(self) -> int:
        return (self.params.r + sum(width for _, width in self.coop_columns)
                + sum(width for _, _, width in self.cycle_columns))

    def _column_offset(self, key) -> Tuple[int, int]:
        offset = self.params.r
        for j, width in self.coop_columns:
            if key == ("B", j):
                return offset, width
            offset += width
        for level, cycle_id, width in self.cycle_columns:
            if key == ("E", level, cycle_id):
                return offset, width
            offset += width
        raise KeyError(key)

    def row_offset(self, level: int) -> Tuple[int, int]:
        """Start row and height of U_i (level 1) or V_{i;l} inside T_i."""
        offset = self.params.k
        if level == 1:
            return offset, self.params.delta
        offset += self.params.delta
        for l, height in self.level_rows:
            if l == level:
                return offset, height
            offset += height
        return offset, 0

    def _slice(self, rows: Tuple[int, int], cols: Tuple[int, int]) -> Matrix:
        return Matrix(self.T.ctx, self.T.data[rows[0]:rows[0] + rows[1], cols[0]:cols[0] + cols[1]])

    @property
    def A(self) -> Matrix:
        return self._slice((0, self.params.k), (0, self.params.r))

    @property
    def U(self) -> Matrix:
        return self._slice(self.row_offset(1), (0, self.params.r))

    def V(self, level: int) -> Matrix:
        return self._slice(self.row_offset(level), (0, self.params.r))

    def B(self, j: int) -> Matrix:
        return self._slice((0, self.params.k), self._column_offset(("B", j)))

    def E(self, level: int, cycle_id: int) -> Matrix:
        return self._slice((0, self.params.k), self._column_offset(("E", level, cycle_id)))

    @property
    def stack(self) -> Matrix:
        """[A_ii; U_i; V_{i;2}; ...], the u_i x r_i left block of T_i."""
        return self._slice((0, self.u), (0, self.params.r))


@dataclass(frozen=True)
class ColumnBlock:
    """
    Interference block stored at `column`: level 1 is the U rows, level l the
    V_{.;l} rows. Contributor y adds m_y . factors[y] to the block aggregate.
    """
    column: int
    level: int
    width: int
    factors: Mapping[int, np.ndarray]

    @property
    def contributors(self) -> List[int]:
        return sorted(self.factors)


@dataclass
class CodeInstance:
    topology: DsnTopology
    graph: CooperationGraph
    ctx: FieldContext
    construction: ConstructionOptions
    nodes: Dict[int, NodeCode]
    column_blocks: Dict[int, List[ColumnBlock]]
    G: Matrix
    row_offsets: Dict[int, int] = field(default_factory=dict)
    col_offsets: Dict[int, int] = field(default_factory=dict)

    @property
    def node_ids(self) -> List[int]:
        return self.topology.node_ids

    @property
    def total_k(self) -> int:
        return sum(self.topology.nodes[i].k for i in self.node_ids)

    @property
    def total_n(self) -> int:
        return sum(self.topology.nodes[i].n for i in self.node_ids)

    def column_block(self, column: int, level: int) -> Optional[ColumnBlock]:
        for block in self.column_blocks[column]:
            if block.level == level:
                return block
        return None

    def contributions(self, row: int) -> List[ColumnBlock]:
        """Blocks, at other nodes, that the message of `row` feeds into."""
        return [block for j in self.node_ids for block in self.column_blocks[j] if row in block.factors]

    def block(self, i: int, j: int) -> Matrix:
        """A_{i,j} as placed in the parity block column of node j."""
        k_i, r_j = self.topology.nodes[i].k, self.topology.nodes[j].r
        start = self.col_offsets[j] + self.topology.nodes[j].k
        return Matrix(self.ctx, self.G.data[self.row_offsets[i]:self.row_offsets[i] + k_i, start:start + r_j])


def field_bound(graph: CooperationGraph) -> int:
    """max_i (u_i + v_i) for the given cooperation graph."""
    t = graph.topology
    bound = 0
    for i in t.node_ids:
        params, info = t.nodes[i], graph.nodes[i]
        u = params.k + params.delta + info.eta_total
        v = params.r + sum(t.nodes[j].delta for j in t.coop_sets[i])
        v += sum(graph.cycles[cid].gamma[i] for ids in info.row_cycles.values() for cid in ids)
        bound = max(bound, u + v)
    return bound


def resolve_field(graph: CooperationGraph, construction: ConstructionOptions,
                  ctx: Optional[FieldContext] = None) -> FieldContext:
    """
    Pick or check the field. Construction 1 needs q > max(u+v), construction 2 needs q >= max(u+v).
    An automatic choice always takes the strict bound, so both builders land in the same field.
    """
    bound = field_bound(graph)
    strict = construction == ConstructionOptions.single_level
    if ctx is None:
        t = graph.topology
        theta = t.theta if t.theta is not None else select_theta(bound, strict=True)
        ctx = field_context(theta, t.modulus)
    fits = ctx.q > bound if strict else ctx.q >= bound
    if not fits:
        raise ConstructionError(f"GF({ctx.q}) is too small for this code; need q {'>' if strict else '>='} {bound}",
                                code=ErrorCode.field_too_small, q=ctx.q, bound=bound)
    return ctx


def _node_code(graph: CooperationGraph, ctx: FieldContext, i: int) -> NodeCode:
    t = graph.topology
    params, info = t.nodes[i], graph.nodes[i]
    coop_columns = tuple((j, t.nodes[j].delta) for j in sorted(t.coop_sets[i]))
    cycle_columns = tuple((level, cid, graph.cycles[cid].gamma[i])
                          for level in sorted(info.row_cycles) for cid in info.row_cycles[level])
    level_rows = tuple((level, info.eta[level]) for level in range(2, info.depth + 1))
    u = params.k + params.delta + sum(height for _, height in level_rows)
    v = params.r + sum(w for _, w in coop_columns) + sum(w for _, _, w in cycle_columns)
    elements = enumerate_elements(ctx, u + v)
    a, b = elements[:u], elements[u:]
    return NodeCode(node=i, params=params, coop_columns=coop_columns, cycle_columns=cycle_columns,
                    level_rows=level_rows, a_values=tuple(int(e) for e in a), b_values=tuple(int(e) for e in b),
                    T=cauchy(ctx, a, b))


def _assemble(graph: CooperationGraph, ctx: FieldContext, construction: ConstructionOptions,
              require_cooperation: bool) -> CodeInstance:
    t = graph.topology
    for i in t.node_ids:
        if require_cooperation and not t.coop_sets[i]:
            raise ConstructionError(f"Node {i} has no cooperation partners; M_i must be nonempty",
                                    code=ErrorCode.coop_empty, node=i)
        params = t.nodes[i]
        local = params.r - params.delta - graph.nodes[i].eta_total
        if local < 0:
            raise ConstructionError(f"Node {i} would have negative local capability {local}",
                                    code=ErrorCode.negative_local_capability, node=i)

    nodes = {i: _node_code(graph, ctx, i) for i in t.node_ids}

    column_blocks: Dict[int, List[ColumnBlock]] = {}
    for j in t.node_ids:
        blocks = []
        factors = {i: nodes[i].B(j).data for i in t.node_ids if j in t.coop_sets[i]}
        blocks.append(ColumnBlock(column=j, level=1, width=t.nodes[j].delta, factors=factors))
        for level, eta in nodes[j].level_rows:
            factors = {}
            for cid in graph.nodes[j].column_cycles.get(level, ()):
                cycle = graph.cycles[cid]
                for i in cycle.col_rows[j]:
                    E = nodes[i].E(level, cid).data
                    padding = eta - E.shape[1]
                    if padding < 0:
                        raise ConstructionError(f"E block of node {i} in cycle {cid} is wider than eta_{{{j};{level}}}",
                                                code=ErrorCode.negative_padding, node=i, cycle=cid)
                    factors[i] = np.hstack([E, np.zeros((E.shape[0], padding), dtype=np.int64)])
            blocks.append(ColumnBlock(column=j, level=level, width=eta, factors=factors))
        column_blocks[j] = blocks

    row_offsets, col_offsets = {}, {}
    row, col = 0, 0
    for i in t.node_ids:
        row_offsets[i], col_offsets[i] = row, col
        row += t.nodes[i].k
        col += t.nodes[i].n
    G = np.zeros((row, col), dtype=np.int64)
    for j in t.node_ids:
        k_j, start = t.nodes[j].k, col_offsets[j]
        G[row_offsets[j]:row_offsets[j] + k_j, start:start + k_j] = np.eye(k_j, dtype=np.int64)
        parity = slice(start + k_j, start + t.nodes[j].n)
        G[row_offsets[j]:row_offsets[j] + k_j, parity] = nodes[j].A.data
        for block in column_blocks[j]:
            offset, height = nodes[j].row_offset(block.level)
            rows = nodes[j].T.data[offset:offset + height, :t.nodes[j].r]
            for i, factor in block.factors.items():
                G[row_offsets[i]:row_offsets[i] + t.nodes[i].k, parity] ^= ctx.dot(factor, rows)

    code = CodeInstance(topology=t, graph=graph, ctx=ctx, construction=construction, nodes=nodes,
                        column_blocks=column_blocks, G=Matrix(ctx, G), row_offsets=row_offsets,
                        col_offsets=col_offsets)
    logger.info(f"Built {construction} code over GF({ctx.q}): G is {code.G.rows}x{code.G.cols}")
    return code


def build_single_level(t: DsnTopology, ctx: Optional[FieldContext] = None,
                       require_cooperation: bool = True) -> CodeInstance:
    """
    Single-level cooperative code; cycles declared in the topology are ignored
    :param t: topology
    :param ctx: field; chosen from the topology or the size bound when omitted
    :param require_cooperation: reject nodes with an empty cooperation set
    :return: code instance
    """
    graph = build_cooperation_graph(t, cycles=[])
    construction = ConstructionOptions.single_level
    return _assemble(graph, resolve_field(graph, construction, ctx), construction, require_cooperation)


def build_multi_level(g: CooperationGraph, ctx: Optional[FieldContext] = None,
                      require_cooperation: bool = True) -> CodeInstance:
    verdict = check_compatible(g)
    if not verdict.compatible:
        raise ConstructionError("Cooperation graph is not compatible", code=ErrorCode.incompatible_graph,
                                violations=[v.to_dict() for v in verdict.violations])
    construction = ConstructionOptions.multi_level
    return _assemble(g, resolve_field(g, construction, ctx), construction, require_cooperation)


def build_code(t: DsnTopology, multi_level: bool = False, ctx: Optional[FieldContext] = None) -> CodeInstance:
    if multi_level:
        return build_multi_level(build_cooperation_graph(t), ctx)
    return build_single_level(t, ctx)


@dataclass
class NonsystematicComponent:
    matrix: Matrix
    row_offsets: Dict[int, int]
    col_offsets: Dict[int, int]
    labels: Dict[Tuple[int, int], str]
    _k: Dict[int, int] = field(default_factory=dict, repr=False)
    _r: Dict[int, int] = field(default_factory=dict, repr=False)

    def block(self, i: int, j: int) -> np.ndarray:
        rows = slice(self.row_offsets[i], self.row_offsets[i] + self._k[i])
        cols = slice(self.col_offsets[j], self.col_offsets[j] + self._r[j])
        return self.matrix.data[rows, cols]

    def support(self) -> List[Tuple[int, int]]:
        """Block positions holding a nonzero entry."""
        return [key for key in sorted(self.labels) if self.block(*key).any()]


def nonsystematic_component(c: CodeInstance) -> NonsystematicComponent:
    """Parity block columns of G with a label for every block."""
    t = c.topology
    parity_columns = [col for j in c.node_ids
                      for col in range(c.col_offsets[j] + t.nodes[j].k, c.col_offsets[j] + t.nodes[j].n)]
    matrix = Matrix(c.ctx, c.G.data[:, parity_columns])
    col_offsets, offset = {}, 0
    for j in c.node_ids:
        col_offsets[j] = offset
        offset += t.nodes[j].r
    labels = {}
    for i in c.node_ids:
        for j in c.node_ids:
            if i == j:
                labels[(i, j)] = f"A_{i},{i}"
            elif j in t.coop_sets[i]:
                labels[(i, j)] = f"B_{i},{j} U_{j}"
            else:
                cycle = c.graph.vertex_cycle(i, j)
                labels[(i, j)] = f"B_{i},{j} V_{j};{cycle.level}" if cycle else "0"
    return NonsystematicComponent(matrix=matrix, row_offsets=dict(c.row_offsets), col_offsets=col_offsets,
                                  labels=labels, _k={i: t.nodes[i].k for i in c.node_ids},
                                  _r={j: t.nodes[j].r for j in c.node_ids})
