import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Union

import networkx as nx
from loguru import logger
from pydantic import ValidationError

from dsn_hiercode.exceptions import TopologyError, UnreachableError
from dsn_hiercode.network.models import CycleDocument, EdgeDocument, NodeDocument, TopologyDocument
from dsn_hiercode.options import ErrorCode

DEFAULT_LATENCY = Fraction(1)


def parse_latency(value) -> Fraction:
    """Exact latency from a number or a fraction string; 0.6 becomes 3/5."""
    if isinstance(value, bool):
        raise TopologyError(f"Invalid latency {value!r}", code=ErrorCode.schema)
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise TopologyError(f"Invalid latency {value!r}", code=ErrorCode.schema)


def format_latency(value: Fraction) -> Union[int, str]:
    return value.numerator if value.denominator == 1 else str(value)


@dataclass(frozen=True)
class NodeParams:
    k: int
    r: int
    delta: int = 0

    @property
    def n(self) -> int:
        return self.k + self.r


@dataclass
class DsnTopology:
    nodes: Dict[int, NodeParams]
    graph: nx.Graph
    coop_sets: Dict[int, FrozenSet[int]]
    theta: Optional[int] = None
    modulus: Optional[int] = None
    cycles: List[CycleDocument] = field(default_factory=list)
    gamma_symbols: Dict[str, int] = field(default_factory=dict)
    coop_given: bool = False

    @property
    def p(self) -> int:
        return len(self.nodes)

    @property
    def node_ids(self) -> List[int]:
        return sorted(self.nodes)

    def params(self, i: int) -> NodeParams:
        if i not in self.nodes:
            raise TopologyError(f"Unknown node {i}", code=ErrorCode.unknown_node, node=i)
        return self.nodes[i]

    def neighborhood(self, i: int) -> FrozenSet[int]:
        self.params(i)
        return frozenset(self.graph.neighbors(i))

    def latency(self, i: int, j: int) -> Fraction:
        return self.graph[i][j]["t"]

    def shortest_path_time(self, i: int, j: int) -> Fraction:
        self.params(i)
        self.params(j)
        if i == j:
            return Fraction(0)
        try:
            return Fraction(nx.shortest_path_length(self.graph, source=i, target=j, weight="t"))
        except nx.NetworkXNoPath:
            raise UnreachableError(f"Node {j} is unreachable from node {i}", source=i, target=j)

    def to_document(self) -> TopologyDocument:
        edges = [EdgeDocument(a=a, b=b, t=format_latency(self.latency(a, b)))
                 for a, b in sorted(tuple(sorted(e)) for e in self.graph.edges)]
        coop = None
        if self.coop_given:
            coop = {str(i): sorted(self.coop_sets[i]) for i in self.node_ids}
        return TopologyDocument(
            theta=self.theta,
            modulus=self.modulus,
            nodes=[NodeDocument(id=i, k=self.nodes[i].k, r=self.nodes[i].r, delta=self.nodes[i].delta)
                   for i in self.node_ids],
            edges=edges,
            coop=coop,
            cycles=list(self.cycles) or None,
            gamma_symbols=dict(self.gamma_symbols) or None,
        )

    def serialize(self) -> str:
        """Canonical JSON text; parsing it back yields an equal topology."""
        return json.dumps(self.to_document().model_dump(mode="json", exclude_none=True), sort_keys=True)


def _parse_document(document: Union[str, bytes, Mapping, TopologyDocument]) -> TopologyDocument:
    if isinstance(document, TopologyDocument):
        return document
    try:
        if isinstance(document, (str, bytes)):
            return TopologyDocument.model_validate_json(document)
        return TopologyDocument.model_validate(document)
    except ValidationError as e:
        problems = [f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors()]
        raise TopologyError(f"Topology document does not match the schema: {problems[0]}",
                            code=ErrorCode.schema, problems=problems)


def load_topology(document: Union[str, bytes, Mapping, TopologyDocument]) -> DsnTopology:
    """
    Validate a topology document
    :param document: JSON text, a parsed mapping or a TopologyDocument
    :return: topology with M_i defaulting to N_i
    """
    doc = _parse_document(document)

    ids = [node.id for node in doc.nodes]
    if not ids or sorted(ids) != list(range(1, len(ids) + 1)):
        raise TopologyError("Node ids must be exactly 1..p without gaps or duplicates",
                            code=ErrorCode.node_ids, ids=ids)

    nodes = {node.id: NodeParams(k=node.k, r=node.r, delta=node.delta) for node in doc.nodes}
    for i, params in nodes.items():
        if params.delta >= params.r:
            raise TopologyError(f"Node {i} needs r > delta, got r={params.r}, delta={params.delta}",
                                code=ErrorCode.delta_not_below_r, node=i)

    graph = nx.Graph()
    graph.add_nodes_from(sorted(nodes))
    for edge in doc.edges:
        for endpoint in (edge.a, edge.b):
            if endpoint not in nodes:
                raise TopologyError(f"Edge endpoint {endpoint} is not a node",
                                    code=ErrorCode.unknown_node, node=endpoint)
        if edge.a == edge.b:
            raise TopologyError(f"Self-loop at node {edge.a}", code=ErrorCode.self_loop, node=edge.a)
        if graph.has_edge(edge.a, edge.b):
            raise TopologyError(f"Duplicate edge {edge.a}-{edge.b}", code=ErrorCode.duplicate_edge,
                                edge=[edge.a, edge.b])
        latency = DEFAULT_LATENCY if edge.t is None else parse_latency(edge.t)
        if latency <= 0:
            raise TopologyError(f"Edge {edge.a}-{edge.b} has non-positive latency {edge.t}",
                                code=ErrorCode.non_positive_latency, edge=[edge.a, edge.b])
        graph.add_edge(edge.a, edge.b, t=latency)

    coop_sets: Dict[int, FrozenSet[int]] = {}
    given: Dict[int, List[int]] = {}
    for key, members in (doc.coop or {}).items():
        if not key.strip().isdecimal() or int(key) not in nodes:
            raise TopologyError(f"Cooperation set for unknown node {key}", code=ErrorCode.unknown_node, node=key)
        if int(key) in given:
            raise TopologyError(f"Node {int(key)} has more than one cooperation set", code=ErrorCode.schema,
                                node=int(key))
        given[int(key)] = members
    for i in sorted(nodes):
        neighbors = frozenset(graph.neighbors(i))
        members = frozenset(given[i]) if i in given else neighbors
        # an isolated node keeps M_i empty; code builders decide whether that is acceptable
        if not members and i in given:
            raise TopologyError(f"Node {i} has an empty cooperation set", code=ErrorCode.coop_empty, node=i)
        if not members <= neighbors:
            raise TopologyError(f"Cooperation set of node {i} contains non-neighbors {sorted(members - neighbors)}",
                                code=ErrorCode.coop_not_neighbors, node=i, outside=sorted(members - neighbors))
        coop_sets[i] = members

    for i in sorted(nodes):
        for j in coop_sets[i]:
            if i not in coop_sets[j]:
                logger.warning(f"Asymmetric cooperation: {j} in M_{i} but {i} not in M_{j}")

    topology = DsnTopology(
        nodes=nodes,
        graph=graph,
        coop_sets=coop_sets,
        theta=doc.theta,
        modulus=doc.modulus,
        cycles=list(doc.cycles or []),
        gamma_symbols=dict(doc.gamma_symbols or {}),
        coop_given=doc.coop is not None,
    )
    logger.info(f"Loaded topology with {topology.p} nodes, {graph.number_of_edges()} edges "
                f"and {len(topology.cycles)} cycles")
    return topology


def neighborhood(t: DsnTopology, i: int) -> FrozenSet[int]:
    return t.neighborhood(i)


def shortest_path_time(t: DsnTopology, i: int, j: int) -> Fraction:
    return t.shortest_path_time(i, j)
