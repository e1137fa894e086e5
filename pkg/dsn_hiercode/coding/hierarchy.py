from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from loguru import logger

from dsn_hiercode.coding.codegen import CodeInstance
from dsn_hiercode.exceptions import HelperDomainError
from dsn_hiercode.network.coopgraph import NodeCooperation
from dsn_hiercode.options import ConstructionOptions
from dsn_hiercode.settings import load_settings


@dataclass
class NodeHierarchy:
    node: int
    d: Tuple[int, ...]
    cooperation: NodeCooperation
    local_rows_d1: int
    flags: List[str] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.d) - 1

    def to_dict(self) -> Dict:
        info = self.cooperation
        return {
            "node": self.node,
            "d": list(self.d),
            "I": {str(l): sorted(s) for l, s in info.helpers.items()},
            "A": {str(l): sorted(s) for l, s in info.accumulated.items()},
            "B": {str(l): sorted(s) for l, s in info.boosters.items()},
            "B_rows": {str(l): sorted(s) for l, s in info.proof_boosters.items()},
            "flags": list(self.flags),
        }


@dataclass
class EccHierarchy:
    code: CodeInstance
    nodes: Dict[int, NodeHierarchy]
    enum_limit: int = 16

    def node(self, i: int) -> NodeHierarchy:
        self.code.topology.params(i)
        return self.nodes[i]

    def lam(self, i: int, level: int, W: Iterable[int] = ()) -> int:
        """
        Number of erasures node i tolerates at `level` when A_i^level and W are decodable
        :param i: node
        :param level: 0 (local) .. L_i
        :param W: booster nodes, a subset of B_i^level
        :return: lambda_{i,level;W}
        """
        entry = self.node(i)
        W = frozenset(W)
        if not 0 <= level <= entry.depth:
            raise HelperDomainError(f"Node {i} has levels 0..{entry.depth}, got {level}", node=i, level=level)
        if level == 0:
            if W:
                raise HelperDomainError("Local decoding takes no helpers", node=i, level=0)
            return entry.d[0]
        info = entry.cooperation
        if not W <= info.boosters[level]:
            raise HelperDomainError(f"{sorted(W - info.boosters[level])} not in B_{i}^{level}",
                                    node=i, level=level, outside=sorted(W - info.boosters[level]))
        t = self.code.topology
        coop = t.coop_sets[i]
        total = t.nodes[i].r + sum(t.nodes[j].delta for j in sorted(coop) if t.coop_sets[j] - {i} <= coop | W)
        graph = self.code.graph
        for lower in range(2, level + 1):
            prior = info.accumulated[lower]
            for cid in info.row_cycles.get(lower, ()):
                cycle = graph.cycles[cid]
                if any(graph.nodes[j].helpers.get(cycle.level, frozenset()) - prior <= {i} | W
                       for j in cycle.row_cols[i]):
                    total += cycle.gamma[i]
        return total

    def lambda_table(self, i: int, level: int) -> Dict[FrozenSet[int], int]:
        """lambda for every W in B_i^level; refused when B_i^level is larger than the enumeration limit."""
        boosters = sorted(self.node(i).cooperation.boosters.get(level, frozenset()))
        if len(boosters) > self.enum_limit:
            raise HelperDomainError(f"B_{i}^{level} has {len(boosters)} members; evaluate lambda per W instead",
                                    node=i, level=level, limit=self.enum_limit)
        return {frozenset(W): self.lam(i, level, W)
                for size in range(len(boosters) + 1) for W in combinations(boosters, size)}


def _d_vector(code: CodeInstance, i: int) -> Tuple[int, ...]:
    t, info = code.topology, code.graph.nodes[i]
    params = t.nodes[i]
    level_one = params.r + sum(t.nodes[j].delta for j in t.coop_sets[i])
    if code.construction == ConstructionOptions.single_level:
        return params.r - params.delta, level_one
    d = [params.r - params.delta - info.eta_total, level_one]
    for level in range(2, info.depth + 1):
        d.append(d[-1] + sum(code.graph.cycles[cid].gamma[i] for cid in info.row_cycles.get(level, ())))
    return tuple(d)


def hierarchy(c: CodeInstance, enum_limit: Optional[int] = None) -> EccHierarchy:
    """ECC hierarchy of every node, with flags where d and lambda over the full booster set disagree."""
    limit = load_settings().lambda_enum_limit if enum_limit is None else enum_limit
    t = c.topology
    result = EccHierarchy(code=c, nodes={}, enum_limit=limit)
    for i in t.node_ids:
        d = _d_vector(c, i)
        info = c.graph.nodes[i]
        params = t.nodes[i]
        local_rows_d1 = d[0] + params.delta + sum(t.nodes[j].delta for j in t.coop_sets[i])
        result.nodes[i] = NodeHierarchy(node=i, d=d, cooperation=info, local_rows_d1=local_rows_d1)

    for i, entry in result.nodes.items():
        info = entry.cooperation
        for level in range(1, entry.depth + 1):
            value = result.lam(i, level, info.boosters[level])
            if value != entry.d[level]:
                entry.flags.append(f"d_{i},{level}={entry.d[level]} but lambda over B_{i}^{level} is {value}")
            if level > 1 and info.accumulated[level] == info.accumulated[level - 1]:
                entry.flags.append(f"A_{i}^{level} does not grow over A_{i}^{level - 1}")
        if entry.local_rows_d1 != entry.d[1]:
            entry.flags.append(f"d_{i},1={entry.d[1]}; counting local rows gives {entry.local_rows_d1}")
        for flag in entry.flags:
            logger.warning(f"Node {i}: {flag}")
    return result
