from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from dsn_hiercode.algebra.linalg import Matrix, null_space_basis, rank, solve
from dsn_hiercode.coding.codec import CodewordSet, ErasurePattern
from dsn_hiercode.coding.codegen import CodeInstance


@dataclass
class OracleVerdict:
    determined: Dict[int, bool]
    global_rank: int
    nullspace_support: List[Tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "determined": {str(i): flag for i, flag in sorted(self.determined.items())},
            "global_rank": self.global_rank,
            "nullspace_support": [list(coordinate) for coordinate in self.nullspace_support],
        }


def _observed(c: CodeInstance, pattern: ErasurePattern) -> Matrix:
    return Matrix(c.ctx, c.G.data[:, pattern.validate(c).observed_columns(c)])


def oracle_recoverable(c: CodeInstance, pattern: ErasurePattern) -> OracleVerdict:
    """
    Global recoverability of every node's message
    :param c: code
    :param pattern: erased coordinates
    :return: node i is determined iff every message in the null space of the observation map is zero on block i
    """
    observed = _observed(c, pattern)
    basis = null_space_basis(observed.transpose()).data
    support = np.nonzero(basis.any(axis=0))[0] if basis.size else np.array([], dtype=np.int64)
    determined, coordinates = {}, []
    for i in c.node_ids:
        start, k = c.row_offsets[i], c.topology.nodes[i].k
        inside = [int(x) for x in support if start <= x < start + k]
        determined[i] = not inside
        coordinates.extend((i, x - start + 1) for x in inside)
    return OracleVerdict(determined=determined, global_rank=rank(observed), nullspace_support=coordinates)


def oracle_decode(c: CodeInstance, codeword: CodewordSet, pattern: ErasurePattern) -> Dict[int, Optional[np.ndarray]]:
    """Messages of the determined nodes, solved from all observed symbols at once."""
    observed = _observed(c, pattern)
    columns = pattern.observed_columns(c)
    values = codeword.to_vector(c)[columns]
    outcome = solve(observed.transpose(), Matrix(c.ctx, values.reshape(-1, 1)))
    messages = {}
    for i in c.node_ids:
        start, k = c.row_offsets[i], c.topology.nodes[i].k
        if outcome.values is not None and all(outcome.determined[start:start + k]):
            messages[i] = outcome.values[start:start + k, 0].copy()
        else:
            messages[i] = None
    return messages


def reencode_matches(c: CodeInstance, codeword: CodewordSet, pattern: ErasurePattern) -> bool:
    """A particular solution of the observations re-encodes to every observed symbol."""
    observed = _observed(c, pattern)
    columns = pattern.observed_columns(c)
    values = codeword.to_vector(c)[columns]
    outcome = solve(observed.transpose(), Matrix(c.ctx, values.reshape(-1, 1)))
    if outcome.values is None:
        return False
    reencoded = c.ctx.vec_mat(outcome.values[:, 0], observed.data)
    return bool(np.array_equal(reencoded, values))
