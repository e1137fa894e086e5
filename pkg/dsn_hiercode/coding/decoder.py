"""
Hierarchical erasure decoding by neighbor cooperation.

Knowledge is tracked per quantity:

    ("m", y)            message of node y
    ("agg", x, l)       aggregate interference stored at node x, level 1 (U rows) or l (V rows)
    ("cp", y, x)        cross parity m_y . F_{y,x} that node y contributes to a block at node x

Rules, applied until nothing new appears:

    decode      solve a node's own system with its known aggregates and cross parities
    spread      a decoded node computes all of its cross parities
    collect     an aggregate is the sum of all of its contributors' cross parities
    cycle-sum   the padded level-l aggregates of a column component add up to zero
    extract     a cross parity is the aggregate minus the other contributors

Every quantity carries the set of nodes whose data it was derived from; a
recovered node's level is the first level whose helper sets cover it.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from dsn_hiercode.coding.codec import CodewordSet, ErasurePattern, local_system, received_word
from dsn_hiercode.coding.codegen import CodeInstance, ColumnBlock
from dsn_hiercode.options import RecoveryStatusOptions

Key = Tuple


@dataclass
class Known:
    value: np.ndarray
    support: FrozenSet[int]
    time: Fraction = Fraction(0)
    rule: str = ""


@dataclass
class TraceEvent:
    time: Fraction
    node: int
    event: str
    detail: str = ""

    def to_line(self) -> str:
        return f"{self.time} {self.node} {self.event} {self.detail}".rstrip()


@dataclass
class NodeRecovery:
    node: int
    status: RecoveryStatusOptions
    level: Optional[int] = None
    helpers: List[int] = field(default_factory=list)
    time: Optional[Fraction] = None
    message: Optional[np.ndarray] = None

    @property
    def recovered(self) -> bool:
        return self.status != RecoveryStatusOptions.failed

    def to_dict(self, with_time: bool = False) -> Dict:
        data = {"node": self.node, "status": self.status.value, "level": self.level, "helpers": self.helpers}
        if with_time:
            data["time"] = "inf" if self.time is None else str(self.time)
        return data


@dataclass
class RecoveryReport:
    nodes: Dict[int, NodeRecovery]
    trace: List[TraceEvent] = field(default_factory=list)
    rounds: int = 0
    timed: bool = False

    @property
    def failed_nodes(self) -> List[int]:
        return [i for i, entry in sorted(self.nodes.items()) if not entry.recovered]

    def to_dict(self) -> Dict:
        return {
            "nodes": [self.nodes[i].to_dict(with_time=self.timed) for i in sorted(self.nodes)],
            "failed": self.failed_nodes,
            "rounds": self.rounds,
        }

    def trace_lines(self) -> List[str]:
        return [event.to_line() for event in self.trace]


def describe_key(key: Key) -> str:
    if key[0] == "m":
        return f"m{key[1]}"
    if key[0] == "agg":
        return f"agg({key[1]},L{key[2]})"
    return f"cp({key[1]},{key[2]})"


class RecoveryRules:
    """Decoding rules over a knowledge view; shared by the static decoder and the latency simulation."""

    def __init__(self, code: CodeInstance, codeword: CodewordSet, pattern: ErasurePattern):
        self.code = code
        self.pattern = pattern.validate(code)
        self.received = {i: received_word(codeword, pattern, i) for i in code.node_ids}
        self.contributions: Dict[int, List[ColumnBlock]] = {
            i: [b for b in code.contributions(i) if b.width] for i in code.node_ids}
        self.components: Dict[Tuple[int, int], FrozenSet[int]] = {}
        for i in code.node_ids:
            for level, height in code.nodes[i].level_rows:
                if height:
                    self.components[(i, level)] = code.graph.component_of(i, level)
        self._attempted: Dict[Tuple[int, int], FrozenSet[Key]] = {}

    def consumers(self, producer: int, key: Key) -> List[int]:
        """Nodes that need a quantity produced at `producer`."""
        if key[0] == "cp":
            owner, column = key[1], key[2]
            if producer == owner:
                return [column]
            if producer == column:
                return [owner]
        if key[0] == "agg" and key[2] >= 2 and key[1] == producer:
            return sorted(self.components.get((producer, key[2]), frozenset()) - {producer})
        return []

    def decode(self, view: Dict[Key, Known], n: int, scope: int = 0, now: Fraction = Fraction(0)) -> List[Key]:
        """Try to decode node n from its own symbols and the view's side information."""
        if ("m", n) in view:
            return []
        candidates = sorted((key for key in view if (key[0] == "agg" and key[1] == n)
                             or (key[0] == "cp" and key[1] == n)),
                            key=lambda key: (len(view[key].support), key))
        attempt = frozenset(candidates)
        if self._attempted.get((scope, n)) == attempt:
            return []
        self._attempted[(scope, n)] = attempt

        outcome = self._solve(view, n, candidates)
        added = []
        if outcome.message is not None:
            used = self._minimal(view, n, candidates)
            support = frozenset({n}).union(*(view[key].support for key in used))
            view[("m", n)] = Known(outcome.message, support, now, "decode")
            added.append(("m", n))
        all_support = frozenset({n}).union(*(view[key].support for key in candidates))
        for level, value in outcome.aggregates.items():
            if ("agg", n, level) not in view:
                view[("agg", n, level)] = Known(value, all_support, now, "decode")
                added.append(("agg", n, level))
        return added

    def _solve(self, view: Dict[Key, Known], n: int, keys: Iterable[Key]):
        side, extra = {}, {}
        for key in keys:
            if key[0] == "agg":
                side[key[2]] = view[key].value
            else:
                extra[key[2]] = view[key].value
        return local_system(self.code, n, self.received[n], side, extra)

    def _minimal(self, view: Dict[Key, Known], n: int, candidates: List[Key]) -> List[Key]:
        used: List[Key] = []
        for key in candidates:
            if self._solve(view, n, used).message is not None:
                break
            used.append(key)
        for key in reversed(list(used)):
            trial = [other for other in used if other != key]
            if self._solve(view, n, trial).message is not None:
                used = trial
        return used

    def spread(self, view: Dict[Key, Known], n: int, now: Fraction = Fraction(0)) -> List[Key]:
        if ("m", n) not in view:
            return []
        message = view[("m", n)].value
        added = []
        for block in self.contributions[n]:
            key = ("cp", n, block.column)
            if key not in view:
                value = self.code.ctx.vec_mat(message, block.factors[n])
                view[key] = Known(value, frozenset({n}), now, "spread")
                added.append(key)
        return added

    def collect(self, view: Dict[Key, Known], n: int, now: Fraction = Fraction(0)) -> List[Key]:
        added = []
        for block in self.code.column_blocks[n]:
            key = ("agg", n, block.level)
            if not block.width or key in view:
                continue
            parts = [("cp", y, n) for y in block.contributors]
            if all(part in view for part in parts):
                value = np.zeros(block.width, dtype=np.int64)
                for part in parts:
                    value ^= view[part].value
                support = frozenset().union(*(view[part].support for part in parts))
                view[key] = Known(value, support, now, "collect")
                added.append(key)
        return added

    def cycle_sum(self, view: Dict[Key, Known], n: int, now: Fraction = Fraction(0)) -> List[Key]:
        added = []
        for (column, level), component in self.components.items():
            key = ("agg", n, level)
            if column != n or key in view:
                continue
            others = [("agg", j, level) for j in sorted(component - {n})]
            if not others or not all(other in view for other in others):
                continue
            width = max(self.code.column_block(j, level).width for j in component)
            total = np.zeros(width, dtype=np.int64)
            for other in others:
                value = view[other].value
                total[:value.size] ^= value
            height = self.code.column_block(n, level).width
            support = frozenset().union(*(view[other].support for other in others))
            view[key] = Known(total[:height], support, now, "cycle-sum")
            added.append(key)
        return added

    def extract(self, view: Dict[Key, Known], n: int, now: Fraction = Fraction(0)) -> List[Key]:
        added = []
        for block in self.code.column_blocks[n]:
            aggregate = ("agg", n, block.level)
            if not block.width or aggregate not in view:
                continue
            missing = [y for y in block.contributors if ("cp", y, n) not in view]
            if len(missing) != 1:
                continue
            value = view[aggregate].value.copy()
            parts = [("cp", y, n) for y in block.contributors if y != missing[0]]
            for part in parts:
                value ^= view[part].value
            support = view[aggregate].support.union(*(view[part].support for part in parts))
            key = ("cp", missing[0], n)
            view[key] = Known(value, support, now, "extract")
            added.append(key)
        return added

    def exchange(self, view: Dict[Key, Known], n: int, now: Fraction = Fraction(0)) -> List[Key]:
        """Rules other than decode, run at node n until it learns nothing new."""
        added = []
        while True:
            step = (self.spread(view, n, now) + self.collect(view, n, now)
                    + self.cycle_sum(view, n, now) + self.extract(view, n, now))
            if not step:
                return added
            added.extend(step)

    def classify(self, n: int, known: Optional[Known]) -> NodeRecovery:
        if known is None:
            return NodeRecovery(node=n, status=RecoveryStatusOptions.failed)
        helpers = sorted(known.support - {n})
        if not helpers:
            return NodeRecovery(node=n, status=RecoveryStatusOptions.recovered_local, level=0, helpers=[],
                                time=known.time, message=known.value)
        info = self.code.graph.nodes[n]
        level = next((l for l in info.levels if set(helpers) <= info.accumulated[l] | info.boosters[l]),
                     info.depth)
        return NodeRecovery(node=n, status=RecoveryStatusOptions.recovered_coop, level=level, helpers=helpers,
                            time=known.time, message=known.value)


def hierarchical_decode(c: CodeInstance, codeword: CodewordSet, pattern: ErasurePattern,
                        order: Optional[Sequence[int]] = None) -> RecoveryReport:
    """
    Fixpoint of the cooperation rules over a single global view
    :param c: code
    :param codeword: stored codewords; erased symbols are ignored
    :param pattern: erased coordinates
    :param order: node sweep order per round, ascending by default
    :return: per-node status, level and helper chain
    """
    rules = RecoveryRules(c, codeword, pattern)
    order = list(c.node_ids if order is None else order)
    view: Dict[Key, Known] = {}
    trace: List[TraceEvent] = []
    rounds = 0

    def propagate():
        changed = True
        while changed:
            changed = False
            for j in order:
                for key in rules.exchange(view, j):
                    changed = True
                    trace.append(TraceEvent(Fraction(0), j, view[key].rule, f"{describe_key(key)} round={rounds}"))

    propagate()
    while True:
        rounds += 1
        progress = False
        for n in order:
            decoded = rules.decode(view, n)
            for key in decoded:
                trace.append(TraceEvent(Fraction(0), n, view[key].rule, f"{describe_key(key)} round={rounds}"))
            if decoded:
                progress = True
                propagate()
        if not progress:
            break
    nodes = {n: rules.classify(n, view.get(("m", n))) for n in c.node_ids}
    report = RecoveryReport(nodes=nodes, trace=trace, rounds=rounds)
    logger.info(f"Decode finished after {rounds} rounds; failed nodes: {report.failed_nodes}")
    return report
