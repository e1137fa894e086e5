"""
Discrete-event recovery latency.

Each node keeps its own view. At time 0 every node applies the decoding
rules to what it stores; any quantity another node needs is then sent to it
and arrives after the link cost. A node re-applies the rules on every
arrival, and its completion time is the time its message becomes known.
"""
from fractions import Fraction
from typing import Dict, List, Optional

import simpy
from loguru import logger

from dsn_hiercode.coding.codec import CodewordSet, ErasurePattern
from dsn_hiercode.coding.codegen import CodeInstance
from dsn_hiercode.coding.decoder import Key, Known, RecoveryReport, RecoveryRules, TraceEvent, describe_key
from dsn_hiercode.exceptions import UnreachableError
from dsn_hiercode.options import CostModelOptions


class RecoverySimulation:

    def __init__(self, code: CodeInstance, codeword: CodewordSet, pattern: ErasurePattern,
                 cost_model: CostModelOptions = CostModelOptions.shortest_path):
        self.code = code
        self.topology = code.topology
        self.rules = RecoveryRules(code, codeword, pattern)
        self.cost_model = CostModelOptions(cost_model)
        self.env = simpy.Environment()
        self.views: Dict[int, Dict[Key, Known]] = {i: {} for i in code.node_ids}
        self.trace: List[TraceEvent] = []

    def delay(self, source: int, target: int) -> Optional[Fraction]:
        """Transfer cost, or None when the cost model cannot deliver."""
        if self.cost_model == CostModelOptions.direct_link:
            if target not in self.topology.neighborhood(source):
                return None
            return self.topology.latency(source, target)
        try:
            return self.topology.shortest_path_time(source, target)
        except UnreachableError:
            return None

    def _now(self) -> Fraction:
        return Fraction(self.env.now)

    def _log(self, node: int, event: str, detail: str):
        self.trace.append(TraceEvent(self._now(), node, event, detail))

    def _transfer(self, source: int, target: int, key: Key, known: Known, delay: Fraction):
        yield self.env.timeout(delay)
        view = self.views[target]
        if key in view:
            return
        view[key] = Known(known.value, known.support, self._now(), "receive")
        self._log(target, "receive", f"{describe_key(key)} from={source}")
        self._process(target)

    def _send(self, source: int, key: Key):
        for target in self.rules.consumers(source, key):
            delay = self.delay(source, target)
            if delay is None:
                self._log(source, "drop", f"{describe_key(key)} to={target}")
                continue
            self._log(source, "send", f"{describe_key(key)} to={target} delay={delay}")
            self.env.process(self._transfer(source, target, key, self.views[source][key], delay))

    def _process(self, n: int):
        view, now = self.views[n], self._now()
        while True:
            added = self.rules.decode(view, n, scope=n, now=now) + self.rules.exchange(view, n, now)
            if not added:
                return
            for key in added:
                self._log(n, view[key].rule, describe_key(key))
                self._send(n, key)

    def run(self) -> RecoveryReport:
        for n in self.code.node_ids:
            self._process(n)
        self.env.run()
        nodes = {n: self.rules.classify(n, self.views[n].get(("m", n))) for n in self.code.node_ids}
        report = RecoveryReport(nodes=nodes, trace=self.trace, timed=True)
        logger.info(f"Simulation finished at t={self._now()}; failed nodes: {report.failed_nodes}")
        return report


def simulate_recovery(c: CodeInstance, codeword: CodewordSet, pattern: ErasurePattern,
                      cost_model: CostModelOptions = CostModelOptions.shortest_path) -> RecoveryReport:
    """
    Recovery with per-node completion times
    :param c: code; latencies come from its topology
    :param codeword: stored codewords
    :param pattern: erased coordinates
    :param cost_model: shortest_path charges the weighted path time, direct_link only crosses single edges
    :return: report whose node entries carry completion times (None for Failed)
    """
    return RecoverySimulation(c, codeword, pattern, cost_model).run()
