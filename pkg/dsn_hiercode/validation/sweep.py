"""
Capability sweeps.

A stratum is (node i, level l, booster set W, erasure count s). Every node
outside A_i^l, W and i itself is fully erased, A_i^l and W stay intact and
node i loses s coordinates. Strata with s = lambda_{i,l;W} are claimed by the
hierarchy; s = lambda + 1 is probed and only reported.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterator, List, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from dsn_hiercode.coding.codec import ErasurePattern, encode, random_messages
from dsn_hiercode.coding.codegen import CodeInstance
from dsn_hiercode.coding.container import deserialize_code, serialize_code
from dsn_hiercode.coding.decoder import hierarchical_decode
from dsn_hiercode.coding.hierarchy import hierarchy
from dsn_hiercode.exceptions import HierCodeError
from dsn_hiercode.options import ErrorCode
from dsn_hiercode.settings import load_settings
from dsn_hiercode.validation.oracle import oracle_recoverable
from dsn_hiercode.validation.reports import StratumReport, ValidationReport


class Budget(BaseModel):
    nodes: Optional[List[int]] = Field(default=None, description="Nodes to sweep; all when unset.")
    max_erasures: Optional[int] = Field(default=None, ge=0, description="Largest erasure count per node.")
    samples: Optional[int] = Field(default=None, ge=0, description="Patterns drawn per sampled stratum.")
    exhaustive: bool = Field(default=True, description="Enumerate strata up to the sampling threshold.")
    all_sizes: bool = Field(default=False, description="Claim every size 0..lambda, not only lambda.")

    @property
    def is_empty(self) -> bool:
        return self.max_erasures == 0 or self.samples == 0


def parse_budget(text: str) -> Budget:
    """
    Parse a budget spec such as "exhaustive:node=2" or "max-erasures=6,samples=500"
    :param text: comma separated terms
    :return: budget
    """
    values = {}
    for term in filter(None, (part.strip() for part in text.split(","))):
        name, _, rest = term.partition(":") if term.startswith("exhaustive") else (term, "", "")
        try:
            if name == "exhaustive":
                values["exhaustive"] = True
                if rest:
                    key, _, value = rest.partition("=")
                    if key != "node":
                        raise ValueError(rest)
                    values.setdefault("nodes", []).append(int(value))
            elif name.startswith("node="):
                values.setdefault("nodes", []).append(int(name.split("=", 1)[1]))
            elif name.startswith("max-erasures="):
                values["max_erasures"] = int(name.split("=", 1)[1])
            elif name.startswith("samples="):
                values["samples"] = int(name.split("=", 1)[1])
            elif name == "all-sizes":
                values["all_sizes"] = True
            else:
                raise ValueError(term)
        except ValueError:
            raise HierCodeError(f"Unrecognized budget term '{term}'", code=ErrorCode.usage, budget=text)
    if "samples" in values and "exhaustive" not in values:
        values["exhaustive"] = False
    return Budget(**values)


@dataclass(frozen=True)
class StratumTask:
    node: int
    level: int
    helpers: Tuple[int, ...]
    intact: Tuple[int, ...]
    size: int
    claimed: bool
    index: int
    seed: int
    exhaustive: bool
    samples: int
    threshold: int


def _strata(c: CodeInstance, budget: Budget, seed: int) -> List[StratumTask]:
    settings = load_settings()
    h = hierarchy(c)
    nodes = c.node_ids if budget.nodes is None else sorted(budget.nodes)
    tasks = []
    for i in nodes:
        entry = h.node(i)
        info = entry.cooperation
        n = c.topology.nodes[i].n
        for level in range(0, entry.depth + 1):
            if level == 0:
                helper_sets: List[Tuple[int, ...]] = [()]
                accumulated = frozenset()
            else:
                boosters = sorted(info.boosters[level])
                accumulated = info.accumulated[level]
                if len(boosters) <= h.enum_limit:
                    helper_sets = [W for size in range(len(boosters) + 1) for W in combinations(boosters, size)]
                else:
                    helper_sets = [(), tuple(boosters)]
            for index, W in enumerate(helper_sets):
                value = h.lam(i, level, W)
                claim = min(value, n)
                sizes = [(s, True) for s in (range(claim + 1) if budget.all_sizes else [claim])]
                sizes.append((value + 1, False))
                for size, claimed in sizes:
                    if size > n or (budget.max_erasures is not None and size > budget.max_erasures):
                        continue
                    tasks.append(StratumTask(
                        node=i, level=level, helpers=tuple(W), intact=tuple(sorted(accumulated | set(W))),
                        size=size, claimed=claimed, index=index, seed=seed, exhaustive=budget.exhaustive,
                        samples=budget.samples or settings.sample_size, threshold=settings.sample_threshold))
    return tasks


def _placements(task: StratumTask, n: int, rng: np.random.Generator) -> Tuple[Iterator[Tuple[int, ...]], bool]:
    total = comb(n, task.size)
    limit = task.threshold if task.exhaustive else task.samples
    if total <= limit:
        return combinations(range(1, n + 1), task.size), False
    draws = (tuple(int(x) + 1 for x in rng.choice(n, size=task.size, replace=False)) for _ in range(task.samples))
    return draws, True


def evaluate_stratum(c: CodeInstance, task: StratumTask) -> StratumReport:
    """Decode every placement of the stratum and compare with the oracle and the ground truth."""
    i = task.node
    rng = np.random.default_rng([task.seed, i, task.level, task.size, task.index])
    messages = random_messages(c, rng)
    codeword = encode(c, messages)
    lost = set(c.node_ids) - set(task.intact) - {i}
    base = ErasurePattern.full(c, lost).erased
    placements, sampled = _placements(task, c.topology.nodes[i].n, rng)
    report = StratumReport(node=i, level=task.level, helpers=list(task.helpers), size=task.size,
                           claimed=task.claimed, sampled=sampled)
    for coords in placements:
        pattern = ErasurePattern({**base, i: frozenset(coords)})
        entry = hierarchical_decode(c, codeword, pattern).nodes[i]
        verdict = oracle_recoverable(c, pattern)
        correct = entry.recovered and np.array_equal(entry.message, messages.symbols[i])
        report.tested += 1
        report.passed += int(correct)
        report.failed += int(not correct)
        report.oracle_determined += int(verdict.determined[i])
        if entry.recovered and not (correct and verdict.determined[i]):
            report.violations += 1
            logger.error(f"Node {i}: decoder claims recovery the oracle does not support, erased {pattern.to_dict()}")
    logger.info(f"Stratum node={i} level={task.level} W={list(task.helpers)} s={task.size}: "
                f"{report.passed}/{report.tested} recovered")
    return report


_WORKER_CODE: Optional[CodeInstance] = None


def _init_worker(container: bytes):
    global _WORKER_CODE
    _WORKER_CODE = deserialize_code(container)


def _run_task(task: StratumTask) -> StratumReport:
    return evaluate_stratum(_WORKER_CODE, task)


def sweep_validate(c: CodeInstance, budget: Budget, seed: int = 0, jobs: int = 1) -> ValidationReport:
    """
    Check the hierarchy's claimed capabilities by decoding
    :param c: code
    :param budget: enumeration limits; a zero budget gives an empty report
    :param seed: run seed, combined with each stratum's coordinates
    :param jobs: worker processes
    :return: report with one entry per stratum
    """
    report = ValidationReport(construction=str(c.construction), seed=seed)
    if budget.is_empty:
        logger.info("Empty sweep budget; nothing to validate")
        return report
    tasks = _strata(c, budget, seed)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(serialize_code(c),)) as executor:
            report.strata = list(executor.map(_run_task, tasks))
    else:
        report.strata = [evaluate_stratum(c, task) for task in tasks]
    logger.info(f"Sweep of {len(tasks)} strata: {report.claimed_failures} claimed failures, "
                f"{report.violations} oracle violations")
    return report
