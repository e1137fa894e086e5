from typing import Iterable, List

import pandas as pd

from dsn_hiercode.coding.codegen import CodeInstance, nonsystematic_component
from dsn_hiercode.coding.decoder import RecoveryReport
from dsn_hiercode.coding.hierarchy import EccHierarchy, NodeHierarchy
from dsn_hiercode.network.coopgraph import CompatibilityVerdict
from dsn_hiercode.options import RecoveryStatusOptions
from dsn_hiercode.settings import load_settings
from dsn_hiercode.validation.reports import ValidationReport

COLORS = {
    "red": "\033[31m",
    "green": "\033[32m",
    "yellow": "\033[33m",
}
RESET = "\033[0m"


def colorize(text: str, color: str) -> str:
    if not load_settings().color:
        return text
    return f"{COLORS[color]}{text}{RESET}"


def _set(values: Iterable[int]) -> str:
    return "{" + ",".join(str(v) for v in sorted(values)) + "}"


def node_line(entry: NodeHierarchy) -> str:
    """One-line hierarchy of a node, e.g. d=(3,7); I^1={1,3,5}; B^1={4,6,8}"""
    info = entry.cooperation
    parts = ["d=(" + ",".join(str(v) for v in entry.d) + ")"]
    for level in info.levels:
        parts.append(f"I^{level}={_set(info.helpers[level])}")
        parts.append(f"B^{level}={_set(info.boosters[level])}")
    return "; ".join(parts)


def hierarchy_frame(h: EccHierarchy) -> pd.DataFrame:
    rows = []
    for i in sorted(h.nodes):
        entry = h.nodes[i]
        params = entry.cooperation
        node = h.code.nodes[i]
        rows.append({
            "Node": i,
            "k": node.params.k,
            "r": node.params.r,
            "delta": node.params.delta,
            "u": node.u,
            "v": node.v,
            "d": "(" + ",".join(str(v) for v in entry.d) + ")",
            "Helpers": "; ".join(f"I^{l}={_set(params.helpers[l])}" for l in params.levels),
            "Boosters": "; ".join(f"B^{l}={_set(params.boosters[l])}" for l in params.levels),
            "Flags": len(entry.flags),
        })
    return pd.DataFrame(rows)


def block_map_frame(c: CodeInstance) -> pd.DataFrame:
    """Label of every parity block A_{i,j}; rows are message owners, columns the storing nodes."""
    component = nonsystematic_component(c)
    ids = c.node_ids
    return pd.DataFrame([[component.labels[(i, j)] for j in ids] for i in ids],
                        index=pd.Index(ids, name="i"), columns=ids)


def recovery_frame(report: RecoveryReport) -> pd.DataFrame:
    rows = []
    for i in sorted(report.nodes):
        entry = report.nodes[i]
        row = {
            "Node": i,
            "Status": entry.status.value,
            "Level": "-" if entry.level is None else entry.level,
            "Helpers": _set(entry.helpers),
        }
        if report.timed:
            row["Time"] = "inf" if entry.time is None else str(entry.time)
        rows.append(row)
    return pd.DataFrame(rows)


def render_recovery(report: RecoveryReport) -> str:
    lines = render_frame(recovery_frame(report)).splitlines()
    statuses = [report.nodes[i].status for i in sorted(report.nodes)]
    colored = [lines[0]]
    for line, status in zip(lines[1:], statuses):
        colored.append(colorize(line, "red" if status == RecoveryStatusOptions.failed else "green"))
    return "\n".join(colored)


def render_verdict(verdict: CompatibilityVerdict) -> str:
    lines: List[str] = [colorize("Compatible", "green") if verdict.compatible else colorize("Incompatible", "red")]
    lines += [f"  condition {v.condition}, node {v.node}: {v.message}" for v in verdict.violations]
    lines += [colorize(f"  note: {n.message}", "yellow") for n in verdict.notes]
    return "\n".join(lines)


def render_validation(report: ValidationReport) -> str:
    frame = report.to_frame()
    summary = (f"{report.construction}: {len(report.strata)} strata, "
               f"{report.claimed_failures} failures in claimed strata, {report.violations} oracle violations")
    color = "red" if report.claimed_failures or report.violations else "green"
    return (render_frame(frame) + "\n" if len(frame) else "") + colorize(summary, color)


def render_frame(frame: pd.DataFrame) -> str:
    return frame.to_string(index=False)
