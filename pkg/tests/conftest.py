import os

# numba's default OpenMP threading layer aborts forked ProcessPoolExecutor workers.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import json
from pathlib import Path

import numpy as np
import pytest

import dsn_hiercode
from dsn_hiercode.algebra.field import field_context
from dsn_hiercode.coding.codegen import build_multi_level, build_single_level
from dsn_hiercode.coding.hierarchy import hierarchy
from dsn_hiercode.network.coopgraph import build_cooperation_graph
from dsn_hiercode.network.topology import load_topology

DATA = Path(dsn_hiercode.__file__).parent / "data"


def load_document(name: str) -> dict:
    return json.loads((DATA / name).read_text(encoding="utf-8"))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture(scope="session")
def gf16():
    return field_context(4)


@pytest.fixture(scope="session")
def gf256():
    return field_context(8)


@pytest.fixture(scope="session")
def grid():
    return load_topology(load_document("grid.json"))


@pytest.fixture(scope="session")
def grid_code(grid):
    return build_single_level(grid)


@pytest.fixture(scope="session")
def grid_hierarchy(grid_code):
    return hierarchy(grid_code)


@pytest.fixture(scope="session")
def latency_code():
    return build_single_level(load_topology(load_document("grid_latency.json")))


@pytest.fixture(scope="session")
def multi():
    return load_topology(load_document("multi.json"))


@pytest.fixture(scope="session")
def multi_graph(multi):
    return build_cooperation_graph(multi)


@pytest.fixture(scope="session")
def multi_code(multi_graph):
    return build_multi_level(multi_graph)


@pytest.fixture(scope="session")
def pair_code():
    return build_single_level(load_topology(load_document("pair.json")))


@pytest.fixture
def overlapping_document():
    """multi plus a level-2 triangle whose rows meet the rows {8, 9} of the cycle with columns {2, 3}."""
    document = load_document("multi.json")
    document["cycles"].append({
        "X": [6, 7, 8], "Y": [1, 2, 12], "level": 2,
        "pairs": [{"row": 6, "cols": [1, 2]}, {"row": 7, "cols": [2, 12]}, {"row": 8, "cols": [1, 12]}],
        "gamma": {"6": 1, "7": 1, "8": 1},
    })
    return document
