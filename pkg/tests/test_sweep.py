from math import comb

import pytest

from dsn_hiercode.exceptions import HierCodeError
from dsn_hiercode.options import ErrorCode
from dsn_hiercode.validation.sweep import Budget, parse_budget, sweep_validate


@pytest.mark.parametrize("text, expected", [
    ("exhaustive", Budget()),
    ("exhaustive:node=2", Budget(nodes=[2])),
    ("exhaustive:node=2,all-sizes", Budget(nodes=[2], all_sizes=True)),
    ("node=3,node=5", Budget(nodes=[3, 5])),
    ("max-erasures=6,samples=500", Budget(max_erasures=6, samples=500, exhaustive=False)),
    ("exhaustive,samples=50", Budget(samples=50)),
    ("", Budget()),
])
def test_parse_budget(text, expected):
    assert parse_budget(text) == expected


@pytest.mark.parametrize("text", ["bogus", "exhaustive:level=2", "samples=many", "node="])
def test_parse_budget_rejects(text):
    with pytest.raises(HierCodeError) as error:
        parse_budget(text)
    assert error.value.code == ErrorCode.usage


@pytest.mark.parametrize("text", ["max-erasures=0", "samples=0"])
def test_zero_budget_is_empty(pair_code, text):
    report = sweep_validate(pair_code, parse_budget(text))
    assert report.strata == []
    assert report.claimed_failures == 0
    assert report.to_frame().empty


def test_pair_sweep(pair_code):
    report = sweep_validate(pair_code, parse_budget("exhaustive"), seed=7)
    assert report.construction == "single_level"
    assert len(report.strata) == 8
    assert report.claimed_failures == 0
    assert report.violations == 0
    claimed = report.stratum(1, 1, [], 1)
    assert (claimed.claimed, claimed.tested, claimed.passed) == (True, 2, 2)
    probe = report.stratum(1, 1, [], 2)
    assert (probe.claimed, probe.tested, probe.failed, probe.oracle_determined) == (False, 1, 1, 0)
    assert probe.failure_fraction == 1.0


def test_max_erasures_drops_probes(pair_code):
    report = sweep_validate(pair_code, parse_budget("max-erasures=1"))
    assert all(s.size <= 1 for s in report.strata)
    assert all(s.claimed for s in report.strata)


def test_sampled_strata(grid_code):
    report = sweep_validate(grid_code, parse_budget("node=2,samples=5,max-erasures=3"), seed=3)
    assert report.strata
    for s in report.strata:
        assert s.sampled == (comb(6, s.size) > 5)
        assert s.tested == (5 if s.sampled else comb(6, s.size))
    assert report.violations == 0


def test_parallel_sweep_matches_serial(pair_code):
    budget = parse_budget("exhaustive")
    assert sweep_validate(pair_code, budget, seed=1, jobs=2) == sweep_validate(pair_code, budget, seed=1)


def test_frame_columns(pair_code):
    frame = sweep_validate(pair_code, parse_budget("exhaustive")).to_frame()
    assert list(frame.columns[:5]) == ["Node", "Level", "W", "Erasures", "Claimed"]
    assert len(frame) == 8


@pytest.mark.slow
def test_grid_node_2_claims_hold(grid_code):
    report = sweep_validate(grid_code, parse_budget("exhaustive:node=2,all-sizes"))
    assert report.claimed_failures == 0
    assert report.violations == 0
    assert report.stratum(2, 1, [4, 6, 8], 6).passed == 1
