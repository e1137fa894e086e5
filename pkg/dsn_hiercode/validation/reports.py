from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, Field


class StratumReport(BaseModel):
    node: int = Field(..., description="Node under test.")
    level: int = Field(..., description="Hierarchy level; 0 is local decoding.")
    helpers: List[int] = Field(default_factory=list, description="Booster set W on top of A_i^l.")
    size: int = Field(..., description="Erasures placed at the node.")
    claimed: bool = Field(..., description="True when the hierarchy guarantees this size.")
    tested: int = Field(default=0, description="Patterns evaluated.")
    passed: int = Field(default=0, description="Patterns the decoder recovered correctly.")
    failed: int = Field(default=0, description="Patterns the decoder did not recover.")
    oracle_determined: int = Field(default=0, description="Patterns for which the node is globally determined.")
    violations: int = Field(default=0, description="Decoder successes the oracle disagrees with.")
    sampled: bool = Field(default=False, description="Patterns were sampled instead of enumerated.")

    @property
    def failure_fraction(self) -> float:
        return self.failed / self.tested if self.tested else 0.0


class ValidationReport(BaseModel):
    construction: str = Field(..., description="single_level or multi_level.")
    seed: int = Field(default=0, description="Seed of the run.")
    strata: List[StratumReport] = Field(default_factory=list)

    @property
    def claimed_failures(self) -> int:
        return sum(s.failed for s in self.strata if s.claimed)

    @property
    def violations(self) -> int:
        return sum(s.violations for s in self.strata)

    def stratum(self, node: int, level: int, helpers: List[int], size: int) -> Optional[StratumReport]:
        for entry in self.strata:
            if (entry.node, entry.level, entry.helpers, entry.size) == (node, level, sorted(helpers), size):
                return entry
        return None

    def to_frame(self) -> pd.DataFrame:
        """One row per stratum, in the order the sweep produced them."""
        return pd.DataFrame({
            "Node": [s.node for s in self.strata],
            "Level": [s.level for s in self.strata],
            "W": ["{" + ",".join(map(str, s.helpers)) + "}" for s in self.strata],
            "Erasures": [s.size for s in self.strata],
            "Claimed": [s.claimed for s in self.strata],
            "Tested": [s.tested for s in self.strata],
            "Passed": [s.passed for s in self.strata],
            "Failed": [s.failed for s in self.strata],
            "Oracle": [s.oracle_determined for s in self.strata],
            "Violations": [s.violations for s in self.strata],
            "Sampled": [s.sampled for s in self.strata],
        })
