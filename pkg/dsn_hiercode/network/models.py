from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator


class NodeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: int = Field(..., description="1-based node index.")
    k: int = Field(..., gt=0, description="Message length k_i.")
    r: int = Field(..., gt=0, description="Parity length r_i.")
    delta: int = Field(..., ge=0, description="Level-1 cooperation parameter.")


class EdgeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: int = Field(..., description="First endpoint.")
    b: int = Field(..., description="Second endpoint.")
    t: Optional[Union[int, float, str]] = Field(
        default=None, description="Link latency; a number or a fraction string such as '3/5'. Defaults to 1.")


class PairDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    row: int = Field(..., description="Row node i of the cycle.")
    cols: List[int] = Field(..., description="The two column nodes Y_{t;i} joined to the row.")


class CycleDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    X: List[int] = Field(..., description="Row nodes; they host the E blocks.")
    Y: List[int] = Field(..., description="Column nodes; they host the V blocks.")
    pairs: List[PairDocument] = Field(..., description="Row to column-pair incidences.")
    level: int = Field(..., description="Cooperation level, at least 2.")
    gamma: Optional[Dict[str, int]] = Field(default=None, description="Per-row gamma values.")
    symbols: Optional[Dict[str, str]] = Field(
        default=None, description="Per-row symbol names resolved through the top-level gamma_symbols.")


class TopologyDocument(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "theta": 4,
                "nodes": [{"id": 1, "k": 1, "r": 1, "delta": 0}, {"id": 2, "k": 1, "r": 1, "delta": 0}],
                "edges": [{"a": 1, "b": 2, "t": 2.0}],
            }
        },
    )

    theta: Optional[int] = Field(default=None, description="Field exponent; chosen automatically when absent.")
    modulus: Optional[int] = Field(default=None, description="Irreducible polynomial, decimal or '0x' hex.")
    nodes: List[NodeDocument] = Field(..., description="Per-node code parameters.")
    edges: List[EdgeDocument] = Field(default_factory=list, description="Undirected weighted links.")
    coop: Optional[Dict[str, List[int]]] = Field(default=None, description="Cooperation sets M_i; default N_i.")
    cycles: Optional[List[CycleDocument]] = Field(default=None, description="Multi-level cooperation cycles.")
    gamma_symbols: Optional[Dict[str, int]] = Field(default=None, description="Gamma value per cycle symbol.")

    @field_validator("modulus", mode="before")
    @classmethod
    def parse_modulus(cls, value):
        if isinstance(value, str):
            try:
                return int(value, 0)
            except ValueError:
                raise ValueError(f"modulus must be an integer or a 0x-prefixed hex string, got {value!r}")
        return value
