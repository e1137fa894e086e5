"""
File formats used by the command line.

Symbol files hold the symbols of every node in ascending node order, one
byte per symbol for fields up to GF(256) and little-endian u16 above.
Erasure patterns are JSON objects {"<node>": [coordinates]} with 1-based coordinates.
"""
import json
from pathlib import Path
from typing import Union

import numpy as np

from dsn_hiercode.algebra.field import FieldContext
from dsn_hiercode.coding.codec import CodewordSet, ErasurePattern, MessageSet
from dsn_hiercode.coding.codegen import CodeInstance
from dsn_hiercode.coding.container import deserialize_code, serialize_code
from dsn_hiercode.exceptions import DimensionError, HierCodeError
from dsn_hiercode.network.topology import DsnTopology, load_topology
from dsn_hiercode.options import ErrorCode

PathLike = Union[str, Path]


def _existing(path: PathLike) -> Path:
    path = Path(path)
    if not path.is_file():
        raise HierCodeError(f"File not found: {path}", code=ErrorCode.usage, path=str(path))
    return path


def symbol_dtype(ctx: FieldContext) -> str:
    return "u1" if ctx.theta <= 8 else "<u2"


def read_topology(path: PathLike) -> DsnTopology:
    return load_topology(_existing(path).read_text(encoding="utf-8"))


def read_code(path: PathLike) -> CodeInstance:
    return deserialize_code(_existing(path).read_bytes())


def write_code(path: PathLike, c: CodeInstance):
    Path(path).write_bytes(serialize_code(c))


def read_symbols(path: PathLike, ctx: FieldContext, count: int) -> np.ndarray:
    vector = np.frombuffer(_existing(path).read_bytes(), dtype=symbol_dtype(ctx)).astype(np.int64)
    if vector.size != count:
        raise DimensionError(f"{path} holds {vector.size} symbols, expected {count}", path=str(path))
    if vector.size and vector.max() >= ctx.q:
        raise DimensionError(f"{path} holds values outside GF({ctx.q})", path=str(path))
    return vector


def write_symbols(path: PathLike, ctx: FieldContext, vector: np.ndarray):
    Path(path).write_bytes(np.asarray(vector).astype(symbol_dtype(ctx)).tobytes())


def read_messages(path: PathLike, c: CodeInstance) -> MessageSet:
    return MessageSet.from_vector(c, read_symbols(path, c.ctx, c.total_k))


def write_messages(path: PathLike, c: CodeInstance, m: MessageSet):
    write_symbols(path, c.ctx, m.to_vector(c))


def read_codeword(path: PathLike, c: CodeInstance) -> CodewordSet:
    return CodewordSet.from_vector(c, read_symbols(path, c.ctx, c.total_n))


def write_codeword(path: PathLike, c: CodeInstance, codeword: CodewordSet):
    write_symbols(path, c.ctx, codeword.to_vector(c))


def read_pattern(path: PathLike) -> ErasurePattern:
    try:
        data = json.loads(_existing(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict) or not all(isinstance(coords, list) for coords in data.values()):
            raise ValueError("expected an object mapping node ids to coordinate lists")
        return ErasurePattern.from_dict(data)
    except (ValueError, TypeError) as e:
        raise HierCodeError(f"Malformed erasure pattern {path}: {e}", code=ErrorCode.schema, path=str(path))


def pattern_json(pattern: ErasurePattern) -> str:
    return json.dumps(pattern.to_dict(), sort_keys=True)


def write_pattern(path: PathLike, pattern: ErasurePattern):
    Path(path).write_text(pattern_json(pattern) + "\n", encoding="utf-8")
