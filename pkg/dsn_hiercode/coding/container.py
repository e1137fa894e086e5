"""
Binary container for built codes.

    header   magic "DSNC" | version u8 | theta u8 | modulus u32 | p u16 | flags u8
    topology u32 length + canonical topology JSON (utf-8)
    table    per node: id, k, r, delta, u, v as u16
    elements per node: u + v element values as u16
    payload  per node: T_i row-major, u16 per symbol

All integers little-endian. Loading rebuilds the code from the embedded
topology and checks every element and payload symbol against the rebuild.
"""
import struct
from typing import List

import numpy as np
from loguru import logger

from dsn_hiercode.algebra.field import field_context
from dsn_hiercode.coding.codegen import CodeInstance, build_multi_level, build_single_level
from dsn_hiercode.exceptions import ContainerError
from dsn_hiercode.network.coopgraph import build_cooperation_graph
from dsn_hiercode.network.topology import load_topology
from dsn_hiercode.options import ConstructionOptions
from dsn_hiercode.settings import CONTAINER_MAGIC, CONTAINER_VERSION

HEADER = struct.Struct("<4sBBIHB")
NODE_ROW = struct.Struct("<6H")
FLAG_MULTI_LEVEL = 0x1


def serialize_code(c: CodeInstance) -> bytes:
    flags = FLAG_MULTI_LEVEL if c.construction == ConstructionOptions.multi_level else 0
    topology = c.topology.serialize().encode("utf-8")
    parts: List[bytes] = [
        HEADER.pack(CONTAINER_MAGIC, CONTAINER_VERSION, c.ctx.theta, c.ctx.modulus, c.topology.p, flags),
        struct.pack("<I", len(topology)),
        topology,
    ]
    for i in c.node_ids:
        node = c.nodes[i]
        parts.append(NODE_ROW.pack(i, node.params.k, node.params.r, node.params.delta, node.u, node.v))
    for i in c.node_ids:
        node = c.nodes[i]
        parts.append(np.asarray(node.a_values + node.b_values, dtype="<u2").tobytes())
    for i in c.node_ids:
        parts.append(c.nodes[i].T.data.astype("<u2").tobytes())
    return b"".join(parts)


class _Reader:

    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise ContainerError("Code container is truncated", offset=self.offset)
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, layout: struct.Struct):
        return layout.unpack(self.take(layout.size))

    def symbols(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(2 * count), dtype="<u2").astype(np.int64)


def deserialize_code(data: bytes) -> CodeInstance:
    """
    Rebuild a code from its container
    :param data: container bytes
    :return: code instance identical to the serialized one
    """
    reader = _Reader(data)
    magic, version, theta, modulus, p, flags = reader.unpack(HEADER)
    if magic != CONTAINER_MAGIC:
        raise ContainerError(f"Not a code container (magic {magic!r})")
    if version != CONTAINER_VERSION:
        raise ContainerError(f"Unsupported container version {version}", version=version)
    (length,) = struct.unpack("<I", reader.take(4))
    topology = load_topology(reader.take(length).decode("utf-8"))
    if topology.p != p:
        raise ContainerError(f"Header announces {p} nodes, topology has {topology.p}")

    ctx = field_context(theta, modulus)
    if flags & FLAG_MULTI_LEVEL:
        code = build_multi_level(build_cooperation_graph(topology), ctx)
    else:
        code = build_single_level(topology, ctx)

    for i in code.node_ids:
        node = code.nodes[i]
        row = reader.unpack(NODE_ROW)
        if row != (i, node.params.k, node.params.r, node.params.delta, node.u, node.v):
            raise ContainerError(f"Parameter table entry for node {i} does not match the topology", node=i)
    for i in code.node_ids:
        node = code.nodes[i]
        if tuple(int(v) for v in reader.symbols(node.u + node.v)) != node.a_values + node.b_values:
            raise ContainerError(f"Element assignment of node {i} does not match the rebuild", node=i)
    for i in code.node_ids:
        node = code.nodes[i]
        payload = reader.symbols(node.u * node.v).reshape(node.u, node.v)
        if not np.array_equal(payload, node.T.data):
            raise ContainerError(f"T_{i} payload does not match the rebuild", node=i)
    if reader.offset != len(data):
        raise ContainerError("Trailing bytes after the code payload", extra=len(data) - reader.offset)
    logger.info(f"Loaded {code.construction} code over GF({ctx.q}) with {topology.p} nodes")
    return code
