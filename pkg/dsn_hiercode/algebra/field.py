"""
Arithmetic in binary extension fields GF(2^theta), 2 <= theta <= 16.

Elements are integers in [0, q) whose bits are polynomial coefficients over
GF(2). Each context wraps a galois FieldArray class for its modulus; the
integer kernels below convert to and from that class so callers keep
working on plain int64 arrays. Any irreducible modulus works, primitive or
not (0x11B is irreducible but x does not generate its multiplicative group).
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Type

import galois
import numpy as np
from loguru import logger

from dsn_hiercode.exceptions import (CapacityError, FieldContextError, FieldDivisionError,
                                     IrreducibilityError)
from dsn_hiercode.settings import DEFAULT_MODULI, MAX_THETA, MIN_THETA


def is_irreducible(modulus: int, theta: int) -> bool:
    """True when `modulus` has degree theta and no nontrivial factor over GF(2)."""
    if modulus >> theta != 1:
        return False
    return galois.Poly.Int(modulus).is_irreducible()


@dataclass(frozen=True)
class FieldContext:
    theta: int
    modulus: int
    q: int = field(init=False)
    GF: Type[galois.FieldArray] = field(init=False, compare=False, repr=False)
    generator: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not MIN_THETA <= self.theta <= MAX_THETA:
            raise FieldContextError(f"theta must lie in [{MIN_THETA}, {MAX_THETA}], got {self.theta}",
                                    theta=self.theta)
        if not is_irreducible(self.modulus, self.theta):
            raise IrreducibilityError(f"Modulus {self.modulus:#x} is not irreducible of degree {self.theta}",
                                      theta=self.theta, modulus=hex(self.modulus))
        GF = galois.GF(2 ** self.theta, irreducible_poly=self.modulus)
        object.__setattr__(self, "q", 1 << self.theta)
        object.__setattr__(self, "GF", GF)
        object.__setattr__(self, "generator", int(GF.primitive_element))

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, int(value))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def array(self, values) -> galois.FieldArray:
        return self.GF(np.asarray(values, dtype=np.int64))

    @staticmethod
    def ints(values) -> np.ndarray:
        return np.array(np.asarray(values).view(np.ndarray), dtype=np.int64)

    # Vectorized kernels over integer arrays; callers guarantee values lie in [0, q).

    def mul_array(self, a, b) -> np.ndarray:
        return self.ints(self.array(a) * self.array(b))

    def inv_array(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise FieldDivisionError("Inverse of zero requested", theta=self.theta)
        return self.ints(np.reciprocal(self.array(a)))

    def dot(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Matrix product over the field of integer arrays x (m x n) and y (n x p)."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if 0 in (x.shape[0], x.shape[1], y.shape[1]):
            return np.zeros((x.shape[0], y.shape[1]), dtype=np.int64)
        return self.ints(self.array(x) @ self.array(y))

    def vec_mat(self, v: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Row vector times matrix."""
        return self.dot(np.asarray(v, dtype=np.int64).reshape(1, -1), y)[0]


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldContext
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.ctx.q:
            raise FieldContextError(f"Value {self.value} outside GF({self.ctx.q})", value=self.value)

    def _check(self, other: "FieldElement"):
        if not isinstance(other, FieldElement) or other.ctx != self.ctx:
            raise FieldContextError("Operands belong to different field contexts")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return add(self, other)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return mul(self, other)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return mul(self, inv(other))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value:#x}"


@lru_cache(maxsize=None)
def field_context(theta: int, modulus: Optional[int] = None) -> FieldContext:
    """Shared, cached context for GF(2^theta); `modulus` defaults to the published table."""
    if modulus is None:
        if theta not in DEFAULT_MODULI:
            raise FieldContextError(f"No default modulus for theta={theta}", theta=theta)
        modulus = DEFAULT_MODULI[theta]
    ctx = FieldContext(theta=theta, modulus=modulus)
    logger.debug(f"Built GF(2^{theta}) with modulus {modulus:#x}, primitive element {ctx.generator:#x}")
    return ctx


def select_theta(required: int, strict: bool) -> int:
    """Smallest theta whose q exceeds `required` (strict) or reaches it."""
    for theta in range(MIN_THETA, MAX_THETA + 1):
        q = 1 << theta
        if q > required or (not strict and q == required):
            return theta
    raise CapacityError(f"No supported field holds {required} elements", required=required)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement(a.ctx, a.value ^ b.value)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement(a.ctx, int(a.ctx.mul_array(a.value, b.value)))


def inv(a: FieldElement) -> FieldElement:
    if a.value == 0:
        raise FieldDivisionError("Zero has no multiplicative inverse", theta=a.ctx.theta)
    return FieldElement(a.ctx, int(a.ctx.inv_array(a.value)))


def enumerate_elements(ctx: FieldContext, count: int) -> List[FieldElement]:
    """
    First `count` elements in canonical order 0, 1, ..., q-1
    :param ctx: field context
    :param count: how many distinct elements are needed
    :return: list of pairwise distinct elements
    """
    if count < 0 or count > ctx.q:
        raise CapacityError(f"GF({ctx.q}) has no {count} distinct elements", q=ctx.q, requested=count)
    return [FieldElement(ctx, value) for value in range(count)]
