"""Table-driven arithmetic over the binary extension fields GF(2^m), 1 <= m <= 8."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "REDUCTION_POLYNOMIALS",
    "FieldContext",
    "FieldElement",
    "FieldMismatchError",
    "get_field",
    "add",
    "mul",
    "inv",
    "sample_uniform",
]

# bit i of the mask is the coefficient of x^i
REDUCTION_POLYNOMIALS = {
    1: 0b11,  # x + 1
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10000011,  # x^7 + x + 1
    8: 0b100011011,  # x^8 + x^4 + x^3 + x + 1
}


class FieldMismatchError(ValueError):
    """Raised when elements from two different fields are combined."""


def _clmul_mod(a: int, b: int, poly: int, m: int) -> int:
    """Carry-less product of ``a`` and ``b`` reduced modulo ``poly``."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return result


@dataclass(frozen=True)
class FieldContext:
    """GF(q) with q = 2^m plus its lookup tables.

    ``mul_table`` is the full q x q product table, ``exp``/``log`` are taken
    with respect to the smallest primitive element ``generator``.
    """

    q: int
    poly: int
    m: int = field(init=False)
    generator: int = field(init=False, compare=False)
    exp: np.ndarray = field(init=False, compare=False, repr=False)
    log: np.ndarray = field(init=False, compare=False, repr=False)
    mul_table: np.ndarray = field(init=False, compare=False, repr=False)
    inv_table: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        q = self.q
        if q < 2 or q > 256 or q & (q - 1):
            raise ValueError(f"field order must be a power of two in [2, 256], got {q}")
        m = q.bit_length() - 1
        if self.poly.bit_length() - 1 != m:
            raise ValueError(f"reduction polynomial {self.poly:#b} is not of degree {m}")
        object.__setattr__(self, "m", m)

        table = np.zeros((q, q), dtype=np.uint8)
        for a in range(q):
            for b in range(a, q):
                table[a, b] = table[b, a] = _clmul_mod(a, b, self.poly, m)
        # a reducible polynomial yields zero divisors
        if np.any(table[1:, 1:] == 0):
            raise ValueError(f"polynomial {self.poly:#b} is reducible")

        gen = next(g for g in range(1, q) if self._order(table, g) == q - 1)
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = exp[i + q - 1] = x
            log[x] = i
            x = int(table[x, gen])
        inv_table = np.zeros(q, dtype=np.uint8)
        for a in range(1, q):
            inv_table[a] = exp[(q - 1 - log[a]) % (q - 1)]

        for name, arr in (("exp", exp), ("log", log), ("mul_table", table), ("inv_table", inv_table)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "generator", gen)

    @staticmethod
    def _order(table: np.ndarray, g: int) -> int:
        x, n = g, 1
        while x != 1:
            x = int(table[x, g])
            n += 1
        return n

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value), self)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(v, self) for v in range(self.q)]

    def mul_via_logs(self, a: int, b: int) -> int:
        """Product through the exp/log tables; agrees with ``mul_table``."""
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def random(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Uniform field values as a uint8 array."""
        return rng.integers(0, self.q, size=size, dtype=np.uint8)


@lru_cache(maxsize=None)
def get_field(q: int) -> FieldContext:
    """Shared context for GF(q) using the conventional reduction polynomial."""
    if q < 2 or q > 256 or q & (q - 1):
        raise ValueError(f"field order must be a power of two in [2, 256], got {q}")
    return FieldContext(q, REDUCTION_POLYNOMIALS[q.bit_length() - 1])


@dataclass(frozen=True)
class FieldElement:
    value: int
    ctx: FieldContext

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.ctx.q:
            raise ValueError(f"{self.value} is not an element of GF({self.ctx.q})")

    def _check(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.ctx != self.ctx:
            raise FieldMismatchError(f"GF({self.ctx.q}) element combined with GF({other.ctx.q}) element")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.value ^ other.value, self.ctx)

    __sub__ = __add__

    def __neg__(self) -> FieldElement:
        return self

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(int(self.ctx.mul_table[self.value, other.value]), self.ctx)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return self * other.inverse()

    def __pow__(self, e: int) -> FieldElement:
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ctx.one
        for _ in range(e):
            result = result * self
        return result

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError(f"zero has no inverse in GF({self.ctx.q})")
        return FieldElement(int(self.ctx.inv_table[self.value]), self.ctx)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"GF{self.ctx.q}({self.value})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def sample_uniform(ctx: FieldContext, rng: np.random.Generator) -> FieldElement:
    """One uniformly distributed element of ``ctx`` drawn from ``rng``."""
    return FieldElement(int(rng.integers(0, ctx.q)), ctx)
