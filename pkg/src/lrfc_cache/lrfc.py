"""Linear random fountain code: encoder, incremental decoder, overhead sampling.

Coefficient vectors and payloads are stored as uint8 arrays of field values.
A payload is a vector of field symbols, so for q < 256 every payload entry
must be smaller than q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf import FieldContext, get_field

__all__ = [
    "DecodingFailure",
    "InputBlock",
    "CodedSymbol",
    "DecoderState",
    "BatchRankTracker",
    "encode_next",
    "absorb",
    "solve",
    "measure_overhead",
    "symbols_to_full_rank",
    "sample_overheads",
]


class DecodingFailure(RuntimeError):
    """Collected symbols do not yet span the whole input block."""


@dataclass
class InputBlock:
    symbols: np.ndarray  # shape (k, payload_len)
    ctx: FieldContext

    def __post_init__(self) -> None:
        self.symbols = np.atleast_2d(np.asarray(self.symbols, dtype=np.uint8))
        if self.symbols.shape[0] < 1:
            raise ValueError("an input block needs at least one symbol")
        if self.symbols.size and int(self.symbols.max()) >= self.ctx.q:
            raise ValueError(f"payload entries must be < q={self.ctx.q}")

    @property
    def k(self) -> int:
        return self.symbols.shape[0]

    @property
    def payload_len(self) -> int:
        return self.symbols.shape[1]

    @classmethod
    def random(cls, k: int, payload_len: int, q: int, rng: np.random.Generator) -> InputBlock:
        ctx = get_field(q)
        return cls(ctx.random(rng, (k, payload_len)), ctx)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InputBlock):
            return NotImplemented
        return self.ctx == other.ctx and np.array_equal(self.symbols, other.symbols)


@dataclass
class CodedSymbol:
    coefficients: np.ndarray
    payload: np.ndarray | None = None


def _combine(ctx: FieldContext, coefficients: np.ndarray, symbols: np.ndarray) -> np.ndarray:
    """sum_a g_a * u_a over GF(q); rows of ``symbols`` are the u_a."""
    products = ctx.mul_table[coefficients[:, None], symbols]
    return np.bitwise_xor.reduce(products, axis=0).astype(np.uint8)


def encode_next(block: InputBlock, rng: np.random.Generator) -> CodedSymbol:
    """Draw one output symbol with i.i.d. uniform coefficients."""
    g = block.ctx.random(rng, block.k)
    return CodedSymbol(g, _combine(block.ctx, g, block.symbols))


@dataclass
class DecoderState:
    """Incremental row-echelon form of the received coefficient vectors.

    ``pivots[c]`` holds the row whose leading nonzero entry sits in column
    ``c``; that entry is normalized to 1.
    """

    k: int
    ctx: FieldContext
    with_payload: bool = True
    pivots: dict = field(default_factory=dict)
    consumed: int = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def overhead(self) -> int:
        return self.consumed - self.k

    @property
    def full_rank(self) -> bool:
        return self.rank == self.k

    def rows(self) -> list[tuple[int, np.ndarray, np.ndarray | None]]:
        """(pivot column, coefficients, payload) in increasing pivot order."""
        return [(c, *self.pivots[c]) for c in sorted(self.pivots)]

    def absorb(self, sym: CodedSymbol) -> bool:
        """Reduce ``sym`` against the stored pivots; True iff the rank grew."""
        g = np.asarray(sym.coefficients, dtype=np.uint8)
        if g.shape != (self.k,):
            raise ValueError(f"coefficient vector has length {g.size}, expected {self.k}")
        if self.with_payload and sym.payload is None:
            raise ValueError("decoder keeps payloads but the symbol carries none")
        self.consumed += 1
        if self.full_rank:
            return False

        mul = self.ctx.mul_table
        g = g.copy()
        y = np.asarray(sym.payload, dtype=np.uint8).copy() if self.with_payload else None
        for c in range(self.k):
            coef = int(g[c])
            if coef == 0:
                continue
            if c in self.pivots:
                row, payload = self.pivots[c]
                g ^= mul[coef, row]
                if y is not None:
                    y ^= mul[coef, payload]
            else:
                scale = int(self.ctx.inv_table[coef])
                g = mul[scale, g]
                if y is not None:
                    y = mul[scale, y]
                self.pivots[c] = (g, y)
                return True
        return False

    def solve(self) -> InputBlock:
        """Back-substitution; the state itself is left untouched."""
        if not self.with_payload:
            raise ValueError("rank-only decoder cannot recover payloads")
        if not self.full_rank:
            raise DecodingFailure(f"rank {self.rank} < k={self.k}; collect more symbols")
        mul = self.ctx.mul_table
        # with all k pivots present, row c is e_c plus entries right of c
        coeffs = {c: self.pivots[c][0].copy() for c in range(self.k)}
        payloads = {c: self.pivots[c][1].copy() for c in range(self.k)}
        for c in range(self.k - 1, -1, -1):
            for r in range(c):
                coef = int(coeffs[r][c])
                if coef:
                    coeffs[r] ^= mul[coef, coeffs[c]]
                    payloads[r] ^= mul[coef, payloads[c]]
        return InputBlock(np.stack([payloads[c] for c in range(self.k)]), self.ctx)


def absorb(state: DecoderState, sym: CodedSymbol) -> tuple[DecoderState, str]:
    grew = state.absorb(sym)
    return state, "rank_increased" if grew else "redundant"


def solve(state: DecoderState) -> InputBlock:
    return state.solve()


def measure_overhead(k: int, q: int, rng: np.random.Generator) -> int:
    """Symbols beyond k needed until a fresh decoder reaches full rank."""
    ctx = get_field(q)
    state = DecoderState(k, ctx, with_payload=False)
    while not state.full_rank:
        state.absorb(CodedSymbol(ctx.random(rng, k)))
    return state.overhead


class BatchRankTracker:
    """Many independent rank-only decoders advanced in lockstep.

    Each call to :meth:`absorb` feeds one coefficient vector to every
    decoder. Same elimination as :class:`DecoderState`, vectorized across
    the batch.
    """

    def __init__(self, batch: int, k: int, ctx: FieldContext):
        self.k = k
        self.ctx = ctx
        self.basis = np.zeros((batch, k, k), dtype=np.uint8)
        self.has_pivot = np.zeros((batch, k), dtype=bool)
        self.rank = np.zeros(batch, dtype=np.int64)

    def absorb(self, vectors: np.ndarray) -> np.ndarray:
        """Reduce one vector per decoder; returns the rank-increase mask."""
        mul, inv_table = self.ctx.mul_table, self.ctx.inv_table
        v = vectors.astype(np.uint8, copy=True)
        grew = np.zeros(len(v), dtype=bool)
        for c in range(self.k):
            coef = v[:, c].copy()
            new = ~self.has_pivot[:, c] & (coef != 0)
            # rows without a pivot in column c are zero, so this is a no-op there
            v ^= mul[coef[:, None], self.basis[:, c, :]]
            if new.any():
                idx = np.flatnonzero(new)
                self.basis[idx, c, :] = mul[inv_table[coef[idx]][:, None], v[idx]]
                self.has_pivot[idx, c] = True
                v[idx] = 0
                grew[idx] = True
        self.rank += grew
        return grew

    def keep(self, mask: np.ndarray) -> None:
        self.basis = self.basis[mask]
        self.has_pivot = self.has_pivot[mask]
        self.rank = self.rank[mask]


def symbols_to_full_rank(k: int, q: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Number of symbols each of ``trials`` independent decoders consumes
    before reaching rank k (always >= k)."""
    ctx = get_field(q)
    out = np.empty(trials, dtype=np.int64)
    active = np.arange(trials)
    tracker = BatchRankTracker(trials, k, ctx)
    consumed = 0
    while active.size:
        tracker.absorb(ctx.random(rng, (active.size, k)))
        consumed += 1
        done = tracker.rank == k
        if done.any():
            out[active[done]] = consumed
            active = active[~done]
            tracker.keep(~done)
    return out


def sample_overheads(k: int, q: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized :func:`measure_overhead` for many trials."""
    return symbols_to_full_rank(k, q, trials, rng) - k
