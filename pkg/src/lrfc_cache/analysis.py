"""Closed-form decoding and backhaul-rate expressions for LRFC caching.

Everything here is a pure function of its arguments. The per-(k, q) overhead
law is built once and memoized; it is immutable after construction, so it can
be shared between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .config import NetworkConfig

__all__ = [
    "DEFAULT_TOL",
    "BoundUnavailable",
    "OverheadLaw",
    "RateReport",
    "overhead_law",
    "failure_probability",
    "success_probability",
    "failure_bounds",
    "failure_probability_exact",
    "failure_bounds_exact",
    "sandwich_holds",
    "sigma",
    "sigma_bounds",
    "overhead_pmf",
    "expected_overhead",
    "delta_u",
    "zipf_pmf",
    "cache_deficit",
    "pmf_Z",
    "pmf_T_given_Z",
    "expected_backhaul",
    "backhaul_upper_bound",
    "mds_expected_backhaul",
]

DEFAULT_TOL = 1e-12


class BoundUnavailable(ValueError):
    """The closed-form overhead bound does not exist for q = 2."""


def failure_probability(k: int, delta: int, q: int) -> float:
    """Probability that k + delta uniform random vectors over GF(q) do not span GF(q)^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = k + delta
    if m < k:
        return 1.0
    # 1 - prod(1 - a_i) expanded as sum_i a_i prod_{j>i}(1 - a_j): no cancellation,
    # and the first (largest) term is exactly q^(-delta-1)
    fail, survive = 0.0, 1.0
    for i in range(k, 0, -1):
        a = float(q) ** (i - 1 - m)
        fail += a * survive
        survive *= 1.0 - a
    return min(fail, 1.0)


def _failure_ratio(k: int, delta: int, q: int) -> tuple[int, int]:
    """(numerator, denominator) of P_F, not reduced."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = k + delta
    if m < k:
        return 1, 1
    # prod_i (q^m - q^(i-1)) = q^(k(k-1)/2) prod_{j=delta+1}^{m} (q^j - 1); the power cancels
    full_rank = 1
    for j in range(delta + 1, m + 1):
        full_rank *= q**j - 1
    total = q ** (m * k - k * (k - 1) // 2)
    return total - full_rank, total


def failure_probability_exact(k: int, delta: int, q: int) -> Fraction:
    """P_F as an exact rational: 1 - prod_i (q^m - q^(i-1)) / q^(m k)."""
    return Fraction(*_failure_ratio(k, delta, q))


def sandwich_holds(k: int, delta: int, q: int) -> bool:
    """Exact check of q^(-delta-1) <= P_F(k, delta, q) < q^(-delta) / (q - 1)."""
    if delta < 0 or q < 2:
        raise ValueError("need delta >= 0 and q >= 2")
    num, den = _failure_ratio(k, delta, q)
    return den <= num * q ** (delta + 1) and num * q**delta * (q - 1) < den


def success_probability(k: int, delta: int, q: int) -> float:
    return 1.0 - failure_probability(k, delta, q)


def failure_bounds(delta: int, q: int) -> tuple[float, float]:
    """(lower, upper) with lower <= P_F(k, delta, q) < upper for every k."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if delta < 0:
        raise ValueError("the bounds hold for delta >= 0 only")
    return float(q) ** (-delta - 1), float(q) ** (-delta) / (q - 1)


def failure_bounds_exact(delta: int, q: int) -> tuple[Fraction, Fraction]:
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if delta < 0:
        raise ValueError("the bounds hold for delta >= 0 only")
    return Fraction(1, q ** (delta + 1)), Fraction(1, q**delta * (q - 1))


def sigma_bounds(q: int) -> tuple[float | None, float]:
    """Overhead-independent bounds on sigma_delta for delta >= 0.

    The lower bound degenerates to 0 at q = 2 and is reported as None.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    lower = None if q == 2 else 1.0 - 1.0 / (q - 1)
    return lower, 1.0 - (q - 1) / q**2


class OverheadLaw:
    """Distribution of the decoding overhead for fixed (k, q).

    ``failures[d]`` is P_F(k, d, q) for d = 0..D; ``pmf[d]`` is the probability
    that decoding first succeeds with exactly k + d symbols. D is the first
    overhead where (D + 1) P_F(D) < tol, which bounds both the neglected mass
    and the neglected contribution to the mean by about tol.
    """

    def __init__(self, k: int, q: int, tol: float = DEFAULT_TOL):
        if k < 1:
            raise ValueError("k must be >= 1")
        if q < 2:
            raise ValueError("q must be >= 2")
        if tol <= 0:
            raise ValueError("tol must be positive")
        self.k, self.q, self.tol = k, q, tol
        fails = []
        d = 0
        while True:
            f = failure_probability(k, d, q)
            fails.append(f)
            if (d + 1) * f < tol:
                break
            d += 1
        self.failures = np.array(fails)
        self.pmf = -np.diff(np.concatenate(([1.0], self.failures)))
        self.mean = float(np.dot(np.arange(len(self.pmf)), self.pmf))
        for arr in (self.failures, self.pmf):
            arr.setflags(write=False)

    @property
    def horizon(self) -> int:
        return len(self.pmf) - 1

    def failure(self, delta: int) -> float:
        if delta < 0:
            return 1.0
        if delta <= self.horizon:
            return float(self.failures[delta])
        return failure_probability(self.k, delta, self.q)

    def sigma(self, delta: int) -> float:
        """P(full rank at overhead delta | not full rank at delta - 1)."""
        if delta < 0:
            return 0.0
        prev = self.failure(delta - 1)
        if prev == 0.0:
            return 1.0
        return 1.0 - self.failure(delta) / prev

    def pmf_at(self, delta: int) -> float:
        if delta < 0:
            return 0.0
        if delta <= self.horizon:
            return float(self.pmf[delta])
        return self.failure(delta - 1) - self.failure(delta)

    def pmf_by_product(self, delta: int) -> float:
        """Same quantity as :meth:`pmf_at` via prod_{i<delta}(1 - sigma_i) * sigma_delta."""
        if delta < 0:
            return 0.0
        survive = 1.0
        for i in range(delta):
            survive *= 1.0 - self.sigma(i)
        return survive * self.sigma(delta)

    def excess_mean(self, s: int) -> float:
        """E[(Delta - s)^+], truncated where the tail mass drops below tol."""
        if s <= 0:
            return self.mean - s
        if s > self.horizon:
            return 0.0
        d = np.arange(s, self.horizon + 1)
        return float(np.dot(d - s, self.pmf[s:]))

    def conditional_backhaul(self, z: int) -> float:
        """E[T | Z = z]: satellite symbols needed when z symbols are cached."""
        return self.excess_mean(z - self.k)


@lru_cache(maxsize=256)
def overhead_law(k: int, q: int, tol: float = DEFAULT_TOL) -> OverheadLaw:
    return OverheadLaw(k, q, tol)


def sigma(k: int, delta: int, q: int) -> float:
    return overhead_law(k, q).sigma(delta)


def overhead_pmf(k: int, q: int, delta: int) -> float:
    return overhead_law(k, q).pmf_at(delta)


def expected_overhead(k: int, q: int, tol: float = DEFAULT_TOL) -> float:
    return overhead_law(k, q, tol).mean


def delta_u(q: int) -> float:
    """Closed-form upper bound on the mean overhead, valid for q >= 3."""
    if q <= 2:
        raise BoundUnavailable(f"overhead bound is undefined for q={q}")
    return (q - 1) / (q - 2) ** 2 * (1.0 - (q - 1) / q**2)


def zipf_pmf(n: int, alpha: float) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    w = np.arange(1, n + 1, dtype=float) ** -float(alpha)
    return w / w.sum()


def _placement(config: NetworkConfig, x: Sequence[int]) -> np.ndarray:
    arr = np.asarray(x)
    if arr.shape != (config.n,):
        raise ValueError(f"placement must have n={config.n} entries, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or not np.issubdtype(arr.dtype, np.integer)):
        raise ValueError("placement entries must be nonnegative integers")
    return arr.astype(np.int64)


def cache_deficit(k: int, gamma: Sequence[float], x: int) -> float:
    """sum_h gamma_h * (k - x*h)^+ : symbols still missing after the hub fetch."""
    return math.fsum(g * max(0, k - x * h) for h, g in enumerate(gamma, start=1))


def pmf_Z(config: NetworkConfig, x: Sequence[int]) -> dict[int, float]:
    """Distribution of the number of cached symbols a requesting user reaches."""
    arr = _placement(config, x)
    p = zipf_pmf(config.n, config.alpha)
    mass: dict[int, float] = {}
    for j in range(config.n):
        for h, g in enumerate(config.gamma, start=1):
            if g == 0.0:
                continue
            z = int(arr[j]) * h
            mass[z] = mass.get(z, 0.0) + float(p[j]) * g
    return dict(sorted(mass.items()))


def pmf_T_given_Z(k: int, q: int, z: int, t: int, tol: float = DEFAULT_TOL) -> float:
    law = overhead_law(k, q, tol)
    if t < 0 or z < 0:
        return 0.0
    if z > k and t == 0:
        # decoding may already succeed on the cached symbols alone
        return 1.0 - law.failure(z - k)
    return law.pmf_at(z - k + t)


@dataclass(frozen=True)
class RateReport:
    """Expected backhaul symbols per request and its breakdown over files."""

    expected: float
    k: int
    bound: float | None
    per_file: np.ndarray

    @property
    def normalized(self) -> float:
        return self.expected / self.k

    @property
    def normalized_bound(self) -> float | None:
        return None if self.bound is None else self.bound / self.k


def expected_backhaul(config: NetworkConfig, x: Sequence[int], tol: float = DEFAULT_TOL) -> RateReport:
    """Exact E[T] for an LRFC placement.

    Evaluated as the sum of the z <= k part,
    (E[Delta] + k) Pr{Z <= k} - sum_{z<=k} z P_Z(z), and the z > k part,
    sum_{z>k} P_Z(z) sum_{d >= z-k} (d + k - z) pmf(d).
    """
    arr = _placement(config, x)
    k = config.k
    law = overhead_law(k, config.q, tol)
    pz = pmf_Z(config, arr)

    low_mass = sum(m for z, m in pz.items() if z <= k)
    low_first_moment = sum(z * m for z, m in pz.items() if z <= k)
    low_part = (law.mean + k) * low_mass - low_first_moment
    high_part = 0.0
    for z, m in pz.items():
        if z > k:
            s = z - k
            tail = law.pmf[s:] if s <= law.horizon else np.empty(0)
            d = np.arange(s, s + len(tail))
            high_part += m * (float(np.dot(d, tail)) + (k - z) * float(tail.sum()))

    p = zipf_pmf(config.n, config.alpha)
    cond = {}
    per_file = np.empty(config.n)
    for j in range(config.n):
        xj = int(arr[j])
        if xj not in cond:
            cond[xj] = sum(g * law.conditional_backhaul(xj * h) for h, g in enumerate(config.gamma, 1))
        per_file[j] = p[j] * cond[xj]

    bound = backhaul_upper_bound(config, arr) if config.q > 2 else None
    return RateReport(low_part + high_part, k, bound, per_file)


def backhaul_upper_bound(config: NetworkConfig, x: Sequence[int]) -> float:
    """delta_u + k Pr{Z <= k} - sum_{z<=k} z P_Z(z)."""
    arr = _placement(config, x)
    du = delta_u(config.q)
    p = zipf_pmf(config.n, config.alpha)
    return du + float(sum(p[j] * cache_deficit(config.k, config.gamma, int(arr[j])) for j in range(config.n)))


def mds_expected_backhaul(config: NetworkConfig, x: Sequence[int]) -> RateReport:
    """E[T] for an ideal MDS code, where any k distinct symbols decode."""
    arr = _placement(config, x)
    if arr.size and arr.max() > config.k:
        raise ValueError(f"an MDS placement caches at most k={config.k} symbols per file")
    p = zipf_pmf(config.n, config.alpha)
    per_file = np.array([p[j] * cache_deficit(config.k, config.gamma, int(arr[j])) for j in range(config.n)])
    total = math.fsum(per_file)
    return RateReport(total, config.k, total, per_file)
