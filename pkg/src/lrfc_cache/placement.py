"""Cache placement: how many coded symbols of each file every hub stores.

The bound objective and the MDS objective are both of the form
sum_j p_j c(x_j) with c convex and non-increasing, so granting the budget one
symbol at a time to the file with the largest marginal decrease is optimal.
The exact LRFC objective is minimized by exhaustive enumeration and serves as
a reference for small instances.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .analysis import DEFAULT_TOL, cache_deficit, delta_u, overhead_law, zipf_pmf
from .config import NetworkConfig

__all__ = [
    "InfeasibleBudget",
    "SearchSpaceTooLarge",
    "Placement",
    "greedy_allocation",
    "optimize_bound",
    "optimize_mds",
    "optimize_exact",
    "count_allocations",
    "iter_allocations",
]


class InfeasibleBudget(ValueError):
    pass


class SearchSpaceTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class Placement:
    """Per-file symbol counts with the objective they achieve.

    ``objective_kind`` is one of ``"bound"``, ``"bound-without-delta_u"``
    (q = 2, where the additive overhead constant does not exist),
    ``"mds"`` or ``"exact"``.
    """

    x: tuple[int, ...]
    objective: float
    objective_kind: str

    @property
    def total(self) -> int:
        return sum(self.x)

    def to_json(self) -> list[int]:
        return list(self.x)


def _check_budget(n: int, budget: int, cap: int) -> None:
    if budget < 0:
        raise InfeasibleBudget(f"negative budget {budget}")
    if budget > n * cap:
        raise InfeasibleBudget(f"budget of {budget} symbols exceeds n*cap = {n}*{cap}")


def greedy_allocation(
    weights: np.ndarray,
    cost: Callable[[int], float],
    budget: int,
    cap: int,
) -> tuple[int, ...]:
    """Minimize sum_j weights[j] * cost(x_j) subject to sum x = budget, 0 <= x_j <= cap.

    ``cost`` must have non-increasing decrements. Among equal gains the file
    holding fewer symbols wins, then the lowest index. Budget left once every
    decrement is zero is dealt out one symbol at a time in order of
    decreasing weight.
    """
    n = len(weights)
    _check_budget(n, budget, cap)
    decrement = [cost(x) - cost(x + 1) for x in range(cap)]
    x = [0] * n
    heap = [(-weights[j] * decrement[0], 0, j) for j in range(n)] if cap > 0 else []
    heapq.heapify(heap)
    left = budget
    while left and heap and -heap[0][0] > 0:
        _, _, j = heapq.heappop(heap)
        x[j] += 1
        left -= 1
        if x[j] < cap:
            heapq.heappush(heap, (-weights[j] * decrement[x[j]], x[j], j))

    order = sorted(range(n), key=lambda j: (-weights[j], j))
    while left:
        for j in order:
            if left and x[j] < cap:
                x[j] += 1
                left -= 1
    return tuple(x)


def _cap(config: NetworkConfig, headroom: int) -> int:
    if headroom < 0:
        raise ValueError("headroom must be >= 0")
    return config.k + headroom


def optimize_bound(config: NetworkConfig, headroom: int = 0) -> Placement:
    """Placement minimizing the closed-form upper bound on the LRFC backhaul rate."""
    cap = _cap(config, headroom)
    p = zipf_pmf(config.n, config.alpha)
    x = greedy_allocation(p, lambda v: cache_deficit(config.k, config.gamma, v), config.budget, cap)
    deficit = float(sum(p[j] * cache_deficit(config.k, config.gamma, x[j]) for j in range(config.n)))
    if config.q == 2:
        return Placement(x, deficit, "bound-without-delta_u")
    return Placement(x, delta_u(config.q) + deficit, "bound")


def optimize_mds(config: NetworkConfig) -> Placement:
    p = zipf_pmf(config.n, config.alpha)
    x = greedy_allocation(p, lambda v: cache_deficit(config.k, config.gamma, v), config.budget, config.k)
    value = float(sum(p[j] * cache_deficit(config.k, config.gamma, x[j]) for j in range(config.n)))
    return Placement(x, value, "mds")


def count_allocations(n: int, budget: int, cap: int) -> int:
    """Number of integer vectors in [0, cap]^n summing to ``budget`` (inclusion-exclusion)."""
    total = 0
    for i in range(n + 1):
        rest = budget - i * (cap + 1)
        if rest < 0:
            break
        total += (-1) ** i * math.comb(n, i) * math.comb(rest + n - 1, n - 1)
    return total


def iter_allocations(n: int, budget: int, cap: int) -> Iterator[tuple[int, ...]]:
    """All feasible placements in lexicographic order."""
    if n == 1:
        if 0 <= budget <= cap:
            yield (budget,)
        return
    for first in range(max(0, budget - (n - 1) * cap), min(cap, budget) + 1):
        for rest in iter_allocations(n - 1, budget - first, cap):
            yield (first, *rest)


def optimize_exact(
    config: NetworkConfig,
    headroom: int = 0,
    limit: int = 1_000_000,
    tol: float = DEFAULT_TOL,
) -> Placement:
    """Exhaustive minimizer of the exact LRFC backhaul rate.

    Among placements whose objectives agree to 1e-12 the lexicographically
    smallest wins.
    """
    cap = _cap(config, headroom)
    _check_budget(config.n, config.budget, cap)
    size = count_allocations(config.n, config.budget, cap)
    if size > limit:
        raise SearchSpaceTooLarge(f"{size} feasible placements exceed the limit of {limit}")
    law = overhead_law(config.k, config.q, tol)
    p = zipf_pmf(config.n, config.alpha)
    per_x = [sum(g * law.conditional_backhaul(v * h) for h, g in enumerate(config.gamma, 1)) for v in range(cap + 1)]

    best, best_val = None, math.inf
    for x in iter_allocations(config.n, config.budget, cap):
        val = float(sum(p[j] * per_x[v] for j, v in enumerate(x)))
        if val < best_val - 1e-12:
            best, best_val = x, val
    return Placement(best, best_val, "exact")
