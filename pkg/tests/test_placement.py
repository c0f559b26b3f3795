import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrfc_cache.analysis import delta_u, expected_backhaul, zipf_pmf
from lrfc_cache.config import REFERENCE_GAMMA, NetworkConfig
from lrfc_cache.placement import (
    InfeasibleBudget,
    SearchSpaceTooLarge,
    count_allocations,
    greedy_allocation,
    iter_allocations,
    optimize_bound,
    optimize_exact,
    optimize_mds,
)

GAMMAS = [(1.0,), (0.5, 0.5), REFERENCE_GAMMA]


def exact_deficit(cfg, x):
    """sum_j p_j sum_h gamma_h (k - x_j h)^+ in rational arithmetic."""
    p = [Fraction(v) for v in zipf_pmf(cfg.n, cfg.alpha)]
    g = [Fraction(v) for v in cfg.gamma]
    return sum(p[j] * g[h - 1] * max(0, cfg.k - x[j] * h) for j in range(cfg.n) for h in range(1, len(g) + 1))


def brute_force_min(cfg, cap):
    best = None
    for x in itertools.product(range(cap + 1), repeat=cfg.n):
        if sum(x) == cfg.budget:
            v = exact_deficit(cfg, x)
            best = v if best is None or v < best else best
    return best


def test_two_file_example():
    cfg = NetworkConfig(n=2, k=2, M=1, q=4, alpha=math.log2(9))
    assert optimize_bound(cfg).x == (2, 0)
    assert optimize_mds(cfg).x == (2, 0)
    values = {x: exact_deficit(cfg, x) for x in [(0, 2), (1, 1), (2, 0)]}
    assert min(values, key=values.get) == (2, 0)


def test_uniform_popularity_gives_balanced_allocation():
    cfg = NetworkConfig(n=20, k=10, M=4, q=16, alpha=0)
    x = optimize_bound(cfg).x
    assert x == (2,) * 20
    assert optimize_mds(cfg).x == x


def test_zero_budget():
    cfg = NetworkConfig(n=6, k=4, M=0, q=8, alpha=0.7, gamma=REFERENCE_GAMMA)
    pl = optimize_bound(cfg)
    assert pl.x == (0,) * 6
    assert pl.objective == pytest.approx(delta_u(8) + 4)


def test_full_budget_fills_every_file():
    cfg = NetworkConfig(n=5, k=3, M=5, q=16, alpha=1.2, gamma=REFERENCE_GAMMA)
    assert optimize_bound(cfg).x == (3,) * 5
    ex = optimize_exact(cfg)
    assert ex.x == (3,) * 5


def test_single_file_forced():
    cfg = NetworkConfig(n=1, k=7, M=1, q=4)
    assert optimize_exact(cfg).x == (7,)
    assert optimize_bound(cfg).x == (7,)


def test_exact_versus_bound_gap_small_instance():
    cfg = NetworkConfig(n=2, k=3, M=1, q=16, alpha=2.0)
    assert zipf_pmf(2, 2.0) == pytest.approx([0.8, 0.2])
    assert count_allocations(2, 3, 3) == 4
    exact = optimize_exact(cfg)
    brute = min(
        (expected_backhaul(cfg, x).expected, x) for x in [(0, 3), (1, 2), (2, 1), (3, 0)]
    )
    assert exact.objective == pytest.approx(brute[0], abs=1e-15)
    bound_x = optimize_bound(cfg).x
    gap = expected_backhaul(cfg, bound_x).expected - exact.objective
    assert -1e-12 <= gap < 1e-3


def test_q2_objective_omits_overhead_constant():
    cfg = NetworkConfig(n=4, k=4, M=2, q=2, alpha=0.8)
    pl = optimize_bound(cfg)
    assert pl.objective_kind == "bound-without-delta_u"
    assert pl.x == optimize_bound(cfg.with_(q=128)).x
    assert pl.objective == pytest.approx(float(exact_deficit(cfg, pl.x)))


@pytest.mark.parametrize("q", [4, 16])
@pytest.mark.parametrize("gamma", GAMMAS)
@pytest.mark.parametrize("alpha", [0.0, 0.8, 2.0])
def test_greedy_matches_brute_force(q, gamma, alpha):
    for n in range(1, 5):
        for k in range(1, 5):
            for M in range(0, n + 1):
                cfg = NetworkConfig(n=n, k=k, M=M, q=q, alpha=alpha, gamma=gamma)
                pl = optimize_bound(cfg)
                assert sum(pl.x) == cfg.budget
                assert exact_deficit(cfg, pl.x) == brute_force_min(cfg, k)


def test_mds_and_bound_share_argmin():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 30))
        cfg = NetworkConfig(
            n=n, k=int(rng.integers(1, 12)), M=int(rng.integers(0, n + 1)), q=16,
            alpha=float(rng.uniform(0, 2)), gamma=REFERENCE_GAMMA,
        )
        b, m = optimize_bound(cfg), optimize_mds(cfg)
        assert b.x == m.x
        assert b.objective - m.objective == pytest.approx(delta_u(16))


@settings(max_examples=60)
@given(
    n=st.integers(1, 40),
    k=st.integers(1, 12),
    frac=st.floats(0, 1),
    alpha=st.floats(0, 3),
    gamma=st.sampled_from(GAMMAS),
)
def test_budget_and_popularity_order(n, k, frac, alpha, gamma):
    M = int(round(frac * n))
    cfg = NetworkConfig(n=n, k=k, M=M, q=8, alpha=alpha, gamma=gamma)
    x = optimize_bound(cfg).x
    p = zipf_pmf(n, alpha)
    assert sum(x) == M * k
    assert all(0 <= v <= k for v in x)
    for i in range(n):
        for j in range(n):
            if p[i] > p[j]:
                assert x[i] >= x[j]


def test_objective_monotone_in_budget_and_skew():
    base = NetworkConfig(n=30, k=10, q=16, alpha=0.8, gamma=REFERENCE_GAMMA)
    by_M = [optimize_bound(base.with_(M=M)).objective for M in range(0, 31)]
    assert all(b <= a + 1e-12 for a, b in zip(by_M, by_M[1:]))
    by_alpha = [optimize_bound(base.with_(M=5, alpha=a)).objective for a in np.linspace(0, 3, 13)]
    assert all(b <= a + 1e-12 for a, b in zip(by_alpha, by_alpha[1:]))


def test_headroom_spreads_leftover_budget():
    w = np.array([0.5, 0.3, 0.2])
    x = greedy_allocation(w, lambda v: max(0, 2 - v), budget=9, cap=3)
    assert x == (3, 3, 3)
    x = greedy_allocation(w, lambda v: max(0, 2 - v), budget=7, cap=3)
    assert x == (3, 2, 2)


def test_exact_with_headroom_never_worse():
    cfg = NetworkConfig(n=3, k=3, M=2, q=2, alpha=1.5, gamma=(1.0,))
    capped = optimize_exact(cfg)
    roomy = optimize_exact(cfg, headroom=2)
    assert roomy.objective <= capped.objective + 1e-15


def test_infeasible_and_guarded():
    with pytest.raises(InfeasibleBudget):
        greedy_allocation(np.ones(3), lambda v: -v, budget=10, cap=3)
    with pytest.raises(SearchSpaceTooLarge):
        optimize_exact(NetworkConfig(n=30, k=10, M=10, q=16), limit=1000)


@pytest.mark.parametrize("n,budget,cap", [(1, 3, 5), (3, 4, 2), (4, 6, 3), (2, 0, 0)])
def test_enumeration_matches_count(n, budget, cap):
    listed = list(iter_allocations(n, budget, cap))
    brute = [x for x in itertools.product(range(cap + 1), repeat=n) if sum(x) == budget]
    assert listed == brute
    assert count_allocations(n, budget, cap) == len(brute)
