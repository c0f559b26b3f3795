"""Monte Carlo ground truth for the caching analysis.

Randomness is organized in fixed-size chunks of trials. Chunk i draws from
``SeedSequence(seed, spawn_key=(i,))``, so a run is reproducible regardless
of how many worker processes share the chunks.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analysis import DEFAULT_TOL, backhaul_upper_bound, expected_backhaul, mds_expected_backhaul, zipf_pmf
from .config import NetworkConfig
from .gf import get_field
from .lrfc import CodedSymbol, DecoderState, InputBlock, encode_next, symbols_to_full_rank

__all__ = [
    "CHUNK",
    "GridGeometry",
    "Connectivity",
    "connectivity_distribution",
    "SimulationResult",
    "simulate_delivery",
    "CrossValidation",
    "crossvalidate",
    "chunk_rng",
]

CHUNK = 1 << 15


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass(frozen=True)
class GridGeometry:
    """Square hub lattice with spacing ``d`` and coverage radius ``r`` (km)."""

    r: float = 60.0
    d: float = 45.0

    def __post_init__(self) -> None:
        if self.r <= 0 or self.d <= 0:
            raise ValueError("radius and spacing must be positive")


@dataclass(frozen=True)
class Connectivity:
    """``pmf[h]`` = fraction of users covered by exactly h hubs, h = 0..H."""

    pmf: np.ndarray
    samples: int

    @property
    def uncovered(self) -> float:
        return float(self.pmf[0])

    @property
    def has_gaps(self) -> bool:
        return self.uncovered > 0

    def gamma(self) -> tuple[float, ...]:
        """Distribution over h >= 1, renormalized to the covered users."""
        covered = self.pmf[1:]
        if covered.sum() == 0:
            raise ValueError("no sample point is covered by any hub")
        return tuple(float(v) for v in covered / covered.sum())


def connectivity_distribution(
    geom: GridGeometry,
    samples: int = 1_000_000,
    seed: int | None = None,
) -> Connectivity:
    """Histogram of how many hubs lie within ``r`` of a uniformly placed user.

    Users are sampled over one d x d lattice cell and hubs repeat
    periodically, so border effects do not arise. With ``seed=None`` the
    samples are the midpoints of a regular sqrt(samples)^2 grid; otherwise
    they are drawn uniformly from a seeded stream.
    """
    d, r = geom.d, geom.r
    if seed is None:
        side = max(1, int(round(math.sqrt(samples))))
        ticks = (np.arange(side) + 0.5) * (d / side)
        px, py = (a.ravel() for a in np.meshgrid(ticks, ticks))
    else:
        rng = np.random.default_rng(seed)
        px, py = rng.uniform(0, d, samples), rng.uniform(0, d, samples)

    reach = int(math.ceil(r / d)) + 1
    counts = np.zeros(px.size, dtype=np.int64)
    for i in range(-reach, reach + 1):
        for j in range(-reach, reach + 1):
            counts += (px - i * d) ** 2 + (py - j * d) ** 2 <= r * r
    hist = np.bincount(counts)
    return Connectivity(hist / hist.sum(), int(px.size))


@dataclass
class SimulationResult:
    """Empirical backhaul statistics with the per-trial records.

    ``j`` and ``h`` are 1-based (file 1 is the most popular).
    """

    k: int
    mode: str
    j: np.ndarray
    h: np.ndarray
    z: np.ndarray
    t: np.ndarray
    mean: float = field(init=False)
    stderr: float = field(init=False)

    def __post_init__(self) -> None:
        self.mean = float(self.t.mean())
        n = self.t.size
        self.stderr = float(self.t.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan

    @property
    def trials(self) -> int:
        return int(self.t.size)

    @property
    def normalized(self) -> float:
        return self.mean / self.k

    @property
    def normalized_stderr(self) -> float:
        return self.stderr / self.k

    def records_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "j", "h", "z", "t"])
        for i, row in enumerate(zip(self.j.tolist(), self.h.tolist(), self.z.tolist(), self.t.tolist())):
            w.writerow([i, *row])
        return buf.getvalue()


def _simulate_chunk(args) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    config, x, mode, index, size, payload_len = args
    rng = chunk_rng(config.seed, index)
    p = zipf_pmf(config.n, config.alpha)
    j = rng.choice(config.n, size=size, p=p)
    h = rng.choice(len(config.gamma), size=size, p=np.asarray(config.gamma)) + 1
    z = x[j] * h
    k = config.k
    if mode == "mds":
        t = k - np.minimum(z, k)
    elif payload_len:
        t = np.array([_deliver_with_payload(k, config.q, int(zi), payload_len, rng) for zi in z])
    else:
        # hub and satellite symbols are i.i.d.; only the count to full rank matters
        needed = symbols_to_full_rank(k, config.q, size, rng)
        t = np.maximum(needed - z, 0)
    return j + 1, h, z, t


def _deliver_with_payload(k: int, q: int, z: int, payload_len: int, rng: np.random.Generator) -> int:
    """One request decoded end to end; returns the satellite symbol count."""
    block = InputBlock.random(k, payload_len, q, rng)
    state = DecoderState(k, get_field(q))
    for _ in range(z):
        state.absorb(encode_next(block, rng))
    t = 0
    while not state.full_rank:
        state.absorb(encode_next(block, rng))
        t += 1
    if state.solve() != block:
        raise AssertionError("decoded block differs from the source block")
    return t


def simulate_delivery(
    config: NetworkConfig,
    x: Sequence[int],
    mode: str = "lrfc",
    trials: int | None = None,
    workers: int = 1,
    payload_len: int = 0,
) -> SimulationResult:
    """Serve ``trials`` random requests and record the backhaul symbols each needs.

    ``payload_len > 0`` runs the full codec with random payloads instead of
    the rank-only fast path (LRFC mode only; much slower).
    """
    if mode not in ("lrfc", "mds"):
        raise ValueError(f"mode must be 'lrfc' or 'mds', got {mode!r}")
    arr = np.asarray(x, dtype=np.int64)
    if arr.shape != (config.n,) or (arr.size and arr.min() < 0):
        raise ValueError("placement must hold n nonnegative integers")
    if mode == "mds" and arr.max(initial=0) > config.k:
        raise ValueError("an MDS placement caches at most k symbols per file")
    total = config.trials if trials is None else trials
    if total < 1:
        raise ValueError("simulation needs at least one trial")
    jobs = []
    for index, start in enumerate(range(0, total, CHUNK)):
        jobs.append((config, arr, mode, index, min(CHUNK, total - start), payload_len))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, jobs))
    else:
        parts = [_simulate_chunk(job) for job in jobs]
    j, h, z, t = (np.concatenate(cols) for cols in zip(*parts))
    return SimulationResult(config.k, mode, j, h, z, t)


@dataclass(frozen=True)
class CrossValidation:
    mode: str
    analytic: float
    bound: float | None
    empirical: float
    stderr: float

    @property
    def z_score(self) -> float:
        diff = self.empirical - self.analytic
        if self.stderr == 0:
            return 0.0 if abs(diff) < 1e-12 else math.copysign(math.inf, diff)
        return diff / self.stderr

    @property
    def flagged(self) -> bool:
        return abs(self.z_score) > 3

    def row(self) -> dict:
        return {
            "mode": self.mode,
            "analytic": self.analytic,
            "bound": self.bound,
            "empirical": self.empirical,
            "stderr": self.stderr,
            "z": self.z_score,
            "flagged": self.flagged,
        }


def crossvalidate(
    config: NetworkConfig,
    x: Sequence[int],
    modes: Sequence[str] = ("lrfc",),
    trials: int | None = None,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> list[CrossValidation]:
    """Analytic E[T], its bound and the simulated mean side by side."""
    out = []
    for mode in modes:
        if mode == "lrfc":
            analytic = expected_backhaul(config, x, tol).expected
            bound = backhaul_upper_bound(config, x) if config.q > 2 else None
        else:
            analytic = mds_expected_backhaul(config, x).expected
            bound = None
        res = simulate_delivery(config, x, mode, trials=trials, workers=workers)
        out.append(CrossValidation(mode, analytic, bound, res.mean, res.stderr))
    return out
