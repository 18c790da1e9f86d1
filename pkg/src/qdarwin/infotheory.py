"""Entropies, mutual information, partial-information curves and redundancy.

All entropies are in bits.  For a pure global state every entropy is taken
from the Schmidt spectrum on the smaller side of the relevant cut.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSystem,
    InvalidDensity,
    NeverReached,
    OverlappingParts,
    TooFewSizes,
)
from .hilbert import (
    DensityOperator,
    FragmentSelection,
    StateVector,
    SubsystemLayout,
    entropy_bits,
    entropy_of_kept,
)

DEFAULT_DELTA = 0.1
DEFAULT_MAX_EXHAUSTIVE = 10_000
DEFAULT_MC_SAMPLES = 200


def von_neumann_entropy(rho: DensityOperator | np.ndarray) -> float:
    """-sum l lg l over the spectrum; eigenvalues below 1e-12 contribute nothing."""
    if not isinstance(rho, DensityOperator):
        m = np.asarray(rho, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise InvalidDensity(f"expected a square matrix, got shape {m.shape}")
        rho = DensityOperator(SubsystemLayout((m.shape[0],), ("system",)), m)
    return entropy_bits(rho.eigenvalues())


def mutual_information(state: StateVector, part_a: Sequence[int], part_b: Sequence[int]) -> float:
    """H_A + H_B - H_AB for two disjoint groups of subsystems of a pure state."""
    a = tuple(sorted(int(i) for i in part_a))
    b = tuple(sorted(int(i) for i in part_b))
    if not a or not b:
        raise OverlappingParts("both parts must be non-empty")
    if set(a) & set(b):
        raise OverlappingParts(f"parts {a} and {b} share subsystems")
    ab = tuple(sorted(a + b))
    return entropy_of_kept(state, a) + entropy_of_kept(state, b) - entropy_of_kept(state, ab)


def fragment_information(state: StateVector, fragment: FragmentSelection,
                         system_entropy: float | None = None) -> float:
    """I(S:F) for one fragment of the environment."""
    frag = fragment.validate(state.layout)
    if not frag:
        return 0.0
    s = state.layout.system_index
    h_s = entropy_of_kept(state, (s,)) if system_entropy is None else system_entropy
    return h_s + entropy_of_kept(state, frag) - entropy_of_kept(state, tuple(sorted(frag + (s,))))


@dataclass(frozen=True, eq=False)
class PartialInfoCurve:
    """Fragment-averaged I(S:F_m) for m = 0..N; all per-size arrays have length N + 1."""

    n_env: int
    system_entropy: float
    m: np.ndarray
    f: np.ndarray
    sample_count: np.ndarray
    exhaustive: np.ndarray
    I_mean: np.ndarray
    I_std: np.ndarray
    I_min: np.ndarray
    I_max: np.ndarray

    def rows(self):
        for i in range(self.n_env + 1):
            yield (int(self.m[i]), float(self.f[i]), int(self.sample_count[i]),
                   float(self.I_mean[i]), float(self.I_std[i]),
                   float(self.I_min[i]), float(self.I_max[i]))


def fragment_seed(seed: int, m: int, sample: int) -> np.random.Generator:
    """Generator for one Monte-Carlo fragment, independent of evaluation order."""
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), m, sample]))


def fragments_of_size(n_env: int, m: int, max_exhaustive: int, mc_samples: int,
                      seed: int) -> tuple[list[tuple[int, ...]], bool]:
    """Fragments (as positions into the env list) to average over at size m."""
    if math.comb(n_env, m) <= max_exhaustive:
        return list(itertools.combinations(range(n_env), m)), True
    frags = []
    for k in range(mc_samples):
        rng = fragment_seed(seed, m, k)
        frags.append(tuple(sorted(int(x) for x in rng.choice(n_env, size=m, replace=False))))
    return frags, False


def partial_information_plot(state: StateVector, max_exhaustive: int = DEFAULT_MAX_EXHAUSTIVE,
                             mc_samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
                             workers: int = 1) -> PartialInfoCurve:
    """I(S:F_m) averaged over fragments of each size m = 0..N.

    Sizes with at most ``max_exhaustive`` fragments are enumerated; larger ones
    use ``mc_samples`` uniformly random fragments seeded per (m, sample).
    ``workers > 1`` evaluates fragments on a thread pool; results do not
    depend on it.
    """
    layout = state.layout
    envs = layout.env_indices
    n = len(envs)
    if n < 1:
        raise TooFewSizes("the state has no environment subsystems")
    if max_exhaustive < 1 or mc_samples < 1:
        raise ValueError("max_exhaustive and mc_samples must be positive")
    s = layout.system_index
    h_s = entropy_of_kept(state, (s,))

    def info(frag: tuple[int, ...]) -> float:
        if not frag:
            return 0.0
        pos = tuple(envs[i] for i in frag)
        f_sorted = tuple(sorted(pos))
        sf = tuple(sorted(pos + (s,)))
        return h_s + entropy_of_kept(state, f_sorted) - entropy_of_kept(state, sf)

    per_size = [fragments_of_size(n, m, max_exhaustive, mc_samples, seed) for m in range(n + 1)]
    flat = [frag for frags, _ in per_size for frag in frags]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(info, flat, chunksize=32))
    else:
        values = [info(frag) for frag in flat]

    means, stds, mins, maxs, counts, exh = [], [], [], [], [], []
    pos = 0
    for frags, exhaustive in per_size:
        v = np.array(values[pos:pos + len(frags)])
        pos += len(frags)
        means.append(v.mean())
        stds.append(v.std())
        mins.append(v.min())
        maxs.append(v.max())
        counts.append(len(frags))
        exh.append(exhaustive)
    m = np.arange(n + 1)
    return PartialInfoCurve(
        n_env=n, system_entropy=h_s, m=m, f=m / n,
        sample_count=np.array(counts), exhaustive=np.array(exh),
        I_mean=np.array(means), I_std=np.array(stds),
        I_min=np.array(mins), I_max=np.array(maxs))


@dataclass(frozen=True)
class RedundancyResult:
    delta: float
    system_entropy: float
    m_delta: int
    f_delta: float
    redundancy: float
    n_env: int


def redundancy(curve: PartialInfoCurve, delta: float = DEFAULT_DELTA) -> RedundancyResult:
    """Smallest fragment size supplying (1 - delta) H_S, and R_delta = N / m_delta."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    h_s = curve.system_entropy
    if h_s <= 1e-6:
        raise DegenerateSystem(f"system entropy {h_s:.3g} bits; redundancy is undefined")
    target = (1.0 - delta) * h_s
    hits = np.nonzero(curve.I_mean >= target)[0]
    if hits.size == 0:
        raise NeverReached(f"no fragment size reaches {target:.6g} bits")
    m_delta = int(curve.m[hits[0]])
    n = curve.n_env
    return RedundancyResult(delta=delta, system_entropy=h_s, m_delta=m_delta,
                            f_delta=m_delta / n, redundancy=n / m_delta, n_env=n)


def plateau_deviation(curve: PartialInfoCurve) -> float:
    """Mean |I(m) - H_S| over the middle sizes ceil(0.2 N) <= m <= floor(0.8 N)."""
    n = curve.n_env
    if n < 5:
        raise TooFewSizes(f"plateau deviation needs N >= 5, got {n}")
    lo, hi = -(-n // 5), (4 * n) // 5
    window = curve.I_mean[lo:hi + 1]
    return float(np.mean(np.abs(window - curve.system_entropy)))
