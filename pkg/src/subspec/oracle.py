"""Exact, exhaustive small-scale computations.

Everything here enumerates all C(n, k) subsets, so results are exact laws
rather than estimates.  The enumeration refuses to run past a configurable
cap instead of silently subsampling; callers who outgrow it should switch
to the Monte Carlo estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .linalg import DenseMatrix
from .sampling import SubsetSample, subset_spectrum
from .spectra import StepCdf, esd, quantile_grid, sup_distance

DEFAULT_ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True)
class ExactDistribution:
    """Exact finite law: strictly increasing values with positive probabilities."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        probs = np.array(self.probs, dtype=np.float64)
        if values.ndim != 1 or probs.ndim != 1 or values.size != probs.size or values.size == 0:
            raise ValueError("values and probs must be 1-D of equal positive length")
        if np.any(np.diff(values) <= 0):
            raise ValueError("values must be strictly increasing")
        if np.any(probs <= 0):
            raise ValueError("probabilities must be positive")
        if abs(math.fsum(probs.tolist()) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        values.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    def mean(self) -> float:
        return math.fsum((self.values * self.probs).tolist())

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(((self.values - mu) ** 2 * self.probs).tolist())

    def tail_prob(self, threshold: float) -> float:
        """Exact probability of a value >= threshold."""
        return math.fsum(self.probs[self.values >= threshold].tolist())

    def to_csv(self) -> str:
        lines = ["value,probability"]
        for v, p in zip(self.values, self.probs):
            lines.append(f"{v:.17g},{p:.17g}")
        return "\n".join(lines) + "\n"


def subset_count(n: int, k: int) -> int:
    return math.comb(n, k)


def enumerate_subsets(n: int, k: int,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[SubsetSample]:
    """All C(n, k) subsets of {1..n} in lexicographic order."""
    if not 1 <= k <= n:
        raise ValueError("k out of range")
    count = math.comb(n, k)
    if count > cap:
        raise ValueError(
            f"subset count C({n},{k}) = {count} exceeds the enumeration cap {cap}; "
            "use the Monte Carlo estimators instead")
    return (SubsetSample(combo, n) for combo in combinations(range(1, n + 1), k))


def _merge_counts(values: np.ndarray, counts: np.ndarray,
                  extra: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    stacked = np.concatenate([values] + extra)
    weights = np.concatenate([counts, np.ones(sum(a.size for a in extra))])
    uniq, inverse = np.unique(stacked, return_inverse=True)
    summed = np.bincount(inverse, weights=weights, minlength=uniq.size)
    return uniq, summed


def exact_F(m: DenseMatrix, k: int, mode: str = "eigen",
            cap: int = DEFAULT_ENUMERATION_CAP) -> StepCdf:
    """The expected spectral distribution as an exact equal-weight average
    over every subset's submatrix ESD."""
    n = m.rows
    total = math.comb(n, k)
    values = np.empty(0)
    counts = np.empty(0)
    buffer: list[np.ndarray] = []
    buffered = 0
    for s in enumerate_subsets(n, k, cap):
        spec = subset_spectrum(m, s, mode)
        buffer.append(spec.values)
        buffered += spec.count
        if buffered >= 100_000:
            values, counts = _merge_counts(values, counts, buffer)
            buffer, buffered = [], 0
    if buffer:
        values, counts = _merge_counts(values, counts, buffer)
    cum = np.cumsum(counts) / (total * k)
    cum[-1] = 1.0
    return StepCdf(values, cum)


def exact_supnorm_distribution(m: DenseMatrix, k: int, mode: str = "eigen",
                               cap: int = DEFAULT_ENUMERATION_CAP) -> ExactDistribution:
    """Exact law of the sup-norm distance between a uniform subset's ESD and
    the exact expected CDF."""
    reference = exact_F(m, k, mode, cap)
    n = m.rows
    total = math.comb(n, k)
    distances = np.empty(total, dtype=np.float64)
    for i, s in enumerate(enumerate_subsets(n, k, cap)):
        distances[i] = sup_distance(esd(subset_spectrum(m, s, mode)), reference)
    uniq, counts = np.unique(distances, return_counts=True)
    return ExactDistribution(uniq, counts / total)


@dataclass(frozen=True)
class PointwiseProfile:
    """Per-subset CDF evaluations F_A(x) on a grid, with the exact mean F(x).

    fa has one row per subset (lexicographic order) and one column per x.
    """

    xs: np.ndarray
    f: np.ndarray
    fa: np.ndarray

    def tail(self, x_index: int, r: float) -> float:
        """Exact probability that |F_A(x) - F(x)| >= r at grid point x_index."""
        dev = np.abs(self.fa[:, x_index] - self.f[x_index])
        return float(np.count_nonzero(dev >= r)) / self.fa.shape[0]


def exact_pointwise_profile(m: DenseMatrix, k: int, xs: Sequence[float],
                            mode: str = "eigen",
                            cap: int = DEFAULT_ENUMERATION_CAP) -> PointwiseProfile:
    xs_arr = np.array(xs, dtype=np.float64)
    n = m.rows
    total = math.comb(n, k)
    fa = np.empty((total, xs_arr.size), dtype=np.float64)
    for i, s in enumerate(enumerate_subsets(n, k, cap)):
        spec = subset_spectrum(m, s, mode)
        fa[i] = np.searchsorted(spec.values, xs_arr, side="right") / spec.count
    f = fa.sum(axis=0) / total
    return PointwiseProfile(xs_arr, f, fa)


def exact_pointwise_tail(m: DenseMatrix, k: int, x: float, r: float,
                         mode: str = "eigen",
                         cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Exact probability that |F_A(x) - F(x)| >= r under a uniform subset."""
    return exact_pointwise_profile(m, k, [x], mode, cap).tail(0, r)


def hypergeometric_pmf(n: int, d: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact pmf of the count of marked items among k draws without
    replacement from n items of which d are marked.

    Computed from exact integer binomials with one float division per
    atom, so each probability is correctly rounded.
    """
    if not (0 <= d <= n and 1 <= k <= n):
        raise ValueError("need 0 <= d <= n and 1 <= k <= n")
    h_min = max(0, k - (n - d))
    h_max = min(k, d)
    hs = np.arange(h_min, h_max + 1)
    denom = math.comb(n, k)
    probs = np.array([math.comb(d, h) * math.comb(n - d, k - h) / denom for h in hs])
    return hs, probs


def halfones_exact_mean(n: int, k: int) -> float:
    """Exact mean sup-norm deviation for the half-ones diagonal matrix.

    With d = floor(n/2) ones on the diagonal and H the hypergeometric count
    of selected ones, the deviation of a subset's ESD from the expected CDF
    is |d/n - H/k| exactly, so the mean is a finite hypergeometric sum.
    """
    if not 1 <= k <= n:
        raise ValueError("k out of range")
    d = n // 2
    hs, probs = hypergeometric_pmf(n, d, k)
    deviations = np.abs(d / n - hs / k)
    return math.fsum((probs * deviations).tolist())


def chaining_check(f: StepCdf, g: StepCdf, l: int) -> bool:
    """Discretization bound: sup|G - F| <= 1/l + Delta with Delta measured on
    the l-quantile grid of F (right values and left limits)."""
    if l < 2:
        raise ValueError("l must be at least 2")
    ts = quantile_grid(f, l)
    delta_right = np.abs(g.eval_many(ts) - f.eval_many(ts))
    delta_left = np.abs(g.eval_many(ts, left=True) - f.eval_many(ts, left=True))
    delta = float(max(delta_right.max(), delta_left.max()))
    return sup_distance(g, f) <= 1.0 / l + delta + 1e-12
