"""Step-CDF algebra: spectral distribution functions and their sup-norm geometry.

A StepCdf is right-continuous: its value at x is the cumulative weight of
all jumps at or below x.  Sup-norm distances between step functions are
exact, not grid-sampled: the supremum over the whole real line is attained
either at a jump of one of the two functions or immediately to its left,
so it suffices to compare right values and left limits on the union of the
jump sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import Spectrum

_CUM_TOL = 1e-12


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous step distribution function with finitely many jumps.

    `jumps` are the strictly increasing jump locations; `cum[i]` is the
    function value at and immediately after `jumps[i]`.  The value below
    the first jump is 0 and `cum[-1]` is 1 up to 1e-12.
    """

    jumps: np.ndarray
    cum: np.ndarray

    def __post_init__(self) -> None:
        jumps = np.array(self.jumps, dtype=np.float64)
        cum = np.array(self.cum, dtype=np.float64)
        if jumps.ndim != 1 or cum.ndim != 1 or jumps.size != cum.size or jumps.size == 0:
            raise ValueError("jumps and cum must be 1-D sequences of equal positive length")
        if not (np.all(np.isfinite(jumps)) and np.all(np.isfinite(cum))):
            raise ValueError("StepCdf entries must be finite")
        if np.any(np.diff(jumps) <= 0):
            raise ValueError("jump locations must be strictly increasing")
        if np.any(np.diff(cum) < 0):
            raise ValueError("cumulative values must be nondecreasing")
        if not cum[0] > 0:
            raise ValueError("first cumulative value must be positive")
        if abs(float(cum[-1]) - 1.0) > _CUM_TOL:
            raise ValueError("last cumulative value must be 1 within 1e-12")
        jumps.setflags(write=False)
        cum.setflags(write=False)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "cum", cum)

    def eval(self, x: float) -> float:
        """Right-continuous value at x."""
        idx = int(np.searchsorted(self.jumps, x, side="right"))
        return float(self.cum[idx - 1]) if idx > 0 else 0.0

    def eval_left(self, x: float) -> float:
        """Left limit at x: the value just below x."""
        idx = int(np.searchsorted(self.jumps, x, side="left"))
        return float(self.cum[idx - 1]) if idx > 0 else 0.0

    def eval_many(self, xs: np.ndarray, left: bool = False) -> np.ndarray:
        idx = np.searchsorted(self.jumps, xs, side="left" if left else "right")
        out = np.where(idx > 0, self.cum[np.maximum(idx - 1, 0)], 0.0)
        return out


@dataclass(frozen=True)
class KsResult:
    """Two-sample Kolmogorov-Smirnov outcome.

    `lam` is the statistic scaled by sqrt(a*b/(a+b)); the JSON field name
    is "lambda".
    """

    statistic: float
    lam: float
    p_value: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.statistic <= 1.0):
            raise ValueError("statistic must lie in [0, 1]")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError("p-value must lie in [0, 1]")
        if self.statistic == 0.0 and self.p_value < 1.0 - 1e-12:
            raise ValueError("zero statistic must give p-value 1")

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "lambda": self.lam, "p_value": self.p_value}


def esd(s: Spectrum) -> StepCdf:
    """Empirical spectral distribution: mass 1/count at each spectrum value."""
    uniq, counts = np.unique(s.values, return_counts=True)
    cum = np.cumsum(counts) / s.count
    cum[-1] = 1.0
    return StepCdf(uniq, cum)


def sup_distance(f: StepCdf, g: StepCdf) -> float:
    """Exact sup over the real line of |F - G| for two step CDFs."""
    xs = np.union1d(f.jumps, g.jumps)
    right = np.abs(f.eval_many(xs) - g.eval_many(xs))
    left = np.abs(f.eval_many(xs, left=True) - g.eval_many(xs, left=True))
    return float(max(right.max(), left.max()))


def average_cdfs(cdfs: Sequence[StepCdf], weights: Sequence[float]) -> StepCdf:
    """Weighted mixture of step CDFs; the jump set is the union of the inputs'."""
    if len(cdfs) == 0:
        raise ValueError("need at least one CDF")
    if len(weights) != len(cdfs):
        raise ValueError("weights and CDFs must have equal length")
    w = np.array(weights, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if abs(math.fsum(weights) - 1.0) > _CUM_TOL:
        raise ValueError("weights must sum to 1 within 1e-12")
    xs = None
    for f in cdfs:
        xs = f.jumps if xs is None else np.union1d(xs, f.jumps)
    values = np.zeros(xs.size, dtype=np.float64)
    columns = np.empty((len(cdfs), xs.size), dtype=np.float64)
    for i, f in enumerate(cdfs):
        columns[i] = f.eval_many(xs)
    for j in range(xs.size):
        values[j] = math.fsum(w * columns[:, j])
    # zero-weight inputs can contribute union points before any actual mass
    first = int(np.searchsorted(values, 0.0, side="right"))
    return StepCdf(xs[first:], values[first:])


def kolmogorov_q(lam: float) -> float:
    """Tail function 2*sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lam^2), with Q(0) = 1.

    The alternating series is truncated once a term drops below 1e-12.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam == 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    j = 1
    while True:
        term = 2.0 * math.exp(-2.0 * j * j * lam * lam)
        if term < 1e-12:
            break
        total += sign * term
        sign = -sign
        j += 1
    return min(1.0, max(0.0, total))


def ks_two_sample(f: StepCdf, g: StepCdf, a: int, b: int) -> KsResult:
    """Two-sample KS test between empirical CDFs with sample sizes a and b."""
    if a < 1 or b < 1:
        raise ValueError("sample sizes must be at least 1")
    statistic = sup_distance(f, g)
    lam = math.sqrt(a * b / (a + b)) * statistic
    p = 1.0 if statistic == 0.0 else kolmogorov_q(lam)
    return KsResult(statistic=statistic, lam=lam, p_value=p)


def quantile_grid(f: StepCdf, l: int) -> np.ndarray:
    """Quantile points t_i = least jump with cumulative value >= i/l, i = 1..l-1."""
    if l < 2:
        raise ValueError("l must be at least 2")
    qs = np.arange(1, l) / l
    idx = np.searchsorted(f.cum, qs, side="left")
    return f.jumps[np.minimum(idx, f.jumps.size - 1)].copy()


def cdf_to_csv(f: StepCdf) -> str:
    lines = ["x,F"]
    for x, c in zip(f.jumps, f.cum):
        lines.append(f"{x:.17g},{c:.17g}")
    return "\n".join(lines) + "\n"


def cdf_from_csv(text: str) -> StepCdf:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].strip() != "x,F":
        raise ValueError("CDF CSV must start with header 'x,F'")
    jumps = []
    cum = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'x,F' pair, found {len(parts)} fields")
        try:
            jumps.append(float(parts[0]))
            cum.append(float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: unparsable number") from exc
    return StepCdf(np.array(jumps), np.array(cum))
