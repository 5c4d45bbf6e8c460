"""Monte Carlo estimation of expected spectral distributions, mean sup-norm
deviations and tail probabilities, next to the closed-form bounds they are
checked against.

Determinism contract: every estimate is a pure function of (matrix, k,
mode, n_samples, master_seed).  Sample i draws its subset from its own
derived stream, per-subset spectra are cached by index set (identical
submatrices solve to bit-identical spectra, so the cache cannot change any
number), and all reductions run in sample-index order.  Worker threads only
parallelize the per-subset eigensolves; they never touch the reduction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .linalg import DenseMatrix, JACOBI_MAX_SWEEPS, JACOBI_TOL, Spectrum, is_hermitian
from .oracle import DEFAULT_ENUMERATION_CAP, exact_F, subset_count
from .sampling import PRNG_NAME, SeedPlan, SubsetSample, random_k_subset, subset_spectrum
from .spectra import StepCdf, esd, sup_distance

QUANTILE_PROBS = (0.5, 0.9, 0.99)


def supnorm_tail_bound(k: int, r: float) -> float:
    """Closed-form tail bound min(1, 12 sqrt(k) exp(-r sqrt(k/8))) for the
    probability that the sup-norm deviation exceeds 1/sqrt(k) + r."""
    if k < 1 or r < 0:
        raise ValueError("need k >= 1 and r >= 0")
    return min(1.0, 12.0 * math.sqrt(k) * math.exp(-r * math.sqrt(k / 8.0)))


def supnorm_mean_bound(k: int) -> float:
    """Closed-form bound (13 + sqrt(8) log k) / sqrt(k) on the mean sup-norm
    deviation; reported raw even when it exceeds 1."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return (13.0 + math.sqrt(8.0) * math.log(k)) / math.sqrt(k)


def pointwise_tail_bound(k: int, r: float) -> float:
    """Closed-form one-point bound min(1, 6 exp(-r sqrt(k) / sqrt(8)))."""
    if k < 1 or r < 0:
        raise ValueError("need k >= 1 and r >= 0")
    return min(1.0, 6.0 * math.exp(-r * math.sqrt(k) / math.sqrt(8.0)))


@dataclass(frozen=True)
class TailCurve:
    """Empirical tail probabilities next to the closed-form bound on a grid."""

    r_grid: np.ndarray
    empirical: np.ndarray
    bound: np.ndarray
    n_samples: int

    def __post_init__(self) -> None:
        r = np.array(self.r_grid, dtype=np.float64)
        emp = np.array(self.empirical, dtype=np.float64)
        bnd = np.array(self.bound, dtype=np.float64)
        if not (r.size == emp.size == bnd.size) or r.size == 0:
            raise ValueError("grid and value sequences must share a positive length")
        if np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ValueError("r grid must be increasing and nonnegative")
        for name, arr in (("empirical", emp), ("bound", bnd)):
            if np.any(arr < 0) or np.any(arr > 1):
                raise ValueError(f"{name} values must lie in [0, 1]")
            if np.any(np.diff(arr) > 0):
                raise ValueError(f"{name} values must be nonincreasing in r")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        for name, arr in (("r_grid", r), ("empirical", emp), ("bound", bnd)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def stderr(self) -> np.ndarray:
        """Binomial standard error sqrt(p(1-p)/N) of each empirical point."""
        p = self.empirical
        return np.sqrt(p * (1.0 - p) / self.n_samples)

    def to_dict(self) -> dict:
        return {
            "r_grid": self.r_grid.tolist(),
            "empirical": self.empirical.tolist(),
            "bound": self.bound.tolist(),
            "n_samples": self.n_samples,
        }

    def to_csv(self) -> str:
        lines = ["r,empirical,bound,stderr"]
        for r, e, b, se in zip(self.r_grid, self.empirical, self.bound, self.stderr()):
            lines.append(f"{r:.17g},{e:.17g},{b:.17g},{se:.17g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EstimateReport:
    """Summary of one Monte Carlo run, keeping per-sample sup-norm values
    (not serialized) so tails can be computed afterwards."""

    mode: str
    n: int
    k: int
    n_samples: int
    master_seed: int
    f_hat: StepCdf
    mean_supnorm: float
    supnorm_quantiles: dict[float, float]
    metadata: str
    samples: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "k": self.k,
            "n_samples": self.n_samples,
            "master_seed": self.master_seed,
            "F_hat": {"jumps": self.f_hat.jumps.tolist(), "cum": self.f_hat.cum.tolist()},
            "mean_supnorm": self.mean_supnorm,
            "supnorm_quantiles": {str(p): v for p, v in self.supnorm_quantiles.items()},
            "metadata": self.metadata,
        }


def standard_metadata(extra: str = "") -> str:
    """PRNG and eigensolver identification embedded in every report."""
    base = (f"prng={PRNG_NAME};eigensolver=jacobi-cyclic;"
            f"jacobi_tol={JACOBI_TOL:g};jacobi_max_sweeps={JACOBI_MAX_SWEEPS}")
    return base + (";" + extra if extra else "")


def _draw_subsets(m: DenseMatrix, k: int, mode: str, n_samples: int,
                  master_seed: int, stream_offset: int = 0) -> list[tuple[int, ...]]:
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if mode == "eigen":
        scale = m.max_abs()
        if not is_hermitian(m, 1e-10 * (scale if scale > 0 else 1.0)):
            raise ValueError("not Hermitian")
    elif mode != "singular":
        raise ValueError(f"unknown mode {mode!r}; expected 'eigen' or 'singular'")
    plan = SeedPlan(master_seed)
    n = m.rows
    return [random_k_subset(n, k, plan.stream(stream_offset + i)).indices
            for i in range(n_samples)]


def _solve_distinct(m: DenseMatrix, mode: str, subsets: list[tuple[int, ...]],
                    n: int, threads: int) -> dict[tuple[int, ...], Spectrum]:
    distinct = list(dict.fromkeys(subsets))

    def solve(indices: tuple[int, ...]) -> Spectrum:
        return subset_spectrum(m, SubsetSample(indices, n), mode)

    if threads > 1 and len(distinct) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            spectra = list(pool.map(solve, distinct))
    else:
        spectra = [solve(s) for s in distinct]
    return dict(zip(distinct, spectra))


def _average_esd(spectra: dict[tuple[int, ...], Spectrum],
                 subsets: list[tuple[int, ...]]) -> StepCdf:
    """Equal-weight average of the per-sample ESDs via exact value counts."""
    counts: dict[tuple[int, ...], int] = {}
    for s in subsets:
        counts[s] = counts.get(s, 0) + 1
    all_values = np.concatenate([spectra[s].values for s in counts])
    all_weights = np.concatenate(
        [np.full(spectra[s].count, c, dtype=np.float64) for s, c in counts.items()])
    uniq, inverse = np.unique(all_values, return_inverse=True)
    per_value = np.bincount(inverse, weights=all_weights, minlength=uniq.size)
    cum = np.cumsum(per_value) / (len(subsets) * spectra[subsets[0]].count)
    cum[-1] = 1.0
    return StepCdf(uniq, cum)


def estimate_F(m: DenseMatrix, k: int, mode: str, n_samples: int,
               master_seed: int, threads: int = 1, stream_offset: int = 0) -> StepCdf:
    """Equal-weight average of the sampled submatrix ESDs.

    `stream_offset` shifts the per-sample stream indices, so a run of
    N1 + N2 samples splits exactly into runs over streams [0, N1) and
    [N1, N1 + N2).
    """
    subsets = _draw_subsets(m, k, mode, n_samples, master_seed, stream_offset)
    spectra = _solve_distinct(m, mode, subsets, m.rows, threads)
    return _average_esd(spectra, subsets)


def estimate_supnorm(m: DenseMatrix, k: int, mode: str, n_samples: int,
                     master_seed: int, reference: StepCdf,
                     threads: int = 1, metadata_note: str = "") -> EstimateReport:
    """Monte Carlo law of the sup-norm distance between sampled ESDs and a
    caller-supplied reference CDF, plus the averaged F_hat."""
    subsets = _draw_subsets(m, k, mode, n_samples, master_seed)
    spectra = _solve_distinct(m, mode, subsets, m.rows, threads)
    distances = {s: sup_distance(esd(spec), reference) for s, spec in spectra.items()}
    samples = np.array([distances[s] for s in subsets], dtype=np.float64)
    mean = math.fsum(samples.tolist()) / n_samples
    ordered = np.sort(samples)
    quantiles = {p: float(ordered[max(0, math.ceil(p * n_samples) - 1)])
                 for p in QUANTILE_PROBS}
    f_hat = _average_esd(spectra, subsets)
    samples.setflags(write=False)
    return EstimateReport(
        mode=mode, n=m.rows, k=k, n_samples=n_samples, master_seed=master_seed,
        f_hat=f_hat, mean_supnorm=mean, supnorm_quantiles=quantiles,
        metadata=standard_metadata(metadata_note), samples=samples)


def empirical_tail(report: EstimateReport, r_grid: np.ndarray) -> TailCurve:
    """Fraction of samples at or above 1/sqrt(k) + r, next to the closed-form
    bound, for every r in the grid."""
    r = np.array(r_grid, dtype=np.float64)
    thresholds = 1.0 / math.sqrt(report.k) + r
    empirical = np.array(
        [np.count_nonzero(report.samples >= t) / report.n_samples for t in thresholds])
    bound = np.array([supnorm_tail_bound(report.k, float(ri)) for ri in r])
    return TailCurve(r, empirical, bound, report.n_samples)


def compare_tail(curve: TailCurve) -> list[dict]:
    """Grid points where the empirical tail exceeds the bound by more than
    three binomial standard errors; an empty list is a pass."""
    stderr = curve.stderr()
    violations = []
    for i in range(curve.r_grid.size):
        if curve.empirical[i] > curve.bound[i] + 3.0 * stderr[i]:
            violations.append({
                "r": float(curve.r_grid[i]),
                "empirical": float(curve.empirical[i]),
                "bound": float(curve.bound[i]),
                "stderr": float(stderr[i]),
            })
    return violations


def choose_reference(m: DenseMatrix, k: int, mode: str, n_samples: int,
                     master_seed: int, cap: int = DEFAULT_ENUMERATION_CAP,
                     threads: int = 1) -> tuple[StepCdf, str]:
    """Reference CDF for tail experiments: the exact expected CDF when full
    enumeration fits under the cap, otherwise an independent-seed estimate
    with ten times the samples.  Returns the CDF and a metadata note."""
    if subset_count(m.rows, k) <= cap:
        return exact_F(m, k, mode, cap), "reference=exact_F"
    independent_seed = SeedPlan(master_seed).seed_for(2**32)
    ref = estimate_F(m, k, mode, 10 * n_samples, independent_seed, threads)
    return ref, f"reference=estimate_F(samples={10 * n_samples},seed={independent_seed})"
