"""Command-line entry point.

Subcommands: gen, estimate, pair, verify, oracle, ks.  Exit codes: 0 on
success, 1 when a computation or verification fails, 2 for usage and
configuration errors.  All outputs are UTF-8 text; JSON and CSV numbers are
printed with 17 significant digits so reruns with the same configuration
are byte-identical (the thread count is an execution detail and is
deliberately excluded from emitted configs).
"""

from __future__ import annotations

import argparse
import json as _json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from statistics import median
from typing import Sequence

import numpy as np

from . import walk
from .ensembles import (EnsembleSpec, half_ones_diagonal, make_matrix, random_symmetric,
                        rw_covariance, save_matrix)
from .linalg import DenseMatrix, Spectrum
from .montecarlo import (choose_reference, compare_tail, empirical_tail, estimate_supnorm,
                         pointwise_tail_bound, standard_metadata, supnorm_mean_bound,
                         supnorm_tail_bound)
from .oracle import (DEFAULT_ENUMERATION_CAP, chaining_check, exact_F,
                     exact_pointwise_profile, exact_supnorm_distribution, subset_count)
from .sampling import SeedPlan, random_k_subset, subset_spectrum
from .spectra import StepCdf, cdf_from_csv, esd, ks_two_sample

_ENSEMBLES = {
    "rw-covariance": "rw_covariance",
    "half-ones": "half_ones",
    "random-gaussian": "random_symmetric_gaussian",
    "random-pm1": "random_symmetric_pm1",
}


class UsageError(Exception):
    """Configuration problem; maps to exit code 2."""


def _fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def _to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    child = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{child}{_json.dumps(str(key))}: {_to_json(value, indent + 1)}"
                for key, value in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = list(obj)
        if not items:
            return "[]"
        rows = [f"{child}{_to_json(value, indent + 1)}" for value in items]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return _json.dumps(str(obj))


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_matrix(args: argparse.Namespace) -> tuple[DenseMatrix, dict]:
    if getattr(args, "matrix", None):
        m = make_matrix(EnsembleSpec(kind="file", path=args.matrix))
        return m, {"matrix": args.matrix}
    kind = _ENSEMBLES.get(getattr(args, "ensemble", None) or "")
    if kind is None:
        raise UsageError("need --matrix PATH or --ensemble NAME")
    if args.n is None or args.n < 1:
        raise UsageError("--ensemble requires a positive --n")
    spec = EnsembleSpec(kind=kind, n=args.n, seed=getattr(args, "matrix_seed", 0))
    desc = {"ensemble": args.ensemble, "n": args.n}
    if kind.startswith("random"):
        desc["matrix_seed"] = spec.seed
    return make_matrix(spec), desc


def _r_grid(args: argparse.Namespace) -> np.ndarray:
    if args.r_points < 2 or args.r_max <= args.r_min or args.r_min < 0:
        raise UsageError("need 0 <= r-min < r-max and at least two r-points")
    return np.linspace(args.r_min, args.r_max, args.r_points)


def cmd_gen(args: argparse.Namespace) -> int:
    kind = _ENSEMBLES.get(args.ensemble)
    if kind is None:
        raise UsageError(f"unknown ensemble {args.ensemble!r}")
    if args.n < 1:
        raise UsageError("--n must be positive")
    matrix = make_matrix(EnsembleSpec(kind=kind, n=args.n, seed=args.seed))
    save_matrix(matrix, args.out)
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    matrix, matrix_desc = _resolve_matrix(args)
    if not 1 <= args.k <= matrix.rows:
        raise UsageError("k must satisfy 1 <= k <= n")
    r_grid = _r_grid(args)
    reference, ref_note = choose_reference(matrix, args.k, args.mode, args.samples,
                                           args.seed, args.cap, args.threads)
    report = estimate_supnorm(matrix, args.k, args.mode, args.samples, args.seed,
                              reference, threads=args.threads, metadata_note=ref_note)
    curve = empirical_tail(report, r_grid)
    violations = compare_tail(curve)
    if args.format == "csv":
        _emit(curve.to_csv(), args.out)
        return 0
    doc = {
        "config": {
            "subcommand": "estimate", **matrix_desc, "k": args.k, "mode": args.mode,
            "n_samples": args.samples, "master_seed": args.seed,
            "r_grid": {"min": args.r_min, "max": args.r_max, "points": args.r_points},
            "enumeration_cap": args.cap,
        },
        "report": report.to_dict(),
        "mean_bound": supnorm_mean_bound(args.k),
        "tail_curve": curve.to_dict(),
        "tail_violations": violations,
    }
    _emit(_to_json(doc) + "\n", args.out)
    return 0


def _truncated_esd(spectrum: Spectrum, exclude_top: int) -> StepCdf:
    kept = spectrum.values[: spectrum.count - exclude_top]
    return esd(Spectrum(kept))


def cmd_pair(args: argparse.Namespace) -> int:
    matrix, matrix_desc = _resolve_matrix(args)
    n = matrix.rows
    if not 1 <= args.k <= n:
        raise UsageError("k must satisfy 1 <= k <= n")
    if not 0 <= args.exclude_top < args.k:
        raise UsageError("exclude-top must satisfy 0 <= exclude_top < k")
    if args.pairs < 1:
        raise UsageError("pairs must be positive")
    plan = SeedPlan(args.seed)
    k_eff = args.k - args.exclude_top

    def one_pair(p: int) -> tuple[StepCdf, StepCdf, object]:
        sample_a = random_k_subset(n, args.k, plan.stream(2 * p))
        sample_b = random_k_subset(n, args.k, plan.stream(2 * p + 1))
        cdf_a = _truncated_esd(subset_spectrum(matrix, sample_a, args.mode),
                               args.exclude_top)
        cdf_b = _truncated_esd(subset_spectrum(matrix, sample_b, args.mode),
                               args.exclude_top)
        return cdf_a, cdf_b, ks_two_sample(cdf_a, cdf_b, k_eff, k_eff)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            computed = list(pool.map(one_pair, range(args.pairs)))
    else:
        computed = [one_pair(p) for p in range(args.pairs)]
    results = [ks for _, _, ks in computed]
    first_pair_cdfs = (computed[0][0], computed[0][1])
    ds = sorted(r.statistic for r in results)
    share = sum(1 for r in results if r.p_value >= 0.05) / args.pairs
    summary = {
        "pairs": args.pairs,
        "median_D": median(ds),
        "frac_p_ge_0.05": share,
        "D_quantiles": {str(q): ds[max(0, math.ceil(q * len(ds)) - 1)]
                        for q in (0.1, 0.25, 0.5, 0.75, 0.9)},
    }
    if args.format == "csv":
        lines = ["pair,D,lambda,p"]
        for i, r in enumerate(results):
            lines.append(f"{i},{_fmt_float(r.statistic)},{_fmt_float(r.lam)},"
                         f"{_fmt_float(r.p_value)}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    doc = {
        "config": {
            "subcommand": "pair", **matrix_desc, "k": args.k, "mode": args.mode,
            "exclude_top": args.exclude_top, "pairs": args.pairs,
            "master_seed": args.seed,
        },
        "metadata": standard_metadata(),
        "summary": summary,
        "pairs": [r.to_dict() for r in results],
        "first_pair": {
            "cdf_a": {"jumps": first_pair_cdfs[0].jumps.tolist(),
                      "cum": first_pair_cdfs[0].cum.tolist()},
            "cdf_b": {"jumps": first_pair_cdfs[1].jumps.tolist(),
                      "cum": first_pair_cdfs[1].cum.tolist()},
            "ks_sample_size": k_eff,
        },
    }
    _emit(_to_json(doc) + "\n", args.out)
    return 0


def _spectrum_grid(matrix: DenseMatrix, k: int, mode: str, points: int) -> np.ndarray:
    full = exact_F(matrix, k, mode)
    lo, hi = float(full.jumps[0]), float(full.jumps[-1])
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, points)


def run_verification(n_values: Sequence[int], corrupt: bool = False,
                     rng_seed: int = 20260808) -> dict:
    """The inequality suite: kernel sanity, spectral gap, one-step norm
    budget, gap concentration, rank steps, exact tails, chaining."""
    checks: list[dict] = []

    def record(name: str, measured: float, required: float, ok: bool, **extra) -> None:
        checks.append({"check": name, "measured": measured, "required": required,
                       "pass": bool(ok), **extra})

    for n in n_values:
        kernel = walk.kernel_matrix(n)
        if corrupt:
            kernel = kernel.copy()
            kernel[0, 1] *= 1.5
        row_err, rev_err, inv_err = walk.kernel_errors(kernel)
        record(f"kernel-validity-n{n}", max(row_err, rev_err, inv_err), 1e-14,
               max(row_err, rev_err, inv_err) <= 1e-14,
               row_sum_error=row_err, reversibility_error=rev_err,
               invariance_error=inv_err)
        gap_tol = 1e-7 if n >= 6 else 1e-8
        gap = walk.spectral_gap(n)
        record(f"spectral-gap-n{n}", abs(gap - 2.0 / n), gap_tol,
               abs(gap - 2.0 / n) <= gap_tol, gap=gap, gap_theory=2.0 / n)

        matrices = {
            "rw-covariance": rw_covariance(n),
            "half-ones": half_ones_diagonal(n),
            "random": random_symmetric(n, 101, "gaussian"),
        }
        r_grid = np.linspace(0.0, 5.0, 26)
        rng = np.random.default_rng(rng_seed + n)
        for label, matrix in matrices.items():
            for k in range(2, n):
                xs = _spectrum_grid(matrix, k, "eigen", 20)
                worst = walk.verify_triple_norm_bound(matrix, k, xs)
                record(f"one-step-norm-n{n}-k{k}-{label}", worst, 4.0,
                       worst <= 4.0 + 1e-9)
                mid = xs[len(xs) // 2]
                f = walk.esd_observable(matrix, k, float(mid))
                ok = True
                worst_excess = 0.0
                for signed in (f, walk.FunctionOnSn(n, -f.values)):
                    for row in walk.verify_gap_concentration(signed, r_grid, gap):
                        worst_excess = max(worst_excess, row["measure"] - row["bound"])
                        ok = ok and row["pass"]
                record(f"gap-concentration-n{n}-k{k}-{label}", worst_excess, 0.0, ok)

                violations = 0
                worst_gap = 0.0
                for _ in range(40):
                    perm = tuple(int(v) for v in rng.permutation(n))
                    i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
                    rank_diff, f_gap = walk.rank_step_check(matrix, k, perm, (i, j))
                    worst_gap = max(worst_gap, f_gap)
                    if rank_diff > 2 or f_gap > 2.0 / k + 1e-12:
                        violations += 1
                record(f"rank-step-n{n}-k{k}-{label}", violations, 0.0,
                       violations == 0, worst_esd_gap=worst_gap)

            for k in range(1, min(4, n - 1) + 1):
                dist = exact_supnorm_distribution(matrix, k)
                tail_violations = sum(
                    1 for r in r_grid
                    if dist.tail_prob(1.0 / math.sqrt(k) + float(r)) >
                    supnorm_tail_bound(k, float(r)))
                mean_ok = dist.mean() <= supnorm_mean_bound(k)
                record(f"exact-supnorm-tail-n{n}-k{k}-{label}", tail_violations, 0.0,
                       tail_violations == 0 and mean_ok, mean=dist.mean(),
                       mean_bound=supnorm_mean_bound(k))
                xs = _spectrum_grid(matrix, k, "eigen", 8)
                profile = exact_pointwise_profile(matrix, k, xs)
                pw_violations = sum(
                    1 for xi in range(xs.size) for r in r_grid
                    if profile.tail(xi, float(r)) > pointwise_tail_bound(k, float(r)))
                record(f"exact-pointwise-tail-n{n}-k{k}-{label}", pw_violations, 0.0,
                       pw_violations == 0)

    rng = np.random.default_rng(rng_seed)
    chain_violations = 0
    for _ in range(200):
        f = esd(Spectrum(np.sort(rng.standard_normal(rng.integers(1, 9)))))
        g = esd(Spectrum(np.sort(rng.standard_normal(rng.integers(1, 9)))))
        for l in range(2, 13):
            if not chaining_check(f, g, l):
                chain_violations += 1
    record("chaining", chain_violations, 0.0, chain_violations == 0)

    return {"n_values": list(n_values), "corrupt": corrupt,
            "metadata": standard_metadata(),
            "walk_reports": [walk.verify_kernel(n).to_dict() for n in n_values],
            "checks": checks, "pass": all(c["pass"] for c in checks)}


def cmd_verify(args: argparse.Namespace) -> int:
    for n in args.n:
        if not 2 <= n <= 6:
            raise UsageError("verify supports n between 2 and 6")
    report = run_verification(args.n, corrupt=args.self_test_corrupt)
    _emit(_to_json(report) + "\n", args.out)
    return 0 if report["pass"] else 1


def cmd_oracle(args: argparse.Namespace) -> int:
    matrix, matrix_desc = _resolve_matrix(args)
    if not 1 <= args.k <= matrix.rows:
        raise UsageError("k must satisfy 1 <= k <= n")
    if subset_count(matrix.rows, args.k) > args.cap:
        raise UsageError(
            f"subset count C({matrix.rows},{args.k}) exceeds the enumeration cap "
            f"{args.cap}; use the Monte Carlo estimate subcommand instead")
    dist = exact_supnorm_distribution(matrix, args.k, args.mode, args.cap)
    if args.format == "csv":
        _emit(dist.to_csv(), args.out)
        return 0
    reference = exact_F(matrix, args.k, args.mode, args.cap)
    doc = {
        "config": {
            "subcommand": "oracle", **matrix_desc, "k": args.k, "mode": args.mode,
            "enumeration_cap": args.cap,
        },
        "metadata": standard_metadata(),
        "exact_F": {"jumps": reference.jumps.tolist(), "cum": reference.cum.tolist()},
        "supnorm_distribution": {"values": dist.values.tolist(),
                                 "probabilities": dist.probs.tolist()},
        "mean_supnorm": dist.mean(),
        "mean_bound": supnorm_mean_bound(args.k),
    }
    if args.x is not None:
        profile = exact_pointwise_profile(matrix, args.k, args.x, args.mode, args.cap)
        r_grid = np.linspace(0.0, 1.0, 21)
        doc["pointwise"] = [
            {"x": float(x), "F": float(profile.f[i]),
             "tails": [{"r": float(r), "probability": profile.tail(i, float(r)),
                        "bound": pointwise_tail_bound(args.k, float(r))}
                       for r in r_grid]}
            for i, x in enumerate(profile.xs)]
    _emit(_to_json(doc) + "\n", args.out)
    return 0


def cmd_ks(args: argparse.Namespace) -> int:
    with open(args.cdf_a, "r", encoding="utf-8") as fh:
        cdf_a = cdf_from_csv(fh.read())
    with open(args.cdf_b, "r", encoding="utf-8") as fh:
        cdf_b = cdf_from_csv(fh.read())
    result = ks_two_sample(cdf_a, cdf_b, args.na, args.nb)
    if args.format == "csv":
        _emit("D,lambda,p\n"
              f"{_fmt_float(result.statistic)},{_fmt_float(result.lam)},"
              f"{_fmt_float(result.p_value)}\n", args.out)
        return 0
    doc = {"config": {"subcommand": "ks", "cdf_a": args.cdf_a, "cdf_b": args.cdf_b,
                      "na": args.na, "nb": args.nb},
           "result": result.to_dict()}
    _emit(_to_json(doc) + "\n", args.out)
    return 0


def _add_matrix_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--matrix", help="path to a matrix file")
    sub.add_argument("--ensemble", choices=sorted(_ENSEMBLES),
                     help="built-in matrix family")
    sub.add_argument("--n", type=int, help="matrix order for --ensemble")
    sub.add_argument("--matrix-seed", type=int, default=0,
                     help="seed for random ensembles")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subspec",
        description="Spectral distributions of random submatrices: estimates, "
                    "exact oracles, and inequality verification.")
    default_threads = int(os.environ.get("SUBSPEC_THREADS", "1"))
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen", help="write a matrix file")
    p.add_argument("ensemble", choices=sorted(_ENSEMBLES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("estimate", help="Monte Carlo spectral-distribution estimate")
    _add_matrix_options(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("eigen", "singular"), default="eigen")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=default_threads)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=2.0)
    p.add_argument("--r-points", type=int, default=41)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("pair", help="KS-compare spectra of random submatrix pairs")
    _add_matrix_options(p)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--mode", choices=("eigen", "singular"), default="eigen")
    p.add_argument("--exclude-top", type=int, default=4)
    p.add_argument("--pairs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=default_threads)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("verify", help="run the inequality verification suite")
    p.add_argument("--n", type=int, nargs="+", default=[3, 4, 5])
    p.add_argument("--self-test-corrupt", action="store_true",
                   help="inject a kernel corruption to prove the checks can fail")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact enumeration dumps")
    _add_matrix_options(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("eigen", "singular"), default="eigen")
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    p.add_argument("--x", type=float, nargs="+",
                   help="evaluation points for pointwise tails")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("ks", help="two-sample KS test between two CDF CSV files")
    p.add_argument("cdf_a")
    p.add_argument("cdf_b")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ks)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"subspec: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"subspec: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
