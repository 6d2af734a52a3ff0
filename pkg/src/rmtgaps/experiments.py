"""Experiment orchestration: configs, parallel trial execution, aggregation.

Trials are embarrassingly parallel: each worker derives its streams from
(base_seed, trial_index) alone, returns plain row dicts, and the reducer
aggregates in trial order.  The aggregate is therefore bit-identical for
any worker count, which the determinism contract of the CLI relies on.

Statistical pass/fail thresholds live in the config (defaults below, taken
from the acceptance targets); the experiment code never hard-codes one.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, ensemble, gapstats, reports, svgplot

KINDS = (
    "smallest-gap-law",
    "poisson-counts",
    "factorial-moments",
    "successive-gaps",
    "sampler-crosscheck",
    "conjecture-beta",
)

# `sample` is not an experiment (no statistics), but reuses the config shape
ALL_KINDS = KINDS + ("sample",)

DEFAULT_THRESHOLDS = {
    "smallest-gap-law": {"ks_max": {"1": 0.05, "2": 0.07, "3": 0.07}, "tau1_mean_tol": 0.05},
    "poisson-counts": {"mean_sigmas": 3.0, "fm2_sigmas": 3.0, "gof_p_min": 0.01},
    "factorial-moments": {"sigmas": 3.0},
    "successive-gaps": {"sigmas": 3.0},
    "sampler-crosscheck": {"two_sample_p_min": 0.01, "gap_law_ks_max": 0.01},
    "conjecture-beta": {},
}

_HIST_BINS = 40


@dataclass
class ExperimentConfig:
    """Knobs of one experiment run, echoed verbatim into every output."""

    kind: str
    n: int = 1000
    beta: float = 1.0
    trials: int = 4000
    base_seed: int = 20240801
    interval: tuple = (0.0, 2.0)
    k_max: int = 1
    j_max: int = 2
    workers: int = 1
    out_dir: str = "out"
    reproducible: bool = False
    sampler: str = ensemble.SAMPLER_TRIDIAGONAL
    scaling: str = ensemble.SCALING_UNIT
    c0: float = 1.0
    gap_law_trials: int = 100_000
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        lo, hi = self.interval
        if not lo < hi:
            raise ValueError("interval must satisfy lo < hi")
        self.interval = (float(lo), float(hi))
        merged = dict(DEFAULT_THRESHOLDS.get(self.kind, {}))
        merged.update(self.thresholds)
        self.thresholds = merged

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        return d

    def echo_dict(self) -> dict:
        """Config as echoed into artifacts: everything that determines the
        results.  Worker count only schedules the same deterministic trials,
        so it is excluded to keep outputs byte-identical across pool sizes."""
        d = self.to_dict()
        del d["workers"]
        return d


@dataclass
class RunReport:
    """Aggregated results of one run plus the verbatim config echo."""

    command: str
    kind: str
    config: dict
    results: dict
    passed: bool
    wall_clock_seconds: object
    version: str = __version__
    schema_version: int = reports.SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# per-trial work (top level so process pools can pickle it)


def _trial_rows(cfg: ExperimentConfig, lo: int, hi: int) -> list:
    stream = ensemble.SeedStream(cfg.base_seed)
    kind = cfg.kind
    rows = []
    for t in range(lo, hi):
        if kind == "smallest-gap-law":
            s = _draw(cfg, stream, t)
            tau = gapstats.tau_sequence(s.values, cfg.k_max)
            rows.append({"trial": t, **{f"tau_{k + 1}": float(tau[k]) for k in range(cfg.k_max)}})
        elif kind == "poisson-counts":
            s = _draw(cfg, stream, t)
            lags = gapstats.chi_tilde_counts(s.values, cfg.interval, cfg.j_max)
            rows.append(
                {
                    "trial": t,
                    "chi": gapstats.chi_count(s.values, cfg.interval),
                    "chi_tilde": gapstats.chi_tilde_total(s.values, cfg.interval),
                    **{f"lag_{j + 1}": lags[j] for j in range(cfg.j_max)},
                }
            )
        elif kind == "factorial-moments":
            s = _draw(cfg, stream, t)
            rows.append(
                {"trial": t, "chi_tilde": gapstats.chi_tilde_total(s.values, cfg.interval)}
            )
        elif kind == "successive-gaps":
            s = _draw(cfg, stream, t)
            lag2 = gapstats.chi_tilde_counts(s.values, (0.0, cfg.c0), 2)[1]
            rows.append({"trial": t, "lag2_count": lag2})
        elif kind == "conjecture-beta":
            s = ensemble.sample_gbeta_tridiag(
                cfg.n, cfg.beta, stream, t, scaling=ensemble.SCALING_NSCALED
            )
            gaps = np.sort(np.diff(s.values))
            rows.append(
                {"trial": t, **{f"t_{k + 1}": float(gaps[k]) for k in range(cfg.k_max)}}
            )
        else:
            raise ValueError(f"no per-trial body for kind {kind!r}")
    return rows


def _crosscheck_rows(cfg: ExperimentConfig, part: str, lo: int, hi: int) -> list:
    stream = ensemble.SeedStream(cfg.base_seed)
    rows = []
    for t in range(lo, hi):
        if part == "dense_tau1":
            s = ensemble.sample_goe_dense(cfg.n, stream, t)
            rows.append({"part": part, "trial": t, "value": gapstats.kth_gap_tau(s.values, 1)})
        elif part == "tridiag_tau1":
            s = ensemble.sample_gbeta_tridiag(cfg.n, 1.0, stream, t)
            rows.append({"part": part, "trial": t, "value": gapstats.kth_gap_tau(s.values, 1)})
        elif part == "gap_law_n2":
            s = ensemble.sample_goe_dense(2, stream, t)
            rows.append({"part": part, "trial": t, "value": float(s.values[1] - s.values[0])})
        else:
            raise ValueError(part)
    return rows


def _draw(cfg: ExperimentConfig, stream, trial_index: int):
    if cfg.sampler == ensemble.SAMPLER_DENSE:
        return ensemble.sample_goe_dense(cfg.n, stream, trial_index)
    return ensemble.sample_gbeta_tridiag(cfg.n, cfg.beta, stream, trial_index, cfg.scaling)


def _pool_worker(args):
    cfg_dict, part, lo, hi = args
    cfg = ExperimentConfig(**cfg_dict)
    if part is None:
        return _trial_rows(cfg, lo, hi)
    return _crosscheck_rows(cfg, part, lo, hi)


def _parallel_rows(cfg: ExperimentConfig, part, total: int) -> list:
    """Chunked parallel map over trial indices; order-stable concatenation."""
    if cfg.workers == 1:
        return _pool_worker((cfg.to_dict(), part, 0, total))
    chunk = max(1, math.ceil(total / (cfg.workers * 4)))
    args = [
        (cfg.to_dict(), part, lo, min(lo + chunk, total)) for lo in range(0, total, chunk)
    ]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        parts = list(pool.map(_pool_worker, args))
    return [row for p in parts for row in p]


# ---------------------------------------------------------------------------
# aggregation per experiment kind


def _mean_se(x: np.ndarray) -> tuple:
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(np.mean(x)), se


def _agg_smallest_gap_law(cfg, rows):
    thr = cfg.thresholds
    results = {"trials": len(rows)}
    passed = True
    svgs = {}
    for k in range(1, cfg.k_max + 1):
        taus = np.array([r[f"tau_{k}"] for r in rows])
        emp = gapstats.EmpiricalDistribution.from_samples(taus)
        d, p = gapstats.ks_test(emp, lambda x, k=k: gapstats.limiting_tau_cdf(k, x))
        ks_max = thr["ks_max"].get(str(k))
        entry = {
            "ks_distance": d,
            "ks_p": p,
            "mean": float(np.mean(taus)),
        }
        if ks_max is not None:
            entry["ks_max"] = ks_max
            entry["ks_passed"] = bool(d < ks_max)
            passed &= entry["ks_passed"]
        if k == 1:
            expect = math.sqrt(math.pi) / 2.0
            tol = thr["tau1_mean_tol"]
            entry["mean_expected"] = expect
            entry["mean_tol"] = tol
            entry["mean_passed"] = bool(abs(entry["mean"] - expect) < tol)
            passed &= entry["mean_passed"]
        results[f"tau_{k}"] = entry
        svgs[f"tau_{k}.svg"] = svgplot.histogram_svg(
            taus,
            _HIST_BINS,
            title=f"normalized gap tau_{k}, n={cfg.n}, {len(rows)} trials",
            xlabel=f"tau_{k}",
            density_fn=lambda x, k=k: gapstats.limiting_tau_pdf(k, x),
        )
    return results, passed, svgs


def _agg_poisson_counts(cfg, rows):
    thr = cfg.thresholds
    chi = np.array([r["chi"] for r in rows], dtype=np.int64)
    chi_tilde = np.array([r["chi_tilde"] for r in rows], dtype=np.int64)
    mu = gapstats.poisson_intensity(cfg.interval)
    mean, se = _mean_se(chi.astype(np.float64))
    fm2_samples = chi_tilde * (chi_tilde - 1.0)
    fm2, fm2_se = _mean_se(fm2_samples)
    gof_p = gapstats.poisson_gof(chi, mu)
    mean_ok = abs(mean - mu) <= thr["mean_sigmas"] * se
    fm2_ok = abs(fm2 - mu * mu) <= thr["fm2_sigmas"] * fm2_se
    gof_ok = gof_p > thr["gof_p_min"]
    results = {
        "trials": len(rows),
        "intensity": mu,
        "chi_mean": mean,
        "chi_mean_se": se,
        "chi_mean_passed": bool(mean_ok),
        "fm2": fm2,
        "fm2_expected": mu * mu,
        "fm2_se": fm2_se,
        "fm2_passed": bool(fm2_ok),
        "gof_p": gof_p,
        "gof_passed": bool(gof_ok),
    }
    svgs = {
        "counts.svg": svgplot.histogram_svg(
            chi,
            int(np.max(chi)) + 1 if np.max(chi) > 0 else 2,
            title=f"window counts, n={cfg.n}, A={list(cfg.interval)}",
            xlabel="count",
        )
    }
    return results, bool(mean_ok and fm2_ok and gof_ok), svgs


def _agg_factorial_moments(cfg, rows):
    thr = cfg.thresholds
    chi_tilde = np.array([r["chi_tilde"] for r in rows], dtype=np.float64)
    lo, hi = cfg.interval
    base = (hi * hi - lo * lo) / 8.0
    results = {"trials": len(rows)}
    passed = True
    for k in range(1, cfg.k_max + 1):
        prod = np.ones_like(chi_tilde)
        for j in range(k):
            prod = prod * (chi_tilde - j)
        est, se = _mean_se(prod)
        expect = base**k
        ok = abs(est - expect) <= thr["sigmas"] * se if se > 0 else est == expect
        results[f"moment_{k}"] = {
            "estimate": est,
            "expected": expect,
            "se": se,
            "passed": bool(ok),
        }
        passed &= ok
    svgs = {
        "chi_tilde.svg": svgplot.histogram_svg(
            chi_tilde,
            int(np.max(chi_tilde)) + 1 if np.max(chi_tilde) > 0 else 2,
            title=f"all-lag window counts, n={cfg.n}",
            xlabel="count",
        )
    }
    return results, bool(passed), svgs


def _agg_successive_gaps(cfg, rows):
    thr = cfg.thresholds
    hits = np.array([1.0 if r["lag2_count"] > 0 else 0.0 for r in rows])
    p_hat = float(np.mean(hits))
    se = math.sqrt(p_hat * (1.0 - p_hat) / hits.size)
    bound = cfg.c0**4 / (8.0 * cfg.n)
    ok = p_hat <= bound + thr["sigmas"] * se
    results = {
        "trials": len(rows),
        "c0": cfg.c0,
        "probability": p_hat,
        "probability_se": se,
        "bound": bound,
        "passed": bool(ok),
    }
    svgs = {
        "lag2_counts.svg": svgplot.histogram_svg(
            np.array([r["lag2_count"] for r in rows]),
            max(int(max(r["lag2_count"] for r in rows)) + 1, 2),
            title=f"lag-2 window counts, n={cfg.n}, c0={cfg.c0}",
            xlabel="count",
        )
    }
    return results, bool(ok), svgs


def _agg_sampler_crosscheck(cfg, rows):
    thr = cfg.thresholds
    dense = np.array([r["value"] for r in rows if r["part"] == "dense_tau1"])
    tridiag = np.array([r["value"] for r in rows if r["part"] == "tridiag_tau1"])
    gaps2 = np.array([r["value"] for r in rows if r["part"] == "gap_law_n2"])
    d2, p2 = gapstats.ks_two_sample(
        gapstats.EmpiricalDistribution.from_samples(dense),
        gapstats.EmpiricalDistribution.from_samples(tridiag),
    )
    dg, pg = gapstats.ks_test(
        gapstats.EmpiricalDistribution.from_samples(gaps2),
        lambda s: 1.0 - math.exp(-s * s / 4.0),
    )
    two_ok = p2 > thr["two_sample_p_min"]
    gap_ok = dg < thr["gap_law_ks_max"]
    results = {
        "tau1_trials_each": int(dense.size),
        "two_sample_ks": d2,
        "two_sample_p": p2,
        "two_sample_passed": bool(two_ok),
        "gap_law_trials": int(gaps2.size),
        "gap_law_ks": dg,
        "gap_law_p": pg,
        "gap_law_passed": bool(gap_ok),
    }
    svgs = {
        "gap_law_n2.svg": svgplot.histogram_svg(
            gaps2,
            _HIST_BINS,
            title=f"2x2 eigenvalue gap, {gaps2.size} trials",
            xlabel="gap",
            density_fn=lambda s: 0.5 * s * math.exp(-s * s / 4.0),
        )
    }
    return results, bool(two_ok and gap_ok), svgs


def _agg_conjecture_beta(cfg, rows):
    """Exploratory: empirical scale by median matching, shape diagnostics only."""
    beta = cfg.beta
    expo = (beta + 2.0) / (beta + 1.0)
    results = {"trials": len(rows), "beta": beta, "exponent": expo, "exploratory": True}
    svgs = {}
    t1 = np.array([r["t_1"] for r in rows]) * cfg.n**expo
    median_target = math.log(2.0) ** (1.0 / (beta + 1.0))
    c_hat = median_target / float(np.median(t1))
    results["scale_estimate"] = c_hat
    for k in range(1, cfg.k_max + 1):
        tk = np.array([r[f"t_{k}"] for r in rows]) * cfg.n**expo * c_hat

        def cdf(x, k=k):
            if x <= 0:
                return 0.0
            y = x ** (beta + 1.0)
            tail = math.fsum(
                math.exp(-y + j * math.log(y) - math.lgamma(j + 1)) for j in range(k)
            )
            return min(1.0, max(0.0, 1.0 - tail))

        d, p = gapstats.ks_test(gapstats.EmpiricalDistribution.from_samples(tk), cdf)
        results[f"shape_ks_{k}"] = {"ks_distance": d, "ks_p": p}

        def pdf(x, k=k):
            if x <= 0:
                return 0.0
            return math.exp(
                math.log(beta + 1.0)
                + (k * (beta + 1.0) - 1.0) * math.log(x)
                - x ** (beta + 1.0)
                - math.lgamma(k)
            )

        svgs[f"scaled_gap_{k}.svg"] = svgplot.histogram_svg(
            tk,
            _HIST_BINS,
            title=f"scaled gap {k}, beta={beta}, n={cfg.n}",
            xlabel="scaled gap",
            density_fn=pdf,
        )
    return results, True, svgs


_AGGREGATORS = {
    "smallest-gap-law": _agg_smallest_gap_law,
    "poisson-counts": _agg_poisson_counts,
    "factorial-moments": _agg_factorial_moments,
    "successive-gaps": _agg_successive_gaps,
    "sampler-crosscheck": _agg_sampler_crosscheck,
    "conjecture-beta": _agg_conjecture_beta,
}


def run_experiment(cfg: ExperimentConfig, write_files: bool = True) -> RunReport:
    """Run all trials, aggregate, optionally write CSV/JSON/SVG artifacts."""
    t0 = time.perf_counter()
    if cfg.kind == "sampler-crosscheck":
        rows = []
        for part, total in (
            ("dense_tau1", cfg.trials),
            ("tridiag_tau1", cfg.trials),
            ("gap_law_n2", cfg.gap_law_trials),
        ):
            rows.extend(_parallel_rows(cfg, part, total))
    else:
        rows = _parallel_rows(cfg, None, cfg.trials)

    results, passed, svgs = _AGGREGATORS[cfg.kind](cfg, rows)
    wall = None if cfg.reproducible else time.perf_counter() - t0
    report = RunReport(
        command="experiment",
        kind=cfg.kind,
        config=cfg.echo_dict(),
        results=results,
        passed=bool(passed),
        wall_clock_seconds=wall,
    )
    if write_files:
        out = Path(cfg.out_dir)
        header = list(rows[0].keys())
        reports.write_csv(
            out / f"{cfg.kind}.csv",
            cfg.echo_dict(),
            __version__,
            header,
            ([r[h] for h in header] for r in rows),
            cfg.reproducible,
        )
        reports.write_json(out / f"{cfg.kind}.json", report.to_dict())
        for name, svg in svgs.items():
            path = out / f"{cfg.kind}_{name}"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(svg)
    return report


def write_spectra_csv(cfg: ExperimentConfig) -> Path:
    """Raw spectra export: one CSV row per trial with all sorted eigenvalues."""
    stream = ensemble.SeedStream(cfg.base_seed)
    out = Path(cfg.out_dir) / "spectra.csv"
    rows = []
    for t in range(cfg.trials):
        s = _draw(cfg, stream, t)
        rows.append([t, cfg.n, cfg.beta] + [float(v) for v in s.values])
    header = ["trial", "n", "beta"] + [f"lambda_{i + 1}" for i in range(cfg.n)]
    reports.write_csv(out, cfg.echo_dict(), __version__, header, rows, cfg.reproducible)
    return out
