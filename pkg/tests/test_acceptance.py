"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one `[PASS]/[FAIL] criterion N` line (run pytest with -s to
see them live).  The Monte Carlo criteria share module-scoped experiment
runs; everything is seeded, so this module is deterministic end to end.
"""

import json
import math
import time

import numpy as np
import pytest

from rmtgaps import cli, hermite, loggas, skewlin
from rmtgaps.experiments import ExperimentConfig, run_experiment

WORKERS = 2
SEED = 20240801


def criterion(num: int, ok: bool, detail: str):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    assert ok, f"criterion {num}: {detail}"


# ---------------------------------------------------------------------------
# shared Monte Carlo batches


@pytest.fixture(scope="module")
def gap_law_run():
    cfg = ExperimentConfig(
        kind="smallest-gap-law",
        n=1000,
        trials=4000,
        base_seed=SEED,
        k_max=3,
        workers=WORKERS,
        reproducible=True,
    )
    t0 = time.perf_counter()
    report = run_experiment(cfg, write_files=False)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="module")
def poisson_run():
    cfg = ExperimentConfig(
        kind="poisson-counts",
        n=1000,
        trials=4000,
        base_seed=SEED,
        interval=(0.0, 2.0),
        workers=WORKERS,
        reproducible=True,
    )
    return run_experiment(cfg, write_files=False)


@pytest.fixture(scope="module")
def successive_run():
    cfg = ExperimentConfig(
        kind="successive-gaps",
        n=500,
        trials=20_000,
        base_seed=SEED,
        c0=1.0,
        workers=WORKERS,
        reproducible=True,
    )
    return run_experiment(cfg, write_files=False)


@pytest.fixture(scope="module")
def crosscheck_run():
    cfg = ExperimentConfig(
        kind="sampler-crosscheck",
        n=200,
        trials=2000,
        gap_law_trials=100_000,
        base_seed=SEED,
        workers=WORKERS,
        reproducible=True,
    )
    return run_experiment(cfg, write_files=False)


# ---------------------------------------------------------------------------
# exact machinery


def test_criterion_1_partition_identity():
    t0 = time.perf_counter()
    rows = loggas.partition_identity_report(14)
    elapsed = time.perf_counter() - t0
    worst = max(r[3] for r in rows)
    criterion(
        1,
        worst < 1e-8 and elapsed < 5.0,
        f"max |4^k ratio - 1| = {worst:.3e} over {len(rows)} cells in {elapsed:.2f}s",
    )


def test_criterion_2_closed_form_consistency():
    worst = max(
        abs(loggas.partition_general(n, 0) - loggas.gn_closed(n)) / loggas.gn_closed(n)
        for n in range(1, 15)
    )
    spots = (
        abs(loggas.gn_closed(1) - math.sqrt(2 * math.pi)) < 1e-12
        and abs(loggas.gn_closed(2) - 4 * math.sqrt(math.pi)) < 1e-12
        and abs(loggas.gn_closed(3) - 3 * 2**1.5 * math.pi) < 1e-12
    )
    criterion(2, worst < 1e-8 and spots, f"max relative deviation {worst:.3e} for n <= 14")


def test_criterion_3_quadrature_crosscheck():
    exact = 1.5 * math.sqrt(2.0) * math.pi
    val = loggas.integrate_constrained(3, loggas.GapConstraint(1, 0.1), 1)
    rel1 = abs(val - exact) / exact
    rel2 = abs(val - loggas.gn_closed(3) / 4.0) / (loggas.gn_closed(3) / 4.0)
    criterion(3, rel1 < 1e-3 and rel2 < 1e-3, f"two-charge value off by {rel1:.2e} / {rel2:.2e}")


def test_criterion_4_pfaffian_property_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)

    def skew(n):
        x = rng.uniform(-1, 1, (n, n))
        return x - x.T

    e_sq = e_cong = e_scale = e_exact = 0.0
    for _ in range(100):
        x = skew(2 * int(rng.integers(1, 6)))
        pf = skewlin.pfaffian_numeric(x)
        e_sq = max(e_sq, abs(pf * pf - np.linalg.det(x)) / max(abs(np.linalg.det(x)), 1e-300))
    for _ in range(100):
        n = 2 * int(rng.integers(1, 5))
        x, b = skew(n), rng.uniform(-1, 1, (n, n))
        lhs = skewlin.pfaffian_numeric(b.T @ x @ b)
        rhs = np.linalg.det(b) * skewlin.pfaffian_numeric(x)
        e_cong = max(e_cong, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    for _ in range(100):
        n = 2 * int(rng.integers(1, 6))
        x = skew(n)
        pf = skewlin.pfaffian_numeric(x)
        for lam in (-2.0, 0.5, 3.0):
            e_scale = max(
                e_scale,
                abs(skewlin.pfaffian_numeric(lam * x) - lam ** (n // 2) * pf)
                / max(abs(lam ** (n // 2) * pf), 1e-300),
            )
    for _ in range(100):
        x = skew(2 * int(rng.integers(1, 7)))
        a, b = skewlin.pfaffian_exact(x), skewlin.pfaffian_numeric(x)
        e_exact = max(e_exact, abs(a - b) / max(abs(a), 1e-300))
    elapsed = time.perf_counter() - t0
    ok = e_sq < 1e-9 and e_cong < 1e-8 and e_scale < 1e-10 and e_exact < 1e-10 and elapsed < 10.0
    criterion(
        4,
        ok,
        f"square {e_sq:.1e}, congruence {e_cong:.1e}, scaling {e_scale:.1e}, "
        f"exact-vs-numeric {e_exact:.1e} in {elapsed:.2f}s",
    )


def test_criterion_5_hermite_suite():
    defect = hermite.orthonormality_defect(30, 64)

    worst53 = worst909 = 0.0
    for n in range(2, 13, 2):
        t = loggas.coefficient_tables(n)
        pfb = skewlin.pfaffian_numeric(t.beta)
        p = skewlin.pfaffian_poly(t.beta, t.alpha, n // 2)
        dn = np.array([float(c) for c in loggas.dn_poly(n)])
        lhs = np.zeros(n + 1)
        lhs[::2] = p * pfb
        worst53 = max(worst53, float(np.max(np.abs(lhs - dn)) / np.max(np.abs(dn))))

        corner = np.zeros((n, n))
        corner[: n - 1, : n - 1] = loggas.coefficient_tables(n - 1).beta
        p2 = skewlin.pfaffian_poly(corner, t.alpha, n // 2)
        rhs = np.zeros(n + 1)
        rhs[1:] = 2.0 * np.array([float(c) for c in loggas.dn_poly(n - 1)])
        lhs2 = np.zeros(n + 1)
        lhs2[: 2 * p2.size : 2] = p2 * pfb
        worst909 = max(worst909, float(np.max(np.abs(lhs2 - rhs)) / np.max(np.abs(rhs))))

    recurrence_ok = True
    for n in range(1, 40):
        lhs_r = loggas.dn_poly(n + 1)
        rhs_r = [0] + [2 * c for c in loggas.dn_poly(n)]
        for i, c in enumerate(loggas.dn_poly(n - 1)):
            rhs_r[i] += 2 * n * c
        recurrence_ok &= lhs_r == rhs_r  # integer arithmetic: exact beats 1e-12

    ok = defect < 1e-10 and worst53 < 1e-8 and worst909 < 1e-8 and recurrence_ok
    criterion(
        5,
        ok,
        f"defect {defect:.1e}, det identities {worst53:.1e}/{worst909:.1e}, recurrence exact={recurrence_ok}",
    )


def test_criterion_6_energy_and_sandwiches():
    rng = np.random.default_rng(2)
    violations = 0
    for _ in range(1000):
        m = int(rng.integers(0, 11))
        roots = rng.uniform(-3.0, 3.0, m)
        lhs, rhs = hermite.derivative_energy_pair(roots, m + 1)
        violations += lhs > rhs

    sandwich_ok = True
    detail = []
    for n in (2, 3):
        upper = loggas.integrate_constrained(n, loggas.GapConstraint(1, 1.0), 1)
        for c in (0.05, 0.1):
            ratio = loggas.integrate_constrained(n, loggas.GapConstraint(1, c), 0) / upper
            lo, hi = (1 - n * c * c) * c * c, c * c
            inside = lo * (1 - 1e-3) <= ratio <= hi * (1 + 1e-3)
            sandwich_ok &= inside
            detail.append(f"n={n},c={c}:{ratio:.3e} in [{lo:.3e},{hi:.3e}]")
    criterion(6, violations == 0 and sandwich_ok, f"violations={violations}; " + "; ".join(detail))


# ---------------------------------------------------------------------------
# Monte Carlo criteria


def test_criterion_7_smallest_gap_law(gap_law_run):
    report, elapsed = gap_law_run
    tau1 = report.results["tau_1"]
    ok = (
        tau1["ks_distance"] < 0.05
        and abs(tau1["mean"] - math.sqrt(math.pi) / 2.0) < 0.05
        and elapsed < 600.0
    )
    criterion(
        7,
        ok,
        f"KS={tau1['ks_distance']:.4f} (<0.05), mean={tau1['mean']:.4f} "
        f"(target {math.sqrt(math.pi) / 2:.4f} +- 0.05), wall={elapsed:.0f}s",
    )


def test_criterion_8_poisson_counts(poisson_run):
    r = poisson_run.results
    ok = r["chi_mean_passed"] and r["fm2_passed"] and r["gof_passed"]
    criterion(
        8,
        ok,
        f"mean={r['chi_mean']:.4f}+-{r['chi_mean_se']:.4f} (0.5), "
        f"fm2={r['fm2']:.4f}+-{r['fm2_se']:.4f} (0.25), gof p={r['gof_p']:.3f}",
    )


def test_criterion_9_no_successive_small_gaps(successive_run):
    r = successive_run.results
    criterion(
        9,
        successive_run.passed,
        f"P(lag-2 count > 0)={r['probability']:.2e} vs bound {r['bound']:.2e} + 3se",
    )


def test_criterion_10_sampler_crosscheck(crosscheck_run):
    r = crosscheck_run.results
    ok = r["two_sample_passed"] and r["gap_law_passed"]
    criterion(
        10,
        ok,
        f"two-sample p={r['two_sample_p']:.3f} (>0.01), "
        f"2x2 law KS={r['gap_law_ks']:.4f} (<0.01) on {r['gap_law_trials']} trials",
    )


def test_criterion_11_higher_order_gap_laws(gap_law_run):
    report, _ = gap_law_run
    d2 = report.results["tau_2"]["ks_distance"]
    d3 = report.results["tau_3"]["ks_distance"]
    criterion(11, d2 < 0.07 and d3 < 0.07, f"KS tau_2={d2:.4f}, tau_3={d3:.4f} (<0.07)")


def test_criterion_12_determinism(tmp_path):
    loose = {"ks_max": {"1": 0.9}, "tau1_mean_tol": 0.9}
    out = tmp_path / "det"
    blobs = []
    for workers in (1, 4, 8):
        code = cli.main(
            [
                "experiment",
                "smallest-gap-law",
                "--n",
                "80",
                "--trials",
                "64",
                "--seed",
                "3",
                "--workers",
                str(workers),
                "--out",
                str(out),
                "--reproducible",
                "--config",
                str(_write_cfg(tmp_path, loose)),
            ]
        )
        assert code == 0
        blobs.append(
            (
                (out / "smallest-gap-law.csv").read_bytes(),
                (out / "smallest-gap-law.json").read_bytes(),
                (out / "smallest-gap-law_tau_1.svg").read_bytes(),
            )
        )
    ok = blobs[0] == blobs[1] == blobs[2]
    criterion(12, ok, "byte-identical CSV/JSON/SVG across workers 1, 4, 8 and re-runs")


def _write_cfg(tmp_path, thresholds):
    p = tmp_path / "loose.json"
    p.write_text(json.dumps({"thresholds": thresholds}))
    return p
