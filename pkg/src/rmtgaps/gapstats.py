"""Gap observables of a sampled spectrum and their limiting laws.

Counts nearest-neighbor and lag-j gap statistics in a window A (always an
open interval of normalized gaps n*(lambda_{i+j} - lambda_i)), the ordered
tuples of disjoint close pairs, the cluster span, and the normalized k-th
smallest gaps tau_k = 2^{-3/2} n t_k whose limit law has density
2 x^{2k-1} e^{-x^2} / (k-1)!.

Goodness-of-fit helpers (one- and two-sample Kolmogorov-Smirnov with the
asymptotic p-value, chi-square Poisson fit, factorial moments) operate on
plain arrays so they can be reused on any experiment output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2

MAX_RHO_K = 4
MAX_QUALIFYING_PAIRS = 10_000

TAU_NORMALIZATION = 2.0**-1.5


def _values(spectrum) -> np.ndarray:
    vals = getattr(spectrum, "values", spectrum)
    return np.asarray(vals, dtype=np.float64)


def _inside(x: np.ndarray, interval) -> np.ndarray:
    lo, hi = interval
    return (x > lo) & (x < hi)


# ---------------------------------------------------------------------------
# counting statistics


def chi_count(spectrum, interval) -> int:
    """Number of nearest-neighbor gaps with n*(gap) in the open interval."""
    v = _values(spectrum)
    gaps = np.diff(v) * v.size
    return int(np.count_nonzero(_inside(gaps, interval)))


def chi_tilde_counts(spectrum, interval, j_max: int) -> list:
    """Per-lag counts of n*(lambda_{i+j} - lambda_i) in the window, j = 1..j_max."""
    v = _values(spectrum)
    n = v.size
    if not 1 <= j_max <= n - 1:
        raise ValueError("need 1 <= j_max <= n-1")
    out = []
    for j in range(1, j_max + 1):
        d = (v[j:] - v[:-j]) * n
        out.append(int(np.count_nonzero(_inside(d, interval))))
    return out


def chi_tilde_total(spectrum, interval) -> int:
    """Total over all lags, stopping once every lag-j distance exceeds the window."""
    v = _values(spectrum)
    n = v.size
    _, hi = interval
    total = 0
    for j in range(1, n):
        d = (v[j:] - v[:-j]) * n
        if np.min(d) >= hi:
            break
        total += int(np.count_nonzero(_inside(d, interval)))
    return total


def _qualifying_pairs(v: np.ndarray, interval) -> list:
    """Index pairs (i, j), i < j, with normalized distance inside the window."""
    n = v.size
    lo, hi = interval
    pairs = []
    for i in range(n - 1):
        j = i + 1
        while j < n and (v[j] - v[i]) * n < hi:
            if (v[j] - v[i]) * n > lo:
                pairs.append((i, j))
                if len(pairs) > MAX_QUALIFYING_PAIRS:
                    raise ValueError("window far too wide: qualifying pair set exceeds cap")
            j += 1
    return pairs


def _matching_count_3(pairs: list) -> int:
    """Number of unordered vertex-disjoint triples among the given pairs.

    Subgraph-count inclusion-exclusion on the graph whose edges are the
    pairs: C(m,3) - a2*(m-2) + paths3 + 2*triangles + 2*stars3, where a2 is
    the adjacent-edge-pair count.
    """
    m = len(pairs)
    if m < 3:
        return 0
    adj: dict = {}
    for u, w in pairs:
        adj.setdefault(u, set()).add(w)
        adj.setdefault(w, set()).add(u)
    a2 = sum(math.comb(len(s), 2) for s in adj.values())
    s3 = sum(math.comb(len(s), 3) for s in adj.values())
    tri = 0
    for u, w in pairs:
        tri += len(adj[u] & adj[w])
    tri //= 3
    p4 = sum((len(adj[u]) - 1) * (len(adj[w]) - 1) for u, w in pairs) - 3 * tri
    return math.comb(m, 3) - a2 * (m - 2) + p4 + 2 * tri + 2 * s3


def _matching_count(pairs: list, k: int) -> int:
    """Unordered k-tuples of pairwise vertex-disjoint pairs, k <= 4."""
    m = len(pairs)
    if k == 0:
        return 1
    if k == 1:
        return m
    if k == 2:
        adj: dict = {}
        for u, w in pairs:
            adj.setdefault(u, []).append(w)
            adj.setdefault(w, []).append(u)
        a2 = sum(math.comb(len(s), 2) for s in adj.values())
        return math.comb(m, 2) - a2
    if k == 3:
        return _matching_count_3(pairs)
    if k == 4:
        # every 4-matching has a unique minimal edge in the fixed ordering
        total = 0
        for idx, (u, w) in enumerate(pairs):
            rest = [p for p in pairs[idx + 1 :] if u not in p and w not in p]
            total += _matching_count_3(rest)
        return total
    raise ValueError(f"tuple order limited to {MAX_RHO_K}")


def rho_count(spectrum, interval, k: int) -> int:
    """Ordered k-tuples of disjoint index pairs, each pair's normalized
    distance inside the window.  Exact via matching counts on the
    qualifying-pair graph; a brute-force oracle exists in the tests."""
    if not 1 <= k <= MAX_RHO_K:
        raise ValueError(f"k must be in [1, {MAX_RHO_K}]")
    v = _values(spectrum)
    pairs = _qualifying_pairs(v, interval)
    return math.factorial(k) * _matching_count(pairs, k)


def cluster_span(spectrum, c1: float) -> int:
    """Largest rank distance between order statistics closer than 2*c1/n."""
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    v = _values(spectrum)
    n = v.size
    thr = 2.0 * c1 / n
    best = 0
    left = 0
    for right in range(n):
        while v[right] - v[left] >= thr:
            left += 1
        if right - left > best:
            best = right - left
    return best


# ---------------------------------------------------------------------------
# normalized smallest gaps and their limit law


def tau_sequence(spectrum, k_max: int) -> np.ndarray:
    """tau_k = 2^{-3/2} * n * (k-th smallest nearest-neighbor gap), k = 1..k_max."""
    v = _values(spectrum)
    n = v.size
    if not 1 <= k_max <= n - 1:
        raise ValueError("need 1 <= k_max <= n-1")
    gaps = np.sort(np.diff(v))
    return TAU_NORMALIZATION * n * gaps[:k_max]


def kth_gap_tau(spectrum, k: int) -> float:
    return float(tau_sequence(spectrum, k)[k - 1])


def limiting_tau_cdf(k: int, x: float) -> float:
    """P(tau_k <= x) in the limit: the regularized lower incomplete gamma
    of integer order k at x^2, i.e. 1 - e^{-x^2} sum_{j<k} x^{2j}/j!."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if x <= 0:
        return 0.0
    y = x * x
    tail = math.fsum(math.exp(-y + j * math.log(y) - math.lgamma(j + 1)) for j in range(k))
    return min(1.0, max(0.0, 1.0 - tail))


def limiting_tau_pdf(k: int, x: float) -> float:
    """Limit density 2 x^{2k-1} e^{-x^2} / (k-1)! of the k-th smallest gap."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if x <= 0:
        return 0.0
    return math.exp(
        math.log(2.0) + (2 * k - 1) * math.log(x) - x * x - math.lgamma(k)
    )


def poisson_intensity(interval) -> float:
    """Expected window count of the limiting process: (hi^2 - lo^2)/8."""
    lo, hi = interval
    if not 0 <= lo <= hi:
        raise ValueError("need 0 <= lo <= hi")
    return (hi * hi - lo * lo) / 8.0


# ---------------------------------------------------------------------------
# goodness of fit


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample values."""

    values: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDistribution":
        v = np.sort(np.asarray(samples, dtype=np.float64).ravel())
        if v.size < 1:
            raise ValueError("need at least one sample")
        return cls(v)

    @property
    def size(self) -> int:
        return self.values.size

    def to_csv(self) -> str:
        """Sorted samples as CSV text for external plotting."""
        lines = ["rank,value"] + [f"{i},{float(v)!r}" for i, v in enumerate(self.values)]
        return "\n".join(lines) + "\n"


def kolmogorov_sf(x: float) -> float:
    """Complementary CDF of the Kolmogorov distribution.

    Alternating series for large x, Jacobi-theta transformed series for
    small x; terms below 1e-12 stop the summation.
    """
    if x <= 0:
        return 1.0
    if x < 1.18:
        # sum sqrt(2 pi)/x * exp(-(2j-1)^2 pi^2 / (8 x^2)) is the CDF
        acc = 0.0
        for j in range(1, 200):
            term = math.exp(-((2 * j - 1) ** 2) * math.pi**2 / (8.0 * x * x))
            acc += term
            if term < 1e-12:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / x * acc))
    acc = 0.0
    for j in range(1, 200):
        term = 2.0 * (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * x * x)
        acc += term
        if abs(term) < 1e-12:
            break
    return min(1.0, max(0.0, acc))


def ks_test(samples: EmpiricalDistribution, cdf) -> tuple:
    """One-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    v = samples.values
    n = v.size
    if n < 10:
        raise ValueError("need at least 10 samples")
    f = np.array([cdf(x) for x in v])
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    return d, kolmogorov_sf(math.sqrt(n) * d)


def ks_two_sample(a: EmpiricalDistribution, b: EmpiricalDistribution) -> tuple:
    """Two-sample Kolmogorov-Smirnov with the asymptotic p-value."""
    va, vb = a.values, b.values
    pooled = np.concatenate([va, vb])
    pooled.sort(kind="mergesort")
    fa = np.searchsorted(va, pooled, side="right") / va.size
    fb = np.searchsorted(vb, pooled, side="right") / vb.size
    d = float(np.max(np.abs(fa - fb)))
    ne = va.size * vb.size / (va.size + vb.size)
    return d, kolmogorov_sf(math.sqrt(ne) * d)


def factorial_moment(count_samples, k: int) -> float:
    """Mean over trials of c*(c-1)*...*(c-k+1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = np.asarray(count_samples, dtype=np.float64)
    prod = np.ones_like(c)
    for j in range(k):
        prod = prod * (c - j)
    return float(np.mean(prod))


def _poisson_pmf(kk: np.ndarray, mu: float) -> np.ndarray:
    return np.exp(kk * math.log(mu) - mu - np.array([math.lgamma(x + 1) for x in kk]))


def poisson_gof(count_samples, mu: float) -> float:
    """Chi-square p-value of the observed counts against Poisson(mu).

    Cells are pooled left to right until every expected count reaches 5;
    if pooling collapses everything into one cell the test is vacuous and
    the p-value is 1.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    counts = np.asarray(count_samples, dtype=np.int64)
    if counts.size < 200:
        raise ValueError("need at least 200 samples")
    kmax = int(np.max(counts))
    support = np.arange(kmax + 1, dtype=np.float64)
    expected = counts.size * _poisson_pmf(support, mu)
    expected = np.append(expected, counts.size - expected.sum())  # upper tail
    observed = np.bincount(counts, minlength=kmax + 1).astype(np.float64)
    observed = np.append(observed, 0.0)

    pooled_obs, pooled_exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5.0:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if pooled_exp:
            pooled_obs[-1] += acc_o
            pooled_exp[-1] += acc_e
        else:
            pooled_obs, pooled_exp = [acc_o], [acc_e]
    if len(pooled_exp) <= 1:
        return 1.0
    obs = np.array(pooled_obs)
    exp = np.array(pooled_exp)
    stat = float(np.sum((obs - exp) ** 2 / exp))
    return float(_chi2.sf(stat, df=len(pooled_exp) - 1))


# ---------------------------------------------------------------------------
# per-trial summary


@dataclass(frozen=True)
class GapSummary:
    """Derived statistics of one spectrum for a fixed window."""

    n: int
    trial_index: int
    tau: np.ndarray
    chi: int
    chi_tilde_by_lag: np.ndarray
    chi_tilde: int
    cluster_span_a: int

    def csv_header(self) -> list:
        return (
            ["trial", "n", "chi", "chi_tilde", "cluster_span_a"]
            + [f"tau_{k + 1}" for k in range(len(self.tau))]
            + [f"lag_{j + 1}" for j in range(len(self.chi_tilde_by_lag))]
        )

    def csv_row(self) -> list:
        return (
            [self.trial_index, self.n, self.chi, self.chi_tilde, self.cluster_span_a]
            + [float(t) for t in self.tau]
            + [int(c) for c in self.chi_tilde_by_lag]
        )


def summarize(spectrum, interval, k_max: int, j_max: int) -> GapSummary:
    """All window statistics of one spectrum in a single pass."""
    v = _values(spectrum)
    lags = chi_tilde_counts(v, interval, j_max)
    return GapSummary(
        n=v.size,
        trial_index=getattr(spectrum, "trial_index", -1),
        tau=tau_sequence(v, k_max),
        chi=chi_count(v, interval),
        chi_tilde_by_lag=np.asarray(lags, dtype=np.int64),
        chi_tilde=chi_tilde_total(v, interval),
        cluster_span_a=cluster_span(v, interval[1]),
    )
