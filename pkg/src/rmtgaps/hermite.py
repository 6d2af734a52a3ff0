"""Hermite polynomials, oscillator wave functions and their quadrature.

The oscillator functions phi_j(x) = (2^j j! sqrt(pi))^{-1/2} e^{-x^2/2} H_j(x)
form an orthonormal basis of L^2(R).  Everything here is evaluated through
the normalized three-term recurrence

    phi_{j+1} = x*sqrt(2/(j+1))*phi_j - sqrt(j/(j+1))*phi_{j-1},

never through the raw 2^j j! formula, which overflows near j ~ 150.

Gaussian-times-polynomial functions F(x) = e^{-x^2/2} prod (x - root_i) are
carried as coefficient vectors in the phi basis (:class:`WaveExpansion`),
where multiplication by x, differentiation and L^2 norms are exact sparse
recurrences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_DEGREE = 200
MAX_QUADRATURE = 256
MAX_WAVE_ROOTS = 60

_PI4 = math.pi ** 0.25


@dataclass(frozen=True)
class HermitePoly:
    """Physicists' Hermite polynomial with exact integer coefficients."""

    degree: int
    coefficients: tuple  # ascending powers, Python ints

    def __call__(self, x):
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + float(c)
        return acc


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule: integrates e^{-x^2} * f(x) exactly for
    polynomials f of degree <= 2*len(nodes) - 1."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate_weighted(self, fvals: np.ndarray) -> float:
        """Sum w_i * fvals_i for fvals = f(nodes) of the smooth factor f."""
        return float(np.dot(self.weights, fvals))


@dataclass(frozen=True)
class WaveExpansion:
    """Coefficients a_0..a_m of a function in the oscillator basis."""

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def l2_norm_sq(self) -> float:
        return float(np.dot(self.coefficients, self.coefficients))


def hermite_poly(j: int) -> HermitePoly:
    """H_j by the two-term recurrence H_{j+1} = 2x H_j - 2j H_{j-1}."""
    if not 0 <= j <= MAX_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_DEGREE}]")
    prev = [1]
    if j == 0:
        return HermitePoly(0, tuple(prev))
    cur = [0, 2]
    for k in range(1, j):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= 2 * k * c
        prev, cur = cur, nxt
    return HermitePoly(j, tuple(cur))


def hermite_coeff_closed(j: int, power: int) -> int:
    """Coefficient of x^power in H_j from the explicit binomial sum."""
    if (j - power) % 2 != 0 or power < 0 or power > j:
        return 0
    m = (j - power) // 2
    return (-1) ** m * 2 ** (j - m) * math.comb(j, 2 * m) * math.factorial(2 * m) // (2**m * math.factorial(m))


def phi_rows(jmax: int, x) -> np.ndarray:
    """Array of shape (jmax+1, len(x)) with rows phi_0(x)..phi_jmax(x)."""
    if not 0 <= jmax <= MAX_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_DEGREE}]")
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    rows = np.empty((jmax + 1, xv.size))
    rows[0] = np.exp(-0.5 * xv * xv) / _PI4
    if jmax >= 1:
        rows[1] = xv * math.sqrt(2.0) * rows[0]
    for j in range(1, jmax):
        rows[j + 1] = xv * math.sqrt(2.0 / (j + 1)) * rows[j] - math.sqrt(j / (j + 1)) * rows[j - 1]
    return rows


def phi_eval(j: int, x):
    """Oscillator wave function phi_j at x (scalar or array)."""
    rows = phi_rows(j, x)
    out = rows[j]
    return float(out[0]) if np.isscalar(x) else out


def _weighted_hermite_rows(jmax: int, x: np.ndarray) -> np.ndarray:
    """Rows of phi_j(x) * e^{x^2/2}: the polynomial factor, same recurrence."""
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    rows = np.empty((jmax + 1, xv.size))
    rows[0] = 1.0 / _PI4
    if jmax >= 1:
        rows[1] = xv * math.sqrt(2.0) * rows[0]
    for j in range(1, jmax):
        rows[j + 1] = xv * math.sqrt(2.0 / (j + 1)) * rows[j] - math.sqrt(j / (j + 1)) * rows[j - 1]
    return rows


def gauss_hermite(m: int) -> QuadratureRule:
    """m-point Gauss-Hermite rule from the Jacobi matrix of the recurrence.

    Nodes are the eigenvalues of the symmetric tridiagonal matrix with zero
    diagonal and off-diagonal sqrt(j/2), polished by two Newton steps on the
    normalized Hermite polynomial.  Weights come from the closed form
    w_i = 1 / (m * htilde_{m-1}(x_i)^2); the squared first eigenvector
    components lose all relative accuracy for edge nodes, where they sit far
    below the eigensolver's absolute error.
    """
    if not 1 <= m <= MAX_QUADRATURE:
        raise ValueError(f"node count must be in [1, {MAX_QUADRATURE}]")
    off = np.sqrt(np.arange(1, m) / 2.0)
    jac = np.diag(off, 1) + np.diag(off, -1)
    nodes = np.linalg.eigvalsh(jac)
    for _ in range(2):
        rows = _weighted_hermite_rows(m, nodes)
        # htilde_m'(x) = sqrt(2m) * htilde_{m-1}(x)
        nodes = nodes - rows[m] / (math.sqrt(2.0 * m) * rows[m - 1])
    rows = _weighted_hermite_rows(m - 1 if m > 1 else 0, nodes)
    weights = 1.0 / (m * rows[m - 1] ** 2) if m > 1 else np.full(1, math.sqrt(math.pi))
    return QuadratureRule(nodes=nodes, weights=weights)


def default_rule_size(max_index: int) -> int:
    """Rule size guaranteeing exactness for bilinear forms up to max_index."""
    return min(2 * max_index + 8, MAX_QUADRATURE)


def orthonormality_defect(jmax: int, m: int) -> float:
    """max_{j,k<=jmax} |<phi_j, phi_k>_quadrature - delta_jk|.

    With m >= jmax + 1 the rule is exact and the defect is pure round-off;
    shorter rules document the failure mode.
    """
    rule = gauss_hermite(m)
    rows = _weighted_hermite_rows(jmax, rule.nodes)
    gram = (rows * rule.weights) @ rows.T
    return float(np.max(np.abs(gram - np.eye(jmax + 1))))


def roots_to_wave(roots) -> WaveExpansion:
    """Expansion of F(x) = e^{-x^2/2} * prod (x - root_i) in the phi basis.

    Starts from e^{-x^2/2} = pi^{1/4} phi_0 and applies multiply-by-(x-root)
    through x*phi_j = sqrt((j+1)/2) phi_{j+1} + sqrt(j/2) phi_{j-1}.
    """
    rts = np.asarray(roots, dtype=np.float64).ravel()
    if rts.size > MAX_WAVE_ROOTS:
        raise ValueError(f"at most {MAX_WAVE_ROOTS} roots supported")
    a = np.array([_PI4])
    for lam in rts:
        m = a.size
        j = np.arange(m, dtype=np.float64)
        nxt = np.zeros(m + 1)
        nxt[1:] += a * np.sqrt((j + 1) / 2.0)  # raising part of x*phi_j
        if m > 1:
            nxt[: m - 1] += a[1:] * np.sqrt(j[1:] / 2.0)  # lowering part
        nxt[:m] -= lam * a
        a = nxt
    return WaveExpansion(a)


def wave_derivative(w: WaveExpansion) -> WaveExpansion:
    """Derivative in the phi basis: b_j = (sqrt(j+1) a_{j+1} - sqrt(j) a_{j-1}) / sqrt(2)."""
    a = w.coefficients
    m = a.size - 1
    b = np.zeros(m + 2)
    for j in range(m + 2):
        up = math.sqrt(j + 1) * a[j + 1] if j + 1 <= m else 0.0
        down = math.sqrt(j) * a[j - 1] if 1 <= j <= m + 1 else 0.0
        b[j] = (up - down) / math.sqrt(2.0)
    return WaveExpansion(b)


def wave_eval(w: WaveExpansion, x) -> np.ndarray:
    """Pointwise values of the expanded function."""
    rows = phi_rows(w.degree, x)
    out = w.coefficients @ rows
    return float(out[0]) if np.isscalar(x) else out


def wave_l2_quadrature(w: WaveExpansion) -> float:
    """Independent L^2 norm of the expansion via Gauss-Hermite quadrature."""
    rule = gauss_hermite(default_rule_size(w.degree))
    rows = _weighted_hermite_rows(w.degree, rule.nodes)
    fvals = w.coefficients @ rows
    return rule.integrate_weighted(fvals * fvals)


def derivative_energy_pair(roots, n: int) -> tuple:
    """(integral of F'^2, 2n * integral of F^2) for the Gaussian-polynomial F.

    The number of roots must be below n; callers assert lhs <= rhs, the
    derivative-energy bound for functions in the degree-(n-1) oscillator span.
    """
    rts = np.asarray(roots, dtype=np.float64).ravel()
    if rts.size >= n:
        raise ValueError("root count must be smaller than n")
    w = roots_to_wave(rts)
    d = wave_derivative(w)
    return d.l2_norm_sq(), 2.0 * n * w.l2_norm_sq()


def _dense_grid(roots, step=1.0 / 2048.0):
    rts = np.asarray(roots, dtype=np.float64).ravel()
    spread = float(np.max(np.abs(rts))) if rts.size else 0.0
    half = spread + 12.0
    count = int(np.ceil(2 * half / step)) + 1
    return np.linspace(-half, half, count)


def _abs_shift_correlation(w: WaveExpansion, grid: np.ndarray, fabs: np.ndarray, t: float) -> float:
    """Trapezoid value of integral |F(x)| |F(x + t)| dx for any real shift."""
    shifted = np.abs(wave_eval(w, grid + t))
    prod = fabs * shifted
    return float(np.trapezoid(prod, grid))


def _offset_weighted_integral(roots, lo: float, hi: float, order: int = 48) -> float:
    """2 * integral over t in (lo, hi) of t * T(t) dt with T the absolute
    autocorrelation of F; equals the pair integral over the offset window."""
    grid = _dense_grid(roots)
    w = roots_to_wave(roots)
    fabs = np.abs(wave_eval(w, grid))
    gl_x, gl_w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    ts = mid + half * gl_x
    wts = half * gl_w
    corr = np.array([_abs_shift_correlation(w, grid, fabs, t) for t in ts])
    return 2.0 * float(np.dot(wts, ts * corr))


def pair_integral_band(roots, c: float) -> float:
    """Double integral of |x1-x2| |F(x1)| |F(x2)| over the band |x1-x2| < c."""
    if c <= 0:
        raise ValueError("band half-width must be positive")
    return _offset_weighted_integral(roots, 0.0, c)


def pair_integral_offsets(roots, lo: float, hi: float) -> float:
    """Same integrand, x2 - x1 restricted to (lo, hi) union (-hi, -lo)."""
    if not 0 <= lo < hi:
        raise ValueError("offset interval must satisfy 0 <= lo < hi")
    return _offset_weighted_integral(roots, lo, hi)


def pair_integral_root_boxes(roots, c: float, order: int = 48) -> float:
    """Double integral of |x1-x2| |F(x1)| |F(x2)| over the union of the
    squares (root_i, root_i + c)^2, by inclusion-exclusion over the squares
    with a Gauss-Legendre tensor rule on each intersection rectangle."""
    rts = np.asarray(roots, dtype=np.float64).ravel()
    if rts.size == 0:
        return 0.0
    if rts.size > 16:
        raise ValueError("too many boxes for subset inclusion-exclusion")
    gl_x, gl_w = np.polynomial.legendre.leggauss(order)
    w = roots_to_wave(rts)

    def rect_integral(lo: float, hi: float) -> float:
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = mid + half * gl_x
        wts = half * gl_w
        fa = np.abs(wave_eval(w, pts))
        kernel = np.abs(pts[:, None] - pts[None, :])
        return float((wts * fa) @ kernel @ (wts * fa))

    total = 0.0
    n = rts.size
    for mask in range(1, 1 << n):
        sel = [rts[i] for i in range(n) if mask >> i & 1]
        lo, hi = max(sel), min(sel) + c
        if hi <= lo:
            continue
        sign = -1.0 if bin(mask).count("1") % 2 == 0 else 1.0
        total += sign * rect_integral(lo, hi)
    return total
