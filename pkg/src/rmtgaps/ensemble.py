"""Seeded eigenvalue samplers for the Gaussian orthogonal and beta ensembles.

Two routes to the same spectral law at beta = 1:

* the dense route symmetrizes an iid Gaussian matrix, giving diagonal
  variance 1 and off-diagonal variance 1/2, the classical realization of the
  weight e^{-sum lambda_i^2 / 2} times |Vandermonde|;
* the tridiagonal route (Dumitriu-Edelman) draws a symmetric tridiagonal
  matrix with Gaussian diagonal and chi-distributed sub-diagonal, valid for
  every beta > 0 and far cheaper for large n.

Spectra are deterministic functions of (spec, base_seed, trial_index): all
randomness flows through the counter-based streams in :mod:`rmtgaps.prng`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import prng

SCALING_UNIT = "unit"  # weight e^{-sum x^2/2}: spacings of order 1/n
SCALING_NSCALED = "nscaled"  # weight e^{-n beta sum x^2/2}: spectrum divided by sqrt(n)

SAMPLER_DENSE = "dense"
SAMPLER_TRIDIAGONAL = "tridiagonal"

MAX_DENSE_N = 4000
MAX_TRIDIAG_N = 20000

_RESAMPLE_OFFSET = 1 << 48
_MAX_RESAMPLES = 4


class NonConvergenceError(RuntimeError):
    """The tridiagonal eigensolver did not converge."""


class SamplingError(RuntimeError):
    """A trial failed; carries the trial index for reproduction."""

    def __init__(self, message: str, trial_index: int):
        super().__init__(f"trial {trial_index}: {message}")
        self.trial_index = trial_index


@dataclass(frozen=True)
class EnsembleSpec:
    """What to sample: size, Dyson index, scaling convention and route."""

    n: int
    beta: float = 1.0
    scaling: str = SCALING_UNIT
    sampler: str = SAMPLER_TRIDIAGONAL

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.scaling not in (SCALING_UNIT, SCALING_NSCALED):
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if self.sampler not in (SAMPLER_DENSE, SAMPLER_TRIDIAGONAL):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.sampler == SAMPLER_DENSE and self.beta != 1.0:
            raise ValueError("dense sampler realizes beta = 1 only")
        if self.scaling == SCALING_UNIT and self.beta != 1.0:
            raise ValueError("unit scaling is defined for beta = 1 only")


@dataclass(frozen=True)
class SeedStream:
    """Base seed from which per-trial streams are derived by avalanche mixing."""

    base_seed: int

    def key(self, trial_index: int) -> int:
        return prng.stream_key(self.base_seed, trial_index)


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues of one sampled matrix plus provenance metadata."""

    values: np.ndarray
    spec: EnsembleSpec
    base_seed: int
    trial_index: int
    resamples: int = 0

    def __post_init__(self):
        self.values.flags.writeable = False

    @property
    def n(self) -> int:
        return self.values.size


def eigen_tridiagonal(diag, offdiag) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending."""
    d = np.asarray(diag, dtype=np.float64)
    e = np.asarray(offdiag, dtype=np.float64)
    if d.ndim != 1 or e.ndim != 1 or e.size != max(d.size - 1, 0):
        raise ValueError("need diagonal length n and off-diagonal length n-1")
    if d.size == 0:
        raise ValueError("empty matrix")
    if d.size == 1:
        return d.copy()
    try:
        # sterf: implicit-shift QL/QR for eigenvalues only, the fastest route
        return scipy.linalg.eigvalsh_tridiagonal(d, e, lapack_driver="sterf", check_finite=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological input
        raise NonConvergenceError(str(exc)) from exc


def _strictly_increasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) > 0.0))


def _with_resampling(draw, seed_stream: SeedStream, trial_index: int):
    """Re-derive the stream on exact eigenvalue ties (floating collisions)."""
    for attempt in range(_MAX_RESAMPLES + 1):
        key = seed_stream.key(trial_index + attempt * _RESAMPLE_OFFSET)
        values = draw(key)
        if _strictly_increasing(values):
            return values, attempt
    raise SamplingError("persistent eigenvalue ties", trial_index)


def sample_goe_dense(n: int, seed_stream: SeedStream, trial_index: int) -> Spectrum:
    """Spectrum of (A + A^T)/2 with A an iid standard Gaussian matrix."""
    if not 2 <= n <= MAX_DENSE_N:
        raise ValueError(f"dense sampler supports 2 <= n <= {MAX_DENSE_N}")

    def draw(key: int) -> np.ndarray:
        a = prng.normals(key, 0, n * n).reshape(n, n)
        return np.linalg.eigvalsh(0.5 * (a + a.T))

    values, resamples = _with_resampling(draw, seed_stream, trial_index)
    spec = EnsembleSpec(n=n, beta=1.0, scaling=SCALING_UNIT, sampler=SAMPLER_DENSE)
    return Spectrum(values, spec, seed_stream.base_seed, trial_index, resamples)


def sample_gbeta_tridiag(
    n: int,
    beta: float,
    seed_stream: SeedStream,
    trial_index: int,
    scaling: str = SCALING_UNIT,
) -> Spectrum:
    """Tridiagonal beta-ensemble spectrum.

    Diagonal entries are N(0,2)/sqrt(2); the i-th sub-diagonal entry is a
    chi variate with (n-i)*beta degrees of freedom divided by sqrt(2),
    realized as sqrt(Gamma((n-i)*beta/2, 1)).  Under the n-scaled convention
    the spectrum is divided by sqrt(n).
    """
    if not 2 <= n <= MAX_TRIDIAG_N:
        raise ValueError(f"tridiagonal sampler supports 2 <= n <= {MAX_TRIDIAG_N}")
    spec = EnsembleSpec(n=n, beta=beta, scaling=scaling, sampler=SAMPLER_TRIDIAGONAL)
    shapes = 0.5 * beta * np.arange(n - 1, 0, -1, dtype=np.float64)

    def draw(key: int) -> np.ndarray:
        diag = prng.normals(key, 0, n)
        off = np.sqrt(prng.gammas(key, 0, n - 1, shapes))
        values = eigen_tridiagonal(diag, off)
        if scaling == SCALING_NSCALED:
            values = values / np.sqrt(n)
        return values

    values, resamples = _with_resampling(draw, seed_stream, trial_index)
    return Spectrum(values, spec, seed_stream.base_seed, trial_index, resamples)


def sample(spec: EnsembleSpec, seed_stream: SeedStream, trial_index: int) -> Spectrum:
    """Dispatch on the sampler route declared in the spec."""
    if spec.sampler == SAMPLER_DENSE:
        if spec.scaling != SCALING_UNIT:
            raise ValueError("dense sampler is defined in the unit scaling")
        return sample_goe_dense(spec.n, seed_stream, trial_index)
    return sample_gbeta_tridiag(spec.n, spec.beta, seed_stream, trial_index, spec.scaling)
