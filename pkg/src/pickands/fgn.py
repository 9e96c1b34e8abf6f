"""Exact fractional Gaussian noise sampling via circulant embedding.

Simulates unit-mesh fGn with the Davies-Harte method (covariance embedded
in a circulant matrix diagonalized by the FFT), then assembles two-sided
fractional Brownian motion on the lattice [-T, T] by cumulative summation,
re-anchoring at t=0 and self-similar rescaling to the target mesh.

Seeding is reproducible and scheduling-independent: each replication's
Gaussian vector is derived only from (master_seed, rep_index) through a
SplitMix64 avalanche feeding a counter-based Philox generator.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .exceptions import EmbeddingError, NumericalError, ParameterError

__all__ = [
    "GridSpec",
    "CirculantSpectrum",
    "SeedVector",
    "FbmPath",
    "fgn_autocov",
    "autocov_seq",
    "dft",
    "circulant_spectrum",
    "spectrum_for",
    "clear_spectrum_cache",
    "mix_seed",
    "seed_vector",
    "sample_unit_fgn",
    "build_two_sided_fbm",
    "fbm_cov_matrix",
    "cholesky_oracle_sample",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Equispaced simulation lattice t_k = -T + k*eta, k = 0..n_steps.

    Requires 0 < alpha <= 2, T an integer multiple of eta, and
    n_steps = 2T/eta a power of two (Davies-Harte needs a power-of-two
    transform length).
    """

    alpha: float
    T: float
    eta: float
    n_steps: int = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha must be in (0, 2], got {self.alpha}")
        if self.T <= 0 or self.eta <= 0:
            raise ParameterError("T and eta must be positive")
        ratio = self.T / self.eta
        if abs(ratio - round(ratio)) > 1e-9 * max(abs(ratio), 1.0):
            raise ParameterError(
                f"T={self.T} must be an integer multiple of eta={self.eta}"
            )
        n = int(round(2.0 * self.T / self.eta))
        if not _is_power_of_two(n):
            raise ParameterError(f"2T/eta = {n} must be a power of two")
        object.__setattr__(self, "n_steps", n)

    @property
    def hurst(self) -> float:
        return self.alpha / 2.0

    @property
    def zero_index(self) -> int:
        return self.n_steps // 2

    def times(self) -> np.ndarray:
        """Lattice times; exactly 0.0 at zero_index."""
        return (np.arange(self.n_steps + 1) - self.zero_index) * self.eta


@dataclass(frozen=True)
class CirculantSpectrum:
    """Eigenvalues of the 2n x 2n circulant embedding of Toeplitz(gamma).

    ``eigenvalues`` is the (real, nonnegative) DFT of the embedded first
    row; ``clamp_count`` counts eigenvalues that were clamped to zero from
    small negative floating-point noise.  ``synth_weights`` are the
    precomputed rfft-format synthesis amplitudes used by the sampler.
    """

    alpha: float
    n_steps: int
    eigenvalues: np.ndarray
    clamp_count: int
    synth_weights: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SeedVector:
    """Per-replication standard Gaussian variates (length 2*n_steps).

    Derived deterministically from (master_seed, rep_index): the two words
    are avalanched by mix_seed into a Philox key and the normals come from
    numpy's ziggurat on that counter-based stream.  Identical regardless
    of worker count or call order, and independent of alpha (this is what
    makes common random numbers across alpha valid).
    """

    master_seed: int
    rep_index: int
    normals: np.ndarray


@dataclass(frozen=True)
class FbmPath:
    """Two-sided fBm sample on a GridSpec lattice; values[zero_index] == 0."""

    grid: GridSpec
    values: np.ndarray


def fgn_autocov(alpha: float, k: int) -> float:
    """Autocovariance of unit-mesh fractional Gaussian noise at lag k.

    gamma(k) = 0.5*(|k+1|^alpha - 2|k|^alpha + |k-1|^alpha); gamma(0) = 1.
    """
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must be in (0, 2], got {alpha}")
    k = abs(int(k))
    return 0.5 * ((k + 1.0) ** alpha - 2.0 * k**alpha + abs(k - 1.0) ** alpha)


def autocov_seq(alpha: float, n_steps: int) -> np.ndarray:
    """gamma(0..n_steps) as a vector (the AutocovSeq of the lattice)."""
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must be in (0, 2], got {alpha}")
    k = np.arange(n_steps + 1, dtype=float)
    return 0.5 * ((k + 1.0) ** alpha - 2.0 * k**alpha + np.abs(k - 1.0) ** alpha)


def dft(values, inverse: bool = False) -> np.ndarray:
    """Discrete Fourier transform, forward unscaled, inverse with 1/n.

    Length must be a power of two.  forward(inverse(x)) == x to roundoff.
    """
    x = np.asarray(values, dtype=complex)
    if x.ndim != 1 or not _is_power_of_two(x.size):
        raise ParameterError(f"dft length must be a power of two, got shape {x.shape}")
    return np.fft.ifft(x) if inverse else np.fft.fft(x)


def circulant_spectrum(alpha: float, n_steps: int) -> CirculantSpectrum:
    """Eigenvalues of the circulant embedding of the fGn covariance.

    The embedded first row is (gamma(0), ..., gamma(n), gamma(n-1), ...,
    gamma(1)), length 2n; its DFT is real.  Eigenvalues within
    tol = 1e-8 * max(eigenvalue) below zero are clamped to 0 (floating
    point noise; fGn embeddings are nonnegative in exact arithmetic);
    anything more negative raises EmbeddingError.
    """
    if not _is_power_of_two(n_steps):
        raise ParameterError(f"n_steps must be a power of two, got {n_steps}")
    gamma = autocov_seq(alpha, n_steps)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eig = dft(row).real
    tol = 1e-8 * eig.max()
    if eig.min() < -tol:
        raise EmbeddingError(
            f"circulant embedding failed for alpha={alpha}, n={n_steps}: "
            f"min eigenvalue {eig.min():.3e} < -{tol:.3e}"
        )
    clamp_count = int(np.count_nonzero(eig < 0.0))
    eig = np.maximum(eig, 0.0)

    # rfft-format synthesis amplitudes: sqrt(2n*lambda_k/2) for interior
    # frequencies, sqrt(2n*lambda_k) at DC and Nyquist.  Equivalent to the
    # textbook sqrt(lambda/(2*2n)) weights under the unnormalized synthesis
    # transform; here the 1/(2n) lives inside numpy's irfft.
    m = 2 * n_steps
    w = np.sqrt(eig[: n_steps + 1] * (m / 2.0))
    w[0] *= math.sqrt(2.0)
    w[n_steps] *= math.sqrt(2.0)
    return CirculantSpectrum(alpha, n_steps, eig, clamp_count, w)


_spectrum_cache: dict[tuple[float, int], CirculantSpectrum] = {}
_spectrum_lock = threading.Lock()


def spectrum_for(alpha: float, n_steps: int) -> CirculantSpectrum:
    """Cached circulant_spectrum; safe for concurrent lookup."""
    key = (alpha, n_steps)
    spec = _spectrum_cache.get(key)
    if spec is None:
        spec = circulant_spectrum(alpha, n_steps)
        with _spectrum_lock:
            _spectrum_cache.setdefault(key, spec)
        spec = _spectrum_cache[key]
    return spec


def clear_spectrum_cache() -> None:
    _spectrum_cache.clear()


def _splitmix64(x: int) -> int:
    """One SplitMix64 avalanche round (Steele, Lea & Flood constants)."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def mix_seed(master_seed: int, stream_index: int) -> int:
    """Avalanche (master_seed, stream_index) into one 64-bit Philox key."""
    return _splitmix64(_splitmix64(master_seed & _MASK64) ^ (stream_index & _MASK64))


def seed_vector(master_seed: int, rep_index: int, n_steps: int) -> SeedVector:
    """The 2*n_steps standard normals feeding replication rep_index."""
    if rep_index < 0:
        raise ParameterError(f"rep_index must be nonnegative, got {rep_index}")
    rng = np.random.Generator(np.random.Philox(key=mix_seed(master_seed, rep_index)))
    return SeedVector(master_seed, rep_index, rng.standard_normal(2 * n_steps))


def sample_unit_fgn(spectrum: CirculantSpectrum, seeds: SeedVector) -> np.ndarray:
    """One exact draw of unit-mesh fGn (length n_steps).

    Synthesizes Hermitian-symmetric complex Gaussian amplitudes weighted
    by the spectrum, inverse-transforms, and keeps the first n_steps real
    coordinates; the covariance of the result is exactly Toeplitz(gamma).
    """
    n = spectrum.n_steps
    normals = seeds.normals
    if normals.shape != (2 * n,):
        raise ParameterError(
            f"seed vector must have length {2 * n}, got {normals.shape}"
        )
    z = np.zeros(n + 1, dtype=complex)
    z.real = spectrum.synth_weights * normals[: n + 1]
    z.imag[1:n] = spectrum.synth_weights[1:n] * normals[n + 1 :]
    return np.fft.irfft(z, n=2 * n)[:n]


def build_two_sided_fbm(increments, grid: GridSpec) -> FbmPath:
    """Assemble fBm on [-T, T] from one unit-mesh fGn run.

    values[k] = eta^{alpha/2} * (cumsum[k] - cumsum[zero_index]): one run
    over the full window keeps the cross-covariance between the negative
    and positive half-axes correct (two independent one-sided paths would
    not), and the anchor subtraction makes B_0 = 0 bit-exactly.
    """
    inc = np.asarray(increments, dtype=float)
    if inc.shape != (grid.n_steps,):
        raise ParameterError(
            f"increments must have length {grid.n_steps}, got {inc.shape}"
        )
    cum = np.empty(grid.n_steps + 1)
    cum[0] = 0.0
    np.cumsum(inc, out=cum[1:])
    values = (grid.eta**grid.hurst) * (cum - cum[grid.zero_index])
    return FbmPath(grid, values)


def fbm_cov_matrix(alpha: float, times) -> np.ndarray:
    """Dense fBm covariance 0.5*(|s|^a + |t|^a - |t-s|^a) at given times."""
    t = np.asarray(times, dtype=float)
    s = t[:, None]
    u = t[None, :]
    return 0.5 * (
        np.abs(s) ** alpha + np.abs(u) ** alpha - np.abs(u - s) ** alpha
    )


def _oracle_factor(alpha: float, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(nonzero mask, factor) with factor @ N having the fBm covariance.

    Coordinates at t=0 have zero variance and are handled outside the
    factorization.  Cholesky first; for rank-deficient covariances
    (alpha=2 is rank one) falls back to an eigendecomposition square
    root, clipping eigenvalues within -1e-9*max of zero.
    """
    nz = times != 0.0
    pts = times[nz]
    if pts.size == 0:
        return nz, np.zeros((0, 0))
    cov = fbm_cov_matrix(alpha, pts)
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(cov)
        if w.min() < -1e-9 * max(w.max(), 1.0):
            raise NumericalError(
                f"covariance not PSD within 1e-9 (min eigenvalue {w.min():.3e})"
            ) from None
        w = np.where(w < 1e-12 * w.max(), 0.0, w)  # exact rank deficiency
        factor = v * np.sqrt(w)
    return nz, factor


def cholesky_oracle_sample(alpha: float, times, seeds) -> np.ndarray:
    """Exact Gaussian draw with the fBm covariance via dense factorization.

    Brute-force test oracle for the FFT sampler; O(k^3), k <= 4096.
    ``seeds`` are standard normals, one per time point (the one paired
    with a t=0 point, where the value is deterministically 0, is unused).
    """
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must be in (0, 2], got {alpha}")
    t = np.asarray(times, dtype=float)
    z = np.asarray(seeds, dtype=float)
    if t.ndim != 1 or t.size > 4096:
        raise ParameterError("times must be a 1-D sequence of length <= 4096")
    if np.unique(t).size != t.size:
        raise ParameterError("times must be distinct")
    if z.shape != t.shape:
        raise ParameterError(f"seeds must match times shape {t.shape}")
    nz, factor = _oracle_factor(alpha, t)
    out = np.zeros(t.size)
    if factor.size:
        out[nz] = factor @ z[nz]
    return out
