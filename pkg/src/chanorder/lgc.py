"""Linear Gaussian channels ordered by whitened singular values.

Whitening the noise and absorbing the orthogonal factors of the channel
matrix into admissible input/output processing reduces every deterministic
channel to its sorted singular values; two channels are ordered exactly when
those vectors are ordered entrywise, and the element-wise max/min gives the
lattice join/meet.  Random-coefficient channels are handled as i.i.d.
ensembles of such spectra, compared in the usual multivariate stochastic
order through empirical marginal distribution functions with a
Dvoretzky-Kiefer-Wolfowitz confidence band.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from .numerics import inverse_sqrt_spd, singular_values

__all__ = [
    "PADDING_CONVENTION",
    "GaussianChannel",
    "SingularSpectrum",
    "SingularEnsemble",
    "SpectrumOrderDecision",
    "EquivalenceReport",
    "EnsembleOrderDecision",
    "GaussianEntries",
    "HaarRotated",
    "FixedMatrix",
    "ExplicitMatrices",
    "canonicalize",
    "includes",
    "spectrum_includes",
    "lub",
    "glb",
    "verify_equivalence_transform",
    "sample_haar_orthogonal",
    "ensemble_from_sampler",
    "ensemble_order",
    "ensemble_lub",
    "ensemble_glb",
    "to_json_dict",
    "from_json_dict",
    "ensemble_to_json_dict",
    "ensemble_from_json_dict",
]

PADDING_CONVENTION = (
    "spectra of different lengths are zero-padded before comparison: "
    "a missing stream is a zero-gain stream"
)

_SPD_SYMMETRY_TOL = 1e-12
_SPD_EIG_FLOOR = 1e-12


@dataclass(frozen=True)
class GaussianChannel:
    """Channel matrix plus full-rank noise covariance, outputs x inputs."""

    H: np.ndarray
    Sigma: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.H, dtype=float)
        sigma = np.asarray(self.Sigma, dtype=float)
        if h.ndim != 2 or h.size == 0 or not np.all(np.isfinite(h)):
            raise ValueError("H must be a nonempty finite 2-D matrix")
        if sigma.ndim != 2 or sigma.shape != (h.shape[0], h.shape[0]):
            raise ValueError("Sigma must be square with one row per channel output")
        if not np.all(np.isfinite(sigma)):
            raise ValueError("Sigma must be finite")
        scale = max(1.0, float(np.max(np.abs(sigma))))
        if float(np.max(np.abs(sigma - sigma.T))) > _SPD_SYMMETRY_TOL * scale:
            raise ValueError("Sigma must be symmetric")
        eigenvalues = np.linalg.eigvalsh(sigma)
        if eigenvalues[-1] <= 0.0 or eigenvalues[0] <= _SPD_EIG_FLOOR * eigenvalues[-1]:
            raise ValueError(
                f"Sigma is not positive definite: offending eigenvalue {eigenvalues[0]:.6e}"
            )
        h.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "Sigma", sigma)


@dataclass(frozen=True)
class SingularSpectrum:
    """Sorted nonincreasing singular values of a whitened channel."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise ValueError("singular values must be finite")
        if values.size and float(values.min()) < -1e-12:
            raise ValueError("singular values must be nonnegative")
        if values.size > 1 and np.any(np.diff(values) > 1e-12):
            raise ValueError("singular values must be sorted nonincreasing")
        values = np.clip(values, 0.0, None)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def padded(self, length: int) -> np.ndarray:
        if length < self.values.size:
            raise ValueError("cannot pad to a shorter length")
        return np.pad(self.values, (0, length - self.values.size))


@dataclass(frozen=True)
class SpectrumOrderDecision:
    included: bool
    violating_index: int | None = None


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    condition: str | None = None
    max_deviation: float | None = None


def canonicalize(channel: GaussianChannel) -> SingularSpectrum:
    """Sorted singular values of the noise-whitened channel matrix.

    Invariant under admissible input/output processing (orthonormal-row
    input matrices and left-invertible output matrices), so it identifies
    the channel's equivalence class.
    """
    whitener = inverse_sqrt_spd(channel.Sigma)
    return SingularSpectrum(singular_values(whitener @ channel.H))


def spectrum_includes(
    better: SingularSpectrum,
    worse: SingularSpectrum,
    tolerance: float = 1e-9,
) -> SpectrumOrderDecision:
    """Entrywise comparison of zero-padded spectra."""
    length = max(better.values.size, worse.values.size)
    gap = worse.padded(length) - better.padded(length)
    bad = np.nonzero(gap > tolerance)[0]
    if bad.size:
        return SpectrumOrderDecision(False, violating_index=int(bad[0]))
    return SpectrumOrderDecision(True)


def includes(
    better: GaussianChannel,
    worse: GaussianChannel,
    tolerance: float = 1e-9,
) -> SpectrumOrderDecision:
    """Decide inclusion between two channels via their canonical spectra."""
    return spectrum_includes(canonicalize(better), canonicalize(worse), tolerance)


def _pad_pair(a: SingularSpectrum, b: SingularSpectrum) -> tuple[np.ndarray, np.ndarray]:
    length = max(a.values.size, b.values.size)
    return a.padded(length), b.padded(length)


def lub(a: SingularSpectrum, b: SingularSpectrum) -> SingularSpectrum:
    """Element-wise maximum; max of two sorted vectors stays sorted."""
    va, vb = _pad_pair(a, b)
    out = np.maximum(va, vb)
    if out.size > 1 and np.any(np.diff(out) > 0.0):
        raise AssertionError("element-wise maximum lost sortedness")
    return SingularSpectrum(out)


def glb(a: SingularSpectrum, b: SingularSpectrum) -> SingularSpectrum:
    """Element-wise minimum; min of two sorted vectors stays sorted."""
    va, vb = _pad_pair(a, b)
    out = np.minimum(va, vb)
    if out.size > 1 and np.any(np.diff(out) > 0.0):
        raise AssertionError("element-wise minimum lost sortedness")
    return SingularSpectrum(out)


def verify_equivalence_transform(
    channel: GaussianChannel,
    b_matrix,
    c_matrix,
    tolerance: float = 1e-9,
) -> EquivalenceReport:
    """Check that admissible processing (B at the input, C at the output)
    leaves the channel's equivalence class unchanged.

    Hypotheses: every singular value of B equals 1 (so B has orthonormal
    rows and operator norm 1) and C is left-invertible.  Violated hypotheses
    are reported, not raised; only dimension mismatches raise.
    """
    b = np.asarray(b_matrix, dtype=float)
    c = np.asarray(c_matrix, dtype=float)
    if b.ndim != 2 or c.ndim != 2:
        raise ValueError("B and C must be 2-D matrices")
    outputs, inputs = channel.H.shape
    if b.shape[0] != inputs:
        raise ValueError("B must accept the channel's input dimension")
    if c.shape[1] != outputs:
        raise ValueError("C must accept the channel's output dimension")

    if b.shape[0] > b.shape[1]:
        return EquivalenceReport(False, condition="B is not right-invertible")
    b_singulars = singular_values(b)
    if float(np.max(np.abs(b_singulars - 1.0))) > tolerance:
        return EquivalenceReport(False, condition="singular values of B not all 1")
    c_singulars = singular_values(c)
    if c.shape[0] < c.shape[1] or c_singulars[-1] <= 1e-12 * max(1.0, c_singulars[0]):
        return EquivalenceReport(False, condition="C is not left-invertible")
    try:
        transformed = GaussianChannel(c @ channel.H @ b, c @ channel.Sigma @ c.T)
    except ValueError:
        return EquivalenceReport(False, condition="transformed noise covariance not positive definite")

    original = canonicalize(channel)
    moved = canonicalize(transformed)
    length = max(original.values.size, moved.values.size)
    deviation = float(np.max(np.abs(moved.padded(length) - original.padded(length))))
    if deviation > tolerance:
        return EquivalenceReport(False, condition="canonical spectra differ", max_deviation=deviation)
    return EquivalenceReport(True, max_deviation=deviation)


def sample_haar_orthogonal(n: int, seed) -> np.ndarray:
    """Orthogonal matrix drawn from the rotation-invariant distribution.

    QR factorization of an i.i.d. Gaussian matrix, with the Q columns
    reflected so the R diagonal is positive -- without that correction the
    factor is not invariant.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    gauss = rng.standard_normal((n, n))
    q, r = np.linalg.qr(gauss)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


@dataclass(frozen=True)
class GaussianEntries:
    """Sampler: i.i.d. Gaussian entries times a scale."""

    rows: int
    cols: int
    scale: float = 1.0

    def __post_init__(self):
        if int(self.rows) < 1 or int(self.cols) < 1:
            raise ValueError("rows and cols must be positive")
        if not np.isfinite(self.scale):
            raise ValueError("scale must be finite")


@dataclass(frozen=True)
class HaarRotated:
    """Sampler: fresh orthogonal factors on both sides of a fixed matrix."""

    base: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        if base.ndim != 2 or not np.all(np.isfinite(base)):
            raise ValueError("base must be a finite 2-D matrix")
        object.__setattr__(self, "base", base)


@dataclass(frozen=True)
class FixedMatrix:
    """Sampler: the same matrix every draw."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim != 2 or not np.all(np.isfinite(matrix)):
            raise ValueError("matrix must be a finite 2-D matrix")
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class ExplicitMatrices:
    """Sampler: a user-supplied list of channel matrices, used in order."""

    matrices: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
        if not mats or any(m.ndim != 2 or not np.all(np.isfinite(m)) for m in mats):
            raise ValueError("need a nonempty list of finite 2-D matrices")
        object.__setattr__(self, "matrices", mats)


@dataclass(frozen=True)
class SingularEnsemble:
    """I.i.d. samples of sorted singular-value vectors."""

    samples: np.ndarray
    seed: int
    copula_note: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.size == 0 or not np.all(np.isfinite(samples)):
            raise ValueError("samples must form a nonempty finite 2-D array")
        if samples.shape[1] > 1 and np.any(np.diff(samples, axis=1) > 1e-12):
            raise ValueError("each sample must be sorted nonincreasing")
        samples = np.clip(samples, 0.0, None)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def spectrum_length(self) -> int:
        return self.samples.shape[1]


def _draw(sampler, index: int, seed: int) -> np.ndarray:
    # Substream keyed by (seed, index): reproducible and order-independent.
    if isinstance(sampler, GaussianEntries):
        rng = np.random.default_rng([seed, index])
        return sampler.scale * rng.standard_normal((sampler.rows, sampler.cols))
    if isinstance(sampler, HaarRotated):
        rows, cols = sampler.base.shape
        q_out = sample_haar_orthogonal(rows, [seed, index, 0])
        q_in = sample_haar_orthogonal(cols, [seed, index, 1])
        return q_out @ sampler.base @ q_in
    if isinstance(sampler, FixedMatrix):
        return sampler.matrix
    if isinstance(sampler, ExplicitMatrices):
        if index >= len(sampler.matrices):
            raise ValueError("not enough user-supplied matrices for the requested samples")
        return sampler.matrices[index]
    raise ValueError(f"unknown sampler: {sampler!r}")


def ensemble_from_sampler(sampler, n_samples: int, seed: int) -> SingularEnsemble:
    """Canonical spectra of sampled channel matrices (identity noise)."""
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    matrices = [_draw(sampler, i, int(seed)) for i in range(n_samples)]
    spectra = np.linalg.svd(np.stack(matrices), compute_uv=False)
    note = f"{type(sampler).__name__} sampler, seed-indexed substreams, seed={int(seed)}"
    return SingularEnsemble(spectra, seed=int(seed), copula_note=note)


@dataclass(frozen=True)
class EnsembleOrderDecision:
    """Empirical multivariate stochastic-order decision.

    ``direction`` names the stochastically larger ensemble ("first",
    "second", or "equal"); ``max_violation`` is the best direction's largest
    band-clipped CDF violation (0 when dominance holds everywhere) and
    ``max_margin`` the largest CDF separation in the winning direction.
    The common-copula assumption is the caller's responsibility and is
    recorded in ``note``.
    """

    ordered: bool
    direction: str | None
    max_margin: float
    max_violation: float
    band: float
    note: str


def ensemble_order(
    a: SingularEnsemble,
    b: SingularEnsemble,
    n_grid: int = 101,
    delta: float = 0.05,
) -> EnsembleOrderDecision:
    """Compare ensembles coordinate-wise on empirical marginal CDFs.

    Dominance must hold at every grid point of every coordinate within a
    DKW band of total failure probability ``delta`` (the band is the sum of
    the two one-sample band widths, which for equal sample counts N equals
    ``2 sqrt(ln(2/delta) / (2N))``).
    """
    if a.spectrum_length != b.spectrum_length:
        raise ValueError("ensembles must share one spectrum length")
    n_grid = int(n_grid)
    if n_grid < 2:
        raise ValueError("n_grid must be at least 2")
    band = sqrt(log(2.0 / delta) / (2.0 * a.n_samples)) + sqrt(
        log(2.0 / delta) / (2.0 * b.n_samples)
    )
    first_violation = 0.0  # how far "first dominates" fails
    second_violation = 0.0
    gap = 0.0
    for k in range(a.spectrum_length):
        xa = np.sort(a.samples[:, k])
        xb = np.sort(b.samples[:, k])
        lo = min(xa[0], xb[0])
        hi = max(xa[-1], xb[-1])
        grid = np.linspace(lo, hi, n_grid)
        fa = np.searchsorted(xa, grid, side="right") / a.n_samples
        fb = np.searchsorted(xb, grid, side="right") / b.n_samples
        first_violation = max(first_violation, float(np.max(fa - fb)))
        second_violation = max(second_violation, float(np.max(fb - fa)))
        gap = max(gap, float(np.max(np.abs(fa - fb))))
    note = "common copula assumed by the caller"
    first_ok = first_violation <= band
    second_ok = second_violation <= band
    if first_ok and second_ok:
        return EnsembleOrderDecision(True, "equal", gap, max(first_violation, second_violation), band, note)
    if first_ok:
        return EnsembleOrderDecision(True, "first", second_violation, first_violation, band, note)
    if second_ok:
        return EnsembleOrderDecision(True, "second", first_violation, second_violation, band, note)
    return EnsembleOrderDecision(
        False, None, gap, float(min(first_violation, second_violation)), band, note
    )


def _quantile_combine(a: SingularEnsemble, b: SingularEnsemble, combine) -> np.ndarray:
    if a.samples.shape != b.samples.shape:
        raise ValueError("ensembles must have identical shapes")
    sorted_a = np.sort(a.samples, axis=0)
    sorted_b = np.sort(b.samples, axis=0)
    combined = combine(sorted_a, sorted_b)
    ranks = a.samples.argsort(axis=0, kind="stable").argsort(axis=0, kind="stable")
    out = np.take_along_axis(combined, ranks, axis=0)
    # Re-sort within each sample: the per-coordinate quantile transform can
    # disturb the nonincreasing layout on rank ties.
    return np.sort(out, axis=1)[:, ::-1]


def ensemble_lub(a: SingularEnsemble, b: SingularEnsemble) -> SingularEnsemble:
    """Coordinate-wise quantile maximum realized on the first ensemble's copula."""
    samples = _quantile_combine(a, b, np.maximum)
    note = "quantile max of paired ensembles on the first ensemble's rank pattern"
    return SingularEnsemble(samples, seed=a.seed, copula_note=note)


def ensemble_glb(a: SingularEnsemble, b: SingularEnsemble) -> SingularEnsemble:
    """Coordinate-wise quantile minimum realized on the first ensemble's copula."""
    samples = _quantile_combine(a, b, np.minimum)
    note = "quantile min of paired ensembles on the first ensemble's rank pattern"
    return SingularEnsemble(samples, seed=a.seed, copula_note=note)


def to_json_dict(channel: GaussianChannel) -> dict:
    return {"type": "lgc", "H": channel.H.tolist(), "Sigma": channel.Sigma.tolist()}


def from_json_dict(obj: dict) -> GaussianChannel:
    if obj.get("type") != "lgc":
        raise ValueError("expected a document with type 'lgc'")
    return GaussianChannel(np.asarray(obj["H"], dtype=float), np.asarray(obj["Sigma"], dtype=float))


def ensemble_to_json_dict(ensemble: SingularEnsemble) -> dict:
    return {
        "type": "lgc_ensemble",
        "samples": ensemble.samples.tolist(),
        "seed": ensemble.seed,
        "copula_note": ensemble.copula_note,
    }


def ensemble_from_json_dict(obj: dict) -> SingularEnsemble:
    if obj.get("type") != "lgc_ensemble":
        raise ValueError("expected a document with type 'lgc_ensemble'")
    return SingularEnsemble(
        np.asarray(obj["samples"], dtype=float),
        seed=int(obj.get("seed", 0)),
        copula_note=str(obj.get("copula_note", "")),
    )
