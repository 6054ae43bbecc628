"""Phase-degraded channels as distributions on the torus.

A channel whose gain and noise phases are random is captured by the joint
distribution of the two angles, represented here by a truncated grid of its
two-dimensional characteristic-function coefficients.  Applying a random
input/output phase pair multiplies that grid pointwise with the coefficient
grid of the pair ``(output + input phase, output phase)``, so degradation,
extremal channels, and the can-it-be-undone test all live in the coefficient
domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "EPS_GIBBS",
    "TorusSpectrum",
    "PhaseDegradation",
    "WrappedGaussian",
    "WrappedCauchy",
    "UniformPhase",
    "PointPhase",
    "Strictness",
    "StrictnessResult",
    "from_wrapped",
    "product_channel",
    "from_grid",
    "joint_from_marginals",
    "degradation_coeffs",
    "degrade",
    "is_strict",
    "worst_channel",
    "output_uniformizing_degradation",
    "input_uniformizing_degradation",
    "wrapped_lub",
    "wrapped_glb",
    "to_json_dict",
    "from_json_dict",
]

EPS_GIBBS = 1e-6

_ROLES = ("channel", "degradation")
_HERMITIAN_TOL = 1e-12
_MAGNITUDE_TOL = 1e-12


@dataclass(frozen=True)
class TorusSpectrum:
    """Truncated characteristic-function grid of a torus distribution.

    ``coeffs[m + order, n + order]`` holds the coefficient at frequency
    ``(m, n)`` for ``m, n`` in ``[-order, order]``.  Construction enforces a
    unit coefficient at the origin, Hermitian symmetry, magnitudes at most 1,
    and nonnegativity of the smoothed reconstruction: the raw truncated
    partial sum oscillates below zero for perfectly legitimate atomic
    distributions, so the check convolves with the nonnegative triangular
    (Fejer) kernel, which is nonnegative for every genuine distribution and
    still rejects grids that are not characteristic coefficients at all.
    """

    order: int
    coeffs: np.ndarray
    role: str = "channel"

    def __post_init__(self):
        order = int(self.order)
        if order < 1:
            raise ValueError("order must be at least 1")
        coeffs = np.asarray(self.coeffs, dtype=complex)
        side = 2 * order + 1
        if coeffs.shape != (side, side):
            raise ValueError(f"coeffs must have shape {(side, side)}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coeffs must be finite")
        if self.role not in _ROLES:
            raise ValueError(f"role must be one of {_ROLES}")
        if abs(coeffs[order, order] - 1.0) > _HERMITIAN_TOL:
            raise ValueError("the coefficient at the origin must equal 1")
        hermitian_gap = float(np.max(np.abs(np.conj(np.flip(coeffs)) - coeffs)))
        if hermitian_gap > _HERMITIAN_TOL:
            raise ValueError(f"coefficients are not Hermitian: gap {hermitian_gap:.3e}")
        magnitudes = np.abs(coeffs)
        if float(magnitudes.max()) > 1.0 + _MAGNITUDE_TOL:
            raise ValueError("coefficient magnitudes must not exceed 1")
        low = _smoothed_min(order, coeffs)
        if low < -EPS_GIBBS:
            raise ValueError(f"reconstructed density dips to {low:.3e}; not a distribution")
        coeffs.setflags(write=False)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def coefficient(self, m: int, n: int) -> complex:
        """Coefficient at frequency ``(m, n)``."""
        if abs(m) > self.order or abs(n) > self.order:
            raise ValueError("frequency outside the truncation order")
        return complex(self.coeffs[m + self.order, n + self.order])


def _smoothed_min(order: int, coeffs: np.ndarray) -> float:
    weights = 1.0 - np.abs(np.arange(-order, order + 1)) / (order + 1.0)
    smoothed = coeffs * np.outer(weights, weights)
    points = max(4 * order, 8)
    theta = 2.0 * np.pi * np.arange(points) / points
    basis = np.exp(-1j * np.outer(theta, np.arange(-order, order + 1)))
    density = np.real(basis @ smoothed @ basis.T) / (2.0 * np.pi) ** 2
    return float(density.min())


@dataclass(frozen=True)
class WrappedGaussian:
    """Gaussian law wrapped on the circle; coefficients exp(jm*mean - sigma2*m^2/2)."""

    mean: float = 0.0
    sigma2: float = 1.0


@dataclass(frozen=True)
class WrappedCauchy:
    """Cauchy law wrapped on the circle; coefficients exp(jm*mean - gamma*|m|)."""

    mean: float = 0.0
    gamma: float = 1.0


@dataclass(frozen=True)
class UniformPhase:
    """Uniform angle; coefficients are the Kronecker delta."""


@dataclass(frozen=True)
class PointPhase:
    """Deterministic angle; coefficients exp(jm*angle)."""

    angle: float = 0.0


def from_wrapped(family, order: int) -> np.ndarray:
    """Characteristic sequence of a parametric circular family.

    Returns the ``2*order + 1`` coefficients at frequencies
    ``-order .. order``, sampled from the continuous characteristic function
    of the unwrapped law.
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1")
    m = np.arange(-order, order + 1)
    if isinstance(family, WrappedGaussian):
        if family.sigma2 < 0.0:
            raise ValueError("sigma2 must be nonnegative")
        return np.exp(1j * m * family.mean - family.sigma2 * m.astype(float) ** 2 / 2.0)
    if isinstance(family, WrappedCauchy):
        if family.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        return np.exp(1j * m * family.mean - family.gamma * np.abs(m))
    if isinstance(family, UniformPhase):
        return (m == 0).astype(complex)
    if isinstance(family, PointPhase):
        return np.exp(1j * m * family.angle)
    raise ValueError(f"unknown circular family: {family!r}")


def _validate_sequence(seq) -> np.ndarray:
    seq = np.asarray(seq, dtype=complex).ravel()
    if seq.size < 3 or seq.size % 2 == 0:
        raise ValueError("a coefficient sequence must have odd length >= 3")
    return seq


def product_channel(h_marginal, v_marginal) -> TorusSpectrum:
    """Channel spectrum for independent gain and noise phases.

    The grid factorizes into the outer product of the two marginal
    sequences; all spectrum invariants are enforced on assembly.
    """
    h = _validate_sequence(h_marginal)
    v = _validate_sequence(v_marginal)
    if h.size != v.size:
        raise ValueError("marginal sequences must share one order")
    order = (h.size - 1) // 2
    return TorusSpectrum(order, np.outer(h, v), role="channel")


def from_grid(pdf_samples, order: int, role: str = "channel") -> TorusSpectrum:
    """Spectrum of a density sampled on a uniform grid over the torus.

    The samples are renormalized to a probability measure on the grid nodes
    and the coefficients are the exact transform of that discrete measure.
    """
    pdf = np.asarray(pdf_samples, dtype=float)
    if pdf.ndim != 2 or pdf.size == 0:
        raise ValueError("pdf_samples must form a nonempty 2-D grid")
    if not np.all(np.isfinite(pdf)) or float(pdf.min()) < 0.0:
        raise ValueError("pdf_samples must be finite and nonnegative")
    total = float(pdf.sum())
    if total <= 0.0:
        raise ValueError("pdf_samples must not be identically zero")
    weights = pdf / total
    order = int(order)
    m = np.arange(-order, order + 1)
    theta_rows = 2.0 * np.pi * np.arange(pdf.shape[0]) / pdf.shape[0]
    theta_cols = 2.0 * np.pi * np.arange(pdf.shape[1]) / pdf.shape[1]
    row_basis = np.exp(1j * np.outer(m, theta_rows))
    col_basis = np.exp(1j * np.outer(m, theta_cols))
    coeffs = row_basis @ weights @ col_basis.T
    coeffs[order, order] = 1.0
    return TorusSpectrum(order, coeffs, role=role)


@dataclass(frozen=True)
class PhaseDegradation:
    """Joint law of the input/output phase pair applied to a channel.

    ``joint`` holds the coefficients ``E[exp(j(p*input + q*output))]`` of the
    raw pair; reindexing (see ``degradation_coeffs``) turns it into the grid
    that multiplies channel spectra.
    """

    joint: TorusSpectrum


def joint_from_marginals(input_family, output_family, order: int) -> PhaseDegradation:
    """Degradation with independent input and output phases."""
    i_seq = from_wrapped(input_family, order)
    o_seq = from_wrapped(output_family, order)
    return PhaseDegradation(TorusSpectrum(int(order), np.outer(i_seq, o_seq), role="channel"))


def degradation_coeffs(degradation: PhaseDegradation, order: int | None = None) -> TorusSpectrum:
    """Reindex a joint phase law into the multiplicative degradation grid.

    The grid entry at ``(m, n)`` is the joint coefficient at
    ``(m, m + n)``, which needs the joint spectrum to extend to twice the
    requested order.
    """
    joint = degradation.joint
    if order is None:
        order = joint.order // 2
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1")
    if joint.order < 2 * order:
        raise ValueError(
            f"joint order {joint.order} too small: need at least {2 * order} for order {order}"
        )
    offset = joint.order
    m = np.arange(-order, order + 1)
    out = np.empty((2 * order + 1, 2 * order + 1), dtype=complex)
    for i, mm in enumerate(m):
        out[i, :] = joint.coeffs[mm + offset, (mm + m) + offset]
    return TorusSpectrum(order, out, role="degradation")


def degrade(channel: TorusSpectrum, degradation: TorusSpectrum) -> TorusSpectrum:
    """Apply a phase degradation: pointwise product of coefficient grids."""
    if channel.role != "channel":
        raise ValueError("first argument must be a channel spectrum")
    if degradation.role != "degradation":
        raise ValueError("second argument must be a degradation spectrum")
    if channel.order != degradation.order:
        raise ValueError("channel and degradation orders must match")
    return TorusSpectrum(channel.order, channel.coeffs * degradation.coeffs, role="channel")


class Strictness(Enum):
    STRICT = "strict"
    UNDOABLE = "undoable"
    NULL_CHANNEL = "null_channel"


@dataclass(frozen=True)
class StrictnessResult:
    """Classification of a degradation against a channel.

    ``witness`` is set only for UNDOABLE: one frequency ``(m, n)`` on the
    channel support where the degradation keeps unit magnitude (the linear
    relation behind it uses the integers ``a = m`` and ``b = m + n``).
    """

    kind: Strictness
    witness: tuple[int, int] | None = None


def is_strict(
    channel: TorusSpectrum,
    degradation: TorusSpectrum,
    epsilon: float = 1e-9,
) -> StrictnessResult:
    """Decide whether a degradation can be undone by another one.

    Undoing requires the degradation grid to keep magnitude 1 everywhere on
    the channel's support (origin excluded); if it shrinks any supported
    coefficient the degradation is strict.  A channel with no support off
    the origin is the null (worst) channel and is excluded.  Support is
    judged against ``epsilon``, and only frequencies other than the origin
    count (the origin satisfies the unit-magnitude relation trivially).
    """
    if channel.role != "channel":
        raise ValueError("first argument must be a channel spectrum")
    if degradation.role != "degradation":
        raise ValueError("second argument must be a degradation spectrum")
    if channel.order != degradation.order:
        raise ValueError("channel and degradation orders must match")
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    order = channel.order
    support = np.abs(channel.coeffs) > epsilon
    support[order, order] = False
    if not support.any():
        return StrictnessResult(Strictness.NULL_CHANNEL)
    weak = support & (np.abs(degradation.coeffs) < 1.0 - epsilon)
    if weak.any():
        return StrictnessResult(Strictness.STRICT)
    rows, cols = np.nonzero(support)
    return StrictnessResult(Strictness.UNDOABLE, witness=(int(rows[0] - order), int(cols[0] - order)))


def worst_channel(order: int) -> TorusSpectrum:
    """Channel with both phases uniform and independent: the absorbing bottom."""
    order = int(order)
    coeffs = np.zeros((2 * order + 1, 2 * order + 1), dtype=complex)
    coeffs[order, order] = 1.0
    return TorusSpectrum(order, coeffs, role="channel")


def output_uniformizing_degradation(order: int) -> TorusSpectrum:
    """Degradation that uniformizes the noise phase for a fixed gain phase.

    Realized by an output phase that is uniform with the input phase set to
    its negation; the grid keeps only the ``n = 0`` column, so a degraded
    channel keeps exactly its gain-phase marginal.
    """
    order = int(order)
    coeffs = np.zeros((2 * order + 1, 2 * order + 1), dtype=complex)
    coeffs[:, order] = 1.0
    return TorusSpectrum(order, coeffs, role="degradation")


def input_uniformizing_degradation(order: int) -> TorusSpectrum:
    """Degradation by a uniform input phase: keeps only the noise-phase marginal."""
    order = int(order)
    coeffs = np.zeros((2 * order + 1, 2 * order + 1), dtype=complex)
    coeffs[order, :] = 1.0
    return TorusSpectrum(order, coeffs, role="degradation")


def _same_family_means(a, b):
    if type(a) is not type(b):
        raise ValueError("lattice operations need two members of one wrapped family")
    if abs(a.mean - b.mean) > 1e-12:
        raise ValueError("lattice operations need equal means")


def wrapped_lub(a, b):
    """Scale maximum within one wrapped family (the noisier member)."""
    _same_family_means(a, b)
    if isinstance(a, WrappedGaussian):
        return WrappedGaussian(a.mean, max(a.sigma2, b.sigma2))
    if isinstance(a, WrappedCauchy):
        return WrappedCauchy(a.mean, max(a.gamma, b.gamma))
    raise ValueError("lattice operations cover WrappedGaussian and WrappedCauchy")


def wrapped_glb(a, b):
    """Scale minimum within one wrapped family (the cleaner member)."""
    _same_family_means(a, b)
    if isinstance(a, WrappedGaussian):
        return WrappedGaussian(a.mean, min(a.sigma2, b.sigma2))
    if isinstance(a, WrappedCauchy):
        return WrappedCauchy(a.mean, min(a.gamma, b.gamma))
    raise ValueError("lattice operations cover WrappedGaussian and WrappedCauchy")


def to_json_dict(spectrum: TorusSpectrum) -> dict:
    """JSON object for a spectrum file: row-major [re, im] pairs."""
    flat = spectrum.coeffs.ravel()
    return {
        "type": "torus",
        "order": spectrum.order,
        "coeffs": [[float(c.real), float(c.imag)] for c in flat],
        "role": spectrum.role,
    }


def from_json_dict(obj: dict) -> TorusSpectrum:
    if obj.get("type") != "torus":
        raise ValueError("expected a document with type 'torus'")
    order = int(obj["order"])
    side = 2 * order + 1
    flat = np.array([complex(re, im) for re, im in obj["coeffs"]], dtype=complex)
    if flat.size != side * side:
        raise ValueError("coefficient list length does not match the order")
    return TorusSpectrum(order, flat.reshape(side, side), role=obj.get("role", "channel"))
