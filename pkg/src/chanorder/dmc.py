"""Inclusion order over discrete memoryless channels.

A channel is included in another when it can be written as a convex mixture
of deterministic input/output degradations of the better channel.  The
decision reduces to a finite convex-hull membership problem over all 0/1
degradation pairs, solved with a certificate either way.  A brute-force
best-codebook oracle is provided to exercise the error-probability
monotonicity of the order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .numerics import FeasibilityProblem, solve_feasibility

__all__ = [
    "ENUMERATION_CAP",
    "EnumerationTooLargeError",
    "StochasticMatrix",
    "DeterministicPair",
    "InclusionWitness",
    "InclusionDecision",
    "bsc",
    "degradation_products",
    "includes",
    "equivalent",
    "degrade",
    "best_error_probability",
    "to_json_dict",
    "from_json_dict",
    "witness_to_json_dict",
    "witness_from_json_dict",
]

ENUMERATION_CAP = 1_000_000

_ROW_SUM_TOL = 1e-12
_ENTRY_TOL = 1e-12


class EnumerationTooLargeError(ValueError):
    """Raised when an exhaustive search would exceed the configured cap."""

    def __init__(self, count: int, cap: int, what: str = "candidates"):
        super().__init__(f"enumeration too large: {count} {what} exceeds the cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic matrix of transition probabilities, inputs x outputs.

    Rows must sum to 1 within 1e-12 and entries must lie in
    ``[-1e-12, 1 + 1e-12]``; entries are clamped to ``[0, 1]`` on
    construction.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.size == 0:
            raise ValueError("entries must form a nonempty 2-D matrix")
        if not np.all(np.isfinite(entries)):
            raise ValueError("entries must be finite")
        if float(entries.min()) < -_ENTRY_TOL or float(entries.max()) > 1.0 + _ENTRY_TOL:
            raise ValueError("entries must lie in [0, 1]")
        sums = entries.sum(axis=1)
        off = np.abs(sums - 1.0)
        if float(off.max()) > _ROW_SUM_TOL:
            row = int(np.argmax(off))
            raise ValueError(f"row {row} sums to {sums[row]!r}, expected 1")
        entries = np.clip(entries, 0.0, 1.0)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n_inputs(self) -> int:
        return self.entries.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.entries.shape[1]


def bsc(crossover: float) -> StochasticMatrix:
    """Binary symmetric channel with the given crossover probability."""
    p = float(crossover)
    if not 0.0 <= p <= 1.0:
        raise ValueError("crossover probability must lie in [0, 1]")
    return StochasticMatrix(np.array([[1.0 - p, p], [p, 1.0 - p]]))


@dataclass(frozen=True)
class DeterministicPair:
    """One deterministic input/output degradation.

    ``input_map[w]`` is the better-channel input fed when the degraded
    channel's input is ``w`` (the 0/1 input-degradation matrix);
    ``output_map[j]`` is the degraded-channel output emitted when the better
    channel produces output ``j`` (the 0/1 output-degradation matrix).
    """

    input_map: tuple[int, ...]
    output_map: tuple[int, ...]

    def __post_init__(self):
        input_map = tuple(int(v) for v in self.input_map)
        output_map = tuple(int(v) for v in self.output_map)
        if not input_map or not output_map:
            raise ValueError("maps must be total on nonempty domains")
        if min(input_map) < 0 or min(output_map) < 0:
            raise ValueError("map values must be nonnegative indices")
        object.__setattr__(self, "input_map", input_map)
        object.__setattr__(self, "output_map", output_map)

    def apply(self, channel: StochasticMatrix, n_outputs: int | None = None) -> np.ndarray:
        """Raw matrix of the degraded channel R @ K @ T for this pair."""
        if max(self.input_map) >= channel.n_inputs:
            raise ValueError("input_map addresses a missing channel input")
        if len(self.output_map) != channel.n_outputs:
            raise ValueError("output_map must be total on the channel outputs")
        if n_outputs is None:
            n_outputs = 1 + max(self.output_map)
        if max(self.output_map) >= n_outputs:
            raise ValueError("output_map addresses a missing degraded output")
        k = channel.entries
        collapsed = np.zeros((channel.n_inputs, n_outputs))
        for j, z in enumerate(self.output_map):
            collapsed[:, z] += k[:, j]
        return collapsed[list(self.input_map), :]


@dataclass(frozen=True)
class InclusionWitness:
    """Convex mixture of deterministic pairs reproducing the worse channel."""

    pairs: tuple[DeterministicPair, ...]
    weights: np.ndarray
    residual: float

    def replay(self, better: StochasticMatrix, n_outputs: int | None = None) -> StochasticMatrix:
        return degrade(better, self.pairs, self.weights, n_outputs=n_outputs)


@dataclass(frozen=True)
class InclusionDecision:
    """Result of an inclusion query: a witness or a separating functional."""

    included: bool
    witness: InclusionWitness | None = None
    separator: np.ndarray | None = None
    margin: float | None = None


def degradation_products(
    better: StochasticMatrix,
    worse_shape: tuple[int, int],
    cap: int = ENUMERATION_CAP,
) -> tuple[np.ndarray, list[DeterministicPair]]:
    """Vectorized products R @ K @ T over all deterministic pairs.

    Duplicate products are dropped (keeping the first pair that produced
    them).  Returns the candidate matrix with one vectorized product per row,
    together with the matching pairs.  Raises EnumerationTooLargeError when
    ``n1**n2 * m2**m1`` exceeds the cap.
    """
    n1, m1 = better.n_inputs, better.n_outputs
    n2, m2 = int(worse_shape[0]), int(worse_shape[1])
    if n2 < 1 or m2 < 1:
        raise ValueError("worse_shape must be positive")
    count = n1**n2 * m2**m1
    if count > cap:
        raise EnumerationTooLargeError(count, cap, what="deterministic input/output pairs")

    input_maps = np.array(list(itertools.product(range(n1), repeat=n2)), dtype=int)
    k = better.entries
    rows: list[np.ndarray] = []
    pairs: list[DeterministicPair] = []
    seen: set[bytes] = set()
    for output_map in itertools.product(range(m2), repeat=m1):
        collapsed = np.zeros((n1, m2))
        for j, z in enumerate(output_map):
            collapsed[:, z] += k[:, j]
        block = collapsed[input_maps].reshape(len(input_maps), -1)
        for i in range(len(input_maps)):
            key = block[i].tobytes()
            if key in seen:
                continue
            seen.add(key)
            rows.append(block[i])
            pairs.append(DeterministicPair(tuple(int(v) for v in input_maps[i]), output_map))
    return np.asarray(rows), pairs


def includes(
    better: StochasticMatrix,
    worse: StochasticMatrix,
    tolerance: float = 1e-9,
    cap: int = ENUMERATION_CAP,
) -> InclusionDecision:
    """Decide whether ``better`` includes ``worse``.

    Included results carry a witness (pairs plus mixture weights) that
    replays the worse channel within the tolerance.  NotIncluded results
    carry a separating functional with strictly positive margin against
    every candidate product.
    """
    candidates, pairs = degradation_products(better, (worse.n_inputs, worse.n_outputs), cap=cap)
    problem = FeasibilityProblem(candidates, worse.entries.ravel(), tolerance)
    certificate = solve_feasibility(problem)
    if certificate.feasible:
        support = np.nonzero(certificate.weights > 0.0)[0]
        witness = InclusionWitness(
            pairs=tuple(pairs[i] for i in support),
            weights=certificate.weights[support].copy(),
            residual=certificate.residual,
        )
        return InclusionDecision(True, witness=witness)
    return InclusionDecision(False, separator=certificate.separator, margin=certificate.residual)


def equivalent(
    a: StochasticMatrix,
    b: StochasticMatrix,
    tolerance: float = 1e-9,
    cap: int = ENUMERATION_CAP,
) -> bool:
    """True when each channel includes the other."""
    return (
        includes(a, b, tolerance=tolerance, cap=cap).included
        and includes(b, a, tolerance=tolerance, cap=cap).included
    )


def degrade(
    channel: StochasticMatrix,
    pairs,
    weights,
    n_outputs: int | None = None,
) -> StochasticMatrix:
    """Convex mixture of deterministic degradations of ``channel``.

    Weights must be nonnegative and sum to 1 within 1e-9; they are
    renormalized to unit total so the result is exactly row-stochastic.
    The result is always included in ``channel`` by construction.
    """
    pairs = tuple(pairs)
    weights = np.asarray(weights, dtype=float).ravel()
    if not pairs or weights.size != len(pairs):
        raise ValueError("need one weight per deterministic pair")
    if float(weights.min()) < -1e-12:
        raise ValueError("weights must be nonnegative")
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights sum to {total!r}, expected 1")
    weights = np.clip(weights, 0.0, None) / total
    n2 = len(pairs[0].input_map)
    if any(len(p.input_map) != n2 for p in pairs):
        raise ValueError("all input maps must share one domain size")
    if any(len(p.output_map) != channel.n_outputs for p in pairs):
        raise ValueError("all output maps must be total on the channel outputs")
    if n_outputs is None:
        n_outputs = 1 + max(max(p.output_map) for p in pairs)
    mixed = np.zeros((n2, int(n_outputs)))
    for pair, w in zip(pairs, weights):
        if w > 0.0:
            mixed += w * pair.apply(channel, n_outputs=int(n_outputs))
    return StochasticMatrix(mixed)


def best_error_probability(
    channel: StochasticMatrix,
    n_messages: int,
    block_length: int,
    cap: int = ENUMERATION_CAP,
) -> float:
    """Exact minimum average error probability over all deterministic codebooks.

    Exhausts every codebook of ``n_messages`` input sequences of the given
    block length on the memoryless extension of the channel, decoding by
    maximum likelihood with uniform messages (ties resolved toward the
    lowest message index, which does not change the achieved minimum).
    """
    n_messages, block_length = int(n_messages), int(block_length)
    if n_messages < 1 or block_length < 1:
        raise ValueError("n_messages and block_length must be positive")
    n_seq = channel.n_inputs**block_length
    count = n_seq**n_messages
    if count > cap:
        raise EnumerationTooLargeError(count, cap, what="codebooks")

    extension = channel.entries
    for _ in range(block_length - 1):
        extension = np.kron(extension, channel.entries)

    best_correct = 0.0
    codebooks = itertools.product(range(n_seq), repeat=n_messages)
    while True:
        chunk = list(itertools.islice(codebooks, 4096))
        if not chunk:
            break
        probs = extension[np.asarray(chunk)]
        correct = probs.max(axis=1).sum(axis=1)
        best_correct = max(best_correct, float(correct.max()))
    error = 1.0 - best_correct / n_messages
    return float(min(1.0, max(0.0, error)))


def to_json_dict(channel: StochasticMatrix) -> dict:
    """JSON object for a channel file: {"type": "dmc", "matrix": [[...]]}."""
    return {"type": "dmc", "matrix": channel.entries.tolist()}


def from_json_dict(obj: dict) -> StochasticMatrix:
    if obj.get("type") != "dmc":
        raise ValueError("expected a document with type 'dmc'")
    return StochasticMatrix(np.asarray(obj["matrix"], dtype=float))


def witness_to_json_dict(witness: InclusionWitness) -> dict:
    return {
        "weights": np.asarray(witness.weights, dtype=float).tolist(),
        "pairs": [
            {"input_map": list(p.input_map), "output_map": list(p.output_map)}
            for p in witness.pairs
        ],
    }


def witness_from_json_dict(obj: dict) -> InclusionWitness:
    pairs = tuple(
        DeterministicPair(tuple(p["input_map"]), tuple(p["output_map"]))
        for p in obj["pairs"]
    )
    weights = np.asarray(obj["weights"], dtype=float)
    if weights.size != len(pairs):
        raise ValueError("witness weights and pairs disagree in length")
    return InclusionWitness(pairs=pairs, weights=weights, residual=0.0)
