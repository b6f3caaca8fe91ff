"""Random coordinate models, seeded streams, and exact enumeration oracles.

Two models of a random subset of ``{1, ..., n}``:

* ``fixed_cardinality``: uniform over all subsets of size ``m = floor(delta n)``
  (the projector written ``P_delta``);
* ``bernoulli``: each index kept independently with probability ``delta``
  (the projector ``R_delta``).

Every draw comes from a counter-based Philox generator keyed by
``(master_seed, stream_index)``, so trial ``i`` can be reproduced without
replaying trials ``0..i-1``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matrixcore import BoundedMatrix, DomainError, IndexSet
from .speclinalg import batch_largest_singular_values

MAX_ONE_SIDED_N = 16
MAX_TWO_SIDED_N = 12
_U64 = 1 << 64


class EnumerationGuardError(DomainError):
    """Exhaustive enumeration requested beyond the supported dimension."""


@dataclass(frozen=True)
class RandomSetModel:
    kind: str  # "fixed_cardinality" | "bernoulli"
    n: int
    parameter: float

    def __post_init__(self):
        if self.kind not in ("fixed_cardinality", "bernoulli"):
            raise DomainError(f"unknown model kind {self.kind!r}")
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if self.kind == "fixed_cardinality":
            m = int(self.parameter)
            if m != self.parameter or not 0 <= m <= self.n:
                raise DomainError(f"cardinality must be an integer in [0, {self.n}]")
            object.__setattr__(self, "parameter", m)
        elif not 0.0 <= self.parameter <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.parameter}")

    @classmethod
    def fixed(cls, n: int, delta: float) -> "RandomSetModel":
        """``P_delta``: exactly ``floor(delta * n)`` indices."""
        if not 0.0 <= delta <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {delta}")
        # guard against 0.3 * 10 = 2.9999999999999996
        m = math.floor(delta * n + 1e-9)
        return cls("fixed_cardinality", n, min(m, n))

    @classmethod
    def of_size(cls, n: int, m: int) -> "RandomSetModel":
        return cls("fixed_cardinality", n, m)

    @classmethod
    def bernoulli(cls, n: int, delta: float) -> "RandomSetModel":
        """``R_delta``: independent inclusion with probability ``delta``."""
        return cls("bernoulli", n, float(delta))

    @property
    def delta(self) -> float:
        """Nominal sampling proportion (``m / n`` for the fixed model)."""
        if self.kind == "fixed_cardinality":
            return self.parameter / self.n
        return self.parameter

    def weights(self) -> np.ndarray:
        """Probability of each subset, indexed by bitmask (bit ``j-1`` for index ``j``)."""
        sizes = _popcounts(self.n)
        if self.kind == "fixed_cardinality":
            m = self.parameter
            w = np.where(sizes == m, 1.0 / math.comb(self.n, m), 0.0)
        else:
            d = self.parameter
            w = np.array([d ** k * (1.0 - d) ** (self.n - k) for k in range(self.n + 1)])[sizes]
        return w


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= v < _U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def trial_stream(point: int, trial: int, side: int) -> int:
    """Stream index for one side (0 rows, 1 columns) of one trial at one grid point."""
    return (point << 40) | (trial << 1) | side


def _partial_fisher_yates(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    # swaps over a virtual array 0..n-1; only touched slots are stored
    targets = rng.integers(np.arange(m), n) if m else np.zeros(0, dtype=np.int64)
    slots: dict[int, int] = {}
    out = np.empty(m, dtype=np.int64)
    for i, j in enumerate(targets.tolist()):
        vi = slots.get(i, i)
        vj = slots.get(j, j)
        out[i] = vj
        slots[j] = vi
    out.sort()
    return out + 1


def sample_indices(model: RandomSetModel, rng: np.random.Generator) -> np.ndarray:
    """1-based sorted index array drawn from ``model`` using ``rng``."""
    if model.kind == "fixed_cardinality":
        return _partial_fisher_yates(rng, model.n, model.parameter)
    keep = rng.random(model.n) < model.parameter
    return np.flatnonzero(keep) + 1


def sample_set(model: RandomSetModel, seed: SeedSpec) -> IndexSet:
    return IndexSet(model.n, tuple(sample_indices(model, seed.generator()).tolist()))


def enumerate_sets(n: int, cardinality: int | None = None) -> list[IndexSet]:
    """All subsets of ``{1..n}`` (or those of one size), by size then lexicographically."""
    if n > MAX_ONE_SIDED_N:
        raise EnumerationGuardError(f"enumeration limited to n <= {MAX_ONE_SIDED_N}, got {n}")
    sizes = range(n + 1) if cardinality is None else [cardinality]
    out = []
    for k in sizes:
        if not 0 <= k <= n:
            raise DomainError(f"cardinality {k} outside [0, {n}]")
        out.extend(IndexSet(n, c) for c in itertools.combinations(range(1, n + 1), k))
    return out


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    return np.array([bin(x).count("1") for x in masks.tolist()], dtype=np.int64)


@lru_cache(maxsize=None)
def _masks_by_size(n: int) -> tuple[np.ndarray, ...]:
    pc = _popcounts(n)
    return tuple(np.flatnonzero(pc == k) for k in range(n + 1))


def _mask_members(n: int, masks: np.ndarray) -> np.ndarray:
    """``(len(masks), k)`` array of 0-based members for masks of common size ``k``."""
    bits = (masks[:, None] >> np.arange(n)[None, :]) & 1
    return np.nonzero(bits)[1].reshape(len(masks), -1)


@lru_cache(maxsize=8)
def _two_sided_table(a: BoundedMatrix, power: int | None = None) -> np.ndarray:
    n = a.n
    if n > MAX_TWO_SIDED_N:
        raise EnumerationGuardError(
            f"two-sided enumeration limited to n <= {MAX_TWO_SIDED_N}, got {n}")
    dense = a.dense()
    table = np.zeros((1 << n, 1 << n))
    by_size = _masks_by_size(n)
    members = [np.zeros((1, 0), dtype=np.int64)]
    members += [_mask_members(n, by_size[k]) for k in range(1, n + 1)]
    for rmask in range(1, 1 << n):
        rows = np.flatnonzero((rmask >> np.arange(n)) & 1)
        sub = dense[rows]  # |rows| x n
        for k in range(1, n + 1):
            cols = members[k]  # (K, k)
            stack = np.transpose(sub[:, cols], (1, 0, 2))  # (K, |rows|, k)
            if power is None:
                table[rmask, by_size[k]] = batch_largest_singular_values(stack)
            else:
                sv = np.linalg.svd(stack, compute_uv=False)
                table[rmask, by_size[k]] = np.sum(sv ** (2 * power), axis=1)
    return table


def pair_norm_table(a: BoundedMatrix) -> np.ndarray:
    """``table[r, c] = ||A[rows(r), cols(c)]||`` for every pair of bitmasks."""
    return _two_sided_table(a)


def pair_trace_table(a: BoundedMatrix, q: int) -> np.ndarray:
    """``table[r, c] = trace((M^* M)^q)`` for ``M = A[rows(r), cols(c)]``."""
    return _two_sided_table(a, int(q))


@lru_cache(maxsize=8)
def row_norm_table(a: BoundedMatrix) -> np.ndarray:
    """``table[r] = ||A[rows(r), :]||`` for every row bitmask."""
    n = a.n
    if n > MAX_ONE_SIDED_N:
        raise EnumerationGuardError(
            f"one-sided enumeration limited to n <= {MAX_ONE_SIDED_N}, got {n}")
    dense = a.dense()
    table = np.zeros(1 << n)
    for k, masks in enumerate(_masks_by_size(n)):
        if k == 0:
            continue
        rows = _mask_members(n, masks)
        table[masks] = batch_largest_singular_values(dense[rows])
    return table


def mask_of(s: IndexSet) -> int:
    return sum(1 << (i - 1) for i in s)


def exact_tail_probability(a: BoundedMatrix, model: RandomSetModel,
                           two_sided: bool, u: float) -> float:
    """Exact ``P(||projected A|| >= u)`` by enumerating every outcome.

    One-sided projects rows only (``||P A||``); two-sided applies independent
    row and column projectors from the same model (``||P A P'||``).
    """
    if model.n != a.n:
        raise DomainError("model and matrix dimensions differ")
    w = model.weights()
    if two_sided:
        hit = pair_norm_table(a) >= u
        return float(w @ (hit.astype(np.float64) @ w))
    hit = row_norm_table(a) >= u
    return float(np.sum(w[hit]))


def exact_moment(a: BoundedMatrix, model: RandomSetModel, q: int,
                 col_model: RandomSetModel | None = None) -> float:
    """Exact ``E ||R A R'||^{2q}`` over independent row/column draws."""
    wr = model.weights()
    wc = (col_model or model).weights()
    return float(wr @ (pair_norm_table(a) ** (2 * q)) @ wc)


def exact_moment_root(a: BoundedMatrix, model: RandomSetModel, q: int) -> float:
    return exact_moment(a, model, q) ** (1.0 / (2 * q))


def trace_moment(a: BoundedMatrix, s: float, q: int) -> float:
    """``p(s) = E trace((R_s A R_s')^* (R_s A R_s'))^q`` computed exactly."""
    w = RandomSetModel.bernoulli(a.n, s).weights()
    return float(w @ pair_trace_table(a, q) @ w)


def trace_moment_coefficients(a: BoundedMatrix, q: int) -> np.ndarray:
    """Monomial coefficients ``c_0, ..., c_{2n}`` of ``p(s)``.

    Grouping outcomes by total size ``k = |S| + |S'|`` gives
    ``p(s) = sum_k g_k s^k (1-s)^{2n-k}``, expanded here in the power basis.
    """
    n = a.n
    table = pair_trace_table(a, q)
    pc = _popcounts(n)
    total = pc[:, None] + pc[None, :]
    g = np.bincount(total.ravel(), weights=table.ravel(), minlength=2 * n + 1)
    coeffs = np.zeros(2 * n + 1)
    P = np.polynomial.polynomial
    for k in range(2 * n + 1):
        if g[k] == 0.0:
            continue
        term = P.polymul(np.eye(1, k + 1, k)[0], P.polypow([1.0, -1.0], 2 * n - k))
        coeffs[: term.size] += g[k] * term
    return coeffs
