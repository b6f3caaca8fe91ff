"""Matrix model: the DFT and other bounded matrices, index sets, submatrices.

Indices are 1-based throughout, so an index set is a subset of ``{1, ..., n}``.
The full ``n x n`` matrix is never materialized except on explicit request
(:meth:`BoundedMatrix.dense`); submatrices are generated entrywise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class IndexSet:
    """A subset of ``{1, ..., n}`` stored as a strictly increasing tuple."""

    n: int
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"ambient dimension must be positive, got {self.n}")
        idx = tuple(int(i) for i in self.indices)
        for a, b in zip(idx, idx[1:]):
            if b <= a:
                raise DomainError(f"indices must be strictly increasing: {idx}")
        if idx and (idx[0] < 1 or idx[-1] > self.n):
            raise DomainError(f"indices must lie in [1, {self.n}]: {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, n: int, items: Iterable[int]) -> "IndexSet":
        """Build from any iterable; sorts, rejects duplicates."""
        items = [int(i) for i in items]
        if len(set(items)) != len(items):
            raise DomainError(f"duplicate indices in {items}")
        return cls(n, tuple(sorted(items)))

    @classmethod
    def parse(cls, n: int, text: str) -> "IndexSet":
        """Parse the comma-separated text format, e.g. ``"4,8,12,16"``."""
        text = text.strip()
        if not text:
            return cls(n, ())
        try:
            items = [int(tok) for tok in text.split(",")]
        except ValueError as exc:
            raise DomainError(f"cannot parse index set {text!r}") from exc
        return cls.of(n, items)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def block(cls, n: int, start: int, size: int) -> "IndexSet":
        """Cyclic block ``{start+1, ..., start+size}`` reduced into ``[1, n]``."""
        if not 0 <= size <= n:
            raise DomainError(f"block size {size} outside [0, {n}]")
        return cls.of(n, [((start + k) % n) + 1 for k in range(size)])

    def to_text(self) -> str:
        return ",".join(str(i) for i in self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, item) -> bool:
        return item in self.indices


@lru_cache(maxsize=16)
def _dft_roots(n: int) -> np.ndarray:
    # table of n^{-1/2} exp(2 pi i k / n), k = 0..n-1
    k = np.arange(n, dtype=np.float64)
    return np.exp(2j * np.pi * k / n) / math.sqrt(n)


def _dft_block(n: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    phase = np.outer(rows % n, cols % n) % n
    return _dft_roots(n)[phase]


@dataclass(frozen=True)
class BoundedMatrix:
    """An ``n x n`` complex matrix given by a vectorized entry function.

    ``entry_fn(rows, cols)`` receives 1-based integer arrays of row and
    column indices and must return the ``len(rows) x len(cols)`` block.
    The theorems for random submatrices apply when ``declared_norm_bound``
    is 1 and ``declared_entry_bound`` is ``n ** -0.5``.
    """

    n: int
    entry_fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    declared_norm_bound: float = 1.0
    declared_entry_bound: float | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"dimension must be positive, got {self.n}")
        if self.declared_entry_bound is None:
            object.__setattr__(self, "declared_entry_bound", 1.0 / math.sqrt(self.n))

    def block(self, rows, cols) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        if rows.size == 0 or cols.size == 0:
            return np.zeros((rows.size, cols.size), dtype=np.complex128)
        return np.asarray(self.entry_fn(rows, cols), dtype=np.complex128)

    def entry(self, omega: int, t: int) -> complex:
        return complex(self.block([omega], [t])[0, 0])

    def dense(self, max_n: int = 4096) -> np.ndarray:
        """Materialize the whole matrix; refused beyond ``max_n``."""
        if self.n > max_n:
            raise DomainError(f"refusing to materialize a {self.n}x{self.n} matrix")
        idx = np.arange(1, self.n + 1)
        return self.block(idx, idx)

    @property
    def theorem_applicable(self) -> bool:
        return (self.declared_norm_bound <= 1.0
                and self.declared_entry_bound <= 1.0 / math.sqrt(self.n) * (1 + 1e-12))


@lru_cache(maxsize=64)
def dft(n: int) -> BoundedMatrix:
    """The unitary DFT matrix with entries ``n^{-1/2} exp(2 pi i w t / n)``."""
    return BoundedMatrix(n, lambda r, c: _dft_block(n, r, c), name=f"dft{n}")


def from_dense(a: np.ndarray, name: str = "dense") -> BoundedMatrix:
    """Wrap an explicit square matrix; declared bounds are taken from the data."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    return BoundedMatrix(
        n,
        lambda r, c: a[np.ix_(r - 1, c - 1)],
        declared_norm_bound=float(np.linalg.norm(a, 2)),
        declared_entry_bound=float(np.abs(a).max()),
        name=name,
    )


def random_phase_dft(n: int, seed: int = 0) -> BoundedMatrix:
    """``D1 F D2`` with random unimodular diagonals.

    Unitary with entries of modulus exactly ``n^{-1/2}`` but without the
    subgroup structure of the DFT, so it exercises the general
    bounded-entry case.
    """
    rng = np.random.default_rng(seed)
    d1 = np.exp(2j * np.pi * rng.random(n))
    d2 = np.exp(2j * np.pi * rng.random(n))
    return BoundedMatrix(
        n,
        lambda r, c: d1[r - 1, None] * _dft_block(n, r, c) * d2[None, c - 1],
        name=f"phased_dft{n}",
    )


def dft_entry(n: int, omega: int, t: int) -> complex:
    """Single DFT entry; the phase ``omega * t`` is reduced mod ``n`` first."""
    if not (1 <= omega <= n and 1 <= t <= n):
        raise DomainError(f"indices ({omega}, {t}) outside [1, {n}]")
    k = (omega * t) % n
    theta = 2.0 * math.pi * k / n
    return complex(math.cos(theta), math.sin(theta)) / math.sqrt(n)


def _check_ambient(a: BoundedMatrix, *sets: IndexSet):
    for s in sets:
        if s.n != a.n:
            raise DomainError(f"index set lives in dimension {s.n}, matrix has {a.n}")


def submatrix(a: BoundedMatrix, omega: IndexSet, t: IndexSet) -> np.ndarray:
    """Rows ``omega`` and columns ``t`` of ``a`` as a dense ``|omega| x |t|`` array."""
    _check_ambient(a, omega, t)
    return a.block(omega.as_array(), t.as_array())


@dataclass(frozen=True)
class GramMatrix:
    """Gram matrix of the spikes in ``T`` and the sines in ``Omega``.

    Block form ``[[I, F_{Omega T}], [F_{Omega T}^*, I]]``; only the
    off-diagonal block is stored.
    """

    omega_size: int
    t_size: int
    off_diagonal: np.ndarray

    def dense(self) -> np.ndarray:
        p, q = self.omega_size, self.t_size
        g = np.eye(p + q, dtype=np.complex128)
        g[:p, p:] = self.off_diagonal
        g[p:, :p] = self.off_diagonal.conj().T
        return g

    def eigenvalues(self) -> np.ndarray:
        if self.omega_size + self.t_size == 0:
            return np.zeros(0)
        return np.linalg.eigvalsh(self.dense())

    def extreme_eigenvalues(self) -> tuple[float, float]:
        ev = self.eigenvalues()
        if ev.size == 0:
            return 1.0, 1.0
        return float(ev[0]), float(ev[-1])


def gram_matrix(a: BoundedMatrix, omega: IndexSet, t: IndexSet) -> GramMatrix:
    return GramMatrix(len(omega), len(t), submatrix(a, omega, t))


def dirac_comb(n: int) -> tuple[IndexSet, IndexSet]:
    """``T = Omega = {r, 2r, ..., n}`` with ``r = sqrt(n)``; requires a perfect square."""
    r = math.isqrt(n) if n >= 0 else -1
    if n < 1 or r * r != n:
        raise DomainError(f"Dirac comb needs a perfect square, got n={n}")
    comb = IndexSet(n, tuple(range(r, n + 1, r)))
    return comb, comb


def circular_distance(j: int, k: int, n: int) -> int:
    """``|(j - k) mod n|`` with the residue in ``{-ceil(n/2)+1, ..., floor(n/2)}``."""
    d = (j - k) % n
    if d > n // 2:
        d -= n
    return abs(d)


def spread(omega: IndexSet) -> int:
    """Smallest circular distance between two distinct members of ``omega``."""
    if len(omega) < 2:
        raise DomainError("spread needs at least two indices")
    idx = omega.indices
    n = omega.n
    # sorted indices: the closest pair is adjacent, cyclically
    gaps = [b - a for a, b in zip(idx, idx[1:])]
    gaps.append(idx[0] + n - idx[-1])
    return min(min(g, n - g) for g in gaps)
