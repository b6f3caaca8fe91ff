"""Exhaustive and sampled checks of the deterministic and probabilistic bounds.

Each ``check_*`` function returns a plain dict with a ``passed`` flag and the
measured margins, ready for JSON output.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import bounds, montecarlo
from .matrixcore import BoundedMatrix, DomainError, IndexSet, dft, spread
from .randomsets import (RandomSetModel, SeedSpec, _popcounts, exact_tail_probability,
                         pair_norm_table, sample_indices, trial_stream)
from .speclinalg import largest_singular_value

U_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
STRICT_GAP = 1e-9


def check_donoho_stark(n: int) -> dict:
    """All ``(T, Omega)``: ``|T||Omega| < n`` forces norm below 1, and ``||F||^2 <= |T||Omega|/n``."""
    table = pair_norm_table(dft(n))
    pc = _popcounts(n)
    prod = pc[:, None] * pc[None, :]
    premise = prod < n
    worst_premise = float(table[premise].max())
    excess = float((table ** 2 - prod / n).max())
    return {
        "target": "donoho-stark", "result": "Donoho-Stark uncertainty bound", "n": n,
        "pairs": int(table.size), "pairs_with_premise": int(premise.sum()),
        "max_norm_under_premise": worst_premise,
        "max_frobenius_excess": excess,
        "passed": worst_premise < 1 - STRICT_GAP and excess <= STRICT_GAP,
    }


def check_tao_exhaustive(n: int) -> dict:
    if not bounds.is_prime(n):
        raise DomainError(f"n must be prime, got {n}")
    table = pair_norm_table(dft(n))
    pc = _popcounts(n)
    premise = (pc[:, None] + pc[None, :]) <= n
    worst = float(table[premise].max())
    return {"target": "tao", "result": "uncertainty principle for prime n", "n": n,
            "mode": "exhaustive", "pairs_checked": int(premise.sum()),
            "max_norm_under_premise": worst, "gap": 1 - worst,
            "passed": worst < 1 - STRICT_GAP}


def check_tao_random(n: int, pairs: int, seed: int) -> dict:
    """Random pairs with ``|T| + |Omega| <= n``: sizes drawn first, then uniform sets."""
    if not bounds.is_prime(n):
        raise DomainError(f"n must be prime, got {n}")
    a = dft(n)
    worst = 0.0
    for i in range(pairs):
        rng = SeedSpec(seed, trial_stream(0, i, 0)).generator()
        r = int(rng.integers(1, n))
        c = int(rng.integers(1, n - r + 1))
        rows = sample_indices(RandomSetModel.of_size(n, r), rng)
        cols = sample_indices(RandomSetModel.of_size(n, c), rng)
        worst = max(worst, largest_singular_value(a.block(rows, cols)))
    return {"target": "tao", "result": "uncertainty principle for prime n", "n": n,
            "mode": "random", "pairs_checked": pairs, "seed": seed,
            "max_norm_under_premise": worst, "gap": 1 - worst,
            "passed": worst < 1 - STRICT_GAP}


def check_large_sieve(n: int = 64, max_block: int = 16, omegas: int = 100, seed: int = 0) -> dict:
    """Every cyclic block ``T`` with ``|T| <= max_block`` against ``omegas`` random ``Omega``."""
    a = dft(n)
    worst_excess = -math.inf
    checked = 0
    case = 0
    for size in range(1, max_block + 1):
        for start in range(n):
            t = IndexSet.block(n, start, size)
            tcols = t.as_array()
            for k in range(omegas):
                rng = SeedSpec(seed, trial_stream(case, k, 0)).generator()
                m = int(rng.integers(2, n + 1))
                rows = sample_indices(RandomSetModel.of_size(n, m), rng)
                sp = spread(IndexSet(n, tuple(rows.tolist())))
                bound = bounds.large_sieve(size, sp, n).bound_value
                sigma = largest_singular_value(a.block(rows, tcols))
                worst_excess = max(worst_excess, sigma ** 2 - bound)
                checked += 1
            case += 1
    return {"target": "large-sieve", "result": "large sieve inequality", "n": n,
            "cases": checked, "max_excess": worst_excess,
            "passed": worst_excess <= STRICT_GAP}


def check_rand_coords(n: int, delta: float, u_grid: Sequence[float] = U_GRID,
                      matrix: BoundedMatrix | None = None) -> dict:
    """Exact ``P(||P A|| >= u) <= 2 P(||R A|| >= u)`` and the two-sided factor 4."""
    a = matrix or dft(n)
    fixed, bern = RandomSetModel.fixed(n, delta), RandomSetModel.bernoulli(n, delta)
    rows, violations = [], 0
    for u in u_grid:
        p1 = exact_tail_probability(a, fixed, False, u)
        r1 = exact_tail_probability(a, bern, False, u)
        p2 = exact_tail_probability(a, fixed, True, u)
        r2 = exact_tail_probability(a, bern, True, u)
        ok1 = p1 <= 2 * r1 + 1e-12
        ok2 = p2 <= 4 * r2 + 1e-12
        violations += (not ok1) + (not ok2)
        rows.append({"u": u, "p_fixed_one": p1, "p_bern_one": r1,
                     "p_fixed_two": p2, "p_bern_two": r2,
                     "ratio_one": p1 / r1 if r1 else (0.0 if p1 == 0 else math.inf),
                     "ratio_two": p2 / r2 if r2 else (0.0 if p2 == 0 else math.inf)})
    return {"target": "coords", "result": "random coordinate model comparison", "n": n,
            "delta": delta, "rows": rows, "violations": violations,
            "max_ratio_one_sided": max(r["ratio_one"] for r in rows),
            "max_ratio_two_sided": max(r["ratio_two"] for r in rows),
            "passed": violations == 0}


def _pair_tail(table: np.ndarray, wr: np.ndarray, wc: np.ndarray, u: float) -> float:
    return float(wr @ ((table >= u).astype(np.float64) @ wc))


def check_square_case(n: int, max_m: int | None = None, u_grid: Sequence[float] = U_GRID,
                      matrix: BoundedMatrix | None = None) -> dict:
    """Exact tail probabilities are weakly increasing in either cardinality."""
    a = matrix or dft(n)
    max_m = n // 2 if max_m is None else max_m
    table = pair_norm_table(a)
    w = {m: RandomSetModel.of_size(n, m).weights() for m in range(max_m + 2) if m <= n}
    worst = -math.inf
    comparisons = 0
    for u in u_grid:
        for m in range(max_m + 1):
            for m2 in range(m, max_m + 1):
                # square sizes, and growing the row set alone
                for lo, hi in (((m, m), (m2, m2)), ((m, m2), (m2, m2))):
                    p_lo = _pair_tail(table, w[lo[0]], w[lo[1]], u)
                    p_hi = _pair_tail(table, w[hi[0]], w[hi[1]], u)
                    worst = max(worst, p_lo - p_hi)
                    comparisons += 1
    return {"target": "square-case", "result": "monotonicity in the cardinality", "n": n,
            "max_m": max_m, "comparisons": comparisons, "max_violation": worst,
            "passed": worst <= 1e-12}


def check_moment(n: int, q: int, trials: int, seed: int, workers: int = 1,
                 matrix: BoundedMatrix | None = None) -> dict:
    """Monte Carlo moment root of ``R_rho A R_rho'`` (``rho = 1/n``) against ``2q/sqrt(n)``."""
    bound = bounds.small_moment_bound(n, q)
    a = matrix or dft(n)
    model = RandomSetModel.bernoulli(n, 1.0 / n)
    est = montecarlo.estimate_moment_root(a, model, model, q, trials, seed, workers=workers)
    return {"target": "moment", "result": "small-submatrix moment bound", "n": n, "q": q,
            "trials": trials, "seed": seed, "moment_root": est.root, "jackknife_se": est.root_se,
            "upper_edge": est.upper, "bound": bound, "margin": bound - est.upper,
            "bound_over_estimate": bound / est.root if est.root else math.inf,
            "passed": est.upper <= bound}

