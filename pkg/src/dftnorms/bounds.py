"""Closed-form bounds and thresholds on the norm of a DFT submatrix.

Every report states whether it bounds the norm ``||F_{Omega T}||`` or its
square.  Constants that the underlying results leave unspecified are
caller parameters (default 1) and are listed in ``BoundReport.conjectural``.
Logarithms are natural.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .matrixcore import DomainError
from .speclinalg import largest_singular_value

QRUP_CONSTANT = 0.2791
QRUP_MIN_N = 512


@dataclass
class BoundReport:
    name: str
    premises_hold: bool
    bound_value: float
    bounds_quantity: str = "norm"  # "norm" | "norm_squared"
    premise_detail: str = ""
    failure_probability: float | None = None
    parameters: dict = field(default_factory=dict)
    conjectural: list = field(default_factory=list)

    def __post_init__(self):
        if self.bounds_quantity not in ("norm", "norm_squared"):
            raise DomainError(f"bad bounds_quantity {self.bounds_quantity!r}")
        if self.bound_value < 0:
            raise DomainError("bound_value must be nonnegative")
        if self.failure_probability is not None:
            self.failure_probability = min(1.0, max(0.0, self.failure_probability))

    @property
    def verdict(self) -> str:
        if not self.premises_hold:
            return "premises fail"
        if self.failure_probability is None:
            return "linearly independent"
        return "linearly independent with high probability"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_sizes(t_size: int, omega_size: int, n: int):
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    for name, v in (("t_size", t_size), ("omega_size", omega_size)):
        if not 0 <= v <= n:
            raise DomainError(f"{name}={v} outside [0, {n}]")


def _comb_witness(t_size: int, omega_size: int, n: int) -> str:
    r = math.isqrt(n)
    if r * r == n and t_size >= r and omega_size >= r:
        return (f"; Dirac comb {{{r}, {2 * r}, ..., {n}}} fits in both sets "
                "and gives a dependent collection (norm 1)")
    return ""


def donoho_stark(t_size: int, omega_size: int, n: int) -> BoundReport:
    """``||F_{Omega T}|| <= sqrt(|Omega||T|/n)`` via the Frobenius norm; independent if ``|T||Omega| < n``."""
    _check_sizes(t_size, omega_size, n)
    prod = t_size * omega_size
    holds = prod < n
    detail = f"|T||Omega| = {prod} {'<' if holds else '>='} n = {n}"
    if not holds:
        detail += _comb_witness(t_size, omega_size, n)
    return BoundReport("donoho_stark", holds, math.sqrt(prod / n), "norm", detail,
                       parameters={"t_size": t_size, "omega_size": omega_size, "n": n})


def additive_bound(t_size: int, omega_size: int, n: int) -> BoundReport:
    """Premise ``|T| + |Omega| < 2 sqrt(n)``; bound ``(|T|+|Omega|) / (2 sqrt n)`` on the norm."""
    _check_sizes(t_size, omega_size, n)
    s = t_size + omega_size
    holds = s * s < 4 * n  # exact integer form of s < 2 sqrt(n)
    detail = f"|T| + |Omega| = {s} {'<' if holds else '>='} 2 sqrt(n) = {2 * math.sqrt(n):.6g}"
    if not holds:
        detail += _comb_witness(t_size, omega_size, n)
    return BoundReport("additive", holds, s / (2 * math.sqrt(n)), "norm", detail,
                       parameters={"t_size": t_size, "omega_size": omega_size, "n": n})


class L0Uncertainty(NamedTuple):
    alpha_l0: int
    beta_l0: int
    product: int
    satisfied: bool


def l0_uncertainty(x) -> L0Uncertainty:
    """Sparsity of ``x`` in the spike basis and in the sine basis.

    Entries below ``1e-8 * max|.|`` count as zero.  The sine coefficients
    are ``beta_j = <x, f_j>`` with ``f_j(t) = n^{-1/2} exp(2 pi i j t / n)``.
    """
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    n = x.size
    if n == 0 or not np.any(x):
        raise DomainError("l0 uncertainty needs a nonzero vector")
    # beta_j = n^{-1/2} sum_{t=1..n} x_t exp(-2 pi i j t / n); index t = n acts as 0
    beta_from0 = np.fft.fft(np.roll(x, 1), norm="ortho")
    beta = np.roll(beta_from0, -1)
    a = int(np.count_nonzero(np.abs(x) > 1e-8 * np.abs(x).max()))
    b = int(np.count_nonzero(np.abs(beta) > 1e-8 * np.abs(beta).max()))
    return L0Uncertainty(a, b, a * b, a * b >= n)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def tao_premise(t_size: int, omega_size: int, n: int) -> BoundReport:
    """Prime ``n`` and ``|T| + |Omega| <= n`` give norm strictly below 1 (no quantitative gap)."""
    prime = is_prime(n)
    s = t_size + omega_size
    holds = prime and s <= n
    detail = f"n = {n} {'prime' if prime else 'composite'}; |T| + |Omega| = {s} {'<=' if s <= n else '>'} n"
    return BoundReport("tao", holds, 1.0, "norm", detail,
                       parameters={"t_size": t_size, "omega_size": omega_size, "n": n})


def large_sieve(t_size: int, spread_value: int, n: int, t_is_block: bool = True) -> BoundReport:
    """Squared-norm bound ``(|T| + n/spread - 1)/n`` for a contiguous block ``T``."""
    if spread_value < 1:
        raise DomainError(f"spread must be at least 1, got {spread_value}")
    value = (t_size + n / spread_value - 1) / n
    independent = t_size + n / spread_value < n + 1
    holds = t_is_block and independent
    detail = (f"T contiguous block: {'asserted' if t_is_block else 'NOT asserted'}; "
              f"|T| + n/spread = {t_size + n / spread_value:.6g} "
              f"{'<' if independent else '>='} n + 1")
    return BoundReport("large_sieve", holds, value, "norm_squared", detail,
                       parameters={"t_size": t_size, "spread": spread_value, "n": n})


def candes_romberg(t_size: int, omega_size: int, n: int, s: float,
                   big_c: float = 1.0) -> BoundReport:
    """``||F||^2 < 0.5`` w.h.p. for random ``Omega`` when ``|T|+|Omega| <= 0.2791 n / sqrt((s+1) ln n)``.

    The failure probability ``C ((s+1) ln n)^{1/2} n^{-s}`` carries an
    unspecified constant ``C`` (``big_c``).
    """
    if s < 1:
        raise DomainError(f"s must be at least 1, got {s}")
    _check_sizes(t_size, omega_size, n)
    logn = math.log(n) if n > 1 else 0.0
    threshold = QRUP_CONSTANT * n / math.sqrt((s + 1) * logn) if logn > 0 else math.inf
    total = t_size + omega_size
    holds = n >= QRUP_MIN_N and total <= threshold
    detail = (f"n = {n} {'>=' if n >= QRUP_MIN_N else '<'} {QRUP_MIN_N}; "
              f"|T| + |Omega| = {total} vs threshold {threshold:.6g}")
    fail = big_c * math.sqrt((s + 1) * logn) * n ** (-s)
    return BoundReport("candes_romberg", holds, 0.5, "norm_squared", detail, fail,
                       {"t_size": t_size, "omega_size": omega_size, "n": n, "s": s,
                        "C": big_c, "threshold": threshold}, ["C"])


def random_subdict(t_size: int, omega_size: int, n: int, s: float,
                   c_param: float = 1.0) -> BoundReport:
    """``P(||F||^2 >= 0.5) <= n^{-s}`` when ``|T| ln n + |Omega| <= c n / s``."""
    if s < 1:
        raise DomainError(f"s must be at least 1, got {s}")
    _check_sizes(t_size, omega_size, n)
    lhs = t_size * math.log(n) + omega_size
    rhs = c_param * n / s
    holds = lhs <= rhs
    detail = f"|T| ln n + |Omega| = {lhs:.6g} {'<=' if holds else '>'} c n / s = {rhs:.6g}"
    return BoundReport("random_subdict", holds, 0.5, "norm_squared", detail, n ** (-s),
                       {"t_size": t_size, "omega_size": omega_size, "n": n, "s": s, "c": c_param},
                       ["c"])


def rip_partition_bound(t_size: int, omega_size: int, n: int, s: float = 1.0,
                        c_param: float = 1.0) -> BoundReport:
    """Squared-norm bound from splitting ``T`` into blocks that each obey the RIP window.

    With block size ``m = c |Omega| / (s ln^5 n)`` and at most ``2|T|/m``
    blocks, ``||F||^2 <= (2|T|/m) (3|Omega|/2n) = 3 |T| s ln^5 n / (c n)``.
    """
    _check_sizes(t_size, omega_size, n)
    l5 = math.log(n) ** 5
    m = c_param * omega_size / (s * l5)
    omega_ok = omega_size <= n / 3
    t_cap = c_param * n / (6 * s * l5)
    if t_size == 0:
        value, blocks = 0.0, 0
    elif m <= 0:
        value, blocks = math.inf, 0
    else:
        value = (2 * t_size / m) * (3 * omega_size / (2 * n))
        blocks = math.ceil(2 * t_size / m)
    holds = omega_ok and value <= 0.5 and t_size <= t_cap
    detail = (f"|Omega| = {omega_size} {'<=' if omega_ok else '>'} n/3; block size m = {m:.6g}; "
              f"|T| = {t_size} vs cap c n/(6 s ln^5 n) = {t_cap:.6g}")
    return BoundReport("rip_partition", holds, value, "norm_squared", detail, n ** (-s),
                       {"t_size": t_size, "omega_size": omega_size, "n": n, "s": s,
                        "c": c_param, "block_size": m, "blocks": blocks}, ["c"])


def rip_window(omega_size: int, n: int) -> tuple[float, float]:
    """The RIP window ``[|Omega|/2n, 3|Omega|/2n]`` for the squared norm."""
    return omega_size / (2 * n), 3 * omega_size / (2 * n)


def satisfies_rip_window(norm_sq: float, omega_size: int, n: int) -> bool:
    lo, hi = rip_window(omega_size, n)
    return lo <= norm_sq <= hi


def partitioned_norm_sq_bound(m: np.ndarray, block_size: int) -> tuple[float, float]:
    """Split the columns of ``m`` into blocks of at most ``block_size``.

    Returns ``(norm_sq, bound)`` where ``bound = (#blocks) * max_k ||M_k||^2``,
    the estimate used by the partitioning argument.
    """
    if block_size < 1:
        raise DomainError("block_size must be at least 1")
    cols = m.shape[1]
    blocks = [m[:, i:i + block_size] for i in range(0, cols, block_size)]
    worst = max((largest_singular_value(b) ** 2 for b in blocks), default=0.0)
    return largest_singular_value(m) ** 2, len(blocks) * worst


def small_moment_bound(n: int, q: float) -> float:
    """``2q / sqrt(n)``, valid when ``q >= 2 ln n >= e``."""
    two_log = 2 * math.log(n)
    if two_log < math.e or q < two_log:
        raise DomainError(f"need q >= 2 ln n >= e; got q={q}, 2 ln n={two_log:.4g}")
    return 2 * q / math.sqrt(n)


def extrapolation_premise(q: int, n: int) -> bool:
    return 13 * math.log(n) <= q <= n / 2


def extrapolation_bound(small_moment: float, rho: float, delta: float, lam: float,
                        q: int, n: int, strict: bool = True) -> float:
    """``8 delta^lam max{1, rho^{-lam} * small_moment}``.

    ``strict`` enforces ``13 ln n <= q <= n/2``; pass ``strict=False`` to
    evaluate the expression outside that range.
    """
    if not 0 < rho < 1:
        raise DomainError(f"rho must lie in (0, 1), got {rho}")
    if not rho <= delta <= 1:
        raise DomainError(f"delta must lie in [rho, 1], got {delta}")
    if not 0 <= lam <= 1:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    if strict and not extrapolation_premise(q, n):
        raise DomainError(f"need 13 ln n <= q <= n/2; got q={q}, 13 ln n={13 * math.log(n):.4f}")
    return 8 * delta ** lam * max(1.0, rho ** (-lam) * small_moment)


def extrapolation_constant(q: int, n: int) -> float:
    """The exact leading factor ``(2qn)^{1/2q} e^2`` that the premise caps at 8."""
    return (2 * q * n) ** (1.0 / (2 * q)) * math.e ** 2


@dataclass(frozen=True)
class TailParams:
    delta: float
    lam: float
    q: int
    u: float
    n: int

    def __post_init__(self):
        if not 1.0 / self.n - 1e-15 <= self.delta <= 1.0:
            raise DomainError(f"delta must lie in [1/n, 1], got {self.delta}")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.q < 1:
            raise DomainError(f"q must be a positive integer, got {self.q}")
        if self.u < 1:
            raise DomainError(f"u must be at least 1, got {self.u}")

    @property
    def premise_holds(self) -> bool:
        return extrapolation_premise(self.q, self.n)


class TailBound(NamedTuple):
    threshold: float
    probability: float


def tail_threshold(delta: float, lam: float, q: int, n: int) -> float:
    """``8 delta^lam max{1, 2q n^{lam - 1/2}}``, the moment estimate before the factor ``u``."""
    return 8 * delta ** lam * max(1.0, 2 * q * n ** (lam - 0.5))


def tail_bound(p: TailParams, fixed_cardinality: bool = True) -> TailBound:
    """Threshold and exceedance probability cap.

    ``fixed_cardinality=True`` gives the random-set version with cap
    ``4 u^{-2q}``; ``False`` gives the Bernoulli-projector version ``u^{-2q}``.
    Probabilities are clamped to 1.
    """
    threshold = tail_threshold(p.delta, p.lam, p.q, p.n) * p.u
    cap = (4.0 if fixed_cardinality else 1.0) * p.u ** (-2 * p.q)
    return TailBound(threshold, min(1.0, cap))


def both_rand_recipe(n: int, delta: float) -> tuple[float, int]:
    """``lambda = ln 16 / ln(1/delta)``, ``q = floor(0.5 n^{1/2 - lambda})`` (at least 1)."""
    if not 0 < delta < 1 / 16:
        raise DomainError("recipe needs delta < 1/16 so that lambda < 1")
    lam = math.log(16) / math.log(1 / delta)
    q = math.floor(0.5 * n ** (0.5 - lam))
    return lam, max(1, q)


def both_rand_norm_recipe(n: int, delta: float, big_c: float = 1.0) -> tuple[float, int]:
    """``lambda = 1/2 - 0.1 / ln(1/delta)``, ``q = floor(C ln n)`` (at least 1)."""
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    lam = 0.5 - 0.1 / math.log(1 / delta)
    if lam < 0:
        raise DomainError("delta too large: lambda would be negative")
    return lam, max(1, math.floor(big_c * math.log(n)))


class MarkovBound(NamedTuple):
    tight: float
    loose: float


def markov_coefficient_bound(r: int, k: int, max_abs: float) -> MarkovBound:
    """``|c_k| <= (r^k / k!) max|p| <= e^r max|p|`` for a degree-``r`` polynomial on ``[-1, 1]``."""
    if not 0 <= k <= r:
        raise DomainError(f"need 0 <= k <= r, got k={k}, r={r}")
    tight = r ** k / math.factorial(k) * max_abs
    return MarkovBound(tight, math.exp(r) * max_abs)


def both_rand_thresholds(n: int, epsilon: float, c_cap: float = 1.0) -> BoundReport:
    """Size budget ``c(eps) n`` with ``c(eps) = exp(-C/eps)`` and failure ``exp(-n^{1/2-eps})``."""
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    c_eps = math.exp(-c_cap / epsilon)
    fail = math.exp(-n ** (0.5 - epsilon))
    return BoundReport(
        "both_random", True, 0.5, "norm_squared",
        f"admissible |T| + |Omega| <= c(eps) n = {c_eps * n:.6g} (n >= N(eps) assumed)",
        fail,
        {"n": n, "epsilon": epsilon, "C": c_cap, "c_eps": c_eps, "budget": c_eps * n},
        ["C", "N(eps)"],
    )


def both_rand_norm_report(n: int, omega_size: int, t_size: int, big_c: float = 1.0) -> BoundReport:
    """``P(sqrt(n/|Omega|) ||F|| >= 9) <= n^{-C}`` for ``|T| <= |Omega| = delta n``."""
    _check_sizes(t_size, omega_size, n)
    holds = 0 < omega_size and t_size <= omega_size
    detail = f"|T| = {t_size} {'<=' if t_size <= omega_size else '>'} |Omega| = {omega_size}"
    bound = 9 * math.sqrt(omega_size / n)
    return BoundReport("both_random_norm", holds, bound, "norm", detail, n ** (-big_c),
                       {"n": n, "omega_size": omega_size, "t_size": t_size, "C": big_c,
                        "scaled_threshold": 9.0}, ["C", "c", "N(delta)"])
