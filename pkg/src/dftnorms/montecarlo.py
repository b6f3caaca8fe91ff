"""Monte Carlo experiments on random submatrices.

Each trial draws a row set and a column set from independent seeded
streams, materializes the submatrix, and records its (scaled) spectral
norm.  Trials may run on a thread pool, but results are always reduced in
trial-index order, so output does not depend on the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from . import bounds
from .matrixcore import BoundedMatrix, DomainError, dft
from .randomsets import RandomSetModel, SeedSpec, sample_indices, trial_stream
from .speclinalg import largest_singular_value

DEFAULT_TRIALS = 100
DEFAULT_BUDGET = 1 << 22  # entries of one dense submatrix
SCALINGS = ("none", "inverse_sqrt_delta", "inverse_sqrt_max", "sqrt_n_over_omega")
STATISTICS = ("mean_norm", "moment", "tail")
RECT_INTERPRETATION = ("delta = (delta_T + delta_Omega) / 2 using realized proportions "
                       "floor(delta n)/n; curve 2 sqrt(delta (1 - delta)) capped at 1 for delta > 1/2")


class ResourceGuardError(RuntimeError):
    """A planned submatrix exceeds the dense-matrix budget."""


@dataclass(frozen=True)
class ExperimentPlan:
    matrix: BoundedMatrix
    row_model: RandomSetModel
    col_model: RandomSetModel
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    scaling: str = "none"
    statistic: str = "mean_norm"
    q: int = 1
    u: float = 0.0
    point: int = 0
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.scaling not in SCALINGS:
            raise DomainError(f"unknown scaling {self.scaling!r}")
        if self.statistic not in STATISTICS:
            raise DomainError(f"unknown statistic {self.statistic!r}")
        if self.statistic == "moment" and self.q < 1:
            raise DomainError("q must be at least 1")
        if self.statistic == "tail" and self.u < 0:
            raise DomainError("u must be nonnegative")
        if self.row_model.n != self.matrix.n or self.col_model.n != self.matrix.n:
            raise DomainError("model dimensions must match the matrix")

    def expected_entries(self) -> float:
        def size(m: RandomSetModel) -> float:
            return m.parameter if m.kind == "fixed_cardinality" else m.parameter * m.n
        return size(self.row_model) * size(self.col_model)


@dataclass
class TrialSummary:
    point_label: dict
    mean: float
    std_dev: float
    min: float
    max: float
    trials: int
    moment_root: float | None = None
    tail_frequency: float | None = None
    values: np.ndarray | None = field(default=None, repr=False)


def _scale_factor(plan: ExperimentPlan, n_rows: int, n_cols: int) -> float:
    if plan.scaling == "none":
        return 1.0
    if plan.scaling == "inverse_sqrt_delta":
        d = plan.row_model.delta
        return 1.0 / math.sqrt(d) if d > 0 else 0.0
    if plan.scaling == "inverse_sqrt_max":
        d = max(plan.row_model.delta, plan.col_model.delta)
        return 1.0 / math.sqrt(d) if d > 0 else 0.0
    # sqrt_n_over_omega uses the realized row count
    return math.sqrt(plan.matrix.n / n_rows) if n_rows else 0.0


def _run_trials(plan: ExperimentPlan, trial_ids: range) -> np.ndarray:
    out = np.empty(len(trial_ids))
    for k, i in enumerate(trial_ids):
        rows = sample_indices(plan.row_model,
                              SeedSpec(plan.master_seed, trial_stream(plan.point, i, 0)).generator())
        cols = sample_indices(plan.col_model,
                              SeedSpec(plan.master_seed, trial_stream(plan.point, i, 1)).generator())
        if rows.size * cols.size > plan.budget:
            raise ResourceGuardError(f"submatrix {rows.size}x{cols.size} exceeds budget {plan.budget}")
        sigma = largest_singular_value(plan.matrix.block(rows, cols))
        out[k] = sigma * _scale_factor(plan, rows.size, cols.size)
    return out


def sample_values(plan: ExperimentPlan, workers: int = 1) -> np.ndarray:
    """Per-trial scaled norms, in trial-index order."""
    if plan.expected_entries() > plan.budget:
        raise ResourceGuardError(
            f"expected submatrix of {plan.expected_entries():.0f} entries exceeds budget {plan.budget}")
    if workers <= 1 or plan.trials < 2:
        return _run_trials(plan, range(plan.trials))
    chunks = np.array_split(np.arange(plan.trials), min(workers * 4, plan.trials))
    ranges = [range(int(c[0]), int(c[-1]) + 1) for c in chunks if c.size]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda r: _run_trials(plan, r), ranges))
    return np.concatenate(parts)


def summarize(values: np.ndarray, label: dict, q: int | None = None,
              u: float | None = None, keep_values: bool = True) -> TrialSummary:
    n = values.size
    mean = math.fsum(values.tolist()) / n
    var = math.fsum(((values - mean) ** 2).tolist()) / (n - 1) if n > 1 else 0.0
    s = TrialSummary(dict(label), mean, math.sqrt(var), float(values.min()), float(values.max()), n)
    if q is not None:
        s.moment_root = moment_statistics(values, q).root
    if u is not None:
        s.tail_frequency = float(np.count_nonzero(values >= u)) / n
    if keep_values:
        s.values = values
    return s


def run_experiment(plan: ExperimentPlan, workers: int = 1) -> TrialSummary:
    values = sample_values(plan, workers)
    label = {"n": plan.matrix.n, "row_delta": plan.row_model.delta,
             "col_delta": plan.col_model.delta, "scaling": plan.scaling}
    return summarize(values, label,
                     q=plan.q if plan.statistic == "moment" else None,
                     u=plan.u if plan.statistic == "tail" else None)


class MomentEstimate(NamedTuple):
    root: float
    moment: float
    moment_se: float
    root_se: float
    upper: float
    lower: float


def moment_statistics(values: np.ndarray, q: int, z: float = 3.0) -> MomentEstimate:
    """Plug-in ``(mean x^{2q})^{1/2q}`` with jackknife standard error.

    Powers are taken after dividing by the sample maximum so that
    ``2q``-th powers neither overflow nor underflow.  ``upper``/``lower``
    are ``root +/- z * se``.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    p = 2 * q
    top = float(x.max()) if n else 0.0
    if top == 0.0:
        return MomentEstimate(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    w = (x / top) ** p
    total = math.fsum(w.tolist())
    mean_w = total / n
    root = top * mean_w ** (1.0 / p)
    moment = top ** p * mean_w
    moment_se = top ** p * (float(np.std(w, ddof=1)) / math.sqrt(n) if n > 1 else 0.0)
    if n > 1:
        loo = np.maximum(total - w, 0.0) / (n - 1)
        roots = top * loo ** (1.0 / p)
        root_se = math.sqrt((n - 1) / n * float(np.sum((roots - roots.mean()) ** 2)))
    else:
        root_se = 0.0
    return MomentEstimate(root, moment, moment_se, root_se, root + z * root_se,
                          max(0.0, root - z * root_se))


def estimate_moment_root(matrix: BoundedMatrix, row_model: RandomSetModel,
                         col_model: RandomSetModel, q: int, trials: int, seed: int,
                         point: int = 0, workers: int = 1) -> MomentEstimate:
    """Monte Carlo ``(E ||R A R'||^{2q})^{1/2q}``."""
    if q < 1:
        raise DomainError("q must be at least 1")
    plan = ExperimentPlan(matrix, row_model, col_model, trials, seed, point=point)
    return moment_statistics(sample_values(plan, workers), q)


@dataclass
class ExtrapolationReport:
    n: int
    q: int
    lam: float
    delta: float
    trials: int
    premise_holds: bool
    lhs: MomentEstimate
    small: MomentEstimate
    rhs: float
    rhs_lower: float
    margin: float
    small_bound: float | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n, "q": self.q, "lambda": self.lam, "delta": self.delta,
            "trials": self.trials, "premise_holds": self.premise_holds,
            "lhs": self.lhs.root, "lhs_upper": self.lhs.upper, "lhs_se": self.lhs.root_se,
            "small_moment": self.small.root, "small_moment_se": self.small.root_se,
            "rhs": self.rhs, "rhs_lower": self.rhs_lower, "margin": self.margin,
            "small_moment_bound": self.small_bound, "passed": self.passed,
        }


def verify_extrapolation(n: int, q: int, lam: float, delta: float, trials: int, seed: int,
                         strict: bool = True, matrix: BoundedMatrix | None = None,
                         workers: int = 1) -> ExtrapolationReport:
    """Compare both sides of the extrapolation inequality.

    Left: moment root of ``R_delta A R_delta'``.  Right:
    ``8 delta^lam max{1, n^lam * (moment root of R_rho A R_rho')}`` with
    ``rho = 1/n``.  Passes when the left upper confidence edge is below the
    right side evaluated at the small moment's lower edge.
    """
    premise = bounds.extrapolation_premise(q, n)
    if strict and not premise:
        raise DomainError(f"need 13 ln n <= q <= n/2; got q={q}, 13 ln n={13 * math.log(n):.4f}")
    a = matrix or dft(n)
    rho = 1.0 / n
    lhs = estimate_moment_root(a, RandomSetModel.bernoulli(n, delta),
                               RandomSetModel.bernoulli(n, delta), q, trials, seed, 0, workers)
    small = estimate_moment_root(a, RandomSetModel.bernoulli(n, rho),
                                 RandomSetModel.bernoulli(n, rho), q, trials, seed, 1, workers)
    rhs = bounds.extrapolation_bound(small.root, rho, delta, lam, q, n, strict=False)
    rhs_lower = bounds.extrapolation_bound(small.lower, rho, delta, lam, q, n, strict=False)
    try:
        small_bound = bounds.small_moment_bound(n, q)
    except DomainError:
        small_bound = None
    return ExtrapolationReport(n, q, lam, delta, trials, premise, lhs, small, rhs, rhs_lower,
                               rhs_lower - lhs.upper, small_bound, lhs.upper <= rhs_lower)


def clopper_pearson(k: int, n: int, level: float = 0.999) -> tuple[float, float]:
    alpha = 1.0 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


@dataclass
class TailRow:
    u: float
    threshold: float
    cap: float
    exceedances: int
    frequency: float
    ci_low: float
    ci_high: float
    violation: bool


@dataclass
class TailReport:
    n: int
    delta: float
    lam: float
    q: int
    model: str
    trials: int
    premise_holds: bool
    rows: list

    @property
    def passed(self) -> bool:
        return not any(r.violation for r in self.rows)

    def to_dict(self) -> dict:
        return {"n": self.n, "delta": self.delta, "lambda": self.lam, "q": self.q,
                "model": self.model, "trials": self.trials,
                "premise_holds": self.premise_holds, "passed": self.passed,
                "rows": [vars(r) for r in self.rows]}


def verify_tail(n: int, delta: float, lam: float, q: int, u_grid: Sequence[float],
                trials: int, seed: int, model: str = "fixed",
                matrix: BoundedMatrix | None = None, workers: int = 1) -> TailReport:
    """Empirical exceedance of the tail threshold against its probability cap.

    ``model="fixed"`` draws both sets with cardinality ``floor(delta n)`` and
    uses the cap ``4 u^{-2q}``; ``model="bernoulli"`` uses independent
    projectors and the cap ``u^{-2q}``.  A violation is flagged only when
    the 99.9% Clopper-Pearson interval lies entirely above the cap.
    """
    if model not in ("fixed", "bernoulli"):
        raise DomainError(f"unknown model {model!r}")
    a = matrix or dft(n)
    make = RandomSetModel.fixed if model == "fixed" else RandomSetModel.bernoulli
    plan = ExperimentPlan(a, make(n, delta), make(n, delta), trials, seed)
    values = sample_values(plan, workers)
    rows = []
    for u in u_grid:
        tb = bounds.tail_bound(bounds.TailParams(delta, lam, q, u, n),
                               fixed_cardinality=(model == "fixed"))
        k = int(np.count_nonzero(values >= tb.threshold))
        lo, hi = clopper_pearson(k, trials)
        rows.append(TailRow(u, tb.threshold, tb.probability, k, k / trials, lo, hi, lo > tb.probability))
    return TailReport(n, delta, lam, q, model, trials, bounds.extrapolation_premise(q, n), rows)


def conjectured_norm(delta: float) -> float:
    """``2 sqrt(delta (1 - delta))`` for ``delta <= 1/2``, else 1."""
    d = min(max(delta, 0.0), 0.5)
    return 2.0 * math.sqrt(d * (1.0 - d))


def sweep_square(n: int, delta_grid: Sequence[float], trials: int = DEFAULT_TRIALS,
                 seed: int = 0, scaled: bool = False, matrix: BoundedMatrix | None = None,
                 workers: int = 1, budget: int = DEFAULT_BUDGET) -> list[TrialSummary]:
    """Mean norm of random ``floor(delta n)``-square submatrices per grid point.

    With ``scaled`` each norm is multiplied by ``delta_eff^{-1/2}`` where
    ``delta_eff = floor(delta n)/n``; the draws are the same either way.
    """
    a = matrix or dft(n)
    out = []
    for p, d in enumerate(delta_grid):
        model = RandomSetModel.fixed(n, d)
        plan = ExperimentPlan(a, model, model, trials, seed,
                              "inverse_sqrt_delta" if scaled else "none", point=p, budget=budget)
        s = run_experiment(plan, workers)
        s.point_label = {"delta": float(d), "delta_eff": model.delta, "n": n,
                         "scaling": plan.scaling, "size": model.parameter}
        out.append(s)
    return out


def sweep_rect(n: int, delta_t_grid: Sequence[float], delta_omega_grid: Sequence[float],
               trials: int = DEFAULT_TRIALS, seed: int = 0, scaled: bool = False,
               matrix: BoundedMatrix | None = None, workers: int = 1,
               budget: int = DEFAULT_BUDGET) -> list[TrialSummary]:
    """Mean norm of random ``floor(d_Omega n) x floor(d_T n)`` submatrices over a grid.

    Each summary's label carries the conjectured value and the signed
    deviation ``mean - conjectured`` (see ``RECT_INTERPRETATION``).
    """
    a = matrix or dft(n)
    out = []
    for i, dt in enumerate(delta_t_grid):
        for j, do in enumerate(delta_omega_grid):
            rm, cm = RandomSetModel.fixed(n, do), RandomSetModel.fixed(n, dt)
            plan = ExperimentPlan(a, rm, cm, trials, seed,
                                  "inverse_sqrt_max" if scaled else "none",
                                  point=i * len(delta_omega_grid) + j, budget=budget)
            s = run_experiment(plan, workers)
            conj = conjectured_norm((rm.delta + cm.delta) / 2)
            if scaled:
                conj *= 1.0 / math.sqrt(max(rm.delta, cm.delta)) if max(rm.delta, cm.delta) else 0.0
            s.point_label = {"delta_t": float(dt), "delta_omega": float(do),
                             "delta_t_eff": cm.delta, "delta_omega_eff": rm.delta, "n": n,
                             "scaling": plan.scaling, "conjectured": conj,
                             "deviation": s.mean - conj}
            out.append(s)
    return out


def log_delta_grid(n: int, points: int = 20) -> np.ndarray:
    if points == 1:
        return np.array([1.0 / n])
    return np.geomspace(1.0 / n, 0.5, points)


def argmax_scan(n: int, trials: int = DEFAULT_TRIALS, seed: int = 0,
                grid: Sequence[float] | None = None, workers: int = 1) -> tuple[float, list[TrialSummary]]:
    grid = log_delta_grid(n) if grid is None else np.asarray(grid, dtype=float)
    table = sweep_square(n, grid, trials, seed, scaled=True, workers=workers)
    best = int(np.argmax([s.mean for s in table]))
    return float(grid[best]), table


def argmax_scaled_delta(n: int, trials: int = DEFAULT_TRIALS, seed: int = 0,
                        grid: Sequence[float] | None = None, workers: int = 1) -> float:
    """Grid point where the scaled mean norm peaks (observed near ``2/sqrt(n)``)."""
    return argmax_scan(n, trials, seed, grid, workers)[0]


def quartercircle_check(n: int, delta_grid: Sequence[float], trials: int = DEFAULT_TRIALS,
                        seed: int = 0, workers: int = 1) -> list[TrialSummary]:
    """Square sweep annotated with the conjectured curve and signed deviation."""
    table = sweep_square(n, delta_grid, trials, seed, scaled=False, workers=workers)
    for s in table:
        conj = conjectured_norm(s.point_label["delta_eff"])
        s.point_label["conjectured"] = conj
        s.point_label["deviation"] = s.mean - conj
    return table
