import math

import numpy as np
import pytest

from dftnorms import montecarlo as mc
from dftnorms import verify
from dftnorms.matrixcore import DomainError, dft
from dftnorms.randomsets import RandomSetModel, exact_moment_root, exact_tail_probability


def _plan(n=64, delta=0.1, **kw):
    model = RandomSetModel.fixed(n, delta)
    return mc.ExperimentPlan(dft(n), model, model, **kw)


# --- plans and summaries ------------------------------------------------------

def test_plan_validation():
    with pytest.raises(DomainError):
        _plan(trials=0)
    with pytest.raises(DomainError):
        _plan(scaling="log")
    with pytest.raises(DomainError):
        _plan(statistic="median")
    with pytest.raises(DomainError):
        mc.ExperimentPlan(dft(8), RandomSetModel.fixed(16, 0.5), RandomSetModel.fixed(8, 0.5))


def test_summary_invariants():
    s = mc.run_experiment(_plan(trials=30))
    assert s.min <= s.mean <= s.max and s.std_dev >= 0 and s.trials == 30
    assert np.all((s.values >= 0) & (s.values <= 1 + 1e-10))
    assert s.mean == pytest.approx(np.mean(s.values), abs=1e-15)
    assert s.std_dev == pytest.approx(np.std(s.values, ddof=1), rel=1e-12)


def test_run_is_deterministic_across_workers():
    plan = _plan(n=128, delta=0.2, trials=37, master_seed=99)
    base = mc.sample_values(plan, workers=1)
    for w in (2, 3, 8):
        assert np.array_equal(base, mc.sample_values(plan, workers=w))
    s1, s2 = mc.run_experiment(plan, 1), mc.run_experiment(plan, 4)
    assert (s1.mean, s1.std_dev, s1.min, s1.max) == (s2.mean, s2.std_dev, s2.min, s2.max)


def test_one_trial_is_reproducible():
    plan = _plan(trials=1, master_seed=5)
    assert mc.run_experiment(plan).mean == mc.run_experiment(plan).mean


def test_resource_guard():
    with pytest.raises(mc.ResourceGuardError):
        mc.sample_values(_plan(n=1024, delta=0.5, budget=1000))


def test_single_entry_scaled_is_one():
    n = 1024
    s = mc.sweep_square(n, [1 / n], trials=50, seed=1, scaled=True)[0]
    # |(cos t, sin t)| is 1 only up to rounding, so allow a few ulps
    assert np.max(np.abs(s.values - 1.0)) <= 4 * np.finfo(float).eps
    assert s.std_dev <= 4 * np.finfo(float).eps


def test_scaled_and_unscaled_use_same_draws():
    n, grid = 256, [0.05, 0.2]
    raw = mc.sweep_square(n, grid, trials=20, seed=4)
    scaled = mc.sweep_square(n, grid, trials=20, seed=4, scaled=True)
    for a, b in zip(raw, scaled):
        factor = 1 / math.sqrt(a.point_label["delta_eff"])
        assert np.allclose(b.values, a.values * factor, rtol=1e-14)
    rraw = mc.sweep_rect(64, [0.1], [0.3], trials=10, seed=2)
    rsc = mc.sweep_rect(64, [0.1], [0.3], trials=10, seed=2, scaled=True)
    factor = 1 / math.sqrt(max(rraw[0].point_label["delta_t_eff"], rraw[0].point_label["delta_omega_eff"]))
    assert np.allclose(rsc[0].values, rraw[0].values * factor, rtol=1e-14)


def test_rect_diagonal_matches_square():
    sq = mc.sweep_square(64, [0.25], trials=30, seed=8)[0]
    rect = mc.sweep_rect(64, [0.25], [0.25], trials=30, seed=8)[0]
    # same model, same streams, same point index
    assert np.array_equal(sq.values, rect.values)


def test_rect_single_column_scaled():
    n = 64
    s = mc.sweep_rect(n, [1 / n], [1 / n], trials=10, seed=0, scaled=True)[0]
    assert np.allclose(s.values, 1.0)


def test_sqrt_n_over_omega_scaling():
    n = 256
    rm, cm = RandomSetModel.fixed(n, 0.05), RandomSetModel.fixed(n, 0.05)
    plan = mc.ExperimentPlan(dft(n), rm, cm, 10, 3, scaling="sqrt_n_over_omega")
    raw = mc.sample_values(mc.ExperimentPlan(dft(n), rm, cm, 10, 3))
    assert np.allclose(mc.sample_values(plan), raw * math.sqrt(n / rm.parameter))


def test_conjectured_norm():
    assert mc.conjectured_norm(0.25) == pytest.approx(math.sqrt(0.75))
    assert mc.conjectured_norm(0.5) == 1.0 and mc.conjectured_norm(0.8) == 1.0
    assert mc.conjectured_norm(0.0) == 0.0


# --- moment estimation --------------------------------------------------------

def test_moment_statistics_constant_sample():
    est = mc.moment_statistics(np.full(50, 0.3), q=4)
    assert est.root == pytest.approx(0.3) and est.root_se == pytest.approx(0.0, abs=1e-15)


def test_moment_statistics_power_mean_limit():
    x = np.array([0.0] * 90 + [1.0] * 10)
    roots = [mc.moment_statistics(x, q).root for q in (1, 5, 50, 500)]
    assert all(a <= b for a, b in zip(roots, roots[1:]))
    assert roots[-1] == pytest.approx(1.0, abs=0.01)


def test_moment_statistics_jackknife_oracle():
    rng = np.random.default_rng(0)
    x = rng.random(40)
    q = 3
    est = mc.moment_statistics(x, q)
    loo = np.array([np.mean(np.delete(x, i) ** (2 * q)) ** (1 / (2 * q)) for i in range(x.size)])
    se = math.sqrt((x.size - 1) / x.size * np.sum((loo - loo.mean()) ** 2))
    assert est.root == pytest.approx(np.mean(x ** (2 * q)) ** (1 / (2 * q)), rel=1e-12)
    assert est.root_se == pytest.approx(se, rel=1e-9)
    assert est.upper == pytest.approx(est.root + 3 * se, rel=1e-9)


def test_moment_statistics_no_overflow():
    est = mc.moment_statistics(np.array([1e-200, 2e-200]), q=40)
    assert math.isfinite(est.root) and est.root > 0


def test_moment_estimate_vs_exact_enumeration():
    n, q = 6, 2
    a = dft(n)
    model = RandomSetModel.bernoulli(n, 0.4)
    exact = exact_moment_root(a, model, q)
    est = mc.estimate_moment_root(a, model, model, q, trials=20_000, seed=3)
    assert abs(est.root - exact) <= 4 * est.root_se


def test_empirical_tail_vs_exact():
    n, u = 6, 0.7
    a = dft(n)
    model = RandomSetModel.of_size(n, 2)
    exact = exact_tail_probability(a, model, True, u)
    plan = mc.ExperimentPlan(a, model, model, 5000, 21, statistic="tail", u=u)
    freq = mc.run_experiment(plan).tail_frequency
    assert freq <= exact + 3 * math.sqrt(exact * (1 - exact) / 5000)


# --- verifiers ----------------------------------------------------------------

def test_extrapolation_trivial_cases():
    rep = mc.verify_extrapolation(128, 64, 0.0, 0.25, trials=300, seed=1)
    assert rep.premise_holds and rep.passed and rep.rhs >= 8
    with pytest.raises(DomainError):
        mc.verify_extrapolation(128, 63, 0.5, 0.25, trials=10, seed=1)
    loose = mc.verify_extrapolation(128, 63, 0.5, 0.25, trials=300, seed=1, strict=False)
    assert not loose.premise_holds and loose.passed
    d = loose.to_dict()
    assert d["margin"] == pytest.approx(d["rhs_lower"] - d["lhs_upper"])


def test_tail_report():
    rep = mc.verify_tail(128, 0.25, 0.1, 2, [1.0, 1.5], trials=100, seed=0)
    assert rep.passed and len(rep.rows) == 2
    assert rep.rows[0].cap == 1.0
    assert all(r.threshold >= 1 and r.exceedances == 0 for r in rep.rows)
    with pytest.raises(DomainError):
        mc.verify_tail(128, 0.25, 0.1, 2, [1.0], 10, 0, model="poisson")


def test_clopper_pearson_oracle():
    lo, hi = mc.clopper_pearson(0, 100)
    assert lo == 0.0 and hi == pytest.approx(1 - 0.0005 ** (1 / 100), rel=1e-9)
    lo, hi = mc.clopper_pearson(100, 100)
    assert hi == 1.0 and lo == pytest.approx(0.0005 ** (1 / 100), rel=1e-9)


def test_argmax_grid_of_one_point():
    assert mc.argmax_scaled_delta(64, trials=3, grid=[0.1]) == 0.1
    g = mc.log_delta_grid(64, 5)
    assert g[0] == pytest.approx(1 / 64) and g[-1] == pytest.approx(0.5)


@pytest.mark.slow
def test_argmax_stable_across_seeds():
    n = 256
    grid = mc.log_delta_grid(n)
    a = mc.argmax_scaled_delta(n, trials=100, seed=1, grid=grid)
    b = mc.argmax_scaled_delta(n, trials=100, seed=2, grid=grid)
    step = grid[1] / grid[0]
    assert max(a, b) / min(a, b) <= step * (1 + 1e-9)


def test_quartercircle_labels():
    t = mc.quartercircle_check(64, [0.25], trials=5, seed=0)[0]
    assert t.point_label["deviation"] == pytest.approx(t.mean - t.point_label["conjectured"])


def test_verify_small_checks():
    assert verify.check_donoho_stark(6)["passed"]
    assert verify.check_tao_exhaustive(5)["passed"]
    assert verify.check_tao_random(11, 50, 0)["passed"]
    assert verify.check_large_sieve(16, 4, 5, 0)["passed"]
    assert verify.check_rand_coords(6, 0.5)["passed"]
    assert verify.check_square_case(6)["passed"]
    with pytest.raises(DomainError):
        verify.check_tao_exhaustive(6)


def test_verify_moment_small():
    r = verify.check_moment(256, 12, 500, 0)
    assert r["passed"] and r["bound"] == pytest.approx(1.5)
