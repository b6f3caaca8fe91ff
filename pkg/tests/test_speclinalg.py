import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from dftnorms.matrixcore import DomainError, IndexSet, dft, dirac_comb, gram_matrix, submatrix
from dftnorms.speclinalg import (DENSE_SVD_MAX_DIM, batch_largest_singular_values, condition_number,
                                 frobenius_norm, gram_extreme_eigenvalues, largest_singular_value,
                                 power_iteration, spectral_norm)


def _random_complex(rng, p, q):
    return rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))


def test_identity_and_empty():
    assert spectral_norm(np.eye(3)).value == pytest.approx(1.0)
    r = spectral_norm(np.zeros((0, 4)))
    assert r.value == 0.0 and r.iterations == 0
    assert power_iteration(np.zeros((3, 0))).value == 0.0


def test_dirac_comb_norm_is_one():
    t, om = dirac_comb(16)
    m = submatrix(dft(16), om, t)
    for method in ("dense_svd", "power_iteration"):
        assert spectral_norm(m, method=method).value == pytest.approx(1.0, abs=1e-10)


def test_power_iteration_matches_svd_on_random_matrix():
    rng = np.random.default_rng(0)
    m = _random_complex(rng, 20, 30)
    r = spectral_norm(m, method="power_iteration")
    assert r.converged and r.residual <= 1e-10
    assert r.value == pytest.approx(np.linalg.norm(m, 2), abs=1e-10)


def test_power_iteration_oracle_equivalence_500():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(500):
        p, q = rng.integers(1, 65, size=2)
        m = _random_complex(rng, int(p), int(q))
        r = spectral_norm(m, tol=1e-12, method="power_iteration")
        worst = max(worst, abs(r.value - np.linalg.norm(m, 2)))
    assert worst <= 1e-8


def test_power_iteration_fallback_start():
    # all-ones start lies in the kernel
    m = np.array([[1.0, -1.0], [2.0, -2.0]])
    r = power_iteration(m)
    assert r.value == pytest.approx(np.linalg.norm(m, 2))
    # e_1 also in the kernel
    m2 = np.array([[0.0, 1.0, -1.0]])
    assert power_iteration(m2).value == pytest.approx(math.sqrt(2))
    assert power_iteration(np.zeros((2, 2))).value == 0.0


def test_power_iteration_reports_nonconvergence():
    # two leading singular values close together converge slowly
    m = np.diag([1.0, 0.999, 0.5])
    r = power_iteration(m, tol=1e-12, max_iter=20)
    assert not r.converged and r.iterations == 20
    assert r.residual > 1e-12
    assert 0.999 < r.value < 1.0


def test_auto_method_threshold():
    small = np.ones((DENSE_SVD_MAX_DIM, 200))
    big = np.ones((DENSE_SVD_MAX_DIM + 1, DENSE_SVD_MAX_DIM + 1))
    assert spectral_norm(small).method == "dense_svd"
    r = spectral_norm(big)
    assert r.method == "power_iteration"
    assert r.value == pytest.approx(DENSE_SVD_MAX_DIM + 1)


def test_spectral_norm_rejects_bad_args():
    with pytest.raises(DomainError):
        spectral_norm(np.eye(2), tol=0)
    with pytest.raises(DomainError):
        spectral_norm(np.eye(2), method="lanczos")
    with pytest.raises(DomainError):
        spectral_norm(np.ones(3))


def test_batch_matches_single():
    rng = np.random.default_rng(5)
    stack = np.stack([_random_complex(rng, 7, 4) for _ in range(3)])
    got = batch_largest_singular_values(stack)
    assert np.allclose(got, [largest_singular_value(s) for s in stack])
    assert batch_largest_singular_values(np.zeros((2, 0, 3))).tolist() == [0.0, 0.0]


def test_frobenius_examples():
    m = submatrix(dft(16), IndexSet.of(16, [1, 2]), IndexSet.of(16, [3, 4, 5]))
    assert frobenius_norm(m) == pytest.approx(math.sqrt(6 / 16), abs=1e-14)
    assert frobenius_norm(np.zeros((0, 0))) == 0.0
    for k in (1, 4, 9):
        assert frobenius_norm(np.eye(k)) == pytest.approx(math.sqrt(k))


@settings(max_examples=80, deadline=None)
@given(hnp.arrays(np.complex128, hnp.array_shapes(min_dims=2, max_dims=2, max_side=12),
                  elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)))
def test_spectral_below_frobenius(m):
    assert spectral_norm(m).value <= frobenius_norm(m) + 1e-12 * (1 + frobenius_norm(m))


def test_condition_number_examples():
    assert condition_number(0.0) == 1.0
    assert condition_number(0.5) == pytest.approx(3.0)
    assert condition_number(1.0) == math.inf
    assert condition_number(1.0 + 2e-16) == math.inf
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            condition_number(bad)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 0.999))
def test_condition_number_is_eigenvalue_ratio(sigma):
    assert condition_number(sigma) == pytest.approx((1 + sigma) / (1 - sigma))


def test_gram_extremes_via_speclinalg():
    g = gram_matrix(dft(8), IndexSet.of(8, [1, 3]), IndexSet.of(8, [2, 5, 6]))
    sigma = spectral_norm(g.off_diagonal).value
    lo, hi = gram_extreme_eigenvalues(g)
    assert lo == pytest.approx(1 - sigma, abs=1e-12) and hi == pytest.approx(1 + sigma, abs=1e-12)


def test_monotone_under_nesting():
    n = 16
    rng = np.random.default_rng(7)
    a = dft(n)
    for _ in range(200):
        big_r = rng.random(n) < 0.6
        big_c = rng.random(n) < 0.6
        small_r = big_r & (rng.random(n) < 0.6)
        small_c = big_c & (rng.random(n) < 0.6)
        s = spectral_norm(a.block(np.flatnonzero(small_r) + 1, np.flatnonzero(small_c) + 1)).value
        b = spectral_norm(a.block(np.flatnonzero(big_r) + 1, np.flatnonzero(big_c) + 1)).value
        assert s <= b + 1e-10
        assert 0.0 <= b <= 1 + 1e-10
