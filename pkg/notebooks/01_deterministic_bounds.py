# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Fixed submatrices of the DFT
#
# Norms of explicit submatrices, the Dirac comb as the extreme case, and how
# the closed-form bounds compare with exact values.

# %%
import numpy as np

from dftnorms import bounds
from dftnorms.matrixcore import IndexSet, dft, dirac_comb, gram_matrix, submatrix
from dftnorms.speclinalg import condition_number, spectral_norm

# %% [markdown]
# The comb `T = Omega = {sqrt(n), 2 sqrt(n), ...}` has norm exactly 1 and a
# singular Gram matrix.

# %%
for n in (16, 64, 256):
    t, om = dirac_comb(n)
    g = gram_matrix(dft(n), om, t)
    lo, hi = g.extreme_eigenvalues()
    print(n, spectral_norm(g.off_diagonal).value, lo, condition_number(spectral_norm(g.off_diagonal).value))

# %% [markdown]
# Product bound vs exact norm for contiguous blocks at n = 64.

# %%
n = 64
a = dft(n)
for k in (2, 4, 6, 7):
    block = IndexSet.of(n, range(1, k + 1))
    exact = spectral_norm(submatrix(a, block, block)).value
    rep = bounds.donoho_stark(k, k, n)
    print(f"|T|=|O|={k}: exact {exact:.4f}  bound {rep.bound_value:.4f}  premise {rep.premises_hold}")

# %% [markdown]
# Prime length: any pair with `|T| + |O| <= n` gives norm below 1.

# %%
n = 13
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(2000):
    k = rng.integers(1, n)
    t = IndexSet.of(n, rng.choice(n, k, replace=False) + 1)
    om = IndexSet.of(n, rng.choice(n, n - k, replace=False) + 1)
    worst = max(worst, spectral_norm(submatrix(dft(n), om, t)).value)
print("largest norm seen:", worst)

# %% [markdown]
# Report objects serialize to JSON for downstream tooling.

# %%
print(bounds.large_sieve(8, 4, 64).to_json())
