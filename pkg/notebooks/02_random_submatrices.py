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
# # Random submatrices
#
# Monte Carlo sweeps of random square and rectangular submatrices against the
# curve `2 sqrt(d (1 - d))`, plus moment estimates.

# %%
import math
from pathlib import Path

import numpy as np

from dftnorms import montecarlo as mc
from dftnorms import svgplot

# %%
n = 512
grid = np.linspace(0.05, 0.5, 10)
table = mc.quartercircle_check(n, grid, trials=50, seed=0)
for s in table:
    lab = s.point_label
    print(f"delta {lab['delta']:.2f}  mean {s.mean:.4f}  curve {lab['conjectured']:.4f}  "
          f"dev {lab['deviation']:+.4f}")

# %% [markdown]
# Scaled by `delta^{-1/2}`, the mean peaks at small delta.

# %%
best, scan = mc.argmax_scan(256, trials=50, seed=1)
print("peak near delta =", best, " 2/sqrt(n) =", 2 / math.sqrt(256))

# %%
xs = [s.point_label["delta"] for s in table]
svg = svgplot.line_plot({"observed": (xs, [s.mean for s in table]),
                         "2 sqrt(d(1-d))": (xs, [s.point_label["conjectured"] for s in table])},
                        title=f"n = {n}", xlabel="delta", ylabel="mean norm")
Path("quartercircle.svg").write_text(svg)

# %% [markdown]
# Extrapolating a moment from small submatrices to larger ones.

# %%
rep = mc.verify_extrapolation(128, 64, 0.5, 0.25, trials=2000, seed=3)
print(rep.to_dict())
