"""
How much error does noise leave behind?
=======================================

Add i.i.d. Gaussian noise to every coordinate of a copy, align it back, and
measure what is left. With ``n`` much larger than ``d`` the rotation barely
absorbs any noise, so the residual RMSE stays close to ``sigma * sqrt(d)``.
"""

import math

import numpy as np

import orient
from orient.synthetic import random_embedding

rng = np.random.default_rng(1)
emb = random_embedding(4000, 100, rng)

print("sigma  fraction  rmse     sigma*sqrt(d*fraction)")
for sigma in [0.1, 0.2, 0.3]:
    for fraction in [1.0, 0.5, 0.1]:
        report = orient.gaussian_calibrate(emb, orient.NoiseSpec(sigma, fraction, seed=0))
        predicted = sigma * math.sqrt(emb.dim * fraction)
        print(f"{sigma:<6} {fraction:<9} {report.score:<8.4f} {predicted:.4f}")

##############################################################################
# Noising only part of the rows lowers the error roughly by the square root
# of the fraction, since the per-row squared error averages over all rows.
# The same seed always picks the same rows and the same noise.

a = orient.gaussian_calibrate(emb, orient.NoiseSpec(0.2, 0.5, seed=7)).score
b = orient.gaussian_calibrate(emb, orient.NoiseSpec(0.2, 0.5, seed=7)).score
print("repeatable:", a == b)
