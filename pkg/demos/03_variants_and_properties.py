"""
Alignment recipes and why they work
===================================

Each recipe is a closed-form fit. This script checks a few of the facts that
make the closed forms correct on random data.
"""

import numpy as np

import orient
from orient.linalg import cross_covariance
from orient.synthetic import random_orthogonal

rng = np.random.default_rng(2)
a = rng.standard_normal((50, 8)) + 1.0
b = 0.5 * a @ random_orthogonal(8, rng) - 2.0 + 0.05 * rng.standard_normal((50, 8))
pair = orient.AlignedPair.from_arrays(a, b)

##############################################################################
# Residual error of every recipe. ``c`` is scored against the centered target.

for variant in orient.Variant:
    t = orient.align(pair, variant)
    ref = orient.reference_matrix(pair, variant)
    print(f"{variant.value:>5}: scale {t.scale:.4f}  rmse {orient.rmse(ref, t.transform(b)):.4f}")

##############################################################################
# Scaling the source does not change the best rotation.

r1 = orient.optimal_rotation(cross_covariance(a, b))
r2 = orient.optimal_rotation(cross_covariance(a, 7.0 * b))
print("rotation change under scaling:", np.abs(r1 - r2).max())

##############################################################################
# The fitted rotation beats every random rotation on the summed inner product.

best = np.sum(a * (b @ r1))
trials = [np.sum(a * (b @ random_orthogonal(8, rng))) for _ in range(1000)]
print("best:", best, "best random:", max(trials))

##############################################################################
# Forbidding reflections gives a proper rotation even for mirrored data.

mirror = a * np.array([1, 1, 1, 1, 1, 1, 1, -1])
t = orient.align(orient.AlignedPair.from_arrays(a, mirror), "r", allow_reflection=False)
print("det with reflections forbidden:", round(np.linalg.det(t.rotation), 12))

##############################################################################
# The ridge-regularized affine map is the unconstrained baseline.

fit = orient.affine_baseline(pair, gamma=0.1)
print("affine objective:", orient.affine_objective(pair, fit.m, 0.1))
