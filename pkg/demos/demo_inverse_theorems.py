"""Recovering polynomial structure from near-maximal uniformity norms.

Plant a low-degree code, flip a handful of signs, and watch the derivative
integration reconstruct the polynomial; then survey the rigidity gap that
makes the majority votes safe.
"""

import numpy as np

from structrand import (
    F2Polynomial,
    correlation_search,
    gowers_norm,
    inverse_99,
    inverse_100,
    rigidity_gap,
)

rng = np.random.default_rng(2)

print("-- exact recovery: a clean quadratic code on 16 points --")
planted = F2Polynomial.from_monomials(4, [(0, 1), (3,)])
code = planted.code()
print("U3 of the code:", gowers_norm(code, 3))
print("recovered:     ", inverse_100(code, 3))

print("\n-- noisy recovery: linear code on 1024 points, 1% sign flips --")
n = 10
planted = F2Polynomial.from_monomials(n, [(2,), (5,), (9,)])
noisy = planted.code() * np.where(rng.random(1 << n) < 0.01, -1.0, 1.0)
print("U2 dropped to:", round(gowers_norm(noisy, 2), 4))
rec = inverse_99(noisy, 2, 0.1)
print("recovered:    ", rec.poly, " sign", rec.sign)
print("correlation:  ", rec.correlation)
print("good shifts:  ", rec.good_shift_fraction)

print("\n-- noisy recovery: quadratic code on 256 points, d = 3 --")
planted = F2Polynomial.from_monomials(8, [(0, 1), (4, 6), (3,)])
noisy = planted.code() * np.where(rng.random(1 << 8) < 0.005, -1.0, 1.0)
rec = inverse_99(noisy, 3, 1 / 16)
print("recovered:    ", rec.poly)
print("matches plant:", np.array_equal(rec.sign * rec.poly.code(), planted.code()))

print("\n-- why majority votes are safe: the rigidity gap --")
gap, runner_mean, runner = rigidity_gap(4, 2)
print(f"best non-trivial quadratic code mean on 16 points: {runner_mean} ({runner})")
print(f"so any code averaging above {1 - gap} is identically 1")

print("\n-- exhaustive correlation search doubles as a sanity check --")
f = np.where(rng.random(16) < 0.5, -1.0, 1.0)
best, corr = correlation_search(f, 3)
print(f"best quadratic-code correlation of a random sign pattern: {corr:.4f} ({best})")
print("its U3:", round(gowers_norm(f, 3), 4), " (large correlation would force a large norm)")
