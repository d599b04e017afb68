"""Factors, conditional expectation, and the level-set bridge.

Joining factors refines partitions and can only gain projected energy; the
level sets of a correlating function g produce a factor on which the
projection of f keeps almost all of the correlation <f, g>.
"""

import numpy as np

from structrand import (
    Factor,
    FiniteProbabilitySpace,
    conditional_expectation,
    level_set_factor,
    projection_norm,
)

rng = np.random.default_rng(6)
space = FiniteProbabilitySpace.uniform(64)
f = rng.standard_normal(64)

print("-- conditional expectation is an averaging projection --")
coarse = Factor(rng.integers(0, 3, 64))
fine = coarse.join(Factor(rng.integers(0, 2, 64)))
ef_coarse = conditional_expectation(space, f, coarse)
ef_fine = conditional_expectation(space, f, fine)
print("atoms:", coarse.num_atoms, "->", fine.num_atoms, "after one join")
print("energy:", round(space.l2(ef_coarse) ** 2, 4), "->", round(space.l2(ef_fine) ** 2, 4))
print("means all agree:", round(space.integral(f), 6), round(space.integral(ef_coarse), 6), round(space.integral(ef_fine), 6))
tower = conditional_expectation(space, ef_fine, coarse)
print("tower property gap:", space.l2(tower - ef_coarse))

print("\n-- level sets convert correlation into projection --")
big = FiniteProbabilitySpace.uniform(256)
f = rng.standard_normal(256)
g = rng.standard_normal(256)
f /= big.l1(f)
g /= big.l2(g)
corr = abs(big.inner(f, g))
print("correlation |<f, g>| =", round(corr, 4))
for eps in (0.2, 0.1, 0.05):
    factor = level_set_factor(g, eps, alpha=0.0)
    kept = projection_norm(big, f, factor)
    print(
        f"  eps={eps:4}: {factor.num_atoms:2d} level sets, "
        f"projection norm {kept:.4f} >= {corr:.4f} - {eps}"
    )

print("\n-- the shift parameter moves atom boundaries, the bound survives --")
for alpha in (0.0, 0.3, 0.7):
    factor = level_set_factor(g, 0.1, alpha)
    kept = projection_norm(big, f, factor)
    print(f"  alpha={alpha}: projection norm {kept:.4f}")
