"""Uniformity norms U^d on F_2^n, dual functions, and the von Neumann bound.

U^d averages the product of f over all d-dimensional parallelepipeds
{x + sum of a subset of h_1..h_d}; the code evaluates it either from that
definition directly (small cubes) or through the recursion
U^d(f)^(2^d) = E_h U^{d-1}(f * f_h)^(2^{d-1}).
"""

from __future__ import annotations

import numpy as np

from .cube import cube_dim, f2_matrix_rank, f2_matvec_table, shift, walsh_hadamard
from .errors import BudgetExceededError, CertificateError, PreconditionError

DEFAULT_MAX_D = 4
DEFAULT_BUDGET_BITS = 26
DIRECT_BITS = 24  # direct evaluation keeps the full (x, h_1..h_d) grid this small
AUTO_DIRECT_BITS = 20  # "auto" switches to the recursion beyond this grid size


def _u_power_recursive(f, d):
    """||f||_{U^d}^(2^d) via the shift recursion."""
    if d == 1:
        m = float(f.mean())
        return m * m
    size = f.size
    if d == 2:
        if size * size <= 1 << 22:
            idx = np.arange(size)[None, :] ^ np.arange(size)[:, None]
            prods = f[idx] * f[None, :]
            row = prods.mean(axis=1)
            return float((row * row).mean())
        total = 0.0
        for h in range(size):
            m = float((f * shift(f, h)).mean())
            total += m * m
        return total / size
    total = 0.0
    for h in range(size):
        total += _u_power_recursive(f * shift(f, h), d - 1)
    return total / size


def _u_power_direct(f, d):
    """||f||_{U^d}^(2^d) straight from the parallelepiped average.

    Vectorizes over as many shift axes as fit in a 2^20 grid and loops the
    rest, so the full (x, h_1..h_d) average is evaluated literally.
    """
    size = f.size
    if d == 1:
        m = float(f.mean())
        return m * m
    n = size.bit_length() - 1
    inner = max(1, min(d, AUTO_DIRECT_BITS // n - 1))
    outer_count = d - inner
    grids = []
    for a in range(inner):
        shape = [1] * (inner + 1)
        shape[a] = size
        grids.append(np.arange(size).reshape(shape))
    grid_x = np.arange(size).reshape([1] * inner + [size])
    total = 0.0
    for outer in np.ndindex(*([size] * outer_count)):
        acc = np.ones((size,) * (inner + 1))
        for vertex in range(1 << d):
            offset = 0
            for j in range(outer_count):
                if (vertex >> j) & 1:
                    offset ^= outer[j]
            idx = grid_x ^ offset
            for a in range(inner):
                if (vertex >> (outer_count + a)) & 1:
                    idx = idx ^ grids[a]
            acc = acc * f[idx]
        total += float(acc.mean())
    return total / size**outer_count


def gowers_norm(
    f,
    d: int,
    method: str = "auto",
    budget_bits: int = DEFAULT_BUDGET_BITS,
    max_d: int = DEFAULT_MAX_D,
) -> float:
    """The uniformity norm ||f||_{U^d} on F_2^n.

    ``method`` picks the evaluation route: "direct" averages over every
    affine map (grid of n*(d+1) bits, refused beyond 24), "recursive" applies
    the shift recursion, "auto" uses direct for tiny grids and the recursion
    otherwise.  Both routes are exact; the cost cap 2^{n d} guards either.
    """
    f = np.asarray(f, dtype=float)
    n = cube_dim(f)
    if not 1 <= d <= max_d:
        raise PreconditionError(f"d must lie in 1..{max_d}, got {d}")
    if n * d > budget_bits:
        raise BudgetExceededError(
            f"U^{d} at n={n} needs ~2^{n * d} evaluations, beyond 2^{budget_bits}"
        )
    if method == "auto":
        method = "direct" if n * (d + 1) <= AUTO_DIRECT_BITS else "recursive"
    if method == "direct":
        if n * (d + 1) > DIRECT_BITS:
            raise BudgetExceededError(
                f"direct U^{d} at n={n} needs a 2^{n * (d + 1)} grid"
            )
        power = _u_power_direct(f, d)
    elif method == "recursive":
        power = _u_power_recursive(f, d)
    else:
        raise PreconditionError(f"unknown method {method!r}")
    return max(power, 0.0) ** (1.0 / (1 << d))


def gowers_norm_u2_fft(f) -> float:
    """U^2 through the Fourier side: (sum of fhat^4)^(1/4)."""
    spec = walsh_hadamard(np.asarray(f, dtype=float))
    return float(np.sum(spec**4) ** 0.25)


def _u_power_recursive_batch(fs, d):
    size = fs.shape[1]
    if d == 1:
        m = fs.mean(axis=1)
        return m * m
    x = np.arange(size)
    out = np.zeros(fs.shape[0])
    for h in range(size):
        shifted = fs[:, x ^ h]
        if d == 2:
            m = (fs * shifted).mean(axis=1)
            out += m * m
        else:
            out += _u_power_recursive_batch(fs * shifted, d - 1)
    return out / size


def gowers_norm_batch(fs, d: int, budget_bits: int = DEFAULT_BUDGET_BITS) -> np.ndarray:
    """U^d of every row of a (count, 2^n) matrix, via the shift recursion.

    Row-for-row equal to :func:`gowers_norm`; exists because sweeps over whole
    code families would otherwise pay the Python dispatch cost per function.
    """
    fs = np.asarray(fs, dtype=float)
    if fs.ndim != 2:
        raise PreconditionError("expected one function per row")
    n = cube_dim(fs[0])
    if not 1 <= d <= DEFAULT_MAX_D:
        raise PreconditionError(f"d must lie in 1..{DEFAULT_MAX_D}")
    if n * d > budget_bits:
        raise BudgetExceededError(f"U^{d} at n={n} is beyond 2^{budget_bits}")
    power = np.maximum(_u_power_recursive_batch(fs, d), 0.0)
    return power ** (1.0 / (1 << d))


def dual_function(f, d: int, budget_bits: int = DIRECT_BITS) -> np.ndarray:
    """Df(x): average of the product of f over all parallelepiped vertices but x.

    Satisfies <f, Df> = ||f||_{U^d}^(2^d) under the averaging inner product.
    """
    f = np.asarray(f, dtype=float)
    n = cube_dim(f)
    if d < 1:
        raise PreconditionError("d must be at least 1")
    if n * (d + 1) > budget_bits:
        raise BudgetExceededError(
            f"dual function at n={n}, d={d} needs a 2^{n * (d + 1)} grid"
        )
    size = f.size
    x = np.arange(size)
    out = np.zeros(size)
    # vectorize over (h_d, x); loop h_1..h_{d-1}
    grid_h = x[:, None]
    grid_x = x[None, :]
    for outer in np.ndindex(*([size] * (d - 1))):
        acc = np.ones((size, size))
        for vertex in range(1, 1 << d):
            offset = 0
            for j in range(d - 1):
                if (vertex >> j) & 1:
                    offset ^= outer[j]
            idx = grid_x ^ offset
            if (vertex >> (d - 1)) & 1:
                idx = idx ^ grid_h
            acc = acc * f[idx]
        out += acc.mean(axis=0)
    return out / size ** (d - 1)


def gvn_defect(f, g, h, t1, t2):
    """The trilinear form |E f(x) g(x+T1 r) h(x+T2 r)| and its U^2 bound.

    T1, T2 and T1 - T2 must all be invertible over F_2 (checked by rank); the
    returned pair (lhs, bound) always satisfies lhs <= bound + 1e-9.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    n = cube_dim(f)
    if g.shape != f.shape or h.shape != f.shape:
        raise PreconditionError("f, g, h must share a domain")
    for name, arr in (("f", f), ("g", g), ("h", h)):
        if np.any(np.abs(arr) > 1.0 + 1e-12):
            raise PreconditionError(f"{name} must take values in [-1, 1]")
    t1 = np.asarray(t1)
    t2 = np.asarray(t2)
    if t1.shape != (n, n) or t2.shape != (n, n):
        raise PreconditionError("T1, T2 must be n x n 0/1 matrices")
    diff = (t1 ^ t2) if t1.dtype.kind in "iub" else (t1 + t2) % 2
    for name, mat in (("T1", t1), ("T2", t2), ("T1-T2", diff)):
        if f2_matrix_rank(mat) != n:
            raise PreconditionError(f"{name} is singular over F_2")
    table1 = f2_matvec_table(t1)
    table2 = f2_matvec_table(t2)
    size = f.size
    x = np.arange(size)
    total = 0.0
    for r in range(size):
        total += float(np.dot(f, g[x ^ int(table1[r])] * h[x ^ int(table2[r])]))
    lhs = abs(total) / (size * size)
    bound = gowers_norm(f, 2)
    if lhs > bound + 1e-9:
        raise CertificateError(
            f"von Neumann bound violated: {lhs} > {bound} + 1e-9"
        )
    return lhs, bound
