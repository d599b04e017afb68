"""Finite probability spaces, factors, and energy-increment decompositions.

A factor is a finite measurable partition, held as a label per point; joining
factors intersects their atoms.  Conditional expectation replaces a function
by its weighted atom averages and is the orthogonal projection onto the
factor-measurable functions, which is what drives every argument here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExceededError,
    CertificateError,
    MajorantViolationError,
    PreconditionError,
)
from .hilbert import EPS_TOL, GrowthFunction, _ceil_guard, _iteration_budget


class FiniteProbabilitySpace:
    """Point weights summing to one; the uniform constructor covers most uses."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise PreconditionError("weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise PreconditionError(f"weights sum to {w.sum()}, not 1")
        self.weights = w
        self.size = w.size

    @classmethod
    def uniform(cls, n: int):
        return cls(np.full(n, 1.0 / n))

    def integral(self, f) -> float:
        return float(np.dot(self.weights, np.asarray(f, dtype=float)))

    def inner(self, f, g) -> float:
        return float(np.dot(self.weights, np.asarray(f) * np.asarray(g)))

    def l1(self, f) -> float:
        return self.integral(np.abs(np.asarray(f, dtype=float)))

    def l2(self, f) -> float:
        return math.sqrt(max(self.inner(f, f), 0.0))

    def linf(self, f) -> float:
        f = np.asarray(f, dtype=float)
        live = self.weights > 0
        return float(np.max(np.abs(f[live]))) if live.any() else 0.0


class Factor:
    """A partition of the points, as an atom label per point."""

    def __init__(self, labels):
        labels = np.asarray(labels)
        _, inverse = np.unique(labels, return_inverse=True)
        self.labels = inverse.astype(np.int64)
        self.num_atoms = int(self.labels.max()) + 1 if self.labels.size else 0

    @classmethod
    def trivial(cls, n: int):
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def discrete(cls, n: int):
        return cls(np.arange(n, dtype=np.int64))

    @classmethod
    def from_indicator(cls, mask):
        return cls(np.asarray(mask).astype(bool).astype(np.int64))

    def atoms(self):
        return [np.flatnonzero(self.labels == a) for a in range(self.num_atoms)]

    def join(self, other: "Factor") -> "Factor":
        if self.labels.size != other.labels.size:
            raise PreconditionError("factors live on different ground sets")
        paired = self.labels * (other.labels.max() + 1) + other.labels
        return Factor(paired)

    def refines(self, other: "Factor") -> bool:
        """True when every atom of self sits inside one atom of other."""
        for a in range(self.num_atoms):
            if len(np.unique(other.labels[self.labels == a])) > 1:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Factor) and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())


def factor_join(y1: Factor, y2: Factor) -> Factor:
    return y1.join(y2)


def join_all(n: int, factors) -> Factor:
    out = Factor.trivial(n)
    for y in factors:
        out = out.join(y)
    return out


@dataclass
class FactorFamily:
    """The structure stock: an indexed finite collection of factors."""

    members: list

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i) -> Factor:
        return self.members[i]


def conditional_expectation(space: FiniteProbabilitySpace, f, factor: Factor):
    """Weighted atom averages of f, constant on each atom of the factor.

    Atoms of measure zero get the value 0 (they are invisible to every norm
    used here).
    """
    f = np.asarray(f, dtype=float)
    masses = np.bincount(factor.labels, weights=space.weights, minlength=factor.num_atoms)
    sums = np.bincount(
        factor.labels, weights=space.weights * f, minlength=factor.num_atoms
    )
    averages = np.divide(sums, masses, out=np.zeros_like(sums), where=masses > 0)
    return averages[factor.labels]


def projection_norm(space, f, factor) -> float:
    return space.l2(conditional_expectation(space, f, factor))


def energy_increment_step(space, f, base: Factor, family: FactorFamily, eps: float):
    """Index of the family member whose projection of the residual is largest,
    provided it exceeds eps (else None); joining it raises the energy of
    E(f | base) by at least eps^2."""
    if not 0 < eps <= 1:
        raise PreconditionError("eps must lie in (0, 1]")
    residual = np.asarray(f, dtype=float) - conditional_expectation(space, f, base)
    best_idx, best_norm = None, 0.0
    for i, member in enumerate(family.members):
        level = projection_norm(space, residual, member)
        if level > best_norm:
            best_idx, best_norm = i, level
    if best_idx is None or best_norm <= eps + EPS_TOL:
        return None
    return best_idx


@dataclass
class WeakFactorSplit:
    member_indices: list
    factor: Factor
    f_str: np.ndarray
    f_psd: np.ndarray
    iterations: int
    trace: list = field(default_factory=list)

    @property
    def complexity(self):
        return len(self.member_indices)


def weak_factor_decompose(
    space,
    f,
    base: Factor,
    family: FactorFamily,
    eps: float,
    *,
    sparse: bool = False,
    energy_cap: float = 1.0,
    factor_hook=None,
) -> WeakFactorSplit:
    """Join stock factors onto ``base`` until the residual projects small.

    f_str = E(f | base joined with the selections), f_psd = f - f_str with
    every stock projection of f_psd at most eps.  Dense mode requires
    ||f||_2 <= 1 and finishes within 1/eps^2 steps; sparse mode drops the
    norm hypothesis and instead trusts ``energy_cap`` (the majorant bound
    (1 + eta)^2), giving energy_cap/eps^2 steps.  ``factor_hook`` is invoked
    on every factor actually conditioned on.
    """
    f = np.asarray(f, dtype=float)
    if not 0 < eps <= 1:
        raise PreconditionError("eps must lie in (0, 1]")
    if not sparse and space.l2(f) > 1.0 + EPS_TOL:
        raise PreconditionError("||f||_2 must be at most 1 (dense mode)")
    budget = int(math.floor(energy_cap / (eps * eps) * (1 + 1e-12) + 1e-12))
    current = base
    if factor_hook is not None:
        factor_hook(current, ())
    chosen = []
    trace = []
    while True:
        idx = energy_increment_step(space, f, current, family, eps)
        if idx is None:
            break
        if len(chosen) >= budget:
            raise CertificateError("energy argument violated: join budget exceeded")
        chosen.append(idx)
        current = current.join(family[idx])
        if factor_hook is not None:
            factor_hook(current, tuple(chosen))
        energy = projection_norm(space, f, current) ** 2
        if energy > energy_cap + EPS_TOL:
            raise CertificateError(
                f"projected energy {energy} exceeded the cap {energy_cap}"
            )
        trace.append({"member": idx, "energy": energy})
    f_str = conditional_expectation(space, f, current)
    return WeakFactorSplit(
        member_indices=chosen,
        factor=current,
        f_str=f_str,
        f_psd=f - f_str,
        iterations=len(chosen),
        trace=trace,
    )


@dataclass
class FactorDecomposition:
    """Certified three-part factor split f = f_str + f_psd + f_err."""

    factor: Factor
    member_indices: list
    f_str: np.ndarray
    f_psd: np.ndarray
    f_err: np.ndarray
    growth_m: int
    complexity: int
    pseudorandomness_eps: float
    pseudo_found: float
    error_norm: float
    stage_index: int
    stages: list = field(default_factory=list)
    majorant_linf: float | None = None

    def reconstruct(self):
        return self.f_str + self.f_psd + self.f_err

    def to_json_dict(self) -> dict:
        return {
            "member_indices": list(self.member_indices),
            "complexity": self.complexity,
            "growth_M": self.growth_m,
            "pseudorandomness_eps": self.pseudorandomness_eps,
            "pseudo_found": self.pseudo_found,
            "error_norm": self.error_norm,
            "stage_index": self.stage_index,
            "stages": self.stages,
            "majorant_linf": self.majorant_linf,
            "atom_count": self.factor.num_atoms,
        }

    def verify(self, space, f, family: FactorFamily) -> None:
        f = np.asarray(f, dtype=float)
        if space.l2(f - self.reconstruct()) > 1e-10:
            raise CertificateError("reconstruction failed")
        expected = conditional_expectation(space, f, self.factor)
        if space.l2(self.f_str - expected) > 1e-10:
            raise CertificateError("f_str is not E(f | factor)")
        if space.l2(self.f_err) > self.error_norm + EPS_TOL:
            raise CertificateError("f_err exceeds the certified bound")
        worst = max(
            (projection_norm(space, self.f_psd, y) for y in family.members),
            default=0.0,
        )
        if worst > self.pseudorandomness_eps + EPS_TOL:
            raise CertificateError(
                f"f_psd projects at {worst}, above {self.pseudorandomness_eps}"
            )


def strong_factor_decompose(
    space,
    f,
    family: FactorFamily,
    eps: float,
    growth: GrowthFunction,
    *,
    sparse: bool = False,
    energy_cap: float = 1.0,
    factor_hook=None,
    complexity_cap: int = 10**6,
    stage_time_s: float = 300.0,
) -> FactorDecomposition:
    """Three-part factor split with growth-controlled pseudorandomness.

    Stage i refines the factor at threshold 1/F(M_{i-1}) along the sequence
    M_0 = 1, M_i = F(M_{i-1})^2 until a stage gains at most eps^2 of energy;
    f_str is the conditional expectation before that stage, f_err the gain of
    the stage (norm <= eps), f_psd the final residual, 1/F(M)-pseudorandom
    with M the reported sequence value.  Requires F(M) >= 2M.
    """
    f = np.asarray(f, dtype=float)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if not sparse and space.l2(f) > 1.0 + EPS_TOL:
        raise PreconditionError("||f||_2 must be at most 1 (dense mode)")
    n = space.size
    max_stage = int(math.floor(energy_cap / (eps * eps) * (1 + 1e-12) + 1e-12)) + 1
    m_prev = 1
    current = Factor.trivial(n)
    prev_proj = conditional_expectation(space, f, current)
    prev_energy = space.l2(prev_proj) ** 2
    stages = []
    started = time.monotonic()
    for stage_index in range(1, max_stage + 1):
        f_value = growth(m_prev)
        if f_value < 2 * m_prev:
            raise PreconditionError(
                f"growth must satisfy F(M) >= 2M, got F({m_prev}) = {f_value}"
            )
        f_int = _ceil_guard(f_value)
        stage_eps = 1.0 / f_int if not math.isinf(f_int) else 1e-12
        over_cap = math.isinf(f_int) or f_int * f_int > complexity_cap
        if over_cap:
            # the threshold is beyond the cap: the stage may still terminate
            # immediately, but building any structure there is refused
            proj = conditional_expectation(space, f, current)
            residual = f - proj
            worst = max(
                (projection_norm(space, residual, y) for y in family.members),
                default=0.0,
            )
            if worst > stage_eps + EPS_TOL:
                raise BudgetExceededError(
                    f"stage {stage_index} needs structure beyond the complexity cap",
                    partial={"stages": stages},
                )
            split = WeakFactorSplit(
                member_indices=[],
                factor=current,
                f_str=proj,
                f_psd=residual,
                iterations=0,
            )
        else:
            split = weak_factor_decompose(
                space,
                f,
                current,
                family,
                min(stage_eps, 1.0),
                sparse=sparse,
                energy_cap=energy_cap,
                factor_hook=factor_hook,
            )
        energy = space.l2(split.f_str) ** 2
        gain = energy - prev_energy
        stages.append(
            {
                "stage": stage_index,
                "M": None if math.isinf(f_int) else int(f_int) ** 2,
                "threshold": stage_eps,
                "joins": split.iterations,
                "energy_gain": gain,
                "members": list(split.member_indices),
            }
        )
        if gain <= eps * eps + 1e-12:
            f_psd = f - split.f_str
            worst = max(
                (projection_norm(space, f_psd, y) for y in family.members),
                default=0.0,
            )
            return FactorDecomposition(
                factor=current,
                member_indices=[i for s in stages[:-1] for i in s["members"]],
                f_str=prev_proj,
                f_psd=f_psd,
                f_err=split.f_str - prev_proj,
                growth_m=m_prev,
                complexity=sum(s["joins"] for s in stages[:-1]),
                pseudorandomness_eps=stage_eps,
                pseudo_found=worst,
                error_norm=eps,
                stage_index=stage_index,
                stages=stages,
            )
        current = split.factor
        prev_proj = split.f_str
        prev_energy = energy
        m_prev = f_int * f_int if not math.isinf(f_int) else f_int
        if time.monotonic() - started > stage_time_s:
            raise BudgetExceededError(
                f"stage wall clock exceeded {stage_time_s}s", partial={"stages": stages}
            )
    raise CertificateError("pigeonhole failed: no stage had a small energy gain")


def sparse_decompose(
    space,
    f,
    nu,
    family: FactorFamily,
    eps: float,
    growth: GrowthFunction,
    eta: float,
    **kwargs,
) -> FactorDecomposition:
    """Structure theorem under a pseudorandom majorant instead of boundedness.

    Requires 0 <= f <= nu pointwise.  Every factor actually conditioned on is
    checked to satisfy ||E(nu | Y)||_inf <= 1 + eta (raising
    MajorantViolationError naming the factor otherwise), which caps projected
    energies by (1 + eta)^2 and gives the dense conclusions back: f_str lands
    in [0, 1 + eta] pointwise and keeps the integral of f exactly.
    """
    f = np.asarray(f, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if eta < 0:
        raise PreconditionError("eta must be non-negative")
    if np.any(nu < -1e-12):
        raise PreconditionError("the majorant must be non-negative")
    if np.any((f < -1e-12) | (f > nu + 1e-9)):
        raise PreconditionError("need 0 <= f <= nu pointwise")
    seen = {}

    def check(factor, members):
        key = factor.labels.tobytes()
        if key in seen:
            return
        level = space.linf(conditional_expectation(space, nu, factor))
        seen[key] = level
        if level > 1.0 + eta + EPS_TOL:
            raise MajorantViolationError(
                f"majorant conditional expectation reaches {level:.6f} > 1 + {eta}",
                members=members,
                linf=level,
            )

    # scan the stock up front so violations surface before any work happens
    for i, member in enumerate(family.members):
        check(member, (i,))

    cap = (1.0 + eta) ** 2
    dec = strong_factor_decompose(
        space,
        f,
        family,
        eps,
        growth,
        sparse=True,
        energy_cap=cap,
        factor_hook=check,
        **kwargs,
    )
    dec.majorant_linf = max(seen.values(), default=0.0)
    if np.any(dec.f_str < -1e-9) or np.any(dec.f_str > 1.0 + eta + 1e-9):
        raise CertificateError("f_str escaped [0, 1 + eta]")
    if abs(space.integral(dec.f_str) - space.integral(f)) > 1e-12:
        raise CertificateError("conditional expectation failed to keep the mean")
    return dec


def level_set_factor(g, eps: float, alpha: float = 0.0) -> Factor:
    """Partition by the level sets g in [(k + alpha) eps, (k + 1 + alpha) eps).

    Oscillation of g inside each atom is below eps, so projections onto this
    factor retain correlation with g up to an eps loss.
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if not 0 <= alpha < 1:
        raise PreconditionError("alpha must lie in [0, 1)")
    g = np.asarray(g, dtype=float)
    return Factor(np.floor(g / eps - alpha).astype(np.int64))


def interval_factor(n: int, start: int, stop: int) -> Factor:
    """The two-atom factor {[start, stop), complement} on n points."""
    if not 0 <= start < stop <= n:
        raise PreconditionError("need 0 <= start < stop <= n")
    mask = np.zeros(n, dtype=bool)
    mask[start:stop] = True
    return Factor.from_indicator(mask)


def dyadic_interval_family(n: int, min_length: int) -> FactorFamily:
    """All dyadic-interval factors of length >= min_length (proper subsets)."""
    members = []
    length = n
    while length >= max(1, min_length):
        if length < n:
            for start in range(0, n, length):
                members.append(interval_factor(n, start, min(start + length, n)))
        length //= 2
    return FactorFamily(members=members)
