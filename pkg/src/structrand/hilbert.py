"""Greedy decompositions in a finite inner-product space.

Vectors are numpy arrays of any shape; the inner product throughout is the
averaging one, ``<f, g> = mean(f * g)``, so anything with entries in [-1, 1]
has norm at most 1.  An :class:`AtomSet` supplies the stock of "basic
structured" directions (all of norm <= 1) together with a violating-atom
search; the decomposition routines are generic over it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExceededError,
    CertificateError,
    DimensionMismatchError,
    PreconditionError,
)

# Fixed comparison tolerance for eps-threshold tests.
EPS_TOL = 1e-9
# Correlations below this are treated as exactly zero (no usable energy).
MIN_CORR = 1e-12
# Reconstruction / orthogonality tolerance the certificates promise.
RECON_TOL = 1e-10


def inner_product(f, g) -> float:
    """Averaging inner product ``mean(f * g)`` of two same-shaped arrays."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise DimensionMismatchError(f"shape mismatch: {f.shape} vs {g.shape}")
    return float(np.dot(f.ravel(), g.ravel()) / f.size)


def norm(f) -> float:
    """Norm induced by :func:`inner_product`."""
    return math.sqrt(max(inner_product(f, f), 0.0))


@dataclass
class CorrelationScan:
    """Outcome of scanning an atom family against a fixed vector.

    ``lower`` is the best |<f, v>| actually found, ``upper`` a certified upper
    bound over the whole family.  For exact scans the two coincide.
    """

    lower: float
    upper: float
    exact: bool
    witness: object = None

    @property
    def value(self) -> float:
        return self.lower


class AtomSet:
    """A finite family of structured directions, each of norm at most 1.

    Subclasses provide ``atom_vector`` (dense values of one atom),
    ``candidates`` (atoms correlating with f above a threshold, strongest
    first) and ``scan`` (the pseudorandomness level of f against the family).
    ``exact`` declares whether an empty search certifies that no violating
    atom exists; heuristic sets must leave it False.
    """

    exact: bool = True
    name: str = "atoms"

    def atom_vector(self, key) -> np.ndarray:
        raise NotImplementedError

    def candidates(self, f, eps: float) -> list:
        """(key, <f, atom>) pairs with |<f, atom>| >= eps - EPS_TOL, best first."""
        raise NotImplementedError

    def scan(self, f) -> CorrelationScan:
        raise NotImplementedError

    def key_json(self, key):
        """JSON-serializable description of an atom key."""
        return key


class DenseAtomSet(AtomSet):
    """Atoms held as rows of an explicit matrix; scans are exhaustive."""

    exact = True

    def __init__(self, matrix, name="dense", max_candidates=64):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError("expected one atom per row")
        sq = np.einsum("ij,ij->i", matrix, matrix) / matrix.shape[1]
        if np.any(sq > 1.0 + 1e-9):
            raise PreconditionError("atom norms must not exceed 1")
        self.matrix = matrix
        self.atom_sq_norms = sq
        self.name = name
        self.max_candidates = max_candidates

    def __len__(self):
        return self.matrix.shape[0]

    def atom_vector(self, key):
        return self.matrix[key]

    def _correlations(self, f):
        f = np.asarray(f, dtype=float).ravel()
        if f.size != self.matrix.shape[1]:
            raise DimensionMismatchError("vector does not match atom dimension")
        return self.matrix @ f / f.size

    def candidates(self, f, eps):
        corr = self._correlations(f)
        thresh = max(eps - EPS_TOL, MIN_CORR)
        idx = np.flatnonzero(np.abs(corr) >= thresh)
        idx = idx[np.lexsort((idx, -np.abs(corr[idx])))]
        return [(int(i), float(corr[i])) for i in idx[: self.max_candidates]]

    def scan(self, f):
        corr = self._correlations(f)
        best = int(np.argmax(np.abs(corr)))
        level = float(abs(corr[best]))
        return CorrelationScan(lower=level, upper=level, exact=True, witness=best)


class GrowthFunction:
    """A growth function trading structured complexity against pseudorandomness.

    Wraps a map F on positive integers with F(M) > M enforced at every query
    (raising otherwise).  Presets cover the linear, exponential and
    eps**(-1/4) * 2**M families; arbitrary finite tables are supported with a
    declared extension rule.
    """

    def __init__(self, name, fn):
        self.name = name
        self._fn = fn

    def __call__(self, m: int) -> float:
        try:
            value = float(self._fn(m))
        except OverflowError:
            return math.inf
        if not value > m:
            raise PreconditionError(
                f"growth function {self.name} must satisfy F(M) > M, got F({m}) = {value}"
            )
        return value

    def __repr__(self):
        return f"GrowthFunction({self.name})"

    @classmethod
    def linear(cls, factor, offset=0.0):
        if factor <= 1 and offset <= 0:
            raise PreconditionError("linear growth needs factor > 1 or a positive offset")
        label = f"linear-{factor:g}" + (f"+{offset:g}" if offset else "")
        return cls(label, lambda m: factor * m + offset)

    @classmethod
    def exponential(cls, base=2.0):
        if base <= 1:
            raise PreconditionError("exponential growth needs base > 1")
        return cls(f"exp-{base:g}", lambda m: base**m)

    @classmethod
    def arithmetic_regularity(cls, eps):
        if not 0 < eps <= 1:
            raise PreconditionError("eps must lie in (0, 1]")
        scale = eps ** (-0.25)
        return cls(f"arith-reg({eps:g})", lambda m: scale * 2.0**m)

    @classmethod
    def from_table(cls, table, extension="error"):
        table = {int(k): float(v) for k, v in table.items()}

        def fn(m):
            if m in table:
                return table[m]
            if extension == "double":
                return 2.0 * m
            if extension == "exp-2":
                return 2.0**m
            raise PreconditionError(f"growth table has no entry for M={m}")

        return cls(f"table[{len(table)};{extension}]", fn)


@dataclass
class Decomposition:
    """A certified split f = f_str + f_psd + f_err.

    ``atoms`` lists (key, coefficient) pairs in selection order;
    ``complexity_m`` and ``coeff_bound_k`` are the certified caps on their
    number and magnitude.  ``pseudorandomness_eps`` is the level claimed for
    f_psd (definitive only when ``pseudo_exact``); ``error_norm`` bounds
    ||f_err||.
    """

    atoms: list
    f_str: np.ndarray
    f_psd: np.ndarray
    f_err: np.ndarray
    complexity_m: int
    coeff_bound_k: float
    pseudorandomness_eps: float
    pseudo_exact: bool
    pseudo_found: float
    error_norm: float
    iterations: int
    trace: list = field(default_factory=list)
    stages: list | None = None
    growth_m: int | None = None

    def reconstruct(self) -> np.ndarray:
        return self.f_str + self.f_psd + self.f_err

    def max_coefficient(self) -> float:
        return max((abs(c) for _, c in self.atoms), default=0.0)

    def to_json_dict(self, atom_set: AtomSet | None = None) -> dict:
        describe = atom_set.key_json if atom_set is not None else (lambda k: k)
        return {
            "atoms": [{"atom": describe(k), "coefficient": c} for k, c in self.atoms],
            "complexity_M": self.complexity_m,
            "coeff_bound_K": self.coeff_bound_k,
            "max_coefficient": self.max_coefficient(),
            "pseudorandomness_eps": self.pseudorandomness_eps,
            "pseudo_exact": self.pseudo_exact,
            "pseudo_found": self.pseudo_found,
            "error_norm": self.error_norm,
            "norm_str": norm(self.f_str),
            "norm_psd": norm(self.f_psd),
            "norm_err": norm(self.f_err),
            "iterations": self.iterations,
            "trace": self.trace,
            "stages": self.stages,
            "growth_M": self.growth_m,
        }

    def verify(self, f, atom_set: AtomSet) -> None:
        """Re-derive every certified claim; raise CertificateError on any gap."""
        f = np.asarray(f, dtype=float)
        if norm(f - self.reconstruct()) > RECON_TOL:
            raise CertificateError("reconstruction f_str + f_psd + f_err != f")
        if len(self.atoms) > self.complexity_m:
            raise CertificateError("more atoms than the certified complexity")
        if self.atoms and self.max_coefficient() > self.coeff_bound_k + EPS_TOL:
            raise CertificateError("coefficient exceeds the certified bound")
        if norm(self.f_err) > self.error_norm + EPS_TOL:
            raise CertificateError("f_err larger than the certified error norm")
        combo = np.zeros_like(f, dtype=float)
        for key, c in self.atoms:
            combo = combo + c * atom_set.atom_vector(key)
        if norm(self.f_str - combo) > RECON_TOL:
            raise CertificateError("f_str is not the recorded atom combination")
        scan = atom_set.scan(self.f_psd)
        if scan.lower > self.pseudorandomness_eps + EPS_TOL:
            raise CertificateError(
                f"f_psd correlates at {scan.lower}, above the certified "
                f"{self.pseudorandomness_eps}"
            )


def _check_eps(eps):
    if not 0 < eps <= 1:
        raise PreconditionError(f"eps must lie in (0, 1], got {eps}")


def _check_unit_norm(f):
    n = norm(f)
    if n > 1.0 + EPS_TOL:
        raise PreconditionError(f"||f|| = {n} exceeds 1")
    return n


def _iteration_budget(eps):
    # floor(1/eps^2), guarded against float dust in 1/eps**2.
    return int(math.floor((1.0 / (eps * eps)) * (1.0 + 1e-12) + 1e-12))


def energy_decrement_step(f, atom_set: AtomSet, eps: float):
    """One greedy step: the best-correlating atom and its projection weight.

    Returns (key, c) with c = <f, v>/||v||^2 when some atom has
    |<f, v>| >= eps, so that ||f - c v||^2 <= ||f||^2 - eps^2; returns None
    when the scan finds no such atom.
    """
    _check_eps(eps)
    _check_unit_norm(f)
    found = atom_set.candidates(f, eps)
    if not found:
        return None
    key, ip = found[0]
    v = atom_set.atom_vector(key)
    sq = inner_product(v, v)
    c = ip / sq
    if abs(c) > 1.0 / eps + EPS_TOL:
        raise CertificateError("projection coefficient exceeds 1/eps")
    return key, c


def pseudorandomness_level(f, atom_set: AtomSet) -> CorrelationScan:
    """Max |<f, v>| over the family (exact scan, or a bracket when heuristic)."""
    return atom_set.scan(f)


def weak_decompose(f, atom_set: AtomSet, eps: float) -> Decomposition:
    """Greedy energy-decrement split f = f_str + f_psd with zero error term.

    Each accepted atom removes at least eps^2 of energy from the residual, so
    at most floor(1/eps^2) iterations occur; f_str ends up built from that many
    atoms with coefficients bounded by 1/eps, and f_psd is eps-pseudorandom
    (certified by the final scan, definitive for exact atom sets).
    """
    f = np.asarray(f, dtype=float)
    _check_eps(eps)
    _check_unit_norm(f)
    budget = _iteration_budget(eps)
    f_psd = f.copy()
    f_str = np.zeros_like(f)
    atoms = []
    trace = []
    while True:
        step = energy_decrement_step(f_psd, atom_set, eps)
        if step is None:
            break
        if len(atoms) >= budget:
            raise CertificateError("energy argument violated: budget exceeded")
        key, c = step
        v = atom_set.atom_vector(key)
        f_psd = f_psd - c * v
        f_str = f_str + c * v
        atoms.append((key, c))
        trace.append(
            {"atom": atom_set.key_json(key), "coefficient": c, "energy": inner_product(f_psd, f_psd)}
        )
    final = atom_set.scan(f_psd)
    return Decomposition(
        atoms=atoms,
        f_str=f_str,
        f_psd=f_psd,
        f_err=np.zeros_like(f),
        complexity_m=budget,
        coeff_bound_k=1.0 / eps,
        pseudorandomness_eps=eps,
        pseudo_exact=final.exact,
        pseudo_found=final.lower,
        error_norm=0.0,
        iterations=len(atoms),
        trace=trace,
    )


# Atoms whose component orthogonal to the current span is shorter than this
# are rejected (cannot happen for exact searches; the selected atom always
# makes a definite angle with the span).
SPAN_REJECT_TOL = 1e-8


def orthogonal_weak_decompose(
    f, atom_set: AtomSet, eps: float, max_iterations=None
) -> Decomposition:
    """Energy-decrement split with f_str an orthogonal projection of f.

    Selected atoms are orthonormalized incrementally; f_str is the projection
    of f onto their span, so <f_str, f_psd> = 0 and Pythagoras holds exactly
    (to arithmetic tolerance).  Coefficients over the raw atoms are recovered
    from the Gram system and recorded with their empirical bound.
    """
    f = np.asarray(f, dtype=float)
    _check_eps(eps)
    _check_unit_norm(f)
    budget = _iteration_budget(eps)
    if max_iterations is not None:
        budget = min(budget, max_iterations)
    ortho = []  # orthonormal basis of the current span
    raw = []  # selected atoms, original values
    keys = []
    f_str = np.zeros_like(f)
    f_psd = f.copy()
    trace = []
    exhausted = False
    while True:
        cands = atom_set.candidates(f_psd, eps)
        picked = None
        for key, ip in cands:
            v = atom_set.atom_vector(key).astype(float)
            u = v.copy()
            for q in ortho:  # two Gram-Schmidt passes keep the basis tight
                u = u - inner_product(u, q) * q
            for q in ortho:
                u = u - inner_product(u, q) * q
            nu = norm(u)
            if nu < SPAN_REJECT_TOL:
                if atom_set.exact:
                    raise CertificateError(
                        "exact search proposed an atom inside the current span"
                    )
                continue
            picked = (key, v, u / nu)
            break
        if picked is None:
            break
        if len(keys) >= budget:
            if max_iterations is not None:
                exhausted = True
                break
            raise CertificateError("energy argument violated: budget exceeded")
        key, v, q = picked
        keys.append(key)
        raw.append(v)
        ortho.append(q)
        f_str = sum((inner_product(f, q) * q for q in ortho), np.zeros_like(f))
        f_psd = f - f_str
        trace.append(
            {"atom": atom_set.key_json(key), "energy": inner_product(f_psd, f_psd)}
        )
    if exhausted:
        raise BudgetExceededError(
            "orthogonal decomposition hit its iteration cap",
            partial={"keys": keys, "iterations": len(keys)},
        )
    if raw:
        gram = np.array([[inner_product(a, b) for b in raw] for a in raw])
        rhs = np.array([inner_product(f, a) for a in raw])
        try:
            coeffs = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            coeffs = np.linalg.lstsq(gram, rhs, rcond=None)[0]
        atoms = list(zip(keys, (float(c) for c in coeffs)))
    else:
        atoms = []
    final = atom_set.scan(f_psd)
    return Decomposition(
        atoms=atoms,
        f_str=f_str,
        f_psd=f_psd,
        f_err=np.zeros_like(f),
        complexity_m=budget,
        coeff_bound_k=max((abs(c) for _, c in atoms), default=0.0),
        pseudorandomness_eps=eps,
        pseudo_exact=final.exact,
        pseudo_found=final.lower,
        error_norm=0.0,
        iterations=len(keys),
        trace=trace,
    )


def _ceil_guard(x):
    if math.isinf(x):
        return math.inf
    return int(math.ceil(x - 1e-9))


def strong_decompose(
    f,
    atom_set: AtomSet,
    eps: float,
    growth: GrowthFunction,
    *,
    complexity_cap: int = 10**6,
    stage_time_s: float = 300.0,
) -> Decomposition:
    """Three-part split with pseudorandomness quality set by a growth function.

    Runs orthogonal stages at thresholds 1/M_i along M_0 = 1, M_i = F(M_{i-1})
    until some stage removes at most eps^2 of energy; that stage's structured
    part becomes f_err (norm <= eps), everything before it f_str, and the
    final residual f_psd, which is 1/F(M)-pseudorandom for the reported
    M = M_{i-1}.  The pigeonhole guarantees the stopping stage appears within
    floor(1/eps^2) + 1 stages.

    The complexity cap applies to structure actually built: a stage whose
    threshold sits beyond the cap is still allowed to *terminate* immediately
    (its scan finds nothing), but selecting an atom there raises
    BudgetExceededError, as does exceeding the per-stage wall clock.
    """
    f = np.asarray(f, dtype=float)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    _check_unit_norm(f)
    max_stage = _iteration_budget(eps) + 1
    m_prev = 1
    residual = f.copy()
    cumulative = np.zeros_like(f)
    atoms_so_far = []
    stages = []
    started = time.monotonic()
    prev_energy = inner_product(residual, residual)
    for stage_index in range(1, max_stage + 1):
        m_next = _ceil_guard(growth(m_prev))
        stage_eps = 1.0 / m_next if not math.isinf(m_next) else MIN_CORR
        iter_cap = None
        if math.isinf(m_next) or m_next > complexity_cap:
            iter_cap = 0  # may terminate, must not build structure
        try:
            dec = orthogonal_weak_decompose(
                residual, atom_set, min(stage_eps, 1.0), max_iterations=iter_cap
            )
        except BudgetExceededError as exc:
            raise BudgetExceededError(
                f"stage {stage_index} needs structure beyond the complexity cap "
                f"(threshold M = {m_next} > {complexity_cap})",
                partial={"stages": stages, "atoms": atoms_so_far},
            ) from exc
        energy = inner_product(dec.f_psd, dec.f_psd)
        drop = prev_energy - energy
        stages.append(
            {
                "stage": stage_index,
                "M": None if math.isinf(m_next) else int(m_next),
                "threshold": stage_eps,
                "atoms": len(dec.atoms),
                "energy_drop": drop,
            }
        )
        if len(atoms_so_far) + len(dec.atoms) > complexity_cap:
            raise BudgetExceededError(
                "total structured complexity exceeded the cap",
                partial={"stages": stages, "atoms": atoms_so_far},
            )
        if drop <= eps * eps + 1e-12:
            final = atom_set.scan(dec.f_psd)
            return Decomposition(
                atoms=list(atoms_so_far),
                f_str=cumulative,
                f_psd=dec.f_psd,
                f_err=dec.f_str,
                complexity_m=max(len(atoms_so_far), 1),
                coeff_bound_k=max((abs(c) for _, c in atoms_so_far), default=0.0),
                pseudorandomness_eps=stage_eps,
                pseudo_exact=final.exact,
                pseudo_found=final.lower,
                error_norm=eps,
                iterations=sum(s["atoms"] for s in stages),
                trace=dec.trace,
                stages=stages,
                growth_m=m_prev,
            )
        cumulative = cumulative + dec.f_str
        atoms_so_far.extend(dec.atoms)
        residual = dec.f_psd
        prev_energy = energy
        m_prev = m_next
        if time.monotonic() - started > stage_time_s:
            raise BudgetExceededError(
                f"stage wall clock exceeded {stage_time_s}s",
                partial={"stages": stages, "atoms": atoms_so_far},
            )
    raise CertificateError("pigeonhole failed: no stage had a small energy drop")
