"""G = R^d: lattices, Poisson summation as the trace formula, BS/Plancherel criteria.

For abelian G every conjugate x^-1 L x is L itself, so BS-convergence of a family is
"shortest nonzero vector -> infinity" and the Plancherel defect of f is the exact
finite sum of f over the nonzero lattice points in its support.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from bslab import exact
from bslab.errors import BudgetExceeded
from bslab.reports import ConvergenceReport
from bslab.testfn import TestFunction

DEFAULT_BUDGET = 10**7
_BATCH = 1 << 16


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank rational basis; the columns of ``matrix`` generate L = B Z^d."""

    matrix: exact.Matrix

    def __post_init__(self):
        m = exact.as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if exact.det(m) == 0:
            raise ValueError("basis matrix is singular")

    @classmethod
    def diagonal(cls, *entries) -> LatticeBasis:
        d = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def identity(cls, d: int) -> LatticeBasis:
        return cls(exact.identity(d))

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    @cached_property
    def determinant(self) -> Fraction:
        return exact.det(self.matrix)

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])

    @cached_property
    def _integer_form(self) -> tuple[np.ndarray, int]:
        ints, den = exact.integerize(self.matrix)
        return np.array(ints, dtype=object), den

    def scaled(self, s) -> LatticeBasis:
        s = exact.to_fraction(s)
        return LatticeBasis(tuple(tuple(s * x for x in row) for row in self.matrix))

    def vector(self, coeffs: Sequence[int]) -> tuple[Fraction, ...]:
        return exact.matvec(self.matrix, [int(c) for c in coeffs])


def covolume(basis: LatticeBasis) -> Fraction:
    """|det B| = volume of the parallelepiped fundamental domain."""
    return abs(basis.determinant)


def dual_basis(basis: LatticeBasis) -> LatticeBasis:
    """(B^-1)^T, whose columns generate L* = {xi : <xi, g> in Z for all g in L}."""
    return LatticeBasis(exact.transpose(exact.inverse(basis.matrix)))


# -- enumeration ------------------------------------------------------------------

def _fincke_pohst(bmat: np.ndarray, radius: float, center=None, budget: int = DEFAULT_BUDGET) -> Iterator[np.ndarray]:
    """Yield batches of integer coefficient vectors m with |B (m - center)| <= radius.

    Per-coordinate bounds come from the Gram-Schmidt (Cholesky) factor of the Gram
    matrix, which makes the search complete.  The first coordinate is swept
    vectorially; ``budget`` caps the total number of points.
    """
    d = bmat.shape[1]
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    r = np.linalg.cholesky(bmat.T @ bmat).T  # upper triangular, Q = r^T r
    diag = np.diag(r)
    coords = np.zeros(d, dtype=np.int64)
    out: list[np.ndarray] = []
    total = 0

    def bounds(i: int, rem: float) -> tuple[float, int, int]:
        shift = center[i] - float(r[i, i + 1:] @ (coords[i + 1:] - center[i + 1:])) / diag[i]
        span = math.sqrt(max(rem, 0.0)) / diag[i]
        return shift, math.ceil(shift - span), math.floor(shift + span)

    def level(i: int, rem: float) -> None:
        nonlocal total
        shift, lo, hi = bounds(i, rem)
        if lo > hi:
            return
        if i == 0:
            block = np.empty((hi - lo + 1, d), dtype=np.int64)
            block[:, 0] = np.arange(lo, hi + 1)
            block[:, 1:] = coords[1:]
            total += len(block)
            if total > budget:
                raise BudgetExceeded(f"lattice enumeration exceeds budget of {budget} points")
            out.append(block)
            return
        for m in range(lo, hi + 1):
            coords[i] = m
            t = diag[i] * (m - shift)
            level(i - 1, rem - t * t)
        coords[i] = 0

    r2 = radius * radius
    if d == 1:
        level(0, r2)
    else:
        top = d - 1
        shift, lo, hi = bounds(top, r2)
        for m in range(lo, hi + 1):
            coords[top] = m
            t = diag[top] * (m - shift)
            level(top - 1, r2 - t * t)
            if sum(len(b) for b in out) >= _BATCH:
                yield np.concatenate(out)
                out.clear()
    if out:
        yield np.concatenate(out)


def _coefficients_in_ball(basis: LatticeBasis, radius_sq: Fraction, budget: int) -> np.ndarray:
    """All m with |B m|^2 <= radius_sq, decided exactly; sorted lexicographically."""
    radius_sq = exact.to_fraction(radius_sq)
    if radius_sq < 0:
        raise ValueError("radius must be nonnegative")
    slack = math.sqrt(float(radius_sq)) * (1 + 1e-9) + 1e-12
    batches = list(_fincke_pohst(basis.float_matrix, slack, budget=budget))
    d = basis.dimension
    if not batches:
        return np.zeros((0, d), dtype=np.int64)
    m = np.concatenate(batches)
    ints, den = basis._integer_form
    v = m.astype(object) @ ints.T
    norm_sq = (v * v).sum(axis=1)
    keep = norm_sq * radius_sq.denominator <= radius_sq.numerator * den * den
    m = m[np.asarray(keep, dtype=bool)]
    order = np.lexsort(m.T[::-1])
    return m[order]


def enumerate_points(basis: LatticeBasis, radius, budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """Lattice points of norm <= radius as (integer coefficients, float vectors).

    Membership on the sphere is decided in exact arithmetic; rows come in
    lexicographic order of the coefficients.
    """
    r = exact.to_fraction(radius)
    m = _coefficients_in_ball(basis, r * r, budget)
    return m, m @ basis.float_matrix.T if len(m) else np.zeros((0, basis.dimension))


def _norm_sq(basis: LatticeBasis, m) -> Fraction:
    v = basis.vector([int(x) for x in m])
    return sum((x * x for x in v), Fraction(0))


def shortest_vector(basis: LatticeBasis, budget: int = DEFAULT_BUDGET) -> tuple[tuple[Fraction, ...], float]:
    """A nonzero vector of minimal norm; ties go to the lexicographically smallest coefficients."""
    m, nsq = _shortest(basis, budget)
    return basis.vector(m), math.sqrt(nsq)


def _shortest(basis: LatticeBasis, budget: int) -> tuple[tuple[int, ...], Fraction]:
    d = basis.dimension
    bound = min(_norm_sq(basis, [int(i == j) for j in range(d)]) for i in range(d))
    coeffs = _coefficients_in_ball(basis, bound, budget)
    best, best_m = None, None
    for row in coeffs:
        if not row.any():
            continue
        nsq = _norm_sq(basis, row)
        if best is None or nsq < best:
            best, best_m = nsq, tuple(int(x) for x in row)
    return best_m, best


def systole(basis: LatticeBasis) -> float:
    return shortest_vector(basis)[1]


def count_in_ball(basis: LatticeBasis, radius, budget: int = DEFAULT_BUDGET) -> int:
    """#(L \\ 0) within the closed ball of the given radius."""
    return len(enumerate_points(basis, radius, budget)[0]) - 1


# -- trace formula: geometric and spectral sides ------------------------------------

def _support_points(basis: LatticeBasis, f: TestFunction, budget: int) -> np.ndarray:
    if f.dimension != basis.dimension:
        raise ValueError("test function and lattice dimensions differ")
    rsq = sum((h * h for h in f.support_halfwidths), Fraction(0))
    return _coefficients_in_ball(basis, rsq, budget)


def geometric_sum(basis: LatticeBasis, f: TestFunction, exclude_zero: bool = False, exact_arith: bool = False,
                  budget: int = DEFAULT_BUDGET):
    """sum_{g in L (minus 0)} f(g); a Fraction when exact_arith, else a float."""
    m = _support_points(basis, f, budget)
    if exclude_zero:
        m = m[m.any(axis=1)]
    if exact_arith:
        return sum((f.eval(basis.vector(row), exact=True) for row in m), Fraction(0))
    if not len(m):
        return 0.0
    return math.fsum(f.eval(m @ basis.float_matrix.T))


@dataclass(frozen=True)
class SpectralSum:
    value: float
    tail_bound: float
    terms: int


def dual_coset_sum(dual: LatticeBasis, f: TestFunction, tail_tol: float, shift=None,
                   budget: int = DEFAULT_BUDGET) -> SpectralSum:
    """sum of fhat over the shifted lattice shift + dual, truncated with a certified tail."""
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    dmat = dual.float_matrix
    d = dual.dimension
    cell_w = [float(w) for w in 0.5 * np.abs(dmat).sum(axis=1)]
    cell_vol = float(covolume(dual))
    # leave half the tolerance for floating-point summation error
    box = f.dual_box_for_tolerance(cell_w, cell_vol, 0.5 * tail_tol)
    bound = float(f.dual_tail_bound(box, cell_w, cell_vol))
    scaled = dmat / np.array(box)[:, None]
    expected = (math.pi ** (d / 2) / math.gamma(d / 2 + 1)) * d ** (d / 2) / abs(np.linalg.det(scaled))
    if expected > budget:
        raise BudgetExceeded(f"dual sum needs ~{expected:.3g} points to reach tail_tol={tail_tol:g} (budget {budget})")
    t = np.zeros(d) if shift is None else np.asarray(shift, dtype=float)
    center = -np.linalg.solve(dmat, t)
    parts, n = [], 0
    for batch in _fincke_pohst(scaled, math.sqrt(d) * (1 + 1e-9), center=center, budget=budget):
        xi = batch @ dmat.T + t
        parts.append(float(np.sum(f.eval_ft(xi))))
        n += len(batch)
    return SpectralSum(math.fsum(parts), bound, n)


def spectral_sum(basis: LatticeBasis, f: TestFunction, tail_tol: float, budget: int = DEFAULT_BUDGET) -> SpectralSum:
    """covol^-1 sum_{xi in L*} fhat(xi): the normalized spectral side of the trace formula."""
    s = dual_coset_sum(dual_basis(basis), f, tail_tol, budget=budget)
    c = float(covolume(basis))
    return SpectralSum(s.value / c, s.tail_bound / c, s.terms)


@dataclass(frozen=True)
class PlancherelDefect:
    """|normalized spectral trace - f(0)| computed on both sides of the trace formula."""

    geometric: Fraction
    spectral: float | None = None
    tail_bound: float | None = None

    @property
    def value(self) -> Fraction:
        return abs(self.geometric)

    @property
    def agreement(self) -> float | None:
        if self.spectral is None:
            return None
        return abs(self.spectral - float(self.geometric))


def plancherel_defect(basis: LatticeBasis, f: TestFunction, tail_tol: float | None = None,
                      budget: int = DEFAULT_BUDGET) -> PlancherelDefect:
    geo = geometric_sum(basis, f, exclude_zero=True, exact_arith=True, budget=budget)
    if tail_tol is None:
        return PlancherelDefect(geo)
    s = spectral_sum(basis, f, tail_tol, budget)
    return PlancherelDefect(geo, abs(s.value - float(f.value_at_zero())), s.tail_bound)


# -- families -----------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeFamily:
    """n -> L_n.  Kinds: counterexample diag(n^2, 1/n), dilation n L0, sublattice L0 diag(n^e_i)."""

    kind: str
    base: LatticeBasis | None = None
    exponents: tuple[int, ...] = ()

    def member(self, n: int) -> LatticeBasis:
        if self.kind == "counterexample":
            return LatticeBasis.diagonal(n * n, Fraction(1, n))
        if self.kind == "dilation":
            return self.base.scaled(n)
        if self.kind == "sublattice":
            scale = exact.as_matrix([[Fraction(n) ** e if i == j else 0 for j, e in enumerate(self.exponents)]
                                     for i in range(len(self.exponents))])
            return LatticeBasis(exact.matmul(self.base.matrix, scale))
        raise ValueError(f"unknown family kind {self.kind!r}")

    @classmethod
    def counterexample(cls) -> LatticeFamily:
        return cls("counterexample")

    @classmethod
    def dilation(cls, base: LatticeBasis) -> LatticeFamily:
        return cls("dilation", base)

    @classmethod
    def sublattice(cls, base: LatticeBasis, exponents: Sequence[int]) -> LatticeFamily:
        if len(exponents) != base.dimension:
            raise ValueError("one exponent per basis vector")
        return cls("sublattice", base, tuple(int(e) for e in exponents))

    @classmethod
    def from_config(cls, cfg: dict) -> LatticeFamily:
        kind = cfg["kind"]
        base = LatticeBasis(cfg["base"]) if "base" in cfg else None
        if kind == "counterexample":
            return cls.counterexample()
        if kind == "dilation":
            return cls.dilation(base)
        if kind == "sublattice":
            return cls.sublattice(base, cfg["exponents"])
        raise ValueError(f"unknown family kind {kind!r}")


EUCLID_COLUMNS = ["n", "covol", "systole", "R", "count_R", "f", "defect_f", "poisson_resid", "tail_bound", "error"]


@dataclass
class _Member:
    family: LatticeFamily
    fs: list[TestFunction]
    radii: list
    tail_tol: float | None
    budget: int = DEFAULT_BUDGET
    rows: list = field(default_factory=list)


def _scan_member(args) -> list[dict]:
    job, n = args
    try:
        basis = job.family.member(n)
        cov, sysv = covolume(basis), systole(basis)
        counts = [count_in_ball(basis, r, job.budget) for r in job.radii]
        defects = [plancherel_defect(basis, f, job.tail_tol, job.budget) for f in job.fs]
    except Exception as exc:  # recorded per row, then re-raised by the caller if asked
        return [{"n": n, "error": f"{type(exc).__name__}: {exc}", "_exc": exc}]
    rows = []
    for ri, r in enumerate(job.radii):
        for fi, dfc in enumerate(defects):
            rows.append({"n": n, "covol": cov, "systole": sysv, "R": exact.to_fraction(r), "count_R": counts[ri],
                         "f": fi, "defect_f": dfc.value, "poisson_resid": dfc.agreement,
                         "tail_bound": dfc.tail_bound, "error": None})
    return rows


def scan_family(family: LatticeFamily, fs: Sequence[TestFunction], radii: Sequence, ns: Sequence[int],
                tail_tol: float | None = None, workers: int = 1, budget: int = DEFAULT_BUDGET,
                strict: bool = True) -> ConvergenceReport:
    """Evaluate counts and Plancherel defects along the family (rows in index order)."""
    job = _Member(family, list(fs), list(radii), tail_tol, budget)
    args = [(job, int(n)) for n in ns]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_scan_member, args))
    else:
        chunks = [_scan_member(a) for a in args]
    report = ConvergenceReport("euclid", list(EUCLID_COLUMNS),
                               meta={"family": family.kind, "tail_tol": tail_tol, "budget": budget,
                                     "f": [f.to_config() for f in fs]})
    for (_, n), rows in zip(args, chunks):
        for row in rows:
            exc = row.pop("_exc", None)
            if exc is not None and strict:
                raise exc
            report.add(**row)
    return report
