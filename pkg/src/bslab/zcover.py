"""Z-covers in the abelian model: twisted traces, the relative L2-trace and its direct integral.

For a lattice Gamma = B Z^d and a primitive functional chi on Z^d, Gamma_n = chi^-1(nZ)
and Gamma_inf = ker chi.  The character gamma -> lambda^chi(gamma), lambda = e^(2 pi i theta),
is <theta v, gamma> for the dual vector v = (B^-1)^T c, so twisted Poisson summation
moves the twist onto the dual coset theta v + Gamma*.  Since f has compact support the
twisted trace is a Laurent polynomial in lambda and roots-of-unity quadrature is exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from bslab import exact
from bslab.euclid import DEFAULT_BUDGET, LatticeBasis, _support_points, covolume, dual_basis, dual_coset_sum
from bslab.testfn import TestFunction


@dataclass(frozen=True)
class ZCoverScheme:
    basis: LatticeBasis
    chi: tuple[int, ...]

    def __post_init__(self):
        chi = tuple(int(c) for c in self.chi)
        object.__setattr__(self, "chi", chi)
        if len(chi) != self.basis.dimension:
            raise ValueError("chi must have one coefficient per basis vector")
        g = 0
        for c in chi:
            g = math.gcd(g, c)
        if g != 1:
            raise ValueError(f"chi {chi} is not surjective onto Z (gcd {g})")

    @classmethod
    def from_config(cls, cfg: dict) -> ZCoverScheme:
        return cls(LatticeBasis(cfg["basis"]), tuple(cfg["chi"]))

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    @cached_property
    def covolume(self) -> Fraction:
        return covolume(self.basis)

    @cached_property
    def dual_shift(self) -> tuple[Fraction, ...]:
        """v with <v, B m> = chi(m) for all m in Z^d."""
        return exact.matvec(dual_basis(self.basis).matrix, self.chi)

    @cached_property
    def completion(self) -> list[list[int]]:
        """Unimodular U with chi U = e_1; columns 2..d of B U span Gamma_inf."""
        return exact.primitive_completion(self.chi)

    def member(self, n: int) -> LatticeBasis:
        """Basis B U diag(n, 1, ..., 1) of Gamma_n."""
        if n < 1:
            raise ValueError("n must be positive")
        d = self.dimension
        scale = [[(n if i == j == 0 else int(i == j)) for j in range(d)] for i in range(d)]
        u = exact.as_matrix(self.completion)
        return LatticeBasis(exact.matmul(exact.matmul(self.basis.matrix, u), exact.as_matrix(scale)))

    def kernel_basis(self) -> list[tuple[Fraction, ...]]:
        """Generators of Gamma_inf (rank d - 1; a lattice only in its own span)."""
        bu = exact.matmul(self.basis.matrix, exact.as_matrix(self.completion))
        return [tuple(row[j] for row in bu) for j in range(1, self.dimension)]

    def chi_of(self, m) -> int:
        return int(sum(c * int(x) for c, x in zip(self.chi, m)))


# -- twisted trace as a Laurent polynomial ----------------------------------------------

@dataclass(frozen=True)
class LaurentTrace:
    """covol * sum_gamma f(gamma) lambda^chi(gamma) = covol * sum_p coeffs[p] lambda^p."""

    covol: Fraction
    coeffs: dict[int, Fraction]

    @property
    def degree(self) -> int:
        return max((abs(p) for p, c in self.coeffs.items() if c), default=0)

    def __call__(self, theta) -> complex:
        total = 0j
        for p in sorted(self.coeffs):
            total += float(self.coeffs[p]) * cmath.exp(2j * math.pi * float(theta) * p)
        return float(self.covol) * total

    def mean_exact(self, m: int) -> Fraction:
        """(1/m) sum_j (trace at e^(2 pi i j/m)) / covol, evaluated exactly: sum of coeffs[p], p = 0 mod m."""
        return sum((c for p, c in self.coeffs.items() if p % m == 0), Fraction(0))

    def mean_float(self, m: int) -> float:
        vals = [self(Fraction(j, m)) for j in range(m)]
        return (math.fsum(v.real for v in vals) / m) / float(self.covol)


def laurent_trace(scheme: ZCoverScheme, f: TestFunction, budget: int = DEFAULT_BUDGET) -> LaurentTrace:
    coeffs: dict[int, Fraction] = {}
    for m in _support_points(scheme.basis, f, budget):
        val = f.eval(scheme.basis.vector([int(x) for x in m]), exact=True)
        if val:
            p = scheme.chi_of(m)
            coeffs[p] = coeffs.get(p, Fraction(0)) + val
    return LaurentTrace(scheme.covolume, coeffs)


def twisted_geometric(scheme: ZCoverScheme, theta, f: TestFunction) -> complex:
    """covol * sum_{gamma in Gamma} e^(2 pi i theta chi(gamma)) f(gamma)."""
    return laurent_trace(scheme, f)(theta)


def twisted_spectral(scheme: ZCoverScheme, theta, f: TestFunction, tail_tol: float,
                     budget: int = DEFAULT_BUDGET):
    """sum of fhat over the twisted dual coset theta v + Gamma*, with certified tail bound."""
    theta = exact.to_fraction(theta) % 1  # the coset only depends on theta mod 1
    shift = [float(theta * x) for x in scheme.dual_shift]
    return dual_coset_sum(dual_basis(scheme.basis), f, tail_tol, shift=shift, budget=budget)


def l2_trace(scheme: ZCoverScheme, f: TestFunction, exact_arith: bool = True):
    """sum_{gamma in ker chi} f(gamma)."""
    val = laurent_trace(scheme, f).coeffs.get(0, Fraction(0))
    return val if exact_arith else float(val)


# -- checks ------------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    rows: list[dict] = field(default_factory=list)
    ok: bool = True
    info: dict = field(default_factory=dict)


def relative_l2_trace(scheme: ZCoverScheme, f: TestFunction, n: int, exact_arith: bool = True):
    """(1/vol(Gamma_n)) sum over Gamma_inf of vol(Gamma_n-centralizer quotient) * f(gamma).

    In R^d every centralizer is all of G, so each weight is covol(Gamma_n); the kernel
    elements are enumerated as the Gamma_n points whose first coordinate over B U diag(n, 1..)
    vanishes.
    """
    member = scheme.member(n)
    vol_n = covolume(member)
    if vol_n != n * scheme.covolume:
        raise AssertionError("Gamma_n covolume is not n * covol(Gamma)")
    total = Fraction(0)
    for m in _support_points(member, f, DEFAULT_BUDGET):
        if int(m[0]) == 0:
            total += vol_n * f.eval(member.vector([int(x) for x in m]), exact=True)
    val = total / vol_n
    return val if exact_arith else float(total) / float(vol_n)


def check_lemma42_independence(scheme: ZCoverScheme, f: TestFunction, ns: Sequence[int], tol: float = 1e-12) -> CheckReport:
    if not ns:
        raise ValueError("n list must be nonempty")
    ref = l2_trace(scheme, f)
    rep = CheckReport("lemma42", info={"l2_trace": ref})
    for n in ns:
        ex = relative_l2_trace(scheme, f, n, exact_arith=True)
        fl = relative_l2_trace(scheme, f, n, exact_arith=False)
        good = ex == ref and abs(fl - float(ref)) <= tol
        rep.rows.append({"n": n, "index": covolume(scheme.member(n)) / scheme.covolume, "exact": ex, "float": fl,
                         "ok": good})
        rep.ok &= good
    return rep


def check_prop43(scheme: ZCoverScheme, f: TestFunction, ns: Sequence[int]) -> CheckReport:
    """Delta_n = sum_{Gamma_n} f - sum_{Gamma_inf} f, exactly, with its vanishing threshold."""
    lt = laurent_trace(scheme, f)
    max_chi = lt.degree
    threshold = max_chi + 1
    rep = CheckReport("prop43", info={"max_chi": max_chi, "threshold": threshold})
    for n in ns:
        delta = sum((c for p, c in lt.coeffs.items() if p % n == 0 and p != 0), Fraction(0))
        good = delta == 0 if n >= threshold else True
        rep.rows.append({"n": n, "delta": delta, "ok": good})
        rep.ok &= good
    return rep


def check_direct_integral(scheme: ZCoverScheme, f: TestFunction, m: int, tol: float = 1e-12) -> CheckReport:
    """Average of the twisted trace / covol over the m-th roots of unity against l2_trace."""
    lt = laurent_trace(scheme, f)
    if m <= 2 * lt.degree:
        raise ValueError(f"quadrature size m={m} must exceed twice the Laurent degree {lt.degree}")
    ref = lt.coeffs.get(0, Fraction(0))
    ex = lt.mean_exact(m)
    fl = lt.mean_float(m)
    good = ex == ref and abs(fl - float(ref)) <= tol
    return CheckReport("direct_integral", [{"m": m, "exact": ex, "float": fl, "ok": good}], good,
                       {"degree": lt.degree, "l2_trace": ref})


def spectral_measure_integral(scheme: ZCoverScheme, f: TestFunction, m: int, tail_tol: float,
                              budget: int = DEFAULT_BUDGET) -> tuple[float, float]:
    """int_0^1 (sum over theta v + Gamma* of fhat) d theta / covol, by m-point quadrature.

    Returns (value, accumulated tail bound).
    """
    lt = laurent_trace(scheme, f, budget)
    if m <= 2 * lt.degree:
        raise ValueError(f"quadrature size m={m} must exceed twice the Laurent degree {lt.degree}")
    vals, tails = [], []
    for j in range(m):
        s = twisted_spectral(scheme, Fraction(j, m), f, tail_tol, budget)
        vals.append(s.value)
        tails.append(s.tail_bound)
    c = float(scheme.covolume)
    return math.fsum(vals) / m / c, max(tails) / c


def degenerate_family(n: int) -> ZCoverScheme:
    """diag(n^2, 1/n) with chi the first coordinate: the kernel direction gets denser with n."""
    return ZCoverScheme(LatticeBasis.diagonal(n * n, Fraction(1, n)), (1, 0))
