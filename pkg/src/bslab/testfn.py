"""Tensor-product B-spline test functions with closed-form Fourier transforms.

Convention throughout the package: ``fhat(xi) = int f(x) exp(-2 pi i <xi, x>) dx``, so
Poisson summation over a lattice ``L`` reads
``sum_{g in L} f(g) = covol(L)^-1 sum_{xi in L*} fhat(xi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from bslab.exact import to_fraction


def bspline(k: int, x) -> np.ndarray:
    """Centered cardinal B-spline of order k (k-fold self-convolution of 1_[-1/2, 1/2)).

    Evaluated with the positive-weight Cox-de Boor recursion, so there is no
    cancellation.
    """
    x = np.asarray(x, dtype=float)
    # vals[i] = beta_j(x + s_i), s_i = -(k - j)/2 + i.  The knot interval is located once
    # so rounding in x + s_i can never switch on two neighbouring indicators.
    knot = np.floor(x + k / 2)
    vals = [(knot == k - 1 - i).astype(float) for i in range(k)]
    for j in range(2, k + 1):
        new = []
        for i in range(k - j + 1):
            y = x + (-(k - j) / 2 + i)
            new.append(((y + j / 2) * vals[i + 1] + (j / 2 - y) * vals[i]) / (j - 1))
        vals = new
    return vals[0]


def bspline_exact(k: int, x) -> Fraction:
    """Exact beta_k(x) at a rational point via the truncated-power formula."""
    x = to_fraction(x)
    half = Fraction(k, 2)
    total = Fraction(0)
    for j in range(k + 1):
        t = x + half - j
        if t > 0:
            total += (-1) ** j * math.comb(k, j) * t ** (k - 1)
    return total / math.factorial(k - 1)


def _sinc_pow(t: np.ndarray, k: int) -> np.ndarray:
    return np.sinc(t) ** k


@dataclass(frozen=True)
class TestFunction:
    """f(x) = prod_i beta_k(x_i / a_i) on R^d."""

    __test__ = False  # keep pytest from collecting this class

    order: int
    scales: tuple[Fraction, ...]

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("B-spline order must be >= 2")
        scales = tuple(to_fraction(a) for a in self.scales)
        if not scales or any(a <= 0 for a in scales):
            raise ValueError("scales must be a non-empty vector of positive numbers")
        object.__setattr__(self, "scales", scales)

    @classmethod
    def bspline(cls, k: int, scales: Sequence) -> TestFunction:
        return cls(int(k), tuple(scales))

    @classmethod
    def from_config(cls, cfg: dict) -> TestFunction:
        if cfg.get("kind") != "bspline":
            raise ValueError(f"unknown test function kind {cfg.get('kind')!r}")
        return cls(int(cfg["k"]), tuple(cfg["a"]))

    def to_config(self) -> dict:
        return {"kind": "bspline", "k": self.order, "a": [_num(a) for a in self.scales]}

    @property
    def dimension(self) -> int:
        return len(self.scales)

    @property
    def float_scales(self) -> np.ndarray:
        return np.array([float(a) for a in self.scales])

    @property
    def support_halfwidths(self) -> tuple[Fraction, ...]:
        """f vanishes outside the open box with these half-widths."""
        return tuple(self.order * a / 2 for a in self.scales)

    @property
    def support_radius(self) -> float:
        """Radius of the ball circumscribing the support box."""
        return math.sqrt(sum(float(h) ** 2 for h in self.support_halfwidths))

    def value_at_zero(self) -> Fraction:
        return bspline_exact(self.order, 0) ** self.dimension

    def eval(self, x, exact: bool = False):
        """f at one point (exact=True gives a Fraction) or at the rows of an (N, d) array."""
        if exact:
            if len(x) != self.dimension:
                raise ValueError("dimension mismatch")
            out = Fraction(1)
            for xi, a in zip(x, self.scales):
                out *= bspline_exact(self.order, to_fraction(xi) / a)
                if not out:
                    break
            return out
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        vals = np.prod(bspline(self.order, x / self.float_scales), axis=1)
        return float(vals[0]) if single else vals

    def eval_ft(self, xi):
        """fhat(xi) = prod_i a_i sinc(a_i xi_i)^k, with sinc(t) = sin(pi t)/(pi t)."""
        xi = np.asarray(xi, dtype=float)
        single = xi.ndim == 1
        xi = np.atleast_2d(xi)
        a = self.float_scales
        vals = np.prod(a * _sinc_pow(a * xi, self.order), axis=1)
        return float(vals[0]) if single else vals

    # -- tail certificate for sums of |fhat| over shifted lattices -----------------
    #
    # |fhat(xi)| <= prod a_i phi(a_i xi_i) with phi(t) = min(1, (pi|t|)^-k).  Cells
    # xi + D[-1/2, 1/2)^d tile R^d; inside a cell |y_i - xi_i| <= w_i, so each term is
    # dominated by the cell average of h_i(y_i) = phi(a_i (|y_i| - w_i)_+).  The bound
    # integrates prod h_i over the complement of the box [-(M_i - w_i), M_i - w_i].

    def _envelope_total(self, i: int, w: float) -> float:
        """int h_i over R."""
        a, k = float(self.scales[i]), self.order
        return 2.0 * (w + 1.0 / (math.pi * a)) + 2.0 / (math.pi * a * (k - 1))

    def _envelope_tail(self, i: int, w: float, x: float) -> float:
        """int h_i over |y| > x."""
        a, k = float(self.scales[i]), self.order
        c = w + 1.0 / (math.pi * a)
        if x <= c:
            return self._envelope_total(i, w) - 2.0 * max(x, 0.0)
        return 2.0 * (math.pi * a) ** (-k) * (x - w) ** (1 - k) / (k - 1)

    def dual_tail_bound(self, box: Sequence[float], cell_halfwidths: Sequence[float], cell_volume: float) -> float:
        """Upper bound on sum |fhat(xi)| over points of a (shifted) lattice outside the box.

        ``cell_halfwidths[i] = 1/2 sum_j |D_ij|`` for a basis D of the lattice and
        ``cell_volume = |det D|``.  Decays like M^(1-k) along each axis.
        """
        full = [self._envelope_total(i, w) for i, w in enumerate(cell_halfwidths)]
        tail = [self._envelope_tail(i, w, m - w) for i, (m, w) in enumerate(zip(box, cell_halfwidths))]
        inner = [f - t for f, t in zip(full, tail)]
        # prod(full) - prod(inner), telescoped into nonnegative terms
        total = sum(tail[i] * math.prod(inner[:i]) * math.prod(full[i + 1 :]) for i in range(len(full)))
        return math.prod(float(a) for a in self.scales) * total / cell_volume

    def dual_box_for_tolerance(self, cell_halfwidths: Sequence[float], cell_volume: float, tol: float) -> list[float]:
        """Per-axis half-widths M_i whose dual_tail_bound is at most tol."""
        d, k = self.dimension, self.order
        full = [self._envelope_total(i, w) for i, w in enumerate(cell_halfwidths)]
        pa = math.prod(float(a) for a in self.scales)
        box = []
        for i, w in enumerate(cell_halfwidths):
            a = float(self.scales[i])
            others = math.prod(full[:i] + full[i + 1 :])
            t = tol * cell_volume / (d * pa * others)
            gap = (2.0 * (math.pi * a) ** (-k) / ((k - 1) * t)) ** (1.0 / (k - 1))
            box.append(2.0 * w + max(gap, 1.0 / (math.pi * a)))
        return box


def _num(a: Fraction):
    if a.denominator == 1:
        return int(a)
    if Fraction(repr(float(a))) == a:
        return float(a)
    return str(a)
