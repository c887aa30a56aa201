"""Fundamental domains: the lattice parallelepiped and the Dirichlet octagon.

Each domain supports a membership test, a reduction map sending any point into the
domain by a group element, and the distance to the boundary, which is what the
Monte Carlo checks of disjointness, covering and null boundary need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bslab import hyperbolic as hyp
from bslab.euclid import LatticeBasis, enumerate_points


@dataclass(frozen=True)
class Parallelepiped:
    """B [0, 1)^d for the basis B of a lattice."""

    basis: LatticeBasis

    @property
    def _inv(self) -> np.ndarray:
        return np.linalg.inv(self.basis.float_matrix)

    def coefficients(self, x) -> np.ndarray:
        return np.atleast_2d(np.asarray(x, dtype=float)) @ self._inv.T

    def contains(self, x, strict: bool = False) -> np.ndarray:
        t = self.coefficients(x)
        if strict:
            return np.all((t > 1e-12) & (t < 1 - 1e-12), axis=1)
        return np.all((t >= -1e-12) & (t < 1 + 1e-12), axis=1)

    def reduce(self, x) -> tuple[np.ndarray, np.ndarray]:
        """(points in the domain, integer translations m with x = point + B m)."""
        t = self.coefficients(x)
        m = np.floor(t).astype(np.int64)
        return (t - m) @ self.basis.float_matrix.T, m

    def boundary_distance(self, x) -> np.ndarray:
        t = self.coefficients(x)
        row_norms = np.linalg.norm(self._inv, axis=1)
        return (np.minimum(t, 1 - t) / row_norms).min(axis=1)

    def band_slope(self) -> float:
        """d/d eps of vol{dist to boundary < eps} / vol at eps = 0: surface area / volume."""
        return float(2 * np.linalg.norm(self._inv, axis=1).sum())

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.random((size, self.basis.dimension)) @ self.basis.float_matrix.T

    def random_translations(self, rng: np.random.Generator, size: int, radius: float) -> np.ndarray:
        _, pts = enumerate_points(self.basis, radius)
        nonzero = pts[np.linalg.norm(pts, axis=1) > 0]
        return nonzero[rng.integers(0, len(nonzero), size)]


@dataclass(frozen=True)
class OctagonDomain:
    group: hyp.OctagonGroup

    def contains(self, z, strict: bool = False) -> np.ndarray:
        return self.group.in_octagon(z, strict)

    def reduce(self, z):
        return self.group.reduce_to_octagon(z)

    def boundary_distance(self, z) -> np.ndarray:
        return self.group.boundary_distance(z)

    def band_slope(self) -> float:
        """Perimeter / area of the octagon."""
        v = self.group.vertices()
        perimeter = sum(hyp.hyp_dist(v[k], v[(k + 1) % 8]) for k in range(8))
        return float(perimeter / hyp.octagon_area(self.group))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return hyp.sample_octagon(self.group, size, int(rng.integers(2**32)))


@dataclass(frozen=True)
class DomainCheck:
    disjoint_failures: int
    cover_failures: int
    band_widths: tuple[float, ...]
    band_fractions: tuple[float, ...]
    fitted_slope: float
    expected_slope: float
    intercept: float

    @property
    def slope_error(self) -> float:
        return abs(self.fitted_slope - self.expected_slope) / self.expected_slope


def _fit(widths, fractions) -> tuple[float, float]:
    """Slope of fraction ~ s eps + c eps^2 (corners enter at order eps^2), and the intercept of a free linear fit."""
    w, fr = np.asarray(widths), np.asarray(fractions)
    (slope, _), *_ = np.linalg.lstsq(np.stack([w, w * w], axis=1), fr, rcond=None)
    intercept = np.polyfit(w, fr, 1)[1]
    return float(slope), float(intercept)


def check_parallelepiped(basis: LatticeBasis, seed: int, trials: int = 1000, band_samples: int = 1_000_000,
                         widths=(0.002, 0.004, 0.006, 0.008, 0.01)) -> DomainCheck:
    dom = Parallelepiped(basis)
    rng = np.random.default_rng(seed)
    # disjointness: x in the open domain, x + g outside it for g != 0
    x = dom.sample(rng, trials)
    inside = dom.contains(x, strict=True)
    g = dom.random_translations(rng, trials, 3 * max(np.linalg.norm(basis.float_matrix, axis=0)))
    disjoint_fail = int((inside & dom.contains(x + g, strict=True)).sum())
    # covering: arbitrary points are translates of domain points
    y = (rng.random((trials, basis.dimension)) - 0.5) * 40
    p, m = dom.reduce(y)
    back = p + m @ basis.float_matrix.T
    cover_fail = int((~dom.contains(p) | (np.abs(back - y).max(axis=1) > 1e-9)).sum())
    z = dom.sample(rng, band_samples)
    dist = dom.boundary_distance(z)
    fr = tuple(float((dist < w).mean()) for w in widths)
    slope, icpt = _fit(widths, fr)
    return DomainCheck(disjoint_fail, cover_fail, tuple(widths), fr, slope, dom.band_slope(), icpt)


def check_octagon(group: hyp.OctagonGroup, seed: int, trials: int = 1000, band_samples: int = 1_000_000,
                  widths=(0.005, 0.01, 0.015, 0.02, 0.025, 0.03)) -> DomainCheck:
    dom = OctagonDomain(group)
    rng = np.random.default_rng(seed)
    ball = hyp.group_ball(group, 8.0)
    z = hyp.sample_octagon(group, trials, seed)
    idx = rng.integers(0, len(ball), trials)
    moved = hyp.mobius(ball.matrices[idx], z)
    disjoint_fail = int((dom.contains(z, strict=True) & dom.contains(moved, strict=True)).sum())
    # covering: random points of a disk of radius 6 around o reduce into the octagon
    rho = np.arccosh(1 + rng.random(trials) * (math.cosh(6.0) - 1))
    phi = rng.random(trials) * 2 * math.pi
    w = hyp.disk_to_half_plane(np.tanh(rho / 2) * np.exp(1j * phi))
    red, words = dom.reduce(w)
    cover_fail = 0
    for wi, ri, word in zip(w, red, words):
        # red = L_k ... L_1 w for the recorded letters, so w = L_1^-1 ... L_k^-1 red
        back = group.word_matrix(tuple(-x for x in word))(ri)
        if not dom.contains(ri) or hyp.hyp_dist(back, wi) > 1e-8:
            cover_fail += 1
    s = hyp.sample_octagon(group, band_samples, seed + 1)
    dist = dom.boundary_distance(s)
    fr = tuple(float((dist < wd).mean()) for wd in widths)
    slope, icpt = _fit(widths, fr)
    return DomainCheck(disjoint_fail, cover_fail, tuple(widths), fr, slope, dom.band_slope(), icpt)
