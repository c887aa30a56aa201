"""G = PSL2(R) with the genus-2 surface group of the regular octagon.

Points live in the upper half-plane H, the base point is o = i, and the octagon is the
Dirichlet domain of the group around o.  Everything here is double precision; ball
completeness is certified by saturation of a breadth-first search, not proved.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from bslab.errors import BudgetExceeded, InvariantViolation
from bslab.reports import ConvergenceReport

SIDE = math.acosh(1 + math.sqrt(2))  # half the distance between o and a neighbouring orbit point
SYSTOLE = 2 * SIDE
CIRCUMRADIUS = math.acosh(3 + 2 * math.sqrt(2))  # distance from o to an octagon vertex
BALL_BUDGET = 2 * 10**6
MATCH_TOL = 1e-9
INDETERMINATE_BAND = 1e-6
CHUNK = 1024


# -- points and matrices ---------------------------------------------------------------

def hyp_dist(z, w):
    """Hyperbolic distance in the upper half-plane; broadcasts over arrays."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(z.imag <= 0) or np.any(w.imag <= 0):
        raise ValueError("points must lie in the upper half-plane")
    out = np.arccosh(1 + np.abs(z - w) ** 2 / (2 * z.imag * w.imag))
    return float(out) if out.ndim == 0 else out


def _cosh_dist(z, w):
    return 1 + np.abs(z - w) ** 2 / (2 * z.imag * w.imag)


def mobius(m: np.ndarray, z):
    """Apply 2x2 real matrices (..., 2, 2) to points z, broadcasting."""
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    return (a * z + b) / (c * z + d)


def disk_to_half_plane(u):
    """Cayley map sending 0 to i."""
    u = np.asarray(u, dtype=complex)
    return 1j * (1 + u) / (1 - u)


def half_plane_to_disk(z):
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)


def _normalize(m: np.ndarray) -> np.ndarray:
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return m / np.sqrt(det)[..., None, None]


@dataclass(frozen=True)
class MoebiusMatrix:
    """Element of PSL2(R): a determinant-one real matrix identified with its negative."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float).reshape(2, 2)
        det = np.linalg.det(m)
        if det <= 0:
            raise ValueError("matrix must have positive determinant")
        m = m / math.sqrt(det)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def diag(cls, lam: float) -> MoebiusMatrix:
        return cls(np.array([[lam, 0.0], [0.0, 1.0 / lam]]))

    def __matmul__(self, other: MoebiusMatrix) -> MoebiusMatrix:
        return MoebiusMatrix(self.entries @ other.entries)

    def inv(self) -> MoebiusMatrix:
        (a, b), (c, d) = self.entries
        return MoebiusMatrix(np.array([[d, -b], [-c, a]]))

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def __call__(self, z):
        return mobius(self.entries, z)

    def equals(self, other: MoebiusMatrix, tol: float = MATCH_TOL) -> bool:
        return min(np.linalg.norm(self.entries - other.entries), np.linalg.norm(self.entries + other.entries)) <= tol

    def is_identity(self, tol: float = MATCH_TOL) -> bool:
        return self.equals(MoebiusMatrix(np.eye(2)), tol)

    def displacement(self, z=1j) -> float:
        return hyp_dist(z, self(z))


def translation_length(m: MoebiusMatrix) -> float:
    """Length of the closed geodesic of a hyperbolic element: 2 arccosh(|tr|/2)."""
    t = abs(m.trace)
    if t <= 2:
        kind = "elliptic" if t < 2 else "parabolic"
        raise ValueError(f"{kind} element (|tr| = {t:.12g}) has no translation axis")
    return 2 * math.acosh(t / 2)


# -- the octagon group ------------------------------------------------------------------

def _disk_translation(theta: float) -> np.ndarray:
    """Disk automorphism translating by 2*SIDE along the diameter at angle theta."""
    c, s = math.cosh(SIDE), math.sinh(SIDE)
    return np.array([[c, s * np.exp(1j * theta)], [s * np.exp(-1j * theta), c]])


_CAYLEY = np.array([[1j, 1j], [-1, 1]])


def _to_half_plane(m: np.ndarray) -> np.ndarray:
    r = _CAYLEY @ m @ np.linalg.inv(_CAYLEY)
    r = r / np.sqrt(np.linalg.det(r))
    if np.abs(r.imag).max() > 1e-12:
        raise InvariantViolation("conjugated side pairing is not real")
    return r.real


def _side_pairings() -> np.ndarray:
    """A_k = rho_k T rho_k^-1 for rotations rho_k by k pi/4, k = 0..3, in the half-plane."""
    rot = lambda t: np.array([[np.exp(1j * t / 2), 0], [0, np.exp(-1j * t / 2)]])
    t0 = _disk_translation(0.0)
    return np.array([_to_half_plane(rot(k * math.pi / 4) @ t0 @ rot(-k * math.pi / 4)) for k in range(4)])


def _inv2(m: np.ndarray) -> np.ndarray:
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


# Side-pairing letters: 1..4 = A_0..A_3, negatives are inverses.  The pairings satisfy
# A_0 A_1^-1 A_2 A_3^-1 A_0^-1 A_1 A_2^-1 A_3 = 1; the words below give a basis with the
# standard relation [g1, g2][g3, g4] = 1 (a Tietze change of generators).
OCTAGON_RELATOR = (1, -2, 3, -4, -1, 2, -3, 4)
COMMUTATOR_BASIS = ((3, 1, -3), (3, -2, 1, -3), (4, -3), (3, 1, -2))
# chi(g1) = 1, chi(g2) = chi(g3) = chi(g4) = 0, written on side-pairing exponent sums
CHI_ROW = (1, 1, 0, 0)


def _word_matrix(pairings: np.ndarray, word) -> np.ndarray:
    m = np.eye(2)
    for x in word:
        m = m @ (pairings[x - 1] if x > 0 else _inv2(pairings[-x - 1]))
    return m


def _residual(m: np.ndarray) -> float:
    return float(min(np.linalg.norm(m - np.eye(2)), np.linalg.norm(m + np.eye(2))))


@dataclass(frozen=True)
class OctagonGroup:
    """The genus-2 group generated by the side pairings of the regular pi/4 octagon."""

    pairings: np.ndarray = field(repr=False)
    generators: tuple[MoebiusMatrix, ...] = field(repr=False)
    relator_residual: float
    chi_row: tuple[int, ...] = CHI_ROW

    @property
    def base_point(self) -> complex:
        return 1j

    def letter(self, x: int) -> np.ndarray:
        return self.pairings[x - 1] if x > 0 else _inv2(self.pairings[-x - 1])

    def word_matrix(self, word) -> MoebiusMatrix:
        return MoebiusMatrix(_word_matrix(self.pairings, word))

    def abelianize(self, word) -> np.ndarray:
        v = np.zeros(4, dtype=np.int64)
        for x in word:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return v

    def chi(self, word) -> int:
        return int(np.dot(self.chi_row, self.abelianize(word)))

    @cached_property
    def neighbours(self) -> np.ndarray:
        """Orbit points A^{+-1} o of the eight tiles adjacent to the octagon."""
        mats = np.concatenate([self.pairings, np.array([_inv2(p) for p in self.pairings])])
        return mobius(mats, 1j)

    def in_octagon(self, z, strict: bool = False):
        """Dirichlet test: z is at least as close to o as to every neighbouring orbit point."""
        z = np.asarray(z, dtype=complex)
        d0 = _cosh_dist(z, 1j)
        dn = _cosh_dist(z[..., None], self.neighbours)
        gap = dn.min(axis=-1) - d0
        return gap > 1e-12 if strict else gap >= -1e-12

    def boundary_distance(self, z):
        """Hyperbolic distance from points of the octagon to its boundary."""
        z = np.asarray(z, dtype=complex)
        d0 = _cosh_dist(z, 1j)
        dn = _cosh_dist(z[..., None], self.neighbours)
        # sinh(dist to bisector of o, p) = |cosh d(z, p) - cosh d(z, o)| / (2 sinh(d(o, p)/2))
        return np.arcsinh(np.abs(dn - d0[..., None]).min(axis=-1) / (2 * math.sinh(SIDE)))

    def reduce_to_octagon(self, z, max_steps: int = 10_000):
        """Move points into the octagon by side pairings; returns (points, words)."""
        mats = np.concatenate([self.pairings, np.array([_inv2(p) for p in self.pairings])])
        letters = [1, 2, 3, 4, -1, -2, -3, -4]
        zs = np.atleast_1d(np.asarray(z, dtype=complex)).copy()
        words = [[] for _ in zs]
        for i in range(zs.size):
            w = zs[i]
            for _ in range(max_steps):
                d0 = _cosh_dist(w, 1j)
                dn = _cosh_dist(w, self.neighbours)
                j = int(np.argmin(dn))
                if dn[j] >= d0 - 1e-12:
                    break
                # the closer neighbour is A o; pull back by A^-1
                w = mobius(_inv2(mats[j]), w)
                words[i].append(-letters[j])
            else:
                raise InvariantViolation("Dirichlet reduction did not terminate")
            zs[i] = w
        return zs, [tuple(w) for w in words]

    def vertices(self) -> np.ndarray:
        """The eight vertices, as points of H, found from the bisectors of adjacent sides."""
        from scipy.optimize import brentq

        out = []
        for k in range(8):
            theta = (k + 0.5) * math.pi / 4
            # walk along the ray at angle theta until the Dirichlet test fails
            gap = lambda r: float(_dir_gap(self, r, theta))
            r = brentq(gap, 0.5, 5.0, xtol=1e-15)
            out.append(disk_to_half_plane(math.tanh(r / 2) * np.exp(1j * theta)))
        return np.array(out)


def _dir_gap(group: OctagonGroup, r: float, theta: float) -> float:
    z = disk_to_half_plane(math.tanh(r / 2) * np.exp(1j * theta))
    return (_cosh_dist(z, group.neighbours).min() - _cosh_dist(z, 1j)).real


def build_octagon_group(tol: float = 1e-9) -> OctagonGroup:
    pairings = _side_pairings()
    res_pairings = _residual(_word_matrix(pairings, OCTAGON_RELATOR))
    gens = [_word_matrix(pairings, w) for w in COMMUTATOR_BASIS]
    g = [MoebiusMatrix(m) for m in gens]
    comm = (g[0] @ g[1] @ g[0].inv() @ g[1].inv() @ g[2] @ g[3] @ g[2].inv() @ g[3].inv()).entries
    res = max(res_pairings, _residual(comm))
    if res > tol:
        raise InvariantViolation(f"octagon relator residual {res:.3g} exceeds {tol:g}")
    group = OctagonGroup(pairings, tuple(g), res)
    if [group.chi(w) for w in COMMUTATOR_BASIS] != [1, 0, 0, 0]:
        raise InvariantViolation("chi does not select the first generator")
    return group


def interior_angles(group: OctagonGroup) -> np.ndarray:
    """Angles at the vertices from the hyperbolic law of cosines in triangles (o, v_k, v_k+1)."""
    v = group.vertices()
    r = hyp_dist(1j, v)
    angles = []
    for k in range(8):
        a, b = r[k], r[(k + 1) % 8]
        c = hyp_dist(v[k], v[(k + 1) % 8])
        # angle at v_k opposite the side o-v_k+1 (length b)
        cos_at = (math.cosh(a) * math.cosh(c) - math.cosh(b)) / (math.sinh(a) * math.sinh(c))
        angles.append(2 * math.acos(min(1.0, cos_at)))
    return np.array(angles)


def octagon_area(group: OctagonGroup) -> float:
    """Area by integrating cosh(r(psi)) - 1 over the 16 congruent right triangles."""
    from scipy.integrate import quad

    v = group.vertices()
    rv = float(hyp_dist(1j, v[0]))
    # the apothem is SIDE; the ray at angle psi from it meets the side where tanh r cos psi = tanh SIDE
    psi_max = math.acos(math.tanh(SIDE) / math.tanh(rv))
    val, _ = quad(lambda p: math.cosh(math.atanh(math.tanh(SIDE) / math.cos(p))) - 1, 0, psi_max,
                  epsabs=1e-14, epsrel=1e-14)
    return 16 * val


# -- balls -------------------------------------------------------------------------------

def _hyperboloid(z: np.ndarray) -> np.ndarray:
    """Points of H on the hyperboloid model (Euclidean distance >= 2 sinh(d/2))."""
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return np.stack([(1 + r2) / (2 * y), (r2 - 1) / (2 * y), x / y], axis=-1)


@dataclass
class GroupBall:
    """Elements gamma with d(o, gamma o) <= cutoff, found by breadth-first search."""

    cutoff: float
    margin: float
    words: list
    matrices: np.ndarray
    displacement: np.ndarray
    chi: np.ndarray
    abelian: np.ndarray
    saturated: bool
    rounds: int

    def __len__(self) -> int:
        return len(self.words)

    def restrict(self, cutoff: float) -> GroupBall:
        if cutoff > self.cutoff:
            raise ValueError("cannot enlarge a ball by restriction")
        keep = self.displacement <= cutoff
        return GroupBall(cutoff, self.margin, [w for w, k in zip(self.words, keep) if k], self.matrices[keep],
                         self.displacement[keep], self.chi[keep], self.abelian[keep], self.saturated, self.rounds)


def group_ball(group: OctagonGroup, cutoff: float, margin: float = CIRCUMRADIUS,
               budget: int = BALL_BUDGET) -> GroupBall:
    """All nontrivial gamma with d(o, gamma o) <= cutoff.

    The search right-multiplies by side pairings and keeps elements with displacement
    up to cutoff + margin; with margin >= the circumradius every element in the cutoff
    ball is reachable (follow the geodesic o -> gamma o through adjacent tiles).  The
    orbit point gamma o determines gamma, so duplicates are detected on the hyperboloid.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    limit = math.cosh(cutoff + margin)
    letters = [1, -1, 2, -2, 3, -3, 4, -4]
    step = np.array([group.letter(x) for x in letters])
    step_ab = np.array([[int(abs(x) == j + 1) * (1 if x > 0 else -1) for j in range(4)] for x in letters])

    grid: dict[tuple, list[int]] = {}
    pts: list[np.ndarray] = []
    words: list[tuple] = [()]
    mats = [np.eye(2)]
    abel = [np.zeros(4, dtype=np.int64)]

    def key(p):
        return tuple(np.floor(p).astype(np.int64))

    def lookup(p) -> bool:
        base = np.floor(p).astype(np.int64)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for j in grid.get((base[0] + dx, base[1] + dy, base[2] + dz), ()):
                        if np.abs(pts[j] - p).max() < 1e-6 * max(1.0, p[0]):
                            return True
        return False

    p0 = _hyperboloid(np.array([1j]))[0]
    grid[key(p0)] = [0]
    pts.append(p0)
    frontier = [0]
    rounds = 0
    while frontier:
        rounds += 1
        fm = np.array([mats[i] for i in frontier])
        prod = np.einsum("fij,ljk->flik", fm, step)
        prod = _normalize(prod)
        orbit = mobius(prod, 1j)
        cosh_disp = _cosh_dist(orbit, 1j)
        hyp = _hyperboloid(orbit)
        nxt = []
        for a, i in enumerate(frontier):
            last = words[i][-1] if words[i] else 0
            for b, x in enumerate(letters):
                if x == -last or cosh_disp[a, b] > limit:
                    continue
                p = hyp[a, b]
                if lookup(p):
                    continue
                j = len(words)
                grid.setdefault(key(p), []).append(j)
                pts.append(p)
                words.append(words[i] + (x,))
                mats.append(prod[a, b])
                abel.append(abel[i] + step_ab[b])
                nxt.append(j)
                if j > budget:
                    raise BudgetExceeded(f"group ball exceeds budget of {budget} elements")
        frontier = nxt
    mats_a = np.array(mats[1:]).reshape(-1, 2, 2)
    disp = hyp_dist(1j, mobius(mats_a, 1j)) if len(mats_a) else np.zeros(0)
    disp = np.atleast_1d(disp)
    keep = disp <= cutoff
    ab = np.array(abel[1:], dtype=np.int64).reshape(-1, 4)
    return GroupBall(cutoff, margin, [w for w, k in zip(words[1:], keep) if k], mats_a[keep], disp[keep],
                     ab[keep] @ np.array(group.chi_row), ab[keep], saturated=True, rounds=rounds)


# -- subgroup schemes ------------------------------------------------------------------

@dataclass(frozen=True)
class HypScheme:
    """Gamma_n = chi^-1(nZ) (kind 'chi'), its limit ker chi (n=None), or Gamma(N) = ker(H1 -> (Z/N)^4)."""

    n: int | None
    kind: str = "chi"

    def __post_init__(self):
        if self.kind not in ("chi", "homology"):
            raise ValueError("scheme kind must be 'chi' or 'homology'")
        if self.n is not None and self.n < 1:
            raise ValueError("n must be a positive integer or None for the limit group")
        if self.kind == "homology" and self.n is None:
            raise ValueError("homology covers need a finite level")

    def mask(self, ball: GroupBall) -> np.ndarray:
        if self.kind == "homology":
            return np.all(ball.abelian % self.n == 0, axis=1)
        if self.n is None:
            return ball.chi == 0
        return ball.chi % self.n == 0


def required_cutoff(r_max: float) -> float:
    """Ball cutoff that decides inj_rad <= R for every point of the octagon and R <= r_max."""
    return 2 * r_max + 2 * CIRCUMRADIUS


@dataclass(frozen=True)
class InjRad:
    value: np.ndarray
    certified: np.ndarray
    saturated: bool


def inj_rad(ball: GroupBall, scheme: HypScheme, z) -> InjRad:
    """Injectivity radius of Gamma_n \\ H at z: half the least displacement d(z, gamma z).

    The value is exact when the minimizing element is provably inside the ball
    (min + 2 d(z, o) <= cutoff); otherwise it is the certified lower bound
    (cutoff - 2 d(z, o)) / 2 and flagged uncertified.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    mats = ball.matrices[scheme.mask(ball)]
    reach = ball.cutoff - 2 * hyp_dist(1j, z)
    best = np.full(z.shape, np.inf)
    for s in range(0, len(z), 256):
        zz = z[s:s + 256]
        if len(mats):
            best[s:s + 256] = np.arccosh(_cosh_dist(zz[:, None], mobius(mats[None], zz[:, None])).min(axis=1))
    certified = best <= reach
    value = np.where(certified, best, np.maximum(reach, 0)) / 2
    return InjRad(value, certified, ball.saturated)


# -- Monte Carlo BS-probability ----------------------------------------------------------

def _chunk_points(group: OctagonGroup, seed: int, chunk: int, size: int) -> np.ndarray:
    """Area-uniform points of the octagon from the counter-derived stream (seed, chunk)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    out = []
    have = 0
    cmax = math.cosh(CIRCUMRADIUS) - 1
    while have < size:
        u = rng.random(2 * CHUNK)
        phi = rng.random(2 * CHUNK) * 2 * math.pi
        rho = np.arccosh(1 + u * cmax)
        z = disk_to_half_plane(np.tanh(rho / 2) * np.exp(1j * phi))
        z = z[group.in_octagon(z)]
        out.append(z)
        have += len(z)
    return np.concatenate(out)[:size]


def sample_octagon(group: OctagonGroup, samples: int, seed: int) -> np.ndarray:
    n_chunks = -(-samples // CHUNK)
    pts = [_chunk_points(group, seed, c, min(CHUNK, samples - c * CHUNK)) for c in range(n_chunks)]
    return np.concatenate(pts) if pts else np.zeros(0, dtype=complex)


@dataclass(frozen=True)
class BSEstimate:
    n: int | None
    R: float
    estimate: float
    ci: float
    samples: int
    cutoff: float
    saturated: bool
    decided: bool


def _chunk_hits(args) -> np.ndarray:
    group, ball, scheme, radii, seed, chunk, size = args
    z = _chunk_points(group, seed, chunk, size)
    inj = inj_rad(ball, scheme, z)
    vals = inj.value
    hits = np.array([(vals <= r).sum() for r in radii])
    # an uncertified value is a lower bound: it decides "> R" only if it already exceeds R
    undecided = np.array([(~inj.certified & (vals <= r)).sum() for r in radii])
    return np.stack([hits, undecided])


def mc_bs_probability(group: OctagonGroup, ball: GroupBall, scheme: HypScheme, radii, samples: int, seed: int,
                      workers: int = 1) -> list[BSEstimate]:
    """P(InjRad <= R) for area-uniform points of Gamma_n \\ H, with 95% binomial half-widths.

    Gamma_n is normal in Gamma, so points of the octagon (a fundamental domain for Gamma)
    are area-uniform on the cover after pushing through the deck group.  The same sample
    set is used for every R, which makes estimates monotone in R.
    """
    radii = [float(r) for r in radii]
    if radii and ball.cutoff < required_cutoff(max(radii)) - 1e-12:
        raise ValueError(f"ball cutoff {ball.cutoff:.4g} below required {required_cutoff(max(radii)):.4g}")
    n_chunks = -(-samples // CHUNK)
    jobs = [(group, ball, scheme, radii, seed, c, min(CHUNK, samples - c * CHUNK)) for c in range(n_chunks)]
    if workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_chunk_hits, jobs))
    else:
        parts = [_chunk_hits(j) for j in jobs]
    tot = sum(parts) if parts else np.zeros((2, len(radii)), dtype=np.int64)
    out = []
    for r, h, u in zip(radii, tot[0], tot[1]):
        p = h / samples if samples else 0.0
        out.append(BSEstimate(scheme.n, r, float(p), 1.96 * math.sqrt(p * (1 - p) / samples) if samples else 0.0,
                              samples, ball.cutoff, ball.saturated, bool(u == 0)))
    return out


# -- pointwise equivalence check ----------------------------------------------------------

@dataclass(frozen=True)
class Prop24Result:
    side_a: bool
    side_b: bool
    indeterminate: bool
    saturated: bool


def _lift(z: complex) -> np.ndarray:
    """x in PSL2(R) with x i = z."""
    s = math.sqrt(z.imag)
    return np.array([[s, z.real / s], [0.0, 1.0 / s]])


def prop24_check(ball: GroupBall, scheme: HypScheme, z: complex, R: float,
                 band: float = INDETERMINATE_BAND) -> Prop24Result:
    """Compare [InjRad(z) <= R] with [x^-1 Gamma_n^* x meets {g : d(i, g i) <= 2R}].

    The second side works with conjugated matrices: cosh d(i, g i) = |g|_F^2 / 2 for
    g = x^-1 gamma x, so no point is moved.  Pairs within ``band`` of the threshold on
    either side are indeterminate.
    """
    z = complex(z)
    if ball.cutoff < 2 * R + 2 * hyp_dist(1j, z) - 1e-12:
        raise ValueError("ball too small for this (z, R)")
    inj = inj_rad(ball, scheme, z)
    a_val = float(inj.value[0])
    side_a = a_val <= R
    mats = ball.matrices[scheme.mask(ball)]
    x = _lift(z)
    conj = np.einsum("ij,njk,kl->nil", _inv2(x), mats, x)
    if len(conj):
        b_min = float(np.arccosh(np.maximum((conj ** 2).sum(axis=(1, 2)) / 2, 1.0)).min())
    else:
        b_min = math.inf
    side_b = b_min <= 2 * R
    indet = abs(a_val - R) < band or abs(b_min - 2 * R) < band
    return Prop24Result(bool(side_a), bool(side_b), bool(indet), ball.saturated)


HYP_COLUMNS = ["n", "R", "estimate", "ci", "cutoff", "saturated", "samples", "decided", "error"]


def scan_bs_probability(group: OctagonGroup, ns, radii, samples: int, seed: int, kind: str = "chi",
                        workers: int = 1, budget: int = BALL_BUDGET) -> ConvergenceReport:
    cutoff = required_cutoff(max(radii))
    ball = group_ball(group, cutoff, budget=budget)
    report = ConvergenceReport("hyperbolic", list(HYP_COLUMNS),
                               meta={"cutoff": cutoff, "margin": ball.margin, "ball_size": len(ball),
                                     "saturated": ball.saturated, "seed": seed, "scheme": kind})
    for n in ns:
        for est in mc_bs_probability(group, ball, HypScheme(n, kind), radii, samples, seed, workers):
            report.add(n=n, R=est.R, estimate=est.estimate, ci=est.ci, cutoff=est.cutoff, saturated=est.saturated,
                       samples=est.samples, decided=est.decided, error=None)
    return report
