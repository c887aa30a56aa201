"""Discrete G: finite-index subgroups as lattices, word-metric balls as compact sets.

With counting measure as Haar measure, the BS/Plancherel integrals over Gamma_n \\ G
become averages over right cosets Gamma_n x, and everything is an exact rational.

Every subgroup here is cut out by a homomorphism chi: G -> G^ab -> Z^m, so Gamma_n and
Gamma_inf are normal in G.  Every finite-index subgroup of a discrete group is a
cocompact lattice, which is how the discrete case sits inside the general theory.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from bslab import exact
from bslab.errors import BudgetExceeded
from bslab.reports import ConvergenceReport

Word = tuple[int, ...]  # letter i > 0 is generator i, -i its inverse

BALL_BUDGET = 10**6
INDEX_BUDGET = 10**4
_LITERAL_WORK = 20_000


def invert(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def free_reduce(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class MarkedGroup:
    """free(rank), surface(genus) or free-abelian(rank) with its generating set."""

    kind: str
    rank: int

    def __post_init__(self):
        if self.kind not in ("free", "surface", "free-abelian"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.rank < 1 or (self.kind == "surface" and self.rank < 2):
            raise ValueError("rank must be >= 1 (genus >= 2 for surface groups)")

    @classmethod
    def free(cls, rank: int) -> MarkedGroup:
        return cls("free", rank)

    @classmethod
    def surface(cls, genus: int) -> MarkedGroup:
        return cls("surface", genus)

    @classmethod
    def free_abelian(cls, rank: int) -> MarkedGroup:
        return cls("free-abelian", rank)

    @property
    def n_gens(self) -> int:
        return 2 * self.rank if self.kind == "surface" else self.rank

    @property
    def letters(self) -> tuple[int, ...]:
        """Alphabet in shortlex order: g1 < g1^-1 < g2 < g2^-1 < ..."""
        return tuple(s * i for i in range(1, self.n_gens + 1) for s in (1, -1))

    def name(self, x: int) -> str:
        i = abs(x)
        if self.kind == "surface":
            base = f"{'ab'[(i - 1) % 2]}{(i + 1) // 2}"
        else:
            base = "abcdefghijklmnopqrstuvwxyz"[i - 1] if i <= 26 else f"x{i}"
        return base if x > 0 else base.upper()

    def format(self, w: Word) -> str:
        return " ".join(self.name(x) for x in w) or "1"

    def parse(self, text: str | Sequence[str]) -> Word:
        tokens = text.split() if isinstance(text, str) else list(text)
        table = {self.name(x): x for x in self.letters}
        try:
            return tuple(table[t] for t in tokens)
        except KeyError as exc:
            raise ValueError(f"unknown letter {exc.args[0]!r} for {self.kind}({self.rank})") from None

    @property
    def relator(self) -> Word:
        """[a1, b1] ... [ag, bg] for surface groups; empty otherwise."""
        if self.kind != "surface":
            return ()
        return tuple(itertools.chain.from_iterable((2 * j + 1, 2 * j + 2, -(2 * j + 1), -(2 * j + 2))
                                                   for j in range(self.rank)))

    def check_word(self, w: Sequence[int]) -> Word:
        w = tuple(int(x) for x in w)
        for x in w:
            if x == 0 or abs(x) > self.n_gens:
                raise ValueError(f"unknown letter {x} for {self.kind}({self.rank})")
        return w

    def abelianize(self, w: Word) -> tuple[int, ...]:
        v = [0] * self.n_gens
        for x in w:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(v)

    def multiply(self, *words: Word) -> Word:
        return self.reduce(tuple(itertools.chain.from_iterable(words)))

    def reduce(self, w: Sequence[int]) -> Word:
        """Free reduction, Dehn's algorithm, or exponent collapse depending on the kind.

        Free and free-abelian results are normal forms.  Dehn-reduced surface words are
        empty exactly when the element is trivial, but are not unique otherwise.
        """
        w = self.check_word(w)
        if self.kind == "free":
            return free_reduce(w)
        if self.kind == "free-abelian":
            return tuple(itertools.chain.from_iterable(
                [i + 1 if e > 0 else -(i + 1)] * abs(e) for i, e in enumerate(self.abelianize(w))))
        return _dehn(w, _dehn_table(self.rank))

    def is_identity(self, w: Sequence[int]) -> bool:
        return not self.reduce(w)

    def equal(self, u: Word, v: Word) -> bool:
        return self.is_identity(tuple(u) + invert(tuple(v)))

    @property
    def has_normal_form(self) -> bool:
        return self.kind != "surface"


_DEHN_CACHE: dict[int, tuple] = {}


def _dehn_table(genus: int):
    if genus not in _DEHN_CACHE:
        rel = MarkedGroup.surface(genus).relator
        n = len(rel)
        rotations = set()
        for r in (rel, invert(rel)):
            for s in range(n):
                rotations.add(r[s:] + r[:s])
        h = n // 2 + 1
        by_prefix: dict[Word, list[Word]] = {}
        for rot in sorted(rotations):
            by_prefix.setdefault(rot[:h], []).append(rot)
        _DEHN_CACHE[genus] = (n, h, by_prefix)
    return _DEHN_CACHE[genus]


def _dehn(w: Word, table) -> Word:
    n, h, by_prefix = table
    w = free_reduce(w)
    while True:
        for i in range(len(w) - h + 1):
            cands = by_prefix.get(w[i:i + h])
            if not cands:
                continue
            # longest stretch of some rotation starting at position i
            best_len, best_rot = 0, None
            for rot in cands:
                k = h
                while k < n and i + k < len(w) and w[i + k] == rot[k]:
                    k += 1
                if k > best_len:
                    best_len, best_rot = k, rot
            u_len = best_len
            replacement = invert(best_rot[u_len:])
            w = free_reduce(w[:i] + replacement + w[i + u_len:])
            break
        else:
            return w


# -- balls ------------------------------------------------------------------------

class _ElementSet:
    """Set of group elements up to equality in G (normal forms or bucketed word problem)."""

    def __init__(self, group: MarkedGroup):
        self.group = group
        self.keys: set = set()
        self.buckets: dict[tuple[int, ...], list[Word]] = {}

    def add(self, w: Word) -> bool:
        g = self.group
        if g.has_normal_form:
            k = g.reduce(w)
            if k in self.keys:
                return False
            self.keys.add(k)
            return True
        bucket = self.buckets.setdefault(g.abelianize(w), [])
        if any(g.equal(w, v) for v in bucket):
            return False
        bucket.append(w)
        return True


def ball(group: MarkedGroup, r: int, budget: int = BALL_BUDGET) -> list[Word]:
    """Nontrivial elements of word length <= r, each once, as geodesic words in shortlex order."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    seen = _ElementSet(group)
    seen.add(())
    sphere: list[Word] = [()]
    out: list[Word] = []
    for _ in range(r):
        nxt = []
        for w in sphere:
            for x in group.letters:
                if w and w[-1] == -x:
                    continue
                cand = w + (x,)
                if seen.add(cand):
                    nxt.append(cand)
                    if len(out) + len(nxt) > budget:
                        raise BudgetExceeded(f"ball of radius {r} exceeds budget of {budget} elements")
        out.extend(nxt)
        sphere = nxt
    return out


def sphere_sizes(group: MarkedGroup, r: int) -> list[int]:
    sizes = [0] * (r + 1)
    for w in ball(group, r):
        sizes[len(w)] += 1
    sizes[0] = 1
    return sizes


# -- subgroup schemes -----------------------------------------------------------------

def _modulus(mod, n: int) -> int:
    if isinstance(mod, int):
        return mod
    if mod == "n":
        return n
    if isinstance(mod, str) and mod.endswith("*n"):
        return int(mod[:-2]) * n
    raise ValueError(f"bad modulus {mod!r}; use an int, 'n' or 'c*n'")


@dataclass(frozen=True)
class SubgroupScheme:
    """Gamma_n = {g : chi(ab g)_i = 0 mod m_i(n)} for chi: Z^r -> Z^m surjective.

    Each modulus is a fixed positive int or scales with n ('n', 'c*n'); the latter go to
    infinity, so the limit group keeps only those coordinates at 0.  ``kernel`` picks
    Gamma_inf: 'limit' (intersection of all Gamma_n, i.e. ker of the scaling part) or
    'trivial' ({1}, the absolute case).
    """

    chi: tuple[tuple[int, ...], ...]
    moduli: tuple
    kernel: str = "trivial"

    def __post_init__(self):
        chi = tuple(tuple(int(x) for x in row) for row in self.chi)
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "moduli", tuple(self.moduli))
        if len(self.moduli) != len(chi):
            raise ValueError("one modulus per row of chi")
        if self.kernel not in ("trivial", "limit"):
            raise ValueError("kernel must be 'trivial' or 'limit'")
        m, r = len(chi), len(chi[0])
        minors = [abs(exact.det(exact.as_matrix([[chi[i][j] for j in cols] for i in range(m)])))
                  for cols in itertools.combinations(range(r), m)]
        g = 0
        for x in minors:
            g = gcd(g, int(x))
        if g != 1:
            raise ValueError("chi must map the abelianization onto Z^m")
        for mod in self.moduli:
            _modulus(mod, 1)

    @classmethod
    def exponent(cls, group: MarkedGroup, generator: int = 1, kernel: str = "trivial") -> SubgroupScheme:
        """Gamma_n = exponent sum of one generator divisible by n."""
        row = tuple(int(i == generator - 1) for i in range(group.n_gens))
        return cls((row,), ("n",), kernel)

    @classmethod
    def homology_cover(cls, group: MarkedGroup, kernel: str = "trivial") -> SubgroupScheme:
        """Kernel of G -> H_1(G; Z/n)."""
        r = group.n_gens
        return cls(tuple(tuple(int(i == j) for j in range(r)) for i in range(r)), ("n",) * r, kernel)

    @classmethod
    def partial_homology_cover(cls, group: MarkedGroup, kernel: str = "trivial") -> SubgroupScheme:
        """p^-1(Z e_1 + n(Z e_2 + ... + Z e_r)): the first homology class stays free."""
        r = group.n_gens
        return cls(tuple(tuple(int(i == j) for j in range(r)) for i in range(r)), (1,) + ("n",) * (r - 1), kernel)

    @classmethod
    def from_config(cls, group: MarkedGroup, cfg: dict) -> SubgroupScheme:
        kernel = cfg.get("kernel", "trivial")
        kind = cfg.get("kind", "custom")
        if kind == "exponent":
            return cls.exponent(group, int(cfg.get("generator", 1)), kernel)
        if kind == "homology_cover":
            return cls.homology_cover(group, kernel)
        if kind == "partial_homology_cover":
            return cls.partial_homology_cover(group, kernel)
        if kind == "custom":
            return cls(tuple(tuple(r) for r in cfg["chi"]), tuple(cfg["moduli"]), kernel)
        raise ValueError(f"unknown scheme kind {kind!r}")

    def moduli_at(self, n: int) -> tuple[int, ...]:
        return tuple(_modulus(s, n) for s in self.moduli)

    def index(self, n: int) -> int:
        out = 1
        for m in self.moduli_at(n):
            out *= m
        return out

    def image(self, group: MarkedGroup, w: Word) -> tuple[int, ...]:
        ab = group.abelianize(w)
        return tuple(sum(c * a for c, a in zip(row, ab)) for row in self.chi)

    def in_gamma(self, group: MarkedGroup, n: int, w: Word) -> bool:
        return all(v % m == 0 for v, m in zip(self.image(group, w), self.moduli_at(n)))

    def in_kernel(self, group: MarkedGroup, w: Word) -> bool:
        if self.kernel == "trivial":
            return group.is_identity(w)
        return all((v == 0) if not isinstance(s, int) else (v % s == 0)
                   for v, s in zip(self.image(group, w), self.moduli))


def coset_representatives(group: MarkedGroup, scheme: SubgroupScheme, n: int,
                          budget: int = INDEX_BUDGET) -> list[tuple[tuple[int, ...], Word]]:
    """Shortlex-minimal word for each element of G / Gamma_n = prod Z/m_i.

    BFS over the finite quotient, expanding letters in alphabet order, so the first word
    reaching a class is the shortlex-least one mapping there.
    """
    mods = scheme.moduli_at(n)
    idx = scheme.index(n)
    if idx > budget:
        raise BudgetExceeded(f"index {idx} exceeds budget of {budget} cosets")
    step = {x: scheme.image(group, (x,)) for x in group.letters}
    start = (0,) * len(mods)
    reps = {start: ()}
    order = [start]
    queue = deque([start])
    while queue:
        q = queue.popleft()
        w = reps[q]
        for x in group.letters:
            nq = tuple((a + b) % m for a, b, m in zip(q, step[x], mods))
            if nq not in reps:
                reps[nq] = w + (x,)
                order.append(nq)
                queue.append(nq)
    if len(order) != idx:
        raise AssertionError("quotient BFS did not reach every coset")
    return [(q, reps[q]) for q in order]


def coset_of(group: MarkedGroup, scheme: SubgroupScheme, n: int, w: Word) -> tuple[int, ...]:
    return tuple(v % m for v, m in zip(scheme.image(group, w), scheme.moduli_at(n)))


# -- relative count / sign sums -----------------------------------------------------------

@dataclass(frozen=True)
class CosetCounts:
    """Per-coset #(x^-1 S x cap B_r) for S = Gamma_n \\ Gamma_inf, and for S = Gamma_n^*."""

    n: int
    r: int
    index: int
    relative: tuple[int, ...]
    absolute: tuple[int, ...]
    method: str

    @property
    def count_sum(self) -> Fraction:
        return Fraction(sum(self.relative), self.index)

    @property
    def sign_sum(self) -> Fraction:
        return Fraction(sum(1 for c in self.relative if c > 0), self.index)

    @property
    def max_absolute(self) -> int:
        return max(self.absolute, default=0)


def coset_counts(group: MarkedGroup, scheme: SubgroupScheme, n: int, r: int, method: str = "auto",
                 ball_budget: int = BALL_BUDGET, index_budget: int = INDEX_BUDGET,
                 _ball: list[Word] | None = None) -> CosetCounts:
    """Count conjugated subgroup elements in the ball for every coset of Gamma_n.

    ``literal`` conjugates each ball element by each coset representative through the
    reducer; ``normal`` uses that Gamma_n and Gamma_inf are normal in G, so all cosets
    see the same set.  ``auto`` picks literal when index * |ball| is small.
    """
    b = ball(group, r, ball_budget) if _ball is None else _ball
    idx = scheme.index(n)
    if idx > index_budget:
        raise BudgetExceeded(f"index {idx} exceeds budget of {index_budget} cosets")
    if method == "auto":
        method = "literal" if idx * max(len(b), 1) <= _LITERAL_WORK else "normal"
    if method == "normal":
        rel = sum(1 for g in b if scheme.in_gamma(group, n, g) and not scheme.in_kernel(group, g))
        ab = sum(1 for g in b if scheme.in_gamma(group, n, g))
        return CosetCounts(n, r, idx, (rel,) * idx, (ab,) * idx, method)
    if method != "literal":
        raise ValueError(f"unknown method {method!r}")
    rel_counts, abs_counts = [], []
    for _, x in coset_representatives(group, scheme, n, index_budget):
        xi = invert(x)
        rel = ab = 0
        for g in b:
            conj = group.reduce(x + g + xi)
            if scheme.in_gamma(group, n, conj):
                ab += 1
                if not scheme.in_kernel(group, conj):
                    rel += 1
        rel_counts.append(rel)
        abs_counts.append(ab)
    return CosetCounts(n, r, idx, tuple(rel_counts), tuple(abs_counts), method)


def relative_count_sum(group: MarkedGroup, scheme: SubgroupScheme, n: int, r: int, method: str = "auto") -> Fraction:
    """(1/[G:Gamma_n]) sum_x #(x^-1 (Gamma_n \\ Gamma_inf) x cap B_r)."""
    return coset_counts(group, scheme, n, r, method).count_sum


def relative_sign_sum(group: MarkedGroup, scheme: SubgroupScheme, n: int, r: int, method: str = "auto") -> Fraction:
    """Same average with each coset contributing sign(count) in {0, 1}."""
    return coset_counts(group, scheme, n, r, method).sign_sum


def lemma24_bound(group: MarkedGroup, scheme: SubgroupScheme, ns: Iterable[int], r: int, method: str = "auto") -> int:
    """max over n and cosets x of #(x^-1 Gamma_n^* x cap B_r): the uniform bound on intersections."""
    b = ball(group, r)
    return max((coset_counts(group, scheme, n, r, method, _ball=b).max_absolute for n in ns), default=0)


SCHREIER_COLUMNS = ["n", "r", "index", "count_sum", "sign_sum", "bound", "dominated", "method", "error"]


def scan_relative(group: MarkedGroup, scheme: SubgroupScheme, ns: Sequence[int], rs: Sequence[int],
                  method: str = "auto", ball_budget: int = BALL_BUDGET, index_budget: int = INDEX_BUDGET,
                  strict: bool = True) -> ConvergenceReport:
    """Rows (n, r, count_sum, sign_sum, bound) with the sandwich sign <= count <= bound * sign checked exactly."""
    report = ConvergenceReport("schreier", list(SCHREIER_COLUMNS),
                               meta={"group": f"{group.kind}({group.rank})", "chi": [list(r) for r in scheme.chi],
                                     "moduli": list(scheme.moduli), "kernel": scheme.kernel,
                                     "ball_budget": ball_budget, "index_budget": index_budget})
    for r in rs:
        b = ball(group, r, ball_budget)
        results = {}
        for n in ns:
            try:
                results[n] = coset_counts(group, scheme, n, r, method, ball_budget, index_budget, _ball=b)
            except BudgetExceeded as exc:
                if strict:
                    raise
                results[n] = exc
        bound = max((c.max_absolute for c in results.values() if isinstance(c, CosetCounts)), default=0)
        for n in ns:
            c = results[n]
            if not isinstance(c, CosetCounts):
                report.add(n=n, r=r, index=scheme.index(n), error=f"BudgetExceeded: {c}")
                continue
            ok = c.sign_sum <= c.count_sum <= bound * c.sign_sum
            report.add(n=n, r=r, index=c.index, count_sum=c.count_sum, sign_sum=c.sign_sum, bound=bound,
                       dominated=ok, method=c.method, error=None)
    return report
