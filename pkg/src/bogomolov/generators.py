"""Seeded random instances for property suites.

Lattices are built as ``G = M^t D M`` with a known integer change of basis
``M`` and diagonal ``D = diag(a_1, -a_2, ..., -a_n)``, so that callers can
produce interior, closure and boundary classes in the known basis without
going through :func:`~bogomolov.hodge_lattice.verify_signature`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .destab_chain import SubsheafUniverse
from .effective_sections import GridPolynomial, GridSpec, ResidueSystem, graded_indices
from .hodge_lattice import NSClass, PolarizedLattice
from .linear_system import ChernProfile
from .rational import solve
from .sheaf_numerics import SheafClass, compose_extension, discriminant, d_class

PRIMES = (2, 3, 5, 7, 11, 13)


def rand_fraction(rng: random.Random, bound: int = 5, denom: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound * denom, bound * denom), rng.randint(1, denom))


@dataclass
class RandomLattice:
    lattice: PolarizedLattice
    M: list[list[int]]
    D: list[int]

    @property
    def n(self) -> int:
        return len(self.D)

    @property
    def uniform(self) -> bool:
        return all(abs(x) == abs(self.D[0]) for x in self.D)

    def from_w(self, w) -> NSClass:
        return NSClass(tuple(solve(self.M, [Fraction(x) for x in w])))

    def to_w(self, x: NSClass) -> list[Fraction]:
        return [sum((Fraction(self.M[i][j]) * x.coords[j] for j in range(self.n)), Fraction(0)) for i in range(self.n)]

    def interior_w(self, rng: random.Random, bound: int = 4) -> list[Fraction]:
        rest = [rand_fraction(rng, bound, 3) for _ in range(self.n - 1)]
        s = sum((Fraction(-self.D[i + 1]) * rest[i] ** 2 for i in range(self.n - 1)), Fraction(0)) / self.D[0]
        # rational strictly above sqrt(s)
        w1 = Fraction(isqrt(s.numerator * s.denominator) + 1, s.denominator) + Fraction(rng.randint(0, 6), 3)
        return [w1] + rest

    def boundary_w(self, rng: random.Random) -> list[Fraction]:
        """A nonzero null vector; requires |D| constant."""
        assert self.uniform
        k = self.n - 2
        u = [rand_fraction(rng, 3, 3) for _ in range(k)]
        q = 1 + sum((x * x for x in u), Fraction(0))
        sphere = [2 * x / q for x in u] + [(2 - q) / q]
        sign = rng.choice((1, -1))
        t = Fraction(rng.randint(1, 12), rng.randint(1, 4))
        return [t] + [sign * t * x for x in sphere]

    def closure_w(self, rng: random.Random) -> list[Fraction]:
        if self.uniform and self.n >= 2 and rng.random() < 0.5:
            return self.boundary_w(rng)
        return self.interior_w(rng)


def random_lattice(rng: random.Random, n: int, uniform: bool | None = None) -> RandomLattice:
    if uniform is None:
        uniform = rng.random() < 0.5
    if uniform:
        a = rng.randint(1, 3)
        D = [a] + [-a] * (n - 1)
    else:
        D = [rng.randint(1, 4)] + [-rng.randint(1, 4) for _ in range(n - 1)]
    while True:
        M = [[rng.randint(-2, 2) + (3 if i == j else 0) for j in range(n)] for i in range(n)]
        try:
            solve(M, [0] * n)
            break
        except ZeroDivisionError:
            continue
    G = [
        [sum((M[k][i] * D[k] * M[k][j] for k in range(n))) for j in range(n)]
        for i in range(n)
    ]
    rl = RandomLattice(None, M, D)  # type: ignore[arg-type]
    ample = rl.from_w([1] + [0] * (n - 1))
    rl.lattice = PolarizedLattice(tuple(map(tuple, G)), ample)
    return rl


def random_class(rng: random.Random, n: int, bound: int = 5, integral: bool = False) -> NSClass:
    if integral:
        return NSClass(tuple(Fraction(rng.randint(-bound, bound)) for _ in range(n)))
    return NSClass(tuple(rand_fraction(rng, bound) for _ in range(n)))


def random_sheaf(rng: random.Random, n: int, max_rank: int = 5, integral: bool = False) -> SheafClass:
    return SheafClass(rng.randint(1, max_rank), random_class(rng, n, integral=integral), rand_fraction(rng, 6))


def sheaf_with_delta(L: PolarizedLattice, rank: int, c1: NSClass, delta) -> SheafClass:
    c2h = Fraction(rank - 1, 2 * rank) * L.square(c1) - Fraction(delta)
    return SheafClass(rank, c1, c2h)


def random_profile(rng: random.Random, d: int | None = None) -> ChernProfile:
    d = rng.randint(2, 6) if d is None else d
    return ChernProfile(d, tuple(rand_fraction(rng, 20, 6) for _ in range(d + 1)))


def random_polynomial(rng: random.Random, n: int, d: int, density: float = 0.5) -> GridPolynomial:
    mons = graded_indices(n, d)
    while True:
        coeffs = {e: rand_fraction(rng, 5, 3) for e in mons if rng.random() < density}
        f = GridPolynomial(n, d, coeffs)
        if not f.is_zero():
            return f


def random_grid(rng: random.Random, n: int, c=None) -> GridSpec:
    c = rng.choice((Fraction(1), Fraction(1, 2), Fraction(-2))) if c is None else c
    return GridSpec(tuple(rand_fraction(rng, 3, 5) for _ in range(n)), c)


def random_residue_system(rng: random.Random, max_N: int = 4, max_prime: int = 13) -> ResidueSystem:
    N = rng.randint(1, max_N)
    primes = [p for p in PRIMES if p <= max_prime]
    points = []
    for _ in range(rng.randint(1, 6)):
        p = rng.choice(primes)
        while True:
            v = tuple(rng.randint(-20, 20) for _ in range(N))
            if any(x % p for x in v):
                break
        points.append((p, v))
    return ResidueSystem(N, tuple(points))


def random_filtration(rng: random.Random, rl: RandomLattice, length: int | None = None) -> list[SheafClass]:
    """T_1 in ... in T_l with nonpositive quotient discriminants and interior steps."""
    L = rl.lattice
    n = rl.n
    length = rng.randint(2, 4) if length is None else length
    ranks = sorted(rng.sample(range(1, length + 4), length))
    T1 = sheaf_with_delta(L, ranks[0], random_class(rng, n, integral=True), -rng.randint(0, 6))
    chain = [T1]
    for r in ranks[1:]:
        prev = chain[-1]
        q = r - prev.rank
        x = rl.from_w(rl.interior_w(rng))
        # d(prev, T_i) = (q / r) x when c1(Q) = q (c1(prev)/rk prev - x)
        c1q = (prev.c1.scale(Fraction(1, prev.rank)) - x).scale(q)
        Q = sheaf_with_delta(L, q, c1q, -Fraction(rng.randint(0, 12), rng.randint(1, 3)))
        chain.append(compose_extension(L, prev, Q))
    return chain


def random_universe(rng: random.Random, rl: RandomLattice, rank: int | None = None) -> SubsheafUniverse:
    """A universe whose root has positive discriminant, built by extensions.

    A random flag T_1 in ... in T_k with random quotients is extended by a
    final quotient whose c2h is lowered until delta(E) > 0. Extra nodes of
    random rank are added with random inclusions into flag members.
    """
    L = rl.lattice
    n = rl.n
    rank = rng.randint(2, 5) if rank is None else rank
    while True:
        if rank == 2:
            S = sheaf_with_delta(L, 1, random_class(rng, n, integral=True), -rng.randint(0, 2))
            Q = sheaf_with_delta(L, 1, random_class(rng, n, integral=True), -rng.randint(0, 2))
            E = compose_extension(L, S, Q)
            if discriminant(L, E) <= 0:
                continue
            nodes = [S]
            for _ in range(rng.randint(0, 3)):
                extra = _rank_one_split(rng, L, E)
                if extra is not None:
                    nodes.append(extra)
            U = SubsheafUniverse(L, E, tuple(nodes), ())
        else:
            k = rng.randint(1, rank - 1)
            ranks = sorted(rng.sample(range(1, rank), k))
            flag = [SheafClass(ranks[0], random_class(rng, n, integral=True), rng.randint(-3, 3))]
            for r in ranks[1:]:
                Q = SheafClass(r - flag[-1].rank, random_class(rng, n, integral=True), rng.randint(-3, 3))
                flag.append(compose_extension(L, flag[-1], Q))
            last = SheafClass(rank - flag[-1].rank, random_class(rng, n, integral=True), 0)
            E = compose_extension(L, flag[-1], last)
            delta = discriminant(L, E)
            if delta <= 0:
                bump = -delta + rng.randint(1, 5)
                last = SheafClass(last.rank, last.c1, last.c2h - bump)
                E = compose_extension(L, flag[-1], last)
            nodes = list(flag)
            edges = [(i, j) for i in range(len(flag)) for j in range(i + 1, len(flag))]
            for _ in range(rng.randint(0, 4)):
                extra = SheafClass(rng.randint(1, rank - 1), random_class(rng, n, integral=True), rng.randint(-3, 3))
                idx = len(nodes)
                nodes.append(extra)
                for j, F in enumerate(flag):
                    if F.rank > extra.rank and rng.random() < 0.5:
                        edges.append((idx, j))
                    elif F.rank < extra.rank and rng.random() < 0.5:
                        edges.append((j, idx))
            _plant_refinements(rng, rl, E, nodes, edges, rng.randint(0, 4))
            U = SubsheafUniverse(L, E, tuple(nodes), tuple(edges))
        if discriminant(L, U.root) <= 0:
            continue
        if any(L.pair(d_class(F, U.root), L.ample) > 0 for F in U.nodes):
            return U


def _rank_one_split(rng, L: PolarizedLattice, E: SheafClass, tries: int = 20) -> SheafClass | None:
    """A rank-1 F of the rank-2 E with delta(F) <= 0 and delta(E/F) <= 0.

    Rank-1 torsion-free sheaves have c2 >= 0, which is what a saturated
    rank-1 subsheaf and its quotient look like numerically.
    """
    n = L.dim
    for _ in range(tries):
        c1 = random_class(rng, n, integral=True)
        room = E.c2h - L.pair(c1, E.c1 - c1)
        if room >= 0:
            return SheafClass(1, c1, Fraction(rng.randint(0, int(room))))
    return None


def _plant_refinements(rng, rl: RandomLattice, E: SheafClass, nodes: list, edges: list, rounds: int) -> None:
    """Add nodes that refine existing ones with an interior increment.

    A sub-refinement F1 in F gets c1(F1)/rk F1 = c1(F)/rk F + x; a quotient
    refinement F in F1 gets c1(F1/F)/rk(F1/F) = c1(E/F)/rk(E/F) + x, with x
    interior in both cases.
    """
    L = rl.lattice
    for _ in range(rounds):
        j = rng.randrange(len(nodes))
        F = nodes[j]
        x = rl.from_w(rl.interior_w(rng, bound=2))
        c2h = rng.randint(-3, 3)
        if rng.random() < 0.5 and F.rank >= 2:
            r1 = rng.randint(1, F.rank - 1)
            F1 = SheafClass(r1, (F.c1.scale(Fraction(1, F.rank)) + x).scale(r1), c2h)
            nodes.append(F1)
            edges.append((len(nodes) - 1, j))
        elif E.rank - F.rank >= 2:
            q = rng.randint(1, E.rank - F.rank - 1)
            qe = E.c1 - F.c1
            Q1 = SheafClass(q, (qe.scale(Fraction(1, E.rank - F.rank)) + x).scale(q), c2h)
            nodes.append(compose_extension(L, F, Q1))
            edges.append((j, len(nodes) - 1))
