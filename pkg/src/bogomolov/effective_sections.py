"""Combinatorics behind strictly effective sections.

Grid points, exponents and residue vectors are all enumerated in one fixed
graded order: by total degree, then by the first coordinate descending, and
so on recursively. So for two variables of degree <= 1 the order is
``(0,0), (1,0), (0,1)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod
from typing import Iterator, Mapping, Sequence

from sympy import isprime, primefactors

from .errors import CoveringError, PreconditionError, SchemaError, SearchCapExceeded
from .rational import exact_rank, fmt, fmt_vector, parse_rational, parse_vector

Index = tuple[int, ...]

SWEEP_LIMIT = 10**6
CERTIFICATE_LIMIT = 4096


def rad(a: int) -> int:
    """Product of the distinct primes dividing a."""
    if a == 0:
        raise PreconditionError("rad(0) is undefined")
    return prod(primefactors(abs(a)))


def _compositions(n: int, total: int, cap: int | None = None) -> Iterator[Index]:
    """Vectors of n nonnegative ints summing to total, first coordinate descending."""
    if n == 0:
        if total == 0:
            yield ()
        return
    if n == 1:
        if cap is None or total < cap:
            yield (total,)
        return
    top = total if cap is None else min(total, cap - 1)
    for first in range(top, -1, -1):
        for rest in _compositions(n - 1, total - first, cap):
            yield (first,) + rest


def graded_indices(n: int, d: int) -> list[Index]:
    """All i in N^n with |i| <= d, in graded order."""
    return [i for s in range(d + 1) for i in _compositions(n, s)]


def graded_box(n: int, p: int) -> Iterator[Index]:
    """All of {0..p-1}^n in graded order."""
    for s in range(n * (p - 1) + 1):
        yield from _compositions(n, s, cap=p)


@dataclass(frozen=True)
class GridSpec:
    a: tuple[Fraction, ...]
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(Fraction(x) for x in self.a))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c == 0:
            raise PreconditionError("grid step c must be nonzero")

    def point(self, i: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(ai + self.c * ii for ai, ii in zip(self.a, i))

    @classmethod
    def standard(cls, n: int) -> "GridSpec":
        return cls((0,) * n, 1)

    @classmethod
    def from_json(cls, obj) -> "GridSpec":
        if not isinstance(obj, dict):
            raise SchemaError("grid spec must be an object")
        try:
            return cls(parse_vector(obj["a"]), parse_rational(obj.get("c", 1)))
        except KeyError as exc:
            raise SchemaError(f"grid spec missing {exc}") from None

    def to_json(self) -> dict:
        return {"a": fmt_vector(self.a), "c": fmt(self.c)}


@dataclass(frozen=True)
class GridPolynomial:
    nvars: int
    degree: int
    coeffs: Mapping[Index, Fraction]

    def __post_init__(self):
        clean = {}
        for exp, c in self.coeffs.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.nvars or any(e < 0 for e in exp):
                raise PreconditionError(f"bad exponent vector {exp} for {self.nvars} variables")
            if sum(exp) > self.degree:
                raise PreconditionError(f"monomial {exp} exceeds declared degree {self.degree}")
            c = Fraction(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        object.__setattr__(self, "coeffs", {e: c for e, c in clean.items() if c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, point: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for exp, c in self.coeffs.items():
            term = c
            for x, e in zip(point, exp):
                if e:
                    term *= Fraction(x) ** e
            total += term
        return total

    def compose_affine(self, a: Sequence, c) -> "GridPolynomial":
        """The polynomial Y -> f(a + c Y)."""
        c = Fraction(c)
        a = [Fraction(x) for x in a]
        out: dict[Index, Fraction] = {}
        for exp, coef in self.coeffs.items():
            # expand prod_j (a_j + c Y_j)^{e_j}
            partial = {(): coef}
            for j, e in enumerate(exp):
                nxt = {}
                for head, val in partial.items():
                    for k in range(e + 1):
                        term = val * comb(e, k) * a[j] ** (e - k) * c**k
                        if term:
                            key = head + (k,)
                            nxt[key] = nxt.get(key, Fraction(0)) + term
                partial = nxt
            for key, val in partial.items():
                out[key] = out.get(key, Fraction(0)) + val
        return GridPolynomial(self.nvars, self.degree, out)

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "degree": self.degree,
            "coeffs": {",".join(map(str, e)): fmt(c) for e, c in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, obj) -> "GridPolynomial":
        if not isinstance(obj, dict):
            raise SchemaError("polynomial must be an object")
        try:
            nvars, degree, raw = obj["nvars"], obj["degree"], obj["coeffs"]
        except KeyError as exc:
            raise SchemaError(f"polynomial missing {exc}") from None
        coeffs: dict[Index, Fraction] = {}
        if isinstance(raw, dict):
            items = raw.items()
        elif isinstance(raw, list):
            items = [(item[0], item[1]) for item in raw]
        else:
            raise SchemaError("coeffs must be a map or a list of [exponents, coefficient] pairs")
        for key, val in items:
            try:
                exp = tuple(int(x) for x in key.split(",")) if isinstance(key, str) else tuple(key)
            except ValueError:
                raise SchemaError(f"bad exponent key {key!r}") from None
            coeffs[exp] = coeffs.get(exp, Fraction(0)) + parse_rational(val)
        try:
            return cls(nvars, degree, coeffs)
        except PreconditionError as exc:
            raise SchemaError(str(exc)) from None


def grid_points(n: int, d: int, g: GridSpec) -> list[tuple[Fraction, ...]]:
    if len(g.a) != n:
        raise PreconditionError(f"offset has length {len(g.a)}, expected {n}")
    return [g.point(i) for i in graded_indices(n, d)]


@dataclass(frozen=True)
class DeterminingCertificate:
    size: int
    rank: int
    matrix: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def invertible(self) -> bool:
        return self.rank == self.size

    def to_json(self, include_matrix: bool = False) -> dict:
        out = {"size": self.size, "rank": self.rank, "invertible": self.invertible}
        if include_matrix:
            out["matrix"] = [fmt_vector(r) for r in self.matrix]
        return out


def determining_matrix(n: int, d: int, g: GridSpec) -> DeterminingCertificate:
    """Rows: grid points; columns: monomials of degree <= d (both graded)."""
    pts = grid_points(n, d, g)
    mons = graded_indices(n, d)
    rows = []
    for x in pts:
        rows.append(tuple(prod((x[j] ** e[j] for j in range(n)), start=Fraction(1)) for e in mons))
    expected = comb(n + d, n)
    assert len(rows) == expected
    return DeterminingCertificate(expected, exact_rank(rows), tuple(rows))


@dataclass(frozen=True)
class NonvanishingResult:
    zero: bool
    index: Index | None = None
    point: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    def to_json(self) -> dict:
        if self.zero:
            return {"verdict": "zero"}
        return {
            "verdict": "nonvanishing",
            "index": list(self.index),
            "point": fmt_vector(self.point),
            "value": fmt(self.value),
        }


def find_nonvanishing(f: GridPolynomial, g: GridSpec) -> NonvanishingResult:
    """First grid index (graded order) where f does not vanish."""
    if len(g.a) != f.nvars:
        raise PreconditionError(f"offset has length {len(g.a)}, expected {f.nvars}")
    if f.is_zero():
        return NonvanishingResult(True)
    for i in graded_indices(f.nvars, f.degree):
        x = g.point(i)
        v = f(x)
        if v != 0:
            return NonvanishingResult(False, i, x, v)
    raise AssertionError("nonzero polynomial vanishes on the whole simplex grid")


def _leading_coefficient(values: Sequence[Fraction]) -> Fraction:
    """Coefficient of a^e for the degree <= e polynomial through (a, values[a]), a = 0..e."""
    e = len(values) - 1
    diff = list(values)
    for _ in range(e):
        diff = [b - a for a, b in zip(diff, diff[1:])]
    return diff[0] / factorial(e)


@dataclass
class EliminationTrace:
    success: bool
    steps: list[dict] = field(default_factory=list)
    violation: NonvanishingResult | None = None

    def to_json(self) -> dict:
        out = {"success": self.success, "steps": self.steps}
        if self.violation is not None:
            out["violation"] = self.violation.to_json()
        return out


def elimination_proof_trace(f: GridPolynomial, g: GridSpec) -> EliminationTrace:
    """Replay the induction that a polynomial vanishing on the grid is zero.

    Working in grid coordinates (the affine change to offset 0 and step 1),
    write f = sum_k A_k(X_1..X_{n-1}) X_n^{d-k}. For k = 0, 1, ..., d the
    values of A_k on the degree-k subgrid are recovered from f's values by
    finite differences in the last variable; each must vanish, and the
    argument recurses into n-1 variables.
    """
    hit = find_nonvanishing(f, g)
    if not hit.zero:
        return EliminationTrace(False, violation=hit)
    n, d = f.nvars, f.degree
    table = {i: f(g.point(i)) for i in graded_indices(n, d)}
    steps: list[dict] = []

    def replay(values: dict[Index, Fraction], nv: int, deg: int, depth: int) -> bool:
        ok = True
        for k in range(deg + 1):
            e = deg - k
            sub = {}
            for head in graded_indices(nv - 1, k):
                sub[head] = _leading_coefficient([values[head + (a,)] for a in range(e + 1)])
            vanishes = all(v == 0 for v in sub.values())
            steps.append(
                {
                    "depth": depth,
                    "variable": nv,
                    "coefficient": k,
                    "power": e,
                    "subgrid_points": len(sub),
                    "vanishes": vanishes,
                }
            )
            ok = ok and vanishes
            if nv > 1:
                ok = replay(sub, nv - 1, k, depth + 1) and ok
        return ok

    ok = replay(table, n, d, 0) if n > 0 else table[()] == 0
    return EliminationTrace(ok and f.is_zero(), steps)


@dataclass(frozen=True)
class ResidueSystem:
    """Evaluation data: each point contributes a prime p and a vector v in F_p^N."""

    N: int
    points: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        pts = tuple((int(p), tuple(int(x) for x in v)) for p, v in self.points)
        object.__setattr__(self, "points", pts)
        if self.N < 1:
            raise PreconditionError("N must be positive")
        for p, v in pts:
            if not isprime(p):
                raise PreconditionError(f"{p} is not prime")
            if len(v) != self.N:
                raise PreconditionError(f"value vector {v} does not have length N = {self.N}")
            if all(x % p == 0 for x in v):
                raise PreconditionError(f"value vector {v} is zero modulo {p}")

    @property
    def primes(self) -> list[int]:
        return sorted({p for p, _ in self.points})

    @property
    def l(self) -> int:
        return prod(self.primes)

    def vectors_for(self, p: int) -> list[tuple[int, ...]]:
        return [tuple(x % p for x in v) for q, v in self.points if q == p]

    def satisfied_by(self, a: Sequence[int]) -> bool:
        return all(sum(ai * vi for ai, vi in zip(a, v)) % p != 0 for p, v in self.points)

    @classmethod
    def from_json(cls, obj) -> "ResidueSystem":
        if not isinstance(obj, dict):
            raise SchemaError("residue system must be an object")
        try:
            N = obj["N"]
            points = [(pt["p"], pt["v"]) for pt in obj["points"]]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"residue system malformed: {exc}") from None
        try:
            rs = cls(N, tuple(points))
        except (PreconditionError, ValueError, TypeError) as exc:
            raise SchemaError(str(exc)) from None
        if "l" in obj and obj["l"] != rs.l:
            raise SchemaError(f"l = {obj['l']} but the radical of the primes is {rs.l}")
        return rs

    def to_json(self) -> dict:
        return {"N": self.N, "l": self.l, "points": [{"p": p, "v": list(v)} for p, v in self.points]}


def _avoids(a: Sequence[int], vectors: Sequence[Sequence[int]], p: int) -> bool:
    return all(sum(x * y for x, y in zip(a, v)) % p for v in vectors)


def _residue_for_prime(
    p: int, N: int, vectors: list, rng: random.Random, sweep_limit: int, retry_cap: int
) -> tuple[int, ...]:
    if p**N <= sweep_limit:
        blocking = {}
        for a in graded_box(N, p):
            bad = next((j for j, v in enumerate(vectors) if sum(x * y for x, y in zip(a, v)) % p == 0), None)
            if bad is None:
                return a
            if p**N <= CERTIFICATE_LIMIT:
                blocking[",".join(map(str, a))] = bad
        cert = {"prime": p, "N": N, "vectors": [list(v) for v in vectors], "residues_checked": p**N}
        if blocking:
            cert["blocking"] = blocking
        raise CoveringError(f"the hyperplanes for p={p} cover F_{p}^{N}", cert)
    for _ in range(retry_cap):
        a = tuple(rng.randrange(p) for _ in range(N))
        if _avoids(a, vectors, p):
            return a
    raise SearchCapExceeded(f"no avoiding residue mod {p} found in {retry_cap} random draws")


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Combine x = r1 mod m1 and x = r2 mod m2 for coprime moduli."""
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return (r1 + m1 * t) % (m1 * m2), m1 * m2


def residue_search(
    rs: ResidueSystem, seed: int = 0, sweep_limit: int = SWEEP_LIMIT, retry_cap: int = 10**5
) -> tuple[int, ...]:
    """Coefficients 0 <= a_j < l with <a, v> != 0 mod p for every point (p, v)."""
    rng = random.Random(seed)
    per_prime = {p: _residue_for_prime(p, rs.N, rs.vectors_for(p), rng, sweep_limit, retry_cap) for p in rs.primes}
    out = []
    for j in range(rs.N):
        r, m = 0, 1
        for p, res in per_prime.items():
            r, m = crt_pair(r, m, res[j], p)
        out.append(r)
    return tuple(out)


def shift_invariance_check(rs: ResidueSystem, a: Sequence[int], k: Sequence[int]) -> bool:
    l = rs.l
    return rs.satisfied_by([ai + l * ki for ai, ki in zip(a, k)])


def eval_int_poly(coeffs: Sequence[int], m: int) -> int:
    """Polynomial with coefficients in ascending powers."""
    v = 0
    for c in reversed(coeffs):
        v = v * m + c
    return v


def supnorm_bound(p_poly: Sequence[int], d_poly: Sequence[int], l: int, r, m: int) -> Fraction:
    return (eval_int_poly(p_poly, m) * (l - 1) + eval_int_poly(d_poly, m) * l) * Fraction(r) ** m


def supnorm_threshold(
    p_poly: Sequence[int], d_poly: Sequence[int], l: int, r, cap: int = 10**5
) -> int:
    """Least m >= 1 with (p(m)(l-1) + d(m) l) r^m < 1."""
    r = Fraction(r)
    if not 0 < r < 1:
        raise PreconditionError("r must lie strictly between 0 and 1")
    if l < 1:
        raise PreconditionError("l must be positive")
    power = Fraction(1)
    for m in range(1, cap + 1):
        power *= r
        lead = eval_int_poly(p_poly, m) * (l - 1) + eval_int_poly(d_poly, m) * l
        if lead * power < 1:
            return m
    raise SearchCapExceeded(f"no m <= {cap} brings the sup-norm bound below 1")


@dataclass
class SectionPlan:
    residues: tuple[int, ...]
    shift: Index
    coefficients: tuple[int, ...]
    l: int
    avoid_value: Fraction
    norm_bound: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "residues": list(self.residues),
            "shift": list(self.shift),
            "coefficients": list(self.coefficients),
            "l": self.l,
            "avoid_value": fmt(self.avoid_value),
        }
        if self.norm_bound is not None:
            out["norm_bound"] = fmt(self.norm_bound)
            out["norm_below_one"] = self.norm_bound < 1
        return out


def section_plan(rs: ResidueSystem, avoid: GridPolynomial, r=None, m: int | None = None, seed: int = 0) -> SectionPlan:
    """Compose residue avoidance, the grid lemma and the sup-norm estimate.

    ``avoid`` is a defining polynomial of the hypersurface to dodge, in the
    N coefficient coordinates. Residues a come from :func:`residue_search`;
    a shift k >= 0 with |k| <= deg(avoid) and avoid(a + l k) != 0 comes from
    the grid lemma with offset a and step l. With r (the largest sup-norm of
    the degree-one generators) and m given, the sum of coefficients times
    r^m bounds the sup-norm of the assembled section.
    """
    if avoid.nvars != rs.N:
        raise PreconditionError("avoidance polynomial must have N variables")
    a = residue_search(rs, seed=seed)
    l = rs.l
    hit = find_nonvanishing(avoid, GridSpec(a, l))
    if hit.zero:
        raise PreconditionError("the avoidance polynomial is zero")
    coeffs = tuple(ai + l * ki for ai, ki in zip(a, hit.index))
    assert rs.satisfied_by(coeffs)
    bound = None
    if r is not None and m is not None:
        bound = sum(coeffs) * Fraction(r) ** m
    return SectionPlan(a, hit.index, coeffs, l, hit.value, bound)
