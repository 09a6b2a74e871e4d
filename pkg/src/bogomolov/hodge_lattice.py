"""Exact model of a numerical Néron-Severi space with a Lorentzian pairing.

A :class:`PolarizedLattice` carries the symmetric Gram matrix of the pairing
``(x.y)_H`` and one reference ample class that selects the positive half of
the light cone. Everything here is exact over ``Fraction``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, lcm
from typing import Sequence

from .errors import DegenerateFormError, DimensionMismatch, SchemaError, SignatureError
from .rational import fmt_matrix, fmt_vector, parse_matrix, parse_vector

Vector = tuple[Fraction, ...]


class ConePosition(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"
    ZERO = "zero"


@dataclass(frozen=True)
class NSClass:
    coords: Vector

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "NSClass") -> "NSClass":
        _same_dim(self, other)
        return NSClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "NSClass") -> "NSClass":
        _same_dim(self, other)
        return NSClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "NSClass":
        return NSClass(tuple(-a for a in self.coords))

    def scale(self, k) -> "NSClass":
        k = Fraction(k)
        return NSClass(tuple(k * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    @classmethod
    def zero(cls, n: int) -> "NSClass":
        return cls((Fraction(0),) * n)


def _same_dim(x: NSClass, y: NSClass) -> None:
    if x.dim != y.dim:
        raise DimensionMismatch(f"classes of dimension {x.dim} and {y.dim}")


def as_class(x) -> NSClass:
    return x if isinstance(x, NSClass) else NSClass(tuple(x))


@dataclass(frozen=True)
class SignatureReport:
    """Congruence diagonalization ``T^t G T = diag(diagonal)``.

    Columns of ``basis`` are the new basis vectors written in the original
    coordinates. ``diagonal[0] > 0`` and the rest are negative; the first
    basis vector lies in the positive component.
    """

    basis: tuple[Vector, ...]
    diagonal: Vector

    @property
    def columns(self) -> list[Vector]:
        n = len(self.diagonal)
        return [tuple(self.basis[i][j] for i in range(n)) for j in range(n)]

    def to_json(self) -> dict:
        return {"basis": fmt_matrix(self.basis), "diagonal": fmt_vector(self.diagonal)}


@dataclass(frozen=True)
class PolarizedLattice:
    gram: tuple[Vector, ...]
    ample: NSClass
    _signature: SignatureReport | None = field(default=None, compare=False, repr=False)
    _integral: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        gram = tuple(tuple(Fraction(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "ample", as_class(self.ample))
        n = len(gram)
        if n == 0 or any(len(row) != n for row in gram):
            raise DimensionMismatch("gram matrix must be square and non-empty")
        if any(gram[i][j] != gram[j][i] for i in range(n) for j in range(i)):
            raise SignatureError("gram matrix is not symmetric")
        if self.ample.dim != n:
            raise DimensionMismatch(f"ample class has length {self.ample.dim}, lattice dim {n}")
        if self.pair(self.ample, self.ample) <= 0:
            raise SignatureError("reference ample class must have positive self-pairing")

    @property
    def dim(self) -> int:
        return len(self.gram)

    def pair(self, x, y) -> Fraction:
        return pair(self, x, y)

    def square(self, x) -> Fraction:
        return pair(self, x, x)

    @property
    def integral_gram(self) -> tuple[list[list[int]], int]:
        """The Gram matrix scaled to integers, with the common denominator."""
        if self._integral is None:
            den = lcm(*(x.denominator for row in self.gram for x in row))
            rows = [[x.numerator * (den // x.denominator) for x in row] for row in self.gram]
            object.__setattr__(self, "_integral", (rows, den))
        return self._integral

    @property
    def signature(self) -> SignatureReport:
        # Cached; the dataclass is frozen so bypass __setattr__.
        if self._signature is None:
            object.__setattr__(self, "_signature", verify_signature(self))
        return self._signature

    def to_json(self) -> dict:
        return {"dim": self.dim, "gram": fmt_matrix(self.gram), "ample": fmt_vector(self.ample.coords)}

    @classmethod
    def from_json(cls, obj: dict) -> "PolarizedLattice":
        if not isinstance(obj, dict):
            raise SchemaError("lattice descriptor must be an object")
        try:
            gram = parse_matrix(obj["gram"])
            ample = parse_vector(obj["ample"])
        except KeyError as exc:
            raise SchemaError(f"lattice descriptor missing {exc}") from None
        if "dim" in obj and obj["dim"] != len(gram):
            raise SchemaError(f"dim {obj['dim']} does not match gram size {len(gram)}")
        return cls(gram, NSClass(ample))

    @classmethod
    def diagonal(cls, entries: Sequence, ample: Sequence | None = None) -> "PolarizedLattice":
        n = len(entries)
        gram = [[Fraction(entries[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        if ample is None:
            ample = [1] + [0] * (n - 1)
        return cls(tuple(map(tuple, gram)), NSClass(tuple(ample)))


def pair(L: PolarizedLattice, x, y) -> Fraction:
    """Return ``x^t G y``."""
    x, y = as_class(x), as_class(y)
    if x.dim != L.dim or y.dim != L.dim:
        raise DimensionMismatch(f"expected classes of dimension {L.dim}, got {x.dim} and {y.dim}")
    # integer arithmetic on cleared denominators, one Fraction at the end
    G, gden = L.integral_gram
    xs, xden = _integral(x.coords)
    ys, yden = _integral(y.coords)
    total = 0
    for i, xi in enumerate(xs):
        if xi:
            row = G[i]
            total += xi * sum(row[j] * yj for j, yj in enumerate(ys) if yj)
    return Fraction(total, gden * xden * yden)


def _integral(v: Sequence[Fraction]) -> tuple[list[int], int]:
    den = lcm(*(c.denominator for c in v))
    return [c.numerator * (den // c.denominator) for c in v], den


def _diagonalize(gram: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Symmetric Gaussian elimination. Returns (T, d) with T^t G T = diag(d)."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    t = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst: int, src: int, k: Fraction) -> None:
        # e_dst <- e_dst + k e_src, applied as a congruence.
        for i in range(n):
            a[i][dst] += k * a[i][src]
        for j in range(n):
            a[dst][j] += k * a[src][j]
        for i in range(n):
            t[i][dst] += k * t[i][src]

    def swap(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in t:
            row[i], row[j] = row[j], row[i]

    for k in range(n):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][i] != 0), None)
            if piv is not None:
                swap(k, piv)
            else:
                off = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if off is None:
                    other = next(
                        ((i, j) for i in range(k + 1, n) for j in range(i + 1, n) if a[i][j] != 0),
                        None,
                    )
                    if other is None:
                        raise DegenerateFormError(f"pairing is degenerate (rank {k})")
                    swap(k, other[0])
                    off = other[1]
                # (e_k + e_j)^2 = 2 a_kj when both diagonals vanish
                add_col(k, off, Fraction(1))
        p = a[k][k]
        for j in range(k + 1, n):
            if a[k][j] != 0:
                add_col(j, k, -a[k][j] / p)
    return t, [a[i][i] for i in range(n)]


def verify_signature(L: PolarizedLattice) -> SignatureReport:
    """Diagonalize the pairing and check it has signature (1, n-1)."""
    t, d = _diagonalize(L.gram)
    n = len(d)
    pos = [i for i in range(n) if d[i] > 0]
    if len(pos) != 1:
        raise SignatureError(f"signature ({len(pos)}, {n - len(pos)}) is not (1, {n - 1})")
    order = pos + [i for i in range(n) if i != pos[0]]
    cols = [[t[r][c] for r in range(n)] for c in order]
    diag = [d[c] for c in order]
    # orient e_1 into the component of the reference ample class
    if pair(L, cols[0], L.ample) < 0:
        cols[0] = [-x for x in cols[0]]
    basis = tuple(tuple(cols[c][r] for c in range(n)) for r in range(n))
    return SignatureReport(basis=basis, diagonal=tuple(diag))


def diagonal_coordinates(L: PolarizedLattice, x) -> Vector:
    """Coordinates of ``x`` in the diagonalizing basis."""
    from .rational import solve

    x = as_class(x)
    return tuple(solve(L.signature.basis, x.coords))


def from_diagonal_coordinates(L: PolarizedLattice, z: Sequence) -> NSClass:
    B = L.signature.basis
    n = L.dim
    return NSClass(tuple(sum((B[i][j] * Fraction(z[j]) for j in range(n)), Fraction(0)) for i in range(n)))


def in_closure(L: PolarizedLattice, x) -> bool:
    """Membership in the closed positive cone (zero included)."""
    x = as_class(x)
    if x.is_zero():
        return True
    return L.square(x) >= 0 and L.pair(x, L.ample) > 0


def cone_position(L: PolarizedLattice, x) -> ConePosition:
    x = as_class(x)
    if x.dim != L.dim:
        raise DimensionMismatch(f"class of dimension {x.dim} in lattice of dimension {L.dim}")
    if x.is_zero():
        return ConePosition.ZERO
    sq = L.square(x)
    a = L.pair(x, L.ample)
    if sq > 0 and a > 0:
        return ConePosition.INTERIOR
    # a nonzero null vector has nonzero ample pairing by the reverse Schwarz inequality
    if sq == 0 and a > 0:
        return ConePosition.BOUNDARY
    return ConePosition.OUTSIDE


def is_interior(L: PolarizedLattice, x) -> bool:
    return cone_position(L, x) is ConePosition.INTERIOR


def _sqrt_upper(q: Fraction) -> Fraction:
    """A rational r >= sqrt(q) for q >= 0, exact when q is a rational square."""
    if q <= 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    # sqrt(n/d) = sqrt(n*d)/d
    s = isqrt(n * d)
    return Fraction(s + 1, d)


def sample_closure(L: PolarizedLattice, rng: random.Random, bound: int = 5, denom: int = 3) -> NSClass:
    """A nonzero class in the closed positive cone, drawn from a rational grid.

    The negative-part coordinates are drawn uniformly; the positive coordinate
    is a rational upper bound of the light-cone value plus a random slack
    (zero slack half the time, which lands on the cone when possible).
    """
    lam = L.signature.diagonal
    n = L.dim
    while True:
        rest = [Fraction(rng.randint(-bound * denom, bound * denom), denom) for _ in range(n - 1)]
        s = sum((-lam[i + 1] * rest[i] ** 2 for i in range(n - 1)), Fraction(0))
        z1 = _sqrt_upper(s / lam[0])
        if rng.random() < 0.5:
            z1 += Fraction(rng.randint(0, bound * denom), denom)
        if z1 == 0 and all(r == 0 for r in rest):
            continue
        return from_diagonal_coordinates(L, [z1] + rest)


def sample_interior(L: PolarizedLattice, rng: random.Random, bound: int = 5, denom: int = 3) -> NSClass:
    while True:
        y = sample_closure(L, rng, bound, denom)
        if is_interior(L, y):
            return y
        z = diagonal_coordinates(L, y)
        bumped = from_diagonal_coordinates(L, [z[0] + Fraction(1, denom)] + list(z[1:]))
        if is_interior(L, bumped):
            return bumped


@dataclass
class DualConeCertificate:
    position: ConePosition
    holds: bool
    samples_checked: int = 0
    min_pairing: Fraction | None = None
    witness: NSClass | None = None
    witness_pairing: Fraction | None = None
    counterexample: NSClass | None = None

    def to_json(self) -> dict:
        out = {"position": self.position.value, "holds": self.holds, "samples_checked": self.samples_checked}
        if self.min_pairing is not None:
            out["min_pairing"] = str(self.min_pairing)
        if self.witness is not None:
            out["witness"] = fmt_vector(self.witness.coords)
            out["witness_pairing"] = str(self.witness_pairing)
        if self.counterexample is not None:
            out["counterexample"] = fmt_vector(self.counterexample.coords)
        return out


def non_interior_witness(L: PolarizedLattice, x) -> NSClass:
    """A class y in the closed cone, y != 0, with (x.y) <= 0, for non-interior x.

    In diagonal coordinates x = z_1 e_1 + x_rest. When z_1 <= 0 the class e_1
    itself works. Otherwise y = e_1 + t x_rest with t = lam_1 z_1 / s, where
    s = -(x_rest.x_rest) > 0; then (x.y) = 0 and y lies in the closed cone
    exactly when (x.x) <= 0.
    """
    x = as_class(x)
    if is_interior(L, x):
        raise ValueError("x is interior; no witness exists")
    lam = L.signature.diagonal
    e1 = from_diagonal_coordinates(L, [1] + [0] * (L.dim - 1))
    if x.is_zero():
        return e1
    z = diagonal_coordinates(L, x)
    s = sum((-lam[i] * z[i] ** 2 for i in range(1, L.dim)), Fraction(0))
    if z[0] <= 0 or s == 0:
        return e1
    t = lam[0] * z[0] / s
    return from_diagonal_coordinates(L, [Fraction(1)] + [t * zi for zi in z[1:]])


def dual_cone_test(L: PolarizedLattice, x, samples: int = 100, seed: int = 0) -> DualConeCertificate:
    """Check the dual characterization of the open positive cone on samples.

    Interior classes must pair positively with every sampled closure class;
    for any other class an explicit closure witness with non-positive pairing
    is constructed.
    """
    x = as_class(x)
    L.signature  # raises if the signature is wrong
    pos = cone_position(L, x)
    if pos is ConePosition.INTERIOR:
        rng = random.Random(seed)
        lowest = None
        for k in range(samples):
            y = sample_closure(L, rng)
            v = L.pair(x, y)
            lowest = v if lowest is None or v < lowest else lowest
            if v <= 0:
                return DualConeCertificate(pos, False, k + 1, lowest, counterexample=y)
        return DualConeCertificate(pos, True, samples, lowest)
    y = non_interior_witness(L, x)
    v = L.pair(x, y)
    ok = v <= 0 and in_closure(L, y) and not y.is_zero()
    return DualConeCertificate(pos, ok, 0, witness=y, witness_pairing=v)
