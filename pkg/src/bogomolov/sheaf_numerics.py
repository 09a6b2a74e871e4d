"""Slope and discriminant calculus on numerical sheaf data.

A :class:`SheafClass` is the numerical shadow ``(rank, c1, c2.H1...H_{d-2})``
of a torsion-free sheaf. All quantities are exact rationals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import DimensionMismatch, PreconditionError, SchemaError
from .hodge_lattice import ConePosition, NSClass, PolarizedLattice, as_class, cone_position
from .rational import fmt, fmt_vector, parse_rational, parse_vector


@dataclass(frozen=True)
class SheafClass:
    rank: int
    c1: NSClass
    c2h: Fraction

    def __post_init__(self):
        if isinstance(self.rank, bool) or not isinstance(self.rank, int) or self.rank < 1:
            raise PreconditionError(f"rank must be a positive integer, got {self.rank!r}")
        object.__setattr__(self, "c1", as_class(self.c1))
        object.__setattr__(self, "c2h", Fraction(self.c2h))

    def to_json(self) -> dict:
        return {"rank": self.rank, "c1": fmt_vector(self.c1.coords), "c2h": fmt(self.c2h)}

    @classmethod
    def from_json(cls, obj) -> "SheafClass":
        if not isinstance(obj, dict):
            raise SchemaError("sheaf descriptor must be an object")
        try:
            rank = obj["rank"]
            c1 = parse_vector(obj["c1"])
            c2h = parse_rational(obj.get("c2h", 0))
        except KeyError as exc:
            raise SchemaError(f"sheaf descriptor missing {exc}") from None
        if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
            raise SchemaError(f"rank must be a positive integer, got {rank!r}")
        return cls(rank, NSClass(c1), c2h)


@dataclass(frozen=True)
class Polarization:
    hclass: NSClass

    def check(self, L: PolarizedLattice) -> None:
        if cone_position(L, self.hclass) is not ConePosition.INTERIOR:
            raise PreconditionError("polarization class must lie in the open positive cone")


def _check(L: PolarizedLattice, *sheaves: SheafClass) -> None:
    for s in sheaves:
        if s.c1.dim != L.dim:
            raise DimensionMismatch(f"c1 has length {s.c1.dim}, lattice dim {L.dim}")


def slope(L: PolarizedLattice, E: SheafClass, P: Polarization) -> Fraction:
    _check(L, E)
    return L.pair(E.c1, P.hclass) / E.rank


def discriminant(L: PolarizedLattice, E: SheafClass) -> Fraction:
    """((r-1)/2r) (c1.c1) - c2h."""
    _check(L, E)
    r = E.rank
    return Fraction(r - 1, 2 * r) * L.square(E.c1) - E.c2h


def d_class(F: SheafClass, E: SheafClass) -> NSClass:
    """c1(F)/rk F - c1(E)/rk E."""
    return F.c1.scale(Fraction(1, F.rank)) - E.c1.scale(Fraction(1, E.rank))


def compose_extension(L: PolarizedLattice, S: SheafClass, Q: SheafClass) -> SheafClass:
    """Numerical class of the middle term of 0 -> S -> E -> Q -> 0."""
    _check(L, S, Q)
    return SheafClass(S.rank + Q.rank, S.c1 + Q.c1, S.c2h + Q.c2h + L.pair(S.c1, Q.c1))


def quotient_class(L: PolarizedLattice, F: SheafClass, G: SheafClass) -> SheafClass:
    """Inverse of :func:`compose_extension`: the class of G/F for F inside G."""
    _check(L, F, G)
    if G.rank <= F.rank:
        raise PreconditionError(f"quotient of rank {G.rank} by rank {F.rank} is not of positive rank")
    c1q = G.c1 - F.c1
    return SheafClass(G.rank - F.rank, c1q, G.c2h - F.c2h - L.pair(F.c1, c1q))


@dataclass(frozen=True)
class IdentityCertificate:
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {"lhs": fmt(self.lhs), "rhs": fmt(self.rhs), "holds": self.holds}


def extension_cross_term(L: PolarizedLattice, S: SheafClass, E: SheafClass, Q: SheafClass) -> Fraction:
    return Fraction(E.rank * S.rank, 2 * Q.rank) * L.square(d_class(S, E))


def verify_identity_2_1(L: PolarizedLattice, S: SheafClass, Q: SheafClass) -> IdentityCertificate:
    """delta(E) = delta(S) + delta(Q) + (rE rS / 2 rQ) (d(S,E)^2) for E the extension."""
    E = compose_extension(L, S, Q)
    lhs = discriminant(L, E)
    rhs = discriminant(L, S) + discriminant(L, Q) + extension_cross_term(L, S, E, Q)
    return IdentityCertificate(lhs, rhs)


@dataclass(frozen=True)
class InequalityCheck:
    applicable: bool
    holds: bool | None
    lhs: Fraction | None = None
    rhs: Fraction | None = None

    def to_json(self) -> dict:
        out = {"applicable": self.applicable, "holds": self.holds}
        if self.lhs is not None:
            out.update(lhs=fmt(self.lhs), rhs=fmt(self.rhs))
        return out


def inequality_2_2_check(L: PolarizedLattice, S: SheafClass, Q: SheafClass) -> InequalityCheck:
    """delta(E) <= delta(S) + delta(Q) + (rE(rE-1)/2) d(S,E)^2, when d(S,E)^2 >= 0."""
    E = compose_extension(L, S, Q)
    dsq = L.square(d_class(S, E))
    if dsq < 0:
        return InequalityCheck(False, None)
    lhs = discriminant(L, E)
    rhs = discriminant(L, S) + discriminant(L, Q) + Fraction(E.rank * (E.rank - 1), 2) * dsq
    return InequalityCheck(True, lhs <= rhs, lhs, rhs)


def exterior_power(L: PolarizedLattice, E: SheafClass, p: int) -> SheafClass:
    """Numerical p-th exterior power.

    rank C(r,p), c1 = C(r-1,p-1) c1(E), and c2h chosen so that
    delta = C(r-2,p-1) delta(E).
    """
    r = E.rank
    if not 0 < p < r:
        raise PreconditionError(f"need 0 < p < rank, got p={p}, rank={r}")
    R = comb(r, p)
    c1 = E.c1.scale(comb(r - 1, p - 1))
    target = comb(r - 2, p - 1) * discriminant(L, E)
    c2h = Fraction(R - 1, 2 * R) * L.square(c1) - target
    return SheafClass(R, c1, c2h)


class Verdict(str, enum.Enum):
    DESTABILIZED = "destabilized"
    STABLE_RELATIVE = "strictly-stable-relative-to-candidates"
    SEMISTABLE_RELATIVE = "semistable-relative-to-candidates"
    VACUOUS = "vacuous"


@dataclass(frozen=True)
class SemistabilityReport:
    verdict: Verdict
    slope: Fraction
    extremal_index: int | None = None
    extremal_slope: Fraction | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value, "slope": fmt(self.slope)}
        if self.extremal_index is not None:
            out.update(extremal_index=self.extremal_index, extremal_slope=fmt(self.extremal_slope))
        return out


def semistability_report(
    L: PolarizedLattice, E: SheafClass, candidates: Sequence[SheafClass], P: Polarization
) -> SemistabilityReport:
    """Compare the slope of E with user-supplied candidate subobjects.

    The verdict only speaks about the given candidates. The extremal
    candidate is the one of largest slope (first in input order on ties).
    """
    mu = slope(L, E, P)
    if not candidates:
        return SemistabilityReport(Verdict.VACUOUS, mu)
    slopes = [slope(L, F, P) for F in candidates]
    best = max(range(len(slopes)), key=lambda i: (slopes[i], -i))
    top = slopes[best]
    if top > mu:
        verdict = Verdict.DESTABILIZED
    elif top < mu:
        verdict = Verdict.STABLE_RELATIVE
    else:
        verdict = Verdict.SEMISTABLE_RELATIVE
    return SemistabilityReport(verdict, mu, best, top)
