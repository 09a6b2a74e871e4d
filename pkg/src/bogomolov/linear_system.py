"""Degrees of the singular locus of a complete linear system.

A :class:`ChernProfile` stores ``t[i] = (c_{d-i}(Omega^1_X) . H^i)`` for
``i = 0..d``; every degree formula here is linear in ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import PreconditionError, SchemaError
from .rational import fmt, fmt_vector, parse_vector


@dataclass(frozen=True)
class ChernProfile:
    d: int
    t: tuple[Fraction, ...]
    components: int = 1
    # user assertion that H is sufficiently ample; not checkable numerically
    sufficiently_ample: bool | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(Fraction(x) for x in self.t))
        if self.d < 1:
            raise PreconditionError(f"dimension must be positive, got {self.d}")
        if len(self.t) != self.d + 1:
            raise PreconditionError(f"t must have length d+1 = {self.d + 1}, got {len(self.t)}")
        if self.components < 1:
            raise PreconditionError("components must be positive")

    def to_json(self) -> dict:
        out = {"d": self.d, "t": fmt_vector(self.t), "components": self.components}
        if self.sufficiently_ample is not None:
            out["sufficiently_ample"] = self.sufficiently_ample
        return out

    @classmethod
    def from_json(cls, obj) -> "ChernProfile":
        if not isinstance(obj, dict):
            raise SchemaError("Chern profile must be an object")
        try:
            d, t = obj["d"], parse_vector(obj["t"])
        except KeyError as exc:
            raise SchemaError(f"Chern profile missing {exc}") from None
        if not isinstance(d, int) or isinstance(d, bool):
            raise SchemaError("d must be an integer")
        if len(t) != d + 1:
            raise SchemaError(f"t must have length d+1 = {d + 1}")
        return cls(d, t, obj.get("components", 1), obj.get("sufficiently_ample"))

    @classmethod
    def projective_plane(cls, m: int) -> "ChernProfile":
        """P^2 polarized by m times a line: c(Omega) = 1 - 3h + 3h^2."""
        return cls(2, (3, -3 * m, m * m))


def sing_degree(cp: ChernProfile) -> Fraction:
    return sum(((i + 1) * ti for i, ti in enumerate(cp.t)), Fraction(0))


def hyperplane_euler_term(cp: ChernProfile) -> Fraction:
    """c_{d-1}(Omega^1) of a general member, sum_{i>=1} t[i]."""
    return sum(cp.t[1:], Fraction(0))


def base_locus_euler_term(cp: ChernProfile) -> Fraction:
    """c_{d-2}(Omega^1) of the pencil's base locus, sum_{i>=2} (i-1) t[i]."""
    return sum(((i - 1) * cp.t[i] for i in range(2, cp.d + 1)), Fraction(0))


@dataclass(frozen=True)
class PencilCertificate:
    degree: Fraction
    top_term: Fraction
    base_term: Fraction
    member_term: Fraction

    @property
    def decomposition(self) -> Fraction:
        return self.top_term + self.base_term + 2 * self.member_term

    @property
    def holds(self) -> bool:
        return self.degree == self.decomposition

    def to_json(self) -> dict:
        return {
            "degree": fmt(self.degree),
            "top_term": fmt(self.top_term),
            "base_term": fmt(self.base_term),
            "member_term": fmt(self.member_term),
            "decomposition": fmt(self.decomposition),
            "holds": self.holds,
        }


def pencil_decomposition_check(cp: ChernProfile) -> PencilCertificate:
    if cp.d < 2:
        raise PreconditionError("pencil decomposition needs d >= 2")
    return PencilCertificate(
        sing_degree(cp), cp.t[0], base_locus_euler_term(cp), hyperplane_euler_term(cp)
    )


def zm_degree_bound(cp: ChernProfile, m: int, s: int = 0) -> Fraction:
    """Degree bound for singular members of |mH| plus those through s points."""
    if m < 1 or s < 0:
        raise PreconditionError("need m >= 1 and s >= 0")
    return sum(((i + 1) * ti * m**i for i, ti in enumerate(cp.t)), Fraction(0)) + s


def component_sum(profiles: Sequence[ChernProfile]) -> ChernProfile:
    if not profiles:
        raise PreconditionError("component_sum needs at least one profile")
    d = profiles[0].d
    if any(p.d != d for p in profiles):
        raise PreconditionError("profiles of mixed dimensions")
    t = tuple(sum((p.t[i] for p in profiles), Fraction(0)) for i in range(d + 1))
    return ChernProfile(d, t, sum(p.components for p in profiles))


def degree_warnings(value: Fraction) -> list[str]:
    if Fraction(value).denominator != 1:
        return [f"non-integral degree {fmt(value)}: input is not geometric"]
    return []
