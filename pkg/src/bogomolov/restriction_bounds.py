"""Effective thresholds ``m > X`` for restricting semistable sheaves to |mH|."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, floor
from typing import Sequence

from .errors import PreconditionError, SearchCapExceeded
from .hodge_lattice import PolarizedLattice
from .rational import fmt
from .sheaf_numerics import Polarization, SheafClass, discriminant, exterior_power, slope

DEFAULT_CAP = 10**6


class FormulaId(str, enum.Enum):
    FLENNER = "flenner"
    LEMMA_3_2 = "lemma_3_2"
    COROLLARY_3_3 = "corollary_3_3"
    THEOREM_3_1 = "theorem_3_1"


@dataclass(frozen=True)
class BoundReport:
    threshold: Fraction
    formula_id: FormulaId
    details: dict = field(default_factory=dict, compare=False)

    @property
    def minimal_m(self) -> int:
        # least positive integer strictly above the threshold
        return max(floor(self.threshold) + 1, 1)

    def to_json(self) -> dict:
        return {
            "formula_id": self.formula_id.value,
            "threshold": fmt(self.threshold),
            "minimal_m": self.minimal_m,
            **self.details,
        }


def flenner_lhs(d: int, m: int) -> Fraction:
    return Fraction(comb(d + m, m) - m - 1, m)


def flenner_bound(d: int, r: int, hd, cap: int = DEFAULT_CAP) -> BoundReport:
    """Least m with (C(d+m,m) - m - 1)/m > (H^d) max{(r^2-1)/4, 1}.

    ``threshold`` is reported as the largest failing integer (m - 1), so the
    usual ``minimal_m = floor(threshold) + 1`` relation still holds.
    """
    hd = Fraction(hd)
    if d < 2:
        raise PreconditionError(f"dimension must be at least 2, got {d}")
    if r < 1:
        raise PreconditionError(f"rank must be positive, got {r}")
    if hd <= 0:
        raise PreconditionError("(H^d) must be positive")
    rhs = hd * max(Fraction(r * r - 1, 4), Fraction(1))
    for m in range(1, cap + 1):
        lhs = flenner_lhs(d, m)
        if lhs > rhs:
            return BoundReport(Fraction(m - 1), FormulaId.FLENNER, {"lhs": fmt(lhs), "rhs": fmt(rhs)})
    raise SearchCapExceeded(f"no m <= {cap} satisfies the Flenner inequality")


def _require_nonpositive(delta: Fraction) -> None:
    if delta > 0:
        raise PreconditionError(
            f"discriminant {delta} > 0: the sheaf cannot be semistable, the bound is meaningless"
        )


def lemma_3_2_bound(L: PolarizedLattice, E: SheafClass) -> BoundReport:
    """m > -2 r delta(E), for stable E."""
    delta = discriminant(L, E)
    _require_nonpositive(delta)
    return BoundReport(-2 * E.rank * delta, FormulaId.LEMMA_3_2, {"delta": fmt(delta)})


def corollary_3_3_bound(
    L: PolarizedLattice,
    E: SheafClass,
    jh_factors: Sequence[SheafClass] | None = None,
    polarization: Polarization | None = None,
) -> BoundReport:
    """m > -2 rk(E) delta(E), for semistable E.

    With Jordan-Hölder factors supplied, also checks the domination step:
    delta(E) <= sum delta(Q_i), and each factor's own threshold
    -2 rk(Q_i) delta(Q_i) is at most the one for E.
    """
    delta = discriminant(L, E)
    _require_nonpositive(delta)
    threshold = -2 * E.rank * delta
    details: dict = {"delta": fmt(delta)}
    if jh_factors:
        if sum(q.rank for q in jh_factors) != E.rank:
            raise PreconditionError("Jordan-Hölder factor ranks do not add up to rk E")
        if polarization is not None:
            mu = slope(L, E, polarization)
            if any(slope(L, q, polarization) != mu for q in jh_factors):
                raise PreconditionError("Jordan-Hölder factors must have the slope of E")
        deltas = [discriminant(L, q) for q in jh_factors]
        factor_thresholds = [-2 * q.rank * dq for q, dq in zip(jh_factors, deltas)]
        details.update(
            factor_delta_sum=fmt(sum(deltas, Fraction(0))),
            delta_dominated=delta <= sum(deltas, Fraction(0)),
            factor_thresholds=[fmt(t) for t in factor_thresholds],
            factors_dominated=all(t <= threshold for t in factor_thresholds),
        )
    return BoundReport(threshold, FormulaId.COROLLARY_3_3, details)


def exterior_coefficient(r: int, p: int) -> int:
    """rk(wedge^p) * C(r-2, p-1) = C(r,p) C(r-2,p-1)."""
    return comb(r, p) * comb(r - 2, p - 1)


def theorem_3_1_closed_form(r: int, delta) -> Fraction:
    h = r // 2
    return -2 * exterior_coefficient(r, h) * Fraction(delta)


def theorem_3_1_enumeration(L: PolarizedLattice, E: SheafClass) -> tuple[Fraction, list[int]]:
    """max over 0<p<r of -2 rk(wedge^p E) delta(wedge^p E), and its argmax set."""
    values = {}
    for p in range(1, E.rank):
        W = exterior_power(L, E, p)
        values[p] = -2 * W.rank * discriminant(L, W)
    best = max(values.values())
    return best, [p for p, v in values.items() if v == best]


def theorem_3_1_bound(L: PolarizedLattice, E: SheafClass, reflexive: bool = True) -> BoundReport:
    if E.rank == 1:
        raise PreconditionError("rank 1 has no proper exterior powers")
    delta = discriminant(L, E)
    _require_nonpositive(delta)
    enum_value, argmax = theorem_3_1_enumeration(L, E)
    details = {"delta": fmt(delta), "argmax_p": argmax, "enumeration": fmt(enum_value)}
    if reflexive:
        closed = theorem_3_1_closed_form(E.rank, delta)
        details["closed_form"] = fmt(closed)
        if closed != enum_value:
            raise AssertionError(f"closed form {closed} disagrees with enumeration {enum_value}")
        return BoundReport(closed, FormulaId.THEOREM_3_1, details)
    return BoundReport(enum_value, FormulaId.THEOREM_3_1, details)


def max_coefficient_crosscheck(r: int) -> bool:
    """The largest C(r,p) C(r-2,p-1), 0<p<r, is attained at p = floor(r/2)."""
    if r < 2:
        raise PreconditionError("need r >= 2")
    coeffs = {p: exterior_coefficient(r, p) for p in range(1, r)}
    best = max(coeffs.values())
    return coeffs[r // 2] == best
