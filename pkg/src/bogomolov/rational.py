"""Lossless rational (de)serialization and small exact linear algebra helpers."""

from __future__ import annotations

import re
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import SchemaError

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Parse an int or a ``"p/q"`` / ``"p"`` string. Floats are refused."""
    if isinstance(value, bool):
        raise SchemaError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise SchemaError(f"malformed rational: {value!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise SchemaError(f"zero denominator: {value!r}")
        return Fraction(num, den)
    raise SchemaError(f"not a rational: {value!r}")


def parse_vector(values) -> tuple[Fraction, ...]:
    if not isinstance(values, (list, tuple)):
        raise SchemaError(f"expected a list of rationals, got {values!r}")
    return tuple(parse_rational(v) for v in values)


def parse_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(rows, (list, tuple)) or not rows:
        raise SchemaError("expected a non-empty list of rows")
    return tuple(parse_vector(r) for r in rows)


def fmt(x: Fraction | int) -> str:
    """Canonical string form: lowest terms, positive denominator."""
    return str(Fraction(x))


def fmt_vector(v: Iterable) -> list[str]:
    return [fmt(x) for x in v]


def fmt_matrix(m: Iterable[Iterable]) -> list[list[str]]:
    return [fmt_vector(r) for r in m]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def clear_denominators(row: Sequence[Fraction]) -> list[int]:
    """Scale a rational row by the lcm of its denominators."""
    den = 1
    for x in row:
        den = lcm(den, Fraction(x).denominator)
    return [int(Fraction(x) * den) for x in row]


_BIG_PRIME = (1 << 61) - 1


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        pr = m[rank]
        for i in range(rank + 1, len(m)):
            f = m[i][col]
            if f:
                f = f * inv % p
                m[i] = [(a - f * b) % p for a, b in zip(m[i], pr)]
        rank += 1
    return rank


def _rank_bareiss(rows: list[list[int]]) -> int:
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, nrows):
            f = m[i][col]
            m[i] = [(p * a - f * b) // prev for a, b in zip(m[i], m[rank])]
        prev = p
        rank += 1
    return rank


def exact_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a rational matrix.

    Rows are cleared to integers. Full rank modulo a large prime certifies
    full rank over Q; otherwise fraction-free elimination decides.
    """
    rows = [clear_denominators(r) for r in matrix]
    if not rows:
        return 0
    full = min(len(rows), len(rows[0]))
    if _rank_mod_p(rows, _BIG_PRIME) == full:
        return full
    return _rank_bareiss(rows)


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve a square nonsingular system by Gauss-Jordan over Q."""
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [row[n] for row in aug]
