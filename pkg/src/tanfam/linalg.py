"""Fraction-free exact row reduction over the rationals.

Tangent-space computations reduce to rank and membership questions for
matrices whose entries are Fractions.  Everything here works on rows
rescaled to primitive integer vectors (multiply by the LCM of the
denominators, divide by the GCD, flip so the leading entry is positive),
which keeps the arithmetic in machine ints for the typical sizes and
makes the reduced form unique, hence byte-for-byte reproducible.

RowSpace is an incremental echelon basis: rows are added one at a time
and forward-reduced against the existing pivots (leftmost-column pivot
rule).  Rank, membership, and residuals are available at any point;
canonical_matrix() back-eliminates to the unique reduced echelon form.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

IntRow = list[int]


def primitive_row(row: Sequence[Fraction | int]) -> IntRow:
    """Rescale a rational row to a primitive integer row with positive lead."""
    fracs = [value if isinstance(value, Fraction) else Fraction(value) for value in row]
    denom = 1
    for value in fracs:
        denom = lcm(denom, value.denominator)
    ints = [int(value * denom) for value in fracs]
    common = 0
    for value in ints:
        common = gcd(common, value)
    if common > 1:
        ints = [value // common for value in ints]
    for value in ints:
        if value != 0:
            if value < 0:
                ints = [-w for w in ints]
            break
    return ints


def _pivot_index(row: IntRow) -> int:
    for j, value in enumerate(row):
        if value != 0:
            return j
    return -1


def _eliminate(row: IntRow, pivot_row: IntRow, col: int) -> IntRow:
    """Cross-multiply so row[col] becomes 0, keeping integer entries."""
    a = pivot_row[col]
    b = row[col]
    g = gcd(a, b)
    ra, rb = a // g, b // g
    return [ra * x - rb * p for x, p in zip(row, pivot_row)]


class RowSpace:
    """Incremental row space of integer-primitive vectors of fixed width."""

    def __init__(self, width: int):
        if width < 1:
            raise ValueError("width must be positive")
        self.width = width
        # Echelon rows keyed by pivot column; kept primitive.
        self._rows: dict[int, IntRow] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, row: IntRow) -> IntRow:
        current = row
        while True:
            col = _pivot_index(current)
            if col < 0:
                return current
            pivot_row = self._rows.get(col)
            if pivot_row is None:
                return current
            current = _eliminate(current, pivot_row, col)

    def add(self, row: Sequence[Fraction | int]) -> bool:
        """Insert a row; returns True iff it enlarged the space."""
        if len(row) != self.width:
            raise ValueError(f"row has width {len(row)}, expected {self.width}")
        reduced = self._reduce(primitive_row(row))
        col = _pivot_index(reduced)
        if col < 0:
            return False
        self._rows[col] = primitive_row(reduced)
        return True

    def extend(self, rows: Iterable[Sequence[Fraction | int]]) -> int:
        """Insert many rows; returns how many enlarged the space."""
        return sum(1 for row in rows if self.add(row))

    def contains(self, row: Sequence[Fraction | int]) -> bool:
        if len(row) != self.width:
            raise ValueError(f"row has width {len(row)}, expected {self.width}")
        return _pivot_index(self._reduce(primitive_row(row))) < 0

    def residual(self, row: Sequence[Fraction | int]) -> IntRow:
        """The part of row outside the space (primitive; all zeros if inside)."""
        if len(row) != self.width:
            raise ValueError(f"row has width {len(row)}, expected {self.width}")
        return primitive_row(self._reduce(primitive_row(row)))

    def pivot_columns(self) -> list[int]:
        return sorted(self._rows)

    def canonical_matrix(self) -> list[IntRow]:
        """Unique reduced echelon form: back-eliminated, primitive rows."""
        cols = sorted(self._rows)
        rows = [list(self._rows[c]) for c in cols]
        for i in range(len(rows) - 1, -1, -1):
            col = cols[i]
            for k in range(i):
                if rows[k][col] != 0:
                    rows[k] = _eliminate(rows[k], rows[i], col)
        return [primitive_row(r) for r in rows]

    def copy(self) -> "RowSpace":
        clone = RowSpace(self.width)
        clone._rows = {c: list(r) for c, r in self._rows.items()}
        return clone


def matrix_rank(rows: Iterable[Sequence[Fraction | int]], width: int) -> int:
    space = RowSpace(width)
    space.extend(rows)
    return space.rank
