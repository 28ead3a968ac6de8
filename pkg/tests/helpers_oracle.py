"""Independent sympy oracle for tangent-space ranks and membership.

Rebuilds the generator matrices with sympy polynomial arithmetic and
ranks them with sympy's rational linear algebra, sharing no code with
the package beyond reading germ components as text.  Used to cross-check
the production builder on the germs the test suite cares most about.
"""

from __future__ import annotations

from itertools import product

import sympy as sp

XI, T = sp.symbols("xi t")


def parse_component(text: str) -> sp.Expr:
    """Read the package's canonical text form into a sympy expression.

    Terms are joined by " + " and factors inside a term by single spaces,
    e.g. "-1/2 xi^2 t + 1 t^3".
    """
    cleaned = text.replace(" + ", "+").replace(" ", "*").replace("^", "**")
    return sp.sympify(cleaned or "0", locals={"xi": XI, "t": T})


def _truncate(expr: sp.Expr, order: int) -> sp.Poly:
    poly = sp.Poly(sp.expand(expr), XI, T)
    kept = {
        monom: coeff
        for monom, coeff in poly.terms()
        if sum(monom) <= order
    }
    return sp.Poly.from_dict(kept, XI, T) if kept else sp.Poly(0, XI, T)


def _source_monomials(order: int, min_degree: int = 0):
    for i, j in product(range(order + 1), repeat=2):
        if min_degree <= i + j <= order:
            yield i, j


def _flatten(triple, monomials, order) -> list:
    row = []
    for expr in triple:
        poly = _truncate(expr, order)
        table = dict(poly.terms())
        for monom in monomials:
            row.append(table.get(monom, sp.Integer(0)))
    return row


def tangent_rows(
    comps: list[sp.Expr],
    order: int,
    kind: str = "A-star",
    reduced: bool = False,
    source_min_degree: int = 2,
) -> tuple[list[list], list[tuple[int, int]]]:
    """Generator matrix rows for the tangent space of a 3-component germ."""
    monomials = sorted(_source_monomials(order), key=lambda m: (m[0] + m[1], m))
    rows = []
    min_deg = source_min_degree if reduced else 0
    for var in (XI, T):
        partials = [sp.diff(c, var) for c in comps]
        for i, j in _source_monomials(order, min_deg):
            mono = XI**i * T**j
            rows.append(_flatten([mono * p for p in partials], monomials, order))

    if reduced:
        planar_sq = [
            m for m in product(range(order + 1), repeat=2) if 2 <= sum(m) <= order
        ]
        spatial_sq = [
            m for m in product(range(order + 1), repeat=3) if 2 <= sum(m) <= order
        ]
        slot_monomials = [
            [(0, 1)] + planar_sq,
            [(1, 0)] + planar_sq,
            [(1, 0, 0), (0, 1, 0)] + spatial_sq,
        ]
    elif kind == "A":
        spatial = [m for m in product(range(order + 1), repeat=3) if sum(m) <= order]
        slot_monomials = [spatial, spatial, spatial]
    else:
        planar = [m for m in product(range(order + 1), repeat=2) if sum(m) <= order]
        spatial = [m for m in product(range(order + 1), repeat=3) if sum(m) <= order]
        slot_monomials = [planar, planar, spatial]

    for slot, monos in enumerate(slot_monomials):
        for exponents in monos:
            pulled = sp.Integer(1)
            for comp, e in zip(comps, exponents):
                if e:
                    pulled = _truncate(pulled * comp**e, order).as_expr()
            triple = [sp.Integer(0)] * 3
            triple[slot] = pulled
            rows.append(_flatten(triple, monomials, order))
    return rows, monomials


def sympy_rank(
    comps: list[sp.Expr],
    order: int,
    kind: str = "A-star",
    reduced: bool = False,
    source_min_degree: int = 2,
) -> int:
    rows, _ = tangent_rows(comps, order, kind, reduced, source_min_degree)
    return sp.Matrix(rows).rank()


def sympy_contains(
    comps: list[sp.Expr],
    order: int,
    triple: list[sp.Expr],
    kind: str = "A-star",
    reduced: bool = False,
) -> bool:
    """Membership of a jet triple via augmented-rank comparison."""
    rows, monomials = tangent_rows(comps, order, kind, reduced)
    matrix = sp.Matrix(rows)
    base_rank = matrix.rank()
    extra = _flatten(triple, monomials, order)
    return sp.Matrix(rows + [extra]).rank() == base_rank
