"""Tangent spaces to map-germ equivalence orbits, as exact row spaces.

For a germ f = (f1, f2, f3) from the plane to 3-space, the infinitesimal
deformations absorbed by coordinate changes come from two generator
families: reparameterizations of the source contribute multiples of the
partial derivatives of f, and coordinate changes of the target contribute
pullbacks of target functions placed componentwise.  The fibered
equivalence (target changes commuting with the projection
(x, y, z) -> (x, y)) restricts slots 1 and 2 to pullbacks of functions of
x, y only; the unrestricted equivalence allows x, y, z everywhere.

The reduced space used in jet-sufficiency steps keeps only source
multipliers of degree >= 2 (vector fields of positive order) and replaces
the full pullback module by M*: pullbacks of {y} + m^2 in slot 1,
{x} + m^2 in slot 2, and {x, y} + m^2 in slot 3.  The multiplier-degree
threshold is a configuration knob recorded in every verdict, since
different conventions for "positive order" exist; 2 is the default and
the one all shipped checks use.

Every space is truncated at a working order W <= cap - 1 (the cap-degree
terms of the derivatives of f are not trustworthy), flattened to exact
coefficient vectors in the global monomial order, and row-reduced with
the fraction-free elimination from linalg.  Identical inputs therefore
produce identical reduced matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from tanfam.jets import (
    SOURCE_VARS,
    TARGET_VARS,
    Exponents,
    MapGerm,
    TruncatedPoly,
    monomial_basis,
    monomial_text,
)
from tanfam.linalg import RowSpace

JetTriple = tuple[TruncatedPoly, TruncatedPoly, TruncatedPoly]

KIND_FIBERED = "A-star"
KIND_FULL = "A"


def _as_map_germ(f: "MapGerm | Sequence[TruncatedPoly]") -> MapGerm:
    germ = f if isinstance(f, MapGerm) else MapGerm(tuple(f))
    if germ.arity != 3:
        raise ValueError("tangent spaces are built for 3-component germs")
    return germ


def _resolve_order(germ: MapGerm, order: int | None) -> int:
    cap = germ.cap
    if order is None:
        order = cap - 1
    if not 1 <= order <= cap - 1:
        raise ValueError(
            f"working order must lie in 1..{cap - 1} (cap {cap} minus the "
            "derivative trust margin)"
        )
    return order


def _coerce_triple(vec: Sequence[TruncatedPoly], germ: MapGerm) -> JetTriple:
    triple = tuple(vec)
    if len(triple) != 3:
        raise ValueError(f"expected a 3-slot jet vector, got {len(triple)} slots")
    for comp in triple:
        if not isinstance(comp, TruncatedPoly):
            raise TypeError("jet vector slots must be TruncatedPoly")
        if comp.variables != germ.variables:
            raise ValueError("jet vector must live in the source variables of the germ")
    return triple  # type: ignore[return-value]


def flatten_triple(
    triple: Sequence[TruncatedPoly],
    monomials: Sequence[Exponents],
    caps: Sequence[int] | None = None,
) -> list[Fraction]:
    """Slot-major coefficient vector over the given monomial list.

    With caps = (p, q, r), entries of slot s above degree caps[s] are
    zeroed: flattening then computes in the quotient by the per-slot
    ideal blocks of the next degrees.
    """
    row: list[Fraction] = []
    for slot, comp in enumerate(triple):
        limit = None if caps is None else caps[slot]
        for md in monomials:
            if limit is not None and sum(md) > limit:
                row.append(Fraction(0))
            else:
                row.append(comp.coefficient(md))
    return row


def _monomial_poly(md: Exponents, cap: int) -> TruncatedPoly:
    return TruncatedPoly(SOURCE_VARS, cap, {md: 1})


def _pullback_rows(
    germ: MapGerm, slot_monomials: Sequence[Sequence[Exponents]]
) -> Iterator[tuple[str, JetTriple]]:
    cap = germ.cap
    comps = germ.components
    zero = TruncatedPoly.zero(SOURCE_VARS, cap)
    one = TruncatedPoly.constant(SOURCE_VARS, 1, cap)
    powers: list[list[TruncatedPoly]] = [[one] for _ in comps]

    def comp_power(i: int, n: int) -> TruncatedPoly:
        while len(powers[i]) <= n:
            powers[i].append(powers[i][-1] * comps[i])
        return powers[i][n]

    for slot, monomials in enumerate(slot_monomials):
        for md in monomials:
            pulled = one
            for i, e in enumerate(md):
                if e:
                    pulled = pulled * comp_power(i, e)
            placed = [zero, zero, zero]
            placed[slot] = pulled
            tag = f"slot{slot + 1} <- {monomial_text(md, TARGET_VARS[: len(md)])}"
            yield tag, (placed[0], placed[1], placed[2])


def _source_rows(
    germ: MapGerm, order: int, min_multiplier_degree: int
) -> Iterator[tuple[str, JetTriple]]:
    cap = germ.cap
    for name in SOURCE_VARS:
        partial = tuple(c.derive(name) for c in germ.components)
        for md in monomial_basis(2, min_multiplier_degree, order):
            mono = _monomial_poly(md, cap)
            tag = f"d{name} * {monomial_text(md, SOURCE_VARS)}"
            yield tag, tuple(mono * p for p in partial)  # type: ignore[misc]


def extended_generators(
    f: "MapGerm | Sequence[TruncatedPoly]",
    order: int | None = None,
    kind: str = KIND_FIBERED,
) -> Iterator[tuple[str, JetTriple]]:
    """Generator rows of the extended tangent space, with provenance tags."""
    germ = _as_map_germ(f)
    order = _resolve_order(germ, order)
    if kind not in (KIND_FIBERED, KIND_FULL):
        raise ValueError(f"kind must be {KIND_FIBERED!r} or {KIND_FULL!r}, got {kind!r}")
    planar = monomial_basis(2, 0, order)
    spatial = monomial_basis(3, 0, order)
    if kind == KIND_FULL:
        slots = (spatial, spatial, spatial)
    else:
        slots = (planar, planar, spatial)
    yield from _source_rows(germ, order, 0)
    yield from _pullback_rows(germ, slots)


def reduced_generators(
    f: "MapGerm | Sequence[TruncatedPoly]",
    order: int | None = None,
    source_min_degree: int = 2,
) -> Iterator[tuple[str, JetTriple]]:
    """Generator rows of the reduced tangent space, with provenance tags."""
    germ = _as_map_germ(f)
    order = _resolve_order(germ, order)
    if source_min_degree < 1:
        raise ValueError("source_min_degree must be >= 1 for a reduced space")
    planar_sq = monomial_basis(2, 2, order)
    spatial_sq = monomial_basis(3, 2, order)
    slots = (
        [(0, 1)] + planar_sq,          # {y} + m^2 in x, y
        [(1, 0)] + planar_sq,          # {x} + m^2 in x, y
        [(1, 0, 0), (0, 1, 0)] + spatial_sq,  # {x, y} + m^2 in x, y, z
    )
    yield from _source_rows(germ, order, source_min_degree)
    yield from _pullback_rows(germ, slots)


class TangentSpaceBasis:
    """Row-reduced span of tangent-space generators at a working order.

    Holds the flattening monomial list, the echelon row space, and one
    provenance tag per independent row (the generator that created it).
    """

    def __init__(
        self,
        kind: str,
        germ: MapGerm,
        order: int,
        monomials: Sequence[Exponents],
        space: RowSpace,
        provenance: Sequence[str],
        config: dict | None = None,
    ):
        self.kind = kind
        self.germ = germ
        self.order = order
        self.monomials = tuple(monomials)
        self._space = space
        self.provenance = tuple(provenance)
        self.config = dict(config or {})
        self._canonical: list[list[int]] | None = None
        self._truncations: dict[tuple[int, int, int], RowSpace] = {}

    @property
    def rank(self) -> int:
        return self._space.rank

    @property
    def dimension(self) -> int:
        """Dimension of the ambient truncated jet space (3 slots)."""
        return 3 * len(self.monomials)

    @property
    def codimension(self) -> int:
        return self.dimension - self.rank

    def canonical_matrix(self) -> list[list[int]]:
        if self._canonical is None:
            self._canonical = self._space.canonical_matrix()
        return [list(row) for row in self._canonical]

    def column_label(self, index: int) -> dict:
        """Map a flattened column index back to its slot and monomial."""
        count = len(self.monomials)
        md = self.monomials[index % count]
        return {"slot": index // count + 1, "monomial": monomial_text(md, SOURCE_VARS)}

    def _slot_degree_space(self, caps: tuple[int, int, int]) -> RowSpace:
        space = self._truncations.get(caps)
        if space is None:
            count = len(self.monomials)
            degrees = [sum(md) for md in self.monomials]
            space = RowSpace(self._space.width)
            for row in self.canonical_matrix():
                projected = [
                    0 if degrees[i % count] > caps[i // count] else value
                    for i, value in enumerate(row)
                ]
                space.add(projected)
            self._truncations[caps] = space
        return space

    def contains_row(
        self, row: Sequence[Fraction | int], caps: Sequence[int] | None = None
    ) -> bool:
        if caps is None:
            return self._space.contains(row)
        return self._slot_degree_space(tuple(caps)).contains(row)

    def contains(
        self, vec: Sequence[TruncatedPoly], caps: Sequence[int] | None = None
    ) -> bool:
        """Membership of a jet triple, optionally modulo per-slot degree caps."""
        triple = _coerce_triple(vec, self.germ)
        row = flatten_triple(triple, self.monomials, caps)
        return self.contains_row(row, caps)

    def augmented(self, vectors: Iterable[Sequence[TruncatedPoly]]) -> RowSpace:
        """A copy of the row space with extra jet triples added."""
        space = self._space.copy()
        for vec in vectors:
            space.add(flatten_triple(_coerce_triple(vec, self.germ), self.monomials))
        return space

    def to_verdict(self) -> dict:
        verdict = {
            "kind": self.kind,
            "order": self.order,
            "dimension": self.dimension,
            "rank": self.rank,
            "codimension": self.codimension,
            "germ": list(self.germ.to_texts()),
        }
        verdict.update(self.config)
        return verdict

    def __repr__(self) -> str:
        return (
            f"TangentSpaceBasis(kind={self.kind!r}, order={self.order}, "
            f"rank={self.rank}/{self.dimension})"
        )


def _assemble(
    kind: str,
    germ: MapGerm,
    order: int,
    rows: Iterable[tuple[str, JetTriple]],
    config: dict | None = None,
) -> TangentSpaceBasis:
    monomials = monomial_basis(2, 0, order)
    space = RowSpace(3 * len(monomials))
    provenance: list[str] = []
    for tag, triple in rows:
        if space.add(flatten_triple(triple, monomials)):
            provenance.append(tag)
    return TangentSpaceBasis(kind, germ, order, monomials, space, provenance, config)


def build_extended_tangent_space(
    f: "MapGerm | Sequence[TruncatedPoly]",
    order: int | None = None,
    kind: str = KIND_FIBERED,
) -> TangentSpaceBasis:
    """Extended tangent space: source multiples of the partials plus full
    componentwise pullbacks (fibered in slots 1-2 unless kind is "A")."""
    germ = _as_map_germ(f)
    order = _resolve_order(germ, order)
    rows = extended_generators(germ, order, kind)
    return _assemble(f"{kind}-extended", germ, order, rows)


def build_reduced_tangent_space(
    f: "MapGerm | Sequence[TruncatedPoly]",
    order: int | None = None,
    source_min_degree: int = 2,
) -> TangentSpaceBasis:
    """Reduced tangent space: positive-order source part plus the M* module."""
    germ = _as_map_germ(f)
    order = _resolve_order(germ, order)
    rows = reduced_generators(germ, order, source_min_degree)
    config = {"source_min_degree": source_min_degree}
    return _assemble(f"{KIND_FIBERED}-reduced", germ, order, rows, config)


@dataclass(frozen=True)
class BlockCheck:
    """Outcome of an ideal-block containment test, certified at finite order.

    holds means every slotwise monomial of degree >= the block threshold
    (up to the working order) lies in the span; the certificate is only
    valid modulo degree modulo_degree = order + 1, which is recorded
    rather than silently assumed away.
    """

    holds: bool
    block: tuple[int, int, int]
    order: int
    modulo_degree: int
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "block": list(self.block),
            "order": self.order,
            "modulo_degree": self.modulo_degree,
            "witness": self.witness,
        }


def contains_ideal_block(
    basis: TangentSpaceBasis, p: int, q: int, r: int
) -> BlockCheck:
    """Does the span contain all slotwise monomials of degrees (>=p, >=q, >=r)?

    Checks every coordinate vector (mu, 0, 0) with deg mu in p..W, then
    (0, mu, 0) from q and (0, 0, mu) from r.  An empty degree range (block
    threshold above W) is vacuously satisfied.  On failure the first
    missing monomial is returned as a witness.
    """
    for threshold in (p, q, r):
        if threshold < 0:
            raise ValueError("block degrees must be non-negative")
    width = basis.dimension
    count = len(basis.monomials)
    for slot, threshold in enumerate((p, q, r)):
        for i, md in enumerate(basis.monomials):
            if sum(md) < threshold:
                continue
            row = [0] * width
            row[slot * count + i] = 1
            if not basis.contains_row(row):
                witness = {"slot": slot + 1, "monomial": monomial_text(md, SOURCE_VARS)}
                return BlockCheck(
                    False, (p, q, r), basis.order, basis.order + 1, witness
                )
    return BlockCheck(True, (p, q, r), basis.order, basis.order + 1, None)


def jet_sufficiency_step(
    f: "MapGerm | Sequence[TruncatedPoly]",
    perturbation: Sequence[TruncatedPoly],
    degrees: Sequence[int] | None = None,
    order: int | None = None,
    source_min_degree: int = 2,
) -> bool:
    """Can the perturbation be absorbed at its own jet level?

    True iff the perturbation lies in the reduced tangent space of f
    modulo the per-slot ideals of the next degree, i.e. membership after
    truncating every slot s at degrees[s].  When degrees is omitted each
    nonzero slot must be homogeneous and contributes its degree; zero
    slots are unconstrained and default to the working order.
    """
    germ = _as_map_germ(f)
    order = _resolve_order(germ, order)
    triple = _coerce_triple(perturbation, germ)
    if degrees is None:
        inferred: list[int] = []
        for slot, comp in enumerate(triple):
            slot_degrees = {sum(md) for md, _ in comp.terms()}
            if not slot_degrees:
                inferred.append(order)
            elif len(slot_degrees) == 1:
                inferred.append(slot_degrees.pop())
            else:
                raise ValueError(
                    f"slot {slot + 1} is not homogeneous; pass degrees explicitly"
                )
        degrees = inferred
    degrees = tuple(degrees)
    if len(degrees) != 3:
        raise ValueError("degrees must have one entry per slot")
    if any(d < 0 for d in degrees):
        raise ValueError("degrees must be non-negative")
    if max(degrees) > order:
        raise ValueError(
            f"slot degrees {degrees} exceed the working order {order}"
        )
    basis = build_reduced_tangent_space(germ, order, source_min_degree)
    return basis.contains(triple, caps=degrees)


def miniversality_check(
    f: "MapGerm | Sequence[TruncatedPoly]",
    complement: Sequence[Sequence[TruncatedPoly]],
    order: int | None = None,
    block: tuple[int, int, int] | None = (3, 5, 4),
    kind: str = KIND_FIBERED,
) -> dict:
    """Does the complement span the cokernel of the extended tangent space?

    Computes the codimension of the extended tangent space in the order-W
    jet space, then adds the complement rows.  spans is true iff every
    complement row enlarges the space (direct sum) and the result is the
    whole jet space.  The verdict records the ideal-block certificate
    (when a block is given) because the codimension count is meaningful
    above the working order only where the block guarantees saturation.
    Complement vectors already inside the span are reported as a
    non-direct sum, not raised.
    """
    germ = _as_map_germ(f)
    basis = build_extended_tangent_space(germ, order, kind)
    triples = [_coerce_triple(vec, germ) for vec in complement]
    block_check = contains_ideal_block(basis, *block) if block is not None else None

    space = basis._space.copy()
    inside: list[list[str]] = []
    added = 0
    for triple in triples:
        if space.add(flatten_triple(triple, basis.monomials)):
            added += 1
        else:
            inside.append([comp.to_text() for comp in triple])
    direct = added == len(triples)
    spans = direct and space.rank == basis.dimension

    defect: list[dict] = []
    if space.rank < basis.dimension:
        pivots = set(space.pivot_columns())
        defect = [
            basis.column_label(i) for i in range(basis.dimension) if i not in pivots
        ]

    verdict = basis.to_verdict()
    verdict.update(
        {
            "complement": [[c.to_text() for c in t] for t in triples],
            "complement_size": len(triples),
            "complement_added": added,
            "direct_sum": direct,
            "dependent_complement_vectors": inside,
            "spans": spans,
            "defect": defect,
            "certified_block": None if block is None else list(block),
            "block_holds": None if block_check is None else block_check.holds,
            "block_witness": None if block_check is None else block_check.witness,
            "modulo_degree": basis.order + 1,
        }
    )
    return verdict
