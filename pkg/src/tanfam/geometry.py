"""Float-side geometry: criminant tracing, envelopes, lifts, deformations.

Everything upstream of this module is exact rational arithmetic; here the
polynomial coefficients cross over into numpy double precision once, and
all further work (grid evaluation, zero-curve extraction, cusp counting)
is plain numerics.  The split keeps the algebraic verdicts exact while
pictures and counts stay cheap.

The criminant of a planar map (the source-side critical curve of the
projection restricted to the graph surface) is traced with marching
squares on the Jacobian determinant, with a node-repair pass on top.
Plain marching squares cannot represent a curve crossing: an X-node
either lands in an ambiguous cell (where any local resolution splits the
two analytic branches into hyperbola-like mixed halves) or, when the
branch slopes conspire, in ordinary cells that silently weld the halves
into V-shaped kinks.  Both artifacts are repaired the same way: after
chain assembly, interior turns sharper than 35 degrees are cut, the
loose ends (cut points plus the crossing points bordering ambiguous
cells) are clustered within two cell diagonals, and each cluster is
re-spliced in the pairing with the least total turning.  Criminants in
this territory are unions of smooth curves, so sharp polyline turns are
always tracing artifacts, never features.  Downstream branch counts and
per-branch fits rely on this repair.

Cusp detection uses the kernel line of the Jacobian along the criminant:
the envelope has a cusp where that line turns tangent to the criminant.
The signed angle between the two lines is tracked along each polyline
and a cusp is counted at each sign crossing (and at direct dips below
the angle tolerance), with consecutive detections clustered so one
geometric cusp is never counted twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial.polynomial import polyval2d

from tanfam.jets import MapGerm, TruncatedPoly

DEFAULT_RESOLUTION = 512
CHART_EPSILON = 1e-8
CUSP_ANGLE_DEGREES = 2.0
MODE_VERSAL = "versal"
MODE_BEAKS = "beaks"

# Guard against wrap-around of the kernel/tangent line angle (which lives
# mod 180 degrees): a sign change only counts as a tangency crossing when
# both samples are already this close to alignment.
_CROSSING_GUARD_DEGREES = 30.0


@dataclass(frozen=True)
class GridSpec:
    """Sampling rectangle in the source plane with per-axis resolutions.

    resolution counts samples per axis (so a 4x4 grid has 16 samples and
    9 cells).  Axis order is (xi, t) throughout.
    """

    xi_min: float = -1.0
    xi_max: float = 1.0
    t_min: float = -1.0
    t_max: float = 1.0
    resolution_xi: int = DEFAULT_RESOLUTION
    resolution_t: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        if not (self.xi_min < self.xi_max and self.t_min < self.t_max):
            raise ValueError("grid rectangle is degenerate")
        if self.resolution_xi < 2 or self.resolution_t < 2:
            raise ValueError("grid needs at least 2 samples per axis")

    @classmethod
    def square(cls, half_width: float = 1.0, resolution: int = DEFAULT_RESOLUTION) -> "GridSpec":
        return cls(-half_width, half_width, -half_width, half_width, resolution, resolution)

    def xi_samples(self) -> np.ndarray:
        return np.linspace(self.xi_min, self.xi_max, self.resolution_xi)

    def t_samples(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.resolution_t)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xi_samples(), self.t_samples(), indexing="ij")

    def cell_diagonal(self) -> float:
        dx = (self.xi_max - self.xi_min) / (self.resolution_xi - 1)
        dt = (self.t_max - self.t_min) / (self.resolution_t - 1)
        return math.hypot(dx, dt)

    def to_json(self) -> dict:
        return {
            "domain": [[self.xi_min, self.xi_max], [self.t_min, self.t_max]],
            "resolution": [self.resolution_xi, self.resolution_t],
        }


@dataclass(frozen=True)
class Branch:
    """One traced polyline with a stable tag; points are (xi, t) or (x, y)."""

    points: tuple[tuple[float, float], ...]
    tag: str
    closed: bool = False

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("a branch needs at least 2 points")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)


@dataclass(frozen=True)
class PlaneCurveSet:
    branches: tuple[Branch, ...] = ()
    cusps: tuple[tuple[float, float], ...] = ()

    @property
    def branch_count(self) -> int:
        return len(self.branches)

    def to_json(self) -> dict:
        return {
            "branches": [
                {"tag": b.tag, "closed": b.closed, "points": len(b.points)}
                for b in self.branches
            ],
            "cusps": [list(p) for p in self.cusps],
        }


@dataclass(frozen=True)
class DeformationParams:
    lam: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0

    def __post_init__(self) -> None:
        for name in ("lam", "mu1", "mu2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"deformation parameter {name} must be finite")

    def to_json(self) -> dict:
        return {"lambda": self.lam, "mu1": self.mu1, "mu2": self.mu2}


def coefficient_array(p: TruncatedPoly) -> np.ndarray:
    """Dense float coefficient grid c[i, j] for xi^i t^j, polyval2d layout."""
    c = np.zeros((p.cap + 1, p.cap + 1))
    for (e_xi, e_t), value in p.terms():
        c[e_xi, e_t] = float(value)
    return c


def _derive_array(c: np.ndarray, axis: int) -> np.ndarray:
    """d/d(xi) for axis 0, d/dt for axis 1, on a polyval2d coefficient grid."""
    n = c.shape[axis]
    if n <= 1:
        return np.zeros_like(c)
    factors = np.arange(1, n)
    if axis == 0:
        return c[1:, :] * factors[:, None]
    return c[:, 1:] * factors[None, :]


class PlanarMap:
    """A planar polynomial map with vectorized evaluation and Jacobian data.

    Coefficients are plain float arrays, so deformations with float
    parameters fit here even though they leave exact-jet land.
    """

    def __init__(self, c1: np.ndarray, c2: np.ndarray):
        self.c1 = np.asarray(c1, dtype=float)
        self.c2 = np.asarray(c2, dtype=float)
        self._d1_xi = _derive_array(self.c1, 0)
        self._d1_t = _derive_array(self.c1, 1)
        self._d2_xi = _derive_array(self.c2, 0)
        self._d2_t = _derive_array(self.c2, 1)

    @classmethod
    def from_polys(cls, p1: TruncatedPoly, p2: TruncatedPoly) -> "PlanarMap":
        return cls(coefficient_array(p1), coefficient_array(p2))

    @classmethod
    def from_germ(cls, germ: MapGerm) -> "PlanarMap":
        flat = germ.planar_projection()
        return cls.from_polys(flat[0], flat[1])

    def __call__(self, xi, t) -> tuple[np.ndarray, np.ndarray]:
        return polyval2d(xi, t, self.c1), polyval2d(xi, t, self.c2)

    def jacobian(self, xi, t) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Entries (d x/d xi, d x/d t, d y/d xi, d y/d t) at the samples."""
        return (
            polyval2d(xi, t, self._d1_xi),
            polyval2d(xi, t, self._d1_t),
            polyval2d(xi, t, self._d2_xi),
            polyval2d(xi, t, self._d2_t),
        )

    def det(self, xi, t) -> np.ndarray:
        j11, j12, j21, j22 = self.jacobian(xi, t)
        return j11 * j22 - j12 * j21


def as_planar_map(target) -> PlanarMap:
    """Accept a MapGerm, a pair of jets, a PlanarMap or a DeformedMap."""
    if isinstance(target, PlanarMap):
        return target
    if isinstance(target, DeformedMap):
        return target.planar
    if isinstance(target, MapGerm):
        return PlanarMap.from_germ(target)
    if isinstance(target, Sequence) and len(target) >= 2:
        first = target[0]
        if isinstance(first, TruncatedPoly):
            return PlanarMap.from_polys(target[0], target[1])
    raise TypeError(f"cannot interpret {type(target).__name__} as a planar map")


def jacobian_det(f) -> tuple[TruncatedPoly, Callable]:
    """Exact Jacobian determinant of a planar jet map, plus a float evaluator.

    The exact form multiplies first derivatives, so it is trustworthy up
    to one degree below the cap of the inputs.  Three-component germs are
    projected to their first two components first.
    """
    if isinstance(f, MapGerm):
        f = f.planar_projection().components
    p1, p2 = f[0], f[1]
    det = p1.derive("xi") * p2.derive("t") - p1.derive("t") * p2.derive("xi")
    planar = PlanarMap.from_polys(p1, p2)
    return det, planar.det


@dataclass(frozen=True, eq=False)
class DeformedMap:
    """A 3-component map deformed with float parameters.

    Modes: "versal" adds (mu1 * z, lam * t + mu2 * z, 0) with z read off as
    the third component of the base; "beaks" allows only the lam * t term,
    the deformation that keeps the projection direction fixed.
    """

    base: MapGerm
    params: DeformationParams
    mode: str
    c1: np.ndarray = field(repr=False)
    c2: np.ndarray = field(repr=False)
    c3: np.ndarray = field(repr=False)

    @property
    def planar(self) -> PlanarMap:
        return PlanarMap(self.c1, self.c2)

    def to_json(self) -> dict:
        return {"mode": self.mode, "params": self.params.to_json()}


def apply_deformation(
    base: MapGerm, params: DeformationParams, mode: str = MODE_VERSAL
) -> DeformedMap:
    if base.arity != 3:
        raise ValueError("deformations act on 3-component germs")
    if mode not in (MODE_VERSAL, MODE_BEAKS):
        raise ValueError(f"mode must be '{MODE_VERSAL}' or '{MODE_BEAKS}', got {mode!r}")
    if mode == MODE_BEAKS and (params.mu1 != 0.0 or params.mu2 != 0.0):
        raise ValueError("the beaks deformation has mu1 = mu2 = 0")
    a1 = coefficient_array(base[0])
    a2 = coefficient_array(base[1])
    a3 = coefficient_array(base[2])
    c1 = a1 + params.mu1 * a3
    c2 = a2 + params.mu2 * a3
    c2[0, 1] += params.lam
    return DeformedMap(base=base, params=params, mode=mode, c1=c1, c2=c2, c3=a3)


# ----------------------------------------------------------------------
# Marching squares
# ----------------------------------------------------------------------

# Case index bits: 1 = corner (i, j), 2 = (i+1, j), 4 = (i+1, j+1),
# 8 = (i, j+1), set when the value there is >= 0.  Segment entries name
# the crossed cell edges: b(ottom) t = t_j, T(op) t = t_{j+1},
# l(eft) xi = xi_i, r(ight) xi = xi_{i+1}.
_CELL_SEGMENTS = {
    1: (("b", "l"),),
    2: (("b", "r"),),
    3: (("l", "r"),),
    4: (("r", "T"),),
    6: (("b", "T"),),
    7: (("l", "T"),),
    8: (("l", "T"),),
    9: (("b", "T"),),
    11: (("r", "T"),),
    12: (("l", "r"),),
    13: (("b", "r"),),
    14: (("b", "l"),),
}
_AMBIGUOUS = {5, 10}


def _global_edge(local: str, i: int, j: int) -> tuple:
    if local == "b":
        return ("x", i, j)
    if local == "T":
        return ("x", i, j + 1)
    if local == "l":
        return ("t", i, j)
    return ("t", i + 1, j)  # "r"


class _Tracer:
    def __init__(self, planar: PlanarMap, grid: GridSpec):
        self.planar = planar
        self.grid = grid
        self.xi = grid.xi_samples()
        self.t = grid.t_samples()
        mesh_xi, mesh_t = np.meshgrid(self.xi, self.t, indexing="ij")
        self.values = np.asarray(planar.det(mesh_xi, mesh_t), dtype=float)
        self._points: dict[tuple, tuple[float, float]] = {}

    def edge_point(self, edge: tuple) -> tuple[float, float]:
        cached = self._points.get(edge)
        if cached is not None:
            return cached
        kind, i, j = edge
        va = self.values[i, j]
        if kind == "x":
            vb = self.values[i + 1, j]
            s = va / (va - vb)
            point = (self.xi[i] + s * (self.xi[i + 1] - self.xi[i]), self.t[j])
        else:
            vb = self.values[i, j + 1]
            s = va / (va - vb)
            point = (self.xi[i], self.t[j] + s * (self.t[j + 1] - self.t[j]))
        self._points[edge] = point
        return point

    def march(self) -> tuple[list[tuple], set[tuple]]:
        """Collect segments cell by cell.

        Ambiguous cells (diagonal sign pattern) contribute no segments;
        their four crossed edges are returned instead, so the chains
        arriving there end in loose stubs for the re-splice pass.
        """
        signs = self.values >= 0.0
        case = (
            signs[:-1, :-1].astype(np.int8)
            + 2 * signs[1:, :-1]
            + 4 * signs[1:, 1:]
            + 8 * signs[:-1, 1:]
        )
        segments: list[tuple] = []
        junction_edges: set[tuple] = set()
        active = np.argwhere((case != 0) & (case != 15))
        for i, j in active:
            c = int(case[i, j])
            if c in _AMBIGUOUS:
                for local in ("b", "r", "T", "l"):
                    junction_edges.add(_global_edge(local, int(i), int(j)))
                continue
            for local_a, local_b in _CELL_SEGMENTS[c]:
                segments.append(
                    (_global_edge(local_a, int(i), int(j)), _global_edge(local_b, int(i), int(j)))
                )
        return segments, junction_edges


def _assemble(segments: Iterable[tuple]) -> list[tuple[list[tuple], bool]]:
    """Chain segments into polylines of edge ids, deterministically.

    Open chains start at the smallest odd-degree node; remaining cycles
    start at their smallest node.  At every step the smallest unvisited
    neighbor is taken, so the output depends only on the segment set.
    """
    adjacency: dict[tuple, list[tuple]] = {}
    unvisited: set[tuple[tuple, tuple]] = set()
    for a, b in segments:
        if a == b:
            continue
        key = (a, b) if a <= b else (b, a)
        if key in unvisited:
            continue
        unvisited.add(key)
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    for neighbors in adjacency.values():
        neighbors.sort()

    def walk(start: tuple) -> list[tuple]:
        path = [start]
        current = start
        while True:
            step = None
            for neighbor in adjacency[current]:
                key = (current, neighbor) if current <= neighbor else (neighbor, current)
                if key in unvisited:
                    step = (neighbor, key)
                    break
            if step is None:
                return path
            unvisited.remove(step[1])
            path.append(step[0])
            current = step[0]

    chains: list[tuple[list[tuple], bool]] = []
    odd_nodes = sorted(node for node, nb in adjacency.items() if len(nb) % 2 == 1)
    for node in odd_nodes:
        while any(
            ((node, n) if node <= n else (n, node)) in unvisited for n in adjacency[node]
        ):
            chains.append((walk(node), False))
    for node in sorted(adjacency):
        while any(
            ((node, n) if node <= n else (n, node)) in unvisited for n in adjacency[node]
        ):
            path = walk(node)
            closed = len(path) > 2 and path[0] == path[-1]
            chains.append((path, closed))
    return chains


_SHARP_TURN_DEGREES = 35.0
_SPLICE_RADIUS_CELLS = 2.0
_MAX_SPLICE_TURN_DEGREES = 90.0
_MAX_SPLICE_CLUSTER = 8


class _OpenCurve:
    """Mutable polyline during node repair; loose ends may be re-spliced."""

    __slots__ = ("points", "closed", "loose_start", "loose_end")

    def __init__(self, points, closed=False, loose_start=False, loose_end=False):
        self.points = list(points)
        self.closed = closed
        self.loose_start = loose_start
        self.loose_end = loose_end


def _turn_degrees(p0, p1, p2) -> float:
    v1 = (p1[0] - p0[0], p1[1] - p0[1])
    v2 = (p2[0] - p1[0], p2[1] - p1[1])
    n1 = math.hypot(*v1)
    n2 = math.hypot(*v2)
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    cos = (v1[0] * v2[0] + v1[1] * v2[1]) / (n1 * n2)
    return math.degrees(math.acos(max(-1.0, min(1.0, cos))))


def _cut_sharp_turns(curves: list[_OpenCurve]) -> list[_OpenCurve]:
    """Split polylines at interior turns sharper than the threshold.

    The split vertex stays on both pieces and both new ends become loose.
    Closed curves with a sharp turn are opened there first (a figure
    eight traced as one loop becomes two open arcs).
    """
    out: list[_OpenCurve] = []
    queue = list(curves)
    while queue:
        curve = queue.pop(0)
        pts = curve.points
        if curve.closed:
            sharp = None
            for k in range(1, len(pts) - 1):
                if _turn_degrees(pts[k - 1], pts[k], pts[k + 1]) > _SHARP_TURN_DEGREES:
                    sharp = k
                    break
            if sharp is None and len(pts) > 3:
                if _turn_degrees(pts[-2], pts[0], pts[1]) > _SHARP_TURN_DEGREES:
                    sharp = 0
            if sharp is None:
                out.append(curve)
                continue
            reopened = pts[sharp:-1] + pts[: sharp + 1]
            queue.append(_OpenCurve(reopened, loose_start=True, loose_end=True))
            continue
        cuts = [
            k
            for k in range(1, len(pts) - 1)
            if _turn_degrees(pts[k - 1], pts[k], pts[k + 1]) > _SHARP_TURN_DEGREES
        ]
        if not cuts:
            out.append(curve)
            continue
        bounds = [0] + cuts + [len(pts) - 1]
        for piece_index in range(len(bounds) - 1):
            lo, hi = bounds[piece_index], bounds[piece_index + 1]
            if hi - lo < 1:
                continue
            piece = _OpenCurve(
                pts[lo : hi + 1],
                loose_start=curve.loose_start if lo == 0 else True,
                loose_end=curve.loose_end if hi == len(pts) - 1 else True,
            )
            if len(piece.points) >= 2:
                out.append(piece)
    return out


def _end_point(curve: _OpenCurve, end: int):
    return curve.points[-1] if end else curve.points[0]


def _end_direction(curve: _OpenCurve, end: int):
    """Unit vector pointing out of the curve at the given end."""
    if end:
        tail, tip = curve.points[-2], curve.points[-1]
    else:
        tail, tip = curve.points[1], curve.points[0]
    vec = (tip[0] - tail[0], tip[1] - tail[1])
    norm = math.hypot(*vec)
    if norm == 0.0:
        return (0.0, 0.0)
    return (vec[0] / norm, vec[1] / norm)


def _splice_cost(curves, stub_a, stub_b):
    """(turning degrees, gap length) for joining two loose ends, or None."""
    da = _end_direction(curves[stub_a[0]], stub_a[1])
    db = _end_direction(curves[stub_b[0]], stub_b[1])
    cos = -(da[0] * db[0] + da[1] * db[1])
    turn = math.degrees(math.acos(max(-1.0, min(1.0, cos))))
    if turn > _MAX_SPLICE_TURN_DEGREES:
        return None
    pa = _end_point(curves[stub_a[0]], stub_a[1])
    pb = _end_point(curves[stub_b[0]], stub_b[1])
    return turn, math.hypot(pa[0] - pb[0], pa[1] - pb[1])


def _matchings(stubs: list) -> Iterable[list[tuple]]:
    """All pairings of the stubs; odd counts leave one stub out."""
    if len(stubs) <= 1:
        yield []
        return
    if len(stubs) % 2 == 1:
        for skip in range(len(stubs)):
            rest = stubs[:skip] + stubs[skip + 1 :]
            yield from _matchings(rest)
        return
    first, rest = stubs[0], stubs[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1 :]
        for sub in _matchings(remaining):
            yield [(first, partner)] + sub


def _cluster_stubs(curves: list[_OpenCurve], radius: float) -> list[list[tuple]]:
    stubs = []
    for index, curve in enumerate(curves):
        if curve.closed or len(curve.points) < 2:
            continue
        if curve.loose_start:
            stubs.append((index, 0))
        if curve.loose_end:
            stubs.append((index, 1))
    clusters: list[list[tuple]] = []
    for stub in stubs:
        point = _end_point(curves[stub[0]], stub[1])
        target = None
        for cluster_id, members in enumerate(clusters):
            for other in members:
                q = _end_point(curves[other[0]], other[1])
                if math.hypot(point[0] - q[0], point[1] - q[1]) <= radius:
                    target = cluster_id
                    break
            if target is not None:
                break
        if target is None:
            clusters.append([stub])
        else:
            clusters[target].append(stub)
    return [cluster for cluster in clusters if len(cluster) >= 2]


def _join(curves: list[_OpenCurve], joins: list[tuple]) -> list[_OpenCurve]:
    """Apply end-to-end joins, tracking curves through successive merges."""
    store: dict[int, _OpenCurve] = dict(enumerate(curves))
    owner: dict[tuple, tuple] = {}
    for index, curve in store.items():
        owner[(index, 0)] = (index, 0)
        owner[(index, 1)] = (index, 1)
    next_id = len(curves)
    for stub_a, stub_b in joins:
        id_a, end_a = owner[stub_a]
        id_b, end_b = owner[stub_b]
        if id_a == id_b:
            curve = store.pop(id_a)
            curve.points.append(curve.points[0])
            closed = _OpenCurve(curve.points, closed=True)
            store[next_id] = closed
            next_id += 1
            continue
        curve_a = store.pop(id_a)
        curve_b = store.pop(id_b)
        points_a = curve_a.points if end_a == 1 else curve_a.points[::-1]
        far_a = (
            (id_a, 0 if end_a == 1 else 1),
            curve_a.loose_start if end_a == 1 else curve_a.loose_end,
        )
        points_b = curve_b.points if end_b == 0 else curve_b.points[::-1]
        far_b = (
            (id_b, 1 if end_b == 0 else 0),
            curve_b.loose_end if end_b == 0 else curve_b.loose_start,
        )
        if points_a[-1] == points_b[0]:
            points_b = points_b[1:]
        merged = _OpenCurve(
            points_a + points_b, loose_start=far_a[1], loose_end=far_b[1]
        )
        store[next_id] = merged
        owner[far_a[0]] = (next_id, 0)
        owner[far_b[0]] = (next_id, 1)
        for original, (current_id, current_end) in list(owner.items()):
            if current_id == id_a:
                owner[original] = (next_id, 0)
            elif current_id == id_b:
                owner[original] = (next_id, 1)
        next_id += 1
    return [store[key] for key in sorted(store)]


def _repair_nodes(curves: list[_OpenCurve], radius: float) -> list[_OpenCurve]:
    curves = _cut_sharp_turns(curves)
    clusters = _cluster_stubs(curves, radius)
    joins: list[tuple] = []
    for cluster in sorted(clusters, key=lambda c: sorted(c)):
        if len(cluster) > _MAX_SPLICE_CLUSTER:
            continue
        best = None
        for matching in _matchings(sorted(cluster)):
            if not matching:
                continue
            turning = 0.0
            length = 0.0
            valid = True
            for stub_a, stub_b in matching:
                cost = _splice_cost(curves, stub_a, stub_b)
                if cost is None:
                    valid = False
                    break
                turning += cost[0]
                length += cost[1]
            if not valid:
                continue
            score = (-len(matching), round(turning, 6), round(length, 9), matching)
            if best is None or score < best:
                best = score
        if best is not None:
            joins.extend(best[3])
    if not joins:
        return curves
    return _join(curves, joins)


def trace_criminant(target, grid: GridSpec | None = None) -> PlaneCurveSet:
    """Zero curves of the Jacobian determinant in source coordinates.

    Branches are tagged "branch-0", "branch-1", ... in deterministic
    order.  An empty zero set gives an empty curve set.
    """
    grid = grid if grid is not None else GridSpec()
    tracer = _Tracer(as_planar_map(target), grid)
    segments, junction_edges = tracer.march()
    chains = _assemble(segments)
    curves = []
    for path, closed in chains:
        if len(path) < 2:
            continue
        curves.append(
            _OpenCurve(
                [tracer.edge_point(edge) for edge in path],
                closed=closed,
                loose_start=(not closed) and path[0] in junction_edges,
                loose_end=(not closed) and path[-1] in junction_edges,
            )
        )
    curves = _repair_nodes(curves, _SPLICE_RADIUS_CELLS * grid.cell_diagonal())
    branches = []
    for curve in curves:
        if len(curve.points) < 2:
            continue
        branches.append(
            Branch(
                points=tuple(curve.points),
                tag=f"branch-{len(branches)}",
                closed=curve.closed,
            )
        )
    return PlaneCurveSet(branches=tuple(branches))


def envelope_curves(target, criminant: PlaneCurveSet) -> PlaneCurveSet:
    """Image of the criminant under the planar map, tags preserved."""
    planar = as_planar_map(target)
    branches = []
    for branch in criminant.branches:
        pts = branch.as_array()
        x, y = planar(pts[:, 0], pts[:, 1])
        branches.append(
            Branch(
                points=tuple((float(px), float(py)) for px, py in zip(x, y)),
                tag=branch.tag,
                closed=branch.closed,
            )
        )
    cusps = []
    for xi, t in criminant.cusps:
        x, y = planar(xi, t)
        cusps.append((float(x), float(y)))
    return PlaneCurveSet(branches=tuple(branches), cusps=tuple(cusps))


# ----------------------------------------------------------------------
# Cusp detection
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CuspReport:
    count: int
    points: tuple[tuple[float, float], ...]
    curves: PlaneCurveSet
    grid: GridSpec
    angle_degrees: float

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "points": [list(p) for p in self.points],
            "grid": self.grid.to_json(),
            "angle_degrees": self.angle_degrees,
        }


def _line_angles_degrees(kernel: np.ndarray, tangent: np.ndarray) -> np.ndarray:
    """Signed angle between two line fields, folded into (-90, 90]."""
    cross = kernel[:, 0] * tangent[:, 1] - kernel[:, 1] * tangent[:, 0]
    dot = kernel[:, 0] * tangent[:, 0] + kernel[:, 1] * tangent[:, 1]
    angles = np.degrees(np.arctan2(cross, dot))
    angles = np.where(angles > 90.0, angles - 180.0, angles)
    angles = np.where(angles <= -90.0, angles + 180.0, angles)
    return angles


def _branch_cusps(
    branch: Branch, planar: PlanarMap, angle_degrees: float
) -> list[tuple[float, float]]:
    pts = branch.as_array()
    n = len(pts)
    if n < 3:
        return []
    tangent = np.empty_like(pts)
    tangent[1:-1] = pts[2:] - pts[:-2]
    tangent[0] = pts[1] - pts[0]
    tangent[-1] = pts[-1] - pts[-2]
    j11, j12, j21, j22 = planar.jacobian(pts[:, 0], pts[:, 1])
    row1 = np.stack([j11, j12], axis=1)
    row2 = np.stack([j21, j22], axis=1)
    use_row2 = np.linalg.norm(row2, axis=1) > np.linalg.norm(row1, axis=1)
    rows = np.where(use_row2[:, None], row2, row1)
    kernel = np.stack([-rows[:, 1], rows[:, 0]], axis=1)
    angles = _line_angles_degrees(kernel, tangent)

    candidates = set(np.nonzero(np.abs(angles) <= angle_degrees)[0].tolist())
    flips = np.nonzero(
        (angles[:-1] * angles[1:] < 0.0)
        & (np.abs(angles[:-1]) < _CROSSING_GUARD_DEGREES)
        & (np.abs(angles[1:]) < _CROSSING_GUARD_DEGREES)
    )[0]
    for k in flips.tolist():
        candidates.add(k if abs(angles[k]) <= abs(angles[k + 1]) else k + 1)
    if not candidates:
        return []
    ordered = sorted(candidates)
    clusters: list[list[int]] = [[ordered[0]]]
    for idx in ordered[1:]:
        if idx - clusters[-1][-1] <= 3:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    if branch.closed and len(clusters) > 1:
        if clusters[0][0] <= 3 and (n - 1) - clusters[-1][-1] <= 3:
            clusters[0] = clusters.pop() + clusters[0]
    cusps = []
    for cluster in clusters:
        best = min(cluster, key=lambda k: (abs(float(angles[k])), k))
        cusps.append((float(pts[best, 0]), float(pts[best, 1])))
    return cusps


def count_cusps(
    target,
    grid: GridSpec | None = None,
    criminant: PlaneCurveSet | None = None,
    angle_degrees: float = CUSP_ANGLE_DEGREES,
) -> CuspReport:
    """Count criminant points whose Jacobian kernel line turns tangent.

    These are exactly the points whose envelope image is a cusp.  Counts
    are resolution-dependent, so the report carries the grid spec.
    """
    grid = grid if grid is not None else GridSpec()
    planar = as_planar_map(target)
    if criminant is None:
        criminant = trace_criminant(planar, grid)
    points: list[tuple[float, float]] = []
    for branch in criminant.branches:
        points.extend(_branch_cusps(branch, planar, angle_degrees))
    curves = PlaneCurveSet(branches=criminant.branches, cusps=tuple(points))
    return CuspReport(
        count=len(points),
        points=tuple(points),
        curves=curves,
        grid=grid,
        angle_degrees=angle_degrees,
    )


# ----------------------------------------------------------------------
# Legendrian lift sampling
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LiftedSurface:
    """Grid samples of a family lift (x, y, slope) with chart bookkeeping.

    chart is 0 where the affine slope p = dy/dx is used, 1 where the
    reciprocal chart q = dx/dy took over, and invalid marks samples where
    both derivatives vanish (the curve is not immersed there).
    """

    grid: GridSpec
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    slope: np.ndarray = field(repr=False)
    chart: np.ndarray = field(repr=False)
    invalid: np.ndarray = field(repr=False)
    d_x: np.ndarray = field(repr=False)
    d_y: np.ndarray = field(repr=False)
    epsilon: float = CHART_EPSILON

    @property
    def invalid_count(self) -> int:
        return int(np.count_nonzero(self.invalid))

    def chart_coherence_error(self) -> float:
        """max |p*q - 1| over samples where both charts are evaluable."""
        both = (~self.invalid) & (self.d_x != 0.0) & (self.d_y != 0.0)
        if not np.any(both):
            return 0.0
        p = self.d_y[both] / self.d_x[both]
        q = self.d_x[both] / self.d_y[both]
        return float(np.max(np.abs(p * q - 1.0)))


def legendrian_lift(
    target, grid: GridSpec | None = None, epsilon: float = CHART_EPSILON
) -> LiftedSurface:
    """Sample the lift of a planar family map with its slope coordinate.

    The slope is p = dy/dx along the family parameter t; where
    |dx| < epsilon * |dy| the reciprocal chart q = dx/dy is stored
    instead and the sample is tagged.  Samples with dx = dy = 0 are
    marked invalid rather than raising.
    """
    grid = grid if grid is not None else GridSpec()
    planar = as_planar_map(target)
    mesh_xi, mesh_t = grid.mesh()
    x, y = planar(mesh_xi, mesh_t)
    _, d_x, _, d_y = planar.jacobian(mesh_xi, mesh_t)
    d_x = np.asarray(d_x, dtype=float)
    d_y = np.asarray(d_y, dtype=float)
    invalid = (d_x == 0.0) & (d_y == 0.0)
    reciprocal = (np.abs(d_x) < epsilon * np.abs(d_y)) & ~invalid
    slope = np.zeros_like(d_x)
    affine = ~reciprocal & ~invalid
    slope[affine] = d_y[affine] / d_x[affine]
    slope[reciprocal] = d_x[reciprocal] / d_y[reciprocal]
    chart = np.zeros(d_x.shape, dtype=np.uint8)
    chart[reciprocal] = 1
    return LiftedSurface(
        grid=grid,
        x=np.asarray(x, dtype=float),
        y=np.asarray(y, dtype=float),
        slope=slope,
        chart=chart,
        invalid=invalid,
        d_x=d_x,
        d_y=d_y,
        epsilon=epsilon,
    )


# ----------------------------------------------------------------------
# Fits and sweeps
# ----------------------------------------------------------------------


def fit_cubic_coefficient(branch) -> float:
    """Least-squares c for y = c x^3 through the branch points.

    A second-order self-tangency with the x-axis means exactly this cubic
    leading behavior, so the fitted c is the tangency certificate.
    """
    pts = branch.as_array() if isinstance(branch, Branch) else np.asarray(branch, dtype=float)
    x = pts[:, 0]
    y = pts[:, 1]
    denominator = float(np.sum(x**6))
    if denominator == 0.0:
        raise ValueError("cannot fit a cubic through points with x identically 0")
    return float(np.sum(x**3 * y) / denominator)


DEFAULT_SWEEP_STEPS = 11
DEFAULT_SWEEP_LIMIT = 0.25


def default_sweep_lambdas(
    limit: float = DEFAULT_SWEEP_LIMIT, steps: int = DEFAULT_SWEEP_STEPS
) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(-limit, limit, steps))


@dataclass(frozen=True)
class SweepFrame:
    params: DeformationParams
    mode: str
    criminant: PlaneCurveSet
    envelope: PlaneCurveSet
    cusp_count: int
    grid: GridSpec

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "mode": self.mode,
            "cusps": self.cusp_count,
            "cusp_points": [list(p) for p in self.criminant.cusps],
            "branches": self.criminant.branch_count,
            "grid": self.grid.to_json(),
        }


def analyze_deformation(
    base: MapGerm,
    params: DeformationParams,
    mode: str = MODE_VERSAL,
    grid: GridSpec | None = None,
    angle_degrees: float = CUSP_ANGLE_DEGREES,
) -> SweepFrame:
    """Trace, count and map one deformation frame."""
    grid = grid if grid is not None else GridSpec()
    deformed = apply_deformation(base, params, mode)
    report = count_cusps(deformed, grid, angle_degrees=angle_degrees)
    envelope = envelope_curves(deformed, report.curves)
    return SweepFrame(
        params=params,
        mode=mode,
        criminant=report.curves,
        envelope=envelope,
        cusp_count=report.count,
        grid=grid,
    )


def deformation_sweep(
    base: MapGerm,
    mode: str = MODE_BEAKS,
    lambdas: Sequence[float] | None = None,
    grid: GridSpec | None = None,
    mu1: float = 0.0,
    mu2: float = 0.0,
) -> list[SweepFrame]:
    """One frame per lambda; mu parameters apply in versal mode only."""
    lambdas = tuple(lambdas) if lambdas is not None else default_sweep_lambdas()
    return [
        analyze_deformation(base, DeformationParams(lam=lam, mu1=mu1, mu2=mu2), mode, grid)
        for lam in lambdas
    ]
