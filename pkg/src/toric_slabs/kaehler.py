"""Convex piecewise linear functions on the fan over sigma.

The monoid ``P`` of integral convex PL functions vanishing on the base
cone is cut out by one bending inequality per interior wall.  We compute
its extreme rays by double description, insist that they form a lattice
basis (so ``P`` and its dual ``Q`` are free), and read off the universal
function ``psibar`` as the vector of generator values at each vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from ._linalg import det, integer_inverse, primitive, rank
from .errors import OutsideTangentWedge, OverrideNotConvex, UnsupportedInput
from .polytope import Decomposition, Wall

QVector = tuple[int, ...]


@dataclass(frozen=True)
class BendingFunctional:
    """``eps(phi) = phi(b) + phi(a) - sum c_i phi(u_i)`` as vertex-index coefficients."""

    wall: Wall
    coefficients: tuple[tuple[int, int], ...]  # (vertex index, coefficient), sorted

    def __call__(self, values: Sequence[int]) -> int:
        return sum(c * values[i] for i, c in self.coefficients)

    def as_dict(self) -> dict[int, int]:
        return dict(self.coefficients)


def bending_functional(dec: Decomposition, wall: Wall) -> BendingFunctional:
    coeffs: dict[int, int] = {}
    a, b = wall.opposite
    coeffs[a] = coeffs.get(a, 0) + 1
    coeffs[b] = coeffs.get(b, 0) + 1
    for u, c in zip(wall.vertex_indices, wall.coefficients):
        coeffs[u] = coeffs.get(u, 0) - c
    return BendingFunctional(wall, tuple(sorted((i, c) for i, c in coeffs.items() if c != 0)))


@dataclass(frozen=True)
class LocalPLFunction:
    """Slopes of ``psibar - psibar(v)`` on each tangent wedge at ``v``.

    ``slopes[cell]`` is an ``r x n`` integer matrix ``L`` with
    ``phi_v(m) = L m`` for ``m`` in the tangent wedge of that cell.
    """

    vertex: int
    slopes: dict[int, tuple[tuple[int, ...], ...]]


@dataclass(frozen=True, eq=False)
class KaehlerData:
    dec: Decomposition
    rank: int
    generators: tuple[tuple[int, ...], ...]  # one value vector (per vertex) per generator
    psibar: tuple[QVector, ...]  # indexed by vertex
    free_vertices: tuple[int, ...] = field(default=())

    @cached_property
    def functionals(self) -> tuple[BendingFunctional, ...]:
        return tuple(bending_functional(self.dec, w) for w in self.dec.walls)

    @cached_property
    def bending_images(self) -> tuple[QVector, ...]:
        """Bending of ``psibar`` across each wall, as a vector in ``Z^r``."""
        return tuple(
            tuple(eps([self.psibar[v][j] for v in range(len(self.dec.vertices))]) for j in range(self.rank))
            for eps in self.functionals
        )

    @property
    def strictly_convex(self) -> bool:
        return all(any(x != 0 for x in img) for img in self.bending_images)

    @cached_property
    def _local(self) -> dict[int, LocalPLFunction]:
        return {}

    def local_function(self, v: int) -> LocalPLFunction:
        if v not in self._local:
            self._local[v] = _local_pl_function(self, v)
        return self._local[v]

    def with_psibar(self, psibar: Sequence[Sequence[int]]) -> "KaehlerData":
        """Copy with a user supplied ``psibar``; it must be convex."""
        pb = tuple(tuple(int(x) for x in row) for row in psibar)
        if len(pb) != len(self.dec.vertices) or any(len(row) != self.rank for row in pb):
            raise OverrideNotConvex("override must give one rank-r vector per vertex")
        kd = KaehlerData(self.dec, self.rank, self.generators, pb, self.free_vertices)
        bad = [i for i, img in enumerate(kd.bending_images) if any(x < 0 for x in img)]
        if bad:
            raise OverrideNotConvex(f"override bends negatively across walls {bad}")
        return kd

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "generators": [list(g) for g in self.generators],
            "psibar": {str(i): list(p) for i, p in enumerate(self.psibar)},
            "strictly_convex": self.strictly_convex,
        }


def extreme_rays(inequalities: Sequence[Sequence[int]], dim: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{x : a.x >= 0 for a in inequalities}``.

    Double description: start from the generating set ``{+e_i, -e_i}`` of
    the whole space and intersect one half-space at a time, combining
    each positive generator with each negative one.  Once all
    inequalities are in, non-extreme generators are dropped by the rank
    test (valid because the final cone is pointed).
    """
    gens = set()
    for j in range(dim):
        e = tuple(1 if i == j else 0 for i in range(dim))
        gens |= {e, tuple(-x for x in e)}
    for a in inequalities:
        val = lambda g: sum(x * y for x, y in zip(a, g))  # noqa: E731
        pos = [g for g in gens if val(g) > 0]
        neg = [g for g in gens if val(g) < 0]
        new = {g for g in gens if val(g) >= 0}
        for p in pos:
            for q in neg:
                comb = [val(p) * y - val(q) * x for x, y in zip(p, q)]
                if any(comb):
                    new.add(primitive(comb))
        gens = new
    extreme = []
    for g in gens:
        tight = [a for a in inequalities if sum(x * y for x, y in zip(a, g)) == 0]
        if dim == 1 or (tight and rank(tight) == dim - 1):
            extreme.append(g)
    return sorted(extreme, reverse=True)


def kaehler_data(dec: Decomposition) -> KaehlerData:
    """Generators of the monoid of convex PL functions and ``psibar``."""
    base = set(dec.maximal_cells[dec.base_cell])
    free = tuple(i for i in range(len(dec.vertices)) if i not in base)
    nv = len(dec.vertices)
    if not free:
        return KaehlerData(dec, 0, (), tuple(() for _ in range(nv)), free)

    rows = []
    for w in dec.walls:
        eps = bending_functional(dec, w).as_dict()
        rows.append([eps.get(v, 0) for v in free])
    f = len(free)
    if not rows or rank(rows) < f:
        raise UnsupportedInput("the cone of convex functions is not pointed", code="CONE_NOT_SMOOTH")

    rays = extreme_rays(rows, f)
    r = len(rays)
    if r != f:
        raise UnsupportedInput(f"Kaehler cone has {r} rays in dimension {f}; not simplicial", code="CONE_NOT_SMOOTH")
    if abs(det([list(x) for x in rays])) != 1:
        raise UnsupportedInput("Kaehler cone is simplicial but not unimodular", code="CONE_NOT_SMOOTH")

    generators = []
    for ray in rays:
        values = [0] * nv
        for v, x in zip(free, ray):
            values[v] = x
        generators.append(tuple(values))
    psibar = tuple(tuple(g[v] for g in generators) for v in range(nv))
    return KaehlerData(dec, r, tuple(generators), psibar, free)


def _local_pl_function(kd: KaehlerData, v: int) -> LocalPLFunction:
    dec = kd.dec
    pv = dec.vertices[v]
    slopes = {}
    for ci in dec.cells_containing_vertex(v):
        others = [u for u in dec.maximal_cells[ci] if u != v]
        # phi(m) = sum lam_i (psibar(u_i) - psibar(v)) with m = sum lam_i (u_i - v)
        edge_cols = [[dec.vertices[u][k] - pv[k] for u in others] for k in range(dec.dim)]
        inv = integer_inverse(edge_cols)
        vals = [[kd.psibar[u][j] - kd.psibar[v][j] for u in others] for j in range(kd.rank)]
        slope = tuple(
            tuple(sum(vals[j][i] * inv[i][k] for i in range(len(others))) for k in range(dec.dim))
            for j in range(kd.rank)
        )
        slopes[ci] = slope
    return LocalPLFunction(v, slopes)


def _wedge_cell(kd: KaehlerData, v: int, m: Sequence[int]) -> int | None:
    dec = kd.dec
    for ci in dec.cells_containing_vertex(v):
        others = [u for u in dec.maximal_cells[ci] if u != v]
        # the tangent wedge at v is the cone on the edges v -> u
        lam = _edge_coords(dec, v, ci, others, m)
        if all(x >= 0 for x in lam):
            return ci
    return None


def _edge_coords(dec, v, ci, others, m):
    pv = dec.vertices[v]
    cols = [[dec.vertices[u][k] - pv[k] for u in others] for k in range(dec.dim)]
    inv = integer_inverse(cols)
    return [sum(inv[i][k] * m[k] for k in range(dec.dim)) for i in range(len(others))]


def in_tangent_wedge(kd: KaehlerData, v: int, m: Sequence[int]) -> bool:
    return _wedge_cell(kd, v, m) is not None


def phi_v(kd: KaehlerData, v: int, m: Sequence[int]) -> QVector:
    """Value at ``m`` of the local convex PL function at vertex ``v``."""
    ci = _wedge_cell(kd, v, m)
    if ci is None:
        raise OutsideTangentWedge(f"{tuple(m)} is not in the tangent wedge of sigma at {kd.dec.vertices[v]}")
    slope = kd.local_function(v).slopes[ci]
    return tuple(sum(a * x for a, x in zip(row, m)) for row in slope)


def member_Pbar(kd: KaehlerData, v: int, m: Sequence[int], q: Sequence[int]) -> bool:
    ci = _wedge_cell(kd, v, m)
    if ci is None:
        return False
    return all(a - b >= 0 for a, b in zip(q, phi_v(kd, v, m)))


@dataclass(frozen=True)
class ConvexityReport:
    strictly_convex: bool
    bending_images: tuple[QVector, ...]
    flat_walls: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {
            "strictly_convex": self.strictly_convex,
            "bending_images": [list(b) for b in self.bending_images],
            "flat_walls": [list(w) for w in self.flat_walls],
        }


def check_strict_convexity(dec: Decomposition, kd: KaehlerData, override_psibar=None) -> ConvexityReport:
    if override_psibar is not None:
        kd = kd.with_psibar(override_psibar)
    images = kd.bending_images
    flat = tuple(w.vertex_indices for w, img in zip(dec.walls, images) if not any(img))
    return ConvexityReport(not flat, images, flat)
