"""Lattice polytopes decomposed into standard simplices.

A :class:`Decomposition` is the combinatorial input for everything else in
the package: a lattice polytope ``sigma`` containing the origin, cut into
unimodular simplices, one of which (the base cell) has the origin as a
vertex.  From it we derive interior walls with their integral affine
relations, the fan structure at each vertex of the dual intersection
complex, and the monodromy maps around the discriminant locus.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

from ._linalg import det, integer_inverse, matvec, nullspace, primitive, solve
from .errors import InvalidInput, NotAdjacent

LatticeVector = tuple[int, ...]


@dataclass(frozen=True)
class Failure:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[Failure, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def codes(self) -> list[str]:
        return [f.code for f in self.failures]

    def raise_if_failed(self) -> None:
        if self.failures:
            first = self.failures[0]
            raise InvalidInput(first.message, code=first.code)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "failures": [{"code": f.code, "message": f.message} for f in self.failures],
        }


@dataclass(frozen=True)
class Wall:
    """Interior codimension-one cell shared by two maximal cells.

    ``coefficients`` holds the integers ``c_i`` (aligned with
    ``vertex_indices``) in the relation ``b = sum c_i u_i - a`` where
    ``a`` and ``b`` are the opposite vertices; they always sum to 2.
    """

    vertex_indices: tuple[int, ...]
    cells: tuple[int, int]
    opposite: tuple[int, int]
    coefficients: tuple[int, ...]


@dataclass(frozen=True)
class VertexFan:
    vertex: int
    cones: tuple[tuple[tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class MonodromyMap:
    source: int
    target: int
    matrix: tuple[tuple[int, ...], ...]

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        return matvec(self.matrix, vec)

    def compose(self, other: "MonodromyMap") -> "MonodromyMap":
        """``self`` after ``other``."""
        n = len(self.matrix)
        mat = tuple(
            tuple(sum(self.matrix[i][k] * other.matrix[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        return MonodromyMap(other.source, self.target, mat)

    def is_unipotent(self) -> bool:
        # unipotent iff (A - I)^n = 0
        n = len(self.matrix)
        nil = [[self.matrix[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
        power = [row[:] for row in nil]
        for _ in range(n - 1):
            power = [[sum(power[i][k] * nil[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        return all(x == 0 for row in power for x in row)


@dataclass(frozen=True)
class Decomposition:
    dim: int
    vertices: tuple[LatticeVector, ...]
    maximal_cells: tuple[tuple[int, ...], ...]
    base_cell: int
    name: str = field(default="", compare=False)

    @cached_property
    def origin(self) -> int:
        return self.vertices.index((0,) * self.dim)

    def index_of(self, point: Sequence[int]) -> int:
        try:
            return self.vertices.index(tuple(point))
        except ValueError:
            raise InvalidInput(f"{tuple(point)} is not a vertex of the decomposition") from None

    @cached_property
    def _cell_inverses(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        # columns of the edge matrix are u_i - u_0; unimodular so the inverse is integral
        out = []
        for cell in self.maximal_cells:
            u0 = self.vertices[cell[0]]
            edges = [[self.vertices[i][k] - u0[k] for i in cell[1:]] for k in range(self.dim)]
            out.append(integer_inverse(edges))
        return tuple(out)

    def barycentric(self, cell: int, point: Sequence[int]) -> tuple[int, ...]:
        """Barycentric coordinates of an integer ``point`` w.r.t. ``cell``.

        Only integral for lattice points; callers scale rational points up
        front.  The returned tuple is aligned with the cell's vertex list.
        """
        cverts = self.maximal_cells[cell]
        u0 = self.vertices[cverts[0]]
        lam = matvec(self._cell_inverses[cell], [p - c for p, c in zip(point, u0)])
        return (1 - sum(lam),) + lam

    def cell_contains(self, cell: int, point: Sequence[int], scale: int = 1) -> bool:
        """Whether ``point / scale`` lies in the closed cell."""
        cverts = self.maximal_cells[cell]
        u0 = self.vertices[cverts[0]]
        lam = matvec(self._cell_inverses[cell], [p - scale * c for p, c in zip(point, u0)])
        return all(x >= 0 for x in lam) and sum(lam) <= scale

    def cells_containing_vertex(self, v: int) -> list[int]:
        return [i for i, c in enumerate(self.maximal_cells) if v in c]

    def adjacent(self, v: int, w: int) -> bool:
        return any(v in c and w in c for c in self.maximal_cells)

    def is_interior_vertex(self, v: int) -> bool:
        """Whether vertex ``v`` lies in the interior of ``sigma``."""
        return all(v not in f for f in self.boundary_facets)

    @cached_property
    def _facet_table(self) -> dict[tuple[int, ...], list[tuple[int, int]]]:
        table: dict[tuple[int, ...], list[tuple[int, int]]] = defaultdict(list)
        for ci, cell in enumerate(self.maximal_cells):
            for opp in cell:
                facet = tuple(sorted(i for i in cell if i != opp))
                table[facet].append((ci, opp))
        return dict(table)

    @cached_property
    def boundary_facets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(f for f, adj in self._facet_table.items() if len(adj) == 1))

    @cached_property
    def walls(self) -> tuple[Wall, ...]:
        return tuple(_make_wall(self, f, adj) for f, adj in sorted(self._facet_table.items()) if len(adj) == 2)

    @cached_property
    def discriminant_cells(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Maximal cells of the first barycentric subdivision avoiding vertices.

        Each entry is a flag of faces ``edge < ... < maximal cell``; the
        corresponding cell is the convex hull of their barycenters.
        """
        flags = set()
        for cell in self.maximal_cells:
            for chain in _flags(tuple(sorted(cell)), self.dim):
                flags.add(chain)
        return tuple(sorted(flags))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": [_encode_vec(v) for v in self.vertices],
            "maximal_cells": [list(c) for c in self.maximal_cells],
            "base_cell": self.base_cell,
        }


def _flags(cell: tuple[int, ...], dim: int) -> Iterable[tuple[tuple[int, ...], ...]]:
    # chains face_1 < face_2 < ... < cell with dim(face_1) = 1
    def extend(face: tuple[int, ...]) -> Iterable[tuple[tuple[int, ...], ...]]:
        if len(face) == dim + 1:
            yield (face,)
            return
        for extra in cell:
            if extra not in face:
                bigger = tuple(sorted(face + (extra,)))
                for rest in extend(bigger):
                    yield (face,) + rest

    for edge in combinations(cell, 2):
        yield from extend(edge)


def _encode_vec(v: Sequence[int]) -> list:
    return [x if -(2**63) <= x < 2**63 else str(x) for x in v]


def _hyperplane(points: Sequence[Sequence[int]], dim: int) -> tuple[tuple[int, ...], int]:
    """Integer normal and offset of the hyperplane through ``dim`` affinely independent points."""
    p0 = points[0]
    rows = [[p[k] - p0[k] for k in range(dim)] for p in points[1:]]
    if dim == 1:
        normal = (1,)
    else:
        basis = nullspace(rows, dim)
        if len(basis) != 1:
            raise InvalidInput("degenerate facet", code="NON_STANDARD_SIMPLEX")
        normal = primitive(basis[0])
    return normal, sum(a * b for a, b in zip(normal, p0))


def _make_wall(dec: Decomposition, facet: tuple[int, ...], adj: list[tuple[int, int]]) -> Wall:
    (c1, a), (c2, b) = sorted(adj)
    verts = dec.vertices
    # express (b,1) in the basis (u_i,1), (a,1) of Z^{n+1}
    basis = [verts[i] + (1,) for i in facet] + [verts[a] + (1,)]
    mat = [[basis[j][k] for j in range(len(basis))] for k in range(dec.dim + 1)]
    sol = solve(mat, verts[b] + (1,))
    if sol is None or any(x.denominator != 1 for x in sol) or sol[-1] != -1:
        raise InvalidInput(f"wall {facet} has no integral affine relation", code="BAD_FACE_INTERSECTION")
    coeffs = tuple(int(x) for x in sol[:-1])
    assert sum(coeffs) == 2
    return Wall(facet, (c1, c2), (a, b), coeffs)


def _parse_int(x) -> int:
    if isinstance(x, bool):
        raise InvalidInput(f"expected an integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            pass
    raise InvalidInput(f"expected an integer, got {x!r}")


def from_dict(doc: dict, name: str = "") -> Decomposition:
    """Build an unvalidated :class:`Decomposition` from the JSON object model."""
    if not isinstance(doc, dict):
        raise InvalidInput("document must be a JSON object")
    missing = {"dim", "vertices", "maximal_cells", "base_cell"} - doc.keys()
    if missing:
        raise InvalidInput(f"missing keys: {sorted(missing)}")
    dim = _parse_int(doc["dim"])
    if dim < 1:
        raise InvalidInput("dim must be positive")
    if not isinstance(doc["vertices"], list) or not isinstance(doc["maximal_cells"], list):
        raise InvalidInput("vertices and maximal_cells must be lists")
    vertices = []
    for v in doc["vertices"]:
        if not isinstance(v, list) or len(v) != dim:
            raise InvalidInput(f"vertex {v!r} does not have length {dim}")
        vertices.append(tuple(_parse_int(x) for x in v))
    if len(set(vertices)) != len(vertices):
        raise InvalidInput("duplicate vertices")
    cells = []
    for c in doc["maximal_cells"]:
        if not isinstance(c, list) or len(c) != dim + 1:
            raise InvalidInput(f"cell {c!r} must list {dim + 1} vertex indices")
        idx = tuple(_parse_int(i) for i in c)
        if any(not 0 <= i < len(vertices) for i in idx) or len(set(idx)) != len(idx):
            raise InvalidInput(f"cell {c!r} has invalid vertex indices")
        cells.append(idx)
    if not cells:
        raise InvalidInput("maximal_cells is empty")
    base = _parse_int(doc["base_cell"])
    if not 0 <= base < len(cells):
        raise InvalidInput("base_cell out of range")
    return Decomposition(dim, tuple(vertices), tuple(cells), base, name=name)


def parse_input(document: str, name: str = "") -> Decomposition:
    """Parse and validate a decomposition from JSON text."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from exc
    dec = from_dict(doc, name=name)
    validate(dec).raise_if_failed()
    return dec


def validate(dec: Decomposition) -> ValidationReport:
    failures: list[Failure] = []
    n = dec.dim
    verts = dec.vertices

    origin = (0,) * n
    if origin not in verts:
        failures.append(Failure("ORIGIN_MISSING", "0 is not a vertex"))
    elif verts.index(origin) not in dec.maximal_cells[dec.base_cell]:
        failures.append(Failure("BASE_CELL_WITHOUT_ORIGIN", "base cell does not contain 0"))

    for ci, cell in enumerate(dec.maximal_cells):
        u0 = verts[cell[0]]
        edges = [[verts[i][k] - u0[k] for i in cell[1:]] for k in range(n)]
        d = det(edges)
        if abs(d) != 1:
            failures.append(Failure("NON_STANDARD_SIMPLEX", f"cell {ci} has lattice volume {abs(d)}"))
    if failures:
        return ValidationReport(tuple(failures))

    used = {i for c in dec.maximal_cells for i in c}
    if len(used) != len(verts):
        failures.append(Failure("NOT_COVERING", f"vertices {sorted(set(range(len(verts))) - used)} lie in no cell"))

    if len(set(map(frozenset, dec.maximal_cells))) != len(dec.maximal_cells):
        failures.append(Failure("BAD_FACE_INTERSECTION", "duplicate maximal cells"))

    for facet, adj in sorted(dec._facet_table.items()):
        pts = [verts[i] for i in facet]
        normal, offset = _hyperplane(pts, n)
        side = lambda w: sum(a * b for a, b in zip(normal, verts[w])) - offset  # noqa: E731
        if len(adj) > 2:
            failures.append(Failure("BAD_FACE_INTERSECTION", f"facet {facet} lies in {len(adj)} cells"))
        elif len(adj) == 2:
            sa, sb = side(adj[0][1]), side(adj[1][1])
            if (sa > 0) == (sb > 0):
                failures.append(Failure("BAD_FACE_INTERSECTION", f"cells {adj[0][0]} and {adj[1][0]} overlap across {facet}"))
        else:
            signs = {(s > 0) - (s < 0) for s in (side(w) for w in range(len(verts)))} - {0}
            if len(signs) > 1:
                failures.append(Failure("NOT_COVERING", f"facet {facet} is on the boundary of the union but not of conv(vertices)"))

    # dual graph connectivity
    seen = {0}
    stack = [0]
    neighbours = defaultdict(set)
    for adj in dec._facet_table.values():
        if len(adj) == 2:
            neighbours[adj[0][0]].add(adj[1][0])
            neighbours[adj[1][0]].add(adj[0][0])
    while stack:
        c = stack.pop()
        for d in neighbours[c] - seen:
            seen.add(d)
            stack.append(d)
    if len(seen) != len(dec.maximal_cells):
        failures.append(Failure("NOT_COVERING", "maximal cells are not connected through facets"))

    # covering degree: every barycenter lies in exactly one closed cell
    scale = n + 1
    for ci, cell in enumerate(dec.maximal_cells):
        bary = [sum(verts[i][k] for i in cell) for k in range(n)]
        hits = sum(dec.cell_contains(cj, bary, scale) for cj in range(len(dec.maximal_cells)))
        if hits != 1:
            failures.append(Failure("BAD_FACE_INTERSECTION", f"interior of cell {ci} meets {hits - 1} other cells"))
            break

    return ValidationReport(tuple(failures))


def lattice_points(dec: Decomposition) -> list[LatticeVector]:
    """All integer points of sigma, sorted lexicographically."""
    lo = [min(v[k] for v in dec.vertices) for k in range(dec.dim)]
    hi = [max(v[k] for v in dec.vertices) for k in range(dec.dim)]
    pts = []
    for p in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if any(dec.cell_contains(c, p) for c in range(len(dec.maximal_cells))):
            pts.append(tuple(p))
    return sorted(pts)


def interior_walls(dec: Decomposition) -> list[Wall]:
    return list(dec.walls)


def fan_structure(dec: Decomposition, v: int) -> VertexFan:
    """Maximal cones of the fan structure at vertex ``v`` in ``M + Z``.

    One cone ``T_v tau + R(-v,-1)`` and one cone ``T_v tau + R(0,1)`` per
    maximal cell ``tau`` containing ``v``.
    """
    pv = dec.vertices[v]
    down = tuple(-x for x in pv) + (-1,)
    up = (0,) * dec.dim + (1,)
    tangents = []
    for ci in dec.cells_containing_vertex(v):
        gens = tuple(
            primitive([a - b for a, b in zip(dec.vertices[u], pv)]) + (0,)
            for u in dec.maximal_cells[ci]
            if u != v
        )
        tangents.append(gens)
    cones = tuple(g + (down,) for g in tangents) + tuple(g + (up,) for g in tangents)
    return VertexFan(v, cones)


def _require_adjacent(dec: Decomposition, v: int, w: int) -> None:
    if v != w and not dec.adjacent(v, w):
        raise NotAdjacent(f"vertices {dec.vertices[v]} and {dec.vertices[w]} share no maximal cell")


def monodromy_lambda(dec: Decomposition, v: int, w: int) -> MonodromyMap:
    """``(m, r) -> (m + r (v - w), r)`` on ``M + Z``."""
    _require_adjacent(dec, v, w)
    n = dec.dim
    diff = [a - b for a, b in zip(dec.vertices[v], dec.vertices[w])]
    mat = [[1 if i == j else 0 for j in range(n + 1)] for i in range(n + 1)]
    for i in range(n):
        mat[i][n] = diff[i]
    return MonodromyMap(v, w, tuple(map(tuple, mat)))


def monodromy_P(dec: Decomposition, kd, v: int, w: int) -> MonodromyMap:
    """Lift of :func:`monodromy_lambda` to ``M + Z + Q^gp``.

    ``(m, r, q) -> (m + r (v - w), r, q + r (psibar(v) - psibar(w)))``.
    """
    _require_adjacent(dec, v, w)
    n, rk = dec.dim, kd.rank
    size = n + 1 + rk
    diff = [a - b for a, b in zip(dec.vertices[v], dec.vertices[w])]
    qdiff = [a - b for a, b in zip(kd.psibar[v], kd.psibar[w])]
    mat = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    for i in range(n):
        mat[i][n] = diff[i]
    for i in range(rk):
        mat[n + 1 + i][n] = qdiff[i]
    return MonodromyMap(v, w, tuple(map(tuple, mat)))
