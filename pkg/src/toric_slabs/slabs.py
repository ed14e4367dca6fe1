"""Normalized slab functions and the mirror degeneration equation.

All slab functions come from one degree-1 element ``F`` of the graded
ring ``S``: at a vertex ``v``, ``f_v = z^-(v, psibar(v)) F``.  Writing
``F = sum_p theta_p (1 + G_p)`` over the lattice points ``p`` of sigma
with ``G_p`` pure in ``Q``, the normalization condition at every vertex
fixes the ``G_p`` degree by degree: in a positive grading at ``p`` the
only degree-``d`` pure-``Q`` contribution of the new unknowns to
``log f_p`` is ``G_{p,d}`` itself, so each step is a subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import InvalidInput, NonIntegralCoefficient, RankZeroQ
from ._linalg import matvec
from .kaehler import KaehlerData
from .polytope import Decomposition
from .series import Grading, Series, log, positive_grading, pure_Q_part, transport_slab

QVec = tuple[int, ...]


def naive_slab(dec: Decomposition, kd: KaehlerData, v: int, trunc=None) -> Series:
    """``sum over lattice points m of z^(m - v, 0, psibar(m) - psibar(v))``."""
    n, r = dec.dim, kd.rank
    pv, qv = dec.vertices[v], kd.psibar[v]
    terms = {}
    for u, pu in enumerate(dec.vertices):
        key = tuple(a - b for a, b in zip(pu, pv)) + (0,) + tuple(a - b for a, b in zip(kd.psibar[u], qv))
        terms[key] = Fraction(1)
    s = Series(n, r, terms)
    if trunc is not None:
        s = s.truncate(*trunc)
    return s


@lru_cache(maxsize=None)
def vertex_grading(kd: KaehlerData, v: int) -> Grading:
    """A grading positive on every non-constant naive monomial at ``v``."""
    naive = naive_slab(kd.dec, kd, v)
    return positive_grading([k for k in naive.terms if any(k)], kd.dec.dim)


@dataclass(frozen=True)
class SlabFunction:
    vertex: int
    f: Series
    order: int
    correction: Series
    grading: Grading = field(compare=False)

    @property
    def g(self) -> Series:
        return self.correction

    def to_dict(self, dec: Decomposition) -> dict:
        return {
            "vertex": list(dec.vertices[self.vertex]),
            "order": self.order,
            "f": self.f.to_json(),
            "g": self.correction.to_json(),
            "f_text": self.f.render(),
            "g_text": self.correction.render(),
            "grading": self.grading.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class SlabSolution:
    """Pure-``Q`` corrections ``G_p`` for every lattice point, to order ``k``."""

    kd: KaehlerData
    order: int
    corrections: tuple[dict[QVec, Fraction], ...]  # indexed by vertex

    def slab_series(self, v: int) -> Series:
        return _slab_at(self.kd, self.corrections, v)

    def slab(self, v: int) -> SlabFunction:
        f = self.slab_series(v)
        return SlabFunction(v, f, self.order, f - naive_slab(self.kd.dec, self.kd, v), vertex_grading(self.kd, v))

    def homogenized(self) -> dict[tuple, Fraction]:
        """``F`` as a map from degree-1 exponents ``(m, q, 1)`` to coefficients."""
        kd = self.kd
        out = {}
        for p, pp in enumerate(kd.dec.vertices):
            out[pp + kd.psibar[p] + (1,)] = Fraction(1)
            for q, c in self.corrections[p].items():
                out[pp + tuple(a + b for a, b in zip(kd.psibar[p], q)) + (1,)] = c
        return out


def _slab_at(kd: KaehlerData, corrections, v: int) -> Series:
    dec = kd.dec
    pv, qv = dec.vertices[v], kd.psibar[v]
    terms: dict[tuple, Fraction] = {}
    for u, pu in enumerate(dec.vertices):
        m = tuple(a - b for a, b in zip(pu, pv))
        base = tuple(a - b for a, b in zip(kd.psibar[u], qv))
        terms[m + (0,) + base] = terms.get(m + (0,) + base, Fraction(0)) + 1
        for q, c in corrections[u].items():
            key = m + (0,) + tuple(a + b for a, b in zip(base, q))
            terms[key] = terms.get(key, Fraction(0)) + c
    return Series(dec.dim, kd.rank, terms)


def _pure_q_degree(series: Series, d: int) -> dict[QVec, Fraction]:
    n = series.n
    return {k[n + 1 :]: c for k, c in pure_Q_part(series).terms.items() if sum(k[n + 1 :]) == d}


@lru_cache(maxsize=32)
def solve_slabs(kd: KaehlerData, k: int) -> SlabSolution:
    """Normalized slab functions at every vertex, to ``Q``-order ``k``."""
    dec = kd.dec
    nv = len(dec.vertices)
    corrections: list[dict[QVec, Fraction]] = [{} for _ in range(nv)]
    gradings = [vertex_grading(kd, v) for v in range(nv)]
    for d in range(1, k + 1):
        residuals = []
        for v in range(nv):
            lg = log(_slab_at(kd, corrections, v), gradings[v], d)
            residuals.append(_pure_q_degree(lg, d))
        for v, res in enumerate(residuals):
            for q, c in res.items():
                corrections[v][q] = corrections[v].get(q, Fraction(0)) - c
        for v in range(nv):
            lg = log(_slab_at(kd, corrections, v), gradings[v], d)
            left = _pure_q_degree(lg, d)
            # each correction moves its own pure-Q coefficient by exactly itself
            assert not left, f"degree {d} normalization left {left} at vertex {v}"
    for v, corr in enumerate(corrections):
        for q in [q for q, c in corr.items() if c == 0]:
            del corr[q]
        bad = {q: c for q, c in corr.items() if c.denominator != 1}
        if bad:
            raise NonIntegralCoefficient(f"non-integral slab coefficients at vertex {dec.vertices[v]}: {bad}")
    return SlabSolution(kd, k, tuple(corrections))


def normalize(dec: Decomposition, kd: KaehlerData, v: int, k: int) -> SlabFunction:
    return solve_slabs(kd, k).slab(v)


@dataclass(frozen=True)
class Check:
    condition: str
    subject: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"condition": self.condition, "subject": self.subject, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ConditionReport:
    order: int
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"order": self.order, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def slab_functions(kd: KaehlerData, k: int) -> dict[int, Series]:
    sol = solve_slabs(kd, k)
    return {v: sol.slab_series(v) for v in range(len(kd.dec.vertices))}


def verify_conditions(dec: Decomposition, kd: KaehlerData, k: int, slabs: dict[int, Series] | None = None) -> ConditionReport:
    """Check the four slab conditions; ``slabs`` overrides the computed functions."""
    slabs = slabs if slabs is not None else slab_functions(kd, k)
    name = lambda v: str(dec.vertices[v])  # noqa: E731
    checks = []
    for v, f in sorted(slabs.items()):
        checks.append(Check("1", name(v), f.constant_term == 1, f"constant term {f.constant_term}"))
    for v, f in sorted(slabs.items()):
        if f.constant_term != 1:
            checks.append(Check("3", name(v), False, "log undefined: constant term is not 1"))
            continue
        lg = log(f, vertex_grading(kd, v), k)
        bad_degrees = sorted({sum(e.q) for e, _ in pure_Q_part(lg) if any(e.q)})
        detail = f"pure Q terms of log f at degrees {bad_degrees}" if bad_degrees else ""
        checks.append(Check("3", name(v), not bad_degrees, detail))
    for v in sorted(slabs):
        for w in sorted(slabs):
            if v < w and dec.adjacent(v, w):
                moved = transport_slab(slabs[v], v, w, kd)
                same = moved == slabs[w]
                checks.append(Check("2", f"{name(v)}->{name(w)}", same, "" if same else f"got {moved.render()}"))
    checks.append(Check("4", "all slabs", True, "one function per vertex by construction"))
    return ConditionReport(k, tuple(checks))


def cone_membership(kd: KaehlerData, m: Sequence[int], q: Sequence[int], d: int) -> bool:
    """Membership of ``(m, q, d)`` in the cone over the graph polyhedron of ``psibar``."""
    dec = kd.dec
    m, q = tuple(m), tuple(q)
    if d < 0:
        return False
    if d == 0:
        return not any(m) and all(x >= 0 for x in q)
    for ci, cell in enumerate(dec.maximal_cells):
        if dec.cell_contains(ci, m, scale=d):
            u0 = dec.vertices[cell[0]]
            mu = matvec(dec._cell_inverses[ci], [a - d * b for a, b in zip(m, u0)])
            lam = (d - sum(mu),) + mu  # d times the barycentric coordinates
            value = [sum(l * kd.psibar[u][j] for l, u in zip(lam, cell)) for j in range(kd.rank)]
            return all(a - b >= 0 for a, b in zip(q, value))
    return False


@dataclass(frozen=True)
class MirrorEquation:
    q_choice: QVec
    F: tuple[tuple[tuple, Fraction], ...]  # ((m, q, 1), coeff) in canonical order
    theta_generators: tuple[tuple, ...]
    order: int
    homogeneous: str
    dehomogenized: str
    cone_vertices: tuple[tuple, ...]
    cone_recession: tuple[QVec, ...]

    @property
    def generators(self) -> list:
        return [list(t) for t in self.theta_generators] + ["U", "W"]

    def to_dict(self) -> dict:
        return {
            "q_choice": list(self.q_choice),
            "order": self.order,
            "F": [{"exponent": list(e), "coeff": str(c)} for e, c in self.F],
            "generators": self.generators,
            "homogeneous": self.homogeneous,
            "dehomogenized": self.dehomogenized,
            "cone": {"vertices": [list(v) for v in self.cone_vertices], "recession": [list(r) for r in self.cone_recession]},
        }


def mirror_equation(dec: Decomposition, kd: KaehlerData, k: int, q_choice: Sequence[int] | None = None) -> MirrorEquation:
    if kd.rank == 0:
        raise RankZeroQ("the mirror equation needs a nonzero element of Q, but Q has rank 0")
    q = tuple(q_choice) if q_choice is not None else tuple(1 if i == 0 else 0 for i in range(kd.rank))
    if len(q) != kd.rank or any(x < 0 for x in q) or not any(q):
        raise InvalidInput(f"q_choice {q} is not a nonzero element of N^{kd.rank}")
    sol = solve_slabs(kd, k)
    n = dec.dim

    homs = []
    for v in range(len(dec.vertices)):
        f = sol.slab_series(v)
        hom = {}
        for key, c in f.terms.items():
            hom[tuple(a + b for a, b in zip(key[:n], dec.vertices[v])) + tuple(a + b for a, b in zip(key[n + 1 :], kd.psibar[v])) + (1,)] = c
        homs.append(hom)
    assert all(h == homs[0] for h in homs), "homogenized slab function depends on the vertex"
    F = homs[0]

    order_key = lambda e: (sum(e[n:-1]), e[n:-1], e[:n])  # noqa: E731
    F_sorted = tuple((e, F[e]) for e in sorted(F, key=order_key))
    thetas = tuple(p + kd.psibar[i] + (1,) for i, p in sorted(enumerate(dec.vertices), key=lambda t: t[1]))

    def z(e):
        return "z^(" + ",".join(map(str, e)) + ")"

    F_text = " + ".join(z(e) if c == 1 else f"{c}*{z(e)}" for e, c in F_sorted).replace("+ -", "- ")
    homogeneous = f"U*W = z^({','.join(map(str, q))}) * V0 * ({F_text})"
    origin_slab = sol.slab_series(dec.origin)
    tq = Series.monomial(n, kd.rank, None, 0, q).render()
    dehom = f"u*w = {tq} * ({origin_slab.render()})"
    verts = tuple(dec.vertices[v] + kd.psibar[v] for v in range(len(dec.vertices)))
    rec = tuple(tuple(1 if i == j else 0 for i in range(kd.rank)) for j in range(kd.rank))
    return MirrorEquation(q, F_sorted, thetas, k, homogeneous, dehom, verts, rec)
