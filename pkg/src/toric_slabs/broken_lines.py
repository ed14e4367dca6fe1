"""Broken lines coming vertically up into the slab layer.

Every slab sits at height one, so a line that comes up from below with
``r = -1`` crosses exactly one slab.  At the crossing the attached
monomial ``z^(m, -1, q)`` is replaced by one term of ``z^(m, -1, q) f_v``;
the line bends when that term has a nonzero ``M`` component.  The sum
of the final monomials is the lift of the initial monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .kaehler import KaehlerData
from .polytope import Decomposition, monodromy_P
from .series import Exponent, Series
from .slabs import slab_functions


@dataclass(frozen=True)
class Segment:
    direction: tuple[int, ...]  # in M + Z
    exponent: Exponent
    coeff: Fraction

    def to_dict(self) -> dict:
        return {
            "direction": list(self.direction),
            "m": list(self.exponent.m),
            "r": self.exponent.r,
            "q": list(self.exponent.q),
            "coeff": str(self.coeff),
        }


def _direction(e: Exponent) -> tuple[int, ...]:
    return tuple(-x for x in e.m) + (-e.r,)


@dataclass(frozen=True)
class BrokenLine:
    base_vertex: int
    segments: tuple[Segment, ...]

    @property
    def final(self) -> Segment:
        return self.segments[-1]

    @property
    def bent(self) -> bool:
        return self.segments[0].direction != self.final.direction

    def to_dict(self, dec: Decomposition | None = None) -> dict:
        base = list(dec.vertices[self.base_vertex]) if dec is not None else self.base_vertex
        return {"base_vertex": base, "bent": self.bent, "segments": [s.to_dict() for s in self.segments]}


def _check_initial(initial: Exponent) -> None:
    if any(initial.m) or initial.r != -1:
        raise ValueError(f"initial exponent must have M-part 0 and r = -1, got {initial}")


def _lines_from(v: int, initial: Exponent, f: Series) -> list[BrokenLine]:
    first = Segment(_direction(initial), initial, Fraction(1))
    lines = []
    for term, c in f:
        if not any(term.m) and not any(term.q):
            lines.append(BrokenLine(v, (first,)))
            continue
        e = initial + term
        lines.append(BrokenLine(v, (first, Segment(_direction(e), e, c))))
    return lines


def enumerate_broken_lines(
    dec: Decomposition, kd: KaehlerData, v_base: int, initial: Exponent, k: int, slabs: dict[int, Series] | None = None
) -> list[BrokenLine]:
    """One broken line per term of ``z^initial * f_v`` at the base vertex."""
    _check_initial(initial)
    slabs = slabs if slabs is not None else slab_functions(kd, k)
    return _lines_from(v_base, initial, slabs[v_base])


def lift(lines: Sequence[BrokenLine], n: int, rank: int) -> Series:
    terms: dict[tuple, Fraction] = {}
    for line in lines:
        key = line.final.exponent.key
        terms[key] = terms.get(key, Fraction(0)) + line.final.coeff
    return Series(n, rank, terms)


@dataclass(frozen=True)
class LiftResult:
    base_vertex: int
    initial: Exponent
    series: Series

    def to_dict(self) -> dict:
        return {"base_vertex": self.base_vertex, "initial": list(self.initial.key), "lift": self.series.to_json(), "text": self.series.render()}


def lift_at(dec: Decomposition, kd: KaehlerData, v: int, initial: Exponent, k: int, slabs=None) -> LiftResult:
    lines = enumerate_broken_lines(dec, kd, v, initial, k, slabs)
    return LiftResult(v, initial, lift(lines, dec.dim, kd.rank))


@dataclass(frozen=True)
class PairCheck:
    source: int
    target: int
    passed: bool

    def to_dict(self, dec: Decomposition) -> dict:
        return {"from": list(dec.vertices[self.source]), "to": list(dec.vertices[self.target]), "passed": self.passed}


@dataclass(frozen=True)
class LiftInvarianceReport:
    initial: Exponent
    order: int
    pairs: tuple[PairCheck, ...]

    @property
    def ok(self) -> bool:
        return all(p.passed for p in self.pairs)

    def to_dict(self, dec: Decomposition) -> dict:
        return {"initial": list(self.initial.key), "order": self.order, "ok": self.ok, "pairs": [p.to_dict(dec) for p in self.pairs]}


def lift_invariance(
    dec: Decomposition, kd: KaehlerData, m: Exponent | None, k: int, slabs: dict[int, Series] | None = None
) -> LiftInvarianceReport:
    """Compare lifts at every ordered pair of adjacent vertices.

    The initial monomial is written in the chart at ``v``; in the chart at
    ``w`` it becomes its image under the monodromy ``T_vw``.
    """
    initial = m if m is not None else Exponent((0,) * dec.dim, -1, (0,) * kd.rank)
    _check_initial(initial)
    slabs = slabs if slabs is not None else slab_functions(kd, k)
    nv = len(dec.vertices)
    lifts = {v: lift_at(dec, kd, v, initial, k, slabs).series for v in range(nv)}
    pairs = []
    for v in range(nv):
        for w in range(nv):
            if v == w or not dec.adjacent(v, w):
                continue
            moved = Exponent.from_key(monodromy_P(dec, kd, v, w).apply(initial.key), dec.dim)
            there = lift(_lines_from(w, moved, slabs[w]), dec.dim, kd.rank)
            pairs.append(PairCheck(v, w, there == lifts[v]))
    return LiftInvarianceReport(initial, k, tuple(pairs))
