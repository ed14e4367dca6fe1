"""Sparse truncated power series over ``M + Z + Q^gp``.

Exponents are flat integer tuples ``(m_1..m_n, r, q_1..q_r)`` and
coefficients are exact :class:`~fractions.Fraction` values.

Truncation is governed by a :class:`Grading`, a linear weight
``w(m, r, q) = deg(q) - l.m`` with ``deg(q) = sum(q)``.  When every
non-constant monomial of a series has positive weight, the monomials of
weight above a cap span an ideal, so arithmetic modulo that ideal is
exact and ``log``/``exp``/inverses terminate after finitely many powers.
A pure ``Q`` monomial ``z^q`` has weight ``deg(q)`` in every grading, so
"order ``k``" in the ``Q`` direction always means "cap ``k``".

A series carries an optional ``cap``: ``None`` means the stored terms
are the whole (finite) series; otherwise the series is only known modulo
monomials of weight ``> cap``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence

from ._linalg import solve
from .errors import ConstantTermNotOne, NotAdjacent, TruncationOverflow

Key = tuple[int, ...]


class Exponent(NamedTuple):
    m: tuple[int, ...]
    r: int
    q: tuple[int, ...]

    @property
    def key(self) -> Key:
        return self.m + (self.r,) + self.q

    @classmethod
    def from_key(cls, key: Key, n: int) -> "Exponent":
        return cls(tuple(key[:n]), key[n], tuple(key[n + 1 :]))

    def __add__(self, other):  # type: ignore[override]
        return Exponent(
            tuple(a + b for a, b in zip(self.m, other.m)),
            self.r + other.r,
            tuple(a + b for a, b in zip(self.q, other.q)),
        )

    @property
    def is_pure_q(self) -> bool:
        return self.r == 0 and not any(self.m)


@dataclass(frozen=True)
class Grading:
    """Weight ``deg(q) - slope . m``; the ``r`` component has weight 0."""

    slope: tuple[Fraction, ...]

    @property
    def denominator(self) -> int:
        d = 1
        for x in self.slope:
            d = math.lcm(d, x.denominator)
        return d

    def weight(self, key: Key, n: int) -> Fraction:
        return Fraction(sum(key[n + 1 :])) - sum((s * x for s, x in zip(self.slope, key[:n])), Fraction(0))

    def _scaled(self, n: int):
        den = self.denominator
        coeffs = [-int(s * den) for s in self.slope]

        def w(key: Key) -> int:
            return den * sum(key[n + 1 :]) + sum(c * x for c, x in zip(coeffs, key))

        return w, den

    def to_dict(self) -> dict:
        return {"slope": [str(s) for s in self.slope]}


def positive_grading(exponents: Iterable[Key], n: int) -> Grading:
    """Grading making every given exponent strictly positive.

    Solves ``max c`` subject to ``deg(q_u) - l.m_u >= c`` for each
    exponent ``u`` with ``m_u != 0`` and ``c <= 1`` exactly, by
    enumerating vertices of the feasible region.  Raises
    :class:`TruncationOverflow` when no grading exists (the exponents
    positively span a pure-``Q`` monomial of non-positive degree).
    """
    support = sorted({k for k in exponents if any(k[:n])})
    for k in exponents:
        if not any(k[:n]) and sum(k[n + 1 :]) <= 0 and any(k[n:]):
            raise TruncationOverflow(f"pure Q exponent {k} has non-positive degree")
    # constraints: a . (l, c) <= rhs
    rows = [(list(k[:n]) + [1], Fraction(sum(k[n + 1 :]))) for k in support]
    rows.append(([0] * n + [1], Fraction(1)))
    best: tuple[Fraction, tuple[Fraction, ...]] | None = None
    for subset in combinations(range(len(rows)), n + 1):
        a = [rows[i][0] for i in subset]
        b = [rows[i][1] for i in subset]
        x = solve(a, b)
        if x is None:
            continue
        if all(sum(Fraction(ai) * xi for ai, xi in zip(row, x)) <= rhs for row, rhs in rows):
            c = x[-1]
            if best is None or c > best[0]:
                best = (c, tuple(x[:-1]))
    if best is None or best[0] <= 0:
        raise TruncationOverflow(
            "no linear grading is positive on the support; the series ring has no usable completion"
        )
    return Grading(best[1])


def _var_names(n: int, rank: int) -> tuple[list[str], list[str]]:
    mnames = {1: ["x"], 2: ["x", "y"], 3: ["x", "y", "w"]}.get(n) or [f"x{i + 1}" for i in range(n)]
    qnames = ["t"] if rank == 1 else [f"t{i + 1}" for i in range(rank)]
    return mnames, qnames


class Series:
    """Immutable sparse series; see the module docstring for semantics."""

    __slots__ = ("n", "rank", "terms", "grading", "cap")

    def __init__(
        self,
        n: int,
        rank: int,
        terms: dict[Key, Fraction] | Iterable[tuple[Key, object]] | None = None,
        grading: Grading | None = None,
        cap: Fraction | int | None = None,
    ):
        self.n = n
        self.rank = rank
        self.grading = grading
        self.cap = None if cap is None else Fraction(cap)
        if cap is not None and grading is None:
            raise ValueError("a capped series needs a grading")
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        clean: dict[Key, Fraction] = {}
        for k, c in items:
            k = tuple(k)
            if len(k) != n + 1 + rank:
                raise ValueError(f"exponent {k} does not fit layout n={n}, rank={rank}")
            c = Fraction(c)
            if c:
                clean[k] = clean.get(k, Fraction(0)) + c
        clean = {k: c for k, c in clean.items() if c}
        if self.cap is not None:
            clean = {k: c for k, c in clean.items() if grading.weight(k, n) <= self.cap}
        self.terms = clean

    # construction helpers
    @classmethod
    def zero(cls, n: int, rank: int) -> "Series":
        return cls(n, rank)

    @classmethod
    def one(cls, n: int, rank: int) -> "Series":
        return cls(n, rank, {(0,) * (n + 1 + rank): 1})

    @classmethod
    def monomial(cls, n: int, rank: int, m=None, r: int = 0, q=None, coeff=1) -> "Series":
        m = tuple(m) if m is not None else (0,) * n
        q = tuple(q) if q is not None else (0,) * rank
        return cls(n, rank, {m + (r,) + q: coeff})

    @classmethod
    def _raw(cls, n, rank, terms, grading=None, cap=None) -> "Series":
        # trusted fast path: terms already within cap; zeros are dropped here
        self = object.__new__(cls)
        self.n, self.rank, self.grading = n, rank, grading
        self.cap = None if cap is None else Fraction(cap)
        self.terms = {k: c for k, c in terms.items() if c}
        return self

    def _like(self, terms, grading=None, cap=None) -> "Series":
        return Series(self.n, self.rank, terms, grading, cap)

    # inspection
    @property
    def is_exact(self) -> bool:
        return self.cap is None

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        for k in sorted(self.terms, key=self._sort_key):
            yield Exponent.from_key(k, self.n), self.terms[k]

    def _sort_key(self, k: Key):
        n = self.n
        return (sum(k[n + 1 :]), k[n + 1 :], sum(abs(x) for x in k[:n]), k[:n], k[n])

    def coefficient(self, m=None, r: int = 0, q=None) -> Fraction:
        m = tuple(m) if m is not None else (0,) * self.n
        q = tuple(q) if q is not None else (0,) * self.rank
        return self.terms.get(m + (r,) + q, Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * (self.n + 1 + self.rank), Fraction(0))

    def valuation(self, grading: Grading | None = None) -> Fraction | None:
        """Minimal weight of a stored term (``None`` for the zero series)."""
        g = grading or self.grading
        if not self.terms:
            return None
        return min(g.weight(k, self.n) for k in self.terms)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    # arithmetic
    def _check(self, other: "Series") -> None:
        if (self.n, self.rank) != (other.n, other.rank):
            raise ValueError("series live in different exponent lattices")
        if self.cap is not None and other.cap is not None and self.grading != other.grading:
            raise ValueError("series are truncated with respect to different gradings")

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        caps = [s.cap for s in (self, other) if s.cap is not None]
        grading = self.grading if self.cap is not None else other.grading
        return self._like(terms, grading if caps else None, min(caps) if caps else None)

    def __neg__(self) -> "Series":
        return Series(self.n, self.rank, {k: -c for k, c in self.terms.items()}, self.grading, self.cap)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c) -> "Series":
        c = Fraction(c)
        return Series(self.n, self.rank, {k: c * v for k, v in self.terms.items()}, self.grading, self.cap)

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (self.n, self.rank, self.terms, self.cap) == (other.n, other.rank, other.terms, other.cap)

    def __hash__(self):
        return hash((self.n, self.rank, frozenset(self.terms.items()), self.cap))

    def truncate(self, grading: Grading, cap) -> "Series":
        cap = Fraction(cap)
        if self.cap is not None:
            if grading != self.grading:
                raise ValueError("cannot re-truncate with a different grading")
            cap = min(cap, self.cap)
        return Series(self.n, self.rank, self.terms, grading, cap)

    def exact(self) -> "Series":
        """Drop the precision marker (use only when the terms are known to be complete)."""
        return Series(self.n, self.rank, self.terms)

    def shift(self, m=None, r: int = 0, q=None) -> "Series":
        """Multiply by the monomial ``z^(m, r, q)``."""
        return mul(Series.monomial(self.n, self.rank, m, r, q), self)

    def pure_Q_part(self) -> "Series":
        return pure_Q_part(self)

    # output
    def to_json(self) -> list[dict]:
        return [
            {"m": list(e.m), "r": e.r, "q": list(e.q), "coeff": str(c)}
            for e, c in self
        ]

    @classmethod
    def from_json(cls, items: Sequence[dict], n: int, rank: int) -> "Series":
        terms = {}
        for it in items:
            terms[tuple(it["m"]) + (it.get("r", 0),) + tuple(it["q"])] = Fraction(it["coeff"])
        return cls(n, rank, terms)

    def render(self, names: tuple[list[str], list[str]] | None = None, rvar: str = "s") -> str:
        mnames, qnames = names or _var_names(self.n, self.rank)
        if not self.terms:
            return "0"
        parts = []
        for e, c in self:
            factors = []
            for name, p in list(zip(mnames, e.m)) + [(rvar, e.r)] + list(zip(qnames, e.q)):
                if p == 1:
                    factors.append(name)
                elif p != 0:
                    factors.append(f"{name}^{p}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        out = " + ".join(parts).replace("+ -", "- ")
        if self.cap is not None:
            out += f" + O(w>{self.cap})"
        return out

    def __repr__(self) -> str:
        return f"Series({self.render()})"


def _product_cap(a: Series, b: Series) -> Fraction | None:
    # a = A + O(cap_a), b = B + O(cap_b)  =>  ab = AB + O(min(cap_a + val B, cap_b + val A))
    caps = []
    if a.cap is not None:
        vb = b.valuation(a.grading)
        caps.append(a.cap + vb if vb is not None else None)
    if b.cap is not None:
        va = a.valuation(b.grading)
        caps.append(b.cap + va if va is not None else None)
    caps = [c for c in caps if c is not None]
    return min(caps) if caps else None


def mul(a: Series, b: Series, cap=None) -> Series:
    """Product, truncated to the precision both factors support.

    An explicit ``cap`` truncates further (never beyond what the factors
    determine).
    """
    a._check(b)
    grading = a.grading if a.cap is not None else b.grading
    limit = cap
    cap = _product_cap(a, b)
    if limit is not None and cap is not None:
        cap = min(cap, Fraction(limit))
    if (a.cap is not None or b.cap is not None) and cap is None:
        # one factor is known to be zero modulo its cap
        return Series(a.n, a.rank, {}, grading, a.cap if a.cap is not None else b.cap)
    out: dict[Key, Fraction] = {}
    if cap is None:
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + ca * cb
        return Series(a.n, a.rank, out)

    wfun, den = grading._scaled(a.n)
    icap = math.floor(cap * den)
    bl = sorted(((wfun(k), k, c) for k, c in b.terms.items()), key=lambda t: t[0])
    for ka, ca in a.terms.items():
        wa = wfun(ka)
        for wb, kb, cb in bl:
            if wa + wb > icap:
                break
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + ca * cb
    return Series._raw(a.n, a.rank, out, grading, cap)


def _prepare(f: Series, grading: Grading | None, cap) -> Series:
    if grading is not None and cap is not None:
        return f.truncate(grading, cap)
    if f.cap is None:
        raise ValueError("an exact series needs a grading and cap for this operation")
    return f


def _powers(h: Series, what: str) -> Iterator[tuple[int, Series]]:
    """Successive truncated powers ``h^i``, stopping once they vanish."""
    val = h.valuation()
    if val is not None and val <= 0:
        raise TruncationOverflow(f"{what}: non-constant part has a monomial of weight {val} <= 0")
    factor_cap = math.floor(h.cap / val) if val is not None else 0
    power = h
    i = 1
    while power:
        if i > factor_cap:
            raise TruncationOverflow(f"{what}: power {i} nonzero beyond factor cap {factor_cap}")
        yield i, power
        power = mul(power, h, cap=h.cap)
        i += 1


def factor_cap(f: Series) -> int:
    """Largest number of non-constant factors that can survive truncation."""
    h = {k: c for k, c in f.terms.items() if any(k)}
    val = Series._raw(f.n, f.rank, h, f.grading, f.cap).valuation()
    return 0 if val is None else math.floor(f.cap / val)


def log(f: Series, grading: Grading | None = None, cap=None) -> Series:
    """``log f = sum_{i>=1} (-1)^(i+1) (f-1)^i / i`` for ``f`` with constant term 1."""
    f = _prepare(f, grading, cap)
    if f.constant_term != 1:
        raise ConstantTermNotOne(f"log needs constant term 1, got {f.constant_term}")
    one = Series.one(f.n, f.rank).truncate(f.grading, f.cap)
    h = f - one
    acc: dict[Key, Fraction] = {}
    for i, power in _powers(h, "log"):
        c = Fraction((-1) ** (i + 1), i)
        for k, v in power.terms.items():
            acc[k] = acc.get(k, 0) + c * v
    return Series._raw(f.n, f.rank, acc, f.grading, f.cap)


def exp(g: Series, grading: Grading | None = None, cap=None) -> Series:
    """Truncated exponential of a series with zero constant term."""
    g = _prepare(g, grading, cap)
    if g.constant_term != 0:
        raise ValueError("exp needs a series with zero constant term")
    acc: dict[Key, Fraction] = {(0,) * (g.n + 1 + g.rank): Fraction(1)}
    for i, power in _powers(g, "exp"):
        c = Fraction(1, math.factorial(i))
        for k, v in power.terms.items():
            acc[k] = acc.get(k, 0) + c * v
    return Series._raw(g.n, g.rank, acc, g.grading, g.cap)


def inverse(f: Series, grading: Grading | None = None, cap=None) -> Series:
    """``1/f = sum (-(f-1))^i`` for ``f`` with constant term 1."""
    f = _prepare(f, grading, cap)
    if f.constant_term != 1:
        raise ConstantTermNotOne(f"inverse needs constant term 1, got {f.constant_term}")
    one = Series.one(f.n, f.rank).truncate(f.grading, f.cap)
    h = one - f
    acc = dict(one.terms)
    for _, power in _powers(h, "inverse"):
        for k, v in power.terms.items():
            acc[k] = acc.get(k, 0) + v
    return Series._raw(f.n, f.rank, acc, f.grading, f.cap)


def power(f: Series, e: int, grading: Grading | None = None, cap=None) -> Series:
    """``f^e``; negative exponents go through the geometric-series inverse."""
    if e < 0:
        return power(inverse(f, grading, cap), -e)
    if grading is not None and cap is not None:
        f = f.truncate(grading, cap)
    result = Series.one(f.n, f.rank)
    if f.cap is not None:
        result = result.truncate(f.grading, f.cap)
    for _ in range(e):
        result = mul(result, f)
    return result


def pure_Q_part(f: Series) -> Series:
    """Sub-series of monomials ``z^q`` (``m = 0`` and ``r = 0``)."""
    n = f.n
    terms = {k: c for k, c in f.terms.items() if not any(k[: n + 1])}
    return Series(f.n, f.rank, terms, f.grading, f.cap)


def transport_slab(f: Series, v: int, w: int, kd) -> Series:
    """Move a slab function from vertex ``v`` to an adjacent vertex ``w``.

    Multiplies by ``z^(v - w, 0, psibar(v) - psibar(w))``.
    """
    dec = kd.dec
    if v != w and not dec.adjacent(v, w):
        raise NotAdjacent(f"vertices {dec.vertices[v]} and {dec.vertices[w]} share no maximal cell")
    m = tuple(a - b for a, b in zip(dec.vertices[v], dec.vertices[w]))
    q = tuple(a - b for a, b in zip(kd.psibar[v], kd.psibar[w]))
    return f.shift(m, 0, q)
