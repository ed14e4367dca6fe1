"""Tropical disk and curve types, and the tree formulas for slab functions.

A disk type is a rooted tree whose leaves carry labels from ``S`` (the
non-constant exponents of the naive slab function) and whose weight is
the sum of its leaf labels.  Every interior vertex has at least two
children; a type is *stable* when siblings have pairwise distinct
weights.  Signs are ``(-1)^(number of interior vertices)``.

Three levels of computation live here:

* explicit enumeration of types (used for small targets and figures),
* a memoized signed count over distinct-part decompositions of the
  target, which never materializes the trees,
* weight-ordered dynamic programs for the whole product
  ``prod (1 + a_m z^m)`` and for ``exp`` of the unstable-tree sum.

All three rest on the same recursive decomposition of a tree at its
root, and the test suite checks them against each other and against
the slab solver.
"""

from __future__ import annotations

import bisect
import math
import sys
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement, product
from typing import Iterable

from .errors import LeafCapExceeded, VertexNotInterior
from .kaehler import KaehlerData
from .polytope import Decomposition
from .series import Exponent, Grading, Series
from .slabs import naive_slab, vertex_grading

Key = tuple[int, ...]


def _add(a: Key, b: Key) -> Key:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Key, b: Key) -> Key:
    return tuple(x - y for x, y in zip(a, b))


@dataclass(frozen=True)
class LeafLabelSet:
    """Leaf labels ``S`` at a vertex together with the grading used to bound trees."""

    n: int
    rank: int
    labels: tuple[Key, ...]
    grading: Grading
    coefficients: tuple[Fraction, ...] | None = None  # None means every label has coefficient 1

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("leaf labels must be distinct")
        if self.coefficients is not None and len(self.coefficients) != len(self.labels):
            raise ValueError("one coefficient per label")
        for lab in self.labels:
            if not any(lab[: self.n]):
                raise ValueError(f"leaf label {lab} has zero M-part")
            if self.weight(lab) <= 0:
                raise ValueError(f"leaf label {lab} does not have positive weight")

    def weight(self, key: Key) -> Fraction:
        return Fraction(self.iweight(key), self.scale)

    @cached_property
    def _coeff(self) -> dict[Key, Fraction]:
        cs = self.coefficients or (Fraction(1),) * len(self.labels)
        return dict(zip(self.labels, (Fraction(c) for c in cs)))

    def coeff(self, key: Key) -> Fraction:
        """Coefficient of ``z^key`` in ``f``: zero unless ``key`` is a label."""
        return self._coeff.get(key, Fraction(0))

    @property
    def unit(self) -> bool:
        return all(c == 1 for c in self._coeff.values())

    def value(self, tree: "TreeType") -> Fraction:
        """Sign of a disk type times the product of its leaf coefficients."""
        out = Fraction(tree.sign)
        for lab in tree.leaves:
            out *= self.coeff(lab)
        return out

    @cached_property
    def _scaled(self):
        return self.grading._scaled(self.n)

    @property
    def scale(self) -> int:
        return self._scaled[1]

    def iweight(self, key: Key) -> int:
        """Weight times :attr:`scale`, an integer."""
        return self._scaled[0](key)

    @cached_property
    def min_weight(self) -> Fraction:
        return min(self.weight(lab) for lab in self.labels)

    def leaf_bound(self, key: Key) -> int:
        """Largest number of leaves a tree of weight ``key`` can have."""
        return math.floor(self.weight(key) / self.min_weight)

    def render(self, key: Key) -> str:
        return Series(self.n, self.rank, {key: 1}).render()


def leaf_labels(dec: Decomposition, kd: KaehlerData, v: int, slab: Series | None = None) -> LeafLabelSet:
    """Labels ``S`` at ``v``.

    By default these are the non-constant exponents of the naive slab
    function, each with coefficient 1.  Passing a slab function instead
    takes every exponent with nonzero ``M``-part together with its
    coefficient; this is needed when ``sigma`` has several interior
    points, because corrections then also sit at other lattice points.
    """
    if slab is None:
        naive = naive_slab(dec, kd, v)
        labels = tuple(sorted(k for k in naive.terms if any(k)))
        return LeafLabelSet(dec.dim, kd.rank, labels, vertex_grading(kd, v))
    items = sorted((k, c) for k, c in slab.terms.items() if any(k[: dec.dim]))
    return LeafLabelSet(
        dec.dim, kd.rank, tuple(k for k, _ in items), vertex_grading(kd, v), tuple(c for _, c in items)
    )


def _as_key(target, labels: LeafLabelSet) -> Key:
    if isinstance(target, Exponent):
        return target.key
    key = tuple(target)
    if len(key) == labels.n + labels.rank:
        key = key[: labels.n] + (0,) + key[labels.n :]
    if len(key) != labels.n + 1 + labels.rank:
        raise ValueError(f"target {target} has the wrong length")
    return key


# ---------------------------------------------------------------------------
# tree types


@dataclass(frozen=True)
class TreeType:
    """Leaf (``label`` set, no children) or interior vertex (two or more children).

    Children are kept in canonical order, so equality of instances is
    equality of types.
    """

    label: Key | None = None
    children: tuple["TreeType", ...] = ()
    weight: Key = field(default=(), compare=False)

    @staticmethod
    def leaf(label: Key) -> "TreeType":
        return TreeType(tuple(label), (), tuple(label))

    @staticmethod
    def node(children: Iterable["TreeType"]) -> "TreeType":
        kids = tuple(sorted(children, key=lambda c: (c.weight, c.encoding)))
        if len(kids) < 2:
            raise ValueError("interior vertices need at least two children")
        w = kids[0].weight
        for c in kids[1:]:
            w = _add(w, c.weight)
        return TreeType(None, kids, w)

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    @cached_property
    def encoding(self) -> str:
        if self.is_leaf:
            return "L(" + ",".join(map(str, self.label)) + ")"
        return "N[" + ",".join(c.encoding for c in self.children) + "]"

    @cached_property
    def leaves(self) -> tuple[Key, ...]:
        if self.is_leaf:
            return (self.label,)
        return tuple(sorted(lab for c in self.children for lab in c.leaves))

    @cached_property
    def vertex_count(self) -> int:
        return 1 + sum(c.vertex_count for c in self.children)

    @property
    def nonleaf_count(self) -> int:
        return self.vertex_count - len(self.leaves)

    @property
    def edge_count(self) -> int:
        return self.vertex_count - 1

    @property
    def sign(self) -> int:
        return -1 if self.nonleaf_count % 2 else 1

    @cached_property
    def is_stable(self) -> bool:
        if self.is_leaf:
            return True
        weights = [c.weight for c in self.children]
        return len(set(weights)) == len(weights) and all(c.is_stable for c in self.children)

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"label": list(self.label)}
        return {"children": [c.to_dict() for c in self.children]}

    def summary(self) -> dict:
        return {
            "tree": self.to_dict(),
            "weight": list(self.weight),
            "vertices": self.vertex_count,
            "interior_vertices": self.nonleaf_count,
            "edges": self.edge_count,
            "sign": self.sign,
            "automorphisms": aut_count(self),
        }

    def to_dot(self, labels: LeafLabelSet | None = None, name: str = "tree") -> str:
        lines = [f"digraph {name} {{"]
        counter = iter(range(10**9))

        def visit(t: TreeType) -> int:
            i = next(counter)
            text = labels.render(t.label) if (labels and t.is_leaf) else ("leaf" if t.is_leaf else "")
            shape = "box" if t.is_leaf else "circle"
            lines.append(f'  n{i} [shape={shape}, label="{text}"];')
            for c in t.children:
                j = visit(c)
                lines.append(f"  n{i} -> n{j};")
            return i

        visit(self)
        lines.append("}")
        return "\n".join(lines)


def aut_count(tree: TreeType, stable: bool | None = None) -> int:
    """Order of the automorphism group of a rooted tree type.

    At each interior vertex identical child subtrees may be permuted.
    Stable types have pairwise distinct sibling weights, so the answer is
    1 for them; passing ``stable=True`` asserts that.
    """
    if tree.is_leaf:
        return 1
    total = 1
    for c in tree.children:
        total *= aut_count(c)
    for mult in Counter(c.encoding for c in tree.children).values():
        total *= math.factorial(mult)
    if stable:
        assert total == 1, "stable tree with nontrivial automorphisms"
    return total


# ---------------------------------------------------------------------------
# explicit enumeration


class _Enumerator:
    def __init__(self, labels: LeafLabelSet, stable: bool):
        self.labels = labels
        self.stable = stable
        self.label_set = set(labels.labels)
        self.memo: dict[Key, list[TreeType]] = {}
        self._reach: dict[Fraction, list[Key]] = {}
        self._sums: dict[Fraction, frozenset[Key]] = {}

    def sums(self, bound: Fraction) -> frozenset[Key]:
        """All non-empty sums of labels of weight at most ``bound``."""
        if bound not in self._sums:
            w = self.labels.iweight
            bound_i = bound * self.labels.scale
            seen = set()
            frontier = [lab for lab in self.labels.labels if w(lab) <= bound_i]
            seen.update(frontier)
            while frontier:
                nxt = []
                for a in frontier:
                    for lab in self.labels.labels:
                        b = _add(a, lab)
                        if b not in seen and w(b) <= bound_i:
                            seen.add(b)
                            nxt.append(b)
                frontier = nxt
            self._sums[bound] = frozenset(seen)
        return self._sums[bound]

    def reachable(self, bound: Fraction) -> list[Key]:
        """The sums from :meth:`sums` with nonzero ``M``-part, by ascending weight."""
        if bound not in self._reach:
            w, n = self.labels.iweight, self.labels.n
            self._reach[bound] = sorted((k for k in self.sums(bound) if any(k[:n])), key=lambda k: (w(k), k))
        return self._reach[bound]

    def types(self, target: Key) -> list[TreeType]:
        if target in self.memo:
            return self.memo[target]
        w = self.labels.weight
        out: list[TreeType] = []
        if target in self.label_set:
            out.append(TreeType.leaf(target))
        wt = w(target)
        if wt >= 2 * self.labels.min_weight:
            parts = [p for p in self.reachable(wt - self.labels.min_weight) if w(p) < wt]
            for split in self._splits(target, parts):
                out.extend(self._assemble(split))
        out = sorted(set(out), key=lambda t: t.encoding)
        self.memo[target] = out
        return out

    def _splits(self, target: Key, parts: list[Key]) -> Iterable[list[Key]]:
        """Decompositions of ``target`` into at least two parts, sorted by index."""
        w = self.labels.weight
        zero = tuple(0 for _ in target)

        def rec(rem: Key, start: int, chosen: list[Key]):
            if rem == zero:
                if len(chosen) >= 2:
                    yield list(chosen)
                return
            wr = w(rem)
            if wr <= 0:
                return
            for i in range(start, len(parts)):
                p = parts[i]
                if w(p) > wr:
                    break
                nxt = i + 1 if self.stable else i
                chosen.append(p)
                yield from rec(_sub(rem, p), nxt, chosen)
                chosen.pop()

        yield from rec(target, 0, [])

    def _assemble(self, split: list[Key]) -> Iterable[TreeType]:
        groups = Counter(split)
        options = []
        for part, mult in sorted(groups.items()):
            sub = self.types(part)
            if not sub:
                return
            options.append(list(combinations_with_replacement(sub, mult)))
        for choice in product(*options):
            yield TreeType.node(t for grp in choice for t in grp)


def _check_cap(target: Key, labels: LeafLabelSet, leaf_cap: int | None) -> None:
    if leaf_cap is not None and labels.leaf_bound(target) > leaf_cap:
        raise LeafCapExceeded(
            f"trees of weight {labels.render(target)} may have up to {labels.leaf_bound(target)} leaves, over the cap {leaf_cap}"
        )


def enumerate_disk_types(target, labels: LeafLabelSet, leaf_cap: int | None = None, stable: bool = True) -> list[TreeType]:
    """All disk types of weight ``target`` (stable by default), in canonical order."""
    key = _as_key(target, labels)
    if not any(key[: labels.n]):
        raise ValueError("disk targets need a nonzero M-part")
    _check_cap(key, labels, leaf_cap)
    return _Enumerator(labels, stable).types(key)


def enumerate_curve_types(q, labels: LeafLabelSet, leaf_cap: int | None = None) -> list[TreeType]:
    """Types of pointed rational curves with root weight ``q`` in ``Q``.

    The root has at least two children of pairwise distinct weights,
    each a stable disk type.
    """
    key = _as_key(q, labels)
    if any(key[: labels.n]) or key[labels.n] != 0 or not any(key):
        raise ValueError("curve targets must be nonzero and pure in Q")
    _check_cap(key, labels, leaf_cap)
    en = _Enumerator(labels, stable=True)
    w = labels.weight
    parts = en.reachable(w(key) - labels.min_weight)
    out = set()
    for split in en._splits(key, parts):
        out.update(en._assemble(split))
    return sorted(out, key=lambda t: t.encoding)


def curve_sign(tree: TreeType) -> int:
    """``(-1)^(|V| - 1)`` with ``V`` the interior vertices, the root included."""
    return -tree.sign


def unstable_weight_sum(target, labels: LeafLabelSet, leaf_cap: int | None = None) -> Fraction:
    """``sum (-1)^(interior vertices) / |Aut|`` over all disk types of weight ``target``."""
    types = enumerate_disk_types(target, labels, leaf_cap, stable=False)
    return sum((labels.value(t) / aut_count(t) for t in types), Fraction(0))


# ---------------------------------------------------------------------------
# signed counts without listing trees


class TreeCounter:
    """Memoized signed counts of stable types.

    ``a(m)`` is ``[m in S]`` minus the signed count of decompositions of
    ``m`` into at least two pairwise distinct parts of smaller weight,
    each weighted by its own ``a``.  Decompositions are counted by the
    subset-sum recursion over the parts sorted by weight; a part is only
    tried when what remains is again a sum of leaf labels.
    """

    def __init__(self, labels: LeafLabelSet):
        self.labels = labels
        self.enum = _Enumerator(labels, stable=True)
        self.label_set = set(labels.labels)
        self._a: dict[Key, int] = {}
        self._parts: list[Key] = []
        self._bound = Fraction(-1)
        self._weights: list[int] = []
        self._count: dict[tuple[Key, int], int] = {}
        self._reach: set[Key] = set()
        self._fits: dict[Key, tuple[int, list[int]]] = {}

    def _ensure_parts(self, bound: Fraction) -> None:
        if bound <= self._bound:
            return
        cand = self.enum.reachable(bound)
        self._bound = bound
        self._count.clear()
        self._fits.clear()
        self._reach = set(self.enum.sums(bound))
        self._parts, self._weights = [], []
        for c in cand:  # ascending weight, so a(c) only needs smaller parts
            if self._a_value(c) != 0:
                self._parts.append(c)
                self._weights.append(self.labels.iweight(c))

    def _a_value(self, m: Key) -> int:
        if m not in self._a:
            w = self.labels.iweight(m)
            j = self._below(w)
            self._a[m] = self.labels.coeff(m) - self._decompositions(m, j)
        return self._a[m]

    def _below(self, w: Fraction) -> int:
        return bisect.bisect_left(self._weights, w)

    def _fitting(self, rem: Key, wr: int) -> list[int]:
        """Indices of parts ``p`` with ``rem - p`` zero or reachable, ascending."""
        checked, idx = self._fits.get(rem, (0, []))
        upto = bisect.bisect_right(self._weights, wr)
        if checked < upto:
            reach = self._reach
            for i in range(checked, upto):
                rest = _sub(rem, self._parts[i])
                if rest in reach or not any(rest):
                    idx.append(i)
            self._fits[rem] = (upto, idx)
        return idx

    def _decompositions(self, rem: Key, j: int) -> int:
        """Signed count of ways to write ``rem`` with distinct parts among the first ``j``."""
        if not any(rem):
            return 1
        wr = self.labels.iweight(rem)
        if wr <= 0 or rem not in self._reach:
            return 0
        j = min(j, bisect.bisect_right(self._weights, wr))
        if j == 0:
            return 0
        key = (rem, j)
        hit = self._count.get(key)
        if hit is not None:
            return hit
        # the largest chosen part is one whose complement can still be filled
        fits = self._fitting(rem, wr)
        total = 0
        for i in fits[: bisect.bisect_left(fits, j)]:
            p = self._parts[i]
            total += self._a[p] * self._decompositions(_sub(rem, p), i)
        self._count[key] = total
        return total

    @staticmethod
    def _deep():
        # recursion depth grows with the number of candidate parts
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)

    # The candidate bound stops one leaf short of the target, so the
    # target itself is added to the reachable set before counting.

    def a(self, target: Key) -> int:
        self._deep()
        w = self.labels.weight(target)
        self._ensure_parts(w - self.labels.min_weight)
        self._reach.add(target)
        return self._a_value(target)

    def b(self, q: Key) -> int:
        self._deep()
        w = self.labels.weight(q)
        self._ensure_parts(w - self.labels.min_weight)
        self._reach.add(q)
        return self._decompositions(q, self._below(self.labels.iweight(q)))


def _intify(x):
    return int(x) if Fraction(x).denominator == 1 else x


def a_coefficient(target, labels: LeafLabelSet, leaf_cap: int | None = None, counter: TreeCounter | None = None) -> int:
    key = _as_key(target, labels)
    if not any(key[: labels.n]):
        raise ValueError("disk targets need a nonzero M-part")
    _check_cap(key, labels, leaf_cap)
    return _intify((counter or TreeCounter(labels)).a(key))


def b_coefficient(q, labels: LeafLabelSet, leaf_cap: int | None = None, counter: TreeCounter | None = None) -> int:
    key = _as_key(q, labels)
    if any(key[: labels.n]) or key[labels.n] != 0 or not any(key):
        raise ValueError("b is defined for nonzero pure Q exponents")
    _check_cap(key, labels, leaf_cap)
    return _intify((counter or TreeCounter(labels)).b(key))


# ---------------------------------------------------------------------------
# whole-series forms


def require_interior(dec: Decomposition, kd: KaehlerData, v: int) -> None:
    if kd.rank > 0 and not dec.is_interior_vertex(v):
        raise VertexNotInterior(f"vertex {dec.vertices[v]} is not in the interior of sigma")


def _level_dp(labels: LeafLabelSet, cap, update):
    """Run a weight-ordered recursion over targets up to weight ``cap``.

    ``acc`` is a truncated series (dict).  At each weight level the new
    coefficients are ``[m in S] - acc[m]``; ``update`` then folds them into
    ``acc``.  Exponents of the same weight cannot interact below the cap
    level, so a whole level can be read off before updating.
    """
    n = labels.n
    w = labels.iweight
    icap = math.floor(cap * labels.scale)
    zero = tuple(0 for _ in labels.labels[0])
    acc: dict[Key, Fraction] = {zero: Fraction(1)}
    found: dict[Key, Fraction] = {}
    label_set = set(labels.labels)
    by_level: dict[int, set[Key]] = {}

    def note(keys):
        for k in keys:
            if any(k[:n]):
                wk = w(k)
                if wk <= icap:
                    by_level.setdefault(wk, set()).add(k)

    note(label_set)
    while by_level:
        level = min(by_level)
        pending = by_level.pop(level)
        new = {}
        for k in pending:
            c = labels.coeff(k) - acc.get(k, 0)
            if c:
                new[k] = Fraction(c)
        for k, c in sorted(new.items()):
            found[k] = c
            note(update(acc, k, c, w, icap))
    return found, acc


def _trunc_mul_factor(acc: dict, key: Key, series: list[tuple[int, Fraction]], w, icap) -> list[Key]:
    """``acc *= sum_j c_j z^(j key)`` in place, truncated at ``icap``; returns touched keys."""
    items = list(acc.items())
    touched = []
    for j, c in series:
        step = tuple(j * x for x in key)
        dw = w(step) - w(tuple(0 for _ in key))
        for k, a in items:
            nk = _add(k, step)
            if w(k) + dw <= icap:
                acc[nk] = acc.get(nk, 0) + a * c
                touched.append(nk)
    for k in [k for k in touched if acc.get(k, 1) == 0]:
        acc.pop(k, None)
    return touched


@dataclass(frozen=True)
class ProductExpansion:
    vertex: int
    order: int
    labels: LeafLabelSet
    factors: tuple[tuple[Key, int], ...]
    series: Series

    @property
    def b(self) -> dict[Key, int]:
        n = self.labels.n
        return {k: int(c) for k, c in self.series.terms.items() if not any(k[: n + 1]) and any(k)}

    def coefficient(self, key) -> int:
        return dict(self.factors).get(_as_key(key, self.labels), 0)

    def factor_text(self) -> list[str]:
        out = []
        for k, a in self.factors:
            mono = self.labels.render(k)
            sign = "+" if a > 0 else "-"
            coef = "" if abs(a) == 1 else f"{abs(a)}*"
            out.append(f"(1 {sign} {coef}{mono})")
        return out

    def to_dict(self, dec: Decomposition) -> dict:
        return {
            "vertex": list(dec.vertices[self.vertex]),
            "order": self.order,
            "factors": [{"exponent": list(k), "monomial": self.labels.render(k), "a": a} for k, a in self.factors],
            "product": self.series.to_json(),
            "product_text": self.series.render(),
        }


def _sorted_factors(found: dict, labels: LeafLabelSet) -> tuple[tuple[Key, int], ...]:
    n = labels.n
    leaves = lambda k: labels.weight(k)  # noqa: E731
    return tuple(sorted(((k, int(c)) for k, c in found.items()), key=lambda kc: (leaves(kc[0]), tuple(-x for x in kc[0][:n]), kc[0])))


def product_expansion(dec: Decomposition, kd: KaehlerData, v: int, k, labels: LeafLabelSet | None = None) -> ProductExpansion:
    """``prod (1 + a_m z^m)`` over all stable-tree weights up to weight ``k``."""
    require_interior(dec, kd, v)
    labels = labels or leaf_labels(dec, kd, v)
    cap = Fraction(k)

    def update(acc, key, c, w, icap):
        return _trunc_mul_factor(acc, key, [(1, c)], w, icap)

    found, acc = _level_dp(labels, cap, update)
    for c in found.values():
        assert c.denominator == 1
    series = Series(dec.dim, kd.rank, acc).truncate(labels.grading, cap)
    return ProductExpansion(v, k, labels, _sorted_factors(found, labels), series)


def unstable_tree_sum(dec: Decomposition, kd: KaehlerData, v: int, k, labels: LeafLabelSet | None = None) -> tuple[Series, Series]:
    """The generating sum ``T`` over unstable types, and ``exp(T)``, both to weight ``k``."""
    require_interior(dec, kd, v)
    labels = labels or leaf_labels(dec, kd, v)
    cap = Fraction(k)

    def update(acc, key, c, w, icap):
        # exp(c z^key) = sum_j c^j / j! z^(j key)
        terms, j, coef = [], 1, Fraction(1)
        while w(tuple(j * x for x in key)) <= icap:
            coef = coef * c / j
            terms.append((j, coef))
            j += 1
        return _trunc_mul_factor(acc, key, terms, w, icap)

    found, acc = _level_dp(labels, cap, update)
    T = Series(dec.dim, kd.rank, found).truncate(labels.grading, cap)
    E = Series(dec.dim, kd.rank, acc).truncate(labels.grading, cap)
    return T, E


def exp_form(dec: Decomposition, kd: KaehlerData, v: int, k, labels: LeafLabelSet | None = None) -> Series:
    return unstable_tree_sum(dec, kd, v, k, labels)[1]
