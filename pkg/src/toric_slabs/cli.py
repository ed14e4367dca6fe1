"""Command line front end.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 unsupported
input (non-smooth Kaehler cone, rank-zero ``Q`` where a nonzero ``q`` is
needed), 4 self-check mismatch.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .broken_lines import enumerate_broken_lines, lift, lift_invariance
from .errors import InvalidInput, NonIntegralCoefficient, ToricSlabError, UnsupportedInput, VertexNotInterior
from .fixtures import FIXTURE_NAMES, fixture_document
from .kaehler import check_strict_convexity, kaehler_data
from .polytope import Decomposition, from_dict, validate
from .series import Exponent, Series
from .slabs import mirror_equation, normalize, verify_conditions
from .trees import (
    TreeCounter,
    a_coefficient,
    curve_sign,
    enumerate_curve_types,
    enumerate_disk_types,
    exp_form,
    leaf_labels,
    product_expansion,
    require_interior,
)

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_UNSUPPORTED, EXIT_MISMATCH = 0, 1, 2, 3, 4


class SelfCheckFailed(Exception):
    def __init__(self, report: dict):
        super().__init__("self-check found mismatches")
        self.report = report


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from None


def load_decomposition(args) -> Decomposition:
    if args.input:
        try:
            doc = json.loads(Path(args.input).read_text())
        except OSError as exc:
            raise InvalidInput(f"cannot read {args.input}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"invalid JSON in {args.input}: {exc}") from exc
        name = Path(args.input).stem
    else:
        doc, name = fixture_document(args.fixture), args.fixture
    dec = from_dict(doc, name=name)
    validate(dec).raise_if_failed()
    return dec


def resolve_vertex(dec: Decomposition, text: str | None) -> int:
    """Vertex given by its coordinates; a bare ``0`` always means the origin."""
    if text is None:
        return dec.origin
    coords = _int_list(text)
    if coords == (0,):
        return dec.origin
    if len(coords) != dec.dim:
        raise InvalidInput(f"vertex {text!r} needs {dec.dim} coordinates")
    try:
        return dec.index_of(coords)
    except (KeyError, ValueError):
        raise InvalidInput(f"{coords} is not a lattice point of sigma") from None


def parse_target(text: str, n: int, rank: int) -> tuple[int, ...]:
    """Exponent key from ``"m1,m2;q1,..."`` or a monomial word such as ``x2y2``.

    In words, ``x``, ``y``, ``w`` are the ``M`` variables and ``t`` (or
    ``t1``, ``t2`` ...) the ``Q`` variables; exponents follow the letter,
    optionally after ``^`` (needed after an indexed ``t``, as in ``t1t2^2``).
    """
    if ";" in text or re.fullmatch(r"[-\d, ]+", text):
        m_text, _, q_text = text.partition(";")
        m, q = _int_list(m_text), _int_list(q_text) if q_text else (0,) * rank
        if len(q) == 0:
            q = (0,) * rank
        if len(m) != n or len(q) != rank:
            raise InvalidInput(f"target {text!r} needs {n} M-entries and {rank} Q-entries")
        return m + (0,) + q
    m, q = [0] * n, [0] * rank
    mvars = {1: "x", 2: "xy", 3: "xyw"}.get(n, "")
    pos = 0
    word = text.replace("*", "")
    while pos < len(word):
        letter = word[pos]
        pos += 1
        if letter not in "xywt":
            raise InvalidInput(f"cannot parse target {text!r}")
        idx_text = ""
        if letter == "t" and rank > 1:
            while pos < len(word) and word[pos].isdigit():
                idx_text += word[pos]
                pos += 1
            if not idx_text:
                raise InvalidInput("use t1, t2, ... when Q has rank above one")
        power_text = ""
        if pos < len(word) and word[pos] in "^_":
            pos += 1
        while pos < len(word) and (word[pos].isdigit() or (word[pos] == "-" and not power_text)):
            power_text += word[pos]
            pos += 1
        power = int(power_text) if power_text not in ("", "-") else 1
        if letter == "t":
            i = int(idx_text) - 1 if idx_text else 0
            if not 0 <= i < rank:
                raise InvalidInput(f"no Q variable {letter}{idx_text}")
            q[i] += power
        else:
            i = mvars.find(letter)
            if i < 0:
                raise InvalidInput(f"no M variable {letter!r} in dimension {n}")
            m[i] += power
    return tuple(m) + (0,) + tuple(q)


# ---------------------------------------------------------------------------
# commands; each returns (payload dict, text)


def cmd_analyze(args):
    dec = load_decomposition(args)
    kd = kaehler_data(dec)
    conv = check_strict_convexity(dec, kd)
    walls = [
        {
            "vertices": [list(dec.vertices[i]) for i in w.vertex_indices],
            "opposite": [list(dec.vertices[i]) for i in w.opposite],
            "coefficients": list(w.coefficients),
            "bending": list(img),
        }
        for w, img in zip(dec.walls, conv.bending_images)
    ]
    psibar = {",".join(map(str, dec.vertices[v])): list(kd.psibar[v]) for v in range(len(dec.vertices))}
    payload = {
        "name": dec.name,
        "decomposition": dec.to_dict(),
        "rank": kd.rank,
        "psibar": psibar,
        "walls": walls,
        "strictly_convex": conv.strictly_convex,
    }
    lines = [f"{dec.name}: dimension {dec.dim}, {len(dec.vertices)} lattice points, {len(dec.maximal_cells)} cells"]
    lines.append(f"Q rank: {kd.rank}")
    for key, val in psibar.items():
        lines.append(f"  psibar({key}) = {tuple(val)}")
    lines.append(f"walls: {len(walls)}")
    for w in walls:
        lines.append(f"  {w['vertices']} between {w['opposite']}, bending {tuple(w['bending'])}")
    lines.append(f"strictly convex: {'yes' if conv.strictly_convex else 'no'}")
    return payload, "\n".join(lines)


def cmd_slab(args):
    dec = load_decomposition(args)
    kd = kaehler_data(dec)
    v = resolve_vertex(dec, args.vertex)
    slab = normalize(dec, kd, v, args.order)
    report = verify_conditions(dec, kd, args.order)
    payload = {"slab": slab.to_dict(dec), "conditions": report.to_dict()}
    text = "\n".join(
        [
            f"vertex {dec.vertices[v]}, order {args.order}",
            f"f = {slab.f.render()}",
            f"g = {slab.g.render()}",
            f"conditions 1-4: {'all pass' if report.ok else 'FAIL'}",
        ]
        + [f"  condition {c.condition} at {c.subject}: {c.detail}" for c in report.failures()]
    )
    return payload, text


def cmd_mirror(args):
    dec = load_decomposition(args)
    kd = kaehler_data(dec)
    q = _int_list(args.q_choice) if args.q_choice else None
    eq = mirror_equation(dec, kd, args.order, q)
    text = "\n".join(
        [
            f"q = {eq.q_choice}, order {eq.order}",
            f"generators ({len(eq.generators)}): " + ", ".join(map(str, eq.generators)),
            eq.homogeneous,
            eq.dehomogenized,
        ]
    )
    return eq.to_dict(), text


def cmd_expand(args):
    dec = load_decomposition(args)
    kd = kaehler_data(dec)
    v = resolve_vertex(dec, args.vertex)
    pe = product_expansion(dec, kd, v, args.order)
    payload = pe.to_dict(dec)
    text = "\n".join(
        [
            f"vertex {dec.vertices[v]}, weight cap {args.order}, {len(pe.factors)} factors",
            " ".join(pe.factor_text()),
            f"product = {pe.series.render()}",
        ]
    )
    return payload, text


def cmd_trees(args):
    dec = load_decomposition(args)
    kd = kaehler_data(dec)
    v = resolve_vertex(dec, args.vertex)
    if args.target is None:
        raise InvalidInput("trees needs --target")
    require_interior(dec, kd, v)
    labels = leaf_labels(dec, kd, v)
    key = parse_target(args.target, dec.dim, kd.rank)
    is_curve = not any(key[: dec.dim])
    if is_curve:
        types = enumerate_curve_types(key, labels)
        signs = [curve_sign(t) for t in types]
    else:
        types = enumerate_disk_types(key, labels)
        signs = [t.sign for t in types]
    coeff = sum(signs)
    if not is_curve:
        assert coeff == a_coefficient(key, labels, counter=TreeCounter(labels))
    payload = {
        "target": list(key),
        "monomial": labels.render(key),
        "kind": "curve" if is_curve else "disk",
        "count": len(types),
        "coefficient": coeff,
        "types": [dict(t.summary(), sign=s) for t, s in zip(types, signs)],
    }
    lines = [f"{payload['kind']} types of weight {payload['monomial']}: {len(types)}, coefficient {coeff}"]
    for t, s in zip(types, signs):
        lines.append(f"  sign {s:+d}  interior vertices {t.nonleaf_count}  {_tree_text(t, labels)}")
    if args.dot:
        lines += [t.to_dot(labels, name=f"type{i}") for i, t in enumerate(types)]
    return payload, "\n".join(lines)


def _tree_text(t, labels) -> str:
    if t.is_leaf:
        return labels.render(t.label)
    return "(" + " ".join(_tree_text(c, labels) for c in t.children) + ")"


def cmd_broken_lines(args):
    dec = load_decomposition(args)
    kd = kaehler_data(dec)
    v = resolve_vertex(dec, args.vertex)
    initial = Exponent((0,) * dec.dim, -1, (0,) * kd.rank)
    lines = enumerate_broken_lines(dec, kd, v, initial, args.order)
    total = lift(lines, dec.dim, kd.rank)
    inv = lift_invariance(dec, kd, initial, args.order)
    payload = {
        "base_vertex": list(dec.vertices[v]),
        "order": args.order,
        "lines": [bl.to_dict(dec) for bl in lines],
        "unbent": sum(not bl.bent for bl in lines),
        "lift": total.to_json(),
        "lift_invariance": inv.to_dict(dec),
    }
    out = [f"{len(lines)} broken lines at {dec.vertices[v]}, {payload['unbent']} unbent"]
    for bl in lines:
        mono = Series(dec.dim, kd.rank, {bl.final.exponent.key: bl.final.coeff}).render()
        out.append(f"  {'bent  ' if bl.bent else 'unbent'} final {mono}")
    out.append(f"Lift = {total.render()}")
    out.append(f"lift invariance over adjacent pairs: {'pass' if inv.ok else 'FAIL'}")
    return payload, "\n".join(out)


def selfcheck(fixtures: Sequence[str], order: int) -> dict:
    """Every cross-check on every fixture; returns a JSON-ready report."""
    results = []
    for name in fixtures:
        started = time.perf_counter()
        dec = from_dict(fixture_document(name), name=name)
        kd = kaehler_data(dec)
        checks = {}
        checks["conditions"] = verify_conditions(dec, kd, order).ok
        if kd.rank or dec.walls:
            checks["lift_invariance"] = lift_invariance(dec, kd, None, order).ok
        v = dec.origin
        if kd.rank == 0 or dec.is_interior_vertex(v):
            slab = normalize(dec, kd, v, order)
            f = slab.f.truncate(slab.grading, order)
            pe = product_expansion(dec, kd, v, order)
            checks["product_equals_slab"] = pe.series == f
            checks["exp_form_equals_slab"] = exp_form(dec, kd, v, order) == f
            labels = leaf_labels(dec, kd, v)
            g_terms = {k: c for k, c in slab.g.terms.items() if labels.weight(k) <= order}
            counter = TreeCounter(labels)
            checks["tree_b_equals_g"] = all(counter.b(k) == c for k, c in g_terms.items()) and all(
                k in g_terms for k in pe.b
            )
        results.append({"fixture": name, "order": order, "checks": checks, "seconds": round(time.perf_counter() - started, 3)})
    ok = all(all(r["checks"].values()) for r in results)
    return {"ok": ok, "results": results}


def cmd_selfcheck(args):
    names = [args.fixture] if args.fixture else list(FIXTURE_NAMES)
    report = selfcheck(names, args.order)
    lines = []
    for r in report["results"]:
        for check, passed in r["checks"].items():
            lines.append(f"{'PASS' if passed else 'FAIL'}  {r['fixture']}: {check}")
    lines.append("selfcheck " + ("passed" if report["ok"] else "FAILED"))
    if not report["ok"]:
        raise SelfCheckFailed(report)
    return report, "\n".join(lines)


COMMANDS = {
    "analyze": (cmd_analyze, "walls, Kaehler monoid and psibar"),
    "slab": (cmd_slab, "normalized slab function at a vertex"),
    "mirror": (cmd_mirror, "mirror degeneration equation"),
    "expand": (cmd_expand, "tropical product expansion at a vertex"),
    "trees": (cmd_trees, "tree types of a given weight"),
    "broken-lines": (cmd_broken_lines, "broken lines and lift invariance"),
    "selfcheck": (cmd_selfcheck, "run every cross-check on the built-in fixtures"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toric-slabs", description="Slab functions for toric Calabi-Yau mirrors.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--fixture", choices=FIXTURE_NAMES, help="built-in decomposition")
        src.add_argument("--input", metavar="PATH", help="decomposition as a JSON file")
        p.add_argument("--order", type=int, default=5 if name != "broken-lines" else 1, metavar="K")
        p.add_argument("--vertex", metavar="COORDS", help="vertex coordinates, e.g. -1 or 1,0; 0 is the origin")
        p.add_argument("--q-choice", metavar="VEC", help="element of Q for the mirror equation, e.g. 1 or 1,0")
        p.add_argument("--target", metavar="EXPONENT", help="x2y2 or m1,m2;q")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--dot", action="store_true", help="also print DOT graphs (trees)")
    return parser


def _emit(payload, text, fmt, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(payload, indent=2, default=_json_default) + "\n")
    else:
        stream.write(text + "\n")


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.order < 0:
        parser.error("--order must be non-negative")
    if args.command != "selfcheck" and not (args.fixture or args.input):
        parser.error("one of --fixture or --input is required")
    func = COMMANDS[args.command][0]
    try:
        payload, text = func(args)
    except SelfCheckFailed as exc:
        _emit(exc.report, json.dumps(exc.report, indent=2), args.format)
        return EXIT_MISMATCH
    except ToricSlabError as exc:
        if isinstance(exc, (UnsupportedInput, VertexNotInterior)):
            code = EXIT_UNSUPPORTED
        elif isinstance(exc, NonIntegralCoefficient):
            code = EXIT_INTERNAL
        else:
            code = EXIT_INVALID
        err = {"error": exc.to_dict()}
        if args.format == "json":
            _emit(err, "", "json")
        else:
            print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return code
    except Exception as exc:  # noqa: BLE001
        err = {"error": {"code": "INTERNAL", "message": f"{type(exc).__name__}: {exc}"}}
        if args.format == "json":
            _emit(err, "", "json")
        else:
            print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(payload, text, args.format)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
