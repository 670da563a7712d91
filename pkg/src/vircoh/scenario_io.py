"""JSON formats: manifold specs, group specs, inertia scenarios and presentations.

Scalars are written as ``"num/den"`` strings (``"3"`` for integers) and
matrices row-major, one row per source basis element.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .exactalg import QMatrix, format_scalar, to_scalar
from .graded_ring import CohClass, ManifoldModel, make_cp, make_even_sphere, make_table_ring, tensor_many
from .group_ring import (
    DEFAULT_MAX_ORDER,
    FiniteGroup,
    build_group,
    group_to_spec,
    permute_factors_action,
    trivial_action,
)
from .inertia import FixedComponent, InertiaScenario, Intersection
from .subring import Presentation, element_from_literal, parse_polynomial


class FormatError(ValueError):
    """Malformed input; the message starts with the JSON location."""


def _at(path: str, exc: Exception) -> FormatError:
    root = path.split(".")[0].split("[")[0]
    if isinstance(exc, FormatError) and str(exc).startswith(root):
        return exc
    msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
    if isinstance(exc, KeyError):
        msg = f"missing or unknown key {msg}"
    return FormatError(f"{path}: {msg}")


# -- rings ----------------------------------------------------------------


def ring_from_spec(spec: Mapping, cache: dict | None = None) -> ManifoldModel:
    key = json.dumps(spec, sort_keys=True)
    if cache is not None and key in cache:
        return cache[key]
    kind = spec.get("kind")
    if kind == "cp":
        model = make_cp(int(spec["m"]), symbol=spec.get("symbol", "y"))
    elif kind == "even_sphere":
        model = make_even_sphere(int(spec["k"]))
    elif kind == "table":
        model = make_table_ring(spec)
    elif kind == "tensor":
        model = tensor_many([ring_from_spec(f, cache) for f in spec["factors"]])
    else:
        raise FormatError(f"unknown manifold kind {kind!r}")
    if cache is not None:
        cache[key] = model
    return model


def parse_manifold_arg(text: str) -> dict:
    """``cp:<m>``, ``sphere:<k>``, ``file:<path>``, or a comma-separated product like ``sphere:1,sphere:1``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) > 1:
        return {"kind": "tensor", "factors": [parse_manifold_arg(p) for p in parts]}
    kind, _, arg = text.partition(":")
    try:
        if kind == "cp":
            return {"kind": "cp", "m": int(arg)}
        if kind == "sphere":
            return {"kind": "even_sphere", "k": int(arg)}
        if kind == "file":
            with open(arg) as fh:
                return json.load(fh)
    except (ValueError, OSError) as exc:
        raise FormatError(f"--manifold {text}: {exc}") from exc
    raise FormatError(f"--manifold {text}: expected cp:<m>, sphere:<k> or file:<path>")


def parse_group_arg(text: str) -> dict:
    kind, _, arg = text.partition(":")
    try:
        if kind == "cyclic":
            return {"kind": "cyclic", "p": int(arg)}
        if kind == "symmetric":
            return {"kind": "symmetric", "n": int(arg)}
        if kind == "file":
            with open(arg) as fh:
                return json.load(fh)
    except (ValueError, OSError) as exc:
        raise FormatError(f"--group {text}: {exc}") from exc
    raise FormatError(f"--group {text}: expected cyclic:<p>, symmetric:<n> or file:<path>")


# -- matrices and classes -------------------------------------------------


def matrix_to_json(m: QMatrix) -> list[list[str]]:
    return [[format_scalar(v) for v in r] for r in m.rows]


def matrix_from_json(rows, nrows: int, ncols: int, path: str) -> QMatrix:
    if not isinstance(rows, list) or len(rows) != nrows:
        raise FormatError(f"{path}: expected {nrows} rows")
    try:
        m = QMatrix(rows, ncols)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return m


def class_to_json(u: CohClass) -> dict[str, str]:
    return {u.model.names[k]: format_scalar(c) for k, c in sorted(u.coeffs.items())}


def class_from_json(obj: Mapping, model: ManifoldModel, path: str) -> CohClass:
    try:
        return model.cls({k: to_scalar(v) for k, v in obj.items()})
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise _at(path, exc) from exc


# -- scenarios ------------------------------------------------------------


def scenario_to_json(sc: InertiaScenario) -> dict:
    G = sc.group
    comps = []
    for g in range(1, G.order):
        for c in sc.components[g]:
            comps.append({"g": g, "id": c.id, "ring": c.ring.spec, "push": matrix_to_json(c.push),
                          "pull": matrix_to_json(c.pull), "dim": c.dim})
    pairs = []
    for (g, h, a, b), inters in sorted(sc.pairs.items()):
        if g == 0 or h == 0:
            continue
        pairs.append({
            "g": g, "h": h, "cg": a, "ch": b,
            "intersections": [
                {"ring": it.ring.spec, "ig": matrix_to_json(it.ig), "ih": matrix_to_json(it.ih),
                 "euler": class_to_json(it.euler), "target": it.target, "ipush": matrix_to_json(it.ipush)}
                for it in inters
            ],
        })
    transports = [
        {"h": h, "g": g, "from": cid, "to": tid, "matrix": matrix_to_json(m)}
        for (h, g, cid), (tid, m) in sorted(sc.transports.items())
    ]
    out = {"name": sc.name, "group": group_to_spec(G), "ambient": sc.ambient.spec, "action": sc.action.kind,
           "components": comps, "pairs": pairs}
    if transports:
        out["transports"] = transports
    return out


def scenario_from_json(obj: Mapping, max_order: int = DEFAULT_MAX_ORDER) -> InertiaScenario:
    cache: dict = {}
    try:
        G = build_group(obj["group"], max_order)
    except Exception as exc:
        raise _at("group", exc) from exc
    try:
        Y = ring_from_spec(obj["ambient"], cache)
    except Exception as exc:
        raise _at("ambient", exc) from exc
    action_kind = obj.get("action", "trivial")
    try:
        if action_kind == "trivial":
            act = trivial_action(G, Y)
        elif action_kind == "permute_factors":
            if G.perms is None or len(G.perms[0]) != len(Y.factors):
                raise FormatError("permute_factors needs a symmetric group on the ambient's factors")
            act = permute_factors_action(G, Y)
        else:
            raise FormatError(f"unknown action {action_kind!r}")
    except Exception as exc:
        raise _at("action", exc) from exc

    components: dict[int, list[FixedComponent]] = {}
    rings: dict[tuple[int, str], ManifoldModel] = {}
    for i, c in enumerate(obj.get("components", [])):
        path = f"components[{i}]"
        try:
            g = G.index(c["g"])
            ring = ring_from_spec(c["ring"], cache)
            if "dim" in c and int(c["dim"]) != ring.manifold_dim:
                raise FormatError(f"{path}: dim {c['dim']} does not match the ring's dimension {ring.manifold_dim}")
            push = matrix_from_json(c["push"], ring.dim, Y.dim, f"{path}.push")
            pull = matrix_from_json(c["pull"], Y.dim, ring.dim, f"{path}.pull")
            comp = FixedComponent(g, str(c["id"]), ring, push, pull, Y)
        except Exception as exc:
            raise _at(path, exc) from exc
        components.setdefault(g, []).append(comp)
        rings[(g, comp.id)] = ring
    rings[(0, "Y")] = Y

    pairs: dict[tuple[int, int, str, str], list[Intersection]] = {}
    for i, p in enumerate(obj.get("pairs", [])):
        path = f"pairs[{i}]"
        try:
            g, h = G.index(p["g"]), G.index(p["h"])
            a, b = str(p["cg"]), str(p["ch"])
            ra, rb = rings[(g, a)], rings[(h, b)]
            inters = []
            for j, it in enumerate(p["intersections"]):
                ipath = f"{path}.intersections[{j}]"
                ring = ring_from_spec(it["ring"], cache)
                tgt = rings[(G.mul(g, h), str(it["target"]))]
                inters.append(Intersection(
                    ring,
                    matrix_from_json(it["ig"], ra.dim, ring.dim, f"{ipath}.ig"),
                    matrix_from_json(it["ih"], rb.dim, ring.dim, f"{ipath}.ih"),
                    class_from_json(it["euler"], ring, f"{ipath}.euler"),
                    str(it["target"]),
                    matrix_from_json(it["ipush"], ring.dim, tgt.dim, f"{ipath}.ipush"),
                ))
        except Exception as exc:
            raise _at(path, exc) from exc
        pairs[(g, h, a, b)] = inters

    transports = {}
    for i, t in enumerate(obj.get("transports", [])):
        path = f"transports[{i}]"
        try:
            h, g = G.index(t["h"]), G.index(t["g"])
            src = rings[(g, str(t["from"]))]
            dst = rings[(G.conj(g, h), str(t["to"]))]
            transports[(h, g, str(t["from"]))] = (str(t["to"]), matrix_from_json(t["matrix"], src.dim, dst.dim, path))
        except Exception as exc:
            raise _at(path, exc) from exc

    try:
        return InertiaScenario(str(obj.get("name", "scenario")), G, Y, act, components, pairs, transports)
    except Exception as exc:
        raise _at("scenario", exc) from exc


def load_scenario(path: str, max_order: int = DEFAULT_MAX_ORDER) -> InertiaScenario:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_json(obj, max_order)


def scenarios_equal(a: InertiaScenario, b: InertiaScenario) -> bool:
    return (
        scenario_to_json(a) == scenario_to_json(b)
        and a.ambient.same_structure(b.ambient)
        and a.group.mul_table == b.group.mul_table
    )


# -- presentations --------------------------------------------------------


def presentation_from_json(obj: Mapping) -> Presentation:
    try:
        gens = [(str(g["name"]), int(g["deg"])) for g in obj["generators"]]
    except Exception as exc:
        raise _at("generators", exc) from exc
    names = [n for n, _ in gens]
    rels = []
    for i, r in enumerate(obj.get("relations", [])):
        try:
            if isinstance(r, str):
                rels.append(parse_polynomial(r, names))
            else:
                poly: dict[tuple[int, ...], Fraction] = {}
                for term in r:
                    exps = tuple(int(term["monomial"].get(n, 0)) for n in names)
                    unknown = set(term["monomial"]) - set(names)
                    if unknown:
                        raise FormatError(f"unknown generator(s) {sorted(unknown)}")
                    poly[exps] = poly.get(exps, Fraction(0)) + to_scalar(term["coef"])
                rels.append({e: c for e, c in poly.items() if c})
        except Exception as exc:
            raise _at(f"relations[{i}]", exc) from exc
    try:
        return Presentation(names, [d for _, d in gens], rels, obj.get("coefficients", "rationals"))
    except Exception as exc:
        raise _at("presentation", exc) from exc


def assignment_from_json(obj: Mapping, group: FiniteGroup, model: ManifoldModel) -> dict:
    out = {}
    for name, lit in obj.items():
        try:
            out[name] = element_from_literal(group, model, lit)
        except Exception as exc:
            raise _at(f"assignment.{name}", exc) from exc
    return out


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
