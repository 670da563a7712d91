"""Command-line driver.

Exit codes: 0 success, 1 a mathematical check failed, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources

from .exactalg import QMatrix, format_scalar, rank
from .graded_ring import RingModelError, format_class
from .group_ring import DEFAULT_MAX_ORDER, NotAGroup, TooLarge, format_element
from .inertia import (
    ScenarioError,
    build_scenario_cpn_zp,
    build_scenario_symprod2,
    check_associativity,
    check_equivariance,
    check_homomorphism,
    check_injectivity,
    virtual_ring_direct,
)
from .scenario_io import (
    FormatError,
    assignment_from_json,
    dumps,
    load_scenario,
    parse_group_arg,
    parse_manifold_arg,
    presentation_from_json,
    ring_from_spec,
    scenario_to_json,
)
from .subring import (
    DegreeMismatch,
    NonCommutative,
    close_subring,
    dims_table,
    invariant_subring,
    structure_constants,
    verify_presentation,
)
from .sym_product import diagonal_inclusion, generators_symprod, perm_pushforward, sym_action, sym_group, sym_power

CHECKS = ("homomorphism", "injectivity", "associativity", "equivariance")
INPUT_ERRORS = (FormatError, RingModelError, NotAGroup, TooLarge, ScenarioError, DegreeMismatch, NonCommutative,
                KeyError, OSError, ValueError)


class UsageError(ValueError):
    pass


def max_dim() -> int:
    raw = os.environ.get("VIRCOH_MAX_DIM", "4096")
    try:
        v = int(raw)
    except ValueError:
        raise UsageError(f"VIRCOH_MAX_DIM={raw!r} is not an integer") from None
    if v <= 0:
        raise UsageError("VIRCOH_MAX_DIM must be positive")
    return v


# -- rendering ------------------------------------------------------------


def render_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)


def render_dims(table: dict, title: str) -> str:
    header = ["element"] + [f"H^{d}" for d in table["degrees"]] + ["sum"]
    rows = [[r["element"]] + [str(v) for v in r["dims"]] + [str(sum(r["dims"]))] for r in table["rows"]]
    rows.append(["total"] + [str(v) for v in table["by_degree"]] + [str(table["total"])])
    return f"{title}\n{render_table(header, rows)}"


def _sc_json(sc) -> dict:
    return {
        "basis": [{"index": i, "word": lab, "element": format_element(x)}
                  for i, (lab, x) in enumerate(zip(sc.labels, sc.elements))],
        "products": [{"i": i, "j": j, "terms": [[k, format_scalar(c)] for k, c in sorted(row.items())]}
                     for (i, j), row in sorted(sc.table.items())],
    }


def _integrality_json(sc) -> dict:
    bad = sc.non_integral()
    return {"integral": not bad, "constants": sum(len(r) for r in sc.table.values()),
            "non_integral": [{"i": i, "j": j, "k": k, "coef": format_scalar(c)} for i, j, k, c in bad[:20]]}


def _write(report: dict, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(dumps(report))


# -- symprod --------------------------------------------------------------


def cmd_symprod(args) -> int:
    spec = parse_manifold_arg(args.manifold)
    M = ring_from_spec(spec)
    n = args.n
    if n < 1:
        raise UsageError("--n must be positive")
    if M.dim ** n > max_dim():
        raise UsageError(f"ambient ring dimension {M.dim}^{n} exceeds VIRCOH_MAX_DIM={max_dim()}")
    if math.factorial(n) > args.max_group_order:
        raise UsageError(f"|S_{n}| = {math.factorial(n)} exceeds --max-group-order {args.max_group_order}")
    if args.mode == "inertia":
        if n != 2:
            raise UsageError("inertia mode for symmetric products is available for n = 2")
        return _run_inertia(build_scenario_symprod2(M), args, extra={"manifold": spec, "n": n})

    G = sym_group(n, args.max_group_order)
    Y = sym_power(M, n)
    gens = generators_symprod(M, n, args.max_group_order)
    S = close_subring(gens)
    sc = structure_constants(S)
    inv = invariant_subring(S, sym_action(M, n, args.max_group_order))
    inv_sc = structure_constants(inv)
    injective = []
    for g, p in enumerate(G.perms):
        inc = diagonal_inclusion(M, n, p)
        rows = [perm_pushforward(M, n, p, inc.source.basis_class(k)).vector() for k in range(inc.source.dim)]
        rk = rank(QMatrix(rows, Y.dim))
        injective.append({"element": G.labels[g], "source_dim": inc.source.dim, "rank": rk,
                          "injective": rk == inc.source.dim})
    trans = [(x, lab) for x, lab in gens if lab.startswith("transposition")]
    gen_products = []
    for i, (x, a) in enumerate(trans):
        for y, b in trans[i:]:
            gen_products.append({"left": a, "right": b, "product": format_element(x * y)})
    report = {
        "command": "symprod",
        "mode": "group-ring",
        "manifold": spec,
        "n": n,
        "group_order": G.order,
        "ambient_dim": Y.dim,
        "euler_characteristic": M.euler_char(),
        "generators": [{"label": lab, "element": format_element(x)} for x, lab in gens],
        "injectivity": {"injective": all(e["injective"] for e in injective), "elements": injective},
        "image": {"dims": dims_table(S), "structure_constants": _sc_json(sc), "integrality": _integrality_json(sc)},
        "transposition_products": gen_products,
        "invariants": {"dims": dims_table(inv), "structure_constants": _sc_json(inv_sc),
                       "integrality": _integrality_json(inv_sc)},
    }
    _write(report, args.out)
    print(f"symprod: M = {args.manifold} (dim {M.manifold_dim}, chi = {M.euler_char()}), n = {n}, "
          f"|S_{n}| = {G.order}, dim H*(M^{n}) = {Y.dim}")
    print(render_dims(report["image"]["dims"], "image ring f(H*_virt) inside H*(M^n)[S_n]:"))
    if gen_products:
        print("transposition class products:")
        for gp in gen_products:
            print(f"  {gp['left']} * {gp['right']} = {gp['product']}")
    print(render_dims(report["invariants"]["dims"], "S_n-invariant subring:"))
    integ = report["image"]["integrality"]
    print(f"integrality audit: {integ['constants']} nonzero structure constants, "
          f"{'all integral' if integ['integral'] else 'NON-INTEGRAL entries present'}")
    print(f"injectivity: {'all pushforwards injective' if report['injectivity']['injective'] else 'NOT injective'}")
    if args.coeff_audit and not integ["integral"]:
        return 1
    return 0


# -- inertia --------------------------------------------------------------


def _parse_checks(text: str | None) -> list[str]:
    if not text:
        return ["homomorphism", "injectivity"]
    if text == "all":
        return list(CHECKS)
    out = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in out if c not in CHECKS]
    if bad:
        raise UsageError(f"unknown check(s) {bad}; choose from {', '.join(CHECKS)} or all")
    return out


def _run_inertia(sc, args, extra: dict | None = None) -> int:
    checks = _parse_checks(args.check)
    if sc.ambient.dim > max_dim():
        raise UsageError(f"ambient ring dimension {sc.ambient.dim} exceeds VIRCOH_MAX_DIM={max_dim()}")
    if getattr(args, "emit_scenario", None):
        with open(args.emit_scenario, "w") as fh:
            fh.write(dumps(scenario_to_json(sc)))
    vr = virtual_ring_direct(sc)
    results = {}
    failed = []
    for c in checks:
        if c == "injectivity":
            r = check_injectivity(sc)
            results[c] = r
            if not r["injective"] and args.strict:
                failed.append(c)
            continue
        fn = {"homomorphism": check_homomorphism, "associativity": check_associativity,
              "equivariance": check_equivariance}[c]
        rep = fn(sc)
        results[c] = rep.to_dict()
        if not rep.passed:
            failed.append(c)
    issues = sc.issues()
    report = {
        "command": "inertia",
        "scenario": sc.name,
        **(extra or {}),
        "group_order": sc.group.order,
        "ambient_dim": sc.ambient.dim,
        "module": {"dims": vr.dims_table(), "integral": vr.integral,
                   "invariant_dims_by_degree": vr.invariant_dims},
        "checks": results,
        "issues": issues,
        "conventions": ["products sum over intersection components when fixed sets are disconnected"],
        "verdict": "fail" if failed else "pass",
    }
    _write(report, args.out)
    print(f"inertia: {sc.name}, |G| = {sc.group.order}, dim H*(Y) = {sc.ambient.dim}")
    print(render_dims(report["module"]["dims"], "virtual cohomology module (degrees after pushforward):"))
    if vr.invariant_dims is not None:
        print(f"invariant dims by degree: {vr.invariant_dims} (total {sum(vr.invariant_dims)})")
    for c in checks:
        r = results[c]
        if c == "injectivity":
            kd = ", ".join(f"{e['element']}:{e['kernel_dim']}" for e in r["elements"])
            status = "pass" if r["injective"] else ("FAIL" if args.strict else "not injective (image only)")
            print(f"  {c:<14} {status}  kernel dims [{kd}]")
        else:
            print(f"  {c:<14} {'pass' if r['verdict'] == 'pass' else 'FAIL'}  "
                  f"({r['checked']} cases, {len(r['violations'])} violations)")
            for v in r["violations"][:5]:
                print(f"      {v}")
    for msg in issues:
        print(f"  issue: {msg}")
    return 1 if failed else 0


def cmd_inertia(args) -> int:
    if args.scenario:
        sc = load_scenario(args.scenario, args.max_group_order)
        return _run_inertia(sc, args)
    sc = _fixture(args)
    return _run_inertia(sc, args)


def _fixture(args):
    if args.fixture == "symprod2":
        return build_scenario_symprod2(ring_from_spec(parse_manifold_arg(args.manifold or "cp:1")))
    if args.fixture == "cpn-zp":
        p = args.p
        if args.group:
            g = parse_group_arg(args.group)
            if g.get("kind") != "cyclic":
                raise UsageError("cpn-zp needs a cyclic group")
            p = int(g["p"])
        if args.n is None or p is None:
            raise UsageError("cpn-zp needs --n and --p (or --group cyclic:<p>)")
        if p > args.max_group_order:
            raise UsageError(f"|Z/{p}| exceeds --max-group-order {args.max_group_order}")
        return build_scenario_cpn_zp(args.n, p, args.points)
    raise UsageError("give --fixture symprod2|cpn-zp or --scenario <path>")


def cmd_fixtures(args) -> int:
    sc = _fixture(args)
    text = dumps(scenario_to_json(sc))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# -- verify ---------------------------------------------------------------


def _load_presentation(ref: str) -> dict:
    if ref.startswith("bundled:"):
        name = ref.split(":", 1)[1]
        try:
            text = resources.files("vircoh").joinpath("data").joinpath(f"{name}.json").read_text()
        except FileNotFoundError:
            raise UsageError(f"no bundled presentation {name!r}; available: {', '.join(bundled_presentations())}") from None
    else:
        with open(ref) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{ref}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def bundled_presentations() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("vircoh").joinpath("data").iterdir() if p.name.endswith(".json"))


def cmd_verify(args) -> int:
    obj = _load_presentation(args.presentation)
    ring = dict(obj.get("ring", {}))
    if args.manifold:
        ring["manifold"] = args.manifold
    if args.n:
        ring["n"] = args.n
    if args.invariants:
        ring["invariants"] = True
    if "manifold" not in ring or "n" not in ring:
        raise FormatError("ring: need a manifold and n (in the file or via --manifold/--n)")
    M = ring_from_spec(parse_manifold_arg(ring["manifold"]))
    n = int(ring["n"])
    if M.dim ** n > max_dim():
        raise UsageError(f"ambient ring dimension exceeds VIRCOH_MAX_DIM={max_dim()}")
    G = sym_group(n, args.max_group_order)
    Y = sym_power(M, n)
    S = close_subring(generators_symprod(M, n, args.max_group_order))
    if ring.get("invariants"):
        S = invariant_subring(S, sym_action(M, n, args.max_group_order))
    p = presentation_from_json(obj)
    assignment = assignment_from_json(obj.get("assignment", {}), G, Y)
    rep = verify_presentation(S, p, assignment)
    report = {"command": "verify", "presentation": args.presentation, "ring": ring, **rep.to_dict()}
    _write(report, args.out)
    print(f"verify: {args.presentation} against {'invariants of ' if ring.get('invariants') else ''}"
          f"f(H*_virt(({ring['manifold']})^{n}, S_{n}))")
    for r in rep.relations:
        tail = "" if r["holds"] else f"   evaluates to {r['value']}"
        print(f"  relation {r['relation']:<16} {'holds' if r['holds'] else 'FAILS'}{tail}")
    print(f"  generators generate the ring: {'yes' if rep.generates else 'NO'}")
    print(render_table(["", *[f"H^{d}" for d in rep.degrees]],
                       [["quotient", *map(str, rep.quotient_dims)], ["subring", *map(str, rep.subring_dims)]]))
    print(f"verdict: {'pass' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 1


# -- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vircoh", description="Virtual cohomology of global quotient orbifolds.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--max-group-order", type=int, default=DEFAULT_MAX_ORDER)

    p = sub.add_parser("symprod", help="virtual cohomology of (M^n, S_n)")
    p.add_argument("--manifold", required=True, help="cp:<m> | sphere:<k> | file:<path> | comma-separated product")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["group-ring", "inertia"], default="group-ring")
    p.add_argument("--check", help="inertia mode: comma-separated checks or 'all'")
    p.add_argument("--strict", action="store_true", help="treat non-injectivity as a failure")
    p.add_argument("--coeff-audit", action="store_true", help="exit 1 if any structure constant is non-integral")
    common(p)
    p.set_defaults(func=cmd_symprod)

    for name, fn, hlp in (("inertia", cmd_inertia, "direct virtual product and checks"),
                          ("fixtures", cmd_fixtures, "emit a fixture scenario as JSON")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--fixture", choices=["symprod2", "cpn-zp"])
        p.add_argument("--manifold", help="symprod2: the manifold M")
        p.add_argument("--n", type=int, help="cpn-zp: CP^n")
        p.add_argument("--p", type=int, help="cpn-zp: order of the cyclic group")
        p.add_argument("--group", help="cpn-zp: cyclic:<p>")
        p.add_argument("--points", action="store_true", help="cpn-zp: include the isolated fixed points")
        if name == "inertia":
            p.add_argument("--scenario", help="scenario JSON file")
            p.add_argument("--check", help="comma-separated subset of " + ",".join(CHECKS) + ", or 'all'")
            p.add_argument("--strict", action="store_true", help="treat non-injectivity as a failure")
            p.add_argument("--emit-scenario", help="also write the scenario JSON here")
        common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("verify", help="verify a ring presentation")
    p.add_argument("--presentation", required=True, help="path, or bundled:<name>")
    p.add_argument("--manifold")
    p.add_argument("--n", type=int)
    p.add_argument("--invariants", action="store_true")
    common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
