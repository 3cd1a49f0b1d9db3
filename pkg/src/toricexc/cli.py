"""Command-line interface; every command prints a JSON certificate.

Exit codes: 0 success, 1 mathematical negative (or a failed check),
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import bounds as B
from .cohomology import cohomology, forbidden_index_sets, member_labels, vanishing
from .errors import BadParams, EpsilonOutOfRange, InvalidConfig, ToricError
from .exceptional import MembershipOracle, is_exceptional, max_exceptional_search, parse_window
from .family import build_family, closed_form_forbidden, slab_bounds, validate_construction
from .fan import (
    StackyFan,
    check_fano,
    check_fano_primal,
    check_sign_pattern,
    decompose_picard3,
    rank_k0,
    rank_k0_dual,
)
from .serialize import Certificate, dumps, fan_from_document, parse_rational, parse_vector, to_jsonable
from .strong import build_strong_collection, certify_strong
from .wedge import run_samples

USAGE_ERRORS = (BadParams, EpsilonOutOfRange, InvalidConfig, ValueError, KeyError, json.JSONDecodeError, OSError)


class UsageError(Exception):
    pass


# --- commands on plain inputs --------------------------------------------------------


def _fan(inputs) -> StackyFan:
    return fan_from_document(inputs["fan"])


def _family_instance(inputs):
    return build_family(int(inputs["n"]), int(inputs["k"]), int(inputs["a"]))


def run_family(inputs: dict) -> Certificate:
    cert = Certificate("family", inputs)
    inst = _family_instance(inputs)
    if inputs.get("action", "build") == "validate":
        report = validate_construction(inst)
        cert.outputs = {"params": report["params"], "ok": report["ok"]}
        cert.checks = report["checks"]
        return cert
    rk = rank_k0(inst.fan)
    cert.outputs = {
        "fan": inst.fan.to_json(),
        "rank_k0": rk,
        "X": [list(x) for x in inst.X],
    }
    cert.add_check("rank_k0_closed_form", rk == inst.rk_k0_closed_form() == inst.rk_k0_block_sum(),
                   {"max_cones": rk, "closed_form": inst.rk_k0_closed_form(), "block_sum": inst.rk_k0_block_sum()})
    return cert


def run_rank_k0(inputs: dict) -> Certificate:
    fan = _fan(inputs)
    cert = Certificate("rank-k0", inputs)
    rk, rk_dual = rank_k0(fan), rank_k0_dual(fan)
    cert.outputs = {"rank_k0": rk}
    cert.add_check("dual_volume_agreement", rk == rk_dual, {"primal": rk, "dual": rk_dual})
    return cert


def run_fano(inputs: dict) -> Certificate:
    fan = _fan(inputs)
    cert = Certificate("fano", inputs)
    dual, primal = check_fano(fan), check_fano_primal(fan)
    cert.outputs = dual
    cert.add_check("primal_agreement", dual == primal, primal)
    key = "nef_fano" if inputs.get("nef") else "fano"
    cert.add_check(key, dual[key])
    return cert


def run_decompose(inputs: dict) -> Certificate:
    fan = _fan(inputs)
    cert = Certificate("decompose", inputs)
    d = decompose_picard3(fan)
    cert.outputs = d.to_json()
    if d.functionals:
        cert.add_check("sign_pattern", check_sign_pattern(d, fan, d.sign_kind == "strict"), d.sign_kind)
    return cert


def run_cohomology(inputs: dict) -> Certificate:
    fan = _fan(inputs)
    cert = Certificate("cohomology", inputs)
    L = parse_vector(inputs["bundle"])
    cert.outputs = cohomology(fan, L).to_json()
    return cert


def run_vanishing(inputs: dict) -> Certificate:
    fan = _fan(inputs)
    cert = Certificate("vanishing", inputs)
    L = parse_vector(inputs["bundle"])
    data = forbidden_index_sets(fan)
    higher = bool(inputs.get("higher_only"))
    labels = member_labels(fan, L, data)
    if higher:
        labels = [lab for lab, I in data.sets if lab in labels and I]
    ok = vanishing(fan, L, higher, data)
    cert.outputs = {"vanishes": ok, "forbidden_sets": labels}
    cert.add_check("vanishing", ok, labels)
    return cert


def run_search(inputs: dict) -> Certificate:
    fan = _fan(inputs)
    cert = Certificate("search", inputs)
    window = parse_window(inputs["window"])
    budget = int(inputs.get("budget", 10**6))
    fast, slab = None, None
    if fan.params:
        inst = build_family(fan.params["n"], fan.params["k"], fan.params["a"])
        fast = closed_form_forbidden(inst)
        slab = dict(slab_bounds(inst.params), axis=2)
    res = max_exceptional_search(fan, window, budget, oracle=MembershipOracle(fan, fast=fast), slab=slab)
    cert.outputs = {
        "collection": [list(x) for x in res.collection],
        "length": len(res.collection),
        "flag": res.flag,
        "nodes": res.nodes,
        "upper_bound": res.upper_bound,
    }
    _recheck_exceptional(cert, fan, res.collection, slab)
    return cert


def _recheck_exceptional(cert, fan, collection, slab):
    verdict = is_exceptional(fan, collection)
    cert.add_check("exceptional_generic_oracle", verdict.ok, verdict.violation)
    cert.add_check("length_at_most_rank_k0", len(collection) <= rank_k0(fan), {"rank_k0": rank_k0(fan)})
    if slab and collection:
        zs = [c[slab["axis"]] for c in collection]
        span = max(zs) - min(zs)
        per = max(zs.count(z) for z in set(zs))
        cert.add_check("amplitude_bound", span <= slab["amplitude"], {"span": span, "bound": slab["amplitude"]})
        cert.add_check("z_fixed_bound", per <= slab["z_fixed"], {"max_per_slice": per, "bound": slab["z_fixed"]})


def run_strong(inputs: dict, jobs: int = 1) -> Certificate:
    fan = _fan(inputs)
    cert = Certificate("strong", inputs)
    col = build_strong_collection(fan, jobs=jobs)
    rep = col.report
    cert.outputs = {
        "collection": [list(x) for x in col.bundles],
        "length": len(col),
        "shift": rep["shift"],
        "volume": rep["polytope"]["volume"],
        "rank_k0": rep["rk_k0"],
        "polytope": rep["polytope"],
    }
    cert.add_check("volume_lower_bound", Fraction(rep["polytope"]["volume"]) >= 6 * rep["rk_k0"],
                   {"volume": rep["polytope"]["volume"], "six_rank": 6 * rep["rk_k0"]})
    cert.add_check("length_three_quarters", len(col) >= rep["required"], {"required": rep["required"]})
    ok, trail = certify_strong(fan, col.bundles)
    cert.add_check("strong_exceptional_pairs", ok, {"pairs": len(trail)})
    return cert


def run_sublemma(inputs: dict) -> Certificate:
    cert = Certificate("sublemma", inputs)
    res = run_samples(int(inputs["t"]), int(inputs["samples"]), int(inputs.get("seed", 0)))
    cert.outputs = res
    cert.add_check("inequality_holds", res["holds"], res["failures"][:5])
    return cert


def run_bound(inputs: dict) -> Certificate:
    cert = Certificate("bound", inputs)
    rep = B.bound_components(int(inputs["n"]), int(inputs["k"]), int(inputs["a"]),
                             parse_rational(inputs.get("eps", "1/8")), parse_rational(inputs.get("c", "1")))
    cert.outputs = rep.to_json()
    cert.add_check("intermediate_below_E", B.intermediate_bound(rep.n, rep.k, rep.a, rep.eps) <= rep.E_value)
    return cert


def run_threshold(inputs: dict) -> Certificate:
    cert = Certificate("threshold", inputs)
    n, a = int(inputs["n"]), int(inputs["a"])
    eps, c = parse_rational(inputs.get("eps", "1/8")), parse_rational(inputs.get("c", "1"))
    cutoff = int(inputs.get("cutoff", 10**6))
    k0 = B.counterexample_threshold(n, a, eps, c, cutoff)
    cert.outputs = {"threshold": k0 if k0 is not None else "none below cutoff"}
    if k0 is not None:
        after = c * B.rk_k0_closed_form(n, k0, a) - B.evaluate_E(n, k0, a, eps)
        witness = {"margin_at_threshold": after}
        ok = after > 0
        if k0 > 2:
            before = c * B.rk_k0_closed_form(n, k0 - 1, a) - B.evaluate_E(n, k0 - 1, a, eps)
            witness["margin_before"] = before
            ok = ok and before <= 0
        cert.add_check("sign_change", ok, witness)
    return cert


RUNNERS = {
    "family": run_family,
    "rank-k0": run_rank_k0,
    "fano": run_fano,
    "decompose": run_decompose,
    "cohomology": run_cohomology,
    "vanishing": run_vanishing,
    "search": run_search,
    "strong": run_strong,
    "sublemma": run_sublemma,
    "bound": run_bound,
    "threshold": run_threshold,
}


def run_verify(inputs: dict) -> Certificate:
    """Recompute a certificate from its inputs and compare verdicts."""
    original = Certificate.from_json(inputs["certificate"])
    cert = Certificate("verify", {"command": original.command})
    if original.command not in RUNNERS:
        raise UsageError(f"cannot verify command {original.command!r}")
    fresh = RUNNERS[original.command](dict(original.inputs)).to_json()
    same_outputs = to_jsonable(fresh["outputs"]) == to_jsonable(original.outputs)
    old = [(c["name"], c["status"]) for c in original.checks]
    new = [(c["name"], c["status"]) for c in fresh["checks"]]
    cert.add_check("outputs_match", same_outputs)
    cert.add_check("verdicts_match", old == new, {"recomputed": [dict(name=n, status=s) for n, s in new]})
    if original.command in ("search", "strong") and "collection" in original.outputs:
        fan = fan_from_document(original.inputs["fan"])
        bundles = [tuple(x) for x in original.outputs["collection"]]
        if original.command == "search":
            v = is_exceptional(fan, bundles)
            cert.add_check("collection_exceptional", v.ok, v.violation)
        else:
            ok, _ = certify_strong(fan, bundles)
            cert.add_check("collection_strong", ok)
    cert.outputs = {"verified": cert.ok}
    return cert


# --- argument handling -----------------------------------------------------------------


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("TORIC_EXC_JOBS", "1")))
    except ValueError:
        return 1


def _read_document(path: str | None) -> dict:
    if path in (None, "-"):
        if sys.stdin is None or sys.stdin.isatty():
            raise UsageError("no input: pass --fan FILE or pipe JSON on stdin")
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="worker count (default: $TORIC_EXC_JOBS or 1)")
    common.add_argument("--brief", action="store_true", help="print only the outputs object")

    fan_opt = argparse.ArgumentParser(add_help=False)
    fan_opt.add_argument("--fan", help="fan or certificate JSON file ('-' or omitted: stdin)")

    p = argparse.ArgumentParser(prog="toricexc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("family", parents=[common], help="build or validate Y_{n,k,a}")
    s.add_argument("action", nargs="?", choices=["build", "validate"], default="build")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--a", type=int, required=True)

    sub.add_parser("rank-k0", parents=[common, fan_opt], help="rank of K0 of a fan")
    s = sub.add_parser("fano", parents=[common, fan_opt], help="Fano / nef-Fano test")
    s.add_argument("--nef", action="store_true", help="only require -K nef")
    sub.add_parser("decompose", parents=[common, fan_opt], help="Picard-three cyclic decomposition")

    for name in ("cohomology", "vanishing"):
        s = sub.add_parser(name, parents=[common, fan_opt], help=f"line bundle {name}")
        s.add_argument("--bundle", required=True, help='class as "x,y,z"')
        if name == "vanishing":
            s.add_argument("--higher-only", action="store_true")

    s = sub.add_parser("search", parents=[common, fan_opt], help="windowed exceptional collection search")
    s.add_argument("--window", required=True, help='"x0..x1,y0..y1,z0..z1"')
    s.add_argument("--budget", type=int, default=10**6)

    sub.add_parser("strong", parents=[common, fan_opt], help="strong exceptional collection from a shifted polytope")

    s = sub.add_parser("sublemma", parents=[common], help="random checks of the wedge inequality")
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("bound", parents=[common], help="exact length bound E(n,k,a,eps)")
    for flag in ("--n", "--k", "--a"):
        s.add_argument(flag, type=int, required=True)
    s.add_argument("--eps", default="1/8")
    s.add_argument("--c", default="1")

    s = sub.add_parser("threshold", parents=[common], help="smallest k past which rk K0 beats the bound")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--eps", default="1/8")
    s.add_argument("--c", default="1")
    s.add_argument("--cutoff", type=int, default=10**6)

    s = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    s.add_argument("certificate", nargs="?", help="certificate file ('-' or omitted: stdin)")
    return p


def _inputs(args) -> dict:
    cmd = args.command
    if cmd == "family":
        return {"action": args.action, "n": args.n, "k": args.k, "a": args.a}
    if cmd == "verify":
        return {"certificate": _read_document(args.certificate)}
    if cmd in ("sublemma",):
        return {"t": args.t, "samples": args.samples, "seed": args.seed}
    if cmd == "bound":
        return {"n": args.n, "k": args.k, "a": args.a, "eps": str(parse_rational(args.eps)), "c": str(parse_rational(args.c))}
    if cmd == "threshold":
        return {"n": args.n, "a": args.a, "eps": str(parse_rational(args.eps)), "c": str(parse_rational(args.c)),
                "cutoff": args.cutoff}
    doc = _read_document(args.fan)
    fan = fan_from_document(doc)
    inputs = {"fan": fan.to_json()}
    if cmd == "fano":
        inputs["nef"] = args.nef
    if cmd in ("cohomology", "vanishing"):
        inputs["bundle"] = ",".join(str(x) for x in parse_vector(args.bundle))
    if cmd == "vanishing":
        inputs["higher_only"] = args.higher_only
    if cmd == "search":
        parse_window(args.window)
        inputs.update(window=args.window, budget=args.budget)
    return inputs


def _emit(payload: dict, out: str | None) -> None:
    text = dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


VALUE_FLAGS = ("--window", "--bundle", "--eps", "--c")


def _glue_values(argv: list[str]) -> list[str]:
    """Attach values such as ``-3..3`` to their flag so argparse does not
    mistake them for options."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_glue_values(argv))
    t0 = time.perf_counter()
    try:
        inputs = _inputs(args)
        if args.command == "verify":
            cert = run_verify(inputs)
        elif args.command == "strong":
            cert = run_strong(inputs, jobs=args.jobs)
        else:
            cert = RUNNERS[args.command](inputs)
    except (UsageError, *USAGE_ERRORS) as exc:
        print(f"toricexc {args.command}: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except ToricError as exc:
        _emit({"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}}, args.out)
        return 1
    cert.timing_ms = int((time.perf_counter() - t0) * 1000)
    payload = cert.to_json()
    _emit(payload["outputs"] if args.brief else payload, args.out)
    return 0 if cert.ok else 1


if __name__ == "__main__":
    sys.exit(main())
