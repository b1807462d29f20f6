"""Batch command-line front end.

Exit codes: 0 success, 1 precondition/verification failures, 2 usage or
parse errors.  All diagnostics go to stderr; every subcommand takes --json
for machine-readable output carrying the same data as the text form.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import __version__
from .classify import classify_set, contract_graph, core_of_formula, exists_components, graph_of, treewidth
from .counting import brute_force_count, brute_force_count_pp, count_ep, count_pp
from .equivalence import (counting_equivalent, joint_distinguishing_structure,
                          logically_equivalent, semi_counting_equivalent)
from .errors import EpcountError, ParseError
from .expansion import plus_set, star_expansion, all_free_part
from .logic import (DisjunctiveEp, EpFormula, PpFormula, canonical_pp_text, normalize_ep,
                    to_structure_view)
from .parser import parse_formula_file, parse_structure_file
from .randgen import (random_all_free_disjunctive, random_ep_ast, random_normalized_ep,
                      random_structure)
from .reductions import ep_count_from_pp_oracle, per_term_counts_from_sum_oracle, pp_count_from_ep_oracle
from .structures import Signature, Structure, product, unit_structure

DEFAULT_MAX_WITNESS = int(os.environ.get("EPCOUNT_MAX_WITNESS_SIZE", "5"))


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from exc


def _load_formulas(path: str) -> tuple[Signature, list[tuple[str, EpFormula]]]:
    return parse_formula_file(_read(path), path=path)


def _load_single_formula(path: str) -> tuple[Signature, str, EpFormula]:
    signature, queries = _load_formulas(path)
    name, phi = queries[0]
    return signature, name, phi


def _load_structures(path: str, signature: Signature) -> list[tuple[str, Structure]]:
    return parse_structure_file(_read(path), signature, path=path)


def _as_pp(phi: EpFormula, what: str) -> PpFormula:
    try:
        return to_structure_view(phi)
    except EpcountError as exc:
        raise EpcountError(f"{what} must be a prenex primitive positive formula: {exc}") from exc


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_count(args) -> int:
    signature, queries = _load_formulas(args.formula)
    structures = _load_structures(args.structure, signature)
    rows = []
    for qname, phi in queries:
        for sname, struct in structures:
            if args.engine == "brute":
                value = brute_force_count(phi, struct)
            elif args.engine == "pp":
                value = count_pp(_as_pp(phi, f"query {qname}"), struct)
            else:
                value = count_ep(phi, struct)
            rows.append({"query": qname, "structure": sname, "count": str(value)})
    if args.json:
        print(json.dumps({"engine": args.engine, "counts": rows}, indent=2, sort_keys=True))
    elif len(rows) == 1:
        print(rows[0]["count"])
    else:
        for row in rows:
            print(f"{row['query']} {row['structure']} {row['count']}")
    return 0


def _witness_text(mapping: dict[str, str], lib) -> str:
    return ", ".join(f"{v}↔{mapping[v]}" for v in lib)


def cmd_equiv(args) -> int:
    sig1, name1, f1 = _load_single_formula(args.formula1)
    sig2, name2, f2 = _load_single_formula(args.formula2)
    if sig1 != sig2:
        raise EpcountError("the two formula files declare different signatures")
    p = _as_pp(f1, f"query {name1}")
    q = _as_pp(f2, f"query {name2}")
    if args.mode == "logical":
        verdict = logically_equivalent(p, q)
    elif args.mode == "counting":
        verdict = counting_equivalent(p, q, witness_structure=args.witness,
                                      max_size=args.max_size)
    else:
        verdict = semi_counting_equivalent(p, q, witness_structure=args.witness,
                                           max_size=args.max_size)
    payload = {"mode": args.mode, "equivalent": verdict.equivalent}
    if verdict.equivalent:
        if args.mode == "logical":
            text = "equivalent"
        else:
            text = f"equivalent (renaming witness: {_witness_text(verdict.forward, p.lib)})"
            payload["witness"] = {v: verdict.forward[v] for v in p.lib}
    else:
        text = "not-equivalent"
        if verdict.distinguisher is not None:
            ds = verdict.distinguisher
            cp, cq = count_pp(p, ds), count_pp(q, ds)
            text += (f"\ndistinguishing structure (counts {cp} vs {cq}):\n"
                     f"{ds.serialize('D')}")
            payload["distinguisher"] = ds.serialize("D")
            payload["counts"] = [str(cp), str(cq)]
    _emit(args, payload, text)
    return 0


def cmd_expand(args) -> int:
    _sig, name, phi = _load_single_formula(args.formula)
    disj = normalize_ep(phi)
    if args.plus:
        ps = plus_set(disj)
        lines = ["# all-free expansion terms (kept = does not entail a sentence disjunct)"]
        for (coeff, f), keep in zip(ps.af_star.terms, ps.in_minus):
            marker = "kept" if keep else "dropped"
            lines.append(f"{coeff} {canonical_pp_text(f)}  [{marker}]")
        lines.append("# sentence disjuncts")
        for th in ps.sentences:
            lines.append(canonical_pp_text(th))
        payload = {
            "query": name,
            "af_star": [{"coefficient": c, "formula": canonical_pp_text(f), "kept": k}
                        for (c, f), k in zip(ps.af_star.terms, ps.in_minus)],
            "sentences": [canonical_pp_text(t) for t in ps.sentences],
        }
        _emit(args, payload, "\n".join(lines))
    else:
        free, sentences = all_free_part(disj)
        if sentences:
            raise EpcountError(
                "formula has sentence disjuncts; use --plus for the general-case sets")
        star = star_expansion(DisjunctiveEp(disj.lib, free))
        payload = {"query": name,
                   "terms": [{"coefficient": c, "formula": canonical_pp_text(f)}
                             for c, f in star.terms]}
        _emit(args, payload, star.serialize())
    return 0


def cmd_normalize(args) -> int:
    _sig, name, phi = _load_single_formula(args.formula)
    disj = normalize_ep(phi)
    payload = {"query": name,
               "lib": list(disj.lib),
               "disjuncts": [canonical_pp_text(d) for d in disj.disjuncts]}
    _emit(args, payload, "\n".join(canonical_pp_text(d) for d in disj.disjuncts))
    return 0


def cmd_core(args) -> int:
    _sig, name, phi = _load_single_formula(args.formula)
    pp = _as_pp(phi, f"query {name}")
    result = core_of_formula(pp)
    sig_line = "# signature: " + " ".join(f"{n}/{a}" for n, a in result.signature.relations)
    payload = {"query": name, "core": result.serialize("core"),
               "signature": [[n, a] for n, a in result.signature.relations]}
    _emit(args, payload, sig_line + "\n" + result.serialize("core"))
    return 0


def cmd_classify(args) -> int:
    named = []
    signature = None
    for path in args.formulas:
        sig, queries = _load_formulas(path)
        if signature is None:
            signature = sig
        elif signature != sig:
            raise EpcountError("formula files declare different signatures")
        named.extend(queries)
    report = classify_set(named, args.width)
    _emit(args, report.to_dict(), report.to_text())
    return 0


def cmd_distinguish(args) -> int:
    pps = []
    signature = None
    for path in args.formulas:
        sig, queries = _load_formulas(path)
        if signature is None:
            signature = sig
        elif signature != sig:
            raise EpcountError("formula files declare different signatures")
        for qname, phi in queries:
            pps.append((qname, _as_pp(phi, f"query {qname}")))
    c = joint_distinguishing_structure([f for _n, f in pps], max_size=args.max_size)
    counts = [(qname, count_pp(f, c)) for qname, f in pps]
    lines = [c.serialize("C")]
    lines.extend(f"# |{qname}(C)| = {value}" for qname, value in counts)
    payload = {"structure": c.serialize("C"),
               "counts": {qname: str(value) for qname, value in counts}}
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_oracle_demo(args) -> int:
    signature, name, phi = _load_single_formula(args.formula)
    structures = _load_structures(args.structure, signature)
    _sname, b = structures[0]
    disj = normalize_ep(phi)
    transcript: list[str] = []
    lines: list[str] = []
    payload: dict = {"query": name, "direction": args.direction}

    if args.direction == "pp2ep":
        ps = plus_set(disj)

        def pp_oracle(f: PpFormula, d: Structure) -> int:
            value = brute_force_count_pp(f, d)
            transcript.append(f"oracle |{canonical_pp_text(f)}| on {d.size()} elements = {value}")
            return value

        got = ep_count_from_pp_oracle(disj, ps, b, pp_oracle)
        want = brute_force_count(phi, b)
        lines.append(f"count via pp oracles: {got}")
        lines.append(f"brute force check:    {want}")
        payload.update({"count": str(got), "brute_force": str(want)})
    else:
        ps = plus_set(disj)

        def ep_oracle(d: Structure) -> int:
            value = count_ep(disj, d)
            transcript.append(f"oracle |{name}| on {d.size()} elements = {value}")
            return value

        recovered = {}
        for psi in ps.plus_formulas():
            value = pp_count_from_ep_oracle(psi, disj, b, ep_oracle, plus=ps)
            check = count_pp(psi, b)
            recovered[canonical_pp_text(psi)] = (value, check)
        for text, (value, check) in recovered.items():
            lines.append(f"|{text}| = {value} (direct: {check})")
        payload["recovered"] = {k: {"value": str(v), "direct": str(c)}
                                for k, (v, c) in recovered.items()}
    lines.append("# oracle transcript")
    lines.extend(transcript)
    payload["transcript"] = transcript
    _emit(args, payload, "\n".join(lines))
    return 0


def _selftest_suites(seed: int, cases: int):
    sig = Signature.of(E=2, F=1)
    rng = random.Random(seed)

    def suite_engines():
        for _ in range(cases):
            phi = random_ep_ast(rng, sig, lib_size=2, depth=2)
            b = random_structure(rng, sig, 3)
            if brute_force_count(phi, b) != count_ep(phi, b):
                return False, f"engine disagreement on {phi}"
        return True, None

    def suite_component_product():
        from .logic import components
        for _ in range(cases):
            f = random_structure(rng, sig, 3)
            pp = random_ep_ast(rng, sig, lib_size=2, depth=1)
            try:
                view = to_structure_view(pp)
            except EpcountError:
                continue
            total = count_pp(view, f)
            prod = 1
            for comp in components(view):
                prod *= count_pp(comp, f)
            if total != prod:
                return False, "component product law failed"
        return True, None

    def suite_hat():
        from .logic import hat
        from .randgen import random_pp
        for _ in range(cases):
            pp = random_pp(rng, sig, lib_size=2, extra_vars=2, max_atoms=3)
            b = random_structure(rng, sig, 3)
            full = count_pp(pp, b)
            if full != 0 and full != count_pp(hat(pp), b):
                return False, "hat count law failed"
        return True, None

    def suite_expansion():
        for _ in range(cases):
            disj = random_all_free_disjunctive(rng, sig, max_disjuncts=3)
            b = random_structure(rng, sig, 3)
            star = star_expansion(disj)
            total = sum(c * count_pp(f, b) for c, f in star.terms)
            from .logic import disjunctive_to_ep
            if total != brute_force_count(disjunctive_to_ep(disj), b):
                return False, "inclusion-exclusion identity failed"
        return True, None

    def suite_product_law():
        from .randgen import random_pp
        for _ in range(cases):
            pp = random_pp(rng, sig, lib_size=2, extra_vars=1, max_atoms=2)
            d1 = random_structure(rng, sig, 2)
            d2 = random_structure(rng, sig, 2)
            if count_pp(pp, product(d1, d2)) != count_pp(pp, d1) * count_pp(pp, d2):
                return False, "multiplicativity failed"
        return True, None

    def suite_round_trips():
        for _ in range(max(1, cases // 5)):
            disj = random_normalized_ep(rng, sig, with_sentence=rng.random() < 0.4)
            b = random_structure(rng, sig, 3)
            ps = plus_set(disj)
            got = ep_count_from_pp_oracle(disj, ps, b, lambda f, d: brute_force_count_pp(f, d))
            if got != count_ep(disj, b):
                return False, "pp-oracle round trip failed"
            oracle = lambda d: count_ep(disj, d)
            for psi in ps.plus_formulas():
                if pp_count_from_ep_oracle(psi, disj, b, oracle, plus=ps) != count_pp(psi, b):
                    return False, "ep-oracle round trip failed"
        return True, None

    return [("count-engines-agree", suite_engines),
            ("component-product", suite_component_product),
            ("hat-counts", suite_hat),
            ("inclusion-exclusion", suite_expansion),
            ("product-multiplicativity", suite_product_law),
            ("oracle-round-trips", suite_round_trips)]


def cmd_selftest(args) -> int:
    failures = 0
    results = []
    for name, fn in _selftest_suites(args.seed, args.cases):
        ok, detail = fn()
        results.append({"suite": name, "ok": ok, "detail": detail})
        status = "PASS" if ok else f"FAIL ({detail})"
        if not args.json:
            print(f"{name}: {status}")
        if not ok:
            failures += 1
    if args.json:
        print(json.dumps({"seed": args.seed, "cases": args.cases, "results": results},
                         indent=2, sort_keys=True))
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epcount",
        description="Count answers to existential positive queries and analyze them.")
    parser.add_argument("--version", action="version", version=f"epcount {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="emit machine-readable JSON")

    p = sub.add_parser("count", help="count answers of queries on structures")
    p.add_argument("formula")
    p.add_argument("structure")
    p.add_argument("--engine", choices=("brute", "pp", "ep"), default="ep")
    add_json(p)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("equiv", help="decide equivalence of two pp queries")
    p.add_argument("formula1")
    p.add_argument("formula2")
    p.add_argument("--mode", choices=("logical", "counting", "semi"), required=True)
    p.add_argument("--witness", action="store_true",
                   help="search a distinguishing structure on non-equivalence")
    p.add_argument("--max-size", type=int, default=DEFAULT_MAX_WITNESS)
    add_json(p)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("expand", help="print the inclusion-exclusion expansion")
    p.add_argument("formula")
    p.add_argument("--plus", action="store_true",
                   help="print the general-case sets (expansion flags + sentences)")
    add_json(p)
    p.set_defaults(fn=cmd_expand)

    p = sub.add_parser("normalize", help="print the normalized disjunctive form")
    p.add_argument("formula")
    add_json(p)
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("core", help="print the core of a pp query (augmented form)")
    p.add_argument("formula")
    add_json(p)
    p.set_defaults(fn=cmd_core)

    p = sub.add_parser("classify", help="structural report with trichotomy case")
    p.add_argument("formulas", nargs="+")
    p.add_argument("--width", type=int, required=True)
    add_json(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("distinguish", help="joint distinguishing structure for pp queries")
    p.add_argument("formulas", nargs="+")
    p.add_argument("--max-size", type=int, default=DEFAULT_MAX_WITNESS)
    add_json(p)
    p.set_defaults(fn=cmd_distinguish)

    p = sub.add_parser("oracle-demo", help="run an oracle reduction with transcripts")
    p.add_argument("formula")
    p.add_argument("structure")
    p.add_argument("--direction", choices=("ep2pp", "pp2ep"), required=True)
    add_json(p)
    p.set_defaults(fn=cmd_oracle_demo)

    p = sub.add_parser("selftest", help="run the randomized property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=25)
    add_json(p)
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EpcountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
