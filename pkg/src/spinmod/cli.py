"""Batch command-line surface: enumeration, verification and
tropicalization queries.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 budget
exceeded.  All outputs are deterministic for fixed inputs and flags; the
fuzz suites log their seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .errors import BudgetError, InputError, SpinmodError, VerificationError
from .graphs import is_stable
from .posets import (build_cyclic_poset, build_graph_poset, build_spin_poset,
                     poset_stats)
from .tropical import (FamilyDescriptor, build_cone_complex, cells_to_csv,
                       diagram_check, family_generic_fiber,
                       family_stable_model, pi_trop, trop_family)
from .verify import run_suites

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _parser():
    parser = argparse.ArgumentParser(
        prog="spinmod",
        description="Enumerate and verify spin structures on stable graphs "
                    "and tropical spin curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g", type=int, required=True, help="genus")
    common.add_argument("--n", type=int, required=True, help="number of legs")
    common.add_argument("--out", type=Path, default=None,
                        help="directory for output files")
    common.add_argument("--budget-edges", type=int, default=None,
                        help="override the desk-scale edge budget")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker processes for per-class checks")

    enum = sub.add_parser("enumerate", parents=[common],
                          help="enumerate iso classes and their poset")
    enum.add_argument("--kind", choices=("graphs", "cyclic", "spin"),
                      default="spin")
    enum.add_argument("--format", choices=("json", "dot", "csv"),
                      default="json")

    verify = sub.add_parser("verify", parents=[common],
                            help="run verification suites")
    verify.add_argument("--suite",
                        choices=("counts", "posets", "functoriality",
                                 "refine", "all"),
                        default="all")
    verify.add_argument("--fuzz", type=int, default=1000,
                        help="number of fuzzed contraction chains")
    verify.add_argument("--seed", type=int, default=0,
                        help="fuzz seed (logged in the report)")

    trop = sub.add_parser("trop",
                          help="tropicalize a family descriptor JSON file")
    trop.add_argument("file", type=Path)
    trop.add_argument("--out", type=Path, default=None)
    return parser


def _write_outputs(out_dir, files):
    paths = []
    if out_dir is None:
        return paths
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        path = out_dir / name
        path.write_text(text)
        paths.append(str(path))
    return paths


def _report(command, inputs, body, started, outputs):
    return {
        "command": command,
        "inputs": inputs,
        **body,
        "timings": {"seconds": round(time.time() - started, 3)},
        "outputs": outputs,
    }


def cmd_enumerate(args):
    started = time.time()
    if 2 * args.g - 2 + args.n <= 0:
        raise InputError(f"no stable graphs at genus {args.g} with "
                         f"{args.n} legs (need 2g - 2 + n > 0)")
    builder = {"graphs": build_graph_poset, "cyclic": build_cyclic_poset,
               "spin": build_spin_poset}[args.kind]
    poset = builder(args.g, args.n, budget_edges=args.budget_edges)
    stats = poset_stats(poset)

    files = {}
    base = f"{args.kind}_{args.g}_{args.n}"
    if args.format == "json":
        files[f"{base}.json"] = json.dumps(
            poset.to_json_dict(with_reps=True), indent=2, sort_keys=True)
    elif args.format == "dot":
        files[f"{base}.dot"] = poset.to_dot()
    else:
        if args.kind == "spin":
            cells, _ = build_cone_complex(args.g, args.n, poset=poset)
            files[f"{base}.csv"] = cells_to_csv(cells)
        else:
            lines = ["key,rank"] + [f"{nd.key},{nd.rank}"
                                    for nd in poset.nodes]
            files[f"{base}.csv"] = "\n".join(lines) + "\n"
    outputs = _write_outputs(args.out, files)
    body = {"counts": {"nodes": len(poset.nodes),
                       "covers": len(poset.covers)},
            "rank_histogram": stats["rank_histogram"],
            "components": stats["components"]}
    if args.kind == "spin":
        body["parity_split"] = stats["parity_split"]
    return _report("enumerate",
                   {"g": args.g, "n": args.n, "kind": args.kind,
                    "format": args.format},
                   body, started, outputs)


def cmd_verify(args):
    started = time.time()
    if 2 * args.g - 2 + args.n <= 0:
        raise InputError(f"no stable graphs at genus {args.g} with "
                         f"{args.n} legs (need 2g - 2 + n > 0)")
    checks = run_suites(args.g, args.n, args.suite,
                        budget_edges=args.budget_edges, fuzz=args.fuzz,
                        seed=args.seed, jobs=args.jobs)
    body = {"suite": args.suite,
            "checks": checks,
            "passed": sum(1 for c in checks if c["status"] == "pass"),
            "failed": 0}
    files = {f"verify_{args.g}_{args.n}_{args.suite}.json":
             json.dumps(body, indent=2, sort_keys=True)}
    outputs = _write_outputs(args.out, files)
    return _report("verify", {"g": args.g, "n": args.n, "suite": args.suite,
                              "fuzz": args.fuzz, "seed": args.seed},
                   body, started, outputs)


def cmd_trop(args):
    started = time.time()
    try:
        text = args.file.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"invalid JSON in {args.file} at line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}") from exc
    family = FamilyDescriptor.from_json_dict(data)
    if not is_stable(family.graph):
        raise InputError("family descriptor graph is not stable")

    psi = trop_family(family)
    stable_model = family_stable_model(family)
    commutes = diagram_check(family)
    fiber = family_generic_fiber(family)
    if not commutes:
        raise VerificationError("tropicalization diagram does not commute")

    body = {
        "tropicalization": psi.to_json_dict(),
        "forgetful_image": pi_trop(psi).to_json_dict(),
        "stable_model": stable_model.to_json_dict(),
        "diagram_commutes": commutes,
        "generic_fiber": {
            "graph": fiber["generic"].graph.to_json_dict(),
            "spin": fiber["generic"].spin.to_json_dict(),
        },
        "order_witness": fiber["witness"].to_json_dict(),
    }
    files = {"trop_result.json": json.dumps(body, indent=2, sort_keys=True)}
    outputs = _write_outputs(args.out, files)
    return _report("trop", {"file": str(args.file)}, body, started, outputs)


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    handler = {"enumerate": cmd_enumerate, "verify": cmd_verify,
               "trop": cmd_trop}[args.command]
    try:
        report = handler(args)
    except VerificationError as exc:
        print(json.dumps({"command": args.command, "status": "fail",
                          "error": str(exc),
                          "witnesses": list(exc.witnesses)}, indent=2))
        return EXIT_VERIFICATION
    except InputError as exc:
        print(json.dumps({"command": args.command, "status": "input-error",
                          "error": str(exc)}, indent=2))
        return EXIT_INPUT
    except BudgetError as exc:
        print(json.dumps({"command": args.command, "status": "budget-error",
                          "error": str(exc)}, indent=2))
        return EXIT_BUDGET
    except SpinmodError as exc:
        print(json.dumps({"command": args.command, "status": "input-error",
                          "error": str(exc)}, indent=2))
        return EXIT_INPUT
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
