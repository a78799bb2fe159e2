"""Command-line front end.

Commands: validate, report, repdim, repcheck, hwv, batch.  Exit codes:
0 = computed, 1 = validation or identity failure, 2 = usage/I-O error.
Model arguments are file paths; a bare bundled name (heisenberg_n1,
sphere_n2, ...) is resolved from QCGEO_DATA if set, else generated
in memory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import models
from .lie_input import ModelError, parse_model, validate_jacobi
from .qc_pipeline import PipelineError, analyze
from .rep_dims import HighestWeight, check_all_identities, module_ledger, weyl_dim


def _load_model(path_or_name: str):
    data_dir = os.environ.get("QCGEO_DATA")
    candidates = [path_or_name]
    if data_dir:
        candidates.append(os.path.join(data_dir, path_or_name))
        candidates.append(os.path.join(data_dir, path_or_name + ".json"))
    for cand in candidates:
        if os.path.isfile(cand):
            with open(cand, "r", encoding="utf-8") as fh:
                return parse_model(fh.read())
    if path_or_name in models.MODEL_NAMES:
        return models.bundled_model(path_or_name)
    raise FileNotFoundError(f"no such model file or bundled name: {path_or_name}")


def cmd_validate(args) -> int:
    try:
        model = _load_model(args.path)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(json.dumps({"ok": False, "error": str(exc)}, sort_keys=True))
        return 1
    failures = validate_jacobi(model)
    if failures:
        diag = {
            "ok": False,
            "failures": [
                {
                    "row": i,
                    "residual": {
                        ",".join(map(str, key[0])): str(v) for key, v in sorted(res.c.items())
                    },
                }
                for i, res in failures
            ],
        }
        print(json.dumps(diag, sort_keys=True))
        return 1
    print(json.dumps({"ok": True, "name": model.name, "n": model.n}, sort_keys=True))
    return 0


def _report_json(model) -> str:
    rep = analyze(model)
    return json.dumps(rep.json_dict(), indent=2, sort_keys=True)


def _report_text(model) -> str:
    rep = analyze(model)
    d = rep.json_dict()
    lines = [f"model {d['name']} (n = {d['n']})"]
    for key in (
        "valid",
        "qc_adapted",
        "qc_orbit",
        "integrable",
        "qc_einstein",
        "four_form_closed",
        "flat",
        "scalar_curvature",
    ):
        lines.append(f"  {key}: {d[key]}")
    return "\n".join(lines)


def cmd_report(args) -> int:
    try:
        model = _load_model(args.path)
    except (FileNotFoundError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        text = _report_json(model) if args.format == "json" else _report_text(model)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_repdim(args) -> int:
    try:
        coeffs = tuple(int(x) for x in args.weights.split(",") if x != "")
        w = HighestWeight(args.n, coeffs, args.sp1 or 0)
    except (ValueError, TypeError) as exc:
        print(f"error: malformed weight list: {exc}", file=sys.stderr)
        return 2
    print(weyl_dim(w))
    return 0


def cmd_repcheck(args) -> int:
    results = check_all_identities(args.max_n, args.max_l)
    rows = []
    ok = True
    for ident, n, l, equal in results:
        ok &= equal
        tag = f"{ident} n={n}" + (f" l={l}" if l is not None else "")
        rows.append(f"{'PASS' if equal else 'FAIL'}  {tag}")
    if args.ledger:
        for n in range(1, args.ledger + 1):
            for name, rep, rank, equal in module_ledger(n):
                ok &= equal
                rows.append(f"{'PASS' if equal else 'FAIL'}  ledger n={n} {name}: {rep} vs {rank}")
    print("\n".join(rows))
    return 0 if ok else 1


def cmd_hwv(args) -> int:
    from .hwv import run_catalog

    results = run_catalog(args.n)
    ok = True
    if args.n == 1:
        print("note: n=1 aliasing alpha3=alpha1, beta2=beta1 is in effect")
    for name, good, size in results:
        ok &= good
        suffix = "" if good else f"  (residual {size} terms)" if size >= 0 else "  (membership failed)"
        print(f"{'PASS' if good else 'FAIL'}  {name}{suffix}")
    return 0 if ok else 1


def cmd_batch(args) -> int:
    if not os.path.isdir(args.directory):
        print(f"error: {args.directory} is not a directory", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    paths = sorted(
        os.path.join(args.directory, f)
        for f in os.listdir(args.directory)
        if f.endswith(".json")
    )

    def run_one(path):
        try:
            model = parse_model(open(path, "r", encoding="utf-8").read())
            text = _report_json(model)
            out_path = os.path.join(args.out, os.path.basename(path))
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            return path, None
        except (ModelError, PipelineError, OSError) as exc:
            return path, str(exc)

    failures = 0
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        for path, err in pool.map(run_one, paths):
            if err is None:
                print(f"ok    {path}")
            else:
                failures += 1
                print(f"fail  {path}: {err}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcgeo", description="exact qc-geometry toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse + structure-consistency check")
    v.add_argument("path")
    v.set_defaults(fn=cmd_validate)

    r = sub.add_parser("report", help="full geometry report")
    r.add_argument("path")
    r.add_argument("--out", default=None)
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.set_defaults(fn=cmd_report)

    rd = sub.add_parser("repdim", help="Weyl dimension of an Sp(n) weight")
    rd.add_argument("--n", type=int, required=True)
    rd.add_argument("--weights", required=True)
    rd.add_argument("--sp1", type=int, default=0)
    rd.set_defaults(fn=cmd_repdim)

    rc = sub.add_parser("repcheck", help="dimension identity catalog")
    rc.add_argument("--max-n", type=int, default=6, dest="max_n")
    rc.add_argument("--max-l", type=int, default=5, dest="max_l")
    rc.add_argument("--ledger", type=int, default=0, help="also run the module ledger up to this n")
    rc.set_defaults(fn=cmd_repcheck)

    h = sub.add_parser("hwv", help="highest-weight-vector identity catalog")
    h.add_argument("--n", type=int, required=True, choices=(1, 2, 3))
    h.set_defaults(fn=cmd_hwv)

    b = sub.add_parser("batch", help="report every model in a directory")
    b.add_argument("directory")
    b.add_argument("--out", required=True)
    b.add_argument("--jobs", type=int, default=4)
    b.set_defaults(fn=cmd_batch)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
