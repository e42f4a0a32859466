"""Batch experiment runner.

Every command writes a run header (command, structure, seed, tolerances)
followed by one row per sample, sorted by sample index.  Output is a pure
function of the arguments; floats are written with 17 significant digits
in CSV and as shortest round-trip reprs in JSON.

CSV columns:

  check-axioms      axiom, n, seed, attempted, valid, margin, violations
  verify-geodesic   index, distance, found, margin, evaluations, sides, error
  contraction-sweep index, before, after, ratio, error
  delta-estimate    index, upper, evaluations, sides, error
  closed-paths      index, sides, min_slack, max_side, error
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ._parallel import pmap
from .axioms import CHECKERS
from .circle import CirclePoint, PointPair
from .errors import HarmoniaError
from .harmonic import harmonic_pair_through
from .lines import line_distance
from .moebius import MoebiusStructure, SemiMetricSpec
from .projections import midpoint_projection
from .zigzag import closed_path_check, delta_upper, random_collinear_pair, random_hexagon, verify_geodesic

TWO_PI = 2.0 * math.pi

COLUMNS = {
    "check-axioms": ("axiom", "n", "seed", "attempted", "valid", "margin", "violations"),
    "verify-geodesic": ("index", "distance", "found", "margin", "evaluations", "sides", "error"),
    "contraction-sweep": ("index", "before", "after", "ratio", "error"),
    "delta-estimate": ("index", "upper", "evaluations", "sides", "error"),
    "closed-paths": ("index", "sides", "min_slack", "max_side", "error"),
}


def _rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, i])


def _guard(fn, i: int, columns) -> dict:
    """Run one sample; numerical failures become an error row."""
    try:
        row = fn(i)
        row.setdefault("error", "")
    except (HarmoniaError, ValueError, RuntimeError, FloatingPointError) as exc:
        row = {k: None for k in columns}
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["index"] = i
    return row


def _random_pair(m: MoebiusStructure, rng: np.random.Generator):
    a, b, z = rng.uniform(0.0, TWO_PI, size=3)
    axis = PointPair(CirclePoint(a), CirclePoint(b))
    return harmonic_pair_through(m, axis, z)


def run_check_axioms(m, args) -> tuple[list[dict], dict]:
    rows, reports = [], []
    for name, fn in CHECKERS.items():
        rep = fn(m, args.n, args.seed)
        reports.append(rep.to_json())
        rows.append(dict(zip(COLUMNS["check-axioms"], rep.csv_row())))
    return rows, {"reports": reports, "min_margin": min(r["margin"] for r in rows)}


def run_verify_geodesic(m, args) -> tuple[list[dict], dict]:
    cols = COLUMNS["verify-geodesic"]

    def one(i):
        line, q, q2 = random_collinear_pair(m, _rng(args.seed, i))
        r = verify_geodesic(m, line, q, q2, args.budget, seed=args.seed * 1_000_003 + i)
        return {"distance": r.distance, "found": r.found, "margin": r.margin,
                "evaluations": r.evaluations, "sides": r.witness.n_sides}

    rows = pmap(lambda i: _guard(one, i, cols), range(args.pairs))
    margins = [r["margin"] for r in rows if r["margin"] is not None]
    return rows, {"min_margin": min(margins) if margins else None}


def run_contraction_sweep(m, args) -> tuple[list[dict], dict]:
    cols = COLUMNS["contraction-sweep"]

    def one(i):
        rng = _rng(args.seed, i)
        line, q, q2 = random_collinear_pair(m, rng)
        c = PointPair(*(CirclePoint(x) for x in rng.uniform(0.0, TWO_PI, size=2)))
        before = line_distance(m, q, q2)
        after = line_distance(m, midpoint_projection(m, q, c).p, midpoint_projection(m, q2, c).p)
        return {"before": before, "after": after, "ratio": after / before}

    rows = pmap(lambda i: _guard(one, i, cols), range(args.n))
    ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
    return rows, {"max_ratio": max(ratios) if ratios else None}


def run_delta_estimate(m, args) -> tuple[list[dict], dict]:
    cols = COLUMNS["delta-estimate"]

    def one(i):
        rng = _rng(args.seed, i)
        q, q2 = _random_pair(m, rng), _random_pair(m, rng)
        est = delta_upper(m, q, q2, args.budget, seed=args.seed * 1_000_003 + i)
        return {"upper": est.upper, "evaluations": est.evaluations, "sides": est.witness.n_sides}

    return pmap(lambda i: _guard(one, i, cols), range(args.pairs)), {}


def run_closed_paths(m, args) -> tuple[list[dict], dict]:
    cols = COLUMNS["closed-paths"]

    def one(i):
        rep = closed_path_check(m, random_hexagon(m, _rng(args.seed, i)))
        return {"sides": len(rep.lengths), "min_slack": rep.min_slack, "max_side": max(rep.lengths)}

    rows = pmap(lambda i: _guard(one, i, cols), range(args.n))
    slacks = [r["min_slack"] for r in rows if r["min_slack"] is not None]
    return rows, {"min_slack": min(slacks) if slacks else None}


COMMANDS = {
    "check-axioms": run_check_axioms,
    "verify-geodesic": run_verify_geodesic,
    "contraction-sweep": run_contraction_sweep,
    "delta-estimate": run_delta_estimate,
    "closed-paths": run_closed_paths,
}


def load_structure(args) -> MoebiusStructure:
    if args.structure_file:
        doc = json.loads(Path(args.structure_file).read_text())
        return MoebiusStructure.from_json(doc)
    text = args.structure.strip()
    if text.startswith("{"):
        return MoebiusStructure.from_json(text)
    return MoebiusStructure(SemiMetricSpec(text, args.epsilon))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def render(command: str, header: dict, rows: list[dict], summary: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"header": header, "rows": rows, "summary": summary}
        return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    buf = io.StringIO()
    for key in sorted(header):
        buf.write(f"# {key}: {json.dumps(header[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    cols = COLUMNS[command]
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row.get(k)) for k in cols])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonia",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run {name}", description=f"CSV columns: {', '.join(COLUMNS[name])}")
        p.add_argument("--structure", default="canonical",
                       help="kind name (canonical, sine, power, ...) or inline JSON spec")
        p.add_argument("--epsilon", type=float, default=0.0, help="perturbation size for sine/power")
        p.add_argument("--structure-file", help="JSON structure spec; overrides --structure")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", "-o", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="output format (default json for check-axioms, csv otherwise)")
        if name in ("check-axioms", "contraction-sweep", "closed-paths"):
            p.add_argument("--n", type=int, default=1000, help="number of samples")
        if name in ("verify-geodesic", "delta-estimate"):
            p.add_argument("--pairs", type=int, default=100, help="number of random pairs")
            p.add_argument("--budget", type=int, default=10_000, help="path evaluations per pair")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        m = load_structure(args)
        for attr in ("n", "pairs", "budget"):
            if getattr(args, attr, 1) < 1:
                raise ValueError(f"--{attr} must be at least 1")
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"harmonia: error: {exc}", file=sys.stderr)
        return 2
    fmt = args.format or ("json" if args.command == "check-axioms" else "csv")
    rows, summary = COMMANDS[args.command](m, args)
    rows.sort(key=lambda r: r.get("index", 0))
    header = {
        "command": args.command,
        "structure": m.spec.to_json(),
        "seed": args.seed,
        "tolerances": asdict(m.tol),
    }
    for attr in ("n", "pairs", "budget"):
        if hasattr(args, attr):
            header[attr] = getattr(args, attr)
    text = render(args.command, header, rows, summary, fmt)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
