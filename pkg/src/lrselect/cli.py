"""Batch command line: ingest a CSV, run variance/selection/ordination,
write tables and coordinate files.

Percentages are printed to one decimal; files always hold full precision.
Outputs are byte-identical across repeated runs on identical inputs. Exit
codes: 0 success, 2 input error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .compositions import (
    Amalgamation,
    CompositionMatrix,
    PartWeights,
    ZeroReplacement,
    amalgamate,
    close,
    replace_zeros,
)
from .errors import DegenerateDataError, InputDataError
from .io import (
    coordinates_csv,
    parse_logratio_specs,
    read_composition_csv,
    read_part_weights,
)
from .ordination import lra, pca_of_logratios, ternary_coords
from .selection import AmalgamationHierarchy, hierarchy_explained, stepwise_select
from .variance import total_logratio_variance

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: not valid JSON: {exc}") from exc


def _load_matrix(args) -> tuple[CompositionMatrix, ZeroReplacement]:
    label_col = None if args.label_col == "none" else args.label_col
    matrix = read_composition_csv(args.input, label_col=label_col)
    matrix, replacement = replace_zeros(matrix)
    matrix = close(matrix, args.closure)
    return matrix, replacement


def _load_weights(args, matrix: CompositionMatrix) -> PartWeights:
    if args.weights is None:
        return PartWeights.uniform(matrix.n_parts)
    return read_part_weights(args.weights, matrix.part_names)


def _load_hierarchy(path: str, matrix: CompositionMatrix) -> AmalgamationHierarchy:
    return AmalgamationHierarchy.from_document(_load_json(path), matrix.part_names)


def _replacement_summary(replacement: ZeroReplacement) -> dict:
    return {
        "replaced_cells": replacement.total,
        "replaced_by_part": {
            name: count for name, count in replacement.counts if count
        },
    }


def cmd_variance(args) -> int:
    matrix, replacement = _load_matrix(args)
    weights = _load_weights(args, matrix)
    report = total_logratio_variance(matrix, weights, method=args.method)

    print(f"samples: {matrix.n_samples}  parts: {matrix.n_parts}")
    print(f"zero cells replaced: {replacement.total}")
    if report.per_pair is not None:
        print(f"pairwise logratios: {report.per_pair.size}")
    if report.total == 0:
        print("warning: total logratio variance is 0 (constant composition)")
    print(f"total logratio variance: {report.total!r}")

    doc = report.to_document()
    doc.update(_replacement_summary(replacement))
    doc["input"] = Path(args.input).name
    _write(Path(args.out_dir) / "variance_report.json", _json_text(doc))
    return EXIT_OK


def _print_trace_rows(rows: list[dict]) -> None:
    print(f"{'step':>4}  {'additional':>10}  {'cumulative':>10}  chosen")
    for row in rows:
        tie = f"  (tie: {row['tie_set']})" if row.get("tie_set") else ""
        print(
            f"{row['step']:>4}  {row['additional_pct']:>10.1f}  "
            f"{row['cumulative_pct']:>10.1f}  {row['chosen']}{tie}"
        )


def _trace_csv(rows: list[dict]) -> str:
    lines = ["step,chosen,additional_pct,cumulative_pct,tie_set"]
    for row in rows:
        lines.append(
            f"{row['step']},{row['chosen']},{row['additional_pct']!r},"
            f"{row['cumulative_pct']!r},{row.get('tie_set', '')}"
        )
    return "\n".join(lines) + "\n"


def cmd_select(args) -> int:
    if bool(args.hierarchy) == bool(args.candidates):
        raise InputDataError("give exactly one of --hierarchy or --candidates")
    matrix, _ = _load_matrix(args)
    weights = _load_weights(args, matrix)
    out_dir = Path(args.out_dir)

    if args.hierarchy:
        hierarchy = _load_hierarchy(args.hierarchy, matrix)
        result = hierarchy_explained(matrix, weights, hierarchy)
        rows = [
            {
                "step": s.step,
                "chosen": s.label,
                "additional_pct": s.additional_pct,
                "cumulative_pct": s.cumulative_pct,
                "tie_set": "",
            }
            for s in result.steps
        ]
        _print_trace_rows(rows)
        print(f"total explained: {result.total_pct:.1f}%")
        doc = result.to_document(matrix.part_names)
    else:
        specs = parse_logratio_specs(_load_json(args.candidates), matrix.part_names)
        steps = args.steps if args.steps is not None else len(specs)
        trace = stepwise_select(
            matrix, weights, specs, k=steps, floor_pct=args.floor
        )
        rows = trace.to_table()
        _print_trace_rows(rows)
        if trace.stopped_early:
            print(f"stopped early: {trace.stop_reason}")
        print(f"total explained: {trace.final_pct:.1f}%")
        doc = trace.to_document()

    _write(out_dir / "selection_trace.csv", _trace_csv(rows))
    _write(out_dir / "selection_result.json", _json_text(doc))
    return EXIT_OK


def _root_amalgamation(
    matrix: CompositionMatrix, hierarchy: AmalgamationHierarchy
) -> CompositionMatrix:
    node_parts = hierarchy.node_map()
    groups = [Amalgamation(name, node_parts[name]) for name in hierarchy.roots()]
    if len(groups) < 2:
        raise InputDataError("hierarchy has fewer than 2 root nodes")
    return amalgamate(matrix, groups)


def cmd_ordinate(args) -> int:
    matrix, _ = _load_matrix(args)
    weights = _load_weights(args, matrix)
    out_dir = Path(args.out_dir)

    hierarchy = None
    if args.hierarchy:
        hierarchy = _load_hierarchy(args.hierarchy, matrix)

    if args.mode == "ternary":
        if matrix.n_parts != 3:
            if hierarchy is None:
                raise InputDataError(
                    "ternary mode needs 3 parts, or --hierarchy with 3 root nodes"
                )
            matrix = _root_amalgamation(matrix, hierarchy)
            if matrix.n_parts != 3:
                raise InputDataError(
                    f"ternary mode needs 3 root nodes, got {matrix.n_parts}"
                )
        coords = ternary_coords(matrix)
        lines = ["label,group,x,y"]
        for i, label in enumerate(matrix.sample_labels):
            group = matrix.group_factor[i] if matrix.group_factor else ""
            lines.append(
                f"{label},{group},{float(coords[i, 0])!r},{float(coords[i, 1])!r}"
            )
        _write(out_dir / "ternary_coords.csv", "\n".join(lines) + "\n")
        print(f"{coords.shape[0]} points in the unit triangle "
              f"(vertices: {', '.join(matrix.part_names)})")
        return EXIT_OK

    if args.mode == "lra":
        if args.target == "roots":
            if hierarchy is None:
                raise InputDataError("--target roots needs --hierarchy")
            matrix = _root_amalgamation(matrix, hierarchy)
            weights = PartWeights.uniform(matrix.n_parts)
        result = lra(matrix, weights)
    elif args.mode == "pca-slr":
        if args.specs:
            specs = parse_logratio_specs(_load_json(args.specs), matrix.part_names)
        elif hierarchy is not None:
            specs = list(hierarchy.specs())
        else:
            raise InputDataError("pca-slr mode needs --specs or --hierarchy")
        result = pca_of_logratios(matrix, specs)
    else:
        raise InputDataError(f"unknown mode {args.mode!r}")

    shown = result.dim_percentages[: min(4, result.n_dims)]
    print("dimension percentages: "
          + "  ".join(f"dim{k + 1}={p:.1f}%" for k, p in enumerate(shown)))
    if result.n_dims >= 2:
        print(f"first two dimensions: "
              f"{result.dim_percentages[0] + result.dim_percentages[1]:.1f}%")
    _write(out_dir / "coordinates.csv", coordinates_csv(result))
    _write(out_dir / "ordination.json", _json_text(result.to_document()))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrselect",
        description="Logratio variable selection for compositional data",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--input", required=True, help="composition CSV")
        p.add_argument(
            "--label-col",
            default="auto",
            help="group-factor column name, 'auto' to detect, 'none' for none",
        )
        p.add_argument("--closure", type=float, default=1.0,
                       help="row closure constant after zero replacement")
        p.add_argument("--weights", help="JSON file of part weights (default uniform)")
        p.add_argument("--out-dir", required=True, help="directory for output files")

    p_var = sub.add_parser("variance", help="total logratio variance report")
    add_common(p_var)
    p_var.add_argument("--method", choices=["clr", "pairs"], default="clr")
    p_var.set_defaults(func=cmd_variance)

    p_sel = sub.add_parser("select", help="stepwise selection or hierarchy evaluation")
    add_common(p_sel)
    p_sel.add_argument("--hierarchy", help="hierarchy JSON document")
    p_sel.add_argument("--candidates", help="candidates JSON document")
    p_sel.add_argument("--steps", type=int, help="number of steps (default: all)")
    p_sel.add_argument("--floor", type=float, default=0.0,
                       help="stop when the best increment falls below this (pct)")
    p_sel.set_defaults(func=cmd_select)

    p_ord = sub.add_parser("ordinate", help="low-rank coordinates for plotting")
    add_common(p_ord)
    p_ord.add_argument("--mode", choices=["lra", "pca-slr", "ternary"], required=True)
    p_ord.add_argument("--target", choices=["parts", "roots"], default="parts")
    p_ord.add_argument("--hierarchy", help="hierarchy JSON document")
    p_ord.add_argument("--specs", help="logratio specs JSON (for pca-slr)")
    p_ord.set_defaults(func=cmd_ordinate)

    p_srv = sub.add_parser("serve", help="run the HTTP workbench service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--data-dir", help="write-through directory for session exports")
    p_srv.add_argument("--ui-dir", help="static directory with the built workbench UI")
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
