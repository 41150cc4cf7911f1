"""Ingestion and export: composition CSVs, weight files, documents.

The CSV contract: first row is a header; an optional first column holds a
group factor (auto-detected when its data cells are non-numeric, or forced
by name); every remaining column is a numeric part with decimal point '.'.
Parse failures always report the offending row and column.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Sequence

from .compositions import CompositionMatrix, LogratioSpec, PartWeights
from .errors import InputDataError
from .ordination import OrdinationResult

__all__ = [
    "parse_composition_csv",
    "read_composition_csv",
    "read_part_weights",
    "parse_logratio_specs",
    "coordinates_csv",
]


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def parse_composition_csv(
    text: str,
    label_col: str | None = "auto",
) -> CompositionMatrix:
    """Parse CSV text into a composition matrix.

    ``label_col="auto"`` detects a leading group-factor column by
    non-numeric content; pass a header name to force it, or None to treat
    every column as a part.
    """
    rows = list(csv.reader(_io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 3:
        raise InputDataError(
            f"need a header row and at least 2 data rows, got {len(rows)} rows"
        )
    header = [h.strip() for h in rows[0]]
    data_rows = rows[1:]

    width = len(header)
    for i, row in enumerate(data_rows, start=2):
        if len(row) != width:
            raise InputDataError(
                f"row {i}: expected {width} fields, got {len(row)}"
            )

    if label_col == "auto":
        first_col = [r[0].strip() for r in data_rows]
        has_labels = any(not _is_number(v) for v in first_col)
    elif label_col is None:
        has_labels = False
    else:
        if header[0] != label_col:
            raise InputDataError(
                f"label column {label_col!r} must be the first column "
                f"(found {header[0]!r})"
            )
        has_labels = True

    start = 1 if has_labels else 0
    part_names = header[start:]
    if len(part_names) < 2:
        raise InputDataError("need at least 2 part columns")

    values = []
    groups = []
    for i, row in enumerate(data_rows, start=2):
        if has_labels:
            groups.append(row[0].strip())
        parsed = []
        for j, cell in enumerate(row[start:]):
            token = cell.strip()
            try:
                parsed.append(float(token))
            except ValueError:
                raise InputDataError(
                    f"row {i}, column {part_names[j]!r}: "
                    f"not a number: {token!r}"
                ) from None
        values.append(parsed)

    labels = tuple(str(i) for i in range(1, len(values) + 1))
    return CompositionMatrix(
        values,
        tuple(part_names),
        labels,
        tuple(groups) if has_labels else None,
    )


def read_composition_csv(
    path: str | Path, label_col: str | None = "auto"
) -> CompositionMatrix:
    return parse_composition_csv(Path(path).read_text(), label_col)


def read_part_weights(path: str | Path, part_names: Sequence[str]) -> PartWeights:
    """Load part weights from a JSON mapping of part name to raw positive
    weight; values are normalized to sum to 1."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputDataError(f"weights file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputDataError("weights file must be a JSON object of name: weight")
    return PartWeights.from_mapping(part_names, doc)


def parse_logratio_specs(doc: dict, part_names: Sequence[str]) -> list[LogratioSpec]:
    """Build logratio specs from a candidates document.

    Two forms are accepted: ``{"candidates": [{"num": [...], "den": [...],
    "name": ...}]}`` with part names on each side, or ``{"plrs_among":
    [...]}`` naming parts whose pairwise logratios are all generated.
    """
    index = {name: i for i, name in enumerate(part_names)}

    def resolve(names, side):
        if isinstance(names, str):
            names = [names]
        missing = [n for n in names if n not in index]
        if missing:
            raise InputDataError(f"unknown parts in {side}: {', '.join(missing)}")
        return frozenset(index[n] for n in names)

    specs: list[LogratioSpec] = []
    for item in doc.get("candidates", []):
        try:
            specs.append(
                LogratioSpec(
                    resolve(item["num"], "num"),
                    resolve(item["den"], "den"),
                    item.get("name"),
                )
            )
        except (KeyError, TypeError) as exc:
            raise InputDataError(f"malformed candidate entry: {exc}") from exc

    among = doc.get("plrs_among", [])
    if among:
        ids = sorted(resolve(among, "plrs_among"))
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                specs.append(LogratioSpec.plr(ids[a], ids[b]))

    if not specs:
        raise InputDataError(
            "candidates document defines no logratios "
            "(expected 'candidates' or 'plrs_among')"
        )
    return specs


def coordinates_csv(result: OrdinationResult) -> str:
    """Render ordination row coordinates as CSV: label, group, dim1..dimD."""
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    dims = [f"dim{k + 1}" for k in range(result.n_dims)]
    writer.writerow(["label", "group"] + dims)
    for i, label in enumerate(result.sample_labels):
        group = result.group_factor[i] if result.group_factor else ""
        writer.writerow([label, group] + [repr(float(x)) for x in result.row_coords[i]])
    return out.getvalue()
