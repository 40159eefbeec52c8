"""Readers and writers for functional CSV, edge-list and distance-matrix files.

Floats are written with ``repr`` so that reading a file back yields the exact
same doubles.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Optional

import numpy as np

from .core import Graph, LabeledDataset, ValidationError


class ParseError(ValidationError):
    pass


def fmt(x) -> str:
    return repr(float(x))


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_metadata(path, meta: dict) -> None:
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_metadata(path) -> Optional[dict]:
    p = sidecar_path(path)
    return json.loads(p.read_text()) if p.exists() else None


def parse_functional_csv(text: str) -> LabeledDataset:
    """Rows are observations. A leading ``label`` column and a header row are optional."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty CSV")
    header = None
    if rows[0][0].strip().lower() == "label" or not all(_is_number(c) for c in rows[0][1:]):
        header, rows = rows[0], rows[1:]
    if not rows:
        raise ParseError("CSV has a header but no data rows")
    if header is not None:
        has_label = header[0].strip().lower() == "label"
    else:
        has_label = not _is_number(rows[0][0])
    width = len(rows[0])
    labels, values = [], []
    for lineno, r in enumerate(rows, start=2 if header else 1):
        if len(r) != width:
            raise ParseError(f"row {lineno}: expected {width} fields, got {len(r)}")
        if has_label:
            labels.append(r[0].strip())
            r = r[1:]
        try:
            v = [float(c) for c in r]
        except ValueError as e:
            raise ParseError(f"row {lineno}: {e}") from None
        values.append(v)
    X = np.array(values, dtype=float)
    if X.shape[1] == 0:
        raise ParseError("no data columns")
    if not np.all(np.isfinite(X)):
        raise ParseError("non-finite value in data cells")
    return LabeledDataset(X, labels=tuple(labels) if has_label else None)


def read_functional_csv(path) -> LabeledDataset:
    return parse_functional_csv(Path(path).read_text())


def format_functional_csv(data: LabeledDataset, with_labels: bool = False) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    for i, row in enumerate(data.observations):
        cells = [fmt(x) for x in row]
        if with_labels:
            cells.insert(0, data.labels[i])
        w.writerow(cells)
    return out.getvalue()


def parse_edge_list(text: str) -> LabeledDataset:
    """Blocks separated by blank lines; each starts with ``vertices <n>``.

    An optional ``label <string>`` line may appear anywhere in a block. Edge
    lines are ``u v`` with 0-based vertex indices.
    """
    graphs, labels = [], []
    blocks = [b for b in _blocks(text.splitlines())]
    if not blocks:
        raise ParseError("no graphs in edge list")
    for bno, block in enumerate(blocks, start=1):
        (lineno, first), rest = block[0], block[1:]
        parts = first.split()
        if len(parts) != 2 or parts[0] != "vertices" or not parts[1].isdigit():
            raise ParseError(f"line {lineno}: expected 'vertices <n>'")
        n = int(parts[1])
        label, edges = None, []
        for lineno, line in rest:
            parts = line.split()
            if parts[0] == "label":
                label = line.strip()[len("label"):].strip()
                continue
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'u v'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer vertex") from None
        try:
            graphs.append(Graph(n, edges))
        except ValidationError as e:
            raise ParseError(f"graph {bno}: {e}") from None
        labels.append(label)
    has_labels = any(x is not None for x in labels)
    return LabeledDataset(graphs, labels=tuple(x or "" for x in labels) if has_labels else None)


def _blocks(lines):
    block = []
    for lineno, line in enumerate(lines, start=1):
        if line.strip():
            block.append((lineno, line))
        elif block:
            yield block
            block = []
    if block:
        yield block


def read_edge_list(path) -> LabeledDataset:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(data: LabeledDataset) -> str:
    chunks = []
    for i, g in enumerate(data.observations):
        lines = [f"vertices {g.vertex_count}"]
        if data.labels is not None:
            lines.append(f"label {data.labels[i]}")
        lines += [f"{u} {v}" for u, v in g.sorted_edges()]
        chunks.append("\n".join(lines) + "\n")
    return "\n".join(chunks)


def read_distance_csv(path) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(Path(path).read_text())) if r]
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    try:
        return np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as e:
        raise ParseError(f"distance matrix: {e}") from None


def looks_like_edge_list(path) -> bool:
    path = Path(path)
    if path.suffix in (".edges", ".edgelist"):
        return True
    with open(path) as f:
        for line in f:
            if line.strip():
                return line.split()[0] == "vertices"
    return False


def read_dataset(path) -> LabeledDataset:
    """Read vectors or graphs, attaching flags from a sidecar metadata file if present."""
    data = read_edge_list(path) if looks_like_edge_list(path) else read_functional_csv(path)
    meta = read_metadata(path)
    if not meta:
        return data
    params = meta.get("params")
    if params is not None:
        params = np.array([[np.nan if v is None else v for v in row] for row in params], dtype=float)
    return LabeledDataset(
        data.observations,
        structural_flags=meta.get("structural_flags"),
        distributional_flags=meta.get("distributional_flags"),
        params=params,
        param_names=meta.get("param_names", ()),
        labels=data.labels,
    )


def write_dataset(path, data: LabeledDataset, meta: dict) -> None:
    path = Path(path)
    if data.kind == "graph":
        path.write_text(format_edge_list(data))
    else:
        path.write_text(format_functional_csv(data, with_labels=data.labels is not None))
    meta = dict(meta)
    meta["kind"] = data.kind
    meta["n"] = data.n
    if data.structural_flags is not None:
        meta["structural_flags"] = [bool(x) for x in data.structural_flags]
    if data.distributional_flags is not None:
        meta["distributional_flags"] = [bool(x) for x in data.distributional_flags]
    if data.params is not None:
        meta["param_names"] = list(data.param_names)
        meta["params"] = [[None if np.isnan(v) else float(v) for v in row] for row in data.params]
    write_metadata(path, meta)
