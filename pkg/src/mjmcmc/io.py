"""CSV ingestion and run output files."""

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataFormatError
from .models.edges import edge_pairs, n_nodes

KINDS = ("real", "binary")


@dataclass
class MatrixData:
    values: np.ndarray
    header: list = None

    @property
    def shape(self):
        return self.values.shape

    @property
    def column_means(self):
        return self.values.mean(axis=0)


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_matrix_csv(path, kind="real"):
    """Read a rectangular numeric CSV; a first row with any non-numeric cell is a header.

    Rows and columns in error messages are 1-based and count the header
    line when there is one, so they match what an editor shows.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataFormatError(f"cannot read data file: {exc.strerror}", path=path) from exc
    if not rows:
        raise DataFormatError("file contains no data", path=path)
    header = None
    offset = 1
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        offset = 2
        if not rows:
            raise DataFormatError("file has a header but no data rows", path=path)
    width = len(header) if header is not None else len(rows[0])
    out = np.empty((len(rows), width))
    for r, row in enumerate(rows):
        line = r + offset
        if len(row) != width:
            raise DataFormatError(f"expected {width} columns, found {len(row)}",
                                  row=line, path=path)
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataFormatError(f"non-numeric cell {cell.strip()!r}", row=line,
                                      column=c + 1, path=path) from None
            if not math.isfinite(v):
                raise DataFormatError(f"non-finite value {cell.strip()!r}", row=line,
                                      column=c + 1, path=path)
            if kind == "binary" and v not in (0.0, 1.0):
                raise DataFormatError(f"binary data must be 0 or 1, found {cell.strip()!r}",
                                      row=line, column=c + 1, path=path)
            out[r, c] = v
    if kind == "binary":
        out = out.astype(np.uint8)
    return MatrixData(out, header)


def write_matrix(path, matrix, header=None):
    """Write with ``repr`` precision so :func:`load_matrix_csv` reads back identical floats."""
    matrix = np.atleast_2d(np.asarray(matrix))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in matrix.tolist():
            w.writerow([repr(v) for v in row])


def _fmt(x):
    return repr(float(x))


def write_inclusion(path, probs, graph=False):
    """``index,probability``; graph runs add the node pair ``i,j`` of each edge index."""
    probs = np.asarray(probs, dtype=float)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if graph:
            p = n_nodes(probs.size)
            fh.write("# edge index = lexicographic order of node pairs (i<j), nodes 0-based\n")
            w.writerow(["index", "i", "j", "probability"])
            for idx, ((i, j), v) in enumerate(zip(edge_pairs(p).tolist(), probs)):
                w.writerow([idx, i, j, _fmt(v)])
        else:
            w.writerow(["index", "probability"])
            for idx, v in enumerate(probs):
                w.writerow([idx, _fmt(v)])


def read_inclusion(path):
    with Path(path).open(encoding="utf-8") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    return np.array([float(r["probability"]) for r in rows])


def write_trace_meta(path, trace):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "epsilon", "flips", "wall_time"])
        for s, (e, f, t) in enumerate(zip(trace.epsilons, trace.flip_counts, trace.wall_times),
                                      start=1):
            w.writerow([s, _fmt(e), int(f), _fmt(t)])


def write_metrics(path, rows, columns):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)


def write_outputs(trace, metrics, config, out_dir, graph=False, lock=None):
    """Write inclusion.csv, trace_meta.csv, metrics.csv (if any) and config.lock.

    ``metrics`` is a list of dict rows (harness time series) or None.
    ``lock`` is the canonical lock text; it defaults to ``config.lock_text()``.
    """
    from .harness.benchmark import SERIES_COLUMNS

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = {"inclusion": out / "inclusion.csv", "trace_meta": out / "trace_meta.csv",
                 "config.lock": out / "config.lock"}
        write_inclusion(files["inclusion"], trace.inclusion(), graph)
        write_trace_meta(files["trace_meta"], trace)
        if metrics:
            files["metrics"] = out / "metrics.csv"
            write_metrics(files["metrics"], metrics, SERIES_COLUMNS)
        text = lock if lock is not None else config.lock_text()
        files["config.lock"].write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write outputs to {exc.filename or out}: {exc.strerror}") from exc
    return files


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
