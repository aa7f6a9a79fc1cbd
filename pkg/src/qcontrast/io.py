"""Reading and writing coincidence matrices, experiment bundles and reports.

Matrix CSV::

    # d=3 signal_mub=0 idler_mub=0 mode=probability
    0.33,0.0,0.0
    ...

Rows are signal modes, columns idler modes. Bundles are JSON objects
``{d, mub_count, matrices: [...], seed, params}`` where every matrix is
``{signal_mub, idler_mub, mode, entries}``.
"""

import csv
import io
import json
import logging
import re
import warnings
from pathlib import Path

import numpy as np

from .coincidence import CoincidenceMatrix, ExperimentRecord
from .exceptions import DimensionMismatchError, MatrixFormatError
from .validation import PROBABILITY_ATOL, check_square_matrix

logger = logging.getLogger(__name__)

#: Probability matrices off by more than this are rejected rather than renormalised.
RENORMALIZE_ATOL = 1e-6

_HEADER = re.compile(
    r"#\s*d=(?P<d>\d+)\s+signal_mub=(?P<s>-?\d+)\s+idler_mub=(?P<i>-?\d+)"
    r"\s+mode=(?P<mode>probability|counts)\s*$")


class RenormalizedWarning(UserWarning):
    """A probability matrix was slightly off unit sum and has been rescaled."""


def _coerce_matrix(entries, signal_mub, idler_mub, mode, source):
    arr = check_square_matrix(entries, name=source)
    if mode == "probability":
        total = arr.sum()
        dev = abs(total - 1.0)
        if dev > RENORMALIZE_ATOL:
            raise MatrixFormatError(
                f"{source}: probabilities sum to {total!r}; deviation {dev:.3g} "
                f"exceeds {RENORMALIZE_ATOL}")
        if dev > PROBABILITY_ATOL:
            warnings.warn(f"{source}: renormalising probabilities that sum to {total!r}",
                          RenormalizedWarning, stacklevel=3)
            arr = arr / total
    return CoincidenceMatrix(arr, signal_mub, idler_mub, mode)


def format_matrix_csv(matrix):
    buf = io.StringIO()
    buf.write(f"# d={matrix.d} signal_mub={matrix.signal_mub} "
              f"idler_mub={matrix.idler_mub} mode={matrix.mode}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in matrix.entries:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def parse_matrix_csv(text, source="<csv>"):
    """Parse one matrix in the CSV format above."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError(f"{source}: empty file")
    header = _HEADER.match(lines[0].strip())
    if header is None:
        raise MatrixFormatError(f"{source}: bad or missing header line {lines[0]!r}")
    d = int(header["d"])
    rows = list(csv.reader(lines[1:]))
    if len(rows) != d:
        raise DimensionMismatchError(f"{source}: header says d={d} but found {len(rows)} rows")
    entries = np.empty((d, d))
    for r, row in enumerate(rows):
        if len(row) != d:
            raise DimensionMismatchError(
                f"{source}: row {r} has {len(row)} columns, expected {d}")
        for c, cell in enumerate(row):
            try:
                entries[r, c] = float(cell)
            except ValueError:
                raise MatrixFormatError(
                    f"{source}: non-numeric entry {cell!r} at row {r}, column {c}") from None
    return _coerce_matrix(entries, int(header["s"]), int(header["i"]), header["mode"], source)


def write_matrix_csv(matrix, path):
    Path(path).write_text(format_matrix_csv(matrix))


def read_matrix_csv(path):
    return parse_matrix_csv(Path(path).read_text(), source=str(path))


def record_to_dict(record):
    return {
        "d": record.d,
        "mub_count": record.mub_count,
        "matrices": [
            {"signal_mub": m.signal_mub, "idler_mub": m.idler_mub, "mode": m.mode,
             "entries": m.entries.tolist()}
            for m in record.matrices],
        "seed": record.seed,
        "params": record.params,
    }


def record_from_dict(data, source="<json>"):
    try:
        d = int(data["d"])
        raw = data["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"{source}: missing or invalid field ({exc})") from None
    matrices = []
    for i, m in enumerate(raw):
        entries = np.asarray(m["entries"], dtype=float)
        if entries.shape != (d, d):
            raise DimensionMismatchError(
                f"{source}: matrix {i} has shape {entries.shape}, expected {(d, d)}")
        matrices.append(_coerce_matrix(entries, m.get("signal_mub", i), m.get("idler_mub", i),
                                       m.get("mode", "probability"), f"{source} matrix {i}"))
    return ExperimentRecord(d, tuple(matrices), data.get("mub_count"), data.get("seed"),
                            dict(data.get("params") or {}))


def write_record_json(record, path):
    Path(path).write_text(json.dumps(record_to_dict(record), indent=2) + "\n")


def read_record_json(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from None
    return record_from_dict(data, source=str(path))


def read_record(paths):
    """Load a record from one JSON bundle or from one CSV file per matrix."""
    paths = [Path(p) for p in paths]
    if len(paths) == 1 and paths[0].suffix.lower() == ".json":
        return read_record_json(paths[0])
    if any(p.suffix.lower() == ".json" for p in paths):
        raise MatrixFormatError("give either a single JSON bundle or CSV matrix files")
    matrices = [read_matrix_csv(p) for p in paths]
    d = matrices[0].d
    for p, m in zip(paths, matrices):
        if m.d != d:
            raise DimensionMismatchError(f"{p}: d={m.d} differs from d={d}")
    logger.debug("loaded %d matrices of dimension %d", len(matrices), d)
    return ExperimentRecord(d, tuple(matrices))
