"""CSV/JSON serialization with full-precision numerics and atomic writes."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Mapping

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return "%.17g" % float(value)


def columns_to_csv(columns: Mapping[str, "np.ndarray | list"]) -> str:
    """Comma-separated table with a header row, ``%.17g`` floats and LF endings."""
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    lengths = {len(col) for col in data}
    if len(lengths) > 1:
        raise ValueError(f"column lengths differ: {dict(zip(names, map(len, data)))}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*data):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def csv_to_columns(text: str) -> dict[str, np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[k]) for r in body]) for k, name in enumerate(header)}


def matrix_to_csv(M) -> str:
    """Row-major matrix, no header."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return "".join(",".join(fmt(v) for v in row) + "\n" for row in M)


def matrix_from_csv(text: str) -> np.ndarray:
    return np.array([[float(v) for v in line.split(",")] for line in text.splitlines() if line])


def read_signal_csv(path) -> np.ndarray:
    """Load a signal from a one-column CSV (an optional non-numeric header is skipped)."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        float(lines[0].split(",")[-1])
    except ValueError:
        lines = lines[1:]
    return np.array([float(ln.split(",")[-1]) for ln in lines])


def write_atomic(directory, files: Mapping[str, str]) -> list[Path]:
    """Write every file via temp-then-rename inside ``directory``.

    Nothing is renamed into place until all temporaries have been written.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=directory)
            staged.append((tmp, directory / name))
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]
