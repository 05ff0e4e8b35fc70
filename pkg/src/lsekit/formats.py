"""CSV file formats read and written by the command line tool.

All files are UTF-8 with LF line endings and a mandatory header row.
Floats are written with 17 significant digits so float64 values
round-trip exactly.

samples   ``phi_0,...,phi_{n-1},y``; one aligned (regressor, output) pair per line
truth     ``step,theta_0,...,theta_{n-1}``; parameter that generated each sample
trace     ``step,prediction,innovation,theta_0,...,theta_{n-1},gain_trace``

Row numbers in error messages are file line numbers (the header is line 1).
"""

import csv
import math

import numpy as np

from .batch import Dataset, Sample
from .errors import DataError

__all__ = [
    "fmt",
    "sample_header",
    "truth_header",
    "trace_header",
    "write_samples",
    "iter_samples",
    "read_samples",
    "write_truth",
    "read_truth",
    "TraceWriter",
    "read_trace",
]


def fmt(x):
    return format(float(x), ".17g")


def sample_header(n):
    return [f"phi_{i}" for i in range(n)] + ["y"]


def truth_header(n):
    return ["step"] + [f"theta_{i}" for i in range(n)]


def trace_header(n):
    return ["step", "prediction", "innovation"] + [f"theta_{i}" for i in range(n)] + ["gain_trace"]


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open_w(path):
    return open(path, "w", encoding="utf-8", newline="")


def _open_r(path):
    return open(path, "r", encoding="utf-8", newline="")


def _floats(row, line):
    try:
        values = [float(x) for x in row]
    except ValueError:
        raise DataError(f"non-numeric field in {row!r}", row=line) from None
    if not all(math.isfinite(v) for v in values):
        raise DataError("non-finite value", row=line)
    return values


def _parse_indexed_header(header, prefix, before=(), after=()):
    """Return n if header == before + [prefix0..prefix{n-1}] + after, else None."""
    before, after = list(before), list(after)
    if header is None or len(header) < len(before) + len(after) + 1:
        return None
    n = len(header) - len(before) - len(after)
    expected = before + [f"{prefix}{i}" for i in range(n)] + after
    return n if [h.strip() for h in header] == expected else None


def write_samples(path, dataset):
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(sample_header(dataset.dim))
        for s in dataset:
            w.writerow([fmt(x) for x in s.regressor] + [fmt(s.output)])


def iter_samples(path):
    """Yield :class:`Sample` objects one line at a time.

    Only the current line is held in memory.
    """
    with _open_r(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        n = _parse_indexed_header(header, "phi_", after=["y"])
        if n is None:
            raise DataError(f"expected header phi_0,...,phi_<n-1>,y, got {header!r}", row=1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != n + 1:
                raise DataError(f"expected {n + 1} fields, got {len(row)}", row=line)
            values = _floats(row, line)
            yield Sample(np.array(values[:n]), values[n])


def read_samples(path):
    return Dataset(tuple(iter_samples(path)))


def write_truth(path, thetas):
    thetas = np.atleast_2d(thetas)
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(truth_header(thetas.shape[1]))
        for j, theta in enumerate(thetas, start=1):
            w.writerow([j] + [fmt(x) for x in theta])


def _read_table(path, check_header, what):
    with _open_r(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        n = check_header(header)
        if n is None:
            raise DataError(f"unrecognised {what} header {header!r}", row=1)
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"expected {len(header)} fields, got {len(row)}", row=reader.line_num)
            rows.append(_floats(row, reader.line_num))
    return n, np.array(rows, dtype=np.float64).reshape(-1, len(header))


def read_truth(path):
    """Return ``(steps, thetas)`` from a ground-truth CSV."""
    _, table = _read_table(path, lambda h: _parse_indexed_header(h, "theta_", before=["step"]), "truth")
    return table[:, 0].astype(int), table[:, 1:]


def read_trace(path):
    """Return a trace CSV as a dict of arrays keyed by column group."""
    n, table = _read_table(
        path,
        lambda h: _parse_indexed_header(
            h, "theta_", before=["step", "prediction", "innovation"], after=["gain_trace"]
        ),
        "trace",
    )
    return {
        "step": table[:, 0].astype(int),
        "prediction": table[:, 1],
        "innovation": table[:, 2],
        "theta": table[:, 3 : 3 + n],
        "gain_trace": table[:, 3 + n],
    }


class TraceWriter:
    """Write :class:`~lsekit.recursive.StepRecord` rows as they are produced."""

    def __init__(self, path, dim):
        self._fh = _open_w(path)
        self._w = _writer(self._fh)
        self._w.writerow(trace_header(dim))

    def write(self, rec):
        self._w.writerow(
            [rec.step, fmt(rec.prediction), fmt(rec.innovation)]
            + [fmt(x) for x in rec.theta_hat]
            + [fmt(rec.gain_trace)]
        )

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
