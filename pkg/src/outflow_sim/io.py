"""CSV and JSON-lines writers with 17-significant-digit numbers.

Floats are written with ``%.17g`` so reading them back with ``float``
reproduces every bit. Lines end with LF only.
"""

import csv
import io
import json
import math
import os

import numpy as np

from .errors import InputError, OutflowError


class WriteError(OutflowError, OSError):
    kind = "io"


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return "%.17g" % x
    raise TypeError


def _csv_cell(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return _num(x)


def _json_value(x):
    if x is None:
        return "null"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in x) + "]"
    if isinstance(x, dict):
        return json_line(x)
    return _num(x)


def json_line(record):
    return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in record.items()) + "}"


def format_csv(records, header=None):
    if header is None:
        if not records:
            raise InputError("an empty series needs an explicit header")
        header = list(records[0].keys())
    header = list(header)
    for rec in records:
        if list(rec.keys()) != header:
            raise InputError("records are not homogeneous", expected=",".join(header),
                             got=",".join(rec.keys()))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_csv_cell(rec[k]) for k in header])
    return buf.getvalue()


def format_jsonl(records, header=None):
    if records:
        keys = list(records[0].keys())
        if header is not None and list(header) != keys:
            raise InputError("records do not match the declared fields")
        for rec in records:
            if list(rec.keys()) != keys:
                raise InputError("records are not homogeneous")
    return "".join(json_line(rec) + "\n" for rec in records)


def write_series(path, records, header=None, fmt=None):
    """Write homogeneous records as CSV or JSON lines; returns the byte count.

    The format follows ``fmt`` or the extension (``.jsonl`` for JSON lines,
    anything else CSV).
    """
    path = os.fspath(path)
    fmt = fmt or ("jsonl" if path.endswith(".jsonl") else "csv")
    records = [dict(r) for r in records]
    text = format_jsonl(records, header) if fmt == "jsonl" else format_csv(records, header)
    data = text.encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc.strerror}", path=path) from exc
    return len(data)


def write_json(path, obj):
    path = os.fspath(path)
    data = (_json_value(obj) + "\n").encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc.strerror}", path=path) from exc
    return len(data)


def _parse_cell(s):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return float(s)
    except ValueError:
        return s


def read_series(path):
    """Read back a file produced by :func:`write_series` as a list of dicts."""
    path = os.fspath(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        if path.endswith(".jsonl"):
            return [json.loads(line) for line in fh if line.strip()]
        rows = list(csv.reader(fh))
    if not rows:
        return []
    header = rows[0]
    return [dict(zip(header, (_parse_cell(c) for c in row))) for row in rows[1:]]


def profile_records(profile):
    from .stationary import PROFILE_HEADER

    return [dict(zip(PROFILE_HEADER, row)) for row in profile.rows()]


def snapshot_records(traj):
    """One CSV row per node and snapshot in the solver's snapshot format."""
    from .solver import SNAPSHOT_HEADER

    out = []
    for s in traj.snapshots:
        phi, psi = s.perturbation(traj.profile)
        x = s.x
        for i in range(s.N):
            out.append(dict(zip(SNAPSHOT_HEADER, (s.t, x[i], s.s[i], s.r[i], s.v[i], s.u[i],
                                                  phi[i], psi[i]))))
    return out
