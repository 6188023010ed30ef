"""CSV, JSON and plot-data output for trial records.

Floats are written with ``repr`` (shortest round-trip form), missing values
as empty fields and flags as ``true``/``false``, so parsing a CSV and
writing it again reproduces it byte for byte.  ``wall_time_ms`` is left
empty unless timing is requested: it is the one field that is not a
function of the plan.
"""

import csv
import io
import json
import math

import numpy as np

from .harness import CSV_FIELDS, TrialRecord

__all__ = ["CSV_FIELDS", "emit_report", "records_to_csv", "parse_csv", "read_records",
           "plot_blocks", "FORMATS"]

FORMATS = ("csv", "json", "plotdata")
_INT_FIELDS = {"cell_index", "trial_index", "seed", "m", "n", "d", "s", "s_prime"}
_BOOL_FIELDS = {"converged"}
_STR_FIELDS = {"method"}


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else repr(float(value))
    return str(value)


def _row(record, include_timing):
    d = record if isinstance(record, dict) else record.to_dict()
    return [_fmt(d.get(k)) if (k != "wall_time_ms" or include_timing) else "" for k in CSV_FIELDS]


def records_to_csv(records, include_timing=False):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow(_row(r, include_timing))
    return buf.getvalue()


def _parse_value(key, text):
    if text == "":
        return None
    if key in _INT_FIELDS:
        return int(text)
    if key in _BOOL_FIELDS:
        return text == "true"
    if key in _STR_FIELDS:
        return text
    return float(text)


def parse_csv(text):
    """Parse CSV text into a list of dicts keyed by the schema fields."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {header}")
    return [{k: _parse_value(k, v) for k, v in zip(header, row)} for row in reader]


def _json_records(records, include_timing):
    out = []
    for r in records:
        d = r if isinstance(r, dict) else r.to_dict()
        row = {}
        for k in CSV_FIELDS:
            v = d.get(k)
            if k == "wall_time_ms" and not include_timing:
                v = None
            if isinstance(v, float) and math.isnan(v):
                v = None
            row[k] = _clean(v)
        out.append(row)
    return out


def read_records(path):
    """Load records from a report written as CSV or JSON."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        data = json.loads(text)
        rows = data["records"] if isinstance(data, dict) else data
    else:
        rows = parse_csv(text)
    out = []
    for row in rows:
        kw = {k: row.get(k) for k in CSV_FIELDS}
        for k in ("error_l2", "objective", "bound", "feasibility_margin", "lambda_or_mu_or_eps"):
            if kw[k] is None:
                kw[k] = math.nan
        out.append(TrialRecord(**kw))
    return out


def plot_blocks(records, axis=None, y="median_error_l2"):
    """Group records into ``(header, xs, ys)`` blocks along one sweep axis.

    Each block fixes the method and every other axis; ``y`` is the median
    (or mean, for ``mean_error_l2``) of ``error_l2`` across trials at each
    ``x``.  ``axis`` defaults to the first of m, s, sigma, s_prime that
    takes more than one value.
    """
    axes = ("m", "s", "sigma", "s_prime")
    rows = [r if isinstance(r, dict) else r.to_dict() for r in records]
    if axis is None:
        axis = next((a for a in axes if len({r[a] for r in rows}) > 1), "m")
    if axis not in axes:
        raise ValueError(f"unknown plot axis {axis!r}")
    reducer = np.mean if y == "mean_error_l2" else np.median
    groups = {}
    for r in rows:
        key = (r["method"],) + tuple((a, r[a]) for a in axes if a != axis)
        groups.setdefault(key, {}).setdefault(r[axis], []).append(r["error_l2"])
    blocks = []
    for key in sorted(groups, key=lambda k: (k[0], [v for _, v in k[1:]])):
        xs = sorted(groups[key])
        ys = []
        for x in xs:
            vals = np.array([v for v in groups[key][x] if v is not None], dtype=np.float64)
            vals = vals[np.isfinite(vals)]
            ys.append(float(reducer(vals)) if vals.size else math.nan)
        fixed = " ".join(f"{a}={_fmt(v)}" for a, v in key[1:])
        header = f"# method={key[0]} x={axis} y={y} {fixed}".rstrip()
        blocks.append((header, xs, ys))
    return blocks


def emit_report(records, aggregate=None, format="csv", path=None, include_timing=False, axis=None):
    """Write ``records`` as csv, json or plotdata to ``path``; returns the text.

    JSON holds ``{"records": [...], "aggregate": [...]}`` with record keys
    identical to the CSV columns.
    """
    if not records:
        raise ValueError("no records to report")
    if format == "csv":
        text = records_to_csv(records, include_timing)
    elif format == "json":
        payload = {"records": _json_records(records, include_timing),
                   "aggregate": [_clean(a.to_dict() if hasattr(a, "to_dict") else a)
                                 for a in (aggregate or [])]}
        text = json.dumps(payload, indent=1, allow_nan=False) + "\n"
    elif format == "plotdata":
        lines = []
        for header, xs, ys in plot_blocks(records, axis=axis):
            lines.append(header)
            lines.extend(f"{_fmt(x)} {_fmt(v) or 'nan'}" for x, v in zip(xs, ys))
            lines.append("")
        text = "\n".join(lines)
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if path is not None:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text


def _clean(v):
    """NaN to ``None`` and numpy scalars to Python, recursively."""
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and math.isnan(v):
        return None
    return v
