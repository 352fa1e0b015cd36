"""Deterministic CSV/JSON emission of scenario outputs.

Report bodies must be byte-identical for identical (config, seed)
regardless of execution details, so serialization uses sorted keys,
fixed float formats and no timestamps.
"""

import csv
import json
import math
import os
from dataclasses import asdict

__all__ = ["emit_report", "emit_guard_sweep", "emit_leakage_table", "emit_rows"]

_SENSOR_FIELDS = [
    "sensor_id", "year", "rate_mbps", "guard_mhz", "adoption_factor",
    "n_footprint", "delta", "delta_db", "net_gain_db", "mean_p_tx_dbw",
    "rfi_dbw", "margin_db", "infeasibility_rate",
    "worst_county_fips", "worst_county_name",
]

_FLOAT_FORMATS = {
    "rate_mbps": "{:.1f}",
    "guard_mhz": "{:.1f}",
    "adoption_factor": "{:.2f}",
    "delta": "{:.6e}",
    "delta_db": "{:.4f}",
    "net_gain_db": "{:.4f}",
    "mean_p_tx_dbw": "{:.4f}",
    "rfi_dbw": "{:.4f}",
    "margin_db": "{:.4f}",
    "infeasibility_rate": "{:.6f}",
}


def _format_value(key, value):
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        fmt = _FLOAT_FORMATS.get(key, "{:.6f}")
        return fmt.format(value)
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return None if math.isnan(value) else ("-inf" if value < 0 else "inf")
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _open_out(out_dir, name):
    try:
        os.makedirs(out_dir, exist_ok=True)
        return open(os.path.join(out_dir, name), "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {os.path.join(out_dir, name)}: {exc}") from exc


def emit_rows(rows, fieldnames, out_dir, basename, header=None, formats=("csv", "json")):
    """Write dict rows as CSV (with a commented config header) and/or JSON."""
    if not rows:
        raise ValueError("nothing to emit: empty row set")
    paths = {}
    header = header or {}
    if "csv" in formats:
        with _open_out(out_dir, f"{basename}.csv") as fh:
            for key in sorted(header):
                fh.write(f"# {key}={_json_safe(header[key])}\n")
            writer = csv.writer(fh)
            writer.writerow(fieldnames)
            for row in rows:
                writer.writerow([_format_value(k, row[k]) for k in fieldnames])
            paths["csv"] = fh.name
    if "json" in formats:
        with _open_out(out_dir, f"{basename}.json") as fh:
            json.dump({"config": _json_safe(header), "rows": _json_safe(rows)},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
            paths["json"] = fh.name
    return paths


def emit_report(reports, out_dir, basename="rfi_report", formats=("csv", "json")):
    """Emit one or more RfiReports as a flat sensor-row table.

    All reports in one emission must share their configuration header
    apart from the grid coordinates (year, rate), which live per row.
    """
    if not isinstance(reports, (list, tuple)):
        reports = [reports]
    if not reports:
        raise ValueError("nothing to emit: empty report set")
    rows = []
    for report in reports:
        if not report.rows:
            raise ValueError("nothing to emit: report has no sensor rows")
        rows.extend(asdict(r) for r in report.rows)
    header = dict(reports[0].config)
    for key in ("year", "rate_bps", "penetration_per_100"):
        header.pop(key, None)
    return emit_rows(rows, _SENSOR_FIELDS, out_dir, basename, header=header,
                     formats=formats)


def emit_guard_sweep(rows, out_dir, basename="guard_sweep", header=None,
                     formats=("csv", "json")):
    dict_rows = [asdict(r) for r in rows]
    return emit_rows(dict_rows, ["year", "guard_mhz", "max_rate_mbps"], out_dir,
                     basename, header=header, formats=formats)


def emit_leakage_table(rows, out_dir, basename="leakage", header=None,
                       formats=("csv", "json")):
    return emit_rows(rows, ["sensor_id", "order", "guard_mhz", "delta", "delta_db"],
                     out_dir, basename, header=header, formats=formats)
