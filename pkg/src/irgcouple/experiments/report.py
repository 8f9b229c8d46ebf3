"""Report writers.

``json`` is the canonical form (what ``experiment verify`` compares).
``csv`` has one row per trial with the columns

    kind,n,trial,stream_key,status,value,lower,upper,heavy_count

where columns that do not apply to the experiment kind are left empty.
``plotdata`` has one row per n:

    n,trials,mean_value,coverage,wilson_lo,wilson_hi,window_lo,window_hi

Wall-clock times never appear in any format, so reports are byte-stable.
"""
import csv
import io

from ..serialize import fmt_float

CSV_COLUMNS = ["kind", "n", "trial", "stream_key", "status", "value", "lower", "upper", "heavy_count"]
PLOT_COLUMNS = ["n", "trials", "mean_value", "coverage", "wilson_lo", "wilson_hi", "window_lo", "window_hi"]
FORMATS = ("json", "csv", "plotdata")


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def _write(rows, header):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in header])
    return buf.getvalue()


def _csv_rows(report):
    for rec in report.records:
        row = {"kind": report.kind, "n": rec.get("n"), "trial": rec.get("trial"),
               "stream_key": rec.get("stream_key"), "status": rec.get("status"),
               "heavy_count": rec.get("heavy_count")}
        solve = rec.get("solves", {}).get("middle")
        if solve is not None:
            row["value"] = solve.get("value")
            row["lower"], row["upper"] = solve.get("bracket", [solve.get("value")] * 2)
        elif "chi" in rec:
            row["value"] = rec["chi"]
        elif "after" in rec:
            row["value"] = rec["after"]
            row["status"] = "witness" if rec.get("witness") else None
        elif "ok" in rec:
            row["status"] = "ok" if rec["ok"] else "violation"
        yield row


def _plot_rows(report):
    for n, block in report.aggregates.get("per_n", {}).items():
        row = {"n": int(n), "trials": block.get("trials", report.config.get("trials"))}
        row["mean_value"] = block.get("mean_value", block.get("mean_heavy"))
        cov = block.get("coverage", {}).get("status")
        if cov:
            row["coverage"] = cov["coverage"]
            row["wilson_lo"], row["wilson_hi"] = cov["wilson95"]
        win = block.get("window")
        if win:
            if "members" in win:
                row["window_lo"], row["window_hi"] = min(win["members"]), max(win["members"])
            else:
                key = "refined" if report.config.get("coverage_window") == "refined" else "interval"
                row["window_lo"], row["window_hi"] = win[key]
        yield row


def render_report(report, fmt="json"):
    if fmt == "json":
        return report.to_json()
    if fmt == "csv":
        return _write(_csv_rows(report), CSV_COLUMNS)
    if fmt == "plotdata":
        return _write(_plot_rows(report), PLOT_COLUMNS)
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")


def emit_report(report, path=None, fmt="json"):
    """Render and optionally write (LF line endings, UTF-8); returns the text."""
    text = render_report(report, fmt)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
