"""Curve output: delimited text, a JSON mirror, and rendered figures.

The delimited format is locale-independent CSV with a fixed column order,
'.' as the decimal separator, and shortest round-trip number formatting
(which switches to scientific notation below 1e-4). Metadata travels in a
JSON sidecar so the CSV body stays byte-comparable across runs.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

CSV_COLUMNS = ("axis", "pout_analytic", "pout_mc", "ci_low", "ci_high",
               "trials", "outage_count")
GAP_COLUMNS = ("delta", "delta_log10")

_AXIS_LABELS = {
    "power_db": "P/N0 [dB]",
    "rho": "estimation correlation rho",
    "gamma_th": "outage threshold (linear)",
    "L": "number of relays",
}


def format_cell(value) -> str:
    """Shortest round-trip decimal text; empty string for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def curve_rows(curve, include_gap: bool = False) -> list[list]:
    """Raw row values in CSV column order (None marks an empty cell)."""
    rows = []
    for pt in curve.points:
        mc = pt.mc
        row = [
            pt.axis_value,
            pt.pout_analytic,
            None if mc is None else mc.p_hat,
            None if mc is None else mc.ci_low,
            None if mc is None else mc.ci_high,
            None if mc is None else mc.trials,
            None if mc is None else mc.outage_count,
        ]
        if include_gap:
            delta = delta_log10 = None
            if pt.pout_analytic is not None and mc is not None:
                delta = pt.pout_analytic - mc.p_hat
                if pt.pout_analytic > 0 and mc.p_hat > 0:
                    delta_log10 = math.log10(pt.pout_analytic) - math.log10(mc.p_hat)
            row += [delta, delta_log10]
        rows.append(row)
    return rows


def csv_text(curve, include_gap: bool = False) -> str:
    cols = CSV_COLUMNS + (GAP_COLUMNS if include_gap else ())
    lines = [",".join(cols)]
    for row in curve_rows(curve, include_gap):
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(curve, path, include_gap: bool = False) -> None:
    Path(path).write_text(csv_text(curve, include_gap))


def meta_path_for(path) -> Path:
    return Path(path).with_suffix(".meta.json")


def write_meta(curve, path) -> None:
    Path(path).write_text(json.dumps(curve.metadata, indent=2, sort_keys=True) + "\n")


def json_payload(curve, include_gap: bool = False) -> dict:
    cols = CSV_COLUMNS + (GAP_COLUMNS if include_gap else ())
    return {
        "metadata": curve.metadata,
        "columns": list(cols),
        "rows": [dict(zip(cols, row)) for row in curve_rows(curve, include_gap)],
    }


def write_json(curve, path, include_gap: bool = False) -> None:
    Path(path).write_text(
        json.dumps(json_payload(curve, include_gap), indent=2, sort_keys=True) + "\n")


def render_png(curve, path) -> None:
    """Render the curve as a log-scale outage figure next to the data file."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ana = [(pt.axis_value, pt.pout_analytic) for pt in curve.points
           if pt.pout_analytic is not None and pt.pout_analytic > 0]
    if ana:
        ax.semilogy([x for x, _ in ana], [y for _, y in ana], "-", lw=1.5,
                    label="analytic")
    mcs = [(pt.axis_value, pt.mc) for pt in curve.points
           if pt.mc is not None and pt.mc.p_hat > 0]
    if mcs:
        xs = [x for x, _ in mcs]
        ps = [m.p_hat for _, m in mcs]
        err_low = [m.p_hat - m.ci_low for _, m in mcs]
        err_high = [m.ci_high - m.p_hat for _, m in mcs]
        ax.errorbar(xs, ps, yerr=[err_low, err_high], fmt="o", ms=4, capsize=3,
                    lw=1, label="monte carlo (95% CI)")
        ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABELS.get(curve.axis, curve.axis))
    ax.set_ylabel("outage probability")
    protocol = str(curve.metadata.get("protocol", "")).upper()
    title = f"{protocol} outage vs {curve.axis}" if protocol else f"outage vs {curve.axis}"
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if ana or mcs:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
