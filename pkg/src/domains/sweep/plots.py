"""Post-hoc SVG plot of Nu against Ra with the two bound shapes as guides."""

import json
import math

from pathlib import Path
from typing import Dict, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from common.errors import InputError  # noqa: E402
from domains.diagnostics.bounds import delta_choice  # noqa: E402
from domains.sweep.results import CSV_COLUMNS, SweepRow  # noqa: E402


PLOT_NAME = "nu_vs_ra"


def guide_curves(Ra: float, Pr: float) -> Dict[str, float]:
    """(Ra ln Ra)^{1/3} and (Pr^{-1} Ra ln Ra)^{1/2}; the second is absent at Pr = inf."""
    guides = {"high_pr": 1.0 / delta_choice(Ra, math.inf, 1.0)}
    if math.isfinite(Pr):
        guides["low_pr"] = math.sqrt(Ra * math.log(Ra) / Pr)
    return guides


def emit_plots(rows: Sequence[SweepRow], out: Path, constant: float = 1.0) -> list[Path]:
    """Writes plots/nu_vs_ra.{svg,csv,json}; guides are scaled by `constant`."""
    completed = [row for row in rows if row.ok and row.Ra > 1.0]
    if not completed:
        raise InputError(message="no completed sweep rows to plot")

    plots = out / "plots"
    plots.mkdir(parents=True, exist_ok=True)
    ra_axis = np.geomspace(min(row.Ra for row in completed), max(row.Ra for row in completed), 64)

    figure, axes = plt.subplots(figsize=(6.0, 4.5))
    guides: Dict[str, Dict[str, list[float]]] = {}
    for Pr in sorted({row.Pr for row in completed}):
        subset = sorted((row for row in completed if row.Pr == Pr), key=lambda row: row.Ra)
        label = "inf" if math.isinf(Pr) else f"{Pr:g}"
        axes.loglog([row.Ra for row in subset], [row.nu_volume for row in subset], "o", label=f"Pr={label}")
        curves = [guide_curves(float(ra), Pr) for ra in ra_axis]
        guides[label] = {name: [constant * curve[name] for curve in curves] for name in curves[0]}
        axes.loglog(ra_axis, guides[label]["high_pr"], "--", color="gray", linewidth=0.8)
        if "low_pr" in guides[label]:
            axes.loglog(ra_axis, guides[label]["low_pr"], ":", linewidth=0.8, label=f"(Ra ln Ra/Pr)^1/2, Pr={label}")
    axes.set_xlabel("Ra")
    axes.set_ylabel("Nu")
    axes.set_title("Nusselt number against Rayleigh number")
    axes.legend(fontsize="small")
    figure.tight_layout()

    svg_path = plots / f"{PLOT_NAME}.svg"
    figure.savefig(svg_path, format="svg")
    plt.close(figure)

    csv_path = plots / f"{PLOT_NAME}.csv"
    pd.DataFrame([row.record() for row in completed], columns=list(CSV_COLUMNS)).to_csv(csv_path, index=False)

    json_path = plots / f"{PLOT_NAME}.json"
    payload = {"constant": constant, "Ra": [float(ra) for ra in ra_axis], "guides": guides}
    json_path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return [svg_path, csv_path, json_path]
