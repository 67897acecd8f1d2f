//! Matplotlib script that renders the sweep CSV.

use std::path::Path;

use crate::error::{Error, Result};

const TEMPLATE: &str = r#"#!/usr/bin/env python3
"""BER, channel NMSE and AirComp NMSE against SNR from a simulate CSV."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "@CSV@"
out = sys.argv[2] if len(sys.argv) > 2 else "@PNG@"

curves = defaultdict(list)
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        curves[(row["mode"], float(row["velocity_kmh"]))].append(row)

panels = [
    ("ber", "BER", True),
    ("nmse_channel_db", "Channel NMSE [dB]", False),
    ("nmse_aircomp_db", "AirComp NMSE [dB]", False),
]
styles = {"full": "-o", "genie-channel": "--", "genie-symbols": ":s", "genie-both": "-."}

fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))
for ax, (column, label, log_scale) in zip(axes, panels):
    for (mode, velocity), rows in sorted(curves.items()):
        pts = [(float(r["snr_db"]), float(r[column])) for r in rows if r[column] not in ("", "inf", "-inf", "NaN")]
        if log_scale:
            pts = [(x, y) for x, y in pts if y > 0]
        if not pts:
            continue
        pts.sort()
        xs, ys = zip(*pts)
        ax.plot(xs, ys, styles.get(mode, "-"), label=f"{mode}, {velocity:g} km/h", markersize=4)
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel(label)
    ax.grid(True, which="both", alpha=0.3)
axes[0].legend(fontsize=7)
fig.tight_layout()
fig.savefig(out, dpi=150)
print(f"wrote {out}")
"#;

/// Script text reading `csv_path` and writing a PNG next to it.
pub fn plot_script(csv_path: &Path) -> String {
    let csv = csv_path.display().to_string();
    let png = csv_path.with_extension("png").display().to_string();
    TEMPLATE.replace("@CSV@", &escape(&csv)).replace("@PNG@", &escape(&png))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn write_plot_script(path: &Path, csv_path: &Path) -> Result<()> {
    std::fs::write(path, plot_script(csv_path)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
