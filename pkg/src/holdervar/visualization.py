"""
Static plots of experiment curves (q_n sequences, convergence and drift curves).
"""

from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# Byte-stable SVG output across reruns.
plt.rcParams["svg.hashsalt"] = "holdervar"
plt.rcParams["svg.fonttype"] = "none"


def plot_curves(name: str, curves: Dict[str, List[float]], output_path: Path, x_label: str = "x") -> Path:
    """
    Plot one family of curves on log-log axes and save it as SVG.

    Args:
        name: Plot title
        curves: Mapping with an 'x' entry and one entry per plotted series
        output_path: Where the SVG should be written
        x_label: Label of the horizontal axis

    Returns:
        Path to the generated SVG file
    """
    x = curves["x"]
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, series in curves.items():
        if label == "x":
            continue
        positive = [(a, b) for a, b in zip(x, series) if a > 0 and b is not None and b > 0]
        if not positive:
            continue
        xs, ys = zip(*positive)
        ax.loglog(xs, ys, marker="o", markersize=3, label=label)
    ax.set_title(name)
    ax.set_xlabel(x_label)
    ax.grid(True, which="both", linewidth=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    output_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return output_path
