"""CSV/JSON/SVG emission of experiment results."""

import json
import logging
from pathlib import Path
from typing import Iterable, List, Union

import pandas as pd

from .models import SCHEMA_VERSION, ExperimentResult
from .visualization import plot_curves

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "svg")
FLOAT_FORMAT = "%.12g"


def summary_document(result: ExperimentResult) -> dict:
    """The JSON summary: schema version, config echo, seed, summary values and witnesses."""
    return {
        "schema_version": SCHEMA_VERSION,
        "command": result.command.value,
        "seed": result.config.seed,
        "config": result.config.model_dump(mode="json", exclude={"out_dir"}),
        "summary": result.summary,
        "witnesses": result.witnesses,
        "tables": [table.name for table in result.tables],
    }


def emit_report(
    result: ExperimentResult,
    out_dir: Union[str, Path],
    formats: Iterable[str] = FORMATS,
) -> List[Path]:
    """
    Write one CSV per table, a JSON summary and optional SVG plots.

    Output contains no timestamps, so reruns with the same config and seed give
    byte-identical CSV and JSON files. A table without rows still gets its header.

    Args:
        result: Experiment result to write
        out_dir: Output directory (created if missing)
        formats: Subset of ('csv', 'json', 'svg')

    Returns:
        Paths of the written files in write order

    Raises:
        OSError: If the output directory is not writable
        ValueError: If an unknown format is requested
    """
    formats = set(formats)
    unknown = formats - set(FORMATS)
    if unknown:
        raise ValueError(f"Unknown report format(s): {', '.join(sorted(unknown))}. Use csv, json or svg.")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    if "csv" in formats:
        for table in result.tables:
            path = out_dir / f"{table.name}.csv"
            frame = pd.DataFrame(table.rows, columns=table.columns)
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            written.append(path)
            logger.info(f"emit_report: {path.name} ({len(frame)} rows)")

    if "json" in formats:
        path = out_dir / "summary.json"
        text = json.dumps(summary_document(result), indent=2, sort_keys=True, default=float, allow_nan=True)
        path.write_text(text + "\n", encoding="utf-8")
        written.append(path)

    if "svg" in formats:
        for name, curves in sorted(result.curves.items()):
            written.append(plot_curves(name, curves, out_dir / f"{name}.svg"))

    return written
