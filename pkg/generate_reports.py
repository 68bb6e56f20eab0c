#!/usr/bin/env python3
"""
Run the criterion and recurrence scans on every table in the tables directory and write CSV reports.
"""
import math
import os
import sys
from pathlib import Path

import click
import pandas as pd
from tqdm import tqdm

sys.path.append(str(Path(__file__).parent))

from src.cli.main import RECURRENCE_COLUMNS
from src.cli.schemas import load_table
from src.config import settings
from src.criterion.verification import CSV_COLUMNS, chebyshev_grid, verify_table
from src.dynamics.first_return import first_return_iet
from src.exceptions import DomainError, NibbledError
from src.flattening.flat_polygon import build_flat_polygon
from src.flattening.partition import interval_partition
from src.iet.iet import recurrence_diagnostic
from src.surfaces.translation_surface import unfold
from src.utils.logging_config import get_logger, setup_logging
from src.utils.metrics import metrics_collector

logger = get_logger(__name__)


def recurrence_rows(table, name: str, samples: int, n: int):
    """n·ε_n tails for the first-return IET of every surface component at ``samples`` points per interval."""
    rows = []
    points = [(J, s) for J in interval_partition(table).intervals for s in chebyshev_grid(J, samples)]
    for J, s in tqdm(points, desc=f"recurrence {name}", file=sys.stderr):
        flat = build_flat_polygon(table, J, s)
        for c, component in enumerate(flat.components):
            row = {"interval": f"({J[0]:.12g},{J[1]:.12g})", "s": s, "component": c}
            try:
                system = first_return_iet(unfold(component))
                record = recurrence_diagnostic(system.iet, n, max(1, n // 2))
                row.update(d=system.iet.d, **record.to_dict())
            except DomainError as e:
                logger.warning(f"No return map for {name} at s={s}, component {c}: {e}")
                row.update(d=0, min_tail=math.nan, argmin_n=-1, connection_found=False)
            rows.append(row)
    return pd.DataFrame(rows, columns=RECURRENCE_COLUMNS)


@click.command()
@click.option("--grid", type=int, default=None, help="Grid points per interval (default NB_GRID_SIZE).")
@click.option("--samples", type=int, default=3, show_default=True, help="Recurrence samples per interval.")
@click.option("--n", "n", type=int, default=1000, show_default=True, help="Orbit length for the recurrence scan.")
@click.option("--tables-dir", default=None, help="Directory of table JSON files (default NB_TABLES_DIR).")
def main(grid, samples, n, tables_dir):
    """Scan every table and summarize the verdicts."""
    setup_logging(settings.log_level, settings.log_file)

    tables_dir = Path(tables_dir or settings.tables_dir)
    reports_dir = Path(settings.reports_dir)
    os.makedirs(reports_dir, exist_ok=True)
    paths = sorted(tables_dir.glob("*.json"))
    if not paths:
        logger.warning(f"No table files in {tables_dir}")
        print(f"\n⚠️  No tables found in {tables_dir}")
        print("Run: python setup.py")
        return

    summary = []
    exit_code = 0
    for path in paths:
        logger.info(f"Scanning {path.name}...")
        try:
            table = load_table(str(path))
            reports = verify_table(table, grid_size=grid, progress=True)
            recurrence = recurrence_rows(table, path.stem, samples, n)
        except NibbledError as e:
            logger.error(f"{path.name}: {type(e).__name__}: {e}")
            exit_code = max(exit_code, getattr(e, "exit_code", 2))
            continue
        frame = pd.concat([report.to_frame() for report in reports], ignore_index=True)
        frame[CSV_COLUMNS].to_csv(reports_dir / f"{path.stem}_criterion.csv", index=False, float_format="%.12g")
        recurrence.to_csv(reports_dir / f"{path.stem}_recurrence.csv", index=False, float_format="%.12g")
        for report in reports:
            summary.append((path.name, report.interval, report.regime, report.case, report.verdict))

    print("\n" + "=" * 50)
    print("CRITERION REPORTS")
    print("=" * 50)
    for name, interval, regime, case, verdict in summary:
        print(f"{name:24s} ({interval[0]:.4g}, {interval[1]:.4g})  {regime:10s} {case:5s} {verdict}")
    print(f"\nReports written to {reports_dir}")
    print(f"Metrics: {metrics_collector.get_metrics()}")
    print("=" * 50)
    if exit_code:
        sys.exit(exit_code)


if __name__ == "__main__":
    main()
