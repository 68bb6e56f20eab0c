r"""
Command-line front end: ``python -m src.cli <command> …``.

CSV column orders:

\b
  criterion   interval,s,wronskian,wronskian_err,bracket_x_min,bracket_x_max,
              bracket_y_min,bracket_y_max,status
  recurrence  interval,s,component,d,min_tail,argmin_n,connection_found
  birkhoff    interval,s,box,start,average,target,deviation
  trace       t,polygon,x,y (flat) or segment,t,x,y,s (physical)
"""
import json
import math
import sys
from typing import Iterator, List, Optional, Sequence, Tuple

import click
import numpy as np
import pandas as pd
from tqdm import tqdm

from src.billiards.physical_flow import billiard_trace, sample_start
from src.billiards.tables import NibbledEllipse
from src.cli.rendering import render_flat, render_table
from src.cli.schemas import TIGHTENABLE, RunConfig, dump_table, load_table, parse_tolerances
from src.config import settings
from src.criterion.verification import CSV_COLUMNS, chebyshev_grid, verify_wronbrack
from src.dynamics.first_return import first_return_iet
from src.dynamics.translation_flow import birkhoff_averages, golden_start, polygon_boxes, trace
from src.exceptions import ConsistencyFailure, DomainError, HitSingularity, NibbledError
from src.flattening.flat_polygon import FlatTable, build_flat_polygon
from src.flattening.partition import Interval, interval_partition
from src.iet.iet import recurrence_diagnostic
from src.surfaces.crossings import enumerate_DBE, probe_DBE
from src.surfaces.singularities import euler_characteristic, genus
from src.surfaces.translation_surface import TranslationSurface, polygon_name, unfold
from src.utils.logging_config import get_logger, setup_logging
from src.utils.metrics import metrics_collector

logger = get_logger(__name__)

RECURRENCE_COLUMNS = ["interval", "s", "component", "d", "min_tail", "argmin_n", "connection_found"]
BIRKHOFF_COLUMNS = ["interval", "s", "box", "start", "average", "target", "deviation"]
PHYSICAL_COLUMNS = ["segment", "t", "x", "y", "s"]

FLOAT_FORMAT = "%.12g"


def _label(J: Interval) -> str:
    return f"({J[0]:.12g},{J[1]:.12g})"


def _intervals(table: NibbledEllipse, interval: str) -> List[Interval]:
    """``auto`` for every interval of the partition, else a 0-based index."""
    intervals = interval_partition(table).intervals
    if interval == "auto":
        return intervals
    try:
        index = int(interval)
    except ValueError as e:
        raise DomainError(f"--interval must be an index or 'auto', got {interval!r}") from e
    if not 0 <= index < len(intervals):
        raise DomainError(f"Interval index {index} out of range 0..{len(intervals) - 1}")
    return [intervals[index]]


def _samples(table: NibbledEllipse, interval: str, samples: int, s: Optional[float]) -> Iterator[Tuple[Interval, float]]:
    if s is not None:
        yield interval_partition(table).locate(s), s
        return
    for J in _intervals(table, interval):
        for value in chebyshev_grid(J, samples):
            yield J, value


def _surfaces(flat: FlatTable) -> List[TranslationSurface]:
    return [unfold(component) for component in flat.components]


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
        logger.info(f"Wrote {out}")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _write_frame(frame: pd.DataFrame, out: Optional[str], fmt: str):
    if fmt == "json":
        _write(json.dumps(frame.to_dict(orient="records"), indent=2) + "\n", out)
    else:
        _write(frame.to_csv(index=False, float_format=FLOAT_FORMAT), out)


def _config(ctx: click.Context, **kwargs) -> RunConfig:
    config = RunConfig.build(
        command=ctx.info_name, threads=ctx.obj.get("threads"), tolerances=ctx.obj.get("tolerances", {}), **kwargs
    )
    config.apply_tolerances()
    return config


table_option = click.option("--table", "table_path", required=True, type=click.Path(dir_okay=False), help="Table JSON file.")
out_option = click.option("--out", default=None, help="Output file (default: standard output).")
interval_option = click.option("--interval", default="auto", show_default=True, help="Partition interval index or 'auto'.")
s_option = click.option("--s", "s_value", type=float, default=None, help="A single caustic parameter instead of a scan.")


def _format_option(choices: Sequence[str], default: str):
    return click.option("--format", "fmt", type=click.Choice(list(choices)), default=default, show_default=True)


@click.group(name="nibbled", help=__doc__)
@click.option("--threads", type=int, default=None, help="Worker threads (overrides NB_THREADS).")
@click.option("--log-level", default=None, help="Log level (overrides NB_LOG_LEVEL).")
@click.option(
    "--tolerance",
    "tolerances",
    multiple=True,
    metavar="NAME=VALUE",
    help=f"Tighten a tolerance for this run; one of {', '.join(TIGHTENABLE)}.",
)
@click.pass_context
def nibbled(ctx: click.Context, threads: Optional[int], log_level: Optional[str], tolerances: Tuple[str, ...]):
    setup_logging(log_level or settings.log_level, settings.log_file)
    ctx.ensure_object(dict)
    ctx.obj["threads"] = threads
    ctx.obj["tolerances"] = parse_tolerances(tolerances)
    metrics_collector.reset_metrics()


@nibbled.group(name="table")
def table_group():
    """Table ingestion and figures."""


@table_group.command(name="validate")
@table_option
@out_option
@click.pass_context
def table_validate(ctx, table_path, out):
    """Validate a table and re-emit its canonical JSON."""
    _config(ctx, table=table_path, out=out)
    table = load_table(table_path)
    partition = interval_partition(table)
    logger.info(f"Table valid: marks {table.caustic_marks}, {len(partition.intervals)} parameter intervals")
    _write(dump_table(table), out)


@table_group.command(name="render")
@table_option
@out_option
@click.option("--s", "s_value", type=float, default=None, help="Overlay a trajectory on this caustic.")
@click.option("--horizon", type=float, default=20.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def table_render(ctx, table_path, out, s_value, horizon, seed):
    """SVG of the table outline, optionally with a physical trajectory."""
    _config(ctx, table=table_path, out=out, format="svg", horizon=horizon, seeds=[seed])
    table = load_table(table_path)
    trajectory = None
    if s_value is not None:
        trajectory = billiard_trace(table, sample_start(table, s_value, seed), horizon)
    _write(render_table(table, trajectory), out)


@nibbled.command()
@table_option
@interval_option
@s_option
@click.option("--samples", type=int, default=1, show_default=True)
@out_option
@_format_option(("json", "svg"), "json")
@click.option("--overlay-horizon", type=float, default=None, help="SVG only: overlay a flattened physical trajectory.")
@click.pass_context
def flatten(ctx, table_path, interval, s_value, samples, out, fmt, overlay_horizon):
    """Flattened generalized polygons 𝐏(s)."""
    _config(ctx, table=table_path, out=out, format=fmt, samples=samples)
    table = load_table(table_path)
    if fmt == "svg":
        J, s = next(_samples(table, interval, 1, s_value))
        flat = build_flat_polygon(table, J, s)
        trajectory = None
        if overlay_horizon:
            trajectory = billiard_trace(table, sample_start(table, s), overlay_horizon)
        _write(render_flat(flat, trajectory), out)
        return
    records = []
    for J, s in _samples(table, interval, samples, s_value):
        flat = build_flat_polygon(table, J, s)
        records.append(
            {
                "interval": list(J),
                "s": s,
                "case": flat.case,
                "regime": flat.regime,
                "ell": flat.ell,
                "components": len(flat.components),
                "offsets": dict(flat.offsets),
                "polygon": flat.polygon.to_dict(),
            }
        )
    _write(json.dumps(records, indent=2) + "\n", out)


@nibbled.command()
@table_option
@interval_option
@s_option
@click.option("--samples", type=int, default=1, show_default=True)
@out_option
@click.pass_context
def surface(ctx, table_path, interval, s_value, samples, out):
    """Unfolded translation surfaces: singularities, genus and the D/B/E cross-check."""
    _config(ctx, table=table_path, out=out, samples=samples)
    table = load_table(table_path)
    records = []
    mismatches = []
    for J, s in _samples(table, interval, samples, s_value):
        flat = build_flat_polygon(table, J, s)
        for c, translation_surface in enumerate(_surfaces(flat)):
            data = enumerate_DBE(translation_surface)
            agree = data.matches(probe_DBE(translation_surface))
            if not agree:
                mismatches.append((s, c))
            try:
                g = genus(translation_surface)
            except DomainError as e:
                logger.warning(f"No genus for component {c} at s={s}: {e}")
                g = None
            records.append(
                {
                    "interval": list(J),
                    "s": s,
                    "component": c,
                    "genus": g,
                    "euler_characteristic": euler_characteristic(translation_surface),
                    "singularities": [v.to_dict() for v in translation_surface.singularities],
                    "dbe_agree": agree,
                    "dbe": data.to_dict(),
                    "surface": translation_surface.to_dict(),
                }
            )
    _write(json.dumps(records, indent=2) + "\n", out)
    if mismatches:
        logger.error(f"Table-driven and probed D/B/E sets differ at {mismatches}")
        raise ConsistencyFailure(f"D/B/E enumeration disagrees with the probe scan at {mismatches}")


@nibbled.command()
@table_option
@interval_option
@click.option("--grid", type=int, default=None, help="Grid points per interval (default NB_GRID_SIZE).")
@out_option
@_format_option(("json", "csv"), "json")
@click.pass_context
def criterion(ctx, table_path, interval, grid, out, fmt):
    """Wronskian and bracket conditions on Chebyshev grids of the parameter intervals."""
    config = _config(ctx, table=table_path, out=out, format=fmt, grid=grid or settings.grid_size)
    table = load_table(table_path)
    reports = [
        verify_wronbrack(table, J, config.grid, config.threads, progress=True) for J in _intervals(table, interval)
    ]
    if fmt == "csv":
        frame = pd.concat([report.to_frame() for report in reports], ignore_index=True)
        _write(frame[CSV_COLUMNS].to_csv(index=False, float_format=FLOAT_FORMAT), out)
    else:
        _write(json.dumps([report.model_dump(mode="json") for report in reports], indent=2) + "\n", out)
    verdicts = {_label(report.interval): report.verdict for report in reports}
    logger.info(f"Criterion verdicts: {verdicts}")


@nibbled.command()
@table_option
@interval_option
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--n", "n", type=int, default=1000, show_default=True, help="Orbit length N.")
@click.option("--window", type=int, default=None, help="Tail window (default N/2).")
@click.option("--include-endpoints", is_flag=True, help="Count distances to 0 and |λ| in ε_n.")
@out_option
@_format_option(("csv", "json"), "csv")
@click.pass_context
def recurrence(ctx, table_path, interval, samples, n, window, include_endpoints, out, fmt):
    """min of n·ε_n over the tail window for first-return IETs of sampled surfaces."""
    config = _config(ctx, table=table_path, out=out, format=fmt, samples=samples, n=n, window=window)
    window = config.window or max(1, config.n // 2)
    table = load_table(table_path)
    rows = []
    for J, s in tqdm(list(_samples(table, interval, samples, None)), desc="recurrence", file=sys.stderr):
        flat = build_flat_polygon(table, J, s)
        for c, translation_surface in enumerate(_surfaces(flat)):
            row = {"interval": _label(J), "s": s, "component": c}
            try:
                system = first_return_iet(translation_surface)
                record = recurrence_diagnostic(system.iet, config.n, window, include_endpoints)
                row.update(d=system.iet.d, **record.to_dict())
            except DomainError as e:
                logger.warning(f"No return map for component {c} at s={s}: {e}")
                row.update(d=0, min_tail=math.nan, argmin_n=-1, connection_found=False)
            rows.append(row)
    _write_frame(pd.DataFrame(rows, columns=RECURRENCE_COLUMNS), out, fmt)


@nibbled.command()
@table_option
@interval_option
@click.option("--samples", type=int, default=3, show_default=True)
@click.option("--horizon", type=float, default=1000.0, show_default=True, help="Flow time in surface diameters.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--starts", type=int, default=1, show_default=True)
@out_option
@_format_option(("csv", "json"), "csv")
@click.pass_context
def birkhoff(ctx, table_path, interval, samples, horizon, seed, starts, out, fmt):
    """Time averages of the column boxes of every surface against their area fractions."""
    seeds = list(range(seed, seed + starts))
    config = _config(ctx, table=table_path, out=out, format=fmt, samples=samples, horizon=horizon, seeds=seeds)
    table = load_table(table_path)
    rows = []
    for J, s in tqdm(list(_samples(table, interval, samples, None)), desc="birkhoff", file=sys.stderr):
        flat = build_flat_polygon(table, J, s)
        for c, translation_surface in enumerate(_surfaces(flat)):
            boxes = polygon_boxes(translation_surface)
            targets = np.array([box.area for box in boxes]) / translation_surface.area
            for start_seed in config.seeds:
                start = golden_start(translation_surface, seed=start_seed)
                try:
                    averages = birkhoff_averages(translation_surface, boxes, start, config.horizon * translation_surface.diameter)
                except HitSingularity as e:
                    logger.warning(f"Start {start_seed} at s={s} hit a singularity; reporting partial averages")
                    averages = e.partial
                for n, (box, average, target) in enumerate(zip(boxes, averages, targets)):
                    rows.append(
                        {
                            "interval": _label(J),
                            "s": s,
                            "box": f"{c}:{polygon_name(box.polygon)}:{n}",
                            "start": start_seed,
                            "average": float(average),
                            "target": float(target),
                            "deviation": float(average - target),
                        }
                    )
    _write_frame(pd.DataFrame(rows, columns=BIRKHOFF_COLUMNS), out, fmt)


@nibbled.command(name="trace")
@table_option
@click.option("--s", "s_value", type=float, required=True)
@click.option("--horizon", type=float, default=100.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mode", type=click.Choice(["physical", "flat"]), default="physical", show_default=True)
@out_option
@_format_option(("csv", "json"), "csv")
@click.pass_context
def trace_command(ctx, table_path, s_value, horizon, seed, mode, out, fmt):
    """Export a physical billiard orbit or a translation-flow orbit on 𝐏(s)."""
    config = _config(ctx, table=table_path, out=out, format=fmt, horizon=horizon, seeds=[seed])
    table = load_table(table_path)
    if mode == "physical":
        trajectory = billiard_trace(table, sample_start(table, s_value, seed), config.horizon)
        rows, t = [], 0.0
        for n, segment in enumerate(trajectory.segments):
            rows.append((n, t, segment.start[0], segment.start[1], segment.caustic))
            t += segment.length
        if trajectory.segments:
            last = trajectory.segments[-1]
            rows.append((len(trajectory.segments) - 1, t, last.end[0], last.end[1], last.caustic))
        frame = pd.DataFrame(rows, columns=PHYSICAL_COLUMNS)
    else:
        J = interval_partition(table).locate(s_value)
        translation_surface = _surfaces(build_flat_polygon(table, J, s_value))[0]
        start = golden_start(translation_surface, seed=seed)
        try:
            flat_trajectory = trace(translation_surface, start, config.horizon)
        except HitSingularity as e:
            logger.warning(f"Flat orbit reached a singular point at t={e.length:.6g}; exporting the partial orbit")
            flat_trajectory = e.partial
        frame = flat_trajectory.to_frame()
    _write_frame(frame, out, fmt)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map errors to exit codes: 0 success, 1 bad input, 2 failed cross-check."""
    code = 0
    saved = {name: getattr(settings, name) for name in TIGHTENABLE}
    try:
        nibbled.main(args=list(argv) if argv is not None else None, prog_name="nibbled", standalone_mode=False)
    except click.UsageError as e:
        click.echo(f"Error: {e.format_message()}", err=True)
        if e.ctx is not None:
            click.echo(e.ctx.get_usage(), err=True)
        code = 1
    except click.ClickException as e:
        e.show()
        code = 1
    except click.exceptions.Abort:
        code = 1
    except NibbledError as e:
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(f"{type(e).__name__}: {e}", err=True)
        code = getattr(e, "exit_code", 2)
    finally:
        logger.info(f"Metrics: {metrics_collector.get_metrics()}")
        for name, value in saved.items():
            setattr(settings, name, value)
    return code


def main():
    sys.exit(run())
