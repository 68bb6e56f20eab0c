"""
Deterministic SVG figures of tables, flattened polygons and trajectories.
"""
import io
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from src.billiards.conics import cartesian_point  # noqa: E402
from src.billiards.physical_flow import PhysicalTrajectory  # noqa: E402
from src.billiards.tables import QUADRANT_SIGNS, NibbledEllipse  # noqa: E402
from src.flattening.flat_polygon import FlatTable, flat_image  # noqa: E402
from src.utils.logging_config import get_logger  # noqa: E402

logger = get_logger(__name__)

PRECISION = 6
ARC_SAMPLES = 64

STYLES = {
    "boundary": {"colors": "black", "linewidths": 1.2},
    "polygon": {"colors": "#1f4e79", "linewidths": 1.0},
    "trajectory": {"colors": "#c0392b", "linewidths": 0.6},
}


def _rounded(polyline) -> np.ndarray:
    return np.round(np.asarray(polyline, dtype=float), PRECISION) + 0.0


def _sorted(polylines: Sequence) -> List[np.ndarray]:
    rounded = [_rounded(p) for p in polylines if len(p) >= 2]
    return sorted(rounded, key=lambda p: tuple(p.ravel()))


def table_polylines(table: NibbledEllipse, samples: int = ARC_SAMPLES) -> List[np.ndarray]:
    """The confocal boundary arcs, each sampled uniformly in its free coordinate."""
    polylines = []
    for arc in table.boundary_arcs():
        signs = QUADRANT_SIGNS[arc.quadrant]
        lo, hi = arc.span
        ts = np.linspace(lo, hi, samples)
        if arc.kind == "ellipse":
            points = [cartesian_point(table.family, t, arc.lam, signs) for t in ts]
        elif arc.kind == "hyperbola":
            points = [cartesian_point(table.family, arc.lam, t, signs) for t in ts]
        else:
            points = list(arc.endpoints(table.family))
        polylines.append(np.array(points))
    return polylines


def flat_polylines(flat: FlatTable) -> List[np.ndarray]:
    """Closed outlines of the parts of 𝐏(s), each shifted by its chart offset."""
    polylines = []
    for label, part in flat.polygon.parts.items():
        offset = flat.offsets.get(label, 0.0)
        vertices = [(x + offset, y) for x, y in part.vertices()]
        polylines.append(np.array(vertices + vertices[:1]))
    return polylines


def render_svg(layers: Dict[str, Sequence], title: Optional[str] = None, path: Optional[str] = None) -> str:
    """Draw polyline layers (``boundary``, ``polygon``, ``trajectory``) into an SVG string.

    Coordinates are rounded to 1e-6 and polylines drawn in sorted order;
    with the fixed hash salt and no date metadata equal inputs give equal
    bytes.
    """
    plt.rcParams["svg.hashsalt"] = "nibbled"
    plt.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(6, 6))
    try:
        for name in ("boundary", "polygon", "trajectory"):
            polylines = _sorted(layers.get(name, []))
            if polylines:
                ax.add_collection(LineCollection(polylines, **STYLES[name]))
        ax.autoscale()
        ax.set_aspect("equal")
        ax.axis("off")
        if title:
            ax.set_title(title)
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None, "Creator": None})
    finally:
        plt.close(fig)
    document = buffer.getvalue()
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(document)
        logger.info(f"Wrote SVG to {path}")
    return document


def render_table(table: NibbledEllipse, trajectory: Optional[PhysicalTrajectory] = None, path: Optional[str] = None) -> str:
    layers = {"boundary": table_polylines(table)}
    if trajectory is not None:
        layers["trajectory"] = [np.array(trajectory.vertices())]
    return render_svg(layers, path=path)


def render_flat(flat: FlatTable, trajectory: Optional[PhysicalTrajectory] = None, path: Optional[str] = None) -> str:
    """𝐏(s) with an optional overlay of the flattened images of a physical trajectory."""
    layers = {"polygon": flat_polylines(flat)}
    if trajectory is not None:
        overlay = []
        for segment in trajectory.segments:
            if segment.length > 0.0:
                overlay.extend(flat_image(flat.table, flat.s, segment.start, segment.end, samples=32))
        layers["trajectory"] = overlay
    return render_svg(layers, title=f"s = {flat.s:.6g} (case {flat.case})", path=path)
