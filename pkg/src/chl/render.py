"""Trace attached particles through the evolving cluster map and export figures.

The cluster is built incrementally in the backward picture: at each event the
existing point sets are pushed through the new slit map and the new particle
enters as the freshly sampled segment ``[x, x + i*lam]``.  After n events,
particle k has been moved by the maps of events k+1..n (newest outermost),
which is exactly the backward process's cluster; pathwise it coincides with
the forward cluster built from the reversed event order, and at fixed time
forward and backward clusters share one law.  A direct forward construction
is kept for cross-checking.

Exports are an SVG figure (screen coordinates, seam-aware polylines) and a
flat CSV of the sampled points.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conformal import CylinderParams, _reduce, cyl_slit
from .process import EventLog

__all__ = ["ParticleTrace", "RenderStyle", "trace_cluster", "export_svg", "export_csv"]


@dataclass(frozen=True)
class ParticleTrace:
    """Sampled polyline of one attached particle.

    Points are reported with abscissae reduced to the fundamental domain;
    ``crosses_seam`` flags polylines whose reduced representation jumps
    across ``Re = +-pi*N``.
    """

    event_index: int
    birth_time: float
    points: tuple[complex, ...]
    crosses_seam: bool


@dataclass(frozen=True)
class RenderStyle:
    stroke: str = "#1a3a6b"
    stroke_width: float = 0.35
    background: str = "white"
    width_px: int = 900


def _finalize(params: CylinderParams, index: int, birth: float, pts: list[complex]) -> ParticleTrace:
    reduced = [complex(_reduce(p.real, params.period), p.imag) for p in pts]
    half = params.half_period
    crosses = any(
        abs(a.real - b.real) > half for a, b in zip(reduced, reduced[1:])
    )
    return ParticleTrace(index, birth, tuple(reduced), crosses)


def _slit_segment(params: CylinderParams, x: float, samples: int) -> list[complex]:
    steps = samples - 1
    return [complex(x, params.lam * k / steps) for k in range(samples)]


def trace_cluster(
    log: EventLog,
    samples_per_slit: int = 16,
    forward: bool = False,
) -> list[ParticleTrace]:
    """Final positions of every particle's sampled polyline.

    Backward (default): incremental, one map application per existing point
    per event, O(n^2 * samples) total.  Forward: particle k is the image of
    its slit segment under the k-1 earlier maps composed earliest-outermost;
    same leading cost, no sharing between particles.
    """
    if samples_per_slit < 2:
        raise ValueError("samples_per_slit must be at least 2")
    params = log.params
    events = log.events
    if forward:
        traces = []
        for k, e in enumerate(events):
            pts = _slit_segment(params, e.x, samples_per_slit)
            for j in range(k - 1, -1, -1):  # earliest event ends up outermost
                pts = [cyl_slit(params, events[j].x, p) for p in pts]
            traces.append(_finalize(params, k, e.time, pts))
        return traces
    live: list[list[complex]] = []
    for e in events:
        for pts in live:
            pts[:] = [cyl_slit(params, e.x, p) for p in pts]
        live.append(_slit_segment(params, e.x, samples_per_slit))
    return [
        _finalize(params, k, events[k].time, pts) for k, pts in enumerate(live)
    ]


def _seam_runs(params: CylinderParams, pts: tuple[complex, ...]) -> list[list[complex]]:
    """Split a reduced polyline into runs that do not jump across the seam."""
    half = params.half_period
    runs: list[list[complex]] = [[pts[0]]]
    for a, b in zip(pts, pts[1:]):
        if abs(b.real - a.real) > half:
            runs.append([b])
        else:
            runs[-1].append(b)
    return runs


def export_svg(
    traces: list[ParticleTrace],
    params: CylinderParams,
    style: RenderStyle | None = None,
) -> bytes:
    """Render the traces as an SVG 1.1 document (y axis flipped to screen)."""
    if not traces:
        raise ValueError("export_svg requires at least one trace")
    style = style or RenderStyle()
    half = params.half_period
    top = 1.1 * max(max(p.imag for p in t.points) for t in traces)
    top = max(top, params.lam)
    width = 2.0 * half
    scale = style.width_px / width
    height_px = top * scale
    # viewBox spans the fundamental domain [-pi N, pi N]; the imaginary axis
    # is flipped into screen coordinates when points are emitted
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{style.width_px:.0f}" height="{height_px:.2f}" '
        f'viewBox="{-half:.6g} 0 {width:.6g} {top:.6g}">\n'
        f'<rect x="{-half:.6g}" y="0" width="{width:.6g}" height="{top:.6g}" '
        f'fill="{style.background}"/>\n'
    ]
    for trace in traces:
        for run in _seam_runs(params, trace.points):
            coords = " ".join(f"{p.real:.6g},{top - p.imag:.6g}" for p in run)
            parts.append(
                f'<polyline fill="none" stroke="{style.stroke}" '
                f'stroke-width="{style.stroke_width:.6g}" points="{coords}"/>\n'
            )
    parts.append("</svg>\n")
    return "".join(parts).encode("utf-8")


def export_csv(traces: list[ParticleTrace]) -> bytes:
    """Flat CSV of all sampled points, 17 significant digits per float."""
    lines = ["event_index,birth_time,point_index,re,im"]
    for trace in traces:
        for j, p in enumerate(trace.points):
            lines.append(
                f"{trace.event_index},{trace.birth_time:.17g},{j},{p.real:.17g},{p.imag:.17g}"
            )
    return ("\n".join(lines) + "\n").encode("utf-8")
