"""Poisson-driven growth processes built from shared event logs.

An :class:`EventLog` is the time-sorted record of one Poisson point process
on the cylinder boundary strip ``[-pi*N, pi*N) x (0, t]`` with unit space-time
intensity, regenerated bit-identically from ``(params, horizon_t, seed)``.
The same log can drive every process variant:

* ``forward-chl``  - compose cylinder slit maps, earliest event outermost;
* ``backward-chl`` - newest event outermost (one new map application per
  event, so full trajectories cost O(n));
* ``forward-shl`` / ``backward-shl`` - half-plane slit maps restricted to a
  truncation window ``|x| <= window_w``, approximating the stationary
  half-plane process driven by the same arrivals;
* ``disk-hl``      - the backward cylinder composition evaluated through disk
  coordinates (one exponential chart in, one out), the classical
  disk-process conjugation.  Pointwise it is the same map as
  ``backward-chl``, which makes it the sharpest available oracle.

Evaluation at time ``s`` is cadlag: an event at exactly ``s`` is included.
"""

from __future__ import annotations

import bisect
import cmath
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .conformal import (
    CylinderParams,
    _disk_slit_origin,
    cyl_slit,
    halfplane_slit,
    map_f_inv,
)
from .rng import SplitMix64, poisson

__all__ = [
    "Event",
    "EventLog",
    "ProcessEvaluator",
    "KINDS",
    "sample_events",
    "restrict_log",
    "eval_forward_chl",
    "eval_backward_chl",
    "eval_forward_shl",
    "eval_backward_shl",
    "eval_disk_hl",
    "backward_chl_trajectory",
    "drift",
]

KINDS = ("forward-chl", "backward-chl", "forward-shl", "backward-shl", "disk-hl")
_SHL_KINDS = ("forward-shl", "backward-shl")


@dataclass(frozen=True)
class Event:
    """One Poisson arrival: time of attachment and boundary abscissa."""

    time: float
    x: float


@dataclass(frozen=True)
class EventLog:
    """Immutable, time-sorted arrival record driving all processes."""

    params: CylinderParams
    horizon_t: float
    seed: int
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(e.time for e in self.events)

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(e.x for e in self.events)

    def to_jsonl(self) -> str:
        """Serialize as JSON Lines: one header line, then one event per line.

        Floats are written with 17 significant digits so that parsing back
        reproduces the exact binary values.
        """
        p = self.params
        lines = [
            '{"N": %s, "lambda": %s, "delta": %s, "horizon": %s, "seed": %d}'
            % (_g17(p.radius_n), _g17(p.lam), _g17(p.delta), _g17(self.horizon_t), self.seed)
        ]
        for e in self.events:
            lines.append('{"t": %s, "x": %s}' % (_g17(e.time), _g17(e.x)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "EventLog":
        """Parse the JSONL form; validates the header delta against N, lambda."""
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty event log stream")
        head = json.loads(lines[0])
        params = CylinderParams(head["N"], head["lambda"], head["delta"])
        events = []
        for ln in lines[1:]:
            rec = json.loads(ln)
            events.append(Event(rec["t"], rec["x"]))
        return cls(params, head["horizon"], head["seed"], tuple(events))


def _g17(x: float) -> str:
    return format(x, ".17g")


def sample_events(params: CylinderParams, horizon_t: float, seed: int) -> EventLog:
    """Sample one Poisson event log on ``[-pi*N, pi*N) x (0, horizon_t]``.

    The count is Poisson(2*pi*N*t) by inversion, then that many uniform
    times and abscissae are drawn (times first, then abscissae) and sorted
    by time; coincident float times are ordered by abscissa, then draw index.
    Fully determined by ``seed``.
    """
    if not (math.isfinite(horizon_t) and horizon_t > 0.0):
        raise ValueError(f"horizon_t must be positive, got {horizon_t}")
    seed = int(seed) & (1 << 64) - 1
    rng = SplitMix64(seed)
    count = poisson(rng, params.period * horizon_t)
    times = [horizon_t * (1.0 - rng.next_float()) for _ in range(count)]  # (0, t]
    half = params.half_period
    xs = []
    for _ in range(count):
        x = -half + rng.next_float() * params.period
        # the product can round up to the full period, which would land on
        # the excluded right endpoint; wrap that measure-zero case
        xs.append(x if x < half else -half)
    order = sorted(range(count), key=lambda i: (times[i], xs[i], i))
    events = tuple(Event(times[i], xs[i]) for i in order)
    return EventLog(params, horizon_t, seed, events)


def restrict_log(log: EventLog, half_width: float) -> EventLog:
    """Coupling restriction: keep events with ``|x| <= half_width``.

    The surviving events, with their original times, are exactly a unit
    intensity Poisson process on the narrower strip, so the result is tagged
    with the smaller radius ``half_width / pi``.  Times and order are
    preserved; the seed is kept for provenance (a restricted log is a
    derived view, not resampleable from its own header).
    """
    if half_width <= 0.0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    if half_width > log.params.half_period * (1.0 + 1e-12):
        raise ValueError(
            f"half_width {half_width} exceeds source domain {log.params.half_period}"
        )
    if half_width == log.params.half_period:
        return log
    params = CylinderParams(half_width / math.pi, log.params.lam)
    events = tuple(e for e in log.events if abs(e.x) <= half_width)
    return EventLog(params, log.horizon_t, log.seed, events)


@dataclass(frozen=True)
class ProcessEvaluator:
    """A view of an event log that evaluates one process variant.

    ``window_w`` is required for the half-plane (SHL) variants and must be
    at least the slit length; it must be omitted for the cylinder variants.
    """

    log: EventLog
    kind: str
    window_w: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}")
        if self.kind in _SHL_KINDS:
            if self.window_w is None:
                raise ValueError(f"{self.kind} requires a truncation window")
            if self.window_w < self.log.params.lam:
                raise ValueError("truncation window must be >= slit length")
        elif self.window_w is not None:
            raise ValueError(f"{self.kind} does not take a truncation window")

    def at(self, z: complex, s: float) -> complex:
        return _EVALUATORS[self.kind](self, z, s)


def _events_up_to(log: EventLog, s: float) -> Sequence[Event]:
    """Events with time <= s (cadlag convention: time == s included)."""
    times = [e.time for e in log.events]
    return log.events[: bisect.bisect_right(times, s)]


def _require(ev: ProcessEvaluator, kind: str) -> None:
    if ev.kind != kind:
        raise ValueError(f"evaluator kind is {ev.kind!r}, expected {kind!r}")


def eval_forward_chl(ev: ProcessEvaluator, z: complex, s: float) -> complex:
    """Forward cylinder process: S_{x_1} o ... o S_{x_n}(z), earliest outermost."""
    _require(ev, "forward-chl")
    p = ev.log.params
    w = complex(z)
    for e in reversed(_events_up_to(ev.log, s)):
        w = cyl_slit(p, e.x, w)
    return w


def eval_backward_chl(ev: ProcessEvaluator, z: complex, s: float) -> complex:
    """Backward cylinder process: S_{x_n} o ... o S_{x_1}(z), newest outermost."""
    _require(ev, "backward-chl")
    p = ev.log.params
    w = complex(z)
    for e in _events_up_to(ev.log, s):
        w = cyl_slit(p, e.x, w)
    return w


def eval_backward_shl(ev: ProcessEvaluator, z: complex, s: float) -> complex:
    """Backward half-plane process over in-window events, newest outermost."""
    _require(ev, "backward-shl")
    lam = ev.log.params.lam
    w = complex(z)
    for e in _events_up_to(ev.log, s):
        if abs(e.x) <= ev.window_w:
            w = halfplane_slit(lam, e.x, w)
    return w


def eval_forward_shl(ev: ProcessEvaluator, z: complex, s: float) -> complex:
    """Forward half-plane process over in-window events, earliest outermost."""
    _require(ev, "forward-shl")
    lam = ev.log.params.lam
    w = complex(z)
    for e in reversed(_events_up_to(ev.log, s)):
        if abs(e.x) <= ev.window_w:
            w = halfplane_slit(lam, e.x, w)
    return w


def eval_disk_hl(ev: ProcessEvaluator, z: complex, s: float) -> complex:
    """Backward cluster map evaluated through disk coordinates.

    Each slit map is the conjugated disk slit ``r_x^-1 o D_0 o r_x``; the
    exponential charts between consecutive maps cancel exactly, so a single
    chart is applied before and after the disk composition.  As a cylinder
    point the result equals ``eval_backward_chl``; the representative may
    differ by a period when the orbit crosses the seam, since the final
    principal log cannot see the winding of the lifted composition.
    """
    _require(ev, "disk-hl")
    p = ev.log.params
    n = p.radius_n
    zeta = cmath.exp(-1j * complex(z) / n)
    for e in _events_up_to(ev.log, s):
        rot = cmath.exp(1j * e.x / n)
        zeta = _disk_slit_origin(p, rot * zeta) / rot
    return map_f_inv(n, zeta)


_EVALUATORS = {
    "forward-chl": eval_forward_chl,
    "backward-chl": eval_backward_chl,
    "forward-shl": eval_forward_shl,
    "backward-shl": eval_backward_shl,
    "disk-hl": eval_disk_hl,
}


def backward_chl_trajectory(log: EventLog, z: complex) -> list[tuple[float, complex]]:
    """Value of the backward cylinder process at 0 and at every event time.

    The backward process gains one outermost map per event, so the whole
    trajectory costs one map application per event.  Between events the
    process is constant, making this grid exact for running suprema.
    """
    w = complex(z)
    out = [(0.0, w)]
    for e in log.events:
        w = cyl_slit(log.params, e.x, w)
        out.append((e.time, w))
    return out


def drift(params: CylinderParams, t: float) -> complex:
    """Deterministic part of the backward process at a point.

    The compensator integrand is point-independent (the average shift of the
    slit map over one period is a constant), so the predictable part is the
    purely imaginary ``-2i pi N^2 t log(1 - delta^2)``, which tends to
    ``i pi lam^2 t / 2`` as N grows.
    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    n = params.radius_n
    return complex(0.0, -2.0 * math.pi * n * n * t * math.log1p(-params.delta**2))
