"""Adaptive Gauss-Kronrod quadrature for complex-valued integrands.

Each panel carries a two-level evaluation: the 7-point Gauss / 15-point
Kronrod pair on the whole panel and on its two halves.  The panel value is
the sum over the halves; its error estimate is the larger of the
parent/children discrepancy and the summed |K15 - G7| of the halves.  The
second level matters: |K15 - G7| alone is blind to a feature sitting in the
node-free gap next to a panel edge, and the parent/children comparison
probes that gap with a different node set.  The worst panel is bisected
until the summed estimate drops below the absolute tolerance or a panel cap
is reached; non-convergence is reported on the result, never silently.

The node and weight constants are the standard 15-point Kronrod values; the
test suite re-derives their correctness by integrating monomials (the pair
is exact up to degree 13 / 22).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable

__all__ = ["QuadratureResult", "adaptive_quadrature"]

# 15-point Kronrod abscissae on [-1, 1] (positive half; symmetric).
_XGK = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
)
# Kronrod weights matching _XGK.
_WGK = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
# 7-point Gauss weights for the embedded rule (nodes _XGK[1], _XGK[3], _XGK[5], 0).
_WG = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with its error estimate and the panel count used."""

    value: complex
    abs_error_estimate: float
    subdivisions: int
    converged: bool


def _panel(f: Callable[[float], complex], a: float, b: float) -> tuple[complex, float]:
    """Kronrod value and |K15 - G7| error estimate on [a, b]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(mid)
    kron = _WGK[7] * fc
    gauss = _WG[3] * fc
    for i in range(7):
        x = half * _XGK[i]
        fs = f(mid - x) + f(mid + x)
        kron += _WGK[i] * fs
        if i % 2 == 1:
            gauss += _WG[i // 2] * fs
    return half * kron, abs(half * (kron - gauss))


def _panel_verified(f: Callable[[float], complex], a: float, b: float) -> tuple[complex, float]:
    """Panel value confirmed at two refinement levels.

    |K15 - G7| alone can be fooled: a kink sitting between the outermost
    node and the panel edge is invisible to both embedded rules, and
    bisection anchored at a seeded edge can keep it invisible.  Comparing
    the whole-panel Kronrod value against the sum over the two halves probes
    a different node set, so a feature hiding in the node-free edge gap
    shows up as a parent/children discrepancy and keeps the panel alive.
    """
    whole, _ = _panel(f, a, b)
    mid = 0.5 * (a + b)
    if mid <= a or mid >= b:
        return whole, 0.0
    left, err_left = _panel(f, a, mid)
    right, err_right = _panel(f, mid, b)
    value = left + right
    return value, max(abs(whole - value), err_left + err_right)


def adaptive_quadrature(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_panels: int = 10_000,
    presplit: Iterable[float] = (),
) -> QuadratureResult:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    ``presplit`` points strictly inside (a, b) seed the initial panel edges,
    which saves refinement when the integrand has a known sharp feature.
    """
    if not b > a:
        raise ValueError(f"need b > a, got [{a}, {b}]")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    edges = [a, *sorted(p for p in set(presplit) if a < p < b), b]
    # heap of (-error, tie-break counter, a, b, value); total error kept incrementally
    heap = []
    count = 0
    total_err = 0.0
    for lo, hi in zip(edges, edges[1:]):
        val, err = _panel_verified(f, lo, hi)
        heap.append((-err, count, lo, hi, val))
        total_err += err
        count += 1
    heapq.heapify(heap)
    panels = len(heap)
    while total_err > tol and panels < max_panels:
        neg_err, _, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at float resolution; stop refining it
            heapq.heappush(heap, (0.0, count, lo, hi, val))
            total_err += neg_err  # drop its estimate from the budget
            count += 1
            continue
        total_err += neg_err
        for sub_lo, sub_hi in ((lo, mid), (mid, hi)):
            sub_val, sub_err = _panel_verified(f, sub_lo, sub_hi)
            heapq.heappush(heap, (-sub_err, count, sub_lo, sub_hi, sub_val))
            total_err += sub_err
            count += 1
        panels += 1
    value = 0j
    err_sum = 0.0
    for neg_err, _, _, _, val in heap:
        value += val
        err_sum += -neg_err
    return QuadratureResult(value, err_sum, panels, err_sum <= tol)
