"""Deterministic random numbers for reproducible event sampling.

A self-contained SplitMix64 generator is used instead of a library RNG so
that event logs regenerate bit-identically from ``(params, horizon, seed)``
across platforms and library versions.  Replica streams are derived with the
same avalanche function, so Monte Carlo runs are order-independent and safe
to parallelize.
"""

from __future__ import annotations

import math

__all__ = ["SplitMix64", "mix_seed", "poisson"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Inversion accumulates Poisson probabilities from exp(-mu); keep mu small
# enough that the starting term stays comfortably above the underflow floor.
_POISSON_CHUNK = 500.0


def _avalanche(z: int) -> int:
    """SplitMix64 finalizer: bijective 64-bit mix with full avalanche."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(seed: int, replica: int) -> int:
    """64-bit seed for a numbered replica stream.

    Defined as ``avalanche(seed + (replica + 1) * golden)`` so that replica
    streams are decorrelated from each other and from the base stream.
    """
    return _avalanche((seed + (replica + 1) * _GOLDEN) & _MASK)


class SplitMix64:
    """Minimal SplitMix64 stream: 64-bit states, uniform doubles in [0, 1)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _avalanche(self._state)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53


def _poisson_inversion(rng: SplitMix64, mu: float) -> int:
    """Poisson sample by CDF inversion; requires mu small enough for exp(-mu)."""
    u = rng.next_float()
    p = math.exp(-mu)
    c = p
    k = 0
    while u > c:
        k += 1
        p *= mu / k
        c += p
        if p == 0.0:  # u beyond representable tail mass
            break
    return k


def poisson(rng: SplitMix64, mu: float) -> int:
    """Poisson(mu) by inversion, chunked so exp(-chunk) never underflows.

    Splitting mu into bounded chunks and summing independent Poisson draws
    leaves the law unchanged and keeps the draw sequence deterministic.
    """
    if mu < 0.0 or not math.isfinite(mu):
        raise ValueError(f"mu must be finite and nonnegative, got {mu}")
    total = 0
    while mu > _POISSON_CHUNK:
        total += _poisson_inversion(rng, _POISSON_CHUNK)
        mu -= _POISSON_CHUNK
    return total + _poisson_inversion(rng, mu)
