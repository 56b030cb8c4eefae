"""Conformal slit maps on the upper half-plane and on a finite cylinder.

The cylinder of radius ``N`` is the upper half-plane with ``Re z`` identified
modulo ``2*pi*N``; its fundamental domain here is ``[-pi*N, pi*N) x (0, inf)``.
The building blocks are

    f(z)     = exp(-i z / N)          cylinder -> exterior of unit disk
    f_inv(w) = i N Log(w)             principal log, Re in [-pi*N, pi*N)
    g(w)     = i (w - 1) / (w + 1)    disk exterior -> half-plane
    g_inv(z) = (i + z) / (i - z)
    phi^lam(z)   = sqrt(z^2 - lam^2)              half-plane slit of length lam
    phi^delta(z) = sqrt(z^2 (1-d^2) - d^2)        slit variant fixing i

and the cylinder slit map attaching a vertical slit of length ``lam`` over
the boundary point ``x`` is the conjugation

    S_x = f_inv o r_x^-1 o g_inv o phi^delta o g o r_x o f,   r_x(w) = exp(ix/N) w,

where ``delta = tanh(lam / 2N)`` is the unique slit parameter making the
attached slit have cylinder length exactly ``lam``.

Branch conventions
------------------
Square roots are evaluated in factored form ``z * sqrt(a - b/z**2)`` with the
principal square root.  For ``Im z > 0`` the radicand avoids the negative real
axis, so this is the analytic branch mapping the half-plane into itself; on
the real boundary the two regimes (outside / inside the slit base) are split
explicitly, which keeps boundary evaluation exact instead of relying on the
sign of a rounded-to-zero imaginary part.

The composed cylinder map is evaluated through the disk-coordinate closed form

    S_0(z) = i N Log( (zeta + 1 + s)^2 / (4 zeta (1 - delta^2)) ),
    zeta = exp(-i z / N),  s = sqrt((zeta - 1)^2 + 4 delta^2 zeta),

which is algebraically identical to the five-map chain but free of the
catastrophic cancellation of ``g_inv`` near its pole at i (the cylinder's
point at infinity).  Far above the boundary (``Im z >= 30 N``, where the
intermediate would sit within ~1e-12 of the pole) the evaluation switches to
the exact-to-double-precision tail expansion
``z - i N log(1-delta^2) + 2 i N delta^2 exp(i z / N)``.

All functions are pure; no shared mutable state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "CylinderParams",
    "delta_of",
    "map_f",
    "map_f_inv",
    "map_g",
    "map_g_inv",
    "halfplane_slit",
    "cyl_phi_delta",
    "cyl_slit",
    "cyl_slit_deriv",
    "reduce_to_fundamental",
    "cylinder_dist",
]

# Above this height (in units of N) the g_inv intermediate is within ~1e-12 of
# its pole; the tail expansion is then exact to double precision.
_FAR_FIELD_RATIO = 30.0

# Treat points this close (relative to N) to the boundary as boundary points:
# below it the sign of the rounded imaginary part no longer identifies the
# correct side of the branch cut.
_BOUNDARY_RATIO = 1e-15


def delta_of(radius_n: float, lam: float) -> float:
    """Slit parameter delta(N, lam) = 1 - 2/(1 + exp(lam/N)) = tanh(lam/2N).

    This is the half-plane slit size whose conjugated cylinder slit has
    length exactly ``lam`` (obtained by following the base point 0 through
    the map chain).

    Raises
    ------
    ValueError
        If either argument is not a positive finite real, or if lam/N is so
        large that tanh rounds to 1 and the slit would span the cylinder.
    """
    if not (math.isfinite(radius_n) and radius_n > 0.0):
        raise ValueError(f"radius_n must be positive and finite, got {radius_n}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise ValueError(f"lam must be positive and finite, got {lam}")
    d = math.tanh(0.5 * lam / radius_n)
    if d >= 1.0:
        raise ValueError(f"slit length {lam} too large for cylinder radius {radius_n}")
    return d


@dataclass(frozen=True)
class CylinderParams:
    """Cylinder radius N, target slit length lam and derived slit parameter.

    ``delta`` may be supplied (e.g. when read back from a file header) in
    which case it is validated against the closed form; omitted, it is
    computed as ``tanh(lam / 2N)``.
    """

    radius_n: float
    lam: float
    delta: float = float("nan")

    def __post_init__(self) -> None:
        d = delta_of(self.radius_n, self.lam)
        if math.isnan(self.delta):
            object.__setattr__(self, "delta", d)
        elif not math.isclose(self.delta, d, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(
                f"inconsistent delta {self.delta!r}; expected {d!r} "
                f"for N={self.radius_n}, lam={self.lam}"
            )

    @property
    def period(self) -> float:
        """Circumference 2*pi*N of the cylinder."""
        return 2.0 * math.pi * self.radius_n

    @property
    def half_period(self) -> float:
        """Half circumference pi*N; the fundamental domain is [-pi*N, pi*N)."""
        return math.pi * self.radius_n


def map_f(radius_n: float, z: complex) -> complex:
    """Exponential chart f(z) = exp(-iz/N); maps the cylinder onto |w| >= 1."""
    return cmath.exp(-1j * complex(z) / radius_n)


def map_f_inv(radius_n: float, w: complex) -> complex:
    """Inverse chart i N Log(w) with the principal log.

    Re of the result lies in [-pi*N, pi*N); the negative real axis maps to
    the left endpoint.  ``w = 0`` is a domain error.
    """
    w = complex(w)
    if w == 0:
        raise ValueError("map_f_inv: w = 0 is not in the domain")
    return 1j * radius_n * cmath.log(w)


def map_g(w: complex) -> complex:
    """Cayley-type map g(w) = i(w-1)/(w+1) from |w| >= 1 onto the half-plane."""
    w = complex(w)
    if w == -1:
        raise ValueError("map_g: pole at w = -1")
    return 1j * (w - 1.0) / (w + 1.0)


def map_g_inv(z: complex) -> complex:
    """Inverse Cayley map (i+z)/(i-z); z = i (the point at infinity) raises."""
    z = complex(z)
    if z == 1j:
        raise ValueError("map_g_inv: z = i maps to infinity")
    return (1j + z) / (1j - z)


def _slit_sqrt(a: float, b: float, z: complex) -> complex:
    """Branch-correct z * sqrt(a - b / z^2) on the closed upper half-plane.

    a, b > 0.  Continuous on Im z > 0, fixes the sign at the two real ends,
    and sends 0 to i*sqrt(b) (the slit tip).  Real z inside the slit base
    (a z^2 < b) lands on the slit i*(0, sqrt(b)].
    """
    if z == 0:
        return complex(0.0, math.sqrt(b))
    if z.imag == 0.0:
        x = z.real
        rad = a - b / (x * x)
        if rad >= 0.0:
            return complex(x * math.sqrt(rad), 0.0)
        return complex(0.0, math.sqrt(b - a * x * x))
    return z * cmath.sqrt(a - b / (z * z))


def halfplane_slit(lam: float, x: float, z: complex) -> complex:
    """Half-plane slit map x + sqrt((z-x)^2 - lam^2), branch-continuous on Im z >= 0.

    Attaches a vertical slit of length ``lam`` at the real point ``x``; the
    boundary point z = x maps to the tip x + i*lam, and the map tends to the
    identity at both real infinities.
    """
    if lam <= 0.0:
        raise ValueError(f"lam must be positive, got {lam}")
    return x + _slit_sqrt(1.0, lam * lam, complex(z) - x)


def cyl_phi_delta(delta: float, z: complex) -> complex:
    """Corrected half-plane slit map sqrt(z^2 (1-delta^2) - delta^2).

    This is the variant with fixed point i, so that conjugation by the
    cylinder charts preserves the cylinder's point at infinity.  Maps 0 to
    i*delta.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return _slit_sqrt(1.0 - delta * delta, delta * delta, complex(z))


def _reduce(x: float, period: float) -> float:
    """Reduce x modulo period into [-period/2, period/2)."""
    r = math.remainder(x, period)
    half = 0.5 * period
    if r >= half:  # remainder may return +period/2 exactly
        return -half
    return r


def reduce_to_fundamental(params: CylinderParams, x: float) -> float:
    """Representative of x modulo 2*pi*N in the fundamental domain [-pi*N, pi*N)."""
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return _reduce(x, params.period)


def cylinder_dist(params: CylinderParams, a: complex, b: complex) -> float:
    """Distance between a and b as points of the cylinder (Re taken mod 2*pi*N)."""
    a, b = complex(a), complex(b)
    return abs(complex(_reduce(a.real - b.real, params.period), a.imag - b.imag))


def _disk_slit_origin(params: CylinderParams, zeta: complex) -> complex:
    """Slit map at the origin written in disk coordinates, |zeta| >= 1.

    Equals g_inv(phi^delta(g(zeta))) in the closed form
    (zeta + 1 + s)^2 / (4 zeta (1 - delta^2)), s = sqrt((zeta-1)^2 + 4 delta^2 zeta),
    which stays accurate arbitrarily close to the pole of g_inv.
    """
    d = params.delta
    d2 = d * d
    if abs(zeta) >= 1e130:
        # Tail expansion (zeta + 2 d^2 + d^2 (2 - d^2)/zeta) / (1 - d^2); the
        # dropped term is O(1/zeta^2), far below double precision here, and
        # the quadratic numerator below would overflow.
        return (zeta + 2.0 * d2 + d2 * (2.0 - d2) / zeta) / (1.0 - d2)
    dz1 = zeta - 1.0
    if abs(dz1) >= 0.5 * d:
        # Factored root: the radicand 1 + 4 d^2 zeta/(zeta-1)^2 only meets the
        # negative real axis on |zeta| = 1, so the principal branch is the
        # analytic continuation of s ~ zeta at infinity.
        s = dz1 * cmath.sqrt(1.0 + 4.0 * d2 * zeta / (dz1 * dz1))
    else:
        # Near the tip preimage zeta = 1 the radicand clusters around 4 d^2,
        # where the principal root is already the correct branch (s(1) = 2d).
        s = cmath.sqrt(dz1 * dz1 + 4.0 * d2 * zeta)
    top = zeta + 1.0 + s
    return top * top / (4.0 * zeta * (1.0 - d2))


def _cyl_slit_origin(params: CylinderParams, u: float, y: float) -> complex:
    """S_0 evaluated at u + iy with u in the fundamental domain, y >= 0.

    Output Re lies in [-pi*N, pi*N) (principal-log convention).
    """
    n = params.radius_n
    d = params.delta
    d2 = d * d
    if y <= _BOUNDARY_RATIO * n:
        # Boundary path in real arithmetic: the map restricted to the
        # boundary is 2N arctan(phi^delta(tan(u/2N))), real outside the slit
        # base and pure imaginary (on the slit) inside it.
        if u == 0.0:
            return complex(0.0, params.lam)
        v = math.tan(0.5 * u / n)
        rad = (1.0 - d2) - d2 / (v * v)
        if rad >= 0.0:
            return complex(2.0 * n * math.atan(v * math.sqrt(rad)), 0.0)
        return complex(0.0, 2.0 * n * math.atanh(math.sqrt(d2 - (1.0 - d2) * v * v)))
    w = complex(u, y)
    if y >= _FAR_FIELD_RATIO * n:
        return w - 1j * n * math.log1p(-d2) + 2j * n * d2 * cmath.exp(1j * w / n)
    zeta = cmath.exp(-1j * w / n)
    return 1j * n * cmath.log(_disk_slit_origin(params, zeta))


def cyl_slit(params: CylinderParams, x: float, z: complex) -> complex:
    """Cylinder slit map S_x(z): attach a slit of length lam over x.

    Evaluated as the continuous lift: ``Re(z - x)`` is reduced to the
    fundamental domain, the origin map is applied there, and the removed
    multiple of 2*pi*N is restored, so that

        S_x(z + 2*pi*N) = S_x(z) + 2*pi*N,   S_x(x) = x + i*lam,

    and S_x is near the identity far from the slit.
    """
    z = complex(z)
    u = z.real - x
    u_red = _reduce(u, params.period)
    return (x + (u - u_red)) + _cyl_slit_origin(params, u_red, z.imag)


def cyl_slit_deriv(params: CylinderParams, x: float, z: complex) -> complex:
    """Derivative dS_x/dz, interior points only (Im z > 0).

    Chain rule through S_0 = 2N arctan(phi^delta(tan(./2N))) collapses to

        S_0'(z) = tan(z/2N) / phi^delta(tan(z/2N)),

    which tends to 1 at the cylinder's far field and is 2*pi*N periodic.
    The slit tip preimage and the boundary are excluded: the tip is a
    critical point and the base corners are square-root singular.
    """
    z = complex(z)
    if not z.imag > 0.0:
        raise ValueError("cyl_slit_deriv requires Im z > 0")
    n = params.radius_n
    d = params.delta
    w = complex(_reduce(z.real - x, params.period), z.imag)
    v = cmath.tan(0.5 * w / n)
    u = _slit_sqrt(1.0 - d * d, d * d, v)
    if u == 0:
        raise ValueError("cyl_slit_deriv: singular at the slit base")
    return v / u
