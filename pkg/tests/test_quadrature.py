"""Tests for the adaptive Gauss-Kronrod integrator.

The node/weight transcription is validated by exactness on monomials: the
embedded 7-point Gauss rule is exact through degree 13 and the 15-point
Kronrod rule through degree 22, so any typo in the constants shows up as a
gross error on low-degree polynomials.
"""

from __future__ import annotations

import cmath
import math

import pytest

from chl.quadrature import adaptive_quadrature


class TestRuleExactness:
    @pytest.mark.parametrize("degree", range(0, 14))
    def test_monomials_single_panel(self, degree):
        res = adaptive_quadrature(lambda x: complex(x**degree), 0.0, 1.0, tol=1e-13)
        assert res.value.real == pytest.approx(1.0 / (degree + 1), abs=5e-15)
        assert abs(res.value.imag) <= 1e-15

    def test_degree_12_needs_no_subdivision(self):
        # both embedded rules are exact, so the panel error estimate is ~eps
        res = adaptive_quadrature(lambda x: complex(x**12), -1.0, 1.0, tol=1e-12)
        assert res.subdivisions == 1
        assert res.value.real == pytest.approx(2.0 / 13.0, rel=1e-14)

    def test_degree_22_value(self):
        # Kronrod is exact through degree 22; the Gauss/Kronrod gap only
        # drives refinement, the converged value is the exact integral
        res = adaptive_quadrature(lambda x: complex(x**22), -1.0, 1.0, tol=1e-12)
        assert res.converged
        assert res.value.real == pytest.approx(2.0 / 23.0, rel=1e-13)


class TestAdaptivity:
    def test_integrable_sqrt_kink(self):
        res = adaptive_quadrature(lambda x: complex(math.sqrt(abs(x))), -1.0, 2.0, tol=1e-10)
        want = (2.0 / 3.0) * (1.0 + 2.0 * math.sqrt(2.0))
        assert res.converged
        assert res.value.real == pytest.approx(want, abs=1e-9)

    def test_presplit_near_sharp_feature(self):
        # Lorentzian spike of width 1e-3 at x = 0.3; analytic antiderivative
        a, c = 1e-3, 0.3
        f = lambda x: complex(1.0 / (a * a + (x - c) ** 2))
        want = (math.atan((1.0 - c) / a) - math.atan(-c / a)) / a
        plain = adaptive_quadrature(f, 0.0, 1.0, tol=1e-9)
        seeded = adaptive_quadrature(f, 0.0, 1.0, tol=1e-9, presplit=[c - a, c, c + a])
        assert seeded.converged and plain.converged
        assert seeded.value.real == pytest.approx(want, abs=1e-8)
        assert plain.value.real == pytest.approx(want, abs=1e-8)

    def test_complex_oscillatory(self):
        # int_0^pi e^{i k x} dx = (e^{i k pi} - 1) / (i k)
        k = 7.0
        res = adaptive_quadrature(lambda x: cmath.exp(1j * k * x), 0.0, math.pi, tol=1e-12)
        want = (cmath.exp(1j * k * math.pi) - 1.0) / (1j * k)
        assert res.converged
        assert abs(res.value - want) <= 1e-11

    def test_error_estimate_bounds_true_error(self):
        res = adaptive_quadrature(lambda x: complex(math.exp(-x * x)), 0.0, 5.0, tol=1e-12)
        want = 0.5 * math.sqrt(math.pi) * math.erf(5.0)
        assert abs(res.value.real - want) <= max(10 * res.abs_error_estimate, 1e-13)

    def test_kink_hiding_in_edge_gap(self):
        # sqrt kink at c, with a panel edge seeded just beside it: the kink
        # then sits in the node-free gap next to the edge, where |K15 - G7|
        # alone is blind; the two-level panel estimate must still catch it
        c = -0.7474
        f = lambda x: complex(math.sqrt(abs(x - c)))
        want = (2.0 / 3.0) * ((c + 12.0) ** 1.5 + (12.0 - c) ** 1.5)
        for seed_offset in (0.0026, -0.0026, 0.01):
            res = adaptive_quadrature(f, -12.0, 12.0, tol=1e-10,
                                      presplit=[c - seed_offset])
            assert res.converged
            assert abs(res.value.real - want) <= 1e-8, seed_offset


class TestNonConvergence:
    def test_unreachable_tolerance_is_reported(self):
        res = adaptive_quadrature(
            lambda x: complex(math.sqrt(abs(x - 0.5))), 0.0, 1.0, tol=1e-30, max_panels=64
        )
        assert not res.converged
        assert res.subdivisions == 64
        # the value is still usable
        want = (2.0 / 3.0) * 2.0 * 0.5**1.5
        assert res.value.real == pytest.approx(want, abs=1e-6)

    def test_invalid_interval_and_tol(self):
        with pytest.raises(ValueError):
            adaptive_quadrature(lambda x: 0j, 1.0, 0.0)
        with pytest.raises(ValueError):
            adaptive_quadrature(lambda x: 0j, 0.0, 1.0, tol=0.0)
