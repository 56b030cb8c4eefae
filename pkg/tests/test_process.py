"""Tests for event sampling and the growth-process evaluators.

Composition oracles are written out as explicit loops in the tests, so the
evaluators are checked against hand-built compositions rather than against
themselves.
"""

from __future__ import annotations

import math
import statistics

import pytest

from chl.conformal import CylinderParams, cyl_slit, cylinder_dist, halfplane_slit
from chl.process import (
    Event,
    EventLog,
    ProcessEvaluator,
    backward_chl_trajectory,
    drift,
    eval_backward_chl,
    eval_backward_shl,
    eval_disk_hl,
    eval_forward_chl,
    eval_forward_shl,
    restrict_log,
    sample_events,
)
from chl.rng import SplitMix64, mix_seed


def make_log(params: CylinderParams, pairs, horizon=10.0, seed=0) -> EventLog:
    """Event log with prescribed (time, x) pairs, for composition oracles."""
    return EventLog(params, horizon, seed, tuple(Event(t, x) for t, x in pairs))


class TestSampling:
    def test_mean_count_matches_intensity(self):
        # E[count] = 2 pi N t; check the empirical mean over 10^4 seeded logs
        params = CylinderParams(1.0, 1.0)
        counts = [len(sample_events(params, 1.0, mix_seed(777, r))) for r in range(10_000)]
        mean = statistics.fmean(counts)
        sigma = statistics.stdev(counts) / math.sqrt(len(counts))
        assert abs(mean - 2 * math.pi) <= 3 * sigma

    def test_vanishing_window_is_empty(self):
        params = CylinderParams(2.0, 1.0)
        total = sum(len(sample_events(params, 1e-9, mix_seed(5, r))) for r in range(1000))
        assert total == 0

    def test_determinism_bit_exact(self):
        params = CylinderParams(3.0, 0.7)
        a = sample_events(params, 2.0, 123456789)
        b = sample_events(params, 2.0, 123456789)
        assert a == b
        assert a.to_jsonl() == b.to_jsonl()

    def test_times_sorted_and_in_range(self):
        params = CylinderParams(4.0, 1.0)
        log = sample_events(params, 3.0, 42)
        times = log.times
        assert all(t1 < t2 or (t1 == t2) for t1, t2 in zip(times, times[1:]))
        assert all(0.0 < t <= 3.0 for t in times)
        assert all(-params.half_period <= x < params.half_period for x in log.xs)

    def test_large_rate_uses_chunked_inversion(self):
        # mean 2*pi*100 ~ 628 exceeds the single-chunk inversion limit
        params = CylinderParams(100.0, 1.0)
        logs = [sample_events(params, 1.0, mix_seed(31, r)) for r in range(50)]
        mean = statistics.fmean(len(log) for log in logs)
        sigma = statistics.stdev([len(log) for log in logs]) / math.sqrt(50)
        assert abs(mean - 200 * math.pi) <= 4 * sigma
        assert sample_events(params, 1.0, 7) == sample_events(params, 1.0, 7)

    def test_invalid_horizon(self):
        with pytest.raises(ValueError):
            sample_events(CylinderParams(1.0, 1.0), 0.0, 1)


class TestSerialization:
    def test_jsonl_round_trip_bit_exact(self):
        log = sample_events(CylinderParams(2.5, 0.9), 1.5, 987)
        text = log.to_jsonl()
        back = EventLog.from_jsonl(text)
        assert back == log
        assert back.to_jsonl() == text

    def test_header_validation(self):
        bad = '{"N": 2.0, "lambda": 1.0, "delta": 0.5, "horizon": 1.0, "seed": 3}\n'
        with pytest.raises(ValueError):
            EventLog.from_jsonl(bad)
        with pytest.raises(ValueError):
            EventLog.from_jsonl("")


class TestRestrict:
    def test_own_width_is_identity(self):
        log = sample_events(CylinderParams(4.0, 1.0), 1.0, 10)
        assert restrict_log(log, log.params.half_period) == log

    def test_filter_oracle(self):
        log = sample_events(CylinderParams(4.0, 1.0), 2.0, 11)
        sub = restrict_log(log, 2 * math.pi)
        want = tuple(e for e in log.events if abs(e.x) <= 2 * math.pi)
        assert sub.events == want
        assert sub.params.radius_n == pytest.approx(2.0)
        assert sub.horizon_t == log.horizon_t and sub.seed == log.seed

    def test_narrow_width_keeps_only_central_events(self):
        # narrowest still-valid width: the retagged cylinder must support the
        # slit length, so "restrict to 0+" is realized as the filter limit
        log = sample_events(CylinderParams(4.0, 1.0), 1.0, 12)
        width = 0.3
        sub = restrict_log(log, width)
        assert sub.events == tuple(e for e in log.events if abs(e.x) <= width)
        assert len(sub) <= 1  # almost-empty window for this seed

    def test_too_wide_rejected(self):
        log = sample_events(CylinderParams(4.0, 1.0), 1.0, 13)
        with pytest.raises(ValueError):
            restrict_log(log, 5 * math.pi)


class TestEvaluatorValidation:
    def test_window_rules(self):
        log = sample_events(CylinderParams(2.0, 1.0), 0.5, 3)
        with pytest.raises(ValueError):
            ProcessEvaluator(log, "backward-shl")  # window required
        with pytest.raises(ValueError):
            ProcessEvaluator(log, "backward-shl", 0.5)  # below slit length
        with pytest.raises(ValueError):
            ProcessEvaluator(log, "backward-chl", 3.0)  # window not allowed
        with pytest.raises(ValueError):
            ProcessEvaluator(log, "sideways")
        ProcessEvaluator(log, "forward-shl", log.params.half_period)

    def test_kind_mismatch(self):
        log = sample_events(CylinderParams(2.0, 1.0), 0.5, 3)
        ev = ProcessEvaluator(log, "forward-chl")
        with pytest.raises(ValueError):
            eval_backward_chl(ev, 1j, 0.5)

    def test_at_dispatches_by_kind(self):
        log = sample_events(CylinderParams(2.0, 1.0), 0.5, 3)
        z, s = 0.4 + 0.9j, 0.5
        assert ProcessEvaluator(log, "forward-chl").at(z, s) == eval_forward_chl(
            ProcessEvaluator(log, "forward-chl"), z, s
        )
        w = log.params.half_period
        assert ProcessEvaluator(log, "backward-shl", w).at(z, s) == eval_backward_shl(
            ProcessEvaluator(log, "backward-shl", w), z, s
        )
        assert ProcessEvaluator(log, "disk-hl").at(z, s) == eval_disk_hl(
            ProcessEvaluator(log, "disk-hl"), z, s
        )


class TestForwardChl:
    def test_empty_log_identity(self):
        log = make_log(CylinderParams(2.0, 1.0), [])
        ev = ProcessEvaluator(log, "forward-chl")
        assert eval_forward_chl(ev, 2 + 3j, 5.0) == 2 + 3j

    def test_single_event_tip(self):
        p = CylinderParams(2.0, 1.0)
        log = make_log(p, [(1.0, 2.0)])
        ev = ProcessEvaluator(log, "forward-chl")
        assert eval_forward_chl(ev, 2.0 + 0j, 1.0) == pytest.approx(2.0 + 1j)

    def test_two_event_composition_oracle(self):
        p = CylinderParams(2.0, 1.0)
        x1, x2 = -1.2, 2.8
        log = make_log(p, [(0.3, x1), (0.7, x2)])
        ev = ProcessEvaluator(log, "forward-chl")
        z = 0.5 + 1.5j
        want = cyl_slit(p, x1, cyl_slit(p, x2, z))  # earliest outermost
        assert eval_forward_chl(ev, z, 1.0) == pytest.approx(want)

    def test_cadlag_at_event_times(self):
        p = CylinderParams(2.0, 1.0)
        log = make_log(p, [(0.5, 0.0)])
        ev = ProcessEvaluator(log, "forward-chl")
        z = 0.01 + 0.01j  # near the new slit, so the jump is visible
        at = eval_forward_chl(ev, z, 0.5)
        just_after = eval_forward_chl(ev, z, 0.5 + 1e-12)
        just_before = eval_forward_chl(ev, z, 0.5 - 1e-12)
        assert at == just_after
        assert abs(at - just_before) > 0.1


class TestBackwardChl:
    def test_empty_log_identity(self):
        ev = ProcessEvaluator(make_log(CylinderParams(2.0, 1.0), []), "backward-chl")
        assert eval_backward_chl(ev, 0.3 + 2j, 4.0) == 0.3 + 2j

    def test_single_event_matches_forward(self):
        p = CylinderParams(2.0, 1.0)
        log = make_log(p, [(0.4, 1.0)])
        f = ProcessEvaluator(log, "forward-chl")
        b = ProcessEvaluator(log, "backward-chl")
        z = 1 + 1j
        assert eval_forward_chl(f, z, 1.0) == eval_backward_chl(b, z, 1.0)

    def test_reverse_composition_oracle(self):
        p = CylinderParams(3.0, 0.8)
        rng = SplitMix64(21)
        pairs = sorted((rng.next_float(), p.half_period * (2 * rng.next_float() - 1)) for _ in range(7))
        log = make_log(p, pairs)
        ev = ProcessEvaluator(log, "backward-chl")
        z = -2 + 0.7j
        w = z
        for _, x in pairs:  # oldest first, newest ends up outermost
            w = cyl_slit(p, x, w)
        assert eval_backward_chl(ev, z, 1.0) == pytest.approx(w)

    def test_trajectory_matches_pointwise_eval(self):
        p = CylinderParams(2.0, 1.0)
        log = sample_events(p, 1.0, 31337)
        ev = ProcessEvaluator(log, "backward-chl")
        traj = backward_chl_trajectory(log, 1j)
        assert len(traj) == len(log) + 1
        assert traj[0] == (0.0, 1j)
        for (t_k, w_k) in traj[1:]:
            assert eval_backward_chl(ev, 1j, t_k) == pytest.approx(w_k)


class TestShl:
    def test_window_excludes_everything(self):
        p = CylinderParams(2.0, 1.0)
        log = make_log(p, [(0.2, 3.0), (0.5, -4.0)])
        ev = ProcessEvaluator(log, "backward-shl", 1.0)
        assert eval_backward_shl(ev, 1j, 1.0) == 1j  # both events outside |x| <= 1

    def test_single_in_window_event(self):
        p = CylinderParams(2.0, 1.0)
        log = make_log(p, [(0.2, 1.5)])
        ev = ProcessEvaluator(log, "backward-shl", 2.0)
        z = 0.3 + 0.4j
        assert eval_backward_shl(ev, z, 1.0) == halfplane_slit(1.0, 1.5, z)

    def test_window_beyond_domain_changes_nothing(self):
        p = CylinderParams(2.0, 1.0)
        log = sample_events(p, 0.7, 555)
        narrow = ProcessEvaluator(log, "backward-shl", p.half_period)
        wide = ProcessEvaluator(log, "backward-shl", p.period)
        z = 1 + 1j
        assert eval_backward_shl(narrow, z, 0.7) == eval_backward_shl(wide, z, 0.7)

    def test_forward_empty_identity(self):
        p = CylinderParams(2.0, 1.0)
        ev = ProcessEvaluator(make_log(p, []), "forward-shl", p.half_period)
        assert eval_forward_shl(ev, 2 - 0.5j + 1j, 1.0) == 2 + 0.5j

    def test_forward_two_event_oracle(self):
        p = CylinderParams(2.0, 1.0)
        x1, x2 = 0.5, -1.0
        log = make_log(p, [(0.1, x1), (0.9, x2)])
        ev = ProcessEvaluator(log, "forward-shl", p.half_period)
        z = 1j
        want = halfplane_slit(1.0, x1, halfplane_slit(1.0, x2, z))
        assert eval_forward_shl(ev, z, 1.0) == pytest.approx(want)


class TestDiskConjugation:
    def test_empty_and_single(self):
        p = CylinderParams(2.0, 1.0)
        empty = make_log(p, [])
        ev = ProcessEvaluator(empty, "disk-hl")
        z = 0.4 + 1.1j
        assert cylinder_dist(p, eval_disk_hl(ev, z, 1.0), z) <= 1e-12
        one = make_log(p, [(0.3, 1.7)])
        ev1 = ProcessEvaluator(one, "disk-hl")
        assert cylinder_dist(p, eval_disk_hl(ev1, z, 1.0), cyl_slit(p, 1.7, z)) <= 1e-11

    def test_far_field_agreement(self):
        # exercises the tail expansions of both coordinate systems at heights
        # where neither the quadratic disk form nor the Cayley chain is usable
        p = CylinderParams(2.0, 1.0)
        log = make_log(p, [(0.2, 1.0), (0.5, -2.0), (0.8, 0.3)])
        b = ProcessEvaluator(log, "backward-chl")
        d = ProcessEvaluator(log, "disk-hl")
        for y in (70.0, 650.0):  # y/N = 35 and 325, beyond both switch points
            z = complex(0.5, y)
            assert cylinder_dist(p, eval_backward_chl(b, z, 1.0), eval_disk_hl(d, z, 1.0)) <= 1e-9

    def test_equals_backward_chl_on_random_logs(self):
        # the module's strongest oracle: same composition, different coordinates
        rng = SplitMix64(22)
        for k in range(10):
            n = 2.0 + 6.0 * rng.next_float()
            p = CylinderParams(n, 0.4 + 1.2 * rng.next_float())
            log = sample_events(p, 50.0 / p.period, 9000 + k)
            b = ProcessEvaluator(log, "backward-chl")
            d = ProcessEvaluator(log, "disk-hl")
            for _ in range(20):
                z = complex(
                    0.6 * p.half_period * (2 * rng.next_float() - 1),
                    0.05 + 3.0 * rng.next_float(),
                )
                a = eval_backward_chl(b, z, log.horizon_t)
                c = eval_disk_hl(d, z, log.horizon_t)
                assert cylinder_dist(p, a, c) <= 1e-9


class TestDrift:
    def test_closed_form_n2(self):
        p = CylinderParams(2.0, 1.0)
        want = -8.0 * math.pi * math.log1p(-math.tanh(0.25) ** 2)
        got = drift(p, 1.0)
        assert got.real == 0.0
        assert got.imag == pytest.approx(want, rel=1e-14)

    def test_zero_time(self):
        assert drift(CylinderParams(2.0, 1.0), 0.0) == 0.0

    def test_large_n_limit(self):
        # -> i pi lam^2 t / 2
        got = drift(CylinderParams(1000.0, 1.0), 1.0)
        assert abs(got - 1j * math.pi / 2) <= 1e-5

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            drift(CylinderParams(2.0, 1.0), -1.0)


class TestMartingaleInvariant:
    def test_zero_mean_within_four_sigma(self):
        # backward process at z minus z minus drift has zero mean exactly;
        # sample mean over 2000 seeded replicas must sit within 4 sigma / sqrt(R)
        p = CylinderParams(4.0, 1.0)
        z, t = 1j, 0.5
        values = []
        for r in range(2000):
            log = sample_events(p, t, mix_seed(2024, r))
            w = z
            for e in log.events:
                w = cyl_slit(p, e.x, w)
            values.append(w - z - drift(p, t))
        mean_re = statistics.fmean(v.real for v in values)
        mean_im = statistics.fmean(v.imag for v in values)
        lim_re = 4 * statistics.stdev([v.real for v in values]) / math.sqrt(len(values))
        lim_im = 4 * statistics.stdev([v.imag for v in values]) / math.sqrt(len(values))
        assert abs(mean_re) <= lim_re
        assert abs(mean_im) <= lim_im


class TestClusterMapGeometry:
    def test_images_stay_in_upper_half_plane_and_injective(self):
        p = CylinderParams(3.0, 1.0)
        log = sample_events(p, 1.0, 777)
        ev = ProcessEvaluator(log, "backward-chl")
        grid = [
            complex(-8 + 16 * i / 19, 0.05 + 3 * j / 9)
            for i in range(20)
            for j in range(10)
        ]
        images = [eval_backward_chl(ev, z, 1.0) for z in grid]
        assert all(w.imag >= 0.0 for w in images)
        for i in range(len(grid)):
            for j in range(i + 1, len(grid)):
                if abs(grid[i] - grid[j]) > 1e-6:
                    assert abs(images[i] - images[j]) > 1e-8
