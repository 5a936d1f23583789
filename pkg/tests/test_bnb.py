from __future__ import annotations

import io
import json

import numpy as np
import pytest

from wdn_lipschitz import (
    Box,
    bnb_max,
    build_network,
    jac_entry_bounds,
    jacobian_diag_batch,
    k_network,
    k_upper_max,
    k_upper_sqrt,
    make_max_objective,
    osl_upper,
)
from wdn_lipschitz.bounds import box_from_intervals
from wdn_lipschitz.intervals import Interval

from conftest import (
    FIXTURE_GAPS,
    FIXTURE_NAMES,
    make_random_network,
    make_single_pipe,
)

# frozen oracles for the pump entry bounds on [100, 922.5]
PUMP_JAC_LO_AT_100 = 0.014684783130902873   # 2.59 * 3.746e-6 * 100**1.59
PUMP_JAC_HI_AT_9225 = 0.50253240652737913   # 2.59 * 3.746e-6 * 922.5**1.59


def abs_objective(box: Box) -> Interval:
    """Interval extension of 2|q| on a 1-D box."""
    lo, hi = float(box.lo[0]), float(box.hi[0])
    m_hi = max(abs(lo), abs(hi))
    m_lo = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
    return Interval(2.0 * m_lo, 2.0 * m_hi)


class TestBnbMax:
    def test_one_dimensional_known_maximum(self):
        res = bnb_max(abs_objective, Box.from_pairs([(0.0, 1.0)]), gap_tol=1e-6)
        assert 2.0 <= res.upper <= 2.0 + 1e-6
        assert res.lower <= 2.0
        assert res.gap <= 1e-6
        assert res.terminated_by == "gap"

    def test_constant_objective_converges_immediately(self):
        res = bnb_max(lambda b: Interval(4.25, 4.25),
                      Box.from_pairs([(-1.0, 1.0), (0.0, 2.0)]), gap_tol=1e-9)
        assert res.upper == res.lower == 4.25
        assert res.gap == 0.0
        assert res.boxes_processed == 1
        assert res.terminated_by == "gap"

    def test_budget_exhaustion_still_brackets(self):
        res = bnb_max(abs_objective, Box.from_pairs([(-1.0, 1.0)]),
                      gap_tol=1e-12, max_boxes=5)
        assert res.terminated_by == "max_iterations"
        assert res.lower <= 2.0 <= res.upper
        assert res.boxes_processed >= 5

    def test_degenerate_box(self):
        res = bnb_max(abs_objective, Box.from_pairs([(0.5, 0.5)]), gap_tol=1e-9)
        assert res.lower == res.upper == 1.0

    def test_invalid_arguments(self):
        box = Box.from_pairs([(0.0, 1.0)])
        with pytest.raises(ValueError):
            bnb_max(abs_objective, box, gap_tol=0.0)
        with pytest.raises(ValueError):
            bnb_max(abs_objective, box, gap_tol=1e-3, max_boxes=0)

    def test_progress_log_is_json_lines(self, three_node):
        _, net, box = three_node
        buf = io.StringIO()
        res = bnb_max(make_max_objective(net), box, gap_tol=1e-6,
                      progress=buf, log_interval=2)
        lines = [json.loads(l) for l in buf.getvalue().splitlines()]
        assert len(lines) > 1, "expected interim records plus the final one"
        for rec in lines:
            assert set(rec) == {"boxes", "lower", "upper", "gap", "wall_time"}
            assert rec["gap"] >= 0 and rec["wall_time"] >= 0
        boxes = [rec["boxes"] for rec in lines]
        assert boxes == sorted(boxes)
        uppers = [rec["upper"] for rec in lines]
        assert all(a >= b for a, b in zip(uppers, uppers[1:]))
        assert lines[-1]["boxes"] == res.boxes_processed
        assert lines[-1]["upper"] == res.upper

    def test_signed_max_objective_diag_example(self):
        # log-norm style objective over constant diagonal entries (-5, 3):
        # the sharp one-sided bound is the largest signed entry, 3
        def signed_max(box: Box) -> Interval:
            entries = [Interval(-5.0, -5.0), Interval(3.0, 3.0)]
            return Interval(max(e.lo for e in entries), max(e.hi for e in entries))

        res = bnb_max(signed_max, Box.from_pairs([(0.0, 1.0), (0.0, 1.0)]),
                      gap_tol=1e-9)
        assert res.upper == 3.0


class TestJacEntryBounds:
    def test_monotone_pipe_entry(self):
        net = build_network(make_single_pipe(1.0, 2.0))
        [iv] = jac_entry_bounds(net, Box.from_pairs([(1.0, 2.0)]))
        assert iv.lo <= 2.0 and iv.hi >= 4.0
        assert iv.lo == pytest.approx(2.0, rel=1e-13)
        assert iv.hi == pytest.approx(4.0, rel=1e-13)

    def test_zero_crossing_pipe_entry(self):
        net = build_network(make_single_pipe(1.0, 2.0))
        [iv] = jac_entry_bounds(net, Box.from_pairs([(-1.0, 2.0)]))
        assert iv.lo == 0.0
        assert iv.hi == pytest.approx(4.0, rel=1e-13)

    def test_pump_entry_bounds_oracle(self, three_node):
        _, net, _ = three_node
        box = Box.from_pairs([(0.0, 0.0), (100.0, 922.5)])
        pump_iv = jac_entry_bounds(net, box)[1]
        assert pump_iv.lo == pytest.approx(PUMP_JAC_LO_AT_100, rel=1e-12)
        assert pump_iv.hi == pytest.approx(PUMP_JAC_HI_AT_9225, rel=1e-12)
        assert pump_iv.lo <= PUMP_JAC_LO_AT_100
        assert pump_iv.hi >= PUMP_JAC_HI_AT_9225

    def test_pointwise_values_inside_bounds(self, valve_net):
        # inclusion isotonicity over 1e4 random sub-boxes with random points
        _, net, box = valve_net
        rng = np.random.default_rng(67)
        count = 10_000
        t0 = rng.uniform(0, 1, (count, net.n_links))
        t1 = rng.uniform(0, 1, (count, net.n_links))
        los = box.lo + np.minimum(t0, t1) * (box.hi - box.lo)
        his = box.lo + np.maximum(t0, t1) * (box.hi - box.lo)
        ts = rng.uniform(0, 1, (count, net.n_links))
        qs = np.clip(los + ts * (his - los), los, his)
        gs = jacobian_diag_batch(net, qs)
        for row in range(count):
            ivs = jac_entry_bounds(net, Box(los[row], his[row]))
            for i, iv in enumerate(ivs):
                assert iv.lo <= gs[row, i] <= iv.hi


class TestUpperEstimates:
    def test_certification_on_all_fixtures(self, fixtures):
        for name in FIXTURE_NAMES:
            _, net, box = fixtures[name]
            k = k_network(net, box).value
            res = bnb_max(make_max_objective(net), box, FIXTURE_GAPS[name])
            assert res.lower <= k <= res.upper, name
            assert res.terminated_by == "gap", name

    def test_upper_within_gap_of_analytical(self, fixtures):
        for name in FIXTURE_NAMES:
            _, net, box = fixtures[name]
            k = k_network(net, box).value
            est = k_upper_max(net, box, FIXTURE_GAPS[name])
            assert k <= est.value <= k + FIXTURE_GAPS[name] + 1e-12, name
            assert est.method == "interval_upper"
            assert est.mode == "max"
            assert est.gap is not None

    def test_sqrt_dominates_max_everywhere(self, fixtures):
        for name in FIXTURE_NAMES:
            _, net, box = fixtures[name]
            um = k_upper_max(net, box, FIXTURE_GAPS[name])
            us = k_upper_sqrt(net, box, FIXTURE_GAPS[name])
            assert us.value >= um.value, name

    def test_single_link_modes_agree(self):
        net = build_network(make_single_pipe(2.0, 1.852))
        box = box_from_intervals(net, {"P1": (-10.0, 8.0)})
        k = k_network(net, box).value
        um = k_upper_max(net, box, 1e-9)
        us = k_upper_sqrt(net, box, 1e-9)
        assert um.value == pytest.approx(k, rel=1e-12)
        assert us.value == pytest.approx(k, rel=1e-12)
        assert us.value >= um.value

    def test_three_four_five_frobenius(self):
        from wdn_lipschitz.inp import JunctionDesc, NetworkDescription, PipeDesc
        desc = NetworkDescription(
            flow_units="GPM", headloss_exponent=2.0,
            junctions=[JunctionDesc("J1", 0.0), JunctionDesc("J2", 0.0)],
            reservoirs=[], tanks=[],
            pipes=[PipeDesc("A", "J1", "J2", 1.5, 2.0),
                   PipeDesc("B", "J2", "J1", 2.0, 2.0)],
            pumps=[], valves=[],
        )
        net = build_network(desc)
        box = box_from_intervals(net, {"A": (-1.0, 1.0), "B": (0.0, 1.0)})
        # derivative ranges peak at 2*1.5*1 = 3 and 2*2*1 = 4
        us = k_upper_sqrt(net, box, 1e-9)
        um = k_upper_max(net, box, 1e-9)
        assert um.value == pytest.approx(4.0, abs=1e-8)
        assert us.value == pytest.approx(5.0, abs=1e-8)

    def test_osl_equals_max_mode_bitwise(self, fixtures):
        for name in ("three_node", "eight_node", "net2"):
            _, net, box = fixtures[name]
            a = k_upper_max(net, box, 1e-3)
            b = osl_upper(net, box, 1e-3)
            assert a == b, name

    def test_three_node_tight_gap(self, three_node):
        _, net, box = three_node
        est = k_upper_max(net, box, 1e-6)
        k = k_network(net, box).value
        assert abs(est.value - k) <= 1e-6
        assert est.value == pytest.approx(0.5023, abs=5e-4)

    def test_three_node_sqrt_matches_reference_value(self, three_node):
        _, net, box = three_node
        est = k_upper_sqrt(net, box, 1e-6)
        assert est.value == pytest.approx(0.5023, abs=5e-4)

    def test_unit_pipe_toy(self):
        net = build_network(make_single_pipe(1.0, 2.0))
        box = box_from_intervals(net, {"P1": (-1.0, 1.0)})
        est = k_upper_max(net, box, 1e-6)
        assert est.value == pytest.approx(2.0, abs=1e-6)

    def test_gap_monotonicity(self, fixtures):
        for name in ("three_node", "eight_node"):
            _, net, box = fixtures[name]
            uppers = []
            for gap in (1e-1, 1e-2, 1e-3, 1e-4):
                est = k_upper_max(net, box, gap)
                uppers.append(est.value)
            assert all(a >= b for a, b in zip(uppers, uppers[1:])), name

    def test_budget_estimate_still_valid(self, fixtures):
        _, net, box = fixtures["anytown"]
        k = k_network(net, box).value
        res = bnb_max(make_max_objective(net), box, 1e-9, max_boxes=7)
        assert res.terminated_by == "max_iterations"
        assert res.lower <= k <= res.upper

    def test_certification_fuzz_random_networks(self):
        rng = np.random.default_rng(71)
        for _ in range(30):
            net, box = make_random_network(rng)
            k = k_network(net, box).value
            res = bnb_max(make_max_objective(net), box, 1e-3, max_boxes=20_000)
            assert res.lower <= k <= res.upper

    def test_runs_are_reproducible(self, fixtures):
        _, net, box = fixtures["net3"]
        first = bnb_max(make_max_objective(net), box, 1e-4)
        second = bnb_max(make_max_objective(net), box, 1e-4)
        assert first == second
