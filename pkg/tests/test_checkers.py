"""Verdict behavior of the finite-horizon checkers."""

import math

import pytest

from nonautodyn.checkers import (
    CheckConfig,
    Mode,
    PairPredicate,
    SystemView,
    cell_density,
    check_cofinite_sensitivity,
    check_dense_periodicity,
    check_equicontinuity,
    check_minimality,
    check_periodic,
    check_sensitivity,
    check_topological_mixing,
    check_transitivity,
    check_weak_mixing,
    grid_points,
    li_yorke_check,
    proximal_check,
)
from nonautodyn.family import TENT, autonomous_family, make_builtin_family
from nonautodyn.space import (
    BinaryWord,
    CircleAngle,
    IntervalPoint,
    PhaseSpace,
    SpaceError,
    sample_grid,
)

GOLDEN_ALPHA = 2 * math.pi * (math.sqrt(5) - 1) / 2

ALT = make_builtin_family("alternating-rotation", alpha=GOLDEN_ALPHA)
INV = make_builtin_family("inverse-square-rotation")
PD = make_builtin_family("perturbed-doubling")
PLAT = make_builtin_family("plateau-tent")

SMALL = CheckConfig(
    horizon=500, grid_resolution=12, ball_count=7, eps=0.1, delta=0.25,
    tol=1e-9, tail_window=200, max_period=8, repetitions=3,
)
CIRCLE_SMALL = CheckConfig(
    horizon=500, grid_resolution=12, ball_count=7, eps=0.2, delta=0.25,
    tol=1e-9, tail_window=200, max_period=8, repetitions=3,
)


def F(fam):
    return SystemView(fam, Mode.NON_AUTONOMOUS)


def limit(fam):
    return SystemView(fam, Mode.AUTONOMOUS_LIMIT)


class TestConfigValidation:
    def test_eps_below_delta_required(self):
        cfg = CheckConfig(eps=0.5, delta=0.25)
        with pytest.raises(SpaceError):
            cfg.validate(PhaseSpace.circle())

    def test_tail_window_within_horizon(self):
        cfg = CheckConfig(horizon=10, tail_window=20)
        with pytest.raises(SpaceError):
            cfg.validate(PhaseSpace.circle())

    def test_binary_needs_resolving_words(self):
        cfg = CheckConfig(horizon=10, tail_window=5, eps=0.05, delta=0.5)
        with pytest.raises(SpaceError):
            cfg.validate(PhaseSpace.binary_seq(8))


class TestEquicontinuity:
    def test_alternating_rotations_hold(self):
        v = check_equicontinuity(F(ALT), SMALL)
        assert v.holds
        assert v.witness["max_separation"] <= SMALL.eps

    def test_doubling_limit_refuted(self):
        v = check_equicontinuity(limit(PD), CIRCLE_SMALL)
        assert v.refuted
        assert v.witness["separation"] > CIRCLE_SMALL.eps

    def test_identity_limit_holds(self):
        assert check_equicontinuity(limit(INV), SMALL).holds


class TestSensitivity:
    def test_plateau_family_refuted_by_collapse(self):
        v = check_sensitivity(F(PLAT), SMALL)
        assert v.refuted
        assert v.witness.get("collapse_step") == 1

    def test_tent_limit_holds(self):
        v = check_sensitivity(limit(PLAT), SMALL)
        assert v.holds
        assert v.witness["max_separation_time"] <= SMALL.horizon

    def test_rotation_family_refuted_by_isometry(self):
        v = check_sensitivity(F(INV), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "isometric-steps"


class TestCofiniteSensitivity:
    def test_doubling_family_holds(self):
        v = check_cofinite_sensitivity(F(PD), CIRCLE_SMALL)
        assert v.holds
        assert v.witness["max_K"] <= CIRCLE_SMALL.horizon // 2

    def test_plateau_family_refuted(self):
        assert check_cofinite_sensitivity(F(PLAT), SMALL).refuted

    def test_rotation_family_refuted(self):
        assert check_cofinite_sensitivity(F(ALT), SMALL).refuted


class TestTransitivity:
    def test_tent_limit_holds_at_spec_scale(self):
        cfg = CheckConfig(
            horizon=200, grid_resolution=20, ball_count=7, eps=0.2, delta=0.25,
            tail_window=100, max_period=8, repetitions=3,
        )
        v = check_transitivity(limit(PLAT), cfg)
        assert v.holds
        assert v.witness["max_hit_time"] <= 200

    def test_plateau_family_refuted_by_collapse(self):
        v = check_transitivity(F(PLAT), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "collapse"

    def test_alternating_family_holds(self):
        cfg = CheckConfig(
            horizon=2000, grid_resolution=12, ball_count=7, eps=0.2, delta=0.25,
            tail_window=500, max_period=8, repetitions=3,
        )
        assert check_transitivity(F(ALT), cfg).holds

    def test_inverse_square_family_refuted_by_confinement(self):
        v = check_transitivity(F(INV), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "displacement-confinement"


class TestWeakMixing:
    def test_doubling_holds_both_modes(self):
        for sys in (F(PD), limit(PD)):
            assert check_weak_mixing(sys, CIRCLE_SMALL).holds

    def test_rotation_family_refuted_by_spacing(self):
        v = check_weak_mixing(F(ALT), CIRCLE_SMALL)
        assert v.refuted
        assert v.witness["rule"] == "isometric-spacing"

    def test_plateau_family_refuted(self):
        assert check_weak_mixing(F(PLAT), SMALL).refuted


class TestTopologicalMixing:
    def test_doubling_family_holds(self):
        v = check_topological_mixing(F(PD), CIRCLE_SMALL)
        assert v.holds
        assert v.witness["hit_persistence"]["passed"]
        assert v.witness["cloud_convergence"]["passed"]

    def test_alternating_family_refuted(self):
        v = check_topological_mixing(F(ALT), CIRCLE_SMALL)
        assert v.refuted

    def test_tent_limit_holds(self):
        assert check_topological_mixing(limit(PLAT), SMALL).holds


class TestMinimality:
    def test_alternating_holds_both_modes(self):
        cfg = CheckConfig(
            horizon=3000, grid_resolution=12, ball_count=7, eps=0.1, delta=0.25,
            tail_window=1000, max_period=8, repetitions=3,
        )
        assert check_minimality(F(ALT), cfg).holds
        assert check_minimality(limit(ALT), cfg).holds

    def test_inverse_square_family_confined(self):
        v = check_minimality(F(INV), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "displacement-confinement"

    def test_tent_limit_refuted_by_fixed_point(self):
        v = check_minimality(limit(PLAT), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "eventually-fixed-orbit"
        assert v.witness["stuck_at"] == {"space": "unit_interval", "x": 0.0}


class TestPeriodic:
    def test_inverse_square_family_never_returns(self):
        v = check_periodic(F(INV), CircleAngle(0.9), SMALL, max_period=20, repetitions=3)
        assert v.refuted
        # displacement first reaches 1 and never returns near the start
        assert v.witness["min_recurrence_gap"] > 0.3

    def test_identity_limit_period_one(self):
        v = check_periodic(limit(INV), CircleAngle(0.9), SMALL)
        assert v.holds and v.witness["period"] == 1

    def test_alternating_zero_alpha_period_two(self):
        fam = make_builtin_family("alternating-rotation", alpha=0.0)
        vF = check_periodic(F(fam), CircleAngle(0.9), SMALL)
        assert vF.holds and vF.witness["period"] == 2
        vf = check_periodic(limit(fam), CircleAngle(0.9), SMALL)
        assert vf.holds and vf.witness["period"] == 1


class TestDensePeriodicity:
    def test_identity_limit_holds(self):
        v = check_dense_periodicity(limit(INV), SMALL)
        assert v.holds

    def test_inverse_square_family_refuted(self):
        v = check_dense_periodicity(F(INV), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "nonzero-displacement"

    def test_doubling_limit_holds(self):
        cfg = CheckConfig(
            horizon=100, grid_resolution=12, ball_count=7, eps=0.1, delta=0.25,
            tail_window=50, max_period=10, repetitions=3,
        )
        v = check_dense_periodicity(limit(PD), cfg)
        assert v.holds

    def test_plateau_family_refuted_off_the_fixed_points(self):
        v = check_dense_periodicity(F(PLAT), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "no-candidate-solutions"
        # witness ball sits inside the collapsing half
        assert 0.0 < v.witness["ball_center"]["x"] <= 0.5


class TestProximality:
    def test_identical_points_proximal(self):
        x = CircleAngle(0.4)
        assert proximal_check(F(ALT), x, x, SMALL).holds

    def test_rotation_pair_refuted(self):
        v = proximal_check(F(ALT), CircleAngle(0.0), CircleAngle(1.0), SMALL)
        assert v.refuted
        assert v.witness["rule"] == "isometric-steps"

    def test_plateau_collapse_pair(self):
        v = proximal_check(F(PLAT), IntervalPoint(0.1), IntervalPoint(0.3), SMALL)
        assert v.holds
        assert v.witness["tail_min"] == 0.0

    def test_li_yorke_identical_refuted(self):
        x = IntervalPoint(0.2)
        assert li_yorke_check(limit(PLAT), x, x, SMALL).refuted

    def test_li_yorke_rotation_refuted(self):
        assert li_yorke_check(F(ALT), CircleAngle(0.0), CircleAngle(1.0), SMALL).refuted

    def test_li_yorke_doubling_witness(self):
        cfg = CheckConfig(
            horizon=5000, grid_resolution=12, ball_count=7, eps=0.01, delta=0.5,
            tail_window=2000, max_period=8, repetitions=3,
        )
        v = li_yorke_check(limit(PD), CircleAngle(0.0), CircleAngle(0.001), cfg)
        assert v.holds
        assert v.witness["tail_min"] < 0.01 and v.witness["tail_max"] > 0.5


class TestCellDensity:
    def test_plateau_proximal_cell_matches_brute_force(self):
        from nonautodyn.orbit import trajectory
        from nonautodyn.space import ball_sample

        cfg = CheckConfig(
            horizon=500, grid_resolution=10, ball_count=7, eps=0.1, delta=0.25,
            tail_window=200, max_period=8, repetitions=3,
        )
        sys = F(PLAT)
        x = IntervalPoint(0.2)
        v = cell_density(sys, x, cfg, PairPredicate.PROXIMAL)
        # independent sweep: orbit tails of all ball samples against x
        x_states = [p.x for p in trajectory(PLAT, x, cfg.horizon).states]
        every_ball_filled = True
        for c in sample_grid(PLAT.space, cfg.grid_resolution):
            filled = False
            for y in ball_sample(PLAT.space, c, cfg.eps, cfg.ball_count):
                y_states = [p.x for p in trajectory(PLAT, y, cfg.horizon).states]
                tail = [
                    abs(a - b)
                    for a, b in zip(x_states[cfg.horizon - cfg.tail_window:],
                                    y_states[cfg.horizon - cfg.tail_window:])
                ]
                if min(tail) < cfg.eps:
                    filled = True
                    break
            every_ball_filled &= filled
        assert v.holds == every_ball_filled

    def test_rotation_cells_refuted(self):
        v = cell_density(F(ALT), CircleAngle(0.0), SMALL, PairPredicate.PROXIMAL)
        assert v.refuted

    def test_doubling_origin_both_predicates(self):
        cfg = CheckConfig(
            horizon=2000, grid_resolution=12, ball_count=7, eps=0.2, delta=0.5,
            tail_window=800, max_period=8, repetitions=3,
        )
        sys = limit(PD)
        prox = cell_density(sys, CircleAngle(0.0), cfg, PairPredicate.PROXIMAL)
        ly = cell_density(sys, CircleAngle(0.0), cfg, PairPredicate.LI_YORKE)
        assert prox.holds and ly.holds
        # sensitivity plus dense proximal cells must not contradict dense
        # Li-Yorke cells (verdict-level compatibility)
        sens = check_sensitivity(sys, cfg)
        if sens.holds and prox.holds:
            assert not ly.refuted


class TestModeConsistency:
    def test_autonomous_wrapper_identical_verdicts(self):
        fam = autonomous_family(PhaseSpace.unit_interval(), TENT, "tent-wrap")
        cfg = CheckConfig(
            horizon=300, grid_resolution=10, ball_count=7, eps=0.1, delta=0.25,
            tail_window=100, max_period=6, repetitions=2,
        )
        a, b = SystemView(fam, Mode.NON_AUTONOMOUS), SystemView(fam, Mode.AUTONOMOUS_LIMIT)
        for checker in (check_sensitivity, check_transitivity, check_minimality):
            va, vb = checker(a, cfg), checker(b, cfg)
            assert va.outcome == vb.outcome
            assert va.witness == vb.witness


class TestReproducibilityAndMonotonicity:
    def test_verdicts_reproducible(self):
        for checker in (check_sensitivity, check_transitivity):
            v1 = checker(F(PLAT), SMALL)
            v2 = checker(SystemView(PLAT, Mode.NON_AUTONOMOUS), SMALL)
            assert v1 == v2

    def test_holds_survive_longer_horizons(self):
        short = CheckConfig(
            horizon=300, grid_resolution=10, ball_count=7, eps=0.1, delta=0.25,
            tail_window=100, max_period=6, repetitions=2,
        )
        long = CheckConfig(
            horizon=600, grid_resolution=10, ball_count=7, eps=0.1, delta=0.25,
            tail_window=100, max_period=6, repetitions=2,
        )
        for checker in (check_sensitivity, check_transitivity, check_topological_mixing):
            assert checker(limit(PLAT), short).holds
            assert checker(limit(PLAT), long).holds

    def test_witnesses_json_serializable(self):
        import json

        for checker in (
            check_equicontinuity, check_sensitivity, check_cofinite_sensitivity,
            check_transitivity, check_weak_mixing, check_topological_mixing,
            check_minimality,
        ):
            for sys in (F(PLAT), limit(PLAT)):
                v = checker(sys, SMALL)
                json.dumps(v.to_json())


def test_verdict_record_shape():
    import json

    from nonautodyn.checkers import verdict_record

    v = check_sensitivity(F(PLAT), SMALL)
    rec = verdict_record("sensitivity", Mode.NON_AUTONOMOUS, SMALL, v)
    assert set(rec) == {"property", "mode", "outcome", "witness", "config", "narrative"}
    assert rec["mode"] == "non_autonomous"
    json.dumps(rec)


class TestBinaryGrid:
    def test_grid_points_padded_to_word_length(self):
        fam = make_builtin_family("odometer-deletion", word_length=24)
        cfg = CheckConfig(
            horizon=50, grid_resolution=4, ball_count=3, eps=0.2, delta=0.5,
            tail_window=20, max_period=4, repetitions=2,
        )
        pts = grid_points(fam.space, cfg)
        assert len(pts) == 16
        assert all(isinstance(p, BinaryWord) and len(p.bits) == 24 for p in pts)
        assert all(p.effective_length == 24 for p in pts)
