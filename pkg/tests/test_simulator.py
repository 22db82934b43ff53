"""Telemetry generation, fault injection, and closed-loop episodes."""

from dataclasses import replace

import pytest

from fovea.errors import EngineError
from fovea.fixtures import (
    mini_model,
    mini_nominal_scenario,
    mini_novice_user,
    mini_scenario,
    mini_stuck_scenario,
    mini_t_family,
    mini_t_scenario,
    oms_scenario,
)
from fovea.metrics import ReviewTimeModel
from fovea.simulator import (
    FailureMode,
    OperatorDisconnect,
    PolicyConfig,
    Scenario,
    SensorSpec,
    SimulatedOperator,
    evaluate_policies,
    run_episode,
    step,
)
from fovea.user_model import gold_as_user


def _gold_operator(model, **kwargs):
    return SimulatedOperator(user=gold_as_user(model), **kwargs)


class TestTelemetry:
    def test_frames_are_reproducible(self):
        scn = mini_scenario(7)
        a = [step(scn, f).evidence for f in range(scn.horizon)]
        b = [step(scn, f).evidence for f in range(scn.horizon)]
        assert a == b

    def test_different_seeds_differ(self):
        frames_a = [step(mini_scenario(1), f).evidence for f in range(8)]
        frames_b = [step(mini_scenario(2), f).evidence for f in range(8)]
        assert frames_a != frames_b

    def test_leak_biases_sensors_high(self):
        scn = mini_scenario(7)
        highs = sum(
            step(scn, f).evidence[sid] == "high"
            for f in range(scn.horizon)
            for sid in ("S1", "S2")
        )
        # 0.9 emission probability over 16 readings
        assert highs >= 11

    def test_out_of_range_frame(self):
        scn = mini_scenario(7)
        with pytest.raises(EngineError):
            step(scn, -1)
        with pytest.raises(EngineError):
            step(scn, scn.horizon)

    def test_truth_switches_at_onset(self):
        scn = oms_scenario(11)
        assert scn.truth_at(0) == "nominal"
        assert scn.truth_at(scn.onset - 1) == "nominal"
        assert scn.truth_at(scn.onset) == "left_leak"

    def test_context_follows_phases(self):
        scn = oms_scenario(11)
        assert scn.context_at(0).phase == "prestart"
        assert scn.context_at(2).phase == "burn"
        assert scn.context_at(11).phase == "burn"


class TestFailureModes:
    def test_stuck_pins_the_reading(self):
        scn = mini_stuck_scenario(7)
        for f in range(scn.horizon):
            assert step(scn, f).evidence["S2"] == "low"

    def test_drift_walks_through_states(self):
        fm = FailureMode("drift", onset=0, period=2)
        assert [fm.index_at(f, 3) for f in range(7)] == [0, 0, 1, 1, 2, 2, 2]

    def test_sinusoidal_cycles(self):
        fm = FailureMode("sinusoidal", onset=0, period=4)
        idx = [fm.index_at(f, 2) for f in range(8)]
        assert idx == [0, 0, 1, 1, 0, 0, 1, 1]

    def test_sinusoidal_triangle_over_three_states(self):
        fm = FailureMode("sinusoidal", onset=0, period=4)
        idx = [fm.index_at(f, 3) for f in range(8)]
        # triangle sequence 0,1,2,1 stretched over the period
        assert idx == [0, 1, 2, 1, 0, 1, 2, 1]

    def test_failure_applies_only_after_onset(self):
        scn = mini_scenario(7)
        late = replace(
            scn,
            sensors=(
                scn.sensors[0],
                SensorSpec(
                    "S2",
                    {"nominal": {"low": 0.9, "high": 0.1},
                     "leak": {"low": 0.1, "high": 0.9}},
                    failure=FailureMode("stuck", onset=4, state="low"),
                ),
            ),
        )
        healthy = [step(scn, f).evidence["S2"] for f in range(4)]
        with_failure = [step(late, f).evidence["S2"] for f in range(4)]
        assert healthy == with_failure
        assert all(step(late, f).evidence["S2"] == "low" for f in range(4, 8))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            FailureMode("flicker", onset=0)

    def test_stuck_needs_a_state(self):
        with pytest.raises(ValueError):
            FailureMode("stuck", onset=0)


class TestScenarioValidation:
    def test_valid_fixtures_construct(self):
        mini_scenario(1)
        oms_scenario(1)

    def test_phases_must_tile_the_horizon(self):
        scn = mini_scenario(7)
        from fovea.policy import Context
        from fovea.simulator import PhaseSpan

        with pytest.raises(ValueError):
            replace(scn, phases=(PhaseSpan(0, 4, Context(phase="a")),))
        with pytest.raises(ValueError):
            replace(
                scn,
                phases=(
                    PhaseSpan(0, 4, Context(phase="a")),
                    PhaseSpan(5, 8, Context(phase="b")),
                ),
            )

    def test_unknown_ground_truth(self):
        with pytest.raises(ValueError):
            replace(mini_scenario(7), ground_truth="meltdown")

    def test_unknown_null_action(self):
        with pytest.raises(ValueError):
            replace(mini_scenario(7), null_action="shrug")

    def test_sensor_must_be_evidence_variable(self):
        scn = mini_scenario(7)
        with pytest.raises(ValueError):
            replace(
                scn,
                sensors=scn.sensors
                + (SensorSpec("H", {"nominal": {"nominal": 1.0},
                                    "leak": {"nominal": 1.0}}),),
            )

    def test_emission_rows_must_normalize(self):
        with pytest.raises(ValueError):
            SensorSpec("S1", {"nominal": {"low": 0.5, "high": 0.4},
                              "leak": {"low": 0.1, "high": 0.9}})


class TestEpisodes:
    def test_prompt_halt_on_clear_leak(self):
        scn = mini_scenario(7)
        result = run_episode(
            scn, PolicyConfig("managed", "managed"), _gold_operator(scn.model)
        )
        assert result.action == "halt"
        assert result.action_frame == 0
        assert result.delay == pytest.approx(0.0)
        assert result.utility == pytest.approx(0.6)

    def test_nominal_run_holds_null_action(self):
        scn = mini_nominal_scenario(3)
        result = run_episode(
            scn, PolicyConfig("everything", "everything"), _gold_operator(scn.model)
        )
        assert result.action == "continue"
        assert result.action_frame == scn.horizon
        assert result.utility == pytest.approx(1.0)

    def test_bit_identical_reruns(self):
        scn = mini_t_scenario(7)
        policy = PolicyConfig("managed", "managed")
        op = _gold_operator(scn.model)
        assert run_episode(scn, policy, op) == run_episode(scn, policy, op)

    def test_operator_latency_costs_utility(self):
        scn = mini_t_scenario(7)
        policy = PolicyConfig("minimal", "minimal")
        utilities = [
            run_episode(
                scn, policy, _gold_operator(scn.model, response_delay=d)
            ).utility
            for d in (0.0, 2.0, 5.0)
        ]
        assert utilities[0] >= utilities[1] >= utilities[2]

    def test_review_cost_delays_the_landing(self):
        scn = mini_t_scenario(7)
        rushed = run_episode(
            scn, PolicyConfig("everything", "everything"),
            _gold_operator(scn.model, review=ReviewTimeModel(default_cost=1.0)),
        )
        instant = run_episode(
            scn, PolicyConfig("everything", "everything"), _gold_operator(scn.model)
        )
        if rushed.action == instant.action == "halt":
            assert rushed.delay > instant.delay
            assert rushed.utility < instant.utility

    def test_novice_misses_what_they_cannot_read(self):
        # the stuck backup reads low forever and the novice cannot see S1,
        # so the leak is never acted on
        scn = mini_stuck_scenario(7)
        result = run_episode(
            scn,
            PolicyConfig("everything", "everything"),
            SimulatedOperator(user=mini_novice_user()),
        )
        assert result.action == "continue"
        assert result.utility == pytest.approx(0.0)

    def test_gold_action_recorded(self):
        scn = mini_scenario(7)
        result = run_episode(
            scn, PolicyConfig("managed", "managed"), _gold_operator(scn.model)
        )
        assert result.gold_action in scn.model.action_ids

    def test_operator_disconnect_marks_aborted(self):
        class Flaky:
            def landing_offset(self, revealed):
                return 0.0

            def decide(self, frame, state, revealed, u):
                if frame >= 2:
                    raise OperatorDisconnect("link lost")
                return "continue"

        scn = mini_nominal_scenario(3)
        result = run_episode(scn, PolicyConfig("managed", "managed"), Flaky())
        assert result.aborted
        assert result.action is None
        assert result.utility == 0.0
        assert len(result.frames) == 3

    def test_frame_records_cover_prefix(self):
        scn = mini_scenario(7)
        result = run_episode(
            scn, PolicyConfig("managed", "managed"), _gold_operator(scn.model)
        )
        assert [r.frame for r in result.frames] == list(
            range(result.action_frame + 1)
        )
        for rec in result.frames:
            assert set(rec.revealed) <= set(rec.evidence)


class TestEvaluation:
    def test_rows_are_deterministic(self):
        scenarios = mini_t_family(3)
        policies = [PolicyConfig("minimal", "minimal"),
                    PolicyConfig("everything", "everything")]
        op = _gold_operator(scenarios[0].model,
                            review=ReviewTimeModel(default_cost=1.0))
        a = evaluate_policies(scenarios, policies, op, replications=2)
        b = evaluate_policies(scenarios, policies, op, replications=2)
        assert a == b
        assert len(a) == len(scenarios) * len(policies)

    def test_replication_reruns_with_shifted_seed(self):
        scn = mini_t_scenario(50)
        policy = PolicyConfig("minimal", "minimal")
        op = _gold_operator(scn.model)
        rows = evaluate_policies([scn], [policy], op, replications=3)
        manual = [
            run_episode(replace(scn, seed=50 + r), policy, op).utility
            for r in range(3)
        ]
        assert rows[0].mean_utility == pytest.approx(sum(manual) / 3, abs=1e-12)
        assert rows[0].episodes == 3

    def test_lean_display_beats_firehose_under_time_pressure(self):
        scenarios = mini_t_family(20, base_seed=300)
        op = SimulatedOperator(
            user=gold_as_user(scenarios[0].model),
            review=ReviewTimeModel(default_cost=1.0),
        )
        rows = evaluate_policies(
            scenarios,
            [PolicyConfig("minimal", "minimal"),
             PolicyConfig("everything", "everything")],
            op,
        )

        def mean(policy, field):
            vals = [getattr(r, field) for r in rows if r.policy == policy]
            return sum(vals) / len(vals)

        assert mean("minimal", "mean_utility") > mean("everything", "mean_utility")
        assert mean("minimal", "mean_delay") < mean("everything", "mean_delay")
