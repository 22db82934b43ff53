"""Reveal-value metrics and the subset search over hidden evidence."""

import itertools
import random
from dataclasses import replace

import pytest
from conftest import all_full_assignments, disjoint_pairs, random_decision_model

from fovea.bayesnet import Cpt, Network, Variable
from fovea.decision import ActionDef, DecisionModel, TimedUtility
from fovea.fixtures import mini_model, mini_novice_user, mini_t_model
from fovea.metrics import (
    EXHAUSTIVE_CAP,
    ZERO_DELAY,
    MetricConfig,
    ReviewTimeModel,
    best_reveal_subset,
    evdi,
    evri,
    nevri,
    review_time,
)
from fovea.user_model import gold_as_user

FULL_HH = {"S1": "high", "S2": "high"}
FULL_HL = {"S1": "high", "S2": "low"}


@pytest.fixture
def model():
    return mini_model()


class TestReviewTime:
    def test_zero_delay(self):
        assert review_time(ZERO_DELAY, {"S1": "high", "S2": "low"}) == 0.0

    def test_base_plus_items(self):
        rtm = ReviewTimeModel(base_delay=0.5, item_costs={"S1": 0.25})
        assert review_time(rtm, {}) == 0.5
        assert review_time(rtm, {"S1": "high"}) == 0.75
        assert review_time(rtm, {"S1": "high", "S2": "low"}) == 1.75

    def test_negative_costs_rejected(self):
        with pytest.raises(ValueError):
            ReviewTimeModel(base_delay=-1.0)
        with pytest.raises(ValueError):
            ReviewTimeModel(default_cost=-0.5)
        with pytest.raises(ValueError):
            ReviewTimeModel(item_costs={"S1": -2.0})

    def test_scaled(self):
        rtm = ReviewTimeModel(base_delay=1.0, item_costs={"S1": 0.5}, default_cost=2.0)
        scaled = rtm.scaled(3.0)
        assert scaled.base_delay == 3.0
        assert scaled.item_costs == {"S1": 1.5}
        assert scaled.default_cost == 6.0


class TestEvri:
    def test_informative_reveal(self, model):
        # revealing S1=high flips continue -> halt; scored under p(leak|hh)=81/85
        # the gain is 0.6 - 4/85 = 47/85
        r = evri(model, {"S1": "high"}, {}, FULL_HH)
        assert r.value == pytest.approx(47 / 85, abs=1e-12)
        assert (r.action_before, r.action_after) == ("continue", "halt")

    def test_redundant_reveal_is_exactly_zero(self, model):
        r = evri(model, {"S2": "high"}, {"S1": "high"}, FULL_HH)
        assert r.value == 0.0
        assert r.action_before == r.action_after == "halt"

    def test_empty_reveal_is_exactly_zero(self, model):
        assert evri(model, {}, {"S1": "high"}, FULL_HH).value == 0.0

    def test_misleading_reveal_is_negative(self, model):
        # S1=high alone suggests a leak, but the full picture says nominal
        r = evri(model, {"S1": "high"}, {}, FULL_HL)
        assert r.value == pytest.approx(-0.2, abs=1e-12)
        assert (r.action_before, r.action_after) == ("continue", "halt")

    def test_revealing_the_rest_is_never_negative(self, model):
        for full in all_full_assignments(model.network):
            for shown_ids in ((), ("S1",), ("S2",)):
                shown = {v: full[v] for v in shown_ids}
                e = {v: s for v, s in full.items() if v not in shown}
                assert evri(model, e, shown, full).value >= -1e-12

    def test_overlap_rejected(self, model):
        with pytest.raises(ValueError):
            evri(model, {"S1": "high"}, {"S1": "high"}, FULL_HH)

    def test_contradiction_rejected(self, model):
        with pytest.raises(ValueError):
            evri(model, {"S1": "low"}, {}, FULL_HH)
        with pytest.raises(ValueError):
            evri(model, {"S1": "high"}, {"S2": "high"}, FULL_HL)

    def test_item_outside_full_rejected(self, model):
        with pytest.raises(ValueError):
            evri(model, {"S2": "high"}, {}, {"S1": "high"})


class TestNevri:
    def test_matches_evri_under_constant_utilities(self, model):
        rtm = ReviewTimeModel(base_delay=0.5, default_cost=2.0)
        for full in all_full_assignments(model.network):
            for e, shown in disjoint_pairs(full):
                a = evri(model, e, shown, full).value
                b = nevri(model, rtm, e, shown, full).value
                assert a == pytest.approx(b, abs=1e-12)

    def test_review_cost_can_outweigh_redundant_detail(self):
        # both sides already halt; the extra item only delays the halt:
        # 0.6*(1 - 2/10) - 0.6*(1 - 1/10) = -0.06
        t_model = mini_t_model()
        rtm = ReviewTimeModel(default_cost=1.0)
        r = nevri(t_model, rtm, {"S2": "high"}, {"S1": "high"}, FULL_HH)
        assert r.value == pytest.approx(-0.06, abs=1e-12)
        assert (r.delay_before, r.delay_after) == (1.0, 2.0)

    def test_empty_reveal_is_exactly_zero(self):
        t_model = mini_t_model()
        rtm = ReviewTimeModel(default_cost=1.0)
        assert nevri(t_model, rtm, {}, {"S1": "high"}, FULL_HH).value == 0.0

    def test_worthwhile_reveal_survives_its_cost(self):
        # S1 flips continue -> halt; halting one unit late still beats not halting
        t_model = mini_t_model()
        rtm = ReviewTimeModel(default_cost=1.0)
        r = nevri(t_model, rtm, {"S1": "high"}, {}, FULL_HH)
        assert r.value == pytest.approx(0.54 - 4 / 85, abs=1e-12)


class TestEvdi:
    def test_gold_argmax_zero_delay_matches_evri(self, model):
        user = gold_as_user(model)
        for full in all_full_assignments(model.network):
            for e, shown in disjoint_pairs(full):
                a = evri(model, e, shown, full).value
                b = evdi(model, user, ZERO_DELAY, e, shown, full).value
                assert a == pytest.approx(b, abs=1e-12)

    def test_uninterpretable_sensor_is_worthless(self, model):
        # the novice cannot read S1, so revealing it changes nothing
        novice = mini_novice_user()
        r = evdi(model, novice, ZERO_DELAY, {"S1": "high"}, {}, FULL_HH)
        assert r.value == 0.0
        assert r.action_before == r.action_after == "continue"

    def test_novice_still_benefits_from_backup_sensor(self, model):
        novice = mini_novice_user()
        r = evdi(model, novice, ZERO_DELAY, {"S2": "high"}, {}, FULL_HH)
        assert r.value == pytest.approx(47 / 85, abs=1e-12)
        assert r.action_after == "halt"

    def test_action_set_mismatch_rejected(self, model):
        user = replace(gold_as_user(model), actions=("continue",))
        with pytest.raises(ValueError):
            evdi(model, user, ZERO_DELAY, {"S1": "high"}, {}, FULL_HH)

    def test_delays_recorded(self, model):
        user = gold_as_user(model)
        rtm = ReviewTimeModel(default_cost=1.0)
        r = evdi(model, user, rtm, {"S2": "high"}, {"S1": "high"}, FULL_HH)
        assert (r.delay_before, r.delay_after) == (1.0, 2.0)


class TestMetricConfig:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            MetricConfig(kind="voi")

    def test_evdi_requires_user(self):
        with pytest.raises(ValueError):
            MetricConfig(kind="evdi")

    def test_dispatch(self, model):
        cfg = MetricConfig(kind="evri")
        assert cfg.evaluate(model, {"S1": "high"}, {}, FULL_HH).value == pytest.approx(
            47 / 85, abs=1e-12
        )

    def test_scaled_multiplies_review_costs(self):
        cfg = MetricConfig(kind="nevri", rtm=ReviewTimeModel(base_delay=1.0))
        assert cfg.scaled(4.0).rtm.base_delay == 4.0
        assert cfg.scaled(4.0).kind == "nevri"


def _oracle_best_subset(model, cfg, shown, full):
    """Independent exhaustive scan with the same tie rules, via itertools."""
    hidden = sorted(set(full) - set(shown))
    best_ids, best_val = (), cfg.evaluate(model, {}, shown, full).value
    ordered = sorted(
        itertools.chain.from_iterable(
            itertools.combinations(hidden, k) for k in range(len(hidden) + 1)
        ),
        key=lambda ids: (len(ids), ids),
    )
    for ids in ordered:
        val = cfg.evaluate(model, {v: full[v] for v in ids}, shown, full).value
        if val > best_val:
            best_ids, best_val = ids, val
    return {v: full[v] for v in best_ids}, best_val


def _xor_model():
    """Two sensors that are individually useless but jointly decisive."""
    net = Network(
        variables=(
            Variable("H", "condition", ("nominal", "leak")),
            Variable("S1", "reference channel", ("a", "b")),
            Variable("S2", "comparison channel", ("a", "b")),
        ),
        cpts=(
            Cpt("H", (), [0.5, 0.5]),
            Cpt("S1", (), [0.5, 0.5]),
            Cpt(
                "S2",
                ("H", "S1"),
                [
                    [[0.9, 0.1], [0.1, 0.9]],  # nominal: S2 tracks S1
                    [[0.1, 0.9], [0.9, 0.1]],  # leak: S2 opposes S1
                ],
            ),
        ),
        hypothesis_var="H",
        evidence_vars=("S1", "S2"),
    )
    return DecisionModel(
        network=net,
        actions=(ActionDef("continue", "continue"), ActionDef("halt", "halt")),
        utility=TimedUtility.constant(
            {"continue": {"nominal": 1.0, "leak": 0.0},
             "halt": {"nominal": 0.55, "leak": 0.55}}
        ),
    )


class TestBestRevealSubset:
    def test_smallest_sufficient_set_wins_ties(self, model):
        # S1, S2, and the pair all score 47/85; cardinality breaks the tie
        subset, result = best_reveal_subset(model, MetricConfig(), {}, FULL_HH)
        assert subset == {"S1": "high"}
        assert result.value == pytest.approx(47 / 85, abs=1e-12)

    def test_nothing_hidden(self, model):
        subset, result = best_reveal_subset(model, MetricConfig(), FULL_HH, FULL_HH)
        assert subset == {}
        assert result.value == 0.0

    def test_exhaustive_matches_independent_oracle(self):
        rng = random.Random(31415)
        cfg = MetricConfig()
        for _ in range(20):
            m = random_decision_model(rng, n_vars=6, n_evidence=4)
            full = {
                v: rng.choice(m.network.variable(v).states)
                for v in m.network.evidence_vars
            }
            got_subset, got = best_reveal_subset(m, cfg, {}, full)
            want_subset, want_val = _oracle_best_subset(m, cfg, {}, full)
            assert got_subset == want_subset
            assert got.value == pytest.approx(want_val, abs=1e-12)

    def test_greedy_never_beats_exhaustive(self):
        rng = random.Random(2718)
        cfg = MetricConfig()
        for _ in range(30):
            m = random_decision_model(rng, n_vars=6, n_evidence=4)
            full = {
                v: rng.choice(m.network.variable(v).states)
                for v in m.network.evidence_vars
            }
            _, exact = best_reveal_subset(m, cfg, {}, full, strategy="exhaustive")
            _, greedy = best_reveal_subset(m, cfg, {}, full, strategy="greedy")
            assert greedy.value <= exact.value + 1e-12

    def test_lookahead_finds_jointly_informative_pair(self):
        # neither channel moves the posterior alone, so greedy stops empty;
        # two-step lookahead uncovers the agreement pattern
        m = _xor_model()
        full = {"S1": "a", "S2": "a"}
        cfg = MetricConfig()
        g_subset, g = best_reveal_subset(m, cfg, {}, full, strategy="greedy")
        assert g_subset == {}
        assert g.value == 0.0
        l_subset, l = best_reveal_subset(
            m, cfg, {}, full, strategy="lookahead", lookahead=2
        )
        assert l_subset == full
        assert l.value == pytest.approx(0.35, abs=1e-12)
        _, exact = best_reveal_subset(m, cfg, {}, full, strategy="exhaustive")
        assert exact.value == pytest.approx(l.value, abs=1e-12)

    def test_unknown_strategy_rejected(self, model):
        with pytest.raises(ValueError):
            best_reveal_subset(model, MetricConfig(), {}, FULL_HH, strategy="beam")

    def test_exhaustive_cap(self, model):
        fake_full = {f"x{i}": "on" for i in range(EXHAUSTIVE_CAP + 1)}
        with pytest.raises(ValueError, match="exhaustive cap"):
            best_reveal_subset(model, MetricConfig(), {}, fake_full)
