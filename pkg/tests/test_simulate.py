import math
import random

import pytest

from polyaproc import (
    RandomizedRule,
    ReplacementRule,
    SimConfig,
    UrnState,
    expected_event_count,
    next_event,
    run_ensemble,
    run_replica,
)
from polyaproc.simulate import SimulationCorruption, derive_seed

RULE = ReplacementRule(1, 3, 2, 2)


class FixedUniform:
    """Deterministic uniform stream for single-event checks."""

    def __init__(self, values):
        self._values = list(values)

    def random(self):
        return self._values.pop(0)


class TestNextEvent:
    def test_white_draw_applies_row1(self):
        state = UrnState(white=3, blue=2)
        # first draw drives the clock, second the color: 0.5 <= 3/5
        out = next_event(state, RULE, FixedUniform([0.1, 0.5]))
        assert (out.white, out.blue) == (4, 5)

    def test_blue_draw_applies_row2(self):
        state = UrnState(white=3, blue=2)
        out = next_event(state, RULE, FixedUniform([0.1, 0.7]))
        assert (out.white, out.blue) == (5, 4)

    def test_play_the_winner_success(self):
        rule = RandomizedRule.play_the_winner(0.3, 0.6)
        state = UrnState(white=1, blue=1)
        # color draw 0.3 <= 1/2 picks white; entry draw 0.9 >= 0.7 samples W=1
        out = next_event(state, rule, FixedUniform([0.1, 0.3, 0.9]))
        assert (out.white, out.blue) == (2, 1)

    def test_time_strictly_increases(self):
        rng = random.Random(7)
        state = UrnState(white=3, blue=2)
        for _ in range(50):
            new = next_event(state, RULE, rng)
            assert new.time > state.time
            state = new

    def test_conservation_per_event(self):
        rng = random.Random(11)
        state = UrnState(white=3, blue=2)
        for _ in range(200):
            new = next_event(state, RULE, rng)
            assert new.total - state.total == RULE.k
            state = new

    def test_randomized_conservation_per_event(self):
        rule = RandomizedRule.play_the_winner(0.3, 0.6)
        rng = random.Random(13)
        state = UrnState(white=3, blue=2)
        for _ in range(200):
            new = next_event(state, rule, rng)
            assert new.total - state.total == 1
            state = new

    def test_corruption_signaled(self):
        # untenable rule constructed directly: drawing white removes 2 whites
        rule = ReplacementRule(-2, 5, 3, 0)
        state = UrnState(white=1, blue=1)
        with pytest.raises(SimulationCorruption):
            next_event(state, rule, FixedUniform([0.1, 0.2]))


class TestRunReplica:
    def test_vanishing_horizon_executes_nothing(self):
        cfg = SimConfig(rule=RULE, w0=3, b0=2, t_star=1e-9)
        result = run_replica(cfg, seed=1)
        assert result.events == 0
        assert (result.final.white, result.final.blue) == (3, 2)
        assert result.final.time == 1e-9

    def test_zero_horizon_rejected(self):
        with pytest.raises(ValueError):
            SimConfig(rule=RULE, w0=3, b0=2, t_star=0.0)

    def test_balance_conservation(self):
        cfg = SimConfig(rule=RULE, w0=3, b0=2, t_star=1.0)
        result = run_replica(cfg, seed=42)
        assert result.final.total == 5 + 4 * result.events
        assert (result.final.total - 5) % 4 == 0

    def test_same_seed_same_result(self):
        cfg = SimConfig(rule=RULE, w0=3, b0=2, t_star=1.0)
        assert run_replica(cfg, seed=99) == run_replica(cfg, seed=99)

    def test_untenable_rule_rejected_at_config(self):
        with pytest.raises(ValueError, match="rejected"):
            SimConfig(rule=ReplacementRule(5, -1, 2, 2), w0=3, b0=2, t_star=1.0)


class TestRunEnsemble:
    def test_single_replication_matches_run_replica(self):
        cfg = SimConfig(rule=RULE, w0=3, b0=2, t_star=1.0, replications=1, master_seed=5)
        ens = run_ensemble(cfg)
        assert ens.replicas[0] == run_replica(cfg, derive_seed(5, 0))

    def test_master_seed_determinism(self):
        cfg = SimConfig(rule=RULE, w0=3, b0=2, t_star=1.0, replications=20, master_seed=17)
        assert run_ensemble(cfg) == run_ensemble(cfg)

    def test_parallelism_invariance(self):
        cfg = SimConfig(rule=RULE, w0=3, b0=2, t_star=1.0, replications=16, master_seed=17)
        assert run_ensemble(cfg, workers=1) == run_ensemble(cfg, workers=3)

    def test_mean_event_count_matches_growth_law(self):
        cfg = SimConfig(rule=RULE, w0=3, b0=2, t_star=1.0, replications=4000, master_seed=3)
        ens = run_ensemble(cfg)
        expected = expected_event_count(5, 4, 1.0)
        # per-replica SD ~ tau SD / k; 4 sigma band on the ensemble mean
        sd = math.sqrt(sum((r.events - ens.mean_events) ** 2 for r in ens.replicas) / (4000 - 1))
        assert abs(ens.mean_events - expected) < 4 * sd / math.sqrt(4000)

    def test_classical_polya_symmetry(self):
        # rule (2,0,0,2) from (1,1): white fraction has mean 1/2 by symmetry
        cfg = SimConfig(
            rule=ReplacementRule(2, 0, 0, 2), w0=1, b0=1, t_star=1.0,
            replications=10_000, master_seed=8,
        )
        ens = run_ensemble(cfg)
        fracs = [r.final.white / r.final.total for r in ens.replicas]
        mean = sum(fracs) / len(fracs)
        var = sum((f - mean) ** 2 for f in fracs) / (len(fracs) - 1)
        assert abs(mean - 0.5) <= 3 * math.sqrt(var / len(fracs))


class TestSeedDerivation:
    def test_distinct_per_replica(self):
        seeds = {derive_seed(123, i) for i in range(1000)}
        assert len(seeds) == 1000

    def test_stable_across_calls(self):
        assert derive_seed(123, 7) == derive_seed(123, 7)
