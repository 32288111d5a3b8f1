import math

import numpy as np
import pytest

import oracles
from elbacktest.backtest import decompose_ior
from elbacktest.errors import ConfigInvalid
from elbacktest.synth import (
    RandomLedgerOptions,
    ScenarioConfig,
    generate_appendix_case,
    generate_conservativity_scenario,
    generate_recovery_scenario,
    random_ledger,
    rng_for,
    simulate_lifecycle,
)


def chains_equal(a, b):
    return len(a) == len(b) and all(
        x.bop == y.bop and x.eop == y.eop and x.events == y.events and x.provisions == y.provisions
        for x, y in zip(a, b)
    )


class TestAppendixCases:
    @pytest.mark.parametrize("case,expected", [(1, (100, 0, 0, 0)), (2, (50, 50, 0, 0)),
                                               (3, (50, 0, 0, 50))])
    def test_ior_sequence(self, cases, case, expected):
        assert tuple(oracles.ior_el_route(lg) for lg in cases[case]) == expected

    def test_portfolio_shape(self, cases):
        chain = cases[1]
        assert len(chain[0].eop) == 10_000
        assert len(chain[1].eop) == 200
        assert chain[2].events.total_recovery() == 100.0
        assert chain[3].events.total_write_off() == 100.0
        assert len(chain[3].eop) == 0

    def test_case_parameters(self, cases):
        assert {a.pd for a in cases[2][0].eop} == {0.01}
        assert {a.lgd for a in cases[3][1].eop} == {0.25}
        assert {a.lgd for a in cases[3][2].eop} == {0.5}

    def test_unknown_case(self):
        with pytest.raises(ConfigInvalid):
            generate_appendix_case(4)


class TestLifecycle:
    def test_rng_is_pcg64(self):
        assert isinstance(rng_for(1).bit_generator, np.random.PCG64)

    def test_reproducible(self):
        cfg = ScenarioConfig(n_accounts=300, pd_true=0.05, seed=42, recovery_profile=(0.3, 0.2),
                             discount_rate=0.04, horizon_years=6)
        assert chains_equal(simulate_lifecycle(cfg), simulate_lifecycle(cfg))

    def test_different_seeds_differ(self):
        a = simulate_lifecycle(ScenarioConfig(n_accounts=500, pd_true=0.1, seed=1))
        b = simulate_lifecycle(ScenarioConfig(n_accounts=500, pd_true=0.1, seed=2))
        assert not chains_equal(a, b)

    @pytest.mark.parametrize("seed", range(5))
    def test_liquidates_and_telescopes(self, seed):
        cfg = ScenarioConfig(n_accounts=400, pd_true=0.06, pd_model=0.03, lgd_model=0.6,
                             recovery_profile=(0.2, 0.3), discount_rate=0.05, horizon_years=7,
                             term_years=2, seed=seed)
        chain = simulate_lifecycle(cfg)
        assert len(chain[0].bop) == 0 and len(chain[-1].eop) == 0
        total_ior = math.fsum(oracles.ior_el_route(lg) for lg in chain)
        total_wo = math.fsum(oracles.total_write_off(lg) for lg in chain)
        assert total_wo > 0
        assert abs(total_ior - total_wo) <= 1e-9 * total_wo

    def test_zero_pd_true(self):
        chain = simulate_lifecycle(ScenarioConfig(n_accounts=200, pd_true=0.0, seed=3))
        assert sum(lg.events.total_write_off() for lg in chain) == 0.0
        assert math.fsum(oracles.ior_el_route(lg) for lg in chain) == pytest.approx(0.0, abs=1e-12)

    def test_correct_model_gives_zero_backtests(self):
        cfg = ScenarioConfig(n_accounts=1000, pd_true=0.03, pd_model=0.03, lgd_model=0.4,
                             recovery_profile=(0.35, 0.25), discount_rate=0.0, horizon_years=5,
                             default_sampling="expected", seed=9)
        assert cfg.realized_lgd == pytest.approx(cfg.lgd_model)
        for lg in simulate_lifecycle(cfg):
            rep = decompose_ior(lg)
            scale = oracles.gross(lg)
            assert abs(rep.pl_backtest) <= 1e-9 * scale
            assert abs(rep.npl_backtest) <= 1e-9 * scale

    @pytest.mark.parametrize("kw", [
        dict(n_accounts=0), dict(pd_true=1.5), dict(recovery_profile=(0.7, 0.6)),
        dict(recovery_profile=(-0.1,)), dict(horizon_years=2), dict(horizon_years=1),
        dict(lgd_true=0.9, recovery_profile=(0.5,)), dict(default_sampling="poisson"),
        dict(discount_rate=-0.01),
    ])
    def test_invalid_config(self, kw):
        with pytest.raises(ConfigInvalid):
            ScenarioConfig(**kw)

    def test_from_mapping_rejects_unknown_keys(self):
        with pytest.raises(ConfigInvalid):
            ScenarioConfig.from_mapping({"n_accounts": 5, "colour": "red"})

    def test_expected_sampling_needs_integral_counts(self):
        cfg = ScenarioConfig(n_accounts=10, pd_true=0.15, default_sampling="expected")
        with pytest.raises(ConfigInvalid):
            simulate_lifecycle(cfg)


class TestRecoveryScenario:
    def test_two_recoveries_year1(self):
        lg = generate_recovery_scenario(100.0, 0.10, [50.0, 30.0])[0]
        el_bop = 100 - 50 / 1.1 - 30 / 1.21
        assert oracles.total_el(lg.bop) == pytest.approx(el_bop, abs=1e-12)
        assert decompose_ior(lg).npl_backtest == pytest.approx(-7.02479338842976, abs=1e-9)

    def test_zero_rate(self):
        for lg in generate_recovery_scenario(100.0, 0.0, [40.0, 20.0, 10.0]):
            assert decompose_ior(lg).npl_backtest == pytest.approx(0.0, abs=1e-12)

    def test_single_recovery(self):
        r = 0.07
        (lg,) = generate_recovery_scenario(80.0, r, [60.0])
        er_bop = 60.0 / (1 + r)
        assert decompose_ior(lg).npl_backtest == pytest.approx(-r * er_bop, abs=1e-9)

    def test_chain_ends_empty(self):
        chain = generate_recovery_scenario(100.0, 0.05, [10.0, 20.0, 30.0])
        assert len(chain) == 3 and len(chain[-1].eop) == 0
        assert chain[-1].events.total_write_off() == pytest.approx(40.0)

    @pytest.mark.parametrize("args", [(0.0, 0.1, [1.0]), (100.0, -0.1, [1.0]), (100.0, 0.1, []),
                                      (100.0, 0.1, [80.0, 30.0]), (100.0, 0.1, [-1.0])])
    def test_invalid(self, args):
        with pytest.raises(ConfigInvalid):
            generate_recovery_scenario(*args)


def test_conservativity_scenario_reproducible():
    a = generate_conservativity_scenario(2000, 0.3, 0.4, 0.15, seed=5)
    b = generate_conservativity_scenario(2000, 0.3, 0.4, 0.15, seed=5)
    assert a.eop == b.eop and a.events == b.events


def test_random_ledger_reproducible_and_valid():
    a = random_ledger(17, 1000)
    b = random_ledger(17, 1000)
    assert a.bop == b.bop and a.eop == b.eop and a.events == b.events
    decompose_ior(a, ["pd_model", "years_in_default"])


def test_random_ledger_options():
    lg = random_ledger(3, 600, RandomLedgerOptions(at_default_complete=False, lifetime_share=0.0,
                                                   provisions=False))
    rep = decompose_ior(lg)
    assert not rep.has_deltas
    assert rep.ior_life_pl is None
    assert lg.provisions is None
