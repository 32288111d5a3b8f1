import dataclasses
import datetime as dt

import pytest
from hypothesis import given, settings

import oracles
from elbacktest.errors import IdentityBreach
from elbacktest.ior import (
    ibnr_expenses,
    ibnr_from_lcp,
    impact_of_risk,
    llp_expenses,
    shortfall,
)
from elbacktest.ledger import AccountState, PeriodLedger, ProvisionBalances, Snapshot, Status
from elbacktest.synth import RandomLedgerOptions, random_ledger
from strategies import ledgers

P = Status.PERFORMING
D0, D1 = dt.date(2020, 12, 31), dt.date(2021, 12, 31)


def test_llp_expenses():
    assert llp_expenses(ProvisionBalances(llp_bop=100.0, llp_eop=80.0), 30.0) == 10.0
    assert llp_expenses(ProvisionBalances(), 0.0) == 0.0
    assert llp_expenses(ProvisionBalances(llp_bop=5.0, llp_eop=5.0), 0.0) == 0.0


def test_ibnr_expenses():
    assert ibnr_expenses(ProvisionBalances(ibnr_bop=50.0, ibnr_eop=60.0)) == 10.0
    assert ibnr_expenses(ProvisionBalances(ibnr_bop=7.0, ibnr_eop=7.0)) == 0.0
    assert ibnr_expenses(ProvisionBalances(ibnr_bop=25.0, ibnr_eop=0.0)) == -25.0


def test_ibnr_from_lcp():
    assert ibnr_from_lcp(100.0, 6) == 50.0
    assert ibnr_from_lcp(100.0, 0) == 0.0
    assert ibnr_from_lcp(100.0, 12) == 100.0
    with pytest.raises(ValueError):
        ibnr_from_lcp(100.0, 13)


def test_shortfall():
    p = ProvisionBalances(llp_eop=80.0, ibnr_eop=10.0, llp_bop=80.0)
    assert shortfall(120.0, p, "EOP") == 30.0
    assert shortfall(90.0, p, "EOP") == 0.0
    assert shortfall(50.0, p, "BOP") == -30.0
    with pytest.raises(ValueError):
        shortfall(1.0, p, "MID")


def test_excess_flag():
    accs = [AccountState("a", P, 0.1, 100.0, 0.5)]
    ledger = PeriodLedger(Snapshot(D0, accs), Snapshot(D1, accs),
                          provisions=ProvisionBalances(llp_bop=10.0, llp_eop=10.0))
    cap = impact_of_risk(ledger)
    assert cap.sf_bop == -5.0 and cap.excess_bop and cap.excess_eop


def test_case1_year1(cases):
    cap = impact_of_risk(cases[1][0])
    assert (cap.el_eop, cap.el_bop, cap.total_write_off, cap.ior) == (100.0, 0.0, 0.0, 100.0)


def test_case2_year2(cases):
    cap = impact_of_risk(cases[2][1])
    assert (cap.el_eop, cap.el_bop, cap.ior) == (100.0, 50.0, 50.0)


def test_unchanged_snapshots():
    accs = [AccountState("a", P, 0.1, 100.0, 0.5)]
    cap = impact_of_risk(PeriodLedger(Snapshot(D0, accs), Snapshot(D1, accs)))
    assert cap.ior == 0.0


def test_missing_provisions_are_unavailable_not_zero():
    cap = impact_of_risk(random_ledger(1, 200, RandomLedgerOptions(provisions=False)))
    assert not cap.provisions_available
    assert cap.llp_expenses is None and cap.sf_impact is None and cap.cost_of_risk is None


def test_case_accounting_route(cases):
    for chain in cases.values():
        for lg in chain:
            cap = impact_of_risk(lg)
            assert cap.ior_accounting == cap.ior


def test_perturbed_llp_breaks_cross_check(cases):
    lg = cases[3][1]
    bad = dataclasses.replace(lg, provisions=dataclasses.replace(lg.provisions,
                                                                 llp_eop=lg.provisions.llp_eop + 1.0))
    with pytest.raises(IdentityBreach, match="accounting route"):
        impact_of_risk(bad)


@settings(max_examples=80, deadline=None)
@given(ledgers(max_accounts=25, provisions=True))
def test_accounting_route_matches_el_route(ledger):
    cap = impact_of_risk(ledger)
    assert oracles.close(cap.ior_accounting, oracles.ior_el_route(ledger), oracles.gross(ledger))
    p = ledger.provisions
    hand = (p.llp_eop - p.llp_bop + oracles.total_write_off(ledger) + p.ibnr_eop - p.ibnr_bop
            + shortfall(oracles.total_el(ledger.eop), p, "EOP")
            - shortfall(oracles.total_el(ledger.bop), p, "BOP"))
    assert oracles.close(hand, cap.ior, oracles.gross(ledger) + p.llp_bop + p.llp_eop
                         + p.ibnr_bop + p.ibnr_eop)


@settings(max_examples=80, deadline=None)
@given(ledgers(max_accounts=25, lifetime=True))
def test_lifetime_variant(ledger):
    cap = impact_of_risk(ledger)
    delta = oracles.lifetime_delta(ledger.eop) - oracles.lifetime_delta(ledger.bop)
    if cap.ior_life_pl is None:
        assert delta == 0.0
        return
    scale = oracles.gross(ledger) + cap.el_life_pl_bop + cap.el_life_pl_eop
    assert oracles.close(cap.ior_life_pl - cap.ior, delta, scale)


@settings(max_examples=60, deadline=None)
@given(ledgers(max_accounts=25))
def test_npl_only_route(ledger):
    cap = impact_of_risk(ledger)
    assert oracles.close(cap.ior_npl, oracles.ior_npl_route(ledger), oracles.gross(ledger))
    assert oracles.close(cap.ior, oracles.ior_el_route(ledger), oracles.gross(ledger))
