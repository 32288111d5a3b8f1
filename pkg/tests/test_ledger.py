import datetime as dt
import random

import pytest
from hypothesis import given, settings

from elbacktest.errors import (
    DuplicateAccount,
    FieldOutOfRange,
    InconsistentDates,
    InconsistentEvents,
    MissingDefaultDate,
    NonMonotoneDates,
)
from elbacktest.ledger import (
    AccountEvents,
    AccountState,
    PeriodEvents,
    PeriodLedger,
    ProvisionBalances,
    Snapshot,
    Status,
    Transition,
    classify_transitions,
    load_snapshot,
    pair_periods,
)
from elbacktest.synth import random_ledger
from strategies import ledgers

P, N = Status.PERFORMING, Status.NON_PERFORMING
D0, D1 = dt.date(2020, 12, 31), dt.date(2021, 12, 31)


def record(aid, **kw):
    rec = {"account_id": aid, "as_of": "2020-12-31", "status": "P", "pd": "0.02", "ead": "1",
           "lgd": "0.5"}
    rec.update(kw)
    return rec


class TestAccountState:
    def test_el_is_product(self):
        assert AccountState("a", P, 0.02, 100.0, 0.5).el == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("kw", [dict(pd=1.2), dict(pd=-0.1), dict(lgd=1.01), dict(ead=-1.0),
                                    dict(ead=float("inf")), dict(pd=float("nan"))])
    def test_bounds(self, kw):
        args = dict(pd=0.1, ead=1.0, lgd=0.5) | kw
        with pytest.raises(FieldOutOfRange):
            AccountState("a", P, **args)

    def test_npl_needs_default_date(self):
        with pytest.raises(MissingDefaultDate):
            AccountState("a", N, 1.0, 1.0, 0.5)

    def test_npl_needs_unit_pd(self):
        with pytest.raises(FieldOutOfRange):
            AccountState("a", N, 0.9, 1.0, 0.5, default_date=D0)

    def test_lifetime_must_dominate(self):
        with pytest.raises(FieldOutOfRange):
            AccountState("a", P, 0.1, 10.0, 0.5, lifetime_el=0.4)
        assert AccountState("a", P, 0.1, 10.0, 0.5, lifetime_el=0.5).lifetime_el == 0.5

    def test_unknown_segment_tag(self):
        with pytest.raises(FieldOutOfRange):
            AccountState("a", P, 0.1, 1.0, 0.5, segments={"region": "x"})


class TestSnapshot:
    def test_duplicate_rejected(self):
        a = AccountState("a", P, 0.1, 1.0, 0.5)
        with pytest.raises(DuplicateAccount):
            Snapshot(D0, [a, a])

    def test_iteration_sorted_and_immutable(self):
        s = Snapshot(D0, [AccountState(x, P, 0.1, 1.0, 0.5) for x in "cab"])
        assert s.ids == ("a", "b", "c")
        assert [a.account_id for a in s] == ["a", "b", "c"]
        with pytest.raises(TypeError):
            s.accounts["d"] = s.get("a")


class TestLoadSnapshot:
    def test_ten_thousand_records(self):
        recs = [record(f"C{i:05d}") for i in range(10_000)]
        snap = load_snapshot(recs)
        assert len(snap) == 10_000
        assert snap.as_of == D0

    def test_empty_records(self):
        snap = load_snapshot([], as_of=D0)
        assert len(snap) == 0

    def test_pd_out_of_range_names_row(self):
        recs = [record("x1"), record("x2", pd="1.2")]
        with pytest.raises(FieldOutOfRange, match=r"row 2.*x2.*pd=1\.2"):
            load_snapshot(recs)

    def test_duplicate_ids(self):
        with pytest.raises(DuplicateAccount):
            load_snapshot([record("x"), record("x")])

    def test_npl_without_date(self):
        with pytest.raises(MissingDefaultDate):
            load_snapshot([record("x", status="N", pd="1")])

    def test_optional_fields_and_tags(self):
        snap = load_snapshot([record("x", status="N", pd="1", default_date="2019-01-01",
                                     years_in_default="1", rating_grade="")])
        a = snap.get("x")
        assert a.default_date == dt.date(2019, 1, 1)
        assert a.segment("years_in_default") == "1"
        assert a.segment("rating_grade") == ""


def _ledger(bop, eop, events=None):
    return PeriodLedger(Snapshot(D0, bop), Snapshot(D1, eop), PeriodEvents(events or {}))


class TestClassification:
    def test_case1_year2_new_defaults(self, cases):
        ts = classify_transitions(cases[1][1])
        assert len(ts.new_npl) == 200
        assert len(ts.old_npl) == 0
        assert len(ts.closed_performing) == 9_800

    def test_identical_snapshots(self):
        accs = [AccountState(f"a{i}", P, 0.1, 1.0, 0.5) for i in range(5)]
        ts = classify_transitions(_ledger(accs, accs))
        assert ts.counts()["performing_both"] == 5
        assert sum(ts.counts().values()) == 5

    def test_worked_out_npl_is_old(self):
        a = AccountState("a", N, 1.0, 80.0, 0.4, default_date=dt.date(2019, 1, 1))
        ts = classify_transitions(_ledger([a], [], {"a": AccountEvents(write_off=80.0)}))
        assert ts.class_of("a") is Transition.OLD_NPL

    def test_direct_write_off_forces_new_default(self):
        a = AccountState("a", P, 0.1, 10.0, 0.5)
        ts = classify_transitions(_ledger([a], [], {"a": AccountEvents(write_off=3.0)}))
        assert ts.class_of("a") is Transition.NEW_NPL

    def test_cure_new_business_and_closed(self):
        cured_b = AccountState("c", N, 1.0, 5.0, 0.5, default_date=dt.date(2019, 1, 1))
        cured_e = AccountState("c", P, 0.2, 5.0, 0.5)
        closed = AccountState("x", P, 0.1, 1.0, 0.5)
        fresh = AccountState("n", P, 0.1, 1.0, 0.5)
        fresh_npl = AccountState("m", N, 1.0, 1.0, 0.5, default_date=dt.date(2021, 6, 1))
        ts = classify_transitions(_ledger([cured_b, closed], [cured_e, fresh, fresh_npl]))
        assert ts.class_of("c") is Transition.CURED
        assert ts.class_of("x") is Transition.CLOSED_PERFORMING
        assert ts.class_of("n") is Transition.NEW_BUSINESS
        assert ts.class_of("m") is Transition.NEW_NPL

    def test_default_after_eop(self):
        a = AccountState("a", N, 1.0, 1.0, 0.5, default_date=dt.date(2022, 3, 1))
        with pytest.raises(InconsistentDates):
            classify_transitions(_ledger([], [a]))

    def test_at_default_data_only_on_new_defaults(self):
        a = AccountState("a", P, 0.1, 1.0, 0.5)
        with pytest.raises(InconsistentEvents):
            classify_transitions(_ledger([a], [a], {"a": AccountEvents(at_default_ead=1.0)}))


class TestPeriodLedger:
    def test_dates_must_increase(self):
        with pytest.raises(NonMonotoneDates):
            PeriodLedger(Snapshot(D1), Snapshot(D0))

    def test_events_must_reference_known_accounts(self):
        with pytest.raises(InconsistentEvents):
            _ledger([], [], {"ghost": AccountEvents(write_off=1.0)})

    def test_negative_write_off(self):
        with pytest.raises(FieldOutOfRange):
            AccountEvents(write_off=-1.0)

    def test_provisions_non_negative(self):
        with pytest.raises(FieldOutOfRange):
            ProvisionBalances(llp_bop=-1.0)

    def test_lcp_range(self):
        with pytest.raises(FieldOutOfRange):
            PeriodLedger(Snapshot(D0), Snapshot(D1), loss_confirmation_months=13)


class TestPairPeriods:
    def test_five_snapshots_four_ledgers(self):
        snaps = [Snapshot(dt.date(2000 + k, 12, 31)) for k in range(5)]
        chain = pair_periods(snaps)
        assert len(chain) == 4
        assert all(a.eop is b.bop for a, b in zip(chain, chain[1:]))

    def test_case1_timeline(self, cases):
        chain = cases[1]
        assert len(chain) == 4
        assert [lg.eop.as_of.year for lg in chain] == [2001, 2002, 2003, 2004]

    def test_single_snapshot(self):
        assert pair_periods([Snapshot(D0)]) == []

    def test_non_monotone(self):
        with pytest.raises(NonMonotoneDates):
            pair_periods([Snapshot(D1), Snapshot(D0)])


@settings(max_examples=60, deadline=None)
@given(ledgers(max_accounts=40))
def test_partition_disjoint_and_exhaustive(ledger):
    ts = classify_transitions(ledger)
    classes = [ts.of(t) for t in Transition]
    assert sum(len(c) for c in classes) == len(set().union(*classes))
    assert set().union(*classes) == set(ledger.bop.ids) | set(ledger.eop.ids)


@pytest.mark.parametrize("seed", range(5))
def test_partition_on_random_ledgers(seed):
    ledger = random_ledger(seed, 800)
    ts = classify_transitions(ledger)
    counts = ts.counts()
    assert sum(counts.values()) == len(ledger.account_ids())
    assert all(v > 0 for v in counts.values())


@pytest.mark.parametrize("seed", range(3))
def test_classification_ignores_input_order(seed):
    ledger = random_ledger(seed, 300)
    rng = random.Random(seed)
    bop, eop = list(ledger.bop), list(ledger.eop)
    rng.shuffle(bop)
    rng.shuffle(eop)
    shuffled = PeriodLedger(Snapshot(ledger.bop.as_of, bop), Snapshot(ledger.eop.as_of, eop),
                            ledger.events, ledger.provisions, ledger.discount_rate)
    assert classify_transitions(shuffled) == classify_transitions(ledger)


def test_classification_is_deterministic():
    ledger = random_ledger(11, 500)
    assert classify_transitions(ledger) == classify_transitions(ledger)
