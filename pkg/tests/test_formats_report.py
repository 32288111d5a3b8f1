import csv
import datetime as dt
import json

import pytest

from elbacktest import formats, report
from elbacktest.backtest import decompose_ior
from elbacktest.errors import IdentityBreach, LedgerError
from elbacktest.ledger import ProvisionBalances, Snapshot
from elbacktest.synth import ScenarioConfig, random_ledger, simulate_lifecycle


def test_fmt():
    assert report.fmt(1.0) == "1.000000"
    assert report.fmt(-1e-9) == "0.000000"
    assert report.fmt(-7.02479338842976) == "-7.024793"
    assert report.fmt(None) is None


def test_snapshot_round_trip(tmp_path):
    lg = random_ledger(4, 300)
    path = tmp_path / "s.csv"
    formats.write_snapshot_csv(lg.eop, path)
    assert formats.read_snapshot_csv(path) == lg.eop
    with open(path, newline="") as fh:
        assert tuple(next(csv.reader(fh))) == formats.SNAPSHOT_COLUMNS


def test_empty_snapshot_needs_date(tmp_path):
    path = tmp_path / "empty.csv"
    formats.write_snapshot_csv(Snapshot(dt.date(2020, 1, 1)), path)
    with pytest.raises(LedgerError):
        formats.read_snapshot_csv(path)
    assert len(formats.read_snapshot_csv(path, dt.date(2020, 1, 1))) == 0


def test_events_round_trip(tmp_path):
    lg = random_ledger(5, 300)
    path = tmp_path / "e.csv"
    formats.write_events_csv(lg.events, path)
    assert formats.read_events_csv(path) == lg.events


def test_provisions_csv_and_json(tmp_path):
    p = ProvisionBalances(1.5, 2.5, 3.0, 0.25, sf_bop=-1.0, sf_eop=2.0)
    formats.write_provisions_csv(p, tmp_path / "p.csv")
    assert formats.read_provisions(tmp_path / "p.csv") == p
    (tmp_path / "p.json").write_text(json.dumps({"llp_bop": 1, "llp_eop": 2, "ibnr_bop": 0,
                                                 "ibnr_eop": 0}))
    assert formats.read_provisions(tmp_path / "p.json") == ProvisionBalances(1.0, 2.0, 0.0, 0.0)


def test_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("account_id,status,pd\nx,P,0.1\n")
    with pytest.raises(LedgerError, match="lacks columns"):
        formats.read_snapshot_csv(path)


def test_chain_round_trip(tmp_path):
    chain = simulate_lifecycle(ScenarioConfig(n_accounts=200, pd_true=0.1, seed=8,
                                              recovery_profile=(0.4, 0.2), discount_rate=0.03,
                                              horizon_years=5))
    manifest = formats.write_chain(chain, tmp_path)
    back = formats.read_chain(manifest)
    assert len(back) == len(chain)
    for a, b in zip(chain, back):
        assert (a.bop, a.eop, a.events, a.provisions) == (b.bop, b.eop, b.events, b.provisions)
        assert report.report_to_dict(decompose_ior(a)) == report.report_to_dict(decompose_ior(b))
    assert formats.read_chain(tmp_path)[0].discount_rate == 0.03


def test_report_document(cases):
    doc = report.report_to_dict(decompose_ior(cases[2][1], ["rating_grade"]))
    assert doc["ior"] == "50.000000"
    assert doc["pl_backtest"] == "50.000000"
    assert doc["capital"]["ior_accounting"] == "50.000000"
    assert doc["flags"]["derecognized_as_repaid"] is True
    assert doc["per_segment"]["rating_grade"]["4"]["ior"] == "50.000000"
    assert len(doc["per_account"]) == 10_000
    json.loads(report.dumps(doc))


def test_report_csv(tmp_path, cases):
    doc = report.report_to_dict(decompose_ior(cases[3][3], ["years_in_default"]))
    paths = report.write_report_csv(doc, tmp_path)
    assert sorted(p.name for p in paths) == ["per_account.csv", "per_segment.csv", "summary.csv"]
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert {"field": "npl_backtest", "value": "50.000000"} in rows
    seg = list(csv.DictReader(open(tmp_path / "per_segment.csv")))
    assert [r["segment"] for r in seg] == ["1"]


def test_summary_lines(cases):
    text = report.render_summary(report.report_to_dict(decompose_ior(cases[2][1])))
    assert "Impact of Risk    50.000000" in text
    assert "conservativity c  -1.000000" in text
    assert "RecoFlow" in text and "discount bias" in text


def test_chain_reconciliation(cases):
    recon = report.chain_reconciliation([decompose_ior(lg) for lg in cases[3]])
    assert recon["cumulative_ior"] == recon["cumulative_write_off"] == "100.000000"
    assert recon["cumulative_cost_of_risk"] == "100.000000"
    assert recon["liquidated"] is True
    assert [r["ior"] for r in recon["periods"]] == ["50.000000", "0.000000", "0.000000", "50.000000"]


def test_chain_reconciliation_open_book(cases):
    recon = report.chain_reconciliation([decompose_ior(lg) for lg in cases[1][:2]])
    assert recon["liquidated"] is False
    assert recon["cumulative_ior"] == "100.000000" and recon["el_last"] == "100.000000"


def test_llp_discontinuity_detected(cases):
    reports = [decompose_ior(lg) for lg in cases[1][:2]]
    lg = cases[1][1]
    shifted = ProvisionBalances(lg.provisions.llp_bop + 5.0, lg.provisions.llp_eop + 5.0,
                                lg.provisions.ibnr_bop, lg.provisions.ibnr_eop)
    import dataclasses
    reports[1] = decompose_ior(dataclasses.replace(lg, provisions=shifted))
    with pytest.raises(IdentityBreach, match="LLP continuity"):
        report.chain_reconciliation(reports)
