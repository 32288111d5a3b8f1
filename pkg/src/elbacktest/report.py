"""Serialization of decomposition reports.

Amounts and ratios are rendered as decimal strings with six fractional
digits so that golden files do not depend on platform float formatting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from .backtest import DecompositionReport
from .errors import check_identity
from .ior import CapitalFlows

SUMMARY_FIELDS = (
    "ior", "ior_check", "el_pl_bop", "el_pl_eop", "el_npl_bop", "pl_backtest", "npl_backtest",
    "model_change", "recoflow", "discount_rate", "discount_bias", "er_npl_bop",
    "rdf", "edf", "pd_impact", "rd_realized", "rd_expected", "rd_impact", "conservativity_c",
    "delta_pd", "delta_ead", "delta_lgd", "closed_performing_el",
)
CAPITAL_FIELDS = (
    "el_bop", "el_eop", "el_pl_bop", "el_pl_eop", "el_npl_bop", "el_npl_eop", "total_write_off",
    "ior", "ior_npl", "ior_life_pl", "el_delta_pl_bop", "el_delta_pl_eop", "el_life_pl_bop",
    "el_life_pl_eop", "llp_bop", "llp_eop", "llp_expenses", "ibnr_expenses", "sf_bop", "sf_eop",
    "sf_impact", "ior_accounting", "ibnr_lcp_eop",
)
ACCOUNT_COLUMNS = ("account_id", "transition", "bop_el", "eop_el", "write_off", "recovery",
                   "pl_backtest", "npl_backtest", "recoflow", "model_change")
SEGMENT_COLUMNS = ("dimension", "segment", "ior", "el_pl_eop", "pl_backtest", "npl_backtest",
                   "recoflow", "model_change", "rdf", "edf", "conservativity_c")


def fmt(value: float | None) -> str | None:
    if value is None:
        return None
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _flags(report: DecompositionReport) -> dict[str, bool]:
    cap = report.capital
    return {
        "derecognized_as_repaid": report.transition_counts.get("closed_performing", 0) > 0,
        "shortfall_excess_bop": cap.excess_bop,
        "shortfall_excess_eop": cap.excess_eop,
        "provisions_available": cap.provisions_available,
        "deltas_available": report.has_deltas,
    }


def _summary(report: DecompositionReport) -> dict[str, Any]:
    out: dict[str, Any] = {
        "bop_as_of": report.bop_as_of,
        "eop_as_of": report.eop_as_of,
    }
    out.update({name: fmt(getattr(report, name)) for name in SUMMARY_FIELDS})
    return out


def report_to_dict(report: DecompositionReport, *, per_account: bool = True) -> dict[str, Any]:
    doc = _summary(report)
    doc["capital"] = capital_to_dict(report.capital)
    doc["transition_counts"] = dict(report.transition_counts)
    doc["flags"] = _flags(report)
    doc["per_segment"] = {
        dim: {value: _summary(sub) for value, sub in rows.items()}
        for dim, rows in report.per_segment.items()
    }
    if per_account:
        doc["per_account"] = [
            {col: (getattr(r, col).value if col == "transition" else
                   r.account_id if col == "account_id" else fmt(getattr(r, col)))
             for col in ACCOUNT_COLUMNS}
            for r in report.per_account
        ]
    return doc


def capital_to_dict(cap: CapitalFlows) -> dict[str, str | None]:
    return {name: fmt(getattr(cap, name)) for name in CAPITAL_FIELDS}


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_report_json(report: DecompositionReport, path: str | Path) -> None:
    Path(path).write_text(dumps(report_to_dict(report)), encoding="utf-8")


def csv_text(columns: Sequence[str], rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def account_rows(doc: dict[str, Any]) -> list[dict[str, Any]]:
    return list(doc.get("per_account", []))


def segment_rows(doc: dict[str, Any]) -> list[dict[str, Any]]:
    rows = []
    for dim, values in doc.get("per_segment", {}).items():
        for value, summary in values.items():
            rows.append({"dimension": dim, "segment": value, **summary})
    return rows


def write_report_csv(doc: dict[str, Any], directory: str | Path) -> list[Path]:
    """Flat tables: summary (key/value), per-account and per-segment."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    summary = [{"field": k, "value": v} for k, v in doc.items()
               if not isinstance(v, (dict, list))]
    summary += [{"field": f"capital.{k}", "value": v} for k, v in doc.get("capital", {}).items()]
    files = {
        "summary.csv": csv_text(("field", "value"), summary),
        "per_account.csv": csv_text(ACCOUNT_COLUMNS, account_rows(doc)),
        "per_segment.csv": csv_text(SEGMENT_COLUMNS, segment_rows(doc)),
    }
    paths = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths


def render_summary(doc: dict[str, Any]) -> str:
    """One-screen text summary of a report document."""
    def v(key: str) -> str:
        value = doc.get(key)
        return "n/a" if value is None else str(value)

    lines = [
        f"period            {doc.get('bop_as_of')} -> {doc.get('eop_as_of')}",
        f"Impact of Risk    {v('ior')}",
        f"  EL_PL (EOP)     {v('el_pl_eop')}",
        f"  PL Backtest     {v('pl_backtest')}",
        f"  NPL Backtest    {v('npl_backtest')}",
    ]
    if doc.get("model_change") not in (None, "0.000000"):
        lines.append(f"  model change    {v('model_change')}")
    lines += [
        f"conservativity c  {v('conservativity_c')}",
        f"RecoFlow          {v('recoflow')}",
        f"discount bias     {v('discount_bias')}",
    ]
    if doc.get("delta_pd") is not None:
        lines.append(f"delta PD/EAD/LGD  {v('delta_pd')} / {v('delta_ead')} / {v('delta_lgd')}")
    cap = doc.get("capital", {})
    if cap.get("ior_accounting") is not None:
        lines.append(f"IoR (accounting)  {cap['ior_accounting']}  "
                     f"[LLP {cap['llp_expenses']}, IBNR {cap['ibnr_expenses']}, SF {cap['sf_impact']}]")
    flags = doc.get("flags", {})
    if flags.get("shortfall_excess_eop"):
        lines.append("note: EOP shortfall is negative (excess)")
    if flags.get("derecognized_as_repaid"):
        counts = doc.get("transition_counts", {})
        lines.append(f"note: {counts.get('closed_performing', 0)} accounts left the book "
                     f"without write-off and were treated as repaid")
    return "\n".join(lines)


def chain_reconciliation(reports: Sequence[DecompositionReport], *, tol: float = 1e-9
                         ) -> dict[str, Any]:
    """Per-period and cumulative IoR against write-offs (and cost of risk).

    Cumulative IoR always equals ``EL_last - EL_first + cumulative write-off``;
    on a fully liquidated chain this reduces to cumulative write-off. Raises
    IdentityBreach when either telescoping sum fails.
    """
    rows = []
    ior_terms, wo_terms, cor_terms = [], [], []
    has_cor = all(r.capital.cost_of_risk is not None for r in reports)
    for r in reports:
        cap = r.capital
        ior_terms.append(cap.ior)
        wo_terms.append(cap.total_write_off)
        if has_cor:
            cor_terms.append(cap.cost_of_risk)
        rows.append({
            "bop_as_of": r.bop_as_of, "eop_as_of": r.eop_as_of,
            "ior": fmt(cap.ior), "write_off": fmt(cap.total_write_off),
            "cost_of_risk": fmt(cap.cost_of_risk),
            "pl_backtest": fmt(r.pl_backtest), "npl_backtest": fmt(r.npl_backtest),
            "el_pl_eop": fmt(r.el_pl_eop),
            "cum_ior": fmt(math.fsum(ior_terms)), "cum_write_off": fmt(math.fsum(wo_terms)),
            "cum_cost_of_risk": fmt(math.fsum(cor_terms)) if has_cor else None,
        })
    total_ior, total_wo = math.fsum(ior_terms), math.fsum(wo_terms)
    el_first = reports[0].capital.el_bop if reports else 0.0
    el_last = reports[-1].capital.el_eop if reports else 0.0
    scale = total_wo + el_first + el_last + math.fsum(abs(x) for x in ior_terms)
    check_identity("cumulative IoR vs EL change plus write-off", total_ior,
                   math.fsum([el_last, -el_first, total_wo]), scale=scale, tol=tol)
    result = {
        "periods": rows,
        "cumulative_ior": fmt(total_ior),
        "cumulative_write_off": fmt(total_wo),
        "el_first": fmt(el_first),
        "el_last": fmt(el_last),
        "liquidated": el_first == 0.0 and el_last == 0.0,
    }
    if has_cor and reports:
        for prev, nxt in zip(reports, reports[1:]):
            check_identity("LLP continuity between periods", prev.capital.llp_eop,
                           nxt.capital.llp_bop, scale=prev.capital.llp_eop, tol=tol)
        total_cor = math.fsum(cor_terms)
        llp_first, llp_last = reports[0].capital.llp_bop, reports[-1].capital.llp_eop
        check_identity("cumulative cost of risk vs LLP change plus write-off", total_cor,
                       math.fsum([llp_last, -llp_first, total_wo]),
                       scale=total_wo + llp_first + llp_last + math.fsum(abs(x) for x in cor_terms),
                       tol=tol)
        result["cumulative_cost_of_risk"] = fmt(total_cor)
    return result


def chain_to_dict(reports: Sequence[DecompositionReport], *, tol: float = 1e-9,
                  per_account: bool = False) -> dict[str, Any]:
    return {
        "reconciliation": chain_reconciliation(reports, tol=tol),
        "reports": [report_to_dict(r, per_account=per_account) for r in reports],
    }
