"""Decomposition of Impact of Risk into EL premium, PL Backtest and NPL Backtest.

For one period::

    IoR = EL_PL(eop) + PL Backtest + NPL Backtest

    PL Backtest  = EL_newNPL(eop) + wo_newNPL - EL_PL(bop)
    NPL Backtest = EL_oldNPL(eop) + wo_oldNPL - EL_NPL(bop)

Positive backtests are adverse: realized losses exceed what the BOP
parameters predicted. Write-offs on accounts that are neither new nor old
defaults (performing at EOP, new business) are booked to the PL side, and
write-offs on cured accounts to the NPL side, so the partition of the total
write-off is exhaustive.

When an account carries a restated BOP EL (a model change simulated per BOP),
both backtests use the restated figure and the difference to the reported
BOP EL is carried as ``model_change``; the identity then reads
``IoR = EL_PL(eop) + PL + NPL + model_change``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import MissingAtDefaultData, UnknownDimension, ZeroExposure, check_identity
from .ior import CapitalFlows, impact_of_risk
from .ledger import (
    PL_SIDE,
    SEGMENT_DIMENSIONS,
    PeriodLedger,
    Transition,
    TransitionSet,
    classify_transitions,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class AccountContribution:
    account_id: str
    transition: Transition
    bop_el: float          # effective BOP EL (restated when provided)
    eop_el: float
    write_off: float
    recovery: float
    pl_backtest: float
    npl_backtest: float
    recoflow: float
    model_change: float


@dataclass(frozen=True)
class _Components:
    """Per-account contributions plus the portfolio sums built from them."""

    accounts: tuple[AccountContribution, ...]
    el_pl_bop: float            # effective
    el_npl_bop: float           # effective
    el_pl_bop_reported: float
    el_npl_bop_reported: float
    el_pl_eop: float
    el_new_npl_eop: float
    el_old_npl_eop: float
    wo_pl: float
    wo_npl: float
    ead_pl_bop: float
    ear_pl_bop: float
    ead_npl_bop: float
    ead_old_npl_eop: float
    pl_backtest: float
    npl_backtest: float
    recoflow: float
    model_change_pl: float
    model_change_npl: float
    closed_performing_el: float

    @property
    def model_change(self) -> float:
        return self.model_change_pl + self.model_change_npl

    @property
    def er_npl_bop(self) -> float:
        return self.ead_npl_bop - self.el_npl_bop

    @property
    def realized_pl_inflow(self) -> float:
        return self.el_new_npl_eop + self.wo_pl


def _components(ledger: PeriodLedger, ts: TransitionSet) -> _Components:
    cls = ts.mapping()
    bop, eop, events = ledger.bop, ledger.eop, ledger.events
    rows: list[AccountContribution] = []
    acc: dict[str, list[float]] = defaultdict(list)
    for aid in ledger.account_ids():
        t = cls[aid]
        b, e, ev = bop.get(aid), eop.get(aid), events[aid]
        bop_el_reported = b.el if b is not None else 0.0
        bop_el = bop_el_reported
        if b is not None and ev.restated_bop_el is not None:
            bop_el = ev.restated_bop_el
        eop_el = e.el if e is not None else 0.0
        wo = ev.write_off
        pl = npl = reco = 0.0
        change = bop_el - bop_el_reported
        if b is not None:
            if b.performing:
                pl -= bop_el
                acc["el_pl_bop"].append(bop_el)
                acc["el_pl_bop_r"].append(bop_el_reported)
                acc["ead_pl_bop"].append(b.ead)
                acc["ear_pl_bop"].append(b.ead * b.lgd)
                acc["mc_pl"].append(change)
                if t is Transition.CLOSED_PERFORMING:
                    acc["closed"].append(bop_el_reported)
            else:
                npl -= bop_el
                reco -= b.ead - bop_el
                acc["el_npl_bop"].append(bop_el)
                acc["el_npl_bop_r"].append(bop_el_reported)
                acc["ead_npl_bop"].append(b.ead)
                acc["mc_npl"].append(change)
        if e is not None:
            if e.performing:
                acc["el_pl_eop"].append(eop_el)
            elif t is Transition.NEW_NPL:
                pl += eop_el
                acc["el_new"].append(eop_el)
            else:
                npl += eop_el
                reco += e.ead - eop_el
                acc["el_old"].append(eop_el)
                acc["ead_old"].append(e.ead)
        if t in PL_SIDE:
            pl += wo
            acc["wo_pl"].append(wo)
        else:
            npl += wo
            acc["wo_npl"].append(wo)
        rows.append(AccountContribution(aid, t, bop_el, eop_el, wo, ev.recovery, pl, npl, reco, change))

    def s(key: str) -> float:
        return math.fsum(acc.get(key, ()))

    # totals come from the aggregates, not from summing the per-account rows,
    # so that exactly offsetting aggregates give exactly zero
    pl_total = math.fsum([s("el_new"), s("wo_pl"), -s("el_pl_bop")])
    npl_total = math.fsum([s("el_old"), s("wo_npl"), -s("el_npl_bop")])
    reco_total = math.fsum([s("ead_old"), -s("el_old"), -s("ead_npl_bop"), s("el_npl_bop")])

    return _Components(
        accounts=tuple(rows),
        el_pl_bop=s("el_pl_bop"), el_npl_bop=s("el_npl_bop"),
        el_pl_bop_reported=s("el_pl_bop_r"), el_npl_bop_reported=s("el_npl_bop_r"),
        el_pl_eop=s("el_pl_eop"), el_new_npl_eop=s("el_new"), el_old_npl_eop=s("el_old"),
        wo_pl=s("wo_pl"), wo_npl=s("wo_npl"),
        ead_pl_bop=s("ead_pl_bop"), ear_pl_bop=s("ear_pl_bop"),
        ead_npl_bop=s("ead_npl_bop"), ead_old_npl_eop=s("ead_old"),
        pl_backtest=pl_total, npl_backtest=npl_total, recoflow=reco_total,
        model_change_pl=s("mc_pl"), model_change_npl=s("mc_npl"),
        closed_performing_el=s("closed"),
    )


def pl_backtest(ledger: PeriodLedger, transitions: TransitionSet | None = None
                ) -> tuple[float, dict[str, float]]:
    """PL Backtest total and its per-account contributions."""
    c = _components(ledger, transitions or classify_transitions(ledger))
    return c.pl_backtest, {r.account_id: r.pl_backtest for r in c.accounts}


def npl_backtest(ledger: PeriodLedger, transitions: TransitionSet | None = None
                 ) -> tuple[float, dict[str, float]]:
    """NPL Backtest total and its per-account contributions."""
    c = _components(ledger, transitions or classify_transitions(ledger))
    return c.npl_backtest, {r.account_id: r.npl_backtest for r in c.accounts}


def _check_ead_movement(c: _Components, tol: float) -> None:
    check_identity(
        "NPL EAD movement",
        math.fsum([c.ead_old_npl_eop, c.wo_npl]),
        math.fsum([c.ead_npl_bop, c.npl_backtest, c.recoflow]),
        scale=c.ead_old_npl_eop + c.wo_npl + c.ead_npl_bop + c.el_npl_bop + c.el_old_npl_eop,
        tol=tol,
    )


def recoflow(ledger: PeriodLedger, transitions: TransitionSet | None = None,
             *, tol: float = DEFAULT_TOL) -> float:
    """Change in expected discounted recoveries (EAD - EL) on the old NPL stock.

    Negative values mean the stock of non-performing net receivables is
    shrinking. The NPL EAD-movement identity is asserted on the way out.
    """
    c = _components(ledger, transitions or classify_transitions(ledger))
    _check_ead_movement(c, tol)
    return c.recoflow


def _er_npl_bop(ledger: PeriodLedger) -> float:
    ead, el = [], []
    for a in ledger.bop:
        if a.performing:
            continue
        restated = ledger.events[a.account_id].restated_bop_el
        ead.append(a.ead)
        el.append(a.el if restated is None else restated)
    return math.fsum(ead) - math.fsum(el)


def discount_bias(ledger: PeriodLedger) -> float:
    """Expected NPL Backtest when recoveries arrive exactly as discounted in the LGD."""
    return -ledger.discount_rate * _er_npl_bop(ledger)


def estimate_conservativity(pl_backtest: float, el_pl_bop: float) -> float:
    """Factor c with ``PL Backtest = -EL_PL(bop) * c``; c > 0 means conservative PDs."""
    if el_pl_bop <= 0.0:
        raise ZeroExposure("conservativity undefined for zero performing EL")
    return -pl_backtest / el_pl_bop


@dataclass(frozen=True)
class FrequencyView:
    rdf: float
    edf: float
    pd_impact: float
    rd_realized: float
    rd_expected: float
    rd_impact: float


def _frequency_view(c: _Components) -> FrequencyView:
    if c.ear_pl_bop <= 0.0:
        raise ZeroExposure("no performing exposure at risk at BOP")
    if c.ead_pl_bop <= 0.0:
        raise ZeroExposure("no performing exposure at BOP")
    realized = c.realized_pl_inflow
    rdf = realized / c.ear_pl_bop
    edf = c.el_pl_bop / c.ear_pl_bop
    rrd = realized / c.ead_pl_bop
    erd = c.el_pl_bop / c.ead_pl_bop
    return FrequencyView(rdf, edf, c.pl_backtest / c.ear_pl_bop, rrd, erd, c.pl_backtest / c.ead_pl_bop)


def default_frequency_view(ledger: PeriodLedger, transitions: TransitionSet | None = None
                           ) -> FrequencyView:
    """EAR-weighted realized/expected default frequencies and risk densities."""
    return _frequency_view(_components(ledger, transitions or classify_transitions(ledger)))


@dataclass(frozen=True)
class DeltaSplit:
    delta_pd: float
    delta_ead: float
    delta_lgd: float

    @property
    def total(self) -> float:
        return self.delta_pd + self.delta_ead + self.delta_lgd


def _delta_split(ledger: PeriodLedger, ts: TransitionSet, c: _Components) -> DeltaSplit:
    pd_terms, ead_terms, lgd_terms = [], [], []
    for aid in sorted(ts.new_npl):
        ev = ledger.events[aid]
        if ev.at_default_ead is None or ev.at_default_lgd is None:
            raise MissingAtDefaultData(f"new default {aid} lacks at_default_ead/at_default_lgd")
        b, e = ledger.bop.get(aid), ledger.eop.get(aid)
        bop_ear = b.ead * b.lgd if b is not None and b.performing else 0.0
        def_ear = ev.at_default_ead * ev.at_default_lgd
        eop_ear = e.ead * e.lgd if e is not None else 0.0
        pd_terms.append(bop_ear)
        ead_terms.append(def_ear - bop_ear)
        lgd_terms.append(eop_ear + ev.write_off - def_ear)
    # losses written off without a recorded default carry no at-default estimate
    for r in c.accounts:
        if r.transition in PL_SIDE and r.transition is not Transition.NEW_NPL:
            lgd_terms.append(r.write_off)
    return DeltaSplit(
        delta_pd=math.fsum(pd_terms) - c.el_pl_bop,
        delta_ead=math.fsum(ead_terms),
        delta_lgd=math.fsum(lgd_terms),
    )


def delta_decomposition(ledger: PeriodLedger, transitions: TransitionSet | None = None
                        ) -> DeltaSplit:
    """Split the PL Backtest into PD, EAD and LGD effects using at-default data."""
    ts = transitions or classify_transitions(ledger)
    return _delta_split(ledger, ts, _components(ledger, ts))


@dataclass(frozen=True)
class DecompositionReport:
    bop_as_of: str
    eop_as_of: str
    ior: float
    ior_check: float
    el_pl_bop: float
    el_pl_eop: float
    el_npl_bop: float
    pl_backtest: float
    npl_backtest: float
    model_change: float
    recoflow: float
    discount_rate: float
    discount_bias: float
    er_npl_bop: float
    capital: CapitalFlows
    transition_counts: dict[str, int]
    closed_performing_el: float
    rdf: float | None = None
    edf: float | None = None
    pd_impact: float | None = None
    rd_realized: float | None = None
    rd_expected: float | None = None
    rd_impact: float | None = None
    conservativity_c: float | None = None
    delta_pd: float | None = None
    delta_ead: float | None = None
    delta_lgd: float | None = None
    per_account: tuple[AccountContribution, ...] = ()
    per_segment: dict[str, dict[str, DecompositionReport]] = field(default_factory=dict)

    @property
    def ior_npl(self) -> float:
        return self.capital.ior_npl

    @property
    def ior_life_pl(self) -> float | None:
        return self.capital.ior_life_pl

    @property
    def has_deltas(self) -> bool:
        return self.delta_pd is not None


def _segment_key(ledger: PeriodLedger, aid: str, dimension: str) -> str:
    state = ledger.bop.get(aid) or ledger.eop.get(aid)
    return state.segment(dimension)


def segment_partition(ledger: PeriodLedger, dimension: str) -> dict[str, list[str]]:
    """Group account ids by their tag on ``dimension`` (BOP tags take precedence)."""
    if dimension not in SEGMENT_DIMENSIONS:
        raise UnknownDimension(dimension)
    groups: dict[str, list[str]] = defaultdict(list)
    for aid in ledger.account_ids():
        groups[_segment_key(ledger, aid, dimension)].append(aid)
    return dict(sorted(groups.items()))


def decompose_ior(ledger: PeriodLedger, dimensions: Sequence[str] = (), *,
                  tol: float = DEFAULT_TOL) -> DecompositionReport:
    """Full decomposition of one period with every identity asserted.

    Raises IdentityBreach if any two routes to the same quantity disagree by
    more than ``tol`` relative to the gross amounts involved.
    """
    ts = classify_transitions(ledger)
    cap = impact_of_risk(ledger, tol=tol)
    c = _components(ledger, ts)

    gross = cap.el_bop + cap.el_eop + cap.total_write_off
    ior_check = math.fsum([c.el_pl_eop, c.pl_backtest, c.npl_backtest, c.model_change])
    check_identity("IoR decomposition", ior_check, cap.ior, scale=gross, tol=tol)
    check_identity("IoR on NPL-only shortfall",
                   math.fsum([c.el_pl_bop_reported, c.pl_backtest, c.npl_backtest, c.model_change]),
                   cap.ior_npl, scale=gross, tol=tol)
    if cap.ior_life_pl is not None:
        check_identity(
            "IoR with lifetime performing EL",
            math.fsum([c.el_pl_bop_reported, c.pl_backtest, c.npl_backtest, c.model_change,
                       cap.el_life_pl_eop, -cap.el_life_pl_bop]),
            cap.ior_life_pl,
            scale=gross + cap.el_life_pl_eop + cap.el_life_pl_bop, tol=tol,
        )
    _check_ead_movement(c, tol)

    extra: dict = {}
    try:
        fv = _frequency_view(c)
    except ZeroExposure:
        pass
    else:
        extra.update(rdf=fv.rdf, edf=fv.edf, pd_impact=fv.pd_impact, rd_realized=fv.rd_realized,
                     rd_expected=fv.rd_expected, rd_impact=fv.rd_impact)
    if c.el_pl_bop > 0.0:
        extra["conservativity_c"] = estimate_conservativity(c.pl_backtest, c.el_pl_bop)
    try:
        ds = _delta_split(ledger, ts, c)
    except MissingAtDefaultData:
        pass
    else:
        check_identity("PD/EAD/LGD split", ds.total, c.pl_backtest,
                       scale=c.el_pl_bop + c.realized_pl_inflow + abs(ds.delta_pd)
                       + abs(ds.delta_ead) + abs(ds.delta_lgd), tol=tol)
        extra.update(delta_pd=ds.delta_pd, delta_ead=ds.delta_ead, delta_lgd=ds.delta_lgd)

    report = DecompositionReport(
        bop_as_of=ledger.bop.as_of.isoformat(),
        eop_as_of=ledger.eop.as_of.isoformat(),
        ior=cap.ior,
        ior_check=ior_check,
        el_pl_bop=c.el_pl_bop,
        el_pl_eop=c.el_pl_eop,
        el_npl_bop=c.el_npl_bop,
        pl_backtest=c.pl_backtest,
        npl_backtest=c.npl_backtest,
        model_change=c.model_change,
        recoflow=c.recoflow,
        discount_rate=ledger.discount_rate,
        discount_bias=-ledger.discount_rate * c.er_npl_bop,
        er_npl_bop=c.er_npl_bop,
        capital=cap,
        transition_counts=ts.counts(),
        closed_performing_el=c.closed_performing_el,
        per_account=c.accounts,
        **extra,
    )
    if dimensions:
        segments = segment_report(ledger, ts, dimensions, tol=tol, portfolio=report)
        object.__setattr__(report, "per_segment", segments)
    return report


def segment_report(ledger: PeriodLedger, transitions: TransitionSet | None,
                   dimensions: Iterable[str], *, tol: float = DEFAULT_TOL,
                   portfolio: DecompositionReport | None = None,
                   ) -> dict[str, dict[str, DecompositionReport]]:
    """Independent decomposition per segment value, for each dimension.

    Segment totals of IoR and both backtests are checked against the
    portfolio figures.
    """
    dimensions = list(dimensions)
    for dim in dimensions:
        if dim not in SEGMENT_DIMENSIONS:
            raise UnknownDimension(dim)
    if portfolio is None:
        portfolio = decompose_ior(ledger, tol=tol)
    out: dict[str, dict[str, DecompositionReport]] = {}
    for dim in dimensions:
        rows = {
            value: decompose_ior(ledger.restrict(ids), tol=tol)
            for value, ids in segment_partition(ledger, dim).items()
        }
        scale = portfolio.capital.el_bop + portfolio.capital.el_eop + portfolio.capital.total_write_off
        for name in ("ior", "pl_backtest", "npl_backtest", "recoflow", "el_pl_eop"):
            check_identity(f"segment additivity of {name} over {dim}",
                           math.fsum(getattr(r, name) for r in rows.values()),
                           getattr(portfolio, name),
                           scale=scale + portfolio.er_npl_bop + portfolio.capital.el_npl_eop, tol=tol)
        out[dim] = rows
    return out


@dataclass(frozen=True)
class Outliers:
    largest_new_defaults: tuple[AccountContribution, ...]
    npl_shortages: tuple[AccountContribution, ...]
    npl_gains: tuple[AccountContribution, ...]


def rank_outliers(report: DecompositionReport, n: int) -> Outliers:
    """Top-``n`` new defaults by EOP EL and top-``n`` NPL Backtest deviations each way.

    Ties break by ascending account id.
    """
    if n <= 0:
        return Outliers((), (), ())
    rows = report.per_account
    new = sorted((r for r in rows if r.transition is Transition.NEW_NPL),
                 key=lambda r: (-r.eop_el, r.account_id))
    pos = sorted((r for r in rows if r.npl_backtest > 0.0),
                 key=lambda r: (-r.npl_backtest, r.account_id))
    neg = sorted((r for r in rows if r.npl_backtest < 0.0),
                 key=lambda r: (r.npl_backtest, r.account_id))
    return Outliers(tuple(new[:n]), tuple(pos[:n]), tuple(neg[:n]))
