"""Impact of Risk and its accounting constituents.

Impact of Risk (IoR) is the period's credit-risk capital consumption:
change in loan loss provisions plus write-offs plus change in IBNR plus
change in shortfall. It telescopes to ``EL_eop - EL_bop + write_off``, which
is the route used when no provision data is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .elcore import status_split
from .errors import check_identity
from .ledger import PeriodLedger, ProvisionBalances, Snapshot


def llp_expenses(p: ProvisionBalances, total_wo: float) -> float:
    return p.llp_eop - p.llp_bop + total_wo


def ibnr_expenses(p: ProvisionBalances) -> float:
    return p.ibnr_eop - p.ibnr_bop


def ibnr_from_lcp(el_pl: float, months: int) -> float:
    """IBNR as performing EL times the loss confirmation period in years."""
    if not 0 <= months <= 12:
        raise ValueError(f"loss confirmation period {months} months outside [0,12]")
    return el_pl * months / 12


def shortfall(el_total: float, p: ProvisionBalances, at: Literal["BOP", "EOP"]) -> float:
    """EL minus provisions at one end of the period; negative means excess."""
    if at == "BOP":
        return el_total - p.llp_bop - p.ibnr_bop
    if at == "EOP":
        return el_total - p.llp_eop - p.ibnr_eop
    raise ValueError(f"at must be 'BOP' or 'EOP', got {at!r}")


@dataclass(frozen=True)
class CapitalFlows:
    el_bop: float
    el_eop: float
    el_pl_bop: float
    el_pl_eop: float
    el_npl_bop: float
    el_npl_eop: float
    total_write_off: float
    ior: float
    ior_npl: float
    ior_life_pl: float | None = None
    el_delta_pl_bop: float | None = None
    el_delta_pl_eop: float | None = None
    el_life_pl_bop: float | None = None
    el_life_pl_eop: float | None = None
    # accounting route; None when the ledger carries no provisions
    llp_bop: float | None = None
    llp_eop: float | None = None
    llp_expenses: float | None = None
    ibnr_expenses: float | None = None
    sf_bop: float | None = None
    sf_eop: float | None = None
    sf_impact: float | None = None
    ior_accounting: float | None = None
    ibnr_lcp_eop: float | None = None

    @property
    def provisions_available(self) -> bool:
        return self.ior_accounting is not None

    @property
    def cost_of_risk(self) -> float | None:
        """Provision-based risk expenses (LLP route only)."""
        return self.llp_expenses

    @property
    def excess_bop(self) -> bool:
        return self.sf_bop is not None and self.sf_bop < 0.0

    @property
    def excess_eop(self) -> bool:
        return self.sf_eop is not None and self.sf_eop < 0.0


def lifetime_pl_el(s: Snapshot) -> tuple[float, float] | None:
    """(lifetime EL, lifetime minus 12-month EL) on performing accounts.

    Accounts without a lifetime figure contribute their 12-month EL, i.e.
    lifetime EL may be applied to part of the portfolio only. Returns None
    when no performing account carries a lifetime figure.
    """
    life, delta = [], []
    seen = False
    for a in s:
        if not a.performing:
            continue
        el = a.el
        if a.lifetime_el is not None:
            seen = True
            life.append(a.lifetime_el)
            delta.append(a.lifetime_el - el)
        else:
            life.append(el)
    if not seen:
        return None
    return math.fsum(life), math.fsum(delta)


def impact_of_risk(ledger: PeriodLedger, *, tol: float = 1e-9) -> CapitalFlows:
    """Compute IoR by the EL route and, given provisions, by the accounting route.

    Raises IdentityBreach when both routes are available and disagree, which
    happens when reported shortfall figures do not match EL minus provisions.
    """
    bop, eop = ledger.bop, ledger.eop
    pl_b, npl_b = status_split(bop)
    pl_e, npl_e = status_split(eop)
    pl_bop, npl_bop, pl_eop, npl_eop = pl_b.el, npl_b.el, pl_e.el, npl_e.el
    el_bop = math.fsum([pl_bop, npl_bop])
    el_eop = math.fsum([pl_eop, npl_eop])
    wo = ledger.events.total_write_off()

    ior = el_eop - el_bop + wo
    ior_npl = npl_eop - npl_bop + wo
    fields: dict = {}

    life_bop = lifetime_pl_el(bop)
    life_eop = lifetime_pl_el(eop)
    if life_bop is not None or life_eop is not None:
        lb, db = life_bop if life_bop is not None else (pl_bop, 0.0)
        le, de = life_eop if life_eop is not None else (pl_eop, 0.0)
        ior_life = math.fsum([le, npl_eop, -lb, -npl_bop, wo])
        check_identity("lifetime-EL IoR vs 12-month IoR plus delta", ior_life - ior, de - db,
                       scale=abs(le) + abs(lb) + abs(el_bop) + abs(el_eop) + wo, tol=tol)
        fields.update(ior_life_pl=ior_life, el_delta_pl_bop=db, el_delta_pl_eop=de,
                      el_life_pl_bop=lb, el_life_pl_eop=le)

    p = ledger.provisions
    if p is not None:
        sf_b = p.sf_bop if p.sf_bop is not None else shortfall(el_bop, p, "BOP")
        sf_e = p.sf_eop if p.sf_eop is not None else shortfall(el_eop, p, "EOP")
        llp_x = llp_expenses(p, wo)
        ibnr_x = ibnr_expenses(p)
        sf_x = sf_e - sf_b
        ior_acc = llp_x + ibnr_x + sf_x
        check_identity("IoR accounting route vs EL route", ior_acc, ior,
                       scale=abs(el_bop) + abs(el_eop) + wo + p.llp_bop + p.llp_eop
                       + p.ibnr_bop + p.ibnr_eop, tol=tol)
        fields.update(llp_bop=p.llp_bop, llp_eop=p.llp_eop, llp_expenses=llp_x,
                      ibnr_expenses=ibnr_x, sf_bop=sf_b, sf_eop=sf_e, sf_impact=sf_x,
                      ior_accounting=ior_acc)

    fields["ibnr_lcp_eop"] = ibnr_from_lcp(pl_eop, ledger.loss_confirmation_months)
    return CapitalFlows(
        el_bop=el_bop, el_eop=el_eop, el_pl_bop=pl_bop, el_pl_eop=pl_eop,
        el_npl_bop=npl_bop, el_npl_eop=npl_eop, total_write_off=wo,
        ior=ior, ior_npl=ior_npl, **fields,
    )
