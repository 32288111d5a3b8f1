"""Expected loss, exposure at risk and risk density aggregates."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from .errors import ZeroExposure
from .ledger import AccountState, Snapshot

AccountFilter = Callable[[AccountState], bool]


def account_el(a: AccountState) -> float:
    """PD * EAD * LGD; for a defaulted account PD is 1 so this is EAD * LGD."""
    return a.pd * a.ead * a.lgd


def account_ear(a: AccountState) -> float:
    return a.ead * a.lgd


@dataclass(frozen=True)
class ElAggregate:
    el: float = 0.0
    ead_total: float = 0.0
    ear: float = 0.0
    er: float = 0.0
    count: int = 0

    def scaled(self, factor: float) -> ElAggregate:
        return ElAggregate(self.el * factor, self.ead_total * factor, self.ear * factor,
                           self.er * factor, self.count)


def aggregate_accounts(accounts: Iterable[AccountState]) -> ElAggregate:
    """Aggregate already-selected accounts; callers pass them in id order."""
    els, eads, ears = [], [], []
    for a in accounts:
        els.append(account_el(a))
        eads.append(a.ead)
        ears.append(account_ear(a))
    el = math.fsum(els)
    ead = math.fsum(eads)
    return ElAggregate(el=el, ead_total=ead, ear=math.fsum(ears), er=ead - el, count=len(els))


def aggregate_el(s: Snapshot, filter: AccountFilter | None = None) -> ElAggregate:
    """Sum EL, EAD, EAR and ER over the accounts of ``s`` matching ``filter``.

    Summation runs in ascending account-id order with correctly rounded
    (``math.fsum``) accumulation, so results do not depend on input order.
    """
    return aggregate_accounts(a for a in s if filter is None or filter(a))


def status_split(s: Snapshot) -> tuple[ElAggregate, ElAggregate]:
    """(performing, non-performing) aggregates of ``s`` in a single pass."""
    pl: list[AccountState] = []
    npl: list[AccountState] = []
    for a in s:
        (pl if a.performing else npl).append(a)
    return aggregate_accounts(pl), aggregate_accounts(npl)


def performing(a: AccountState) -> bool:
    return a.performing


def non_performing(a: AccountState) -> bool:
    return not a.performing


def segment_filter(dimension: str, value: str) -> AccountFilter:
    def match(a: AccountState) -> bool:
        return a.segment(dimension) == value

    return match


def risk_density(agg: ElAggregate) -> float:
    """EL per unit of EAD."""
    if agg.ead_total <= 0.0:
        raise ZeroExposure("risk density undefined for zero exposure")
    return agg.el / agg.ead_total
