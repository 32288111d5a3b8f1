"""Domain model: account states, snapshots, period ledgers and transitions.

A period ledger pairs a begin-of-period (BOP) and an end-of-period (EOP)
snapshot with the write-offs and recoveries booked in between. Every
downstream identity depends on splitting the accounts of such a ledger into
six disjoint transition classes, which :func:`classify_transitions` does.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any

from .errors import (
    DuplicateAccount,
    FieldOutOfRange,
    InconsistentDates,
    InconsistentEvents,
    LedgerError,
    MissingDefaultDate,
    NonMonotoneDates,
)

SEGMENT_DIMENSIONS = (
    "pd_model",
    "lgd_model",
    "rating_grade",
    "exposure_band",
    "collateral_type",
    "years_in_default",
)

# slack for lifetime_el >= 12-month EL, which is compared after a float product
_LIFETIME_SLACK = 1e-12
_KNOWN_DIMENSIONS = frozenset(SEGMENT_DIMENSIONS)


class Status(str, enum.Enum):
    PERFORMING = "P"
    NON_PERFORMING = "N"


@dataclass(frozen=True, slots=True)
class AccountState:
    """One account at one as-of date."""

    account_id: str
    status: Status
    pd: float
    ead: float
    lgd: float
    default_date: dt.date | None = None
    lifetime_el: float | None = None
    segments: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        aid = self.account_id
        if not 0.0 <= self.pd <= 1.0:
            raise FieldOutOfRange(f"account {aid}: pd={self.pd!r} outside [0,1]")
        if not 0.0 <= self.lgd <= 1.0:
            raise FieldOutOfRange(f"account {aid}: lgd={self.lgd!r} outside [0,1]")
        if not (self.ead >= 0.0 and math.isfinite(self.ead)):
            raise FieldOutOfRange(f"account {aid}: ead={self.ead!r} must be a finite amount >= 0")
        if self.status is Status.NON_PERFORMING:
            if self.default_date is None:
                raise MissingDefaultDate(f"account {aid}: non-performing without default_date")
            if self.pd != 1.0:
                raise FieldOutOfRange(f"account {aid}: non-performing requires pd=1, got {self.pd!r}")
        if self.lifetime_el is not None:
            el = self.pd * self.ead * self.lgd
            if not (math.isfinite(self.lifetime_el) and self.lifetime_el >= el - _LIFETIME_SLACK * max(1.0, el)):
                raise FieldOutOfRange(
                    f"account {aid}: lifetime_el={self.lifetime_el!r} below 12-month EL {el!r}"
                )
        if not _KNOWN_DIMENSIONS.issuperset(self.segments):
            unknown = set(self.segments) - _KNOWN_DIMENSIONS
            raise FieldOutOfRange(f"account {aid}: unknown segment tags {sorted(unknown)}")

    @property
    def performing(self) -> bool:
        return self.status is Status.PERFORMING

    @property
    def el(self) -> float:
        return self.pd * self.ead * self.lgd

    def segment(self, dimension: str) -> str:
        return self.segments.get(dimension, "")


class Snapshot:
    """Immutable collection of account states at one as-of date."""

    __slots__ = ("_as_of", "_accounts", "_ids")

    def __init__(self, as_of: dt.date, accounts: Iterable[AccountState] = ()):
        table: dict[str, AccountState] = {}
        for acc in accounts:
            if acc.account_id in table:
                raise DuplicateAccount(f"duplicate account_id {acc.account_id!r} in snapshot {as_of}")
            table[acc.account_id] = acc
        self._as_of = as_of
        self._accounts = MappingProxyType(table)
        self._ids = tuple(sorted(table))

    @property
    def as_of(self) -> dt.date:
        return self._as_of

    @property
    def accounts(self) -> Mapping[str, AccountState]:
        return self._accounts

    @property
    def ids(self) -> tuple[str, ...]:
        """Account ids in ascending order; the canonical summation order."""
        return self._ids

    def __len__(self) -> int:
        return len(self._accounts)

    def __contains__(self, account_id: object) -> bool:
        return account_id in self._accounts

    def __iter__(self):
        return (self._accounts[i] for i in self._ids)

    def get(self, account_id: str) -> AccountState | None:
        return self._accounts.get(account_id)

    def restrict(self, ids: Iterable[str]) -> Snapshot:
        keep = set(ids)
        return Snapshot(self._as_of, (a for a in self if a.account_id in keep))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Snapshot):
            return NotImplemented
        return self._as_of == other._as_of and dict(self._accounts) == dict(other._accounts)

    def __repr__(self) -> str:
        return f"Snapshot(as_of={self._as_of.isoformat()}, accounts={len(self)})"


@dataclass(frozen=True, slots=True)
class AccountEvents:
    write_off: float = 0.0
    recovery: float = 0.0
    at_default_ead: float | None = None
    at_default_lgd: float | None = None
    restated_bop_el: float | None = None

    def __post_init__(self) -> None:
        if not self.write_off >= 0.0:
            raise FieldOutOfRange(f"write_off={self.write_off!r} must be >= 0")
        if not self.recovery >= 0.0:
            raise FieldOutOfRange(f"recovery={self.recovery!r} must be >= 0")
        if self.at_default_ead is not None and not self.at_default_ead >= 0.0:
            raise FieldOutOfRange(f"at_default_ead={self.at_default_ead!r} must be >= 0")
        if self.at_default_lgd is not None and not 0.0 <= self.at_default_lgd <= 1.0:
            raise FieldOutOfRange(f"at_default_lgd={self.at_default_lgd!r} outside [0,1]")
        if self.restated_bop_el is not None and not self.restated_bop_el >= 0.0:
            raise FieldOutOfRange(f"restated_bop_el={self.restated_bop_el!r} must be >= 0")

    @property
    def has_at_default(self) -> bool:
        return self.at_default_ead is not None or self.at_default_lgd is not None


NO_EVENTS = AccountEvents()


class PeriodEvents:
    """Per-account events booked during one period."""

    __slots__ = ("_by_account",)

    def __init__(self, by_account: Mapping[str, AccountEvents] | None = None):
        self._by_account = MappingProxyType(dict(by_account or {}))

    def __getitem__(self, account_id: str) -> AccountEvents:
        return self._by_account.get(account_id, NO_EVENTS)

    def __contains__(self, account_id: object) -> bool:
        return account_id in self._by_account

    def __len__(self) -> int:
        return len(self._by_account)

    def ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._by_account))

    def items(self):
        return ((i, self._by_account[i]) for i in self.ids())

    def restrict(self, ids: Iterable[str]) -> PeriodEvents:
        keep = set(ids)
        return PeriodEvents({i: e for i, e in self._by_account.items() if i in keep})

    def total_write_off(self) -> float:
        return math.fsum(e.write_off for _, e in self.items())

    def total_recovery(self) -> float:
        return math.fsum(e.recovery for _, e in self.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeriodEvents):
            return NotImplemented
        return dict(self._by_account) == dict(other._by_account)

    def __repr__(self) -> str:
        return f"PeriodEvents({len(self)} accounts)"


@dataclass(frozen=True, slots=True)
class ProvisionBalances:
    """Provision stocks at both ends of a period.

    ``sf_bop``/``sf_eop`` optionally carry the shortfall as reported by the
    capital calculation. When present they are used instead of being derived
    from EL minus provisions, which turns the accounting route to IoR into an
    independent cross-check of the EL route.
    """

    llp_bop: float = 0.0
    llp_eop: float = 0.0
    ibnr_bop: float = 0.0
    ibnr_eop: float = 0.0
    sf_bop: float | None = None
    sf_eop: float | None = None

    def __post_init__(self) -> None:
        for name in ("llp_bop", "llp_eop", "ibnr_bop", "ibnr_eop"):
            value = getattr(self, name)
            if not (value >= 0.0 and math.isfinite(value)):
                raise FieldOutOfRange(f"provisions: {name}={value!r} must be >= 0")
        if (self.sf_bop is None) != (self.sf_eop is None):
            raise FieldOutOfRange("provisions: sf_bop and sf_eop must be given together")


@dataclass(frozen=True)
class PeriodLedger:
    bop: Snapshot
    eop: Snapshot
    events: PeriodEvents = field(default_factory=PeriodEvents)
    provisions: ProvisionBalances | None = None
    discount_rate: float = 0.0
    loss_confirmation_months: int = 12

    def __post_init__(self) -> None:
        if not self.bop.as_of < self.eop.as_of:
            raise NonMonotoneDates(
                f"BOP {self.bop.as_of} must precede EOP {self.eop.as_of}"
            )
        if not (self.discount_rate >= 0.0 and math.isfinite(self.discount_rate)):
            raise FieldOutOfRange(f"discount_rate={self.discount_rate!r} must be >= 0")
        if not (isinstance(self.loss_confirmation_months, int)
                and 0 <= self.loss_confirmation_months <= 12):
            raise FieldOutOfRange(
                f"loss_confirmation_months={self.loss_confirmation_months!r} outside [0,12]"
            )
        for aid, ev in self.events.items():
            if aid not in self.bop and aid not in self.eop:
                raise InconsistentEvents(f"events reference unknown account {aid!r}")
            if ev.restated_bop_el is not None and aid not in self.bop:
                raise InconsistentEvents(f"account {aid}: restated_bop_el without a BOP state")

    def account_ids(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.bop.ids) | set(self.eop.ids)))

    def restrict(self, ids: Iterable[str]) -> PeriodLedger:
        """Sub-ledger over ``ids``; provisions are portfolio-level and are dropped."""
        keep = set(ids)
        return PeriodLedger(
            bop=self.bop.restrict(keep),
            eop=self.eop.restrict(keep),
            events=self.events.restrict(keep),
            provisions=None,
            discount_rate=self.discount_rate,
            loss_confirmation_months=self.loss_confirmation_months,
        )


class Transition(str, enum.Enum):
    PERFORMING_BOTH = "performing_both"
    NEW_NPL = "new_npl"
    OLD_NPL = "old_npl"
    CURED = "cured"
    CLOSED_PERFORMING = "closed_performing"
    NEW_BUSINESS = "new_business"


# Classes whose write-offs feed the PL Backtest; the rest feed the NPL Backtest.
PL_SIDE = frozenset({
    Transition.PERFORMING_BOTH,
    Transition.NEW_NPL,
    Transition.CLOSED_PERFORMING,
    Transition.NEW_BUSINESS,
})


@dataclass(frozen=True)
class TransitionSet:
    performing_both: frozenset[str] = frozenset()
    new_npl: frozenset[str] = frozenset()
    old_npl: frozenset[str] = frozenset()
    cured: frozenset[str] = frozenset()
    closed_performing: frozenset[str] = frozenset()
    new_business: frozenset[str] = frozenset()

    def of(self, transition: Transition) -> frozenset[str]:
        return getattr(self, transition.value)

    def class_of(self, account_id: str) -> Transition:
        for t in Transition:
            if account_id in self.of(t):
                return t
        raise KeyError(account_id)

    def mapping(self) -> dict[str, Transition]:
        return {aid: t for t in Transition for aid in self.of(t)}

    def counts(self) -> dict[str, int]:
        return {t.value: len(self.of(t)) for t in Transition}


def _classify_one(aid: str, before: AccountState | None, after: AccountState | None,
                  events: AccountEvents, bop_date: dt.date, eop_date: dt.date) -> Transition:
    if after is not None and not after.performing:
        assert after.default_date is not None
        if after.default_date > eop_date:
            raise InconsistentDates(
                f"account {aid}: default_date {after.default_date} after EOP {eop_date}"
            )
        if after.default_date > bop_date:
            return Transition.NEW_NPL
        return Transition.OLD_NPL
    if after is not None:
        if before is None:
            return Transition.NEW_BUSINESS
        return Transition.PERFORMING_BOTH if before.performing else Transition.CURED
    assert before is not None
    if not before.performing:
        return Transition.OLD_NPL
    if events.write_off > 0.0:
        return Transition.NEW_NPL
    return Transition.CLOSED_PERFORMING


def classify_transitions(ledger: PeriodLedger) -> TransitionSet:
    """Partition every account of ``ledger`` into the six transition classes.

    Accounts that are non-performing at EOP are split by default date into
    new and old defaults, whatever their BOP presence. Performing EOP accounts
    are performing_both, cured or new_business. Accounts gone by EOP are old
    NPL if they were defaulted at BOP, new NPL if they left through a direct
    write-off, and closed (repaid) otherwise.
    """
    buckets: dict[Transition, set[str]] = {t: set() for t in Transition}
    bop, eop = ledger.bop, ledger.eop
    for aid in ledger.account_ids():
        t = _classify_one(aid, bop.get(aid), eop.get(aid), ledger.events[aid],
                          bop.as_of, eop.as_of)
        buckets[t].add(aid)
    ts = TransitionSet(**{t.value: frozenset(ids) for t, ids in buckets.items()})
    _check_at_default_placement(ledger, ts)
    return ts


def _check_at_default_placement(ledger: PeriodLedger, ts: TransitionSet) -> None:
    for aid, ev in ledger.events.items():
        if ev.has_at_default and aid not in ts.new_npl:
            raise InconsistentEvents(
                f"account {aid}: at-default data given but the account did not default in the period"
            )


def pair_periods(
    snapshots: Sequence[Snapshot],
    events: Sequence[PeriodEvents | None] | None = None,
    provisions: Sequence[ProvisionBalances | None] | None = None,
    *,
    discount_rate: float = 0.0,
    loss_confirmation_months: int = 12,
) -> list[PeriodLedger]:
    """Chain ``n`` snapshots into ``n - 1`` ledgers sharing their boundary snapshots."""
    for prev, nxt in zip(snapshots, snapshots[1:]):
        if not prev.as_of < nxt.as_of:
            raise NonMonotoneDates(f"snapshot dates not increasing: {prev.as_of} then {nxt.as_of}")
    n = max(len(snapshots) - 1, 0)
    events = list(events) if events is not None else [None] * n
    provisions = list(provisions) if provisions is not None else [None] * n
    if len(events) != n or len(provisions) != n:
        raise LedgerError(
            f"{len(snapshots)} snapshots need {n} event/provision blocks, "
            f"got {len(events)} and {len(provisions)}"
        )
    return [
        PeriodLedger(
            bop=snapshots[i],
            eop=snapshots[i + 1],
            events=events[i] if events[i] is not None else PeriodEvents(),
            provisions=provisions[i],
            discount_rate=discount_rate,
            loss_confirmation_months=loss_confirmation_months,
        )
        for i in range(n)
    ]


# ---------------------------------------------------------------- records

def _parse_float(raw: Any, name: str, where: str, *, optional: bool = False) -> float | None:
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        if optional:
            return None
        raise FieldOutOfRange(f"{where}: missing required field {name!r}")
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise FieldOutOfRange(f"{where}: field {name!r}={raw!r} is not a number") from None
    if not math.isfinite(value):
        raise FieldOutOfRange(f"{where}: field {name!r}={raw!r} is not finite")
    return value


def _parse_date(raw: Any, name: str, where: str) -> dt.date | None:
    if raw is None or raw == "":
        return None
    if isinstance(raw, dt.date):
        return raw
    try:
        return dt.date.fromisoformat(str(raw).strip())
    except ValueError:
        raise FieldOutOfRange(f"{where}: field {name!r}={raw!r} is not an ISO date") from None


def _parse_status(raw: Any, where: str) -> Status:
    if isinstance(raw, Status):
        return raw
    try:
        return Status(str(raw).strip())
    except ValueError:
        raise FieldOutOfRange(f"{where}: status={raw!r} must be 'P' or 'N'") from None


def account_from_record(rec: Mapping[str, Any], where: str = "record") -> AccountState:
    aid = rec.get("account_id")
    if aid is None or str(aid).strip() == "":
        raise FieldOutOfRange(f"{where}: missing account_id")
    aid = str(aid).strip()
    where = f"{where} (account {aid})"
    segments = {}
    for dim in SEGMENT_DIMENSIONS:
        raw = rec.get(dim)
        if raw is not None and str(raw) != "":
            segments[dim] = str(raw)
    try:
        return AccountState(
            account_id=aid,
            status=_parse_status(rec.get("status"), where),
            pd=_parse_float(rec.get("pd"), "pd", where),
            ead=_parse_float(rec.get("ead"), "ead", where),
            lgd=_parse_float(rec.get("lgd"), "lgd", where),
            default_date=_parse_date(rec.get("default_date"), "default_date", where),
            lifetime_el=_parse_float(rec.get("lifetime_el"), "lifetime_el", where, optional=True),
            segments=segments,
        )
    except LedgerError as exc:
        msg = str(exc)
        if not msg.startswith(where):
            raise type(exc)(f"{where}: {msg}") from None
        raise


def load_snapshot(records: Iterable[Mapping[str, Any]], as_of: dt.date | None = None) -> Snapshot:
    """Build a validated snapshot from tabular records.

    Records follow the snapshot CSV schema; values may be strings (as read
    from CSV) or already-typed. ``as_of`` is taken from the records when not
    given, and all records must agree on it.
    """
    accounts = []
    seen: set[str] = set()
    for n, rec in enumerate(records, start=1):
        where = f"row {n}"
        rec_as_of = _parse_date(rec.get("as_of"), "as_of", where)
        if as_of is None:
            as_of = rec_as_of
        elif rec_as_of is not None and rec_as_of != as_of:
            raise InconsistentDates(f"{where}: as_of {rec_as_of} differs from snapshot date {as_of}")
        acc = account_from_record(rec, where)
        if acc.account_id in seen:
            raise DuplicateAccount(f"{where}: duplicate account_id {acc.account_id!r}")
        seen.add(acc.account_id)
        accounts.append(acc)
    if as_of is None:
        raise LedgerError("snapshot has no as_of date (empty input needs an explicit date)")
    return Snapshot(as_of, accounts)


def _num(v: float) -> str:
    # float() first so numpy scalars do not leak their repr into files
    return repr(float(v))


def account_to_record(acc: AccountState, as_of: dt.date) -> dict[str, str]:
    rec = {
        "account_id": acc.account_id,
        "as_of": as_of.isoformat(),
        "status": acc.status.value,
        "pd": _num(acc.pd),
        "ead": _num(acc.ead),
        "lgd": _num(acc.lgd),
        "lifetime_el": "" if acc.lifetime_el is None else _num(acc.lifetime_el),
        "default_date": "" if acc.default_date is None else acc.default_date.isoformat(),
    }
    for dim in SEGMENT_DIMENSIONS:
        rec[dim] = acc.segments.get(dim, "")
    return rec


def events_from_records(records: Iterable[Mapping[str, Any]]) -> PeriodEvents:
    table: dict[str, AccountEvents] = {}
    for n, rec in enumerate(records, start=1):
        aid = str(rec.get("account_id") or "").strip()
        where = f"events row {n}"
        if not aid:
            raise FieldOutOfRange(f"{where}: missing account_id")
        if aid in table:
            raise DuplicateAccount(f"{where}: duplicate account_id {aid!r}")
        where = f"{where} (account {aid})"
        try:
            table[aid] = AccountEvents(
                write_off=_parse_float(rec.get("write_off"), "write_off", where, optional=True) or 0.0,
                recovery=_parse_float(rec.get("recovery"), "recovery", where, optional=True) or 0.0,
                at_default_ead=_parse_float(rec.get("at_default_ead"), "at_default_ead", where, optional=True),
                at_default_lgd=_parse_float(rec.get("at_default_lgd"), "at_default_lgd", where, optional=True),
                restated_bop_el=_parse_float(rec.get("restated_bop_el"), "restated_bop_el", where, optional=True),
            )
        except FieldOutOfRange as exc:
            if str(exc).startswith(where):
                raise
            raise FieldOutOfRange(f"{where}: {exc}") from None
    return PeriodEvents(table)


def events_to_records(events: PeriodEvents) -> list[dict[str, str]]:
    def fmt(v: float | None) -> str:
        return "" if v is None else _num(v)

    return [
        {
            "account_id": aid,
            "write_off": _num(ev.write_off),
            "recovery": _num(ev.recovery),
            "at_default_ead": fmt(ev.at_default_ead),
            "at_default_lgd": fmt(ev.at_default_lgd),
            "restated_bop_el": fmt(ev.restated_bop_el),
        }
        for aid, ev in events.items()
    ]


def provisions_from_record(rec: Mapping[str, Any]) -> ProvisionBalances:
    where = "provisions"
    return ProvisionBalances(
        llp_bop=_parse_float(rec.get("llp_bop"), "llp_bop", where),
        llp_eop=_parse_float(rec.get("llp_eop"), "llp_eop", where),
        ibnr_bop=_parse_float(rec.get("ibnr_bop"), "ibnr_bop", where),
        ibnr_eop=_parse_float(rec.get("ibnr_eop"), "ibnr_eop", where),
        sf_bop=_parse_float(rec.get("sf_bop"), "sf_bop", where, optional=True),
        sf_eop=_parse_float(rec.get("sf_eop"), "sf_eop", where, optional=True),
    )


def provisions_to_record(p: ProvisionBalances) -> dict[str, str]:
    rec = {
        "llp_bop": _num(p.llp_bop),
        "llp_eop": _num(p.llp_eop),
        "ibnr_bop": _num(p.ibnr_bop),
        "ibnr_eop": _num(p.ibnr_eop),
    }
    if p.sf_bop is not None:
        rec["sf_bop"] = _num(p.sf_bop)
        rec["sf_eop"] = _num(p.sf_eop)
    return rec
