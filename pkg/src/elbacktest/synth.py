"""Synthetic portfolios: the worked appendix cases, seeded lifecycles,
discounted recovery scenarios and randomized single-period ledgers.

All randomness comes from numpy's PCG64 bit generator (PCG XSL RR 128/64),
seeded explicitly, so a seed reproduces a chain bit for bit.
"""

from __future__ import annotations

import datetime as dt
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ConfigInvalid
from .ledger import (
    AccountEvents,
    AccountState,
    PeriodEvents,
    PeriodLedger,
    ProvisionBalances,
    Snapshot,
    Status,
    pair_periods,
)

BASE_YEAR = 2000
P, N = Status.PERFORMING, Status.NON_PERFORMING


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def year_end(year: int) -> dt.date:
    """As-of date of the snapshot closing ``year`` (year 0 is the empty start)."""
    return dt.date(BASE_YEAR + year, 12, 31)


def mid_year(year: int) -> dt.date:
    return dt.date(BASE_YEAR + year, 6, 30)


def consistent_provisions(bop: Snapshot, eop: Snapshot, llp_bop: float, llp_eop: float,
                          lcp_months: int) -> ProvisionBalances:
    """Provisions with IBNR from the loss confirmation period and a reported
    shortfall equal to EL minus provisions at both dates."""
    def totals(s: Snapshot) -> tuple[float, float]:
        pl = math.fsum(a.el for a in s if a.performing)
        npl = math.fsum(a.el for a in s if not a.performing)
        return pl, npl

    pl_b, npl_b = totals(bop)
    pl_e, npl_e = totals(eop)
    ibnr_b = pl_b * lcp_months / 12
    ibnr_e = pl_e * lcp_months / 12
    return ProvisionBalances(
        llp_bop=llp_bop, llp_eop=llp_eop, ibnr_bop=ibnr_b, ibnr_eop=ibnr_e,
        sf_bop=math.fsum([pl_b, npl_b]) - llp_bop - ibnr_b,
        sf_eop=math.fsum([pl_e, npl_e]) - llp_eop - ibnr_e,
    )


def _npl_el(s: Snapshot) -> float:
    return math.fsum(a.el for a in s if not a.performing)


def _with_provisions(snapshots: list[Snapshot], events: list[PeriodEvents], *,
                     discount_rate: float, lcp_months: int) -> list[PeriodLedger]:
    # LLP held at the best-estimate EL of the defaulted book
    provisions = [
        consistent_provisions(b, e, _npl_el(b), _npl_el(e), lcp_months)
        for b, e in zip(snapshots, snapshots[1:])
    ]
    return pair_periods(snapshots, events, provisions, discount_rate=discount_rate,
                        loss_confirmation_months=lcp_months)


# ---------------------------------------------------------------- appendix

_CASES = {
    # case: (model pd, lgd at default, lgd on remaining balance after recoveries)
    1: (0.02, 0.5, 1.0),
    2: (0.01, 0.5, 1.0),
    3: (0.02, 0.25, 0.5),
}

CASE_CONTRACTS = 10_000
CASE_DEFAULTS = 200


def _case_tags(years_in_default: str = "") -> dict[str, str]:
    tags = {
        "pd_model": "PD-RETAIL",
        "lgd_model": "LGD-RETAIL",
        "rating_grade": "4",
        "exposure_band": "0-10",
        "collateral_type": "unsecured",
    }
    if years_in_default:
        tags["years_in_default"] = years_in_default
    return tags


def generate_appendix_case(case: int) -> list[PeriodLedger]:
    """Four annual ledgers of the 10,000-contract worked example.

    Unit contracts are booked in year 1 with a one-year bullet term; 200 of
    them default mid-year 2 while the rest repay; half of each defaulted
    balance is collected at the end of year 3 and the remainder is written
    off in year 4. Case 2 uses a 1% model PD, case 3 a 25% LGD that rises to
    50% on the remaining balance after recoveries.
    """
    if case not in _CASES:
        raise ConfigInvalid(f"appendix case must be 1, 2 or 3, got {case!r}")
    pd_model, lgd_def, lgd_late = _CASES[case]
    ids = [f"C{i:05d}" for i in range(1, CASE_CONTRACTS + 1)]
    defaulters = ids[:CASE_DEFAULTS]
    default_date = mid_year(2)

    y0 = Snapshot(year_end(0))
    y1 = Snapshot(year_end(1), (
        AccountState(aid, P, pd_model, 1.0, lgd_def, segments=_case_tags()) for aid in ids
    ))
    y2 = Snapshot(year_end(2), (
        AccountState(aid, N, 1.0, 1.0, lgd_def, default_date=default_date, segments=_case_tags("0"))
        for aid in defaulters
    ))
    y3 = Snapshot(year_end(3), (
        AccountState(aid, N, 1.0, 0.5, lgd_late, default_date=default_date, segments=_case_tags("1"))
        for aid in defaulters
    ))
    y4 = Snapshot(year_end(4))

    events = [
        PeriodEvents(),
        PeriodEvents({aid: AccountEvents(at_default_ead=1.0, at_default_lgd=lgd_def) for aid in defaulters}),
        PeriodEvents({aid: AccountEvents(recovery=0.5) for aid in defaulters}),
        PeriodEvents({aid: AccountEvents(write_off=0.5) for aid in defaulters}),
    ]
    return _with_provisions([y0, y1, y2, y3, y4], events, discount_rate=0.0, lcp_months=6)


# ---------------------------------------------------------------- lifecycle

@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of a seeded origination-to-liquidation lifecycle.

    ``recovery_profile`` lists the fractions of the defaulted exposure
    collected in each workout year; whatever is left is written off in the
    last workout year, so the realized (undiscounted) loss rate is
    ``1 - sum(recovery_profile)``. ``lgd_true`` may be omitted and is then
    derived from the profile. The model side predicts the same timing
    scaled to ``1 - lgd_model`` and discounts it at ``discount_rate``.
    """

    n_accounts: int = 1000
    unit_exposure: float = 1.0
    pd_true: float = 0.02
    pd_model: float = 0.02
    lgd_true: float | None = None
    lgd_model: float = 0.5
    discount_rate: float = 0.0
    horizon_years: int = 5
    recovery_profile: tuple[float, ...] = (0.5,)
    seed: int = 0
    term_years: int = 1
    lcp_months: int = 6
    default_sampling: str = "binomial"
    lifetime_el: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "recovery_profile", tuple(float(x) for x in self.recovery_profile))
        problems = []
        if not (isinstance(self.n_accounts, int) and self.n_accounts > 0):
            problems.append("n_accounts must be a positive integer")
        if not self.unit_exposure > 0:
            problems.append("unit_exposure must be > 0")
        for name in ("pd_true", "pd_model", "lgd_model"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                problems.append(f"{name} must lie in [0,1]")
        if not self.discount_rate >= 0:
            problems.append("discount_rate must be >= 0")
        if not (isinstance(self.term_years, int) and self.term_years >= 1):
            problems.append("term_years must be an integer >= 1")
        if not 0 <= self.lcp_months <= 12:
            problems.append("lcp_months must lie in [0,12]")
        if any(not 0.0 <= x <= 1.0 for x in self.recovery_profile):
            problems.append("recovery_profile entries must lie in [0,1]")
        elif math.fsum(self.recovery_profile) > 1.0 + 1e-12:
            problems.append("recovery_profile must sum to at most 1")
        elif self.lgd_true is not None and abs(self.lgd_true - self.realized_lgd) > 1e-12:
            problems.append(f"lgd_true={self.lgd_true} contradicts recovery_profile "
                            f"(realized loss rate {self.realized_lgd})")
        if self.default_sampling not in ("binomial", "expected"):
            problems.append("default_sampling must be 'binomial' or 'expected'")
        if not (isinstance(self.horizon_years, int) and self.horizon_years >= 2):
            problems.append("horizon_years must be an integer >= 2")
        elif self.horizon_years < self.liquidation_year:
            problems.append(f"horizon_years={self.horizon_years} too short to liquidate; "
                            f"needs {self.liquidation_year}")
        if problems:
            raise ConfigInvalid("; ".join(problems))

    @property
    def workout_years(self) -> int:
        return max(len(self.recovery_profile), 1)

    @property
    def realized_lgd(self) -> float:
        return max(0.0, 1.0 - math.fsum(self.recovery_profile))

    @property
    def liquidation_year(self) -> int:
        return self.term_years + 1 + self.workout_years

    def predicted_recoveries(self) -> list[float]:
        """Model-predicted recovery fractions per workout year."""
        k = self.workout_years
        total = math.fsum(self.recovery_profile)
        if total > 0:
            weights = [x / total for x in self.recovery_profile]
        else:
            weights = [1.0] + [0.0] * (k - 1)
        weights += [0.0] * (k - len(weights))
        return [(1.0 - self.lgd_model) * w for w in weights]

    @classmethod
    def from_mapping(cls, data: dict) -> ScenarioConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalid(f"unknown scenario keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from None


def _workout_el(ead_rem: float, ead_def: float, predicted: Sequence[float], years_done: int,
                r: float) -> float:
    pv = math.fsum(
        ead_def * predicted[k] / (1.0 + r) ** (k - years_done + 1)
        for k in range(years_done, len(predicted))
    )
    return min(max(ead_rem - pv, 0.0), ead_rem)


def _npl_state(aid: str, ead_rem: float, el: float, default_date: dt.date, years: int) -> AccountState:
    lgd = el / ead_rem if ead_rem > 0 else 0.0
    return AccountState(aid, N, 1.0, ead_rem, min(lgd, 1.0), default_date=default_date,
                        segments={"pd_model": "PD-SIM", "lgd_model": "LGD-SIM",
                                  "years_in_default": str(years)})


def simulate_lifecycle(cfg: ScenarioConfig) -> list[PeriodLedger]:
    """Seeded lifecycle from an empty book through origination to full liquidation.

    Loans are booked during year 1, may default in years 2 to ``term + 1``
    and survivors repay at maturity. Defaults work out over the recovery
    profile with the remainder written off at the end.
    """
    rng = rng_for(cfg.seed)
    r = cfg.discount_rate
    predicted = cfg.predicted_recoveries()
    actual = list(cfg.recovery_profile) + [0.0] * (cfg.workout_years - len(cfg.recovery_profile))
    # performing LGD equals the discounted best estimate on the day of default
    lgd_pl = _workout_el(1.0, 1.0, predicted, 0, r)
    ead = cfg.unit_exposure
    ids = [f"L{i:06d}" for i in range(1, cfg.n_accounts + 1)]

    performing = list(ids)
    # aid -> (default year, exposure at default, remaining exposure)
    defaulted: dict[str, tuple[int, float, float]] = {}
    snapshots = [Snapshot(year_end(0))]
    events: list[PeriodEvents] = []

    for year in range(1, cfg.horizon_years + 1):
        ev: dict[str, AccountEvents] = {}
        if year >= 2 and performing:
            if cfg.default_sampling == "binomial":
                hit = rng.random(len(performing)) < cfg.pd_true
                new = [aid for aid, h in zip(performing, hit) if h]
            else:
                expected = cfg.pd_true * len(performing)
                count = round(expected)
                if abs(expected - count) > 1e-9:
                    raise ConfigInvalid(
                        f"expected-count sampling needs an integral default count in year {year}, "
                        f"got {expected}")
                pick = set(rng.choice(len(performing), size=count, replace=False).tolist())
                new = [aid for i, aid in enumerate(performing) if i in pick]
            new_set = set(new)
            performing = [aid for aid in performing if aid not in new_set]
            for aid in new:
                defaulted[aid] = (year, ead, ead)
                ev[aid] = AccountEvents(at_default_ead=ead, at_default_lgd=lgd_pl)
        if year == cfg.term_years + 1:
            performing = []  # survivors repay at maturity

        states = []
        remaining_years = cfg.term_years + 1 - year
        for aid in performing:
            el = cfg.pd_model * ead * lgd_pl
            life = el * remaining_years if cfg.lifetime_el else None
            states.append(AccountState(aid, P, cfg.pd_model, ead, lgd_pl, lifetime_el=life,
                                       segments={"pd_model": "PD-SIM", "lgd_model": "LGD-SIM"}))
        for aid in sorted(defaulted):
            dyear, ead_def, ead_rem = defaulted[aid]
            done = year - dyear  # workout years completed by this year end
            if done == 0:
                states.append(_npl_state(aid, ead_rem, _workout_el(ead_rem, ead_def, predicted, 0, r),
                                         mid_year(dyear), 0))
                continue
            rec = ead_def * actual[done - 1]
            ead_rem = max(ead_rem - rec, 0.0)
            if done >= cfg.workout_years:
                prior = ev.get(aid, AccountEvents())
                ev[aid] = AccountEvents(write_off=ead_rem, recovery=rec,
                                        at_default_ead=prior.at_default_ead,
                                        at_default_lgd=prior.at_default_lgd)
                del defaulted[aid]
                continue
            ev[aid] = AccountEvents(recovery=rec)
            defaulted[aid] = (dyear, ead_def, ead_rem)
            states.append(_npl_state(aid, ead_rem, _workout_el(ead_rem, ead_def, predicted, done, r),
                                     mid_year(dyear), done))
        snapshots.append(Snapshot(year_end(year), states))
        events.append(PeriodEvents(ev))

    return _with_provisions(snapshots, events, discount_rate=r, lcp_months=cfg.lcp_months)


# ---------------------------------------------------------------- recoveries

def generate_recovery_scenario(ead: float, r: float, recoveries: Sequence[float]) -> list[PeriodLedger]:
    """Single defaulted exposure whose EL embeds the exact discounted recoveries.

    Recoveries are received at each year end as predicted; the remainder is
    written off with the last one. The NPL Backtest of every period then
    equals ``-r`` times the BOP expected discounted recoveries.
    """
    recs = [float(x) for x in recoveries]
    if not ead > 0:
        raise ConfigInvalid("ead must be > 0")
    if not r >= 0:
        raise ConfigInvalid("discount rate must be >= 0")
    if not recs:
        raise ConfigInvalid("at least one recovery year is required")
    if any(x < 0 for x in recs):
        raise ConfigInvalid("recoveries must be >= 0")
    if math.fsum(recs) > ead * (1 + 1e-12):
        raise ConfigInvalid("recoveries exceed the exposure")

    aid = "R00001"
    default_date = mid_year(0)
    k = len(recs)
    snapshots = []
    events = []
    ead_rem = ead
    for j in range(k + 1):
        if j > 0:
            ead_rem = max(ead_rem - recs[j - 1], 0.0)
        if j == k:
            snapshots.append(Snapshot(year_end(j)))
            events.append(PeriodEvents({aid: AccountEvents(write_off=ead_rem, recovery=recs[j - 1])}))
            break
        pv = math.fsum(recs[i] / (1.0 + r) ** (i - j + 1) for i in range(j, k))
        el = ead_rem - pv
        lgd = el / ead_rem if ead_rem > 0 else 0.0
        snapshots.append(Snapshot(year_end(j), [
            AccountState(aid, N, 1.0, ead_rem, min(max(lgd, 0.0), 1.0), default_date=default_date,
                         segments={"years_in_default": str(j)})
        ]))
        if j > 0:
            events.append(PeriodEvents({aid: AccountEvents(recovery=recs[j - 1])}))
    return pair_periods(snapshots, events, discount_rate=r)


# ---------------------------------------------------------------- conservativity

def generate_conservativity_scenario(n_accounts: int, pd_model: float, lgd: float,
                                     planted_c: float, seed: int) -> PeriodLedger:
    """One period where defaults occur at ``pd_model * (1 - planted_c)``.

    Unit exposures with a common LGD that does not move at default, so the
    PL Backtest is ``-EL_PL(bop) * c`` up to binomial sampling noise.
    """
    if not 0.0 <= pd_model * (1.0 - planted_c) <= 1.0:
        raise ConfigInvalid("pd_model * (1 - c) must be a probability")
    rng = rng_for(seed)
    ids = [f"K{i:06d}" for i in range(1, n_accounts + 1)]
    hit = rng.random(n_accounts) < pd_model * (1.0 - planted_c)
    bop = Snapshot(year_end(0), (AccountState(aid, P, pd_model, 1.0, lgd) for aid in ids))
    eop_states = []
    ev = {}
    for aid, h in zip(ids, hit):
        if h:
            eop_states.append(AccountState(aid, N, 1.0, 1.0, lgd, default_date=mid_year(1)))
            ev[aid] = AccountEvents(at_default_ead=1.0, at_default_lgd=lgd)
        else:
            eop_states.append(AccountState(aid, P, pd_model, 1.0, lgd))
    return PeriodLedger(bop, Snapshot(year_end(1), eop_states), PeriodEvents(ev))


# ---------------------------------------------------------------- random ledgers

_KINDS = np.array([
    "performing_both", "new_npl", "direct_wo", "old_npl", "old_npl_gone",
    "cured", "closed", "new_business", "new_business_npl",
])
_KIND_P = np.array([0.40, 0.10, 0.02, 0.13, 0.05, 0.04, 0.10, 0.13, 0.03])
_GRADES = ("1", "2", "3", "4", "5", "6", "7")
_MODELS = ("PD-A", "PD-B", "PD-C")
_LGD_MODELS = ("LGD-A", "LGD-B")
_COLLATERAL = ("unsecured", "mortgage", "guarantee")


@dataclass(frozen=True)
class RandomLedgerOptions:
    at_default_complete: bool = True
    lifetime_share: float = 0.5
    restated_share: float = 0.0
    provisions: bool = True
    discount_rate: float = 0.05


def random_ledger(seed: int, n_accounts: int,
                  options: RandomLedgerOptions | None = None) -> PeriodLedger:
    """A one-year ledger with every transition class, write-offs and cures."""
    options = options or RandomLedgerOptions()
    rng = rng_for(seed)
    n = n_accounts
    bop_date, eop_date = year_end(20), year_end(21)
    kinds = rng.choice(_KINDS, size=n, p=_KIND_P).tolist()
    # python floats from here on: element access on numpy arrays is slow and
    # numpy scalars would leak into the account states
    pd0 = np.exp(rng.uniform(np.log(1e-4), np.log(0.3), size=n)).tolist()
    pd1 = np.exp(rng.uniform(np.log(1e-4), np.log(0.3), size=n)).tolist()
    ead0 = np.exp(rng.normal(3.0, 1.5, size=n)).tolist()
    ead_mult = rng.uniform(0.3, 1.3, size=n).tolist()
    lgd0 = rng.uniform(0.05, 0.95, size=n).tolist()
    lgd1 = rng.uniform(0.05, 1.0, size=n).tolist()
    wo_frac = rng.uniform(0.0, 1.0, size=n).tolist()
    rec_frac = rng.uniform(0.0, 0.5, size=n).tolist()
    life_mult = (1.0 + rng.uniform(0.0, 4.0, size=n)).tolist()
    has_life = (rng.random(n) < options.lifetime_share).tolist()
    restate = (rng.random(n) < options.restated_share).tolist()
    restate_mult = rng.uniform(0.5, 1.5, size=n).tolist()
    partial_wo = (rng.random(n) < 0.05).tolist()
    old_default_days = rng.integers(1, 3000, size=n).tolist()
    new_default_days = rng.integers(1, 365, size=n).tolist()
    grade = rng.integers(0, len(_GRADES), size=n).tolist()
    model = rng.integers(0, len(_MODELS), size=n).tolist()
    lmodel = rng.integers(0, len(_LGD_MODELS), size=n).tolist()
    coll = rng.integers(0, len(_COLLATERAL), size=n).tolist()

    bop, eop, ev = [], [], {}

    tag_cache: dict[tuple, dict[str, str]] = {}

    def tags(i: int, default_date: dt.date | None, at: dt.date) -> dict[str, str]:
        years = None if default_date is None else (at - default_date).days // 365
        key = (model[i], lmodel[i], grade[i], ead0[i] > 50, coll[i], years)
        t = tag_cache.get(key)
        if t is None:
            # shared between accounts; states never mutate their tags
            t = {
                "pd_model": _MODELS[model[i]],
                "lgd_model": _LGD_MODELS[lmodel[i]],
                "rating_grade": _GRADES[grade[i]],
                "exposure_band": "large" if ead0[i] > 50 else "small",
                "collateral_type": _COLLATERAL[coll[i]],
            }
            if years is not None:
                t["years_in_default"] = str(years)
            tag_cache[key] = t
        return t

    def perf(i: int, aid: str, pd: float, ead: float, lgd: float, at: dt.date) -> AccountState:
        life = pd * ead * lgd * life_mult[i] if has_life[i] else None
        return AccountState(aid, P, pd, ead, lgd, lifetime_el=life,
                            segments=tags(i, None, at))

    def npl(i: int, aid: str, ead: float, lgd: float, ddate: dt.date, at: dt.date) -> AccountState:
        return AccountState(aid, N, 1.0, ead, lgd, default_date=ddate,
                            segments=tags(i, ddate, at))

    for i in range(n):
        aid = f"A{i:06d}"
        kind = kinds[i]
        e0, e1 = float(ead0[i]), float(ead0[i] * ead_mult[i])
        old_dd = bop_date - dt.timedelta(days=int(old_default_days[i]))
        new_dd = bop_date + dt.timedelta(days=int(new_default_days[i]))
        wo = rec = 0.0
        at_def: tuple[float, float] | None = None
        if kind == "performing_both":
            bop.append(perf(i, aid, pd0[i], e0, lgd0[i], bop_date))
            eop.append(perf(i, aid, pd1[i], e1, lgd1[i] * 0.9, eop_date))
            if partial_wo[i]:
                wo = e0 * 0.05 * wo_frac[i]
        elif kind == "new_npl":
            bop.append(perf(i, aid, pd0[i], e0, lgd0[i], bop_date))
            eop.append(npl(i, aid, e1, lgd1[i], new_dd, eop_date))
            wo = e1 * 0.2 * wo_frac[i] if partial_wo[i] else 0.0
            at_def = (e0 * float(rng.uniform(0.8, 1.2)), float(rng.uniform(0.05, 0.95)))
        elif kind == "direct_wo":
            bop.append(perf(i, aid, pd0[i], e0, lgd0[i], bop_date))
            wo = e0 * (0.1 + 0.9 * wo_frac[i])
            at_def = (e0, float(lgd0[i]))
        elif kind == "old_npl":
            bop.append(npl(i, aid, e0, lgd0[i], old_dd, bop_date))
            rec = e0 * rec_frac[i]
            wo = e0 * 0.3 * wo_frac[i] if partial_wo[i] else 0.0
            eop.append(npl(i, aid, max(e0 - rec - wo, 0.0), lgd1[i], old_dd, eop_date))
        elif kind == "old_npl_gone":
            bop.append(npl(i, aid, e0, lgd0[i], old_dd, bop_date))
            rec = e0 * rec_frac[i]
            wo = e0 - rec
        elif kind == "cured":
            bop.append(npl(i, aid, e0, lgd0[i], old_dd, bop_date))
            eop.append(perf(i, aid, pd1[i], e1, lgd1[i] * 0.5, eop_date))
            if partial_wo[i]:
                wo = e0 * 0.1 * wo_frac[i]
        elif kind == "closed":
            bop.append(perf(i, aid, pd0[i], e0, lgd0[i], bop_date))
        elif kind == "new_business":
            eop.append(perf(i, aid, pd1[i], e1, lgd1[i], eop_date))
        else:  # new_business_npl
            eop.append(npl(i, aid, e1, lgd1[i], new_dd, eop_date))
            at_def = (e1, float(lgd1[i]))
        if at_def is not None and not options.at_default_complete and rng.random() < 0.5:
            at_def = None
        restated = None
        if restate[i] and kind not in ("new_business", "new_business_npl"):
            restated = bop[-1].el * float(restate_mult[i])
        if wo or rec or at_def or restated is not None:
            ev[aid] = AccountEvents(
                write_off=float(wo), recovery=float(rec),
                at_default_ead=None if at_def is None else at_def[0],
                at_default_lgd=None if at_def is None else at_def[1],
                restated_bop_el=restated,
            )

    bop_s, eop_s = Snapshot(bop_date, bop), Snapshot(eop_date, eop)
    provisions = None
    if options.provisions:
        llp_b = _npl_el(bop_s) * float(rng.uniform(0.5, 1.2))
        llp_e = _npl_el(eop_s) * float(rng.uniform(0.5, 1.2))
        provisions = consistent_provisions(bop_s, eop_s, llp_b, llp_e, lcp_months=6)
    return PeriodLedger(bop_s, eop_s, PeriodEvents(ev), provisions,
                        discount_rate=options.discount_rate, loss_confirmation_months=6)
