"""Expected-loss backtesting: Impact of Risk and its PL/NPL decomposition."""

from .backtest import (
    DecompositionReport,
    decompose_ior,
    default_frequency_view,
    delta_decomposition,
    discount_bias,
    estimate_conservativity,
    npl_backtest,
    pl_backtest,
    rank_outliers,
    recoflow,
    segment_report,
)
from .elcore import ElAggregate, account_el, aggregate_el, risk_density
from .errors import IdentityBreach
from .ior import CapitalFlows, impact_of_risk
from .ledger import (
    AccountEvents,
    AccountState,
    PeriodEvents,
    PeriodLedger,
    ProvisionBalances,
    Snapshot,
    Status,
    Transition,
    TransitionSet,
    classify_transitions,
    load_snapshot,
    pair_periods,
)

__version__ = "0.1.0"
