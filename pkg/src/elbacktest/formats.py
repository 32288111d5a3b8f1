"""CSV/JSON readers and writers for snapshots, events, provisions and chains.

Floats are written with ``repr`` so that a written file reads back to the
identical binary value.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from collections.abc import Iterable
from pathlib import Path

from .errors import LedgerError
from .ledger import (
    SEGMENT_DIMENSIONS,
    PeriodEvents,
    PeriodLedger,
    ProvisionBalances,
    Snapshot,
    account_to_record,
    events_from_records,
    events_to_records,
    load_snapshot,
    pair_periods,
    provisions_from_record,
    provisions_to_record,
)

SNAPSHOT_COLUMNS = (
    "account_id", "as_of", "status", "pd", "ead", "lgd", "lifetime_el", "default_date",
    *SEGMENT_DIMENSIONS,
)
EVENT_COLUMNS = ("account_id", "write_off", "recovery", "at_default_ead", "at_default_lgd",
                 "restated_bop_el")
PROVISION_COLUMNS = ("llp_bop", "llp_eop", "ibnr_bop", "ibnr_eop", "sf_bop", "sf_eop")
MANIFEST = "manifest.json"


def _read_rows(path: Path, required: Iterable[str]) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise LedgerError(f"{path}: missing header row")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise LedgerError(f"{path}: header lacks columns {missing}")
        return list(reader)


def _write_rows(path: Path, columns: Iterable[str], rows: Iterable[dict[str, str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_snapshot_csv(path: str | Path, as_of: dt.date | None = None) -> Snapshot:
    path = Path(path)
    rows = _read_rows(path, ("account_id", "status", "pd", "ead", "lgd"))
    try:
        return load_snapshot(rows, as_of=as_of)
    except LedgerError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def write_snapshot_csv(snapshot: Snapshot, path: str | Path) -> None:
    _write_rows(Path(path), SNAPSHOT_COLUMNS,
                (account_to_record(a, snapshot.as_of) for a in snapshot))


def read_events_csv(path: str | Path) -> PeriodEvents:
    path = Path(path)
    rows = _read_rows(path, ("account_id",))
    try:
        return events_from_records(rows)
    except LedgerError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def write_events_csv(events: PeriodEvents, path: str | Path) -> None:
    _write_rows(Path(path), EVENT_COLUMNS, events_to_records(events))


def read_provisions(path: str | Path) -> ProvisionBalances:
    """Provisions from a single-record CSV or a JSON object."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            if not isinstance(data, dict):
                raise LedgerError("provisions JSON must be an object")
            return provisions_from_record(data)
        rows = _read_rows(path, PROVISION_COLUMNS[:4])
        if len(rows) != 1:
            raise LedgerError(f"expected exactly one provisions record, found {len(rows)}")
        return provisions_from_record(rows[0])
    except (LedgerError, json.JSONDecodeError) as exc:
        raise LedgerError(f"{path}: {exc}") from None


def write_provisions_csv(p: ProvisionBalances, path: str | Path) -> None:
    rec = provisions_to_record(p)
    _write_rows(Path(path), [c for c in PROVISION_COLUMNS if c in rec], [rec])


def write_chain(ledgers: list[PeriodLedger], directory: str | Path) -> Path:
    """Write a ledger chain as snapshot/event/provision files plus a manifest."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    if not ledgers:
        raise LedgerError("cannot write an empty chain")
    snapshots = [ledgers[0].bop] + [lg.eop for lg in ledgers]
    manifest = {
        "discount_rate": ledgers[0].discount_rate,
        "loss_confirmation_months": ledgers[0].loss_confirmation_months,
        "snapshots": [],
        "periods": [],
    }
    for i, snap in enumerate(snapshots):
        name = f"snapshot_{i:02d}.csv"
        write_snapshot_csv(snap, out / name)
        manifest["snapshots"].append({"path": name, "as_of": snap.as_of.isoformat()})
    for i, lg in enumerate(ledgers, start=1):
        period = {"events": f"events_{i:02d}.csv"}
        write_events_csv(lg.events, out / period["events"])
        if lg.provisions is not None:
            period["provisions"] = f"provisions_{i:02d}.csv"
            write_provisions_csv(lg.provisions, out / period["provisions"])
        manifest["periods"].append(period)
    path = out / MANIFEST
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def read_chain(path: str | Path) -> list[PeriodLedger]:
    """Read a chain from a manifest file or a directory containing one."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST
    base = path.parent
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LedgerError(f"{path}: {exc}") from None
    snapshots = [
        read_snapshot_csv(base / s["path"], dt.date.fromisoformat(s["as_of"]) if s.get("as_of") else None)
        for s in manifest["snapshots"]
    ]
    events, provisions = [], []
    for period in manifest.get("periods", []):
        events.append(read_events_csv(base / period["events"]) if period.get("events") else None)
        provisions.append(read_provisions(base / period["provisions"]) if period.get("provisions") else None)
    if not manifest.get("periods"):
        events = provisions = None
    return pair_periods(
        snapshots, events, provisions,
        discount_rate=float(manifest.get("discount_rate", 0.0)),
        loss_confirmation_months=int(manifest.get("loss_confirmation_months", 12)),
    )
