"""CSV ingestion, per-tick output rows, config files and JSON emitters."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import ConfigError, EmptyBodyError, InputFileError, MalformedHeaderError, RowParseError
from .filter import FilterState, Hyperparams, StepRecord
from .monitor import b_interval, signal

__all__ = [
    "Series",
    "TickRow",
    "TICK_COLUMNS",
    "ingest_csv",
    "tick_rows",
    "fmt",
    "write_csv",
    "write_json",
    "read_config",
    "save_checkpoint",
    "load_checkpoint",
]

TICK_COLUMNS = ("t", "date", "y", "f", "Q", "e", "b_hat", "b_lo", "b_hi", "mean_reverting", "S", "signal")
LABEL_COLUMNS = ("date", "t")


@dataclass
class Series:
    """Parsed input: either a spread ``y`` or a price pair ``p1, p2``."""

    labels: list = field(default_factory=list)
    y: np.ndarray | None = None
    p1: np.ndarray | None = None
    p2: np.ndarray | None = None

    @property
    def is_pair(self) -> bool:
        return self.p1 is not None

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class TickRow:
    t: int
    date: str
    y: float
    f: float
    Q: float
    e: float
    b_hat: float
    b_lo: float
    b_hi: float
    mean_reverting: bool
    S: float
    signal: str

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in TICK_COLUMNS)


def ingest_csv(path) -> Series:
    """Read a ``(date, y)`` or ``(date, p1, p2)`` CSV in file order.

    The label column may be called ``date`` or ``t``; its values pass
    through untouched.  Other columns are ignored, so the package's own
    outputs can be read back.  Every unparseable row is reported with its
    1-based line number.
    """
    if not os.path.isfile(path):
        raise InputFileError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MalformedHeaderError(f"{path}: file is empty, expected a header row") from None
        label = next((c for c in LABEL_COLUMNS if c in header), None)
        if label is None:
            raise MalformedHeaderError(f"{path}: header {header} lacks a 'date' or 't' column")
        if "y" in header:
            names = ("y",)
        elif "p1" in header and "p2" in header:
            names = ("p1", "p2")
        else:
            raise MalformedHeaderError(f"{path}: header {header} names neither 'y' nor 'p1','p2'")
        li = header.index(label)
        cols = [header.index(n) for n in names]
        labels, values, bad = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(row[c]) for c in cols]
                if not all(math.isfinite(v) for v in vals):
                    raise ValueError
            except (ValueError, IndexError):
                bad.append(lineno)
                continue
            labels.append(row[li].strip() if li < len(row) else "")
            values.append(vals)
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        raise RowParseError(f"{path}: unparseable rows at line(s) {shown}", bad)
    if not values:
        raise EmptyBodyError(f"{path}: no data rows")
    arr = np.array(values)
    if names == ("y",):
        return Series(labels=labels, y=arr[:, 0])
    return Series(labels=labels, p1=arr[:, 0], p2=arr[:, 1])


def tick_rows(
    records: Sequence[StepRecord],
    labels: Sequence[str] | None = None,
    gamma: float = 0.05,
    threshold: float = 0.0,
    rule: str = "point",
) -> list[TickRow]:
    """One output row per updating tick.

    ``labels`` covers every observation including the seeding one, so the
    label of record ``k`` sits at ``labels[k + 1]``.  The trade signal
    compares ``y_t`` with its one-step forecast ``f_t``.
    """
    if rule not in ("point", "conservative"):
        raise ConfigError(f"rule must be 'point' or 'conservative', got {rule!r}")
    rows = []
    for k, rec in enumerate(records):
        post = rec.posterior
        iv = b_interval(post, gamma)
        b_hat = float(post.m[1])
        if rule == "point":
            mr = abs(b_hat) < 1.0
        else:
            mr = -1.0 < iv.lower and iv.upper < 1.0
        sig = signal(rec.y, rec.f, threshold, rec.t)
        rows.append(
            TickRow(
                t=rec.t,
                date=labels[k + 1] if labels is not None else "",
                y=rec.y,
                f=rec.f,
                Q=rec.Q,
                e=rec.e,
                b_hat=b_hat,
                b_lo=iv.lower,
                b_hi=iv.upper,
                mean_reverting=mr,
                S=post.S,
                signal=sig.direction,
            )
        )
    return rows


def fmt(value) -> str:
    """CSV cell text: floats at 12 significant digits, booleans lower-case."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(path, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_checkpoint(path, state: FilterState) -> None:
    write_json(path, {"state": state.to_dict(), "hyper": state.hyper.to_dict()})


def load_checkpoint(path) -> FilterState:
    if not os.path.isfile(path):
        raise InputFileError(f"checkpoint not found: {path}")
    with open(path) as fh:
        data = json.load(fh)
    return FilterState.from_dict(data["state"], Hyperparams(**data["hyper"]))


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    if not os.path.isfile(path):
        raise InputFileError(f"config file not found: {path}")
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            out[key] = value
    return out
