"""Windowed information signals over an ordered document stream.

For a document j and window w (both in documents, not calendar days):

* novelty  = mean Jensen-Shannon divergence to the w preceding documents,
* transience = mean Jensen-Shannon divergence to the w following documents,
* resonance = novelty - transience.

All divergences use log base 2, so values are in bits and the
Jensen-Shannon divergence is bounded by 1. The first and last w positions
carry missing markers (NaN) rather than shortened windows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, NumericalError
from .topics import DocRepresentation

__all__ = [
    "WindowSpec",
    "SignalSeries",
    "kld",
    "jsd",
    "novelty",
    "transience",
    "compute_signals",
    "write_signals",
    "load_signals",
]

_ROUNDING_TOL = 1e-12


@dataclass(frozen=True)
class WindowSpec:
    """Signal window size in documents."""

    w: int = 7

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ValueError(f"window size must be >= 1, got {self.w}")


@dataclass(frozen=True)
class SignalSeries:
    """Novelty/transience/resonance aligned to document order.

    All three arrays are NaN outside ``valid_slice`` = [w, n-1-w]; inside it
    resonance equals novelty minus transience exactly as computed.
    """

    doc_ids: tuple[str, ...]
    timestamps: tuple[date, ...]
    novelty: np.ndarray
    transience: np.ndarray
    resonance: np.ndarray
    window: int
    source: str | None = None

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def valid_slice(self) -> slice:
        return slice(self.window, len(self.doc_ids) - self.window)


def kld(p: Sequence[float] | np.ndarray, q: Sequence[float] | np.ndarray) -> float:
    """Kullback-Leibler divergence in bits, sum of p * log2(p/q).

    Terms with p_i = 0 contribute zero. Positions where q is zero but p is
    not carry infinite divergence and raise instead.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    mask = p > 0
    if np.any(q[mask] == 0):
        raise ValueError("infinite divergence: q is zero where p has mass")
    value = float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))
    if -_ROUNDING_TOL < value < 0:
        value = 0.0
    return value


def _jsd_rows(p: np.ndarray, block: np.ndarray) -> np.ndarray:
    """Jensen-Shannon divergence of ``p`` against each row of ``block``."""
    mid = 0.5 * (p[None, :] + block)
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(p[None, :] > 0, p[None, :] * np.log2(p[None, :] / mid), 0.0)
        right = np.where(block > 0, block * np.log2(block / mid), 0.0)
    values = 0.5 * left.sum(axis=1) + 0.5 * right.sum(axis=1)
    np.clip(values, 0.0, None, out=values)
    return values


def jsd(p: Sequence[float] | np.ndarray, q: Sequence[float] | np.ndarray) -> float:
    """Jensen-Shannon divergence in bits: the symmetrized, bounded smoothing
    of the Kullback-Leibler divergence through the midpoint distribution."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(_jsd_rows(p, q[None, :])[0])


def _stack(series: Sequence[DocRepresentation]) -> np.ndarray:
    try:
        return np.stack([rep.p for rep in series])
    except ValueError as exc:
        raise DataError("representations do not share a common dimension") from exc


def novelty(series: Sequence[DocRepresentation], j: int, spec: WindowSpec) -> float:
    """Mean divergence from the w documents preceding position j.

    Returns NaN (missing) when fewer than w documents precede j.
    """
    if not 0 <= j < len(series):
        raise IndexError(f"document index {j} out of range")
    if j < spec.w:
        return math.nan
    block = np.stack([series[j - d].p for d in range(1, spec.w + 1)])
    return float(np.mean(_jsd_rows(np.asarray(series[j].p, dtype=np.float64), block)))


def transience(series: Sequence[DocRepresentation], j: int, spec: WindowSpec) -> float:
    """Mean divergence from the w documents following position j.

    Returns NaN (missing) when fewer than w documents follow j.
    """
    if not 0 <= j < len(series):
        raise IndexError(f"document index {j} out of range")
    if j > len(series) - 1 - spec.w:
        return math.nan
    block = np.stack([series[j + d].p for d in range(1, spec.w + 1)])
    return float(np.mean(_jsd_rows(np.asarray(series[j].p, dtype=np.float64), block)))


def compute_signals(
    series: Sequence[DocRepresentation],
    spec: WindowSpec,
    source: str | None = None,
) -> SignalSeries:
    """Compute the three signals over an ordered representation sequence.

    The sequence must already be in (date, doc_id) order, as produced by the
    representation loaders and the stream generator.
    """
    n = len(series)
    if n < 2 * spec.w + 1:
        raise NumericalError(
            f"series too short for w={spec.w}: need at least {2 * spec.w + 1} "
            f"documents, got {n}"
        )
    rep_matrix = _stack(series)
    w = spec.w
    nov = np.full(n, np.nan)
    tra = np.full(n, np.nan)
    for j in range(w, n - w):
        row = rep_matrix[j]
        nov[j] = np.mean(_jsd_rows(row, rep_matrix[j - w : j][::-1]))
        tra[j] = np.mean(_jsd_rows(row, rep_matrix[j + 1 : j + w + 1]))
    res = nov - tra
    return SignalSeries(
        doc_ids=tuple(rep.doc_id for rep in series),
        timestamps=tuple(rep.timestamp for rep in series),
        novelty=nov,
        transience=tra,
        resonance=res,
        window=w,
        source=source,
    )


def write_signals(series: SignalSeries, path: str | Path) -> None:
    """CSV with header doc_id,date,novelty,transience,resonance.

    Missing values are written as empty fields.
    """

    def cell(value: float) -> str:
        return "" if math.isnan(value) else repr(float(value))

    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "date", "novelty", "transience", "resonance"])
        for i, doc_id in enumerate(series.doc_ids):
            writer.writerow(
                [
                    doc_id,
                    series.timestamps[i].isoformat(),
                    cell(series.novelty[i]),
                    cell(series.transience[i]),
                    cell(series.resonance[i]),
                ]
            )


def load_signals(path: str | Path, source: str | None = None) -> SignalSeries:
    """Read a signals CSV back into a SignalSeries.

    The window size is recovered from the leading run of missing novelty
    values, which is how :func:`compute_signals` marks the boundary.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"signals file not found: {path}")
    doc_ids: list[str] = []
    timestamps: list[date] = []
    columns: dict[str, list[float]] = {"novelty": [], "transience": [], "resonance": []}
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["doc_id", "date", "novelty", "transience", "resonance"]:
            raise DataError(f"{path}: unexpected signals header {header!r}")
        for record in reader:
            if len(record) != 5:
                raise DataError(f"{path}: malformed signals row {record!r}")
            doc_ids.append(record[0])
            try:
                timestamps.append(date.fromisoformat(record[1]))
            except ValueError as exc:
                raise DataError(
                    f"document {record[0]!r}: unparseable date {record[1]!r}"
                ) from exc
            for name, cell_value in zip(("novelty", "transience", "resonance"), record[2:]):
                columns[name].append(float(cell_value) if cell_value else math.nan)
    if not doc_ids:
        raise DataError(f"{path}: no signal rows")
    nov = np.array(columns["novelty"])
    finite = np.flatnonzero(np.isfinite(nov))
    window = int(finite[0]) if len(finite) else 0
    return SignalSeries(
        doc_ids=tuple(doc_ids),
        timestamps=tuple(timestamps),
        novelty=nov,
        transience=np.array(columns["transience"]),
        resonance=np.array(columns["resonance"]),
        window=window,
        source=source,
    )
