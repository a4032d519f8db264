"""Adaptive trend extraction by stitched overlapping polynomial fits.

The signal is partitioned into segments of length 2n+1 advancing by n
points, so neighboring segments overlap by n+1 points. Each segment gets a
least-squares polynomial, and overlapped regions are blended with weights
that fall linearly with distance from each segment's center, which removes
jumps at segment boundaries. The last segment is anchored to end exactly at
the final valid point; its (possibly longer) overlap is blended with the
same linear weighting stretched over the actual overlap length.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import NumericalError

__all__ = [
    "FilterConfig",
    "SegmentFit",
    "TrendSeries",
    "fit_segment",
    "stitch",
    "adaptive_trend",
    "write_trend",
]


@dataclass(frozen=True)
class FilterConfig:
    """Segment half-width ``n`` and polynomial order policy.

    ``policy="fixed"`` always fits order ``order``; ``policy="select"``
    tries orders 1..order and keeps the one with the best adjusted R^2.
    """

    n: int = 14
    order: int = 2
    policy: str = "fixed"

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"half-window must be >= 2, got {self.n}")
        if self.order < 1:
            raise ValueError(f"polynomial order must be >= 1, got {self.order}")
        if self.policy not in ("fixed", "select"):
            raise ValueError(f"unknown order policy {self.policy!r}")
        if self.segment_length < self.order + 2:
            raise ValueError(
                f"segment length {self.segment_length} cannot support order {self.order}"
            )

    @property
    def segment_length(self) -> int:
        return 2 * self.n + 1


@dataclass(frozen=True)
class SegmentFit:
    """Least-squares polynomial over one segment.

    Coefficients are in ascending order (constant term first) with respect
    to the local abscissae 1..2n+1; ``fitted`` holds the polynomial values
    at those abscissae and ``gof`` the adjusted R^2 of the chosen order.
    """

    start_index: int
    coefficients: np.ndarray
    fitted: np.ndarray
    gof: float


@dataclass(frozen=True)
class TrendSeries:
    """Smooth trend aligned with the input signal (NaN where input missing)."""

    values: np.ndarray
    config: FilterConfig


def _adjusted_r2(y: np.ndarray, fitted: np.ndarray, order: int) -> float:
    n_points = len(y)
    residual = y - fitted
    ss_res = float(residual @ residual)
    centered = y - y.mean()
    ss_tot = float(centered @ centered)
    if ss_tot <= 0.0:
        r2 = 1.0 if ss_res <= 1e-300 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return 1.0 - (1.0 - r2) * (n_points - 1) / (n_points - order - 1)


def fit_segment(signal: Sequence[float] | np.ndarray, start: int, cfg: FilterConfig) -> SegmentFit:
    """Least-squares polynomial fit of one segment on abscissae 1..2n+1."""
    arr = np.asarray(signal, dtype=np.float64)
    length = cfg.segment_length
    if start < 0 or start + length > len(arr):
        raise ValueError(
            f"segment [{start}, {start + length}) does not fit a signal of length {len(arr)}"
        )
    window = arr[start : start + length]
    if not np.all(np.isfinite(window)):
        raise ValueError("segment contains missing values")
    x = np.arange(1, length + 1, dtype=np.float64)

    orders = [cfg.order] if cfg.policy == "fixed" else list(range(1, cfg.order + 1))
    best: tuple[float, np.ndarray, np.ndarray] | None = None
    for order in orders:
        coefficients = npoly.polyfit(x, window, order)
        fitted = npoly.polyval(x, coefficients)
        gof = _adjusted_r2(window, fitted, order)
        if best is None or gof > best[0]:
            best = (gof, coefficients, fitted)
    assert best is not None
    gof, coefficients, fitted = best
    return SegmentFit(start_index=start, coefficients=coefficients, fitted=fitted, gof=gof)


def _blend(left_overlap: np.ndarray, right_overlap: np.ndarray) -> np.ndarray:
    # Linear weights over the actual overlap length; the ends reproduce the
    # respective segment fits exactly.
    length = len(left_overlap)
    w_right = np.arange(length, dtype=np.float64) / (length - 1)
    return (1.0 - w_right) * left_overlap + w_right * right_overlap


def stitch(left: SegmentFit, right: SegmentFit, n: int) -> np.ndarray:
    """Blend two segment fits over their n+1 shared points.

    Point l of the overlap (l = 1..n+1) gets weight 1-(l-1)/n on the left
    fit and (l-1)/n on the right fit, so l=1 equals the left value and
    l=n+1 the right value.
    """
    length = 2 * n + 1
    if len(left.fitted) != length or len(right.fitted) != length:
        raise ValueError(
            f"segment fits must have length {length}, got "
            f"{len(left.fitted)} and {len(right.fitted)}"
        )
    if right.start_index - left.start_index != n:
        raise ValueError(
            "segments must overlap by exactly n+1 points "
            f"(start indices {left.start_index} and {right.start_index}, n={n})"
        )
    return _blend(left.fitted[n:], right.fitted[: n + 1])


def adaptive_trend(signal: Sequence[float] | np.ndarray, cfg: FilterConfig) -> TrendSeries:
    """Fit the global smooth trend of a signal with NaN edges preserved.

    The valid (finite) part of the signal must be contiguous and at least
    2n+1 points long.
    """
    arr = np.asarray(signal, dtype=np.float64)
    finite = np.isfinite(arr)
    valid_positions = np.flatnonzero(finite)
    if len(valid_positions) == 0:
        raise NumericalError("signal has no valid values")
    first, last = int(valid_positions[0]), int(valid_positions[-1])
    if not finite[first : last + 1].all():
        raise ValueError("signal has interior missing values; only edge gaps are allowed")
    core = arr[first : last + 1]
    n_valid = len(core)
    seg_len = cfg.segment_length
    if n_valid < seg_len:
        raise NumericalError(
            f"valid range too short for filtering: need at least {seg_len} "
            f"points, got {n_valid}"
        )

    starts = list(range(0, n_valid - seg_len + 1, cfg.n))
    final_start = n_valid - seg_len
    if starts[-1] != final_start:
        starts.append(final_start)  # anchored tail segment, overlap > n+1

    segments = [fit_segment(core, start, cfg) for start in starts]
    trend_core = np.empty(n_valid)
    trend_core[: seg_len] = segments[0].fitted
    for previous, current in zip(segments, segments[1:]):
        overlap_start = current.start_index
        overlap_end = previous.start_index + seg_len  # exclusive
        stitched = _blend(
            previous.fitted[overlap_start - previous.start_index :],
            current.fitted[: overlap_end - overlap_start],
        )
        trend_core[overlap_start:overlap_end] = stitched
        trend_core[overlap_end : current.start_index + seg_len] = current.fitted[
            overlap_end - current.start_index :
        ]

    values = np.full(len(arr), np.nan)
    values[first : last + 1] = trend_core
    return TrendSeries(values=values, config=cfg)


def write_trend(
    doc_ids: Sequence[str],
    dates: Sequence,
    signal: np.ndarray,
    trend: TrendSeries,
    path: str | Path,
    signal_name: str = "signal",
) -> None:
    """Write doc_id,date,signal,trend rows plus a sidecar .meta parameter file."""
    import csv
    import math

    def cell(value: float) -> str:
        return "" if math.isnan(value) else repr(float(value))

    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "date", "signal", "trend"])
        for i, doc_id in enumerate(doc_ids):
            writer.writerow(
                [doc_id, dates[i].isoformat(), cell(signal[i]), cell(trend.values[i])]
            )
    meta = path.with_suffix(path.suffix + ".meta")
    meta.write_text(
        f"signal = {signal_name}\n"
        f"filter.n = {trend.config.n}\n"
        f"filter.order = {trend.config.order}\n"
        f"filter.policy = {trend.config.policy}\n",
        encoding="utf-8",
    )
