"""Windowed novelty-resonance slopes and decoupling episode detection.

The working model is a simple linear regression of resonance on novelty.
Under ordinary conditions the two signals are positively coupled; during a
catastrophic, single-story period the association collapses, which shows up
as the windowed slope dropping toward (or below) zero. An episode is
reported when the windowed slope stays below ``tau`` times the pre-event
baseline slope for at least ``min_run`` consecutive windows.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError, NumericalError
from .infodyn import SignalSeries

__all__ = [
    "SlopeFit",
    "EventSpec",
    "WindowSlope",
    "SlidingWindow",
    "Episode",
    "BaselineSummary",
    "DecouplingReport",
    "ols_fit",
    "baseline_slopes",
    "event_window_slopes",
    "detect",
    "slope_report_rows",
    "write_slope_report",
    "write_episodes",
]

# Shipped detector settings, fixed by the same Monte Carlo calibration that
# froze the generator scales (see demos/07_generator_calibration.py): on 100
# calibration streams the combination below detects every injected event as
# a single episode while flagging 2 of 100 event-free streams.
DEFAULT_TAU = 0.25
DEFAULT_FLOOR = 0.2
DEFAULT_SLIDING_W = 21
DEFAULT_MIN_RUN = 17


@dataclass(frozen=True)
class SlopeFit:
    """Ordinary least squares fit of resonance on novelty."""

    beta0: float
    beta1: float
    stderr1: float
    r2: float
    n_points: int


@dataclass(frozen=True)
class EventSpec:
    """A named calendar date splitting the stream into comparison windows."""

    name: str
    date: date


@dataclass(frozen=True)
class WindowSlope:
    """Slope fit over one event-defined window; ``fit`` is None when unfit."""

    label: str
    start_date: date
    end_date: date
    fit: SlopeFit | None
    reason: str | None = None


@dataclass(frozen=True)
class SlidingWindow:
    """Slope fit over ``sliding_w`` consecutive valid documents."""

    start_index: int
    start_date: date
    end_date: date
    fit: SlopeFit
    score: float
    decoupled: bool

    @property
    def verdict(self) -> str:
        return "decoupled" if self.decoupled else "coupled"


@dataclass(frozen=True)
class Episode:
    """A maximal run of consecutively decoupled sliding windows."""

    onset_date: date
    end_date: date
    min_score: float
    n_windows: int


@dataclass(frozen=True)
class BaselineSummary:
    """Per-source baseline slopes with their cross-source spread."""

    fits: Mapping[str, SlopeFit]
    mean_beta1: float
    sd_beta1: float
    excluded: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class DecouplingReport:
    baseline: SlopeFit
    windows: tuple[SlidingWindow, ...]
    episodes: tuple[Episode, ...]
    tau: float
    floor: float
    sliding_w: int
    min_run: int


def ols_fit(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> SlopeFit:
    """Least-squares line y = beta0 + beta1 * x with slope standard error.

    Pairs with a missing (non-finite) component are dropped before fitting.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"x and y must be 1-d and equally long: {x.shape} vs {y.shape}")
    mask = np.isfinite(x) & np.isfinite(y)
    xs, ys = x[mask], y[mask]
    n = len(xs)
    if n < 3:
        raise NumericalError(f"need at least 3 complete pairs, got {n}")
    if np.all(xs == xs[0]):
        raise NumericalError("zero variance in x; slope undefined")

    x_mean = xs.mean()
    y_mean = ys.mean()
    dx = xs - x_mean
    dy = ys - y_mean
    sxx = float(dx @ dx)
    beta1 = float(dx @ dy) / sxx
    beta0 = y_mean - beta1 * x_mean
    residual = ys - beta0 - beta1 * xs
    ss_res = float(residual @ residual)
    ss_tot = float(dy @ dy)
    stderr1 = math.sqrt(max(ss_res, 0.0) / (n - 2) / sxx)
    if ss_tot <= 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return SlopeFit(beta0=float(beta0), beta1=beta1, stderr1=stderr1, r2=r2, n_points=n)


def _as_source_map(
    signals: Mapping[str, SignalSeries] | Iterable[SignalSeries],
) -> dict[str, SignalSeries]:
    if isinstance(signals, Mapping):
        return dict(signals)
    out: dict[str, SignalSeries] = {}
    for i, series in enumerate(signals):
        out[series.source or f"series{i}"] = series
    return out


def baseline_slopes(
    signals: Mapping[str, SignalSeries] | Iterable[SignalSeries],
    cutoff: date,
) -> BaselineSummary:
    """Per-source slope of resonance on novelty over documents dated before ``cutoff``.

    Sources without enough complete pre-cutoff pairs are excluded with a
    warning; the summary reports the mean and standard deviation of the
    remaining slopes.
    """
    fits: dict[str, SlopeFit] = {}
    excluded: list[tuple[str, str]] = []
    for source, series in _as_source_map(signals).items():
        dates_arr = np.array([ts < cutoff for ts in series.timestamps])
        try:
            fits[source] = ols_fit(
                np.where(dates_arr, series.novelty, np.nan),
                np.where(dates_arr, series.resonance, np.nan),
            )
        except NumericalError as exc:
            excluded.append((source, str(exc)))
            warnings.warn(f"source {source!r} excluded from baseline: {exc}", stacklevel=2)
    if not fits:
        raise NumericalError("no source has enough valid data before the cutoff")
    slopes = np.array([fit.beta1 for fit in fits.values()])
    sd = float(np.std(slopes, ddof=1)) if len(slopes) > 1 else 0.0
    return BaselineSummary(
        fits=fits,
        mean_beta1=float(slopes.mean()),
        sd_beta1=sd,
        excluded=tuple(excluded),
    )


def event_window_slopes(
    signals: SignalSeries,
    events: Sequence[EventSpec],
) -> list[WindowSlope]:
    """Slope fits over the windows induced by the event dates.

    Windows partition the stream: [start, e1), [e1, e2), ..., [ek, end].
    Windows with fewer than 3 complete pairs are reported unfit with a
    reason instead of a fit.
    """
    for previous, current in zip(events, events[1:]):
        if current.date <= previous.date:
            raise DataError(
                f"event dates must be strictly increasing: {previous.name!r} "
                f"({previous.date}) then {current.name!r} ({current.date})"
            )
    if len(signals) == 0:
        raise DataError("empty signal series")
    ts = signals.timestamps
    boundaries: list[tuple[str, date, date]] = []
    if not events:
        boundaries.append(("full", ts[0], ts[-1]))
    else:
        boundaries.append((f"→{events[0].name}", ts[0], events[0].date))
        for previous, current in zip(events, events[1:]):
            boundaries.append(
                (f"{previous.name}→{current.name}", previous.date, current.date)
            )
        boundaries.append((f"{events[-1].name}→", events[-1].date, ts[-1]))

    out: list[WindowSlope] = []
    stamps = np.array([t.toordinal() for t in ts])
    for i, (label, start, end) in enumerate(boundaries):
        if not events:
            in_window = np.ones(len(ts), dtype=bool)
        elif i == 0:
            in_window = stamps < events[0].date.toordinal()
        elif i == len(boundaries) - 1:
            in_window = stamps >= events[-1].date.toordinal()
        else:
            in_window = (stamps >= events[i - 1].date.toordinal()) & (
                stamps < events[i].date.toordinal()
            )
        x = np.where(in_window, signals.novelty, np.nan)
        y = np.where(in_window, signals.resonance, np.nan)
        n_pairs = int(np.sum(np.isfinite(x) & np.isfinite(y)))
        if not np.any(in_window):
            out.append(WindowSlope(label, start, end, None, "no documents in window"))
            continue
        try:
            fit = ols_fit(x, y)
        except NumericalError as exc:
            out.append(WindowSlope(label, start, end, None, f"{exc} ({n_pairs} pairs)"))
            continue
        out.append(WindowSlope(label, start, end, fit))
    return out


def detect(
    signals: SignalSeries,
    baseline_cutoff: date,
    sliding_w: int = DEFAULT_SLIDING_W,
    tau: float = DEFAULT_TAU,
    floor: float = DEFAULT_FLOOR,
    min_run: int = DEFAULT_MIN_RUN,
) -> DecouplingReport:
    """Detect decoupling episodes against the pre-cutoff baseline slope.

    A slope is fitted over every window of ``sliding_w`` consecutive valid
    documents (stride 1). A window is decoupled when its slope falls below
    ``tau`` times the baseline slope; an episode is a run of at least
    ``min_run`` consecutively decoupled windows, and its onset is the first
    date of the first window in the run.
    """
    if sliding_w < 3:
        raise ValueError(f"sliding window must be >= 3 documents, got {sliding_w}")
    if min_run < 1:
        raise ValueError(f"min_run must be >= 1, got {min_run}")

    valid = np.flatnonzero(np.isfinite(signals.novelty) & np.isfinite(signals.resonance))
    pre_cutoff = [i for i in valid if signals.timestamps[i] < baseline_cutoff]
    try:
        baseline = ols_fit(
            signals.novelty[pre_cutoff], signals.resonance[pre_cutoff]
        )
    except NumericalError as exc:
        raise NumericalError(f"cannot fit baseline slope before {baseline_cutoff}: {exc}")
    if baseline.beta1 <= floor:
        raise NumericalError(
            f"no coupled baseline: slope {baseline.beta1:.6g} is at or below the "
            f"coupling floor {floor:.6g}; decoupling detection is undefined"
        )

    windows: list[SlidingWindow] = []
    for start in range(0, len(valid) - sliding_w + 1):
        idx = valid[start : start + sliding_w]
        try:
            fit = ols_fit(signals.novelty[idx], signals.resonance[idx])
        except NumericalError:
            continue  # degenerate window; treated as unfit and unflagged
        score = fit.beta1 / baseline.beta1
        windows.append(
            SlidingWindow(
                start_index=start,
                start_date=signals.timestamps[idx[0]],
                end_date=signals.timestamps[idx[-1]],
                fit=fit,
                score=score,
                decoupled=score < tau,
            )
        )

    episodes: list[Episode] = []
    run: list[SlidingWindow] = []
    for window in windows:
        if window.decoupled and (not run or window.start_index == run[-1].start_index + 1):
            run.append(window)
            continue
        if len(run) >= min_run:
            episodes.append(_episode_from_run(run))
        run = [window] if window.decoupled else []
    if len(run) >= min_run:
        episodes.append(_episode_from_run(run))

    return DecouplingReport(
        baseline=baseline,
        windows=tuple(windows),
        episodes=tuple(episodes),
        tau=tau,
        floor=floor,
        sliding_w=sliding_w,
        min_run=min_run,
    )


def _episode_from_run(run: list[SlidingWindow]) -> Episode:
    return Episode(
        onset_date=run[0].start_date,
        end_date=run[-1].end_date,
        min_score=min(w.score for w in run),
        n_windows=len(run),
    )


def _fmt(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(value, ".12g")


def slope_report_rows(
    windows: Sequence[WindowSlope],
    baseline: SlopeFit | None = None,
    tau: float = DEFAULT_TAU,
) -> list[list[str]]:
    """Rows for the slope report CSV; scores are relative to ``baseline``."""
    rows = []
    if baseline is not None:
        rows.append(
            [
                "baseline",
                "",
                "",
                _fmt(baseline.beta0),
                _fmt(baseline.beta1),
                _fmt(baseline.stderr1),
                _fmt(baseline.r2),
                str(baseline.n_points),
                _fmt(1.0),
                "coupled",
            ]
        )
    for window in windows:
        if window.fit is None:
            rows.append(
                [
                    window.label,
                    window.start_date.isoformat(),
                    window.end_date.isoformat(),
                    "", "", "", "", "0", "",
                    f"unfit({window.reason})",
                ]
            )
            continue
        fit = window.fit
        if baseline is not None and baseline.beta1 > 0:
            score = fit.beta1 / baseline.beta1
            verdict = "decoupled" if score < tau else "coupled"
            score_cell = _fmt(score)
        else:
            score_cell, verdict = "", ""
        rows.append(
            [
                window.label,
                window.start_date.isoformat(),
                window.end_date.isoformat(),
                _fmt(fit.beta0),
                _fmt(fit.beta1),
                _fmt(fit.stderr1),
                _fmt(fit.r2),
                str(fit.n_points),
                score_cell,
                verdict,
            ]
        )
    return rows


_REPORT_HEADER = [
    "window_label",
    "start_date",
    "end_date",
    "beta0",
    "beta1",
    "stderr1",
    "r2",
    "n_points",
    "score",
    "verdict",
]


def write_slope_report(rows: Sequence[Sequence[str]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_REPORT_HEADER)
        writer.writerows(rows)


def sliding_window_rows(report: DecouplingReport) -> list[list[str]]:
    """Slope-report rows for the detector's sliding windows."""
    rows = []
    for window in report.windows:
        rows.append(
            [
                f"{window.start_index}..{window.start_index + report.sliding_w - 1}",
                window.start_date.isoformat(),
                window.end_date.isoformat(),
                _fmt(window.fit.beta0),
                _fmt(window.fit.beta1),
                _fmt(window.fit.stderr1),
                _fmt(window.fit.r2),
                str(window.fit.n_points),
                _fmt(window.score),
                window.verdict,
            ]
        )
    return rows


def write_episodes(episodes: Sequence[Episode], path: str | Path) -> None:
    """CSV with header onset_date,end_date,min_score,n_windows."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["onset_date", "end_date", "min_score", "n_windows"])
        for episode in episodes:
            writer.writerow(
                [
                    episode.onset_date.isoformat(),
                    episode.end_date.isoformat(),
                    _fmt(episode.min_score),
                    str(episode.n_windows),
                ]
            )
