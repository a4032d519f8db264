"""Seeded synthetic topic-distribution streams with known event structure.

The baseline regime is a slow random walk on the simplex (Gaussian steps in
logit space) with per-document jitter. Walk movement makes nearby documents
resemble each other more than distant ones, while jitter makes a document
differ equally from past and future; blending the two produces the positive
novelty-resonance coupling the detector assumes, at a slope set by the
drift-to-jitter ratio.

An injected event pulls documents toward one fixed "catastrophe"
distribution with mixing weight ``strength``, which also shrinks every
residual deviation by (1 - strength): content collapses onto a single story
and repeats. The pull is anchored to the walk position at event start (the
hidden walk keeps advancing underneath, so the post-event stream rejoins it
untouched) and ramps in and out linearly at the event edges. The ramps are
deliberately long enough to span a signal window: documents there move at
constant speed through topic space, which reads as elevated novelty with
near-zero resonance rather than as a coupled novelty/resonance spike, with
a resonance bump where the motion decelerates into the fixated phase.

Inside the event the residual deviations are not fresh random jitter:
coverage swings between the story's two recurring angles, so deviations
alternate in sign along one fixed direction of topic space while their
squared amplitude fades linearly, with only a small random residue on top.
That shape is what makes the event detectable by a windowed regression of
resonance on novelty: novelty sweeps steadily downward through the event
(healthy variance inside any window) while resonance sits near a small
positive constant, so in-event window slopes concentrate tightly around
zero instead of echoing the coupled baseline.

Everything is a pure function of the configuration: identical seeds give
identical streams, and documents outside the event interval are bit-for-bit
identical to the stream generated without the event.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .topics import DocRepresentation

__all__ = [
    "InjectedEvent",
    "StreamConfig",
    "generate",
    "ground_truth",
    "write_labels",
    "DEFAULT_BASE_DRIFT",
    "DEFAULT_NOISE",
]

# Shipped scales, frozen after the Monte Carlo calibration in
# demos/07_generator_calibration.py (see README): with n_docs=400, K=20 and
# w=7 the end-to-end baseline slope of resonance on novelty lands in
# [0.3, 0.8] for every one of 100 calibration seeds, with mean near 0.6.
DEFAULT_BASE_DRIFT = 0.08
DEFAULT_NOISE = 0.2

# Event-shape constants (not exposed in StreamConfig): edge ramp length,
# scale of the catastrophe distribution's logits, the starting amplitude of
# the in-event deviations relative to the baseline jitter, the fraction of
# the squared amplitude left by event end, and the relative size of the
# random residue riding on the alternation. The squared amplitude fades
# linearly so that in-event novelty declines linearly too, which keeps
# resonance near a constant and the in-event novelty-resonance slope pinned
# at zero; the residue is kept small because random jitter would hand the
# slope estimates their own noise floor.
_RAMP_CAP = 12
_CATASTROPHE_SCALE = 1.0
_EVENT_AMPLITUDE = 0.5
_FADE_FLOOR = 0.05
_RESIDUE = 0.05


@dataclass(frozen=True)
class InjectedEvent:
    """Interval of documents pulled toward a fixed catastrophe distribution."""

    start: int
    length: int
    strength: float

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"event start must be >= 0, got {self.start}")
        if self.length < 1:
            raise ValueError(f"event length must be >= 1, got {self.length}")
        if not 0.0 < self.strength <= 1.0:
            raise ValueError(f"event strength must be in (0, 1], got {self.strength}")


@dataclass(frozen=True)
class StreamConfig:
    """Generator settings; ``event=None`` produces a pure baseline stream."""

    n_docs: int
    k: int = 20
    seed: int = 0
    base_drift: float = DEFAULT_BASE_DRIFT
    noise: float = DEFAULT_NOISE
    event: InjectedEvent | None = None
    start_date: date = date(2020, 1, 1)

    def __post_init__(self) -> None:
        if self.n_docs < 1:
            raise ValueError(f"n_docs must be >= 1, got {self.n_docs}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.base_drift < 0 or self.noise < 0:
            raise ValueError("scales must be non-negative")
        if self.event is not None and self.event.start + self.event.length > self.n_docs:
            raise ValueError(
                f"event interval [{self.event.start}, "
                f"{self.event.start + self.event.length}) exceeds n_docs={self.n_docs}"
            )


def _softmax_rows(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _event_envelope(length: int) -> np.ndarray:
    """Trapezoid in [0, 1]: short linear ramps at both edges, flat hold between."""
    ramp = max(1, min(length // 4, _RAMP_CAP))
    position = np.arange(length, dtype=np.float64)
    return np.minimum(1.0, np.minimum((position + 1) / ramp, (length - position) / ramp))


def generate(cfg: StreamConfig) -> list[DocRepresentation]:
    """Generate the document stream for ``cfg``; see the module docstring."""
    rng = np.random.default_rng(cfg.seed)
    n, k = cfg.n_docs, cfg.k
    steps = rng.standard_normal((n, k))
    eta = rng.standard_normal((n, k))
    z = cfg.base_drift * np.cumsum(steps, axis=0)

    logits = z + cfg.noise * eta
    p = _softmax_rows(logits)

    if cfg.event is not None:
        ev = cfg.event
        sl = slice(ev.start, ev.start + ev.length)
        envelope = _event_envelope(ev.length)
        lam = ev.strength * envelope

        catastrophe = _softmax_rows(
            (_CATASTROPHE_SCALE * rng.standard_normal(k))[None, :]
        )[0]
        # Direction of the alternating in-event deviations, plus residue.
        direction = rng.standard_normal(k)
        residue = rng.standard_normal((ev.length, k))

        direction *= np.sqrt(k) / np.linalg.norm(direction)
        t_local = np.arange(ev.length, dtype=np.float64)
        signs = np.where(t_local.astype(np.int64) % 2 == 0, 1.0, -1.0)
        fade = np.sqrt(1.0 + (_FADE_FLOOR - 1.0) * t_local / max(ev.length - 1, 1))
        amplitude = _EVENT_AMPLITUDE * cfg.noise * fade
        deviations = amplitude[:, None] * (
            signs[:, None] * direction[None, :] + _RESIDUE * residue
        )

        # The base of the pulled documents is anchored to the walk position
        # at event start; the hidden walk keeps advancing underneath so the
        # post-event stream rejoins it untouched. The mixing weight already
        # scales the base's deviations by (1 - lam), giving the net
        # deviation shrink of (1 - strength) during the hold phase.
        anchor = z[ev.start]
        zeta = (1.0 - envelope)[:, None] * z[sl] + envelope[:, None] * anchor[None, :]
        base = _softmax_rows(zeta + deviations)
        p[sl] = (1.0 - lam)[:, None] * base + lam[:, None] * catastrophe[None, :]

    p /= p.sum(axis=1, keepdims=True)
    return [
        DocRepresentation(
            doc_id=f"doc{i:05d}",
            timestamp=cfg.start_date + timedelta(days=i),
            p=p[i],
        )
        for i in range(n)
    ]


def ground_truth(cfg: StreamConfig) -> list[str]:
    """Per-document labels: 'event' inside the injected interval, else 'baseline'."""
    labels = ["baseline"] * cfg.n_docs
    if cfg.event is not None:
        for i in range(cfg.event.start, cfg.event.start + cfg.event.length):
            labels[i] = "event"
    return labels


def write_labels(labels: list[str], path: str | Path) -> None:
    """CSV with header index,label."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "label"])
        for i, label in enumerate(labels):
            writer.writerow([i, label])
