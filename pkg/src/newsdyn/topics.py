"""Per-document topic distributions.

Either fit a seeded collapsed-Gibbs LDA on a bag-of-words matrix, or load
externally produced probability vectors from CSV. Every vector handed
downstream is strictly positive and sums to one, so the divergence
computations never meet a zero denominator.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import DataError

__all__ = [
    "LdaConfig",
    "DocRepresentation",
    "fit_lda",
    "load_representations",
    "write_representations",
]


@dataclass(frozen=True)
class LdaConfig:
    """Collapsed Gibbs sampler settings.

    ``alpha`` defaults to 50/k when left unset. A single chain is run and
    the document-topic distribution is read off the final sweep.
    """

    k: int = 20
    alpha: float | None = None
    beta: float = 0.01
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"topic count must be >= 2, got {self.k}")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")

    @property
    def resolved_alpha(self) -> float:
        return self.alpha if self.alpha is not None else 50.0 / self.k


@dataclass(frozen=True)
class DocRepresentation:
    """Probability vector over topics for one document."""

    doc_id: str
    timestamp: date
    p: np.ndarray


def fit_lda(
    bow,
    vocab,
    cfg: LdaConfig,
    dates: Mapping[str, date],
) -> list[DocRepresentation]:
    """Fit LDA by collapsed Gibbs sampling and return smoothed document rows.

    Document-topic rows use Dirichlet smoothing,
    theta[d, k] = (n_dk + alpha) / (n_d + K * alpha), which keeps every
    component strictly positive; a zero-token document therefore comes out
    uniform. Output order follows ``bow.doc_order`` and is a deterministic
    function of the inputs and the seed.
    """
    n_docs = bow.n_docs
    if n_docs == 0:
        raise DataError("cannot fit a topic model on an empty corpus")
    if all(not row for row in bow.rows):
        raise DataError("cannot fit a topic model: every document is empty")
    missing = [doc_id for doc_id in bow.doc_order if doc_id not in dates]
    if missing:
        raise DataError(f"no date known for document(s): {', '.join(missing[:5])}")
    if cfg.k > n_docs:
        warnings.warn(
            f"topic count {cfg.k} exceeds the number of documents ({n_docs})",
            stacklevel=2,
        )

    k = cfg.k
    n_terms = len(vocab)
    alpha = cfg.resolved_alpha
    beta = cfg.beta
    rng = np.random.default_rng(cfg.seed)

    # Expand each sparse row into a flat array of term indices (ascending
    # term order within a document, repeats for counts), which fixes the
    # sampling order and hence the sampled stream.
    doc_terms: list[np.ndarray] = []
    for row in bow.rows:
        if row:
            terms = np.repeat(
                np.fromiter(sorted(row), dtype=np.int64),
                np.fromiter((row[t] for t in sorted(row)), dtype=np.int64),
            )
        else:
            terms = np.empty(0, dtype=np.int64)
        doc_terms.append(terms)

    n_dk = np.zeros((n_docs, k), dtype=np.float64)
    n_kv = np.zeros((k, n_terms), dtype=np.float64)
    n_k = np.zeros(k, dtype=np.float64)
    assignments: list[np.ndarray] = []
    for d, terms in enumerate(doc_terms):
        z = rng.integers(0, k, size=len(terms))
        assignments.append(z)
        for term, topic in zip(terms, z):
            n_dk[d, topic] += 1
            n_kv[topic, term] += 1
            n_k[topic] += 1

    v_beta = n_terms * beta
    for _ in range(cfg.iterations):
        for d, terms in enumerate(doc_terms):
            z = assignments[d]
            row_counts = n_dk[d]
            for i in range(len(terms)):
                term = terms[i]
                old = z[i]
                row_counts[old] -= 1
                n_kv[old, term] -= 1
                n_k[old] -= 1
                weights = (row_counts + alpha) * (n_kv[:, term] + beta) / (n_k + v_beta)
                cumulative = np.cumsum(weights)
                new = int(
                    np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right")
                )
                if new == k:  # guard against a rounding edge at the top
                    new = k - 1
                z[i] = new
                row_counts[new] += 1
                n_kv[new, term] += 1
                n_k[new] += 1

    doc_lengths = np.array([len(t) for t in doc_terms], dtype=np.float64)
    if np.any(doc_lengths == 0):
        empty_ids = [bow.doc_order[d] for d in np.flatnonzero(doc_lengths == 0)]
        warnings.warn(
            "zero-token document(s) receive the uniform topic vector: "
            + ", ".join(empty_ids[:10]),
            stacklevel=2,
        )
    theta = (n_dk + alpha) / (doc_lengths[:, None] + k * alpha)
    theta /= theta.sum(axis=1, keepdims=True)

    return [
        DocRepresentation(doc_id=doc_id, timestamp=dates[doc_id], p=theta[d])
        for d, doc_id in enumerate(bow.doc_order)
    ]


def _rep_header(k: int) -> list[str]:
    return ["doc_id", "date"] + [f"t{i}" for i in range(k)]


def write_representations(reps: list[DocRepresentation], path: str | Path) -> None:
    """Write vectors as CSV: doc_id,date,t0,...,t{K-1} (full float precision)."""
    if not reps:
        raise DataError("no representations to write")
    k = len(reps[0].p)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_rep_header(k))
        for rep in reps:
            writer.writerow(
                [rep.doc_id, rep.timestamp.isoformat()]
                + [repr(float(v)) for v in rep.p]
            )


def load_representations(path: str | Path) -> list[DocRepresentation]:
    """Load and validate representation vectors from CSV.

    Every component must be strictly positive and each row must sum to one
    within 1e-6; rows are renormalized to machine precision and returned
    sorted by (date, doc_id). The topic count is fixed by the header.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"representation file not found: {path}")
    reps: list[DocRepresentation] = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty representation file")
        if header[:2] != ["doc_id", "date"] or len(header) < 4:
            raise DataError(f"{path}: unexpected representation header {header!r}")
        k = len(header) - 2
        if header[2:] != [f"t{i}" for i in range(k)]:
            raise DataError(f"{path}: topic columns must be t0..t{k - 1}")
        for record in reader:
            if len(record) != k + 2:
                raise DataError(
                    f"{path}: row for {record[0] if record else '?'!r} has "
                    f"{len(record) - 2} probability columns, expected {k}"
                )
            doc_id = record[0]
            try:
                ts = date.fromisoformat(record[1])
            except ValueError as exc:
                raise DataError(
                    f"document {doc_id!r}: unparseable date {record[1]!r}"
                ) from exc
            try:
                p = np.array([float(v) for v in record[2:]], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"document {doc_id!r}: non-numeric probability") from exc
            if np.any(p <= 0):
                raise DataError(
                    f"document {doc_id!r}: non-positive component "
                    f"(index {int(np.argmin(p))})"
                )
            total = float(p.sum())
            if abs(total - 1.0) > 1e-6:
                raise DataError(
                    f"document {doc_id!r}: probabilities sum to {total:.9g}, "
                    "deviation from 1 exceeds 1e-06"
                )
            reps.append(DocRepresentation(doc_id=doc_id, timestamp=ts, p=p / total))
    if not reps:
        raise DataError(f"{path}: no representation rows")
    reps.sort(key=lambda r: (r.timestamp, r.doc_id))
    return reps
