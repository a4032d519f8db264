"""Corpus parsing, text normalization, and bag-of-words construction.

Input corpora are JSONL files (one object per line) with fields ``id``,
``date`` (ISO day), ``source`` and ``text``. Documents are kept in a stable
temporal order throughout the pipeline: ascending by (date, id).
"""

from __future__ import annotations

import csv
import json
import warnings
from collections import Counter
from dataclasses import dataclass, replace
from datetime import date
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError

__all__ = [
    "Document",
    "Vocabulary",
    "BowMatrix",
    "parse_corpus",
    "tokenize",
    "normalize",
    "build_bow",
    "load_stopwords",
    "builtin_stopwords",
    "load_stem_map",
    "write_bow",
    "read_bow",
    "write_vocabulary",
    "read_vocabulary",
    "write_documents",
    "read_documents",
]

_NUMERAL_EXTRAS = frozenset(".,-")


@dataclass(frozen=True)
class Document:
    """One timestamped news item.

    ``tokens`` is empty until :func:`normalize` has been applied; it then
    holds casefolded terms with numerals and stopwords removed.
    """

    id: str
    timestamp: date
    source: str
    raw_text: str
    tokens: tuple[str, ...] = ()


@dataclass(frozen=True)
class Vocabulary:
    """Bijection between terms and contiguous integer ids, in first-occurrence order."""

    terms: tuple[str, ...]
    index: Mapping[str, int]

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> "Vocabulary":
        ordered = tuple(terms)
        return cls(terms=ordered, index={t: i for i, t in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class BowMatrix:
    """Sparse per-document term counts aligned with ``doc_order``.

    ``rows[i]`` maps term index to count for the document ``doc_order[i]``.
    Documents that lost every token during normalization keep an empty row
    and are listed in ``empty_doc_ids``.
    """

    rows: tuple[Mapping[int, int], ...]
    doc_order: tuple[str, ...]
    empty_doc_ids: tuple[str, ...] = ()

    @property
    def n_docs(self) -> int:
        return len(self.doc_order)


def parse_corpus(path: str | Path, format: str = "jsonl") -> list[Document]:
    """Read a corpus file and return documents sorted ascending by (date, id).

    Raw text is preserved verbatim; tokens stay empty until normalization.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format: {format!r}")
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")

    docs: list[Document] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise DataError(f"line {lineno}: expected a JSON object")
            for field_name in ("id", "date", "source", "text"):
                if field_name not in obj:
                    raise DataError(f"line {lineno}: missing field {field_name!r}")
            doc_id = str(obj["id"])
            if not doc_id:
                raise DataError(f"line {lineno}: empty document id")
            if doc_id in seen:
                raise DataError(f"duplicate document id {doc_id!r}")
            seen.add(doc_id)
            try:
                ts = date.fromisoformat(str(obj["date"]))
            except ValueError as exc:
                raise DataError(
                    f"document {doc_id!r}: unparseable date {obj['date']!r}"
                ) from exc
            docs.append(
                Document(
                    id=doc_id,
                    timestamp=ts,
                    source=str(obj["source"]),
                    raw_text=str(obj["text"]),
                )
            )
    docs.sort(key=lambda d: (d.timestamp, d.id))
    return docs


def _strip_edges(token: str) -> str:
    """Drop leading/trailing non-alphanumeric characters, keeping the interior."""
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def _is_numeral(token: str) -> bool:
    # Removed iff every char is a decimal digit or a digit-group separator,
    # with at least one digit. Mixed alphanumerics ("covid-19") are kept.
    has_digit = False
    for ch in token:
        if ch.isdigit():
            has_digit = True
        elif ch not in _NUMERAL_EXTRAS:
            return False
    return has_digit


def tokenize(text: str) -> list[str]:
    """Casefold and split on whitespace, trimming edge punctuation per token."""
    out = []
    for raw in text.casefold().split():
        tok = _strip_edges(raw)
        if tok:
            out.append(tok)
    return out


def normalize(
    doc: Document,
    stopwords: frozenset[str] | set[str] = frozenset(),
    stem_map: Mapping[str, str] | None = None,
) -> Document:
    """Return a copy of ``doc`` with tokens derived from its raw text.

    Pipeline: tokenize, drop numeral tokens, drop stopwords, then apply the
    term mapping (identity for unmapped terms). Stopwords must already be
    casefolded. Recomputing from raw text makes the operation idempotent.
    """
    stem_map = stem_map or {}
    tokens = []
    for tok in tokenize(doc.raw_text):
        if _is_numeral(tok):
            continue
        if tok in stopwords:
            continue
        tokens.append(stem_map.get(tok, tok))
    return replace(doc, tokens=tuple(tokens))


def build_bow(docs: list[Document]) -> tuple[Vocabulary, BowMatrix]:
    """Build the vocabulary (first-occurrence order) and sparse count rows.

    Documents are ordered by (date, id). Zero-token documents are retained
    with empty rows, reported in ``BowMatrix.empty_doc_ids`` and through a
    warning.
    """
    if not docs:
        raise DataError("cannot build a bag-of-words model from an empty corpus")
    ordered = sorted(docs, key=lambda d: (d.timestamp, d.id))
    if all(len(d.tokens) == 0 for d in ordered):
        raise DataError("all documents have empty token lists")

    terms: list[str] = []
    index: dict[str, int] = {}
    rows: list[dict[int, int]] = []
    empty: list[str] = []
    for doc in ordered:
        if not doc.tokens:
            empty.append(doc.id)
            rows.append({})
            continue
        counts = Counter(doc.tokens)
        row: dict[int, int] = {}
        for term, count in counts.items():
            if term not in index:
                index[term] = len(terms)
                terms.append(term)
            row[index[term]] = count
        rows.append(row)

    if empty:
        warnings.warn(
            f"{len(empty)} document(s) have no tokens after normalization: "
            + ", ".join(empty[:10])
            + ("..." if len(empty) > 10 else ""),
            stacklevel=2,
        )
    vocab = Vocabulary.from_terms(terms)
    bow = BowMatrix(
        rows=tuple(rows),
        doc_order=tuple(d.id for d in ordered),
        empty_doc_ids=tuple(empty),
    )
    return vocab, bow


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword file: UTF-8, one term per line, casefolded on load."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"stopword file not found: {path}")
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        term = line.strip().casefold()
        if term:
            words.add(term)
    return frozenset(words)


def builtin_stopwords(language: str) -> frozenset[str]:
    """Return one of the shipped stopword lists; ``language`` is 'da' or 'en'."""
    name = {"da": "stopwords_da.txt", "en": "stopwords_en.txt"}.get(language)
    if name is None:
        raise ValueError(f"no builtin stopword list for language {language!r}")
    text = resources.files("newsdyn.data").joinpath(name).read_text(encoding="utf-8")
    return frozenset(t.strip().casefold() for t in text.splitlines() if t.strip())


def load_stem_map(path: str | Path) -> dict[str, str]:
    """Read a term-mapping file: UTF-8 TSV lines ``surface<TAB>lemma``."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"stem-map file not found: {path}")
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"stem-map line {lineno}: expected 'surface<TAB>lemma'")
        mapping[parts[0].strip().casefold()] = parts[1].strip().casefold()
    return mapping


def write_bow(bow: BowMatrix, path: str | Path) -> None:
    """Write counts as a sparse triplet CSV: doc_index,term_index,count."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_index", "term_index", "count"])
        for doc_index, row in enumerate(bow.rows):
            for term_index in sorted(row):
                writer.writerow([doc_index, term_index, row[term_index]])


def read_bow(path: str | Path, doc_order: Iterable[str]) -> BowMatrix:
    """Read a sparse triplet CSV back into a BowMatrix.

    ``doc_order`` must be the id sequence the matrix was written with (the
    triplet file alone cannot represent trailing empty documents).
    """
    order = tuple(doc_order)
    rows: list[dict[int, int]] = [{} for _ in order]
    path = Path(path)
    if not path.exists():
        raise DataError(f"bag-of-words file not found: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["doc_index", "term_index", "count"]:
            raise DataError(f"{path}: unexpected bag-of-words header {header!r}")
        for record in reader:
            if len(record) != 3:
                raise DataError(f"{path}: malformed triplet row {record!r}")
            doc_index, term_index, count = (int(v) for v in record)
            if not 0 <= doc_index < len(order):
                raise DataError(f"{path}: doc_index {doc_index} out of range")
            if count < 1:
                raise DataError(f"{path}: count must be >= 1, got {count}")
            rows[doc_index][term_index] = count
    empty = tuple(order[i] for i, row in enumerate(rows) if not row)
    return BowMatrix(rows=tuple(rows), doc_order=order, empty_doc_ids=empty)


def write_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """One term per line; the line number (from zero) is the term index."""
    Path(path).write_text("\n".join(vocab.terms) + "\n", encoding="utf-8")


def read_vocabulary(path: str | Path) -> Vocabulary:
    path = Path(path)
    if not path.exists():
        raise DataError(f"vocabulary file not found: {path}")
    terms = [line for line in path.read_text(encoding="utf-8").splitlines() if line]
    if len(set(terms)) != len(terms):
        raise DataError(f"{path}: vocabulary contains duplicate terms")
    return Vocabulary.from_terms(terms)


def write_documents(docs: list[Document], path: str | Path) -> None:
    """Persist document metadata (id, date, source) next to the BoW files."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "date", "source"])
        for doc in docs:
            writer.writerow([doc.id, doc.timestamp.isoformat(), doc.source])


def read_documents(path: str | Path) -> list[Document]:
    """Read the metadata CSV back; raw text and tokens are left empty."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"document metadata file not found: {path}")
    docs = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["doc_id", "date", "source"]:
            raise DataError(f"{path}: unexpected document header {header!r}")
        for record in reader:
            if len(record) != 3:
                raise DataError(f"{path}: malformed document row {record!r}")
            doc_id, iso, source = record
            try:
                ts = date.fromisoformat(iso)
            except ValueError as exc:
                raise DataError(f"document {doc_id!r}: unparseable date {iso!r}") from exc
            docs.append(Document(id=doc_id, timestamp=ts, source=source, raw_text=""))
    return docs
