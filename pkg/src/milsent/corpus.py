"""Document/sentence data model, corpus file I/O, and the MIL dataset view.

A corpus file is JSON Lines: one document object per line, UTF-8. Required
fields: ``id``, ``ticker``, ``published_at`` (ISO-8601 date), ``text``.
Optional: ``sentences`` (array of strings), ``label`` ("pos"/"neg"),
``abnormal_return`` (decimal fraction), plus pipeline-state arrays parallel
to ``sentences``: ``sentence_tokens``, ``sentence_labels``,
``sentence_scores``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import date
from typing import Iterable, Sequence

import numpy as np

POSITIVE = 1
NEGATIVE = 0

_LABEL_TO_TEXT = {POSITIVE: "pos", NEGATIVE: "neg"}
_TEXT_TO_LABEL = {"pos": POSITIVE, "neg": NEGATIVE}


class CorpusError(Exception):
    """A corpus file or document violates its contract."""


@dataclass(frozen=True)
class SentenceInstance:
    """One sentence of a document: the instance of the MIL problem."""

    text: str
    tokens: tuple[str, ...] = ()
    embedding: np.ndarray | None = None
    predicted_label: int | None = None
    score: float | None = None

    def __post_init__(self):
        if self.embedding is not None:
            emb = np.asarray(self.embedding, dtype=float)
            if emb.ndim != 1:
                raise CorpusError("sentence embedding must be a 1-d vector")
            object.__setattr__(self, "embedding", emb)
        object.__setattr__(self, "tokens", tuple(self.tokens))
        # A label may stand alone (gold annotations, dictionary output);
        # a score never does, and always agrees with its label.
        if self.score is not None:
            if self.predicted_label is None:
                raise CorpusError("score requires a predicted_label")
            expected = POSITIVE if self.score >= 0.5 else NEGATIVE
            if self.predicted_label != expected:
                raise CorpusError(
                    f"predicted_label {self.predicted_label} inconsistent with score {self.score}"
                )


@dataclass(frozen=True)
class Document:
    """A news item: the labeled group of the MIL problem."""

    id: str
    ticker: str
    published_at: date
    raw_text: str
    sentences: tuple[SentenceInstance, ...] = ()
    label: int | None = None
    abnormal_return: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if self.label is not None and self.label not in (POSITIVE, NEGATIVE):
            raise CorpusError(f"document {self.id}: label must be 0 or 1")
        if self.label is not None and self.abnormal_return is not None:
            expected = POSITIVE if self.abnormal_return > 0 else NEGATIVE
            if self.label != expected:
                raise CorpusError(
                    f"document {self.id}: label contradicts abnormal return "
                    f"{self.abnormal_return}"
                )


@dataclass(frozen=True)
class MilDataset:
    """Groups of instance vectors with binary group labels."""

    groups: tuple[tuple[np.ndarray, int], ...]
    dim: int

    def __post_init__(self):
        norm = []
        for matrix, label in self.groups:
            matrix = np.asarray(matrix, dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] == 0:
                raise CorpusError("every group must be a non-empty instance matrix")
            if matrix.shape[1] != self.dim:
                raise CorpusError(
                    f"group dimension {matrix.shape[1]} != dataset dimension {self.dim}"
                )
            if label not in (POSITIVE, NEGATIVE):
                raise CorpusError("group labels must be 0 or 1")
            norm.append((matrix, int(label)))
        object.__setattr__(self, "groups", tuple(norm))

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def n_instances(self) -> int:
        return sum(len(matrix) for matrix, _ in self.groups)


def _parse_record(obj: dict, line_no: int) -> Document:
    for key in ("id", "ticker", "published_at", "text"):
        if key not in obj:
            raise CorpusError(f"line {line_no}: record missing required field {key!r}")
    try:
        published = date.fromisoformat(str(obj["published_at"]))
    except ValueError as exc:
        raise CorpusError(f"line {line_no}: bad published_at: {exc}") from exc

    label = None
    if obj.get("label") is not None:
        try:
            label = _TEXT_TO_LABEL[obj["label"]]
        except KeyError:
            raise CorpusError(
                f"line {line_no}: label must be 'pos' or 'neg', got {obj['label']!r}"
            ) from None

    texts = obj.get("sentences") or []
    tokens = obj.get("sentence_tokens") or [None] * len(texts)
    labels = obj.get("sentence_labels") or [None] * len(texts)
    scores = obj.get("sentence_scores") or [None] * len(texts)
    if not (len(texts) == len(tokens) == len(labels) == len(scores)):
        raise CorpusError(f"line {line_no}: sentence arrays have mismatched lengths")

    sentences = []
    for text, toks, lab, score in zip(texts, tokens, labels, scores):
        if lab is not None:
            if lab not in _TEXT_TO_LABEL:
                raise CorpusError(f"line {line_no}: bad sentence label {lab!r}")
            lab = _TEXT_TO_LABEL[lab]
        sentences.append(
            SentenceInstance(
                text=text,
                tokens=tuple(toks) if toks else (),
                predicted_label=lab,
                score=score,
            )
        )

    try:
        return Document(
            id=str(obj["id"]),
            ticker=str(obj["ticker"]),
            published_at=published,
            raw_text=obj["text"],
            sentences=tuple(sentences),
            label=label,
            abnormal_return=obj.get("abnormal_return"),
        )
    except CorpusError as exc:
        raise CorpusError(f"line {line_no}: {exc}") from exc


def load_corpus(path) -> list[Document]:
    """Read a JSON-Lines corpus file; malformed records name their line."""
    docs: list[Document] = []
    seen: set[str] = set()
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: malformed record: {exc}") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"line {line_no}: record is not an object")
            doc = _parse_record(obj, line_no)
            if doc.id in seen:
                raise CorpusError(f"line {line_no}: duplicate document id {doc.id!r}")
            seen.add(doc.id)
            docs.append(doc)
    return docs


def _record_of(doc: Document) -> dict:
    record: dict = {
        "id": doc.id,
        "ticker": doc.ticker,
        "published_at": doc.published_at.isoformat(),
        "text": doc.raw_text,
    }
    if doc.sentences:
        record["sentences"] = [s.text for s in doc.sentences]
        if any(s.tokens for s in doc.sentences):
            record["sentence_tokens"] = [list(s.tokens) for s in doc.sentences]
        if any(s.predicted_label is not None for s in doc.sentences):
            record["sentence_labels"] = [
                None if s.predicted_label is None else _LABEL_TO_TEXT[s.predicted_label]
                for s in doc.sentences
            ]
            if any(s.score is not None for s in doc.sentences):
                record["sentence_scores"] = [s.score for s in doc.sentences]
    if doc.label is not None:
        record["label"] = _LABEL_TO_TEXT[doc.label]
    if doc.abnormal_return is not None:
        record["abnormal_return"] = doc.abnormal_return
    return record


def save_corpus(docs: Iterable[Document], path) -> None:
    """Write a corpus file; load_corpus(save_corpus(c)) reproduces all fields."""
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(json.dumps(_record_of(doc), ensure_ascii=False))
            handle.write("\n")


def to_mil_dataset(corpus: Sequence[Document]) -> MilDataset:
    """One group per labeled document, in corpus order, sentences in order.

    Every document must carry a label and every sentence an embedding of the
    corpus-wide dimension.
    """
    groups = []
    dim: int | None = None
    for doc in corpus:
        if doc.label is None:
            raise CorpusError(f"document {doc.id} has no label")
        if not doc.sentences:
            raise CorpusError(f"document {doc.id} has no sentences")
        vectors = []
        for idx, sentence in enumerate(doc.sentences):
            if sentence.embedding is None:
                raise CorpusError(f"document {doc.id}: sentence {idx} has no embedding")
            if dim is None:
                dim = len(sentence.embedding)
            elif len(sentence.embedding) != dim:
                raise CorpusError(
                    f"document {doc.id}: embedding dimension "
                    f"{len(sentence.embedding)} != corpus dimension {dim}"
                )
            vectors.append(sentence.embedding)
        groups.append((np.stack(vectors), doc.label))
    return MilDataset(groups=tuple(groups), dim=0 if dim is None else dim)


def with_predictions(
    doc: Document, labels: Sequence[int], scores: Sequence[float]
) -> Document:
    """Attach per-sentence predictions, returning a new document."""
    if len(labels) != len(doc.sentences) or len(scores) != len(doc.sentences):
        raise CorpusError(f"document {doc.id}: prediction arrays mismatch sentences")
    sentences = tuple(
        replace(s, predicted_label=int(lab), score=float(score))
        for s, lab, score in zip(doc.sentences, labels, scores)
    )
    return replace(doc, sentences=sentences)
