"""Text features and the button-label classifier.

TF-IDF over word tokens, seeded k-means for exploratory clustering, a
seed-phrase bootstrapper, a one-vs-rest linear max-margin classifier trained
by stochastic subgradient descent, and margin-based uncertainty sampling.
Everything is deterministic given (data, hyperparameters, seed).
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from enum import IntEnum
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

DEFAULT_LAMBDA = 1e-3
DEFAULT_EPOCHS = 50
DEFAULT_SEED = 42
DEFAULT_K = 6


class InvalidK(ValueError):
    pass


class InsufficientClasses(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class ButtonClass(IntEnum):
    """Button taxonomy; the integer order is the deterministic tiebreak."""

    ACCEPT = 0
    REJECT = 1
    SETTINGS = 2
    OTHER = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "ButtonClass":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown button class {label!r}") from None


_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase word/digit runs; punctuation and underscores split tokens."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class Vocabulary:
    index: dict[str, int]
    document_frequency: dict[str, int]
    document_count: int

    def __len__(self) -> int:
        return len(self.index)

    @property
    def terms(self) -> list[str]:
        ordered = [""] * len(self.index)
        for term, i in self.index.items():
            ordered[i] = term
        return ordered

    def idf(self, term: str) -> float:
        df = self.document_frequency[term]
        return math.log((1 + self.document_count) / (1 + df)) + 1.0


TfIdfVector = dict[int, float]


def build_vocabulary(texts: Iterable[str], min_df: int = 1) -> Vocabulary:
    """Terms with df >= min_df, indexed in first-occurrence order."""
    df: dict[str, int] = {}
    first_seen: list[str] = []
    count = 0
    for text in texts:
        count += 1
        in_doc: set[str] = set()
        for term in tokenize(text):
            if term in in_doc:
                continue
            in_doc.add(term)
            if term not in df:
                df[term] = 0
                first_seen.append(term)
            df[term] += 1
    index: dict[str, int] = {}
    frequency: dict[str, int] = {}
    for term in first_seen:
        if df[term] >= min_df:
            index[term] = len(index)
            frequency[term] = df[term]
    return Vocabulary(index=index, document_frequency=frequency, document_count=count)


def vectorize(text: str, vocab: Vocabulary) -> TfIdfVector:
    """Raw-count tf times smoothed idf, L2-normalized; OOV tokens ignored."""
    counts: dict[str, int] = {}
    for token in tokenize(text):
        if token in vocab.index:
            counts[token] = counts.get(token, 0) + 1
    weights = {vocab.index[t]: tf * vocab.idf(t) for t, tf in counts.items()}
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {i: w / norm for i, w in weights.items()}


def to_dense(vector: TfIdfVector, dim: int) -> np.ndarray:
    dense = np.zeros(dim, dtype=np.float64)
    for i, w in vector.items():
        dense[i] = w
    return dense


# -- clustering --

@dataclass
class CentroidSet:
    centroids: np.ndarray  # (k, dim)
    assignments: list[int]
    inertia: float


def _nearest(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assign = d2.argmin(axis=1)
    return assign, d2[np.arange(len(points)), assign]


def kmeans(vectors: list[TfIdfVector] | np.ndarray, k: int, seed: int = DEFAULT_SEED) -> CentroidSet:
    """Seeded k-means++ plus Lloyd iterations with empty-cluster repair."""
    if isinstance(vectors, np.ndarray):
        points = vectors.astype(np.float64)
    else:
        dim = max((max(v) + 1 for v in vectors if v), default=1)
        points = np.stack([to_dense(v, dim) for v in vectors]) if vectors else np.zeros((0, 1))
    n = len(points)
    distinct = len(np.unique(points, axis=0)) if n else 0
    if k < 1 or k > distinct:
        raise InvalidK(f"k={k} outside [1, {distinct}] for {n} points")

    rng = np.random.default_rng(seed)

    # k-means++ seeding
    centroids = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = points[first]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[c] = points[idx]
        d2 = np.minimum(d2, ((points - centroids[c]) ** 2).sum(axis=1))

    assign = np.full(n, -1)
    last_inertia = math.inf
    for _ in range(100):
        assign, dist2 = _nearest(points, centroids)
        # repair: an empty cluster steals the point farthest from its centroid
        for c in range(k):
            if not (assign == c).any():
                victim = int(dist2.argmax())
                centroids[c] = points[victim]
                assign, dist2 = _nearest(points, centroids)
        inertia = float(dist2.sum())
        assert inertia <= last_inertia + 1e-9
        last_inertia = inertia
        new_centroids = centroids.copy()
        for c in range(k):
            members = points[assign == c]
            if len(members):
                new_centroids[c] = members.mean(axis=0)
        if np.array_equal(new_centroids, centroids):
            break
        centroids = new_centroids

    assign, dist2 = _nearest(points, centroids)
    return CentroidSet(centroids=centroids, assignments=assign.tolist(), inertia=float(dist2.sum()))


# -- labels and seeds --

VALID_SOURCES = ("seed", "manual", "active")


@dataclass(frozen=True)
class LabelRecord:
    text: str
    label: ButtonClass
    source: str  # "seed" | "manual" | "active"

    def to_json(self) -> str:
        return json.dumps(
            {"text": self.text, "label": self.label.label, "source": self.source},
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "LabelRecord":
        raw = json.loads(line)
        source = raw.get("source", "manual")
        if source not in VALID_SOURCES:
            raise ValueError(f"unknown label source {source!r}")
        return cls(text=raw["text"], label=ButtonClass.from_label(raw["label"]), source=source)


def load_label_store(path: str | Path) -> list[LabelRecord]:
    records: list[LabelRecord] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(LabelRecord.from_json(line))
    return records


def append_label(path: str | Path, record: LabelRecord) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")


def default_seed_phrases() -> dict[ButtonClass, list[str]]:
    raw = json.loads(
        resources.files("consentscan").joinpath("data/seed_phrases.json").read_text("utf-8")
    )
    return {ButtonClass.from_label(name): phrases for name, phrases in raw.items()}


def _contains_phrase(text_tokens: list[str], phrase_tokens: list[str]) -> bool:
    if not phrase_tokens or len(phrase_tokens) > len(text_tokens):
        return False
    span = len(phrase_tokens)
    return any(
        text_tokens[i:i + span] == phrase_tokens
        for i in range(len(text_tokens) - span + 1)
    )


def seed_labels(
    texts: Iterable[str],
    phrases: dict[ButtonClass, list[str]] | None = None,
) -> list[LabelRecord]:
    """Match texts against the seed-phrase table; longest phrase wins."""
    table = phrases if phrases is not None else default_seed_phrases()
    compiled = [
        (cls, phrase, tokenize(phrase))
        for cls in sorted(table)
        for phrase in table[cls]
    ]
    records: list[LabelRecord] = []
    seen: set[str] = set()
    for text in texts:
        if text in seen:
            continue
        seen.add(text)
        tokens = tokenize(text)
        best: tuple[int, int, str] | None = None  # (-len, class, phrase)
        best_cls: ButtonClass | None = None
        for cls, phrase, phrase_tokens in compiled:
            if _contains_phrase(tokens, phrase_tokens):
                key = (-len(" ".join(phrase_tokens)), int(cls), phrase)
                if best is None or key < best:
                    best = key
                    best_cls = cls
        if best_cls is not None:
            records.append(LabelRecord(text=text, label=best_cls, source="seed"))
    return records


# -- classifier --

@dataclass
class LinearModel:
    weights: np.ndarray  # (n_classes, vocab_size)
    bias: np.ndarray  # (n_classes,)
    hyperparameters: dict
    fingerprint: str
    classes: tuple[ButtonClass, ...] = tuple(ButtonClass)

    def scores(self, vector: TfIdfVector) -> np.ndarray:
        out = self.bias.copy()
        for i, w in vector.items():
            if i >= self.weights.shape[1]:
                raise DimensionMismatch(
                    f"feature {i} outside model dimension {self.weights.shape[1]}"
                )
            out += self.weights[:, i] * w
        return out


def _fingerprint(records: list[LabelRecord], lam: float, epochs: int, seed: int) -> str:
    payload = json.dumps(
        {
            "records": sorted((r.text, r.label.label, r.source) for r in records),
            "lambda": lam,
            "epochs": epochs,
            "seed": seed,
        },
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def svm_objective(
    weights: np.ndarray, bias: np.ndarray, X: np.ndarray, Y: np.ndarray, lam: float
) -> float:
    """Sum over classes of (lam/2)||w||^2 + mean hinge; bias unregularized."""
    total = 0.0
    for c in range(weights.shape[0]):
        margins = Y[:, c] * (X @ weights[c] + bias[c])
        hinge = np.maximum(0.0, 1.0 - margins).mean()
        total += 0.5 * lam * float(weights[c] @ weights[c]) + float(hinge)
    return total


def train_svm(
    records: list[LabelRecord],
    vocab: Vocabulary,
    lam: float = DEFAULT_LAMBDA,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = DEFAULT_SEED,
    epoch_hook: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> LinearModel:
    """One-vs-rest hinge-loss training; returns the best epoch-end iterate.

    Step size is 1/(lam*t) with deterministic seeded shuffling per epoch.
    The iterate with the lowest full regularized objective at an epoch
    boundary is kept, so the achieved objective never regresses.
    """
    present = {r.label for r in records}
    if len(present) < 2:
        raise InsufficientClasses(f"need records from >= 2 classes, got {sorted(present)}")

    dim = len(vocab)
    classes = tuple(ButtonClass)
    n = len(records)
    X = np.zeros((n, dim), dtype=np.float64)
    for i, record in enumerate(records):
        for j, w in vectorize(record.text, vocab).items():
            X[i, j] = w
    Y = np.full((n, len(classes)), -1.0)
    for i, record in enumerate(records):
        Y[i, int(record.label)] = 1.0
    trainable = [int(c) for c in classes if c in present]

    rng = np.random.default_rng(seed)
    weights = np.zeros((len(classes), dim), dtype=np.float64)
    bias = np.zeros(len(classes), dtype=np.float64)
    best_weights = weights.copy()
    best_bias = bias.copy()
    best_objective = svm_objective(weights, bias, X, Y, lam)

    t = 0
    for epoch in range(epochs):
        order = rng.permutation(n)
        for idx in order:
            t += 1
            eta = 1.0 / (lam * t)
            x = X[idx]
            for c in trainable:
                margin = Y[idx, c] * (x @ weights[c] + bias[c])
                weights[c] *= 1.0 - eta * lam
                if margin < 1.0:
                    weights[c] += eta * Y[idx, c] * x
                    bias[c] += eta * Y[idx, c]
        objective = svm_objective(weights, bias, X, Y, lam)
        if objective <= best_objective:
            best_objective = objective
            best_weights = weights.copy()
            best_bias = bias.copy()
        if epoch_hook is not None:
            epoch_hook(epoch, best_weights.copy(), best_bias.copy())

    return LinearModel(
        weights=best_weights,
        bias=best_bias,
        hyperparameters={"lambda": lam, "epochs": epochs, "seed": seed},
        fingerprint=_fingerprint(records, lam, epochs, seed),
        classes=classes,
    )


def predict(model: LinearModel, text: str, vocab: Vocabulary) -> tuple[ButtonClass, float]:
    """Argmax class and top-minus-second margin."""
    if model.weights.shape[1] != len(vocab):
        raise DimensionMismatch(
            f"model dimension {model.weights.shape[1]} != vocabulary size {len(vocab)}"
        )
    scores = [float(s) for s in model.scores(vectorize(text, vocab))]
    top_score = max(scores)
    top = scores.index(top_score)  # first occurrence: ButtonClass-order tiebreak
    second = max(s for i, s in enumerate(scores) if i != top)
    return model.classes[top], top_score - second


@dataclass(frozen=True)
class ActiveQuery:
    text: str
    predicted: ButtonClass
    margin: float


def select_queries(
    model: LinearModel, pool: Iterable[str], batch: int, vocab: Vocabulary
) -> list[ActiveQuery]:
    """The batch pool texts with the smallest margins, ascending."""
    if batch < 1:
        raise ValueError("batch must be >= 1")
    scored: list[ActiveQuery] = []
    for text in pool:
        cls, margin = predict(model, text, vocab)
        scored.append(ActiveQuery(text=text, predicted=cls, margin=margin))
    scored.sort(key=lambda q: (q.margin, q.text))
    return scored[:batch]


# -- model persistence --

def model_to_json(model: LinearModel, vocab: Vocabulary) -> str:
    payload = {
        "schema_version": 1,
        "classes": [c.label for c in model.classes],
        "vocabulary": {
            "terms": vocab.terms,
            "document_frequency": [vocab.document_frequency[t] for t in vocab.terms],
            "document_count": vocab.document_count,
        },
        "weights": {c.label: model.weights[int(c)].tolist() for c in model.classes},
        "bias": {c.label: float(model.bias[int(c)]) for c in model.classes},
        "hyperparameters": model.hyperparameters,
        "fingerprint": model.fingerprint,
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def save_model(path: str | Path, model: LinearModel, vocab: Vocabulary) -> None:
    Path(path).write_text(model_to_json(model, vocab), encoding="utf-8")


def load_model(path: str | Path) -> tuple[LinearModel, Vocabulary]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    terms = raw["vocabulary"]["terms"]
    vocab = Vocabulary(
        index={t: i for i, t in enumerate(terms)},
        document_frequency=dict(zip(terms, raw["vocabulary"]["document_frequency"])),
        document_count=raw["vocabulary"]["document_count"],
    )
    classes = tuple(ButtonClass.from_label(c) for c in raw["classes"])
    weights = np.array([raw["weights"][c.label] for c in classes], dtype=np.float64)
    if weights.size == 0:
        weights = weights.reshape(len(classes), 0)
    bias = np.array([raw["bias"][c.label] for c in classes], dtype=np.float64)
    model = LinearModel(
        weights=weights,
        bias=bias,
        hyperparameters=raw["hyperparameters"],
        fingerprint=raw["fingerprint"],
        classes=classes,
    )
    return model, vocab
