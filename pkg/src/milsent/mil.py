"""Multi-instance training of a sentence-level logistic classifier.

Groups of sentence vectors carry one binary label each. The training loss
couples two pressures: an RBF-similarity weighted penalty on score
differences between similar instances, averaged over all ordered instance
pairs, and a squared error between each group's mean instance score and its
label, weighted by `lam`. Minimized by SGD with classical momentum over
group minibatches; the pair/group normalizers are re-read as batch counts
on every step, and the exact full-data loss is traced once per epoch.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from milsent.corpus import MilDataset, NEGATIVE, POSITIVE

Group = tuple[np.ndarray, int]

MODEL_FORMAT = "milsent-model"
MODEL_VERSION = 1


class TrainingError(Exception):
    """Optimization produced a non-finite value or cannot proceed."""


class ModelFormatError(Exception):
    """A model file is corrupted or has an unknown format/version."""


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 10.0
    learning_rate: float = 0.05
    momentum: float = 0.8
    epochs: int = 25
    groups_per_batch: int = 32
    kernel_gamma: float = 1.0
    seed: int = 0
    use_bias: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must be in [0, 1)")
        if self.epochs < 0 or self.groups_per_batch < 1:
            raise ValueError("epochs must be >= 0 and groups_per_batch >= 1")
        if self.kernel_gamma <= 0:
            raise ValueError("kernel_gamma must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class GridSpec:
    lam_values: tuple[float, ...]
    learning_rate_values: tuple[float, ...]
    momentum_values: tuple[float, ...]

    def __post_init__(self):
        for name in ("lam_values", "learning_rate_values", "momentum_values"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} must be non-empty")
            object.__setattr__(self, name, values)


@dataclass(frozen=True)
class MilModel:
    theta: np.ndarray
    dim: int
    config: TrainConfig

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        expected = self.dim + (1 if self.config.use_bias else 0)
        if theta.shape != (expected,):
            raise ValueError(f"theta must have length {expected}, got {theta.shape}")
        if not np.all(np.isfinite(theta)):
            raise TrainingError("theta contains non-finite values")
        object.__setattr__(self, "theta", theta)


def sigmoid(z):
    """1 / (1 + exp(-z)), stable for large |z|; scalar in, scalar out."""
    arr = np.asarray(z, dtype=float)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ez = np.exp(arr[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def rbf_similarity(x, y, gamma: float = 1.0) -> float:
    """exp(-gamma * ||x - y||^2), in (0, 1]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return float(np.exp(-gamma * np.dot(diff, diff)))


def _groups_of(batch) -> tuple[Group, ...]:
    groups = batch.groups if isinstance(batch, MilDataset) else tuple(batch)
    if not groups:
        raise ValueError("empty batch")
    return groups


def _stack(groups: Sequence[Group]):
    X = np.vstack([matrix for matrix, _ in groups])
    labels = np.array([label for _, label in groups], dtype=float)
    sizes = np.array([len(matrix) for matrix, _ in groups])
    return X, labels, sizes


def _raw_scores(theta: np.ndarray, use_bias: bool, X: np.ndarray) -> np.ndarray:
    z = X @ (theta[:-1] if use_bias else theta)
    if use_bias:
        z = z + theta[-1]
    return sigmoid(z)


def similarity_matrix(X: np.ndarray, gamma: float) -> np.ndarray:
    gram = X @ X.T
    sq = np.diag(gram)
    d2 = np.clip(sq[:, None] + sq[None, :] - 2.0 * gram, 0.0, None)
    return np.exp(-gamma * d2)


def instance_score(model: MilModel, x) -> float:
    """Sigmoid of the linear score for one instance vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"expected vector of dimension {model.dim}, got {x.shape}")
    return float(_raw_scores(model.theta, model.config.use_bias, x[None, :])[0])


def group_score(model: MilModel, group) -> float:
    """Arithmetic mean of instance scores over a non-empty group."""
    X = np.asarray(group, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("group must be a non-empty instance matrix")
    return float(np.mean(_raw_scores(model.theta, model.config.use_bias, X)))


def _loss(theta, use_bias, groups, lam, gamma) -> float:
    X, labels, sizes = _stack(groups)
    s = _raw_scores(theta, use_bias, X)
    n = len(s)
    S = similarity_matrix(X, gamma)
    diff = s[:, None] - s[None, :]
    pairwise = float(np.sum(S * diff * diff)) / (n * n)
    start = 0
    group_sq = 0.0
    for size, label in zip(sizes, labels):
        mean = float(np.mean(s[start : start + size]))
        group_sq += (mean - label) ** 2
        start += size
    return pairwise + lam * group_sq / len(groups)


def _gradient(theta, use_bias, groups, lam, gamma) -> np.ndarray:
    X, labels, sizes = _stack(groups)
    s = _raw_scores(theta, use_bias, X)
    n = len(s)
    Z = np.hstack([X, np.ones((n, 1))]) if use_bias else X
    slope = s * (1.0 - s)
    S = similarity_matrix(X, gamma)
    # c_i = sum_j S_ij (s_i - s_j); computed from the explicit difference
    # matrix so it is exactly zero when all scores coincide.
    c = (S * (s[:, None] - s[None, :])).sum(axis=1)
    grad = (4.0 / (n * n)) * (Z.T @ (slope * c))
    if lam != 0.0:
        acc = np.zeros_like(grad)
        start = 0
        for size, label in zip(sizes, labels):
            sl = slice(start, start + size)
            mean = float(np.mean(s[sl]))
            acc += (2.0 * (mean - label) / size) * (Z[sl].T @ slope[sl])
            start += size
        grad = grad + (lam / len(groups)) * acc
    return grad


def loss(model: MilModel, batch, lam: float, gamma: float) -> float:
    """Training objective over a batch, normalizers read from the batch."""
    return _loss(model.theta, model.config.use_bias, _groups_of(batch), lam, gamma)


def gradient(model: MilModel, batch, lam: float, gamma: float) -> np.ndarray:
    """Closed-form derivative of `loss` with respect to theta."""
    return _gradient(model.theta, model.config.use_bias, _groups_of(batch), lam, gamma)


@dataclass(frozen=True)
class TrainResult:
    model: MilModel
    loss_trace: tuple[float, ...]  # element 0 is the pre-training loss


def train(dataset: MilDataset, config: TrainConfig | None = None) -> TrainResult:
    """SGD with momentum over seeded group minibatches.

    theta starts uniform in [-0.01, 0.01] from config.seed; each epoch
    reshuffles the groups. Identical (dataset, config) pairs produce
    bit-identical parameters.
    """
    config = config or TrainConfig()
    groups = _groups_of(dataset)
    rng = np.random.default_rng(config.seed)
    n_params = dataset.dim + (1 if config.use_bias else 0)
    theta = rng.uniform(-0.01, 0.01, size=n_params)
    velocity = np.zeros(n_params)

    lam, gamma = config.lam, config.kernel_gamma
    trace = [_loss(theta, config.use_bias, groups, lam, gamma)]
    order = np.arange(len(groups))
    for epoch in range(config.epochs):
        rng.shuffle(order)
        for batch_no, lo in enumerate(range(0, len(order), config.groups_per_batch)):
            batch = [groups[i] for i in order[lo : lo + config.groups_per_batch]]
            grad = _gradient(theta, config.use_bias, batch, lam, gamma)
            if not np.all(np.isfinite(grad)):
                raise TrainingError(
                    f"non-finite gradient at epoch {epoch + 1}, batch {batch_no + 1}"
                )
            velocity = config.momentum * velocity - config.learning_rate * grad
            theta = theta + velocity
        full = _loss(theta, config.use_bias, groups, lam, gamma)
        if not np.isfinite(full):
            raise TrainingError(f"non-finite loss after epoch {epoch + 1}")
        trace.append(full)
    model = MilModel(theta=theta, dim=dataset.dim, config=config)
    return TrainResult(model=model, loss_trace=tuple(trace))


def predict_sentence(model: MilModel, x) -> tuple[int, float]:
    """(label, score); score >= 0.5 predicts positive."""
    score = instance_score(model, x)
    return (POSITIVE if score >= 0.5 else NEGATIVE), score


def predict_document(model: MilModel, group, mode: str = "majority") -> tuple[int, int, int]:
    """(label, positive_count, negative_count) for a group of instances.

    majority: most frequent sentence label wins; a tie falls back to the
    mean score against 0.5. mean: the mean-score rule directly.
    """
    X = np.asarray(group, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("group must be a non-empty instance matrix")
    scores = _raw_scores(model.theta, model.config.use_bias, X)
    positive = int(np.sum(scores >= 0.5))
    negative = len(scores) - positive
    if mode == "mean":
        label = POSITIVE if float(np.mean(scores)) >= 0.5 else NEGATIVE
    elif mode == "majority":
        if positive > negative:
            label = POSITIVE
        elif negative > positive:
            label = NEGATIVE
        else:
            label = POSITIVE if float(np.mean(scores)) >= 0.5 else NEGATIVE
    else:
        raise ValueError(f"unknown prediction mode {mode!r}")
    return label, positive, negative


def document_accuracy(model: MilModel, dataset: MilDataset) -> float:
    """Fraction of groups whose majority prediction matches the group label."""
    groups = _groups_of(dataset)
    hits = sum(
        predict_document(model, matrix)[0] == label for matrix, label in groups
    )
    return hits / len(groups)


@dataclass(frozen=True)
class GridCell:
    lam: float
    learning_rate: float
    momentum: float
    accuracy: float | None
    error: str | None = None


def grid_search(
    dataset: MilDataset, grid: GridSpec, base: TrainConfig | None = None
) -> tuple[TrainConfig, list[GridCell]]:
    """Train every configuration in the grid; keep the one with the highest
    in-sample document accuracy. Ties break toward smaller lam, then smaller
    learning rate, then smaller momentum. Per-cell failures are recorded,
    not raised.
    """
    base = base or TrainConfig()
    cells: list[GridCell] = []
    for lam, lr, mom in itertools.product(
        grid.lam_values, grid.learning_rate_values, grid.momentum_values
    ):
        config = replace(base, lam=lam, learning_rate=lr, momentum=mom)
        try:
            result = train(dataset, config)
            accuracy = document_accuracy(result.model, dataset)
            cells.append(GridCell(lam, lr, mom, accuracy))
        except (TrainingError, ValueError) as exc:
            cells.append(GridCell(lam, lr, mom, None, error=str(exc)))
    viable = [c for c in cells if c.accuracy is not None]
    if not viable:
        raise TrainingError("every grid configuration failed to train")
    best = min(viable, key=lambda c: (-c.accuracy, c.lam, c.learning_rate, c.momentum))
    return replace(base, lam=best.lam, learning_rate=best.learning_rate,
                   momentum=best.momentum), cells


def median_heuristic_gamma(
    dataset: MilDataset, max_pairs: int = 10_000, seed: int = 0
) -> float:
    """1 / median squared distance over a seeded sample of instance pairs."""
    X, _, _ = _stack(_groups_of(dataset))
    rng = np.random.default_rng(seed)
    n = len(X)
    i = rng.integers(0, n, size=max_pairs)
    j = rng.integers(0, n, size=max_pairs)
    keep = i != j
    if not np.any(keep):
        return 1.0
    d2 = np.sum((X[i[keep]] - X[j[keep]]) ** 2, axis=1)
    med = float(np.median(d2))
    return 1.0 / med if med > 0 else 1.0


def generate_synthetic(
    n_groups: int,
    instances_per_group: int,
    dim: int,
    separation: float,
    noise_fraction: float,
    seed: int = 0,
) -> tuple[MilDataset, np.ndarray]:
    """Two seeded Gaussian clusters arranged into labeled groups.

    Instance vectors are drawn around +/- separation along a fixed unit
    direction; the returned true labels name the generating cluster. Each
    group's label is the majority vote of its instances, where a
    noise_fraction of instances cast a flipped vote: the supervision is
    corrupted, the returned truth is not.
    """
    if separation <= 0:
        raise ValueError("separation must be > 0")
    if n_groups < 1 or instances_per_group < 1 or dim < 1:
        raise ValueError("n_groups, instances_per_group, and dim must be >= 1")
    if not 0 <= noise_fraction <= 1:
        raise ValueError("noise_fraction must be in [0, 1]")
    rng = np.random.default_rng(seed)
    direction = np.ones(dim) / np.sqrt(dim)
    groups = []
    truth = []
    for _ in range(n_groups):
        clusters = rng.integers(0, 2, size=instances_per_group)
        X = rng.standard_normal((instances_per_group, dim))
        X += np.outer(2.0 * clusters - 1.0, separation * direction)
        votes = clusters.copy()
        flip = rng.random(instances_per_group) < noise_fraction
        votes[flip] = 1 - votes[flip]
        label = POSITIVE if 2 * int(votes.sum()) >= instances_per_group else NEGATIVE
        groups.append((X, label))
        truth.append(clusters)
    return MilDataset(groups=tuple(groups), dim=dim), np.concatenate(truth)


def save_model(model: MilModel, path) -> None:
    """Versioned JSON record; floats round-trip bit-exactly."""
    config = model.config
    record = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "dim": model.dim,
        "theta": [float(v) for v in model.theta],
        "config": {
            "lam": config.lam,
            "learning_rate": config.learning_rate,
            "momentum": config.momentum,
            "epochs": config.epochs,
            "groups_per_batch": config.groups_per_batch,
            "kernel_gamma": config.kernel_gamma,
            "seed": config.seed,
            "use_bias": config.use_bias,
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(record, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")


def load_model(path) -> MilModel:
    try:
        with open(path, encoding="utf-8") as handle:
            record = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(record, dict) or record.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a {MODEL_FORMAT} file")
    if record.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {record.get('version')!r}")
    try:
        config = TrainConfig(**record["config"])
        return MilModel(
            theta=np.array(record["theta"], dtype=float),
            dim=int(record["dim"]),
            config=config,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model record: {exc}") from exc
