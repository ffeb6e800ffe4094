"""Interpretable classifier over concept robustness embeddings.

A trajectory x is embedded as H[i] = tanh(rho(phi_i, x, 0)) over the bank
concepts.  Per class k, a discriminability score compares H against the
pooled embedding statistics of all other classes, G[i, k] =
(H[i] - comp_mean[k, i]) / (comp_std[k, i] + epsilon_g), an attention vector
alpha = softmax(H / t_attention) weights concepts by how strongly they fire,
and the modulated scores z = alpha * G feed a linear softmax classifier.
Training the linear layer is a convex problem (cross entropy plus an L2
penalty on the weights) solved by full batch gradient descent with step
halving whenever a step would increase the loss.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .bank import ConceptBank, bank_from_dict, bank_to_dict
from .data import Dataset, NormalizationRecord
from .monitor import robustness_trace_batch
from .trajectory import Trajectory

DEFAULT_EPSILON_G = 1e-6
MIN_LEARNING_RATE = 1e-12


def embed(x: Trajectory, bank: ConceptBank) -> np.ndarray:
    """Squashed robustness of every bank concept on x at time 0, shape (n,)."""
    return embed_batch(x.values[np.newaxis], bank)[0]


def embed_batch(values: np.ndarray, bank: ConceptBank) -> np.ndarray:
    """Embeddings for a (count, dims, length) stack, shape (count, n)."""
    values = np.asarray(values, dtype=np.float64)
    columns = [np.tanh(robustness_trace_batch(phi, values)[:, 0]) for phi in bank.concepts]
    if not columns:
        raise ValueError("concept bank is empty")
    return np.stack(columns, axis=1)


@dataclass
class ClassStats:
    """Per-class embedding moments plus the complement-class pooled moments.

    All arrays have shape (num_classes, n); standard deviations are
    population ones.  comp_mean[k] and comp_std[k] summarise the embeddings
    of every sample NOT in class k.
    """

    mean: np.ndarray
    std: np.ndarray
    counts: np.ndarray
    comp_mean: np.ndarray
    comp_std: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.mean.shape[0]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "counts": self.counts.tolist(),
            "comp_mean": self.comp_mean.tolist(),
            "comp_std": self.comp_std.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassStats":
        return cls(
            mean=np.asarray(data["mean"], dtype=np.float64),
            std=np.asarray(data["std"], dtype=np.float64),
            counts=np.asarray(data["counts"], dtype=np.int64),
            comp_mean=np.asarray(data["comp_mean"], dtype=np.float64),
            comp_std=np.asarray(data["comp_std"], dtype=np.float64),
        )


def stats_from_embeddings(embeddings: np.ndarray, labels: np.ndarray, num_classes: int) -> ClassStats:
    if num_classes < 2:
        raise ValueError(f"need at least two classes, got {num_classes}")
    mean = np.empty((num_classes, embeddings.shape[1]))
    std = np.empty_like(mean)
    comp_mean = np.empty_like(mean)
    comp_std = np.empty_like(mean)
    counts = np.empty(num_classes, dtype=np.int64)
    for k in range(num_classes):
        inside = embeddings[labels == k]
        outside = embeddings[labels != k]
        if inside.shape[0] == 0:
            raise ValueError(f"class {k} has no samples")
        if outside.shape[0] == 0:
            raise ValueError(f"class {k} has no complement samples")
        counts[k] = inside.shape[0]
        mean[k] = inside.mean(axis=0)
        std[k] = inside.std(axis=0)
        comp_mean[k] = outside.mean(axis=0)
        comp_std[k] = outside.std(axis=0)
    return ClassStats(mean=mean, std=std, counts=counts, comp_mean=comp_mean, comp_std=comp_std)


def fit_stats(dataset: Dataset, bank: ConceptBank) -> ClassStats:
    """Embed a labeled dataset and summarise the embeddings per class."""
    return stats_from_embeddings(embed_batch(dataset.values, bank), dataset.labels, dataset.num_classes)


def discriminability(embedding: np.ndarray, stats: ClassStats, epsilon_g: float = DEFAULT_EPSILON_G) -> np.ndarray:
    """How far each concept's activation sits from the other classes, shape (n, K)."""
    return (embedding[:, np.newaxis] - stats.comp_mean.T) / (stats.comp_std.T + epsilon_g)


def attention(embedding: np.ndarray, t_attention: float = 1.0) -> np.ndarray:
    """Softmax over concept activations; lower temperature sharpens it."""
    if not t_attention > 0:
        raise ValueError(f"t_attention must be positive, got {t_attention}")
    scaled = embedding / t_attention
    scaled = scaled - scaled.max()
    weights = np.exp(scaled)
    return weights / weights.sum()


@dataclass
class ForwardPass:
    """Every intermediate of one classification, kept for explanation."""

    embedding: np.ndarray
    discriminability: np.ndarray
    attention: np.ndarray
    modulated: np.ndarray
    logits: np.ndarray
    predicted: int


@dataclass
class ConceptModel:
    bank: ConceptBank
    stats: ClassStats
    weights: np.ndarray
    bias: np.ndarray
    t_attention: float = 1.0
    epsilon_g: float = DEFAULT_EPSILON_G
    label_values: list = field(default_factory=list)
    normalization: NormalizationRecord | None = None
    training: dict = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def num_concepts(self) -> int:
        return self.bank.n


def _batch_features(embeddings: np.ndarray, stats: ClassStats, t_attention: float, epsilon_g: float) -> np.ndarray:
    """Flattened modulated scores for a batch, shape (count, n*K).

    The flat index of concept i and class k is i*K + k, which is exactly the
    C-order reshape of the (count, n, K) score array.
    """
    scores = (embeddings[:, :, np.newaxis] - stats.comp_mean.T[np.newaxis]) / (
        stats.comp_std.T[np.newaxis] + epsilon_g
    )
    scaled = embeddings / t_attention
    scaled = scaled - scaled.max(axis=1, keepdims=True)
    weights = np.exp(scaled)
    alpha = weights / weights.sum(axis=1, keepdims=True)
    modulated = alpha[:, :, np.newaxis] * scores
    return modulated.reshape(embeddings.shape[0], -1)


def forward(x: Trajectory, model: ConceptModel) -> ForwardPass:
    """Run one trajectory through the model, keeping all intermediates."""
    h = embed(x, model.bank)
    g = discriminability(h, model.stats, model.epsilon_g)
    alpha = attention(h, model.t_attention)
    z = alpha[:, np.newaxis] * g
    logits = model.weights @ z.reshape(-1) + model.bias
    return ForwardPass(
        embedding=h,
        discriminability=g,
        attention=alpha,
        modulated=z,
        logits=logits,
        predicted=int(np.argmax(logits)),
    )


def predict_batch(values: np.ndarray, model: ConceptModel) -> tuple[np.ndarray, np.ndarray]:
    """Logits (count, K) and predicted class indices (count,) for a stack."""
    embeddings = embed_batch(values, model.bank)
    features = _batch_features(embeddings, model.stats, model.t_attention, model.epsilon_g)
    logits = features @ model.weights.T + model.bias
    return logits, np.argmax(logits, axis=1)


def loss_and_gradients(
    weights: np.ndarray,
    bias: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross entropy plus l2*||W||^2, with exact gradients."""
    count = features.shape[0]
    logits = features @ weights.T + bias
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_norm[:, np.newaxis]
    ce = -float(log_probs[np.arange(count), labels].mean())
    loss = ce + l2 * float(np.sum(weights**2))
    probs = np.exp(log_probs)
    probs[np.arange(count), labels] -= 1.0
    probs /= count
    grad_weights = probs.T @ features + 2.0 * l2 * weights
    grad_bias = probs.sum(axis=0)
    return loss, grad_weights, grad_bias


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 0.1
    l2: float = 1e-4
    t_attention: float = 1.0
    epsilon_g: float = DEFAULT_EPSILON_G
    seed: int = 0
    init_std: float = 0.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be positive, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be non-negative, got {self.l2}")
        if not self.t_attention > 0:
            raise ValueError(f"t_attention must be positive, got {self.t_attention}")
        if self.epsilon_g <= 0:
            raise ValueError(f"epsilon_g must be positive, got {self.epsilon_g}")
        if self.init_std < 0:
            raise ValueError(f"init_std must be non-negative, got {self.init_std}")


def train(dataset: Dataset, bank: ConceptBank, config: TrainConfig = TrainConfig()) -> ConceptModel:
    """Fit the linear layer by full batch gradient descent.

    The objective is convex, so with the default zero initialisation the
    optimum does not depend on the seed; a positive init_std draws the start
    point from Normal(0, init_std^2) instead.  The step size adapts in the
    bold driver style: any step that would increase the loss is retried with
    a halved learning rate, an accepted step doubles it for the next epoch,
    and training stops early once the rate underflows MIN_LEARNING_RATE.
    The recorded loss sequence is non-increasing by construction.
    """
    if bank.base_length != dataset.length:
        raise ValueError(
            f"bank is built for length {bank.base_length} but dataset has length {dataset.length}"
        )
    embeddings = embed_batch(dataset.values, bank)
    stats = stats_from_embeddings(embeddings, dataset.labels, dataset.num_classes)
    features = _batch_features(embeddings, stats, config.t_attention, config.epsilon_g)
    num_classes = dataset.num_classes
    num_features = features.shape[1]

    rng = np.random.default_rng(config.seed)
    if config.init_std > 0:
        weights = rng.normal(0.0, config.init_std, size=(num_classes, num_features))
    else:
        weights = np.zeros((num_classes, num_features))
    bias = np.zeros(num_classes)

    learning_rate = config.learning_rate
    loss, grad_weights, grad_bias = loss_and_gradients(weights, bias, features, dataset.labels, config.l2)
    if not np.isfinite(loss):
        raise RuntimeError(f"initial loss is not finite: {loss}")
    epochs_run = 0
    for _ in range(config.epochs):
        accepted = False
        while learning_rate >= MIN_LEARNING_RATE:
            new_weights = weights - learning_rate * grad_weights
            new_bias = bias - learning_rate * grad_bias
            new_loss, new_gw, new_gb = loss_and_gradients(new_weights, new_bias, features, dataset.labels, config.l2)
            if not np.isfinite(new_loss):
                raise RuntimeError(f"loss became non-finite at epoch {epochs_run}: {new_loss}")
            if new_loss <= loss:
                weights, bias = new_weights, new_bias
                loss, grad_weights, grad_bias = new_loss, new_gw, new_gb
                accepted = True
                learning_rate *= 2.0
                break
            learning_rate /= 2.0
        if not accepted:
            break
        epochs_run += 1

    logits = features @ weights.T + bias
    accuracy = float(np.mean(np.argmax(logits, axis=1) == dataset.labels))
    return ConceptModel(
        bank=bank,
        stats=stats,
        weights=weights,
        bias=bias,
        t_attention=config.t_attention,
        epsilon_g=config.epsilon_g,
        label_values=list(dataset.label_values),
        normalization=dataset.normalization,
        training={
            "epochs_run": epochs_run,
            "final_learning_rate": learning_rate,
            "final_loss": loss,
            "l2": config.l2,
            "learning_rate": config.learning_rate,
            "seed": config.seed,
            "train_accuracy": accuracy,
        },
    )


def model_to_dict(model: ConceptModel) -> dict:
    return {
        "version": 1,
        "bank": bank_to_dict(model.bank),
        "stats": model.stats.to_dict(),
        "weights": model.weights.tolist(),
        "bias": model.bias.tolist(),
        "t_attention": model.t_attention,
        "epsilon_g": model.epsilon_g,
        "flatten_order": "concept_major",
        "label_values": [float(v) for v in model.label_values],
        "normalization": model.normalization.to_dict() if model.normalization else None,
        "training": model.training,
    }


def model_from_dict(data: dict) -> ConceptModel:
    if data.get("version") != 1:
        raise ValueError(f"unsupported model version: {data.get('version')!r}")
    if data.get("flatten_order") != "concept_major":
        raise ValueError(f"unsupported flatten order: {data.get('flatten_order')!r}")
    normalization = data.get("normalization")
    return ConceptModel(
        bank=bank_from_dict(data["bank"]),
        stats=ClassStats.from_dict(data["stats"]),
        weights=np.asarray(data["weights"], dtype=np.float64),
        bias=np.asarray(data["bias"], dtype=np.float64),
        t_attention=float(data["t_attention"]),
        epsilon_g=float(data["epsilon_g"]),
        label_values=[float(v) for v in data["label_values"]],
        normalization=NormalizationRecord.from_dict(normalization) if normalization else None,
        training=dict(data.get("training", {})),
    )


def save_model(model: ConceptModel, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_dict(model), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_model(path) -> ConceptModel:
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_dict(json.load(handle))
