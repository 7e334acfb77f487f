"""Two-tier classification: a category discriminator routing to per-category
application predictors.

Every head is the same architecture: three dense layers (in -> 512 -> 256 ->
out) with ReLU between them and a softmax output.  Heads are trained with
manual backpropagation and Adam on the cross-entropy loss; the convolutional
feature extractor underneath stays frozen.  Prediction takes the
discriminator argmax (ties break to the lowest index), then the argmax of the
selected category's predictor, and fuses the pair into a unified label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .features import FeatureParams, extract_features, feature_length
from .labels import LabelLayout, split_label, unify_label

HIDDEN = (512, 256)
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
PROB_FLOOR = 1e-12


def softmax(logits) -> np.ndarray:
    """Stable softmax over the last axis (max subtraction before exp)."""
    z = np.asarray(logits, dtype=float)
    if z.size == 0:
        raise DomainError("softmax input must be non-empty")
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(p, target) -> float:
    """-log p[target] for a one-hot target, with p floored at 1e-12."""
    p = np.asarray(p, dtype=float)
    target = np.asarray(target, dtype=float)
    if p.shape != target.shape:
        raise DomainError(f"shape mismatch: probs {p.shape} vs target {target.shape}")
    ones = np.flatnonzero(target == 1.0)
    if ones.size != 1 or not np.all((target == 0.0) | (target == 1.0)):
        raise DomainError("target must be a one-hot vector")
    return float(-np.log(max(p[ones[0]], PROB_FLOOR)))


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros_like(cls, param: np.ndarray) -> "AdamState":
        return cls(np.zeros_like(param, dtype=float), np.zeros_like(param, dtype=float), 0)


def adam_step(
    param: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPS,
) -> Tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update; returns the new parameter and state."""
    param = np.asarray(param, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if param.shape != grad.shape:
        raise DomainError(f"shape mismatch: param {param.shape} vs grad {grad.shape}")
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * grad
    v = beta2 * state.v + (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    return param - lr * m_hat / (np.sqrt(v_hat) + eps), AdamState(m, v, t)


_PARAM_NAMES = ("w1", "b1", "w2", "b2", "w3", "b3")


@dataclass
class MlpHead:
    """Dense in -> 512 -> 256 -> out head with ReLU activations and softmax output."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray

    @classmethod
    def init(cls, in_dim: int, out_dim: int, rng: np.random.Generator) -> "MlpHead":
        """He-style init: Gaussian with std sqrt(2 / fan_in), zero biases."""
        h1, h2 = HIDDEN
        return cls(
            w1=rng.normal(0.0, np.sqrt(2.0 / in_dim), size=(h1, in_dim)),
            b1=np.zeros(h1),
            w2=rng.normal(0.0, np.sqrt(2.0 / h1), size=(h2, h1)),
            b2=np.zeros(h2),
            w3=rng.normal(0.0, np.sqrt(2.0 / h2), size=(out_dim, h2)),
            b3=np.zeros(out_dim),
        )

    @property
    def in_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def out_dim(self) -> int:
        return self.w3.shape[0]

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Class probabilities for a (N, in_dim) batch or a single vector."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.in_dim:
            raise DomainError(f"feature dim {x.shape[1]} does not match head input {self.in_dim}")
        a1 = np.maximum(x @ self.w1.T + self.b1, 0.0)
        a2 = np.maximum(a1 @ self.w2.T + self.b2, 0.0)
        return softmax(a2 @ self.w3.T + self.b3)

    def loss_and_gradients(
        self, x: np.ndarray, target_idx: np.ndarray
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        """Mean cross-entropy over the batch and its analytic parameter gradients."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        target_idx = np.asarray(target_idx, dtype=int)
        n = x.shape[0]
        z1 = x @ self.w1.T + self.b1
        a1 = np.maximum(z1, 0.0)
        z2 = a1 @ self.w2.T + self.b2
        a2 = np.maximum(z2, 0.0)
        probs = softmax(a2 @ self.w3.T + self.b3)
        picked = np.maximum(probs[np.arange(n), target_idx], PROB_FLOOR)
        loss = float(-np.mean(np.log(picked)))

        dlogits = probs.copy()
        dlogits[np.arange(n), target_idx] -= 1.0
        dlogits /= n
        grads = {"w3": dlogits.T @ a2, "b3": dlogits.sum(axis=0)}
        da2 = dlogits @ self.w3
        dz2 = da2 * (z2 > 0.0)  # ReLU subgradient 0 at 0
        grads["w2"] = dz2.T @ a1
        grads["b2"] = dz2.sum(axis=0)
        da1 = dz2 @ self.w2
        dz1 = da1 * (z1 > 0.0)
        grads["w1"] = dz1.T @ x
        grads["b1"] = dz1.sum(axis=0)
        return loss, grads

    def params(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in _PARAM_NAMES}

    def to_dict(self) -> dict:
        return {name: getattr(self, name).tolist() for name in _PARAM_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "MlpHead":
        return cls(**{name: np.asarray(data[name], dtype=float) for name in _PARAM_NAMES})


@dataclass
class TwoTierModel:
    """Frozen feature extractor plus trained discriminator/predictor heads."""

    layout: LabelLayout
    feature_params: FeatureParams
    discriminator: MlpHead
    predictors: List[MlpHead]
    l_size: int
    p_grid: int
    seed: int

    def __post_init__(self):
        if len(self.predictors) != self.layout.num_categories:
            raise DomainError("predictor count must match the category count")
        if self.discriminator.out_dim != self.layout.num_categories:
            raise DomainError("discriminator output dim must match the category count")


def _train_head(
    head: MlpHead,
    x: np.ndarray,
    y: np.ndarray,
    epochs: int,
    batch_size: int,
    lr: float,
    rng: np.random.Generator,
    log: List[dict],
    head_name: str,
) -> None:
    states = {name: AdamState.zeros_like(p) for name, p in head.params().items()}
    for epoch in range(1, epochs + 1):
        order = rng.permutation(x.shape[0])
        for b, start in enumerate(range(0, x.shape[0], batch_size)):
            idx = order[start : start + batch_size]
            loss, grads = head.loss_and_gradients(x[idx], y[idx])
            for name in _PARAM_NAMES:
                new_p, states[name] = adam_step(getattr(head, name), grads[name], states[name], lr)
                setattr(head, name, new_p)
            log.append({"head": head_name, "epoch": epoch, "batch": b, "loss": loss})


def train_two_tier(
    features: np.ndarray,
    unified_labels: Sequence[int],
    layout: LabelLayout,
    epochs: int = 5,
    batch_size: int = 16,
    lr: float = 1e-4,
    seed: int = 0,
    feature_params: FeatureParams = None,
    l_size: int = 64,
    p_grid: int = 4,
) -> Tuple[TwoTierModel, List[dict]]:
    """Train the discriminator and one predictor per category.

    `features` are extracted feature vectors, (N, D); `unified_labels` their
    unified application labels.  The discriminator trains on the category part
    of every sample; each predictor trains only on its own category's samples.
    Deterministic for a fixed seed.  Returns the model and the per-batch loss
    log (head, epoch, batch, loss).
    """
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DomainError("features must be a non-empty (N, D) array")
    y = np.asarray(list(unified_labels), dtype=int)
    if y.shape[0] != x.shape[0]:
        raise DomainError("feature/label counts differ")
    pairs = [split_label(int(v), layout) for v in y]
    cats = np.array([j for j, _ in pairs], dtype=int)
    apps = np.array([k for _, k in pairs], dtype=int)

    if feature_params is None:
        feature_params = FeatureParams.from_seed(seed)
    if x.shape[1] != feature_length(p_grid):
        raise DomainError(
            f"feature dim {x.shape[1]} does not match pooling grid {p_grid} "
            f"(expected {feature_length(p_grid)})"
        )
    for j in range(layout.num_categories):
        if not np.any(cats == j):
            raise DomainError(f"category '{layout.category_name(j)}' has no training samples")

    rng = np.random.default_rng(seed)
    discriminator = MlpHead.init(x.shape[1], layout.num_categories, rng)
    predictors = [MlpHead.init(x.shape[1], layout.counts[j], rng) for j in range(layout.num_categories)]

    log: List[dict] = []
    _train_head(discriminator, x, cats, epochs, batch_size, lr, rng, log, "discriminator")
    for j, predictor in enumerate(predictors):
        sel = cats == j
        _train_head(
            predictor, x[sel], apps[sel], epochs, batch_size, lr, rng, log, layout.category_name(j)
        )
    model = TwoTierModel(layout, feature_params, discriminator, predictors, l_size, p_grid, seed)
    return model, log


def predict_features(model: TwoTierModel, features: np.ndarray) -> np.ndarray:
    """Unified labels for already-extracted feature vectors, (N,) ints."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    cat_probs = model.discriminator.forward(x)
    cats = np.argmax(cat_probs, axis=1)  # ties resolve to the lowest index
    out = np.empty(x.shape[0], dtype=int)
    for j in np.unique(cats):
        sel = cats == j
        app_probs = model.predictors[j].forward(x[sel])
        ks = np.argmax(app_probs, axis=1)
        out[sel] = [unify_label(int(j), int(k), model.layout) for k in ks]
    return out


def predict(model: TwoTierModel, image) -> Tuple[int, np.ndarray, np.ndarray]:
    """Classify one face image.

    Returns (unified label, category probabilities, application probabilities
    of the selected category's predictor).
    """
    feats = extract_features(image, model.feature_params, model.l_size, model.p_grid)
    cat_probs = model.discriminator.forward(feats)[0]
    j = int(np.argmax(cat_probs))
    app_probs = model.predictors[j].forward(feats)[0]
    k = int(np.argmax(app_probs))
    return unify_label(j, k, model.layout), cat_probs, app_probs


def predict_images(model: TwoTierModel, images) -> np.ndarray:
    """Unified labels for a batch of face images."""
    feats = extract_features(np.asarray(images), model.feature_params, model.l_size, model.p_grid)
    return predict_features(model, feats)


def save_model(model: TwoTierModel, path) -> None:
    doc = {
        "kind": "facelight-two-tier",
        "seed": model.seed,
        "l_size": model.l_size,
        "p_grid": model.p_grid,
        "layout": {
            "counts": list(model.layout.counts),
            "category_names": list(model.layout.category_names or []) or None,
            "app_names": [list(a) for a in model.layout.app_names] if model.layout.app_names else None,
        },
        "feature_params": model.feature_params.to_dict(),
        "discriminator": model.discriminator.to_dict(),
        "predictors": [p.to_dict() for p in model.predictors],
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh)


def load_model(path) -> TwoTierModel:
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    if doc.get("kind") != "facelight-two-tier":
        raise DomainError(f"{path}: not a two-tier model file")
    lay = doc["layout"]
    layout = LabelLayout(
        tuple(lay["counts"]),
        tuple(lay["category_names"]) if lay.get("category_names") else None,
        tuple(tuple(a) for a in lay["app_names"]) if lay.get("app_names") else None,
    )
    return TwoTierModel(
        layout=layout,
        feature_params=FeatureParams.from_dict(doc["feature_params"]),
        discriminator=MlpHead.from_dict(doc["discriminator"]),
        predictors=[MlpHead.from_dict(p) for p in doc["predictors"]],
        l_size=int(doc["l_size"]),
        p_grid=int(doc["p_grid"]),
        seed=int(doc["seed"]),
    )
