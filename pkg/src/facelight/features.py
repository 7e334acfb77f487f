"""Frozen-random convolutional feature extractor.

A residual block (three 3x3 conv / affine / ReLU stages plus identity
shortcut) followed by channel- and spatial-attention gating, then pooling to
a fixed-length vector (per-channel global mean, global std and a PxP grid of
cell means).  Convolution weights are never trained; they are drawn once from
a seeded Gaussian (std 0.1) and only the classifier heads on top learn.

Channel count stays 3 end to end, so the attention MLP is 3 -> 3 -> 3 with no
reduction.  Public functions take one (3, H, W) tensor; `*_batch` variants
take (N, 3, H, W) and run the identical arithmetic vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError
from .preprocess import preprocess

CHANNELS = 3
SPATIAL_KERNEL = 7
WEIGHT_STD = 0.1


@dataclass(frozen=True)
class FeatureParams:
    """All frozen extractor weights, reproducible from `seed`."""

    conv1: np.ndarray  # (3, 3, 3, 3) out, in, kh, kw
    conv2: np.ndarray
    conv3: np.ndarray
    scale1: np.ndarray  # per-channel affine in place of batch norm
    shift1: np.ndarray
    scale2: np.ndarray
    shift2: np.ndarray
    scale3: np.ndarray
    shift3: np.ndarray
    mlp_w1: np.ndarray  # (3, 3)
    mlp_b1: np.ndarray
    mlp_w2: np.ndarray
    mlp_b2: np.ndarray
    spatial: np.ndarray  # (1, 2, 7, 7)
    seed: int = 0

    def __post_init__(self):
        shapes = {
            "conv1": (3, 3, 3, 3), "conv2": (3, 3, 3, 3), "conv3": (3, 3, 3, 3),
            "scale1": (3,), "shift1": (3,), "scale2": (3,), "shift2": (3,),
            "scale3": (3,), "shift3": (3,),
            "mlp_w1": (3, 3), "mlp_b1": (3,), "mlp_w2": (3, 3), "mlp_b2": (3,),
            "spatial": (1, 2, 7, 7),
        }
        for name, shape in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise DomainError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} contains non-finite values")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_seed(cls, seed: int) -> "FeatureParams":
        """Draw conv/MLP weights from N(0, 0.1^2); affine is identity, biases zero."""
        rng = np.random.default_rng(seed)
        draw = lambda *shape: rng.normal(0.0, WEIGHT_STD, size=shape)
        return cls(
            conv1=draw(3, 3, 3, 3), conv2=draw(3, 3, 3, 3), conv3=draw(3, 3, 3, 3),
            scale1=np.ones(3), shift1=np.zeros(3),
            scale2=np.ones(3), shift2=np.zeros(3),
            scale3=np.ones(3), shift3=np.zeros(3),
            mlp_w1=draw(3, 3), mlp_b1=np.zeros(3),
            mlp_w2=draw(3, 3), mlp_b2=np.zeros(3),
            spatial=draw(1, 2, 7, 7),
            seed=seed,
        )

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.tolist() if isinstance(v, np.ndarray) else v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureParams":
        kwargs = {k: (np.asarray(v, dtype=float) if k != "seed" else int(v)) for k, v in data.items()}
        return cls(**kwargs)


def conv2d_same(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Zero-padded same-size 2-D cross-correlation, (N, Cin, H, W) -> (N, Cout, H, W)."""
    _, cin, kh, kw = kernel.shape
    if x.shape[1] != cin:
        raise DomainError(f"input has {x.shape[1]} channels, kernel expects {cin}")
    ph, pw = kh // 2, kw // 2
    padded = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    windows = np.lib.stride_tricks.sliding_window_view(padded, (kh, kw), axis=(2, 3))
    return np.einsum("nchwij,ocij->nohw", windows, kernel, optimize=True)


def _check_tensor(t) -> tuple[np.ndarray, bool]:
    t = np.asarray(t, dtype=float)
    batched = t.ndim == 4
    if not batched:
        t = t[None]
    if t.ndim != 4:
        raise DomainError(f"expected a (3, H, W) tensor or a batch, got shape {np.asarray(t).shape}")
    if t.shape[1] != CHANNELS:
        raise DomainError(f"expected {CHANNELS} channels, got {t.shape[1]}")
    return t, batched


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def resblock_forward(x, params: FeatureParams) -> np.ndarray:
    """Main path of three conv/affine/ReLU stages plus the identity shortcut."""
    xb, batched = _check_tensor(x)
    h = xb
    for conv, scale, shift in (
        (params.conv1, params.scale1, params.shift1),
        (params.conv2, params.scale2, params.shift2),
        (params.conv3, params.scale3, params.shift3),
    ):
        h = _relu(conv2d_same(h, conv) * scale[None, :, None, None] + shift[None, :, None, None])
    out = _relu(h + xb)
    return out if batched else out[0]


def _attention_mlp(v: np.ndarray, params: FeatureParams) -> np.ndarray:
    """Shared two-layer MLP over per-channel pooled vectors, (N, 3) -> (N, 3)."""
    h = _relu(v @ params.mlp_w1.T + params.mlp_b1)
    return h @ params.mlp_w2.T + params.mlp_b2


def cbam_forward(c, params: FeatureParams) -> np.ndarray:
    """Channel attention then spatial attention, both as sigmoid gates.

    Channel gate: sigmoid(MLP(maxpool) + MLP(avgpool)) per channel.
    Spatial gate: sigmoid(conv7x7([channel-max ; channel-avg])), zero padded.
    """
    cb, batched = _check_tensor(c)
    maxp = cb.max(axis=(2, 3))
    avgp = cb.mean(axis=(2, 3))
    gate_c = _sigmoid(_attention_mlp(maxp, params) + _attention_mlp(avgp, params))
    c1 = cb * gate_c[:, :, None, None]

    ch_max = c1.max(axis=1, keepdims=True)
    ch_avg = c1.mean(axis=1, keepdims=True)
    stacked = np.concatenate([ch_max, ch_avg], axis=1)
    gate_s = _sigmoid(conv2d_same(stacked, params.spatial))
    out = c1 * gate_s
    return out if batched else out[0]


def pooled_features(s, p_grid: int) -> np.ndarray:
    """Per channel: global mean, global population std, then PxP cell means.

    Concatenated channel-major; the vector length is 3 * (2 + P^2).  Batched
    input yields (N, 3 * (2 + P^2)).
    """
    sb, batched = _check_tensor(s)
    n, c, h, w = sb.shape
    if p_grid < 1:
        raise DomainError(f"pooling grid must be >= 1, got {p_grid}")
    if p_grid > min(h, w):
        raise DomainError(f"pooling grid {p_grid} exceeds tensor size {h}x{w}")
    he = (np.arange(p_grid + 1) * h) // p_grid
    we = (np.arange(p_grid + 1) * w) // p_grid
    parts = [sb.mean(axis=(2, 3)), sb.std(axis=(2, 3))]  # (N, 3) each
    cells = np.empty((n, c, p_grid, p_grid))
    for i in range(p_grid):
        for j in range(p_grid):
            cells[:, :, i, j] = sb[:, :, he[i] : he[i + 1], we[j] : we[j + 1]].mean(axis=(2, 3))
    vec = np.concatenate(
        [np.stack(parts, axis=2), cells.reshape(n, c, p_grid * p_grid)], axis=2
    ).reshape(n, c * (2 + p_grid * p_grid))
    return vec if batched else vec[0]


def feature_length(p_grid: int) -> int:
    return CHANNELS * (2 + p_grid * p_grid)


def extract_features(images, params: FeatureParams, l_size: int, p_grid: int) -> np.ndarray:
    """Images -> feature vectors: preprocess, resblock, attention, pooling.

    Accepts one (H, W, 3) image or a batch; batches are processed in chunks
    to bound memory.  Returns (N, 3*(2+P^2)) for batches, a flat vector for a
    single image.
    """
    imgs = np.asarray(images)
    batched = imgs.ndim == 4
    if not batched:
        imgs = imgs[None]
    chunks = []
    for start in range(0, imgs.shape[0], 256):
        block = preprocess(imgs[start : start + 256], l_size)
        block = cbam_forward(resblock_forward(block, params), params)
        chunks.append(pooled_features(block, p_grid))
    out = np.concatenate(chunks, axis=0)
    return out if batched else out[0]
