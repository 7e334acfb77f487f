"""Face-image preprocessing: 2x upscale, square resize, per-channel z-scoring.

All resampling is bilinear with half-pixel centers and edge clamping, so a
same-size resize is an exact identity.  Functions accept a single (H, W, 3)
uint8 image or a batch (N, H, W, 3); the batch path is the same code and the
same arithmetic.

Normalized tensors are channel-major float64 arrays (3, H, W), serializable
to a flat binary format: magic ``FTT1``, three little-endian uint32 dims
(channels, height, width), then the values as little-endian float64 in
row-major channel-height-width order.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DomainError

TENSOR_MAGIC = b"FTT1"


def _check_image(img) -> tuple[np.ndarray, bool]:
    img = np.asarray(img)
    batched = img.ndim == 4
    if not batched:
        img = img[None]
    if img.ndim != 4 or img.shape[3] != 3 or img.shape[1] < 1 or img.shape[2] < 1:
        raise DomainError(f"expected (H, W, 3) or (N, H, W, 3) image data, got {np.asarray(img).shape}")
    return img, batched


def _axis_taps(n_in: int, n_out: int):
    """Source indices and lerp weights for one bilinear axis (half-pixel centers)."""
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1.0)
    i0 = np.floor(src).astype(int)
    i1 = np.minimum(i0 + 1, n_in - 1)
    t = src - i0
    return i0, i1, t


def bilinear_resize(image, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample to (out_h, out_w); output rounds half-up to uint8."""
    if out_h < 1 or out_w < 1:
        raise DomainError("output dimensions must be >= 1")
    img, batched = _check_image(image)
    data = img.astype(float)
    r0, r1, tr = _axis_taps(img.shape[1], out_h)
    c0, c1, tc = _axis_taps(img.shape[2], out_w)
    top = data[:, r0][:, :, c0] * (1 - tc)[None, None, :, None] + data[:, r0][:, :, c1] * tc[None, None, :, None]
    bot = data[:, r1][:, :, c0] * (1 - tc)[None, None, :, None] + data[:, r1][:, :, c1] * tc[None, None, :, None]
    out = top * (1 - tr)[None, :, None, None] + bot * tr[None, :, None, None]
    out = np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
    return out if batched else out[0]


def upscale2x(image) -> np.ndarray:
    """Double both image dimensions (stand-in for learned super-resolution)."""
    img, batched = _check_image(image)
    out = bilinear_resize(img, 2 * img.shape[1], 2 * img.shape[2])
    return out if batched else out[0]


def resize(image, l_size: int) -> np.ndarray:
    """Resample to a square l_size x l_size image."""
    if l_size < 1:
        raise DomainError(f"target size must be >= 1, got {l_size}")
    return bilinear_resize(image, l_size, l_size)


def znorm(image) -> np.ndarray:
    """Per-channel z-score normalization to a (3, H, W) float tensor.

    Uses the population standard deviation; a constant channel maps to zeros.
    Batched input yields (N, 3, H, W).
    """
    img, batched = _check_image(image)
    chw = img.astype(float).transpose(0, 3, 1, 2)
    mean = chw.mean(axis=(2, 3), keepdims=True)
    std = chw.std(axis=(2, 3), keepdims=True)
    out = np.where(std > 0, (chw - mean) / np.where(std > 0, std, 1.0), 0.0)
    return out if batched else out[0]


def preprocess(image, l_size: int) -> np.ndarray:
    """Full preprocessing chain: upscale 2x, resize to l_size, z-normalize."""
    return znorm(resize(upscale2x(image), l_size))


def save_tensor(path, tensor: np.ndarray) -> None:
    tensor = np.asarray(tensor, dtype=np.float64)
    if tensor.ndim != 3:
        raise DomainError(f"expected a (C, H, W) tensor, got shape {tensor.shape}")
    if not np.all(np.isfinite(tensor)):
        raise DomainError("tensor values must be finite")
    with open(path, "wb") as fh:
        fh.write(TENSOR_MAGIC)
        fh.write(struct.pack("<3I", *tensor.shape))
        fh.write(tensor.astype("<f8").tobytes())


def load_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != TENSOR_MAGIC:
            raise DomainError(f"{path}: bad tensor magic {magic!r}")
        c, h, w = struct.unpack("<3I", fh.read(12))
        data = np.frombuffer(fh.read(c * h * w * 8), dtype="<f8")
    if data.size != c * h * w:
        raise DomainError(f"{path}: truncated tensor data")
    tensor = data.reshape(c, h, w).astype(np.float64)
    if not np.all(np.isfinite(tensor)):
        raise DomainError(f"{path}: tensor values must be finite")
    return tensor
