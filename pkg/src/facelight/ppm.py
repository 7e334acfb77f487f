"""Binary PPM (P6, maxval 255) read/write for rendered face images and masks."""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def require_image(img) -> np.ndarray:
    """Validate an (H, W, 3) uint8 image array."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DomainError(f"expected an (H, W, 3) image, got shape {img.shape}")
    if img.size == 0:
        raise DomainError("image is empty")
    if img.dtype != np.uint8:
        if np.any(img < 0) or np.any(img > 255):
            raise DomainError("image values must lie in [0, 255]")
        img = img.astype(np.uint8)
    return img


def write_ppm(path, img) -> None:
    img = require_image(img)
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P6"):
        raise DomainError(f"{path}: not a binary PPM (P6) file")
    # Header = magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments allowed; pixel data starts after a single whitespace
    # byte following maxval.
    tokens = []
    i = 2
    while len(tokens) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        if start == i:
            raise DomainError(f"{path}: truncated PPM header")
        tokens.append(data[start:i])
    i += 1  # the single whitespace after maxval
    w, h, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise DomainError(f"{path}: only maxval 255 PPMs are supported, got {maxval}")
    pixels = data[i : i + w * h * 3]
    if len(pixels) != w * h * 3:
        raise DomainError(f"{path}: truncated PPM pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w, 3).copy()


def write_mask_ppm(path, bits) -> None:
    """Write a boolean mask as a PPM: white (255) for True, black for False."""
    bits = np.asarray(bits, dtype=bool)
    img = np.where(bits[..., None], 255, 0).astype(np.uint8)
    write_ppm(path, np.repeat(img, 3, axis=2))
