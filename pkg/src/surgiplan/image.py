"""In-memory RGBA8 images and PNG serialization."""
from __future__ import annotations

import io

import numpy as np
from PIL import Image as PILImage


class Image:
    """Row-major RGBA8 image, top-left origin."""

    def __init__(self, pixels: np.ndarray):
        pixels = np.asarray(pixels, dtype=np.uint8)
        if pixels.ndim != 3 or pixels.shape[2] != 4:
            raise ValueError(f"expected (h, w, 4) array, got {pixels.shape}")
        self.pixels = pixels

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_gray(cls, gray: np.ndarray) -> "Image":
        """Wrap a (h, w) uint8 array as opaque grayscale RGBA."""
        gray = np.asarray(gray, dtype=np.uint8)
        px = np.empty(gray.shape + (4,), dtype=np.uint8)
        px[..., 0] = px[..., 1] = px[..., 2] = gray
        px[..., 3] = 255
        return cls(px)

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        PILImage.fromarray(self.pixels, mode="RGBA").save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def from_png(cls, data: bytes) -> "Image":
        img = PILImage.open(io.BytesIO(data)).convert("RGBA")
        return cls(np.asarray(img))

    def __eq__(self, other):
        return isinstance(other, Image) and np.array_equal(self.pixels, other.pixels)
