"""8-bit PNG input/output for image buffers.

Values map linearly between [0,1] floats and 0..255 bytes; no gamma
transform is applied in either direction.
"""
from __future__ import annotations

import io
import os

import numpy as np
from PIL import Image

from .splats.types import ImageBuffer


def to_bytes(img: ImageBuffer) -> bytes:
    data = np.clip(np.rint(img.pixels * 255.0), 0, 255).astype(np.uint8)
    mode = "RGB" if img.channels == 3 else "L"
    if img.channels == 1:
        data = data[:, :, 0]
    buf = io.BytesIO()
    Image.fromarray(data, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def save_png(path: str | os.PathLike, img: ImageBuffer):
    with open(path, "wb") as fh:
        fh.write(to_bytes(img))


def load_png(path: str | os.PathLike) -> ImageBuffer:
    with Image.open(path) as im:
        if im.mode == "L":
            arr = np.asarray(im, dtype=np.float64)[:, :, None]
        else:
            arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return ImageBuffer(arr / 255.0)
